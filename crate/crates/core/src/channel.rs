//! Propagation, received-power calibration and receiver noise.
//!
//! The transmit signal is convolved with a short FIR channel, scaled so the
//! noiseless received power sits exactly at the configured level, and then
//! circular complex Gaussian noise is added at the antenna reference.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, streams};
use crate::signal::{average_power, IqBuffer, PowerLevel};
use crate::spectrum::{tap_response, GRID_FFT_SIZE};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    /// FIR taps at the baseband sample rate.
    pub taps: Vec<Complex64>,
    pub target_rx_power: PowerLevel,
    /// Total noise power over the simulated band.
    pub noise_floor: PowerLevel,
    pub seed: u64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            taps: vec![Complex64::new(1.0, 0.0)],
            target_rx_power: PowerLevel::dbm(-20.0),
            noise_floor: PowerLevel::dbm(-95.0),
            seed: 0,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        if self.taps.iter().all(|t| t.norm_sqr() == 0.0) {
            return Err(Error::invalid("channel needs at least one nonzero tap"));
        }
        if !(self.target_rx_power.watts() > 0.0) || !self.target_rx_power.watts().is_finite() {
            return Err(Error::invalid("target receive power must be positive"));
        }
        if !(self.noise_floor.watts() >= 0.0) {
            return Err(Error::invalid("noise floor must be non-negative"));
        }
        Ok(())
    }

    /// Receive signal-to-noise ratio at the antenna, in dB.
    pub fn antenna_snr_db(&self) -> f64 {
        self.target_rx_power.value_dbm - self.noise_floor.value_dbm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub rx: IqBuffer,
    /// 64-point response of the calibrated taps, in FFT bin order.
    pub bin_gains: Vec<Complex64>,
    /// Scale applied to the taps to hit the target power.
    pub calibration_gain: f64,
}

/// Linear convolution truncated to the input length (zero initial state).
pub fn convolve(x: &[Complex64], taps: &[Complex64]) -> Vec<Complex64> {
    if let [only] = taps {
        return x.iter().map(|v| v * only).collect();
    }
    (0..x.len())
        .map(|n| {
            taps.iter()
                .enumerate()
                .take(n + 1)
                .map(|(l, h)| h * x[n - l])
                .sum()
        })
        .collect()
}

/// Adds circular complex Gaussian noise of total power `noise_w` in place.
pub fn add_awgn(samples: &mut [Complex64], noise_w: f64, rng: &mut ChaCha8Rng) {
    if noise_w <= 0.0 {
        return;
    }
    let sigma = (noise_w / 2.0).sqrt();
    for s in samples.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *s += Complex64::new(re * sigma, im * sigma);
    }
}

/// Apply the channel with noise drawn from `ch.seed`.
pub fn apply_channel(tx: &IqBuffer, ch: &ChannelModel) -> Result<ChannelOutput> {
    apply_channel_seeded(tx, ch, ch.seed)
}

/// Apply the channel for one Monte-Carlo trial; the noise realization
/// depends only on `(ch.seed, trial_index)`.
pub fn apply_channel_trial(
    tx: &IqBuffer,
    ch: &ChannelModel,
    trial_index: u64,
) -> Result<ChannelOutput> {
    apply_channel_seeded(tx, ch, derive_seed(ch.seed, streams::NOISE, trial_index))
}

fn apply_channel_seeded(
    tx: &IqBuffer,
    ch: &ChannelModel,
    noise_seed: u64,
) -> Result<ChannelOutput> {
    ch.validate()?;
    if tx.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut y = convolve(&tx.samples, &ch.taps);
    let p = crate::signal::mean_power(&y)?;
    if p <= 0.0 {
        return Err(Error::ZeroPower {
            target_w: ch.target_rx_power.watts(),
        });
    }
    let gain = (ch.target_rx_power.watts() / p).sqrt();
    for v in y.iter_mut() {
        *v *= gain;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    add_awgn(&mut y, ch.noise_floor.watts(), &mut rng);

    let calibrated: Vec<Complex64> = ch.taps.iter().map(|t| t * gain).collect();
    Ok(ChannelOutput {
        rx: IqBuffer::new(y, tx.sample_rate_hz)?,
        bin_gains: tap_response(&calibrated, GRID_FFT_SIZE),
        calibration_gain: gain,
    })
}

/// Noiseless received power of `tx` after calibration; always the target.
pub fn calibrated_power(tx: &IqBuffer, ch: &ChannelModel) -> Result<f64> {
    let quiet = ChannelModel {
        noise_floor: PowerLevel::off(),
        ..ch.clone()
    };
    average_power(&apply_channel(tx, &quiet)?.rx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::watts_to_dbm;

    fn tone(n: usize, amp: f64) -> IqBuffer {
        IqBuffer::new(
            (0..n)
                .map(|i| Complex64::from_polar(amp, 0.2 * i as f64))
                .collect(),
            20e6,
        )
        .unwrap()
    }

    #[test]
    fn unit_tap_without_noise_pins_power() {
        let ch = ChannelModel {
            noise_floor: PowerLevel::off(),
            ..Default::default()
        };
        let tx = tone(1000, 3.0);
        let out = apply_channel(&tx, &ch).unwrap();
        let dbm = watts_to_dbm(average_power(&out.rx).unwrap());
        assert!((dbm + 20.0).abs() < 1e-9);
        // output is a scaled copy of the input
        let g = out.calibration_gain;
        for (a, b) in out.rx.samples.iter().zip(&tx.samples) {
            assert!((a - b * g).norm() < 1e-15);
        }
    }

    #[test]
    fn bin_gains_are_fft_of_calibrated_taps() {
        let taps = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.5)];
        let ch = ChannelModel {
            taps: taps.clone(),
            noise_floor: PowerLevel::off(),
            ..Default::default()
        };
        let out = apply_channel(&tone(640, 1.0), &ch).unwrap();
        for (k, g) in out.bin_gains.iter().enumerate() {
            let direct: Complex64 = taps
                .iter()
                .enumerate()
                .map(|(l, h)| {
                    h * out.calibration_gain
                        * Complex64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * (k * l) as f64 / 64.0,
                        )
                })
                .sum();
            assert!((g - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn default_snr_is_75_db() {
        assert_eq!(ChannelModel::default().antenna_snr_db(), 75.0);
    }

    #[test]
    fn calibration_ignores_tx_power_and_tap_scale() {
        for (amp, tap) in [(1.0, 1.0), (30.0, 0.01), (1e-3, 7.0)] {
            let ch = ChannelModel {
                taps: vec![
                    Complex64::new(tap, 0.0),
                    Complex64::new(0.2 * tap, -0.1 * tap),
                ],
                ..Default::default()
            };
            let p = calibrated_power(&tone(500, amp), &ch).unwrap();
            assert!((watts_to_dbm(p) + 20.0).abs() < 1e-9);
        }
    }

    #[test]
    fn noise_power_matches_floor() {
        let ch = ChannelModel {
            target_rx_power: PowerLevel::dbm(-95.0),
            ..Default::default()
        };
        let tx = IqBuffer::new(vec![Complex64::new(1e-30, 0.0); 1_000_000], 20e6).unwrap();
        let out = apply_channel(&tx, &ch).unwrap();
        // signal is at -95 dBm too, so the total is the floor plus 3 dB
        let noise: Vec<Complex64> = out
            .rx
            .samples
            .iter()
            .map(|v| v - Complex64::new(PowerLevel::dbm(-95.0).watts().sqrt(), 0.0))
            .collect();
        let p = crate::signal::mean_power(&noise).unwrap();
        assert!((watts_to_dbm(p) + 95.0).abs() < 0.1, "{}", watts_to_dbm(p));
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let ch = ChannelModel::default();
        let tx = tone(256, 1.0);
        assert_eq!(
            apply_channel(&tx, &ch).unwrap(),
            apply_channel(&tx, &ch).unwrap()
        );
        assert_eq!(
            apply_channel_trial(&tx, &ch, 3).unwrap(),
            apply_channel_trial(&tx, &ch, 3).unwrap()
        );
        assert_ne!(
            apply_channel_trial(&tx, &ch, 3).unwrap().rx,
            apply_channel_trial(&tx, &ch, 4).unwrap().rx
        );
    }

    #[test]
    fn all_zero_taps_are_rejected() {
        let ch = ChannelModel {
            taps: vec![Complex64::new(0.0, 0.0); 2],
            ..Default::default()
        };
        assert!(apply_channel(&tone(10, 1.0), &ch).is_err());
    }
}
