//! Multisine power-transfer waveform on the OFDM subcarrier grid.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::IqBuffer;
use crate::spectrum::SUBCARRIER_SPACING_HZ;

/// Default tone set: 8 tones, 4 bins apart, spanning 32 bins (10 MHz).
pub const DEFAULT_TONES: [i32; 8] = [-16, -12, -8, -4, 4, 8, 12, 16];

#[derive(Debug, Clone, PartialEq)]
pub struct MultisineConfig {
    /// Signed subcarrier indices on the 312.5 kHz grid.
    pub tone_subcarriers: Vec<i32>,
    /// Per-tone phase in radians.
    pub phases: Vec<f64>,
    pub total_power_w: f64,
}

impl Default for MultisineConfig {
    fn default() -> Self {
        Self::with_tones(DEFAULT_TONES.to_vec(), 1.0)
    }
}

impl MultisineConfig {
    /// In-phase tones at the given indices.
    pub fn with_tones(tone_subcarriers: Vec<i32>, total_power_w: f64) -> Self {
        let phases = vec![0.0; tone_subcarriers.len()];
        Self {
            tone_subcarriers,
            phases,
            total_power_w,
        }
    }

    /// `n` in-phase tones 4 bins apart, symmetric about DC where possible:
    /// 1 -> {4}, 2 -> {-4, 4}, 4 -> {-8, -4, 4, 8}, 8 -> the default set.
    pub fn evenly_spaced(n: usize, total_power_w: f64) -> Self {
        let tones = if n == 1 {
            vec![4]
        } else {
            let half = (n / 2) as i32;
            let mut t: Vec<i32> = (1..=half).rev().map(|k| -4 * k).collect();
            t.extend((1..=(n as i32 - half)).map(|k| 4 * k));
            t
        };
        Self::with_tones(tones, total_power_w)
    }

    pub fn n_tones(&self) -> usize {
        self.tone_subcarriers.len()
    }

    pub fn per_tone_power_w(&self) -> f64 {
        self.total_power_w / self.n_tones() as f64
    }

    /// Edge-to-edge occupied span in Hz.
    pub fn span_hz(&self) -> f64 {
        let lo = self.tone_subcarriers.iter().min().copied().unwrap_or(0);
        let hi = self.tone_subcarriers.iter().max().copied().unwrap_or(0);
        (hi - lo) as f64 * SUBCARRIER_SPACING_HZ
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.tone_subcarriers.is_empty() {
            return Err(Error::invalid("multisine needs at least one tone"));
        }
        if self.phases.len() != self.tone_subcarriers.len() {
            return Err(Error::invalid(format!(
                "{} phases given for {} tones",
                self.phases.len(),
                self.tone_subcarriers.len()
            )));
        }
        if !(self.total_power_w >= 0.0) || !self.total_power_w.is_finite() {
            return Err(Error::invalid(format!(
                "multisine power must be finite and non-negative, got {}",
                self.total_power_w
            )));
        }
        let mut seen = HashSet::new();
        for &k in &self.tone_subcarriers {
            if !seen.insert(k) {
                return Err(Error::DuplicateTone(k));
            }
            let freq_hz = k as f64 * SUBCARRIER_SPACING_HZ;
            if freq_hz < -sample_rate_hz / 2.0 || freq_hz >= sample_rate_hz / 2.0 {
                return Err(Error::ToneBeyondNyquist {
                    index: k,
                    freq_hz,
                    sample_rate_hz,
                });
            }
        }
        Ok(())
    }
}

/// Number of samples in one multisine period, when the grid spacing divides
/// the sample rate.
pub fn period_samples(sample_rate_hz: f64) -> Option<usize> {
    let ratio = sample_rate_hz / SUBCARRIER_SPACING_HZ;
    let r = ratio.round();
    ((ratio - r).abs() < 1e-9 && r >= 1.0).then_some(r as usize)
}

/// Sum of `sqrt(P/N) exp(j(2 pi f_k t + phi_k))` over the configured tones.
pub fn generate_multisine(
    cfg: &MultisineConfig,
    duration_s: f64,
    sample_rate_hz: f64,
) -> Result<IqBuffer> {
    if !(duration_s > 0.0) {
        return Err(Error::invalid(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    let n = (duration_s * sample_rate_hz).round() as usize;
    generate_multisine_samples(cfg, n, sample_rate_hz)
}

/// Same as [`generate_multisine`] with an explicit sample count.
pub fn generate_multisine_samples(
    cfg: &MultisineConfig,
    n_samples: usize,
    sample_rate_hz: f64,
) -> Result<IqBuffer> {
    cfg.validate(sample_rate_hz)?;
    if n_samples == 0 {
        return Err(Error::EmptySignal);
    }
    let amp = cfg.per_tone_power_w().sqrt();

    // Exact integer phase arithmetic when the tones sit on a periodic grid.
    if let Some(period) = period_samples(sample_rate_hz) {
        let one: Vec<Complex64> = (0..period.min(n_samples))
            .map(|n| {
                cfg.tone_subcarriers
                    .iter()
                    .zip(&cfg.phases)
                    .map(|(&k, &phi)| {
                        let m = (k as i64 * n as i64).rem_euclid(period as i64);
                        Complex64::from_polar(amp, 2.0 * PI * m as f64 / period as f64 + phi)
                    })
                    .sum()
            })
            .collect();
        let samples = one.iter().copied().cycle().take(n_samples).collect();
        return IqBuffer::new(samples, sample_rate_hz);
    }

    let samples = (0..n_samples)
        .map(|n| {
            let t = n as f64 / sample_rate_hz;
            cfg.tone_subcarriers
                .iter()
                .zip(&cfg.phases)
                .map(|(&k, &phi)| {
                    let cycles = (k as f64 * SUBCARRIER_SPACING_HZ * t).fract();
                    Complex64::from_polar(amp, 2.0 * PI * cycles + phi)
                })
                .sum()
        })
        .collect();
    IqBuffer::new(samples, sample_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{average_power, papr_db, DEFAULT_SAMPLE_RATE_HZ};
    use crate::spectrum::{bin_of, GridFft};
    use proptest::prelude::*;

    const FS: f64 = DEFAULT_SAMPLE_RATE_HZ;

    /// Continuous-time PAPR found by brute-force search on a dense grid,
    /// independent of the sampled generator.
    fn dense_grid_papr_db(tones: &[i32], phases: &[f64], points_per_period: usize) -> f64 {
        let period_s = 1.0 / SUBCARRIER_SPACING_HZ;
        let mut peak = 0.0f64;
        let mut sum = 0.0;
        for i in 0..points_per_period {
            let t = period_s * i as f64 / points_per_period as f64;
            let x: Complex64 = tones
                .iter()
                .zip(phases)
                .map(|(&k, &p)| {
                    Complex64::from_polar(1.0, 2.0 * PI * k as f64 * SUBCARRIER_SPACING_HZ * t + p)
                })
                .sum();
            peak = peak.max(x.norm_sqr());
            sum += x.norm_sqr();
        }
        10.0 * (peak / (sum / points_per_period as f64)).log10()
    }

    #[test]
    fn default_config_shape() {
        let cfg = MultisineConfig::default();
        assert_eq!(cfg.n_tones(), 8);
        assert_eq!(cfg.span_hz(), 10e6);
        assert_eq!(MultisineConfig::evenly_spaced(8, 1.0), cfg);
        assert_eq!(
            MultisineConfig::evenly_spaced(1, 1.0).tone_subcarriers,
            vec![4]
        );
        assert_eq!(
            MultisineConfig::evenly_spaced(4, 1.0).tone_subcarriers,
            vec![-8, -4, 4, 8]
        );
    }

    #[test]
    fn single_tone_is_constant_envelope() {
        let cfg = MultisineConfig::with_tones(vec![4], 1.0);
        let buf = generate_multisine(&cfg, 64.0 / FS * 10.0, FS).unwrap();
        assert!(papr_db(&buf).unwrap().abs() < 1e-12);
    }

    #[test]
    fn eight_tone_papr_matches_dense_grid_oracle() {
        let cfg = MultisineConfig::default();
        let oracle = dense_grid_papr_db(&cfg.tone_subcarriers, &cfg.phases, 64 * 256);
        assert!((oracle - 10.0 * 8f64.log10()).abs() < 1e-9);
        let buf = generate_multisine_samples(&cfg, 64 * 4, FS).unwrap();
        let papr = papr_db(&buf).unwrap();
        assert!((papr - 9.031).abs() < 0.01, "{papr}");
        assert!((papr - oracle).abs() < 0.01);
    }

    #[test]
    fn power_over_integer_periods() {
        let cfg = MultisineConfig {
            total_power_w: 1e-5,
            ..Default::default()
        };
        let buf = generate_multisine_samples(&cfg, 64 * 25, FS).unwrap();
        let p = average_power(&buf).unwrap();
        assert!((p - 1e-5).abs() < 1e-6 * 1e-5);
    }

    #[test]
    fn one_period_has_only_configured_bins() {
        let cfg = MultisineConfig::default();
        let mut x = generate_multisine_samples(&cfg, 64, FS).unwrap().samples;
        GridFft::new(64).forward(&mut x);
        let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let expected = cfg.per_tone_power_w() * 64.0;
        for (bin, v) in x.iter().enumerate() {
            let on = cfg.tone_subcarriers.iter().any(|&k| bin_of(k, 64) == bin);
            if on {
                assert!((v.norm_sqr() - expected).abs() <= 1e-9 * expected);
            } else {
                assert!(v.norm_sqr() < 1e-12 * total, "bin {bin} leaks");
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let dup = MultisineConfig::with_tones(vec![4, 4], 1.0);
        assert!(matches!(
            generate_multisine(&dup, 1e-5, FS),
            Err(Error::DuplicateTone(4))
        ));
        let far = MultisineConfig::with_tones(vec![40], 1.0);
        assert!(matches!(
            generate_multisine(&far, 1e-5, FS),
            Err(Error::ToneBeyondNyquist { index: 40, .. })
        ));
        assert!(generate_multisine(&MultisineConfig::default(), 0.0, FS).is_err());
    }

    #[test]
    fn off_grid_rate_uses_direct_synthesis() {
        let cfg = MultisineConfig::default();
        let buf = generate_multisine(&cfg, 1e-4, 25e6).unwrap();
        assert_eq!(buf.len(), 2500);
        assert!((average_power(&buf).unwrap() - 1.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn power_is_phase_independent(phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 8)) {
            let cfg = MultisineConfig { phases, ..Default::default() };
            let buf = generate_multisine_samples(&cfg, 64 * 3, FS).unwrap();
            let p = average_power(&buf).unwrap();
            prop_assert!((p - 1.0).abs() < 1e-9);
        }
    }
}
