//! Information waveform: an 802.11a/g-style OFDM signal that leaves the
//! power-transfer subcarriers empty.
//!
//! Per symbol, coded bits are mapped onto the data bins, fixed `+1` pilots go
//! on the pilot bins, and the reserved and null bins are zero. A 64-point
//! orthonormal inverse FFT and a 16-sample cyclic prefix give 80 samples
//! (4 us at 20 MHz). Scrambling, interleaving and the preamble are not
//! modelled; the receiver is told where the frame starts.

mod bits;
mod coding;
mod constellation;

use std::collections::BTreeSet;

use num_complex::Complex64;

pub use bits::{ber, BitStream};
pub use coding::{
    coded_len_for_payload, conv_encode, encode_mother, punctured_len, viterbi_decode, TAIL_BITS,
};
pub use constellation::{demap_symbols, map_symbols, ModulationScheme};

use crate::error::{Error, Result};
use crate::multisine::{MultisineConfig, DEFAULT_TONES};
use crate::signal::{scale_to_power_with_gain, IqBuffer, DEFAULT_SAMPLE_RATE_HZ};
use crate::spectrum::{bin_of, GridFft, GRID_FFT_SIZE};

pub const PILOT_SUBCARRIERS: [i32; 4] = [-21, -7, 7, 21];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodingRate {
    /// K=7 convolutional code punctured to 3/4.
    ThreeQuarters,
    /// Bits go straight to the mapper; used for BER-curve checks.
    Uncoded,
}

impl CodingRate {
    pub fn rate(self) -> f64 {
        match self {
            Self::ThreeQuarters => 0.75,
            Self::Uncoded => 1.0,
        }
    }
}

/// Subcarrier map and framing of the information waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmPlan {
    pub fft_size: usize,
    pub cp_len: usize,
    pub sample_rate_hz: f64,
    pub data_subcarriers: Vec<i32>,
    pub pilot_subcarriers: Vec<i32>,
    pub reserved_wpt_subcarriers: Vec<i32>,
    pub modulation: ModulationScheme,
    pub coding: CodingRate,
}

impl OfdmPlan {
    pub fn new(modulation: ModulationScheme) -> Self {
        Self::with_reserved(modulation, &DEFAULT_TONES)
    }

    /// 802.11 data set minus pilots minus the given reserved bins.
    pub fn with_reserved(modulation: ModulationScheme, reserved: &[i32]) -> Self {
        let data = (-26..=26)
            .filter(|&k| k != 0 && !PILOT_SUBCARRIERS.contains(&k) && !reserved.contains(&k))
            .collect();
        Self {
            fft_size: GRID_FFT_SIZE,
            cp_len: 16,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            data_subcarriers: data,
            pilot_subcarriers: PILOT_SUBCARRIERS.to_vec(),
            reserved_wpt_subcarriers: reserved.to_vec(),
            modulation,
            coding: CodingRate::ThreeQuarters,
        }
    }

    pub fn uncoded(mut self) -> Self {
        self.coding = CodingRate::Uncoded;
        self
    }

    pub fn symbol_len(&self) -> usize {
        self.fft_size + self.cp_len
    }

    pub fn symbol_duration_s(&self) -> f64 {
        self.symbol_len() as f64 / self.sample_rate_hz
    }

    pub fn coded_bits_per_symbol(&self) -> usize {
        self.data_subcarriers.len() * self.modulation.bits_per_symbol()
    }

    /// Bins carrying nothing: everything not data, pilot or reserved.
    pub fn null_subcarriers(&self) -> Vec<i32> {
        let half = (self.fft_size / 2) as i32;
        (-half..half)
            .filter(|k| {
                !self.data_subcarriers.contains(k)
                    && !self.pilot_subcarriers.contains(k)
                    && !self.reserved_wpt_subcarriers.contains(k)
            })
            .collect()
    }

    /// Peak information rate in Mbit/s.
    pub fn max_data_rate_mbps(&self) -> f64 {
        let bits = (self.data_subcarriers.len() * self.modulation.bits_per_symbol()) as f64;
        let us = self.symbol_len() as f64 / (self.sample_rate_hz / 1e6);
        bits * self.coding.rate() / us
    }

    pub fn validate(&self) -> Result<()> {
        if self.fft_size == 0 || !self.fft_size.is_power_of_two() {
            return Err(Error::invalid(format!("bad FFT size {}", self.fft_size)));
        }
        if self.cp_len > self.fft_size {
            return Err(Error::invalid("cyclic prefix longer than the FFT"));
        }
        if self.data_subcarriers.is_empty() {
            return Err(Error::invalid("plan has no data subcarriers"));
        }
        let half = (self.fft_size / 2) as i32;
        let mut seen = BTreeSet::new();
        for &k in self
            .data_subcarriers
            .iter()
            .chain(&self.pilot_subcarriers)
            .chain(&self.reserved_wpt_subcarriers)
        {
            if k < -half || k >= half {
                return Err(Error::invalid(format!("subcarrier {k} outside the grid")));
            }
            if !seen.insert(k) {
                return Err(Error::invalid(format!(
                    "subcarrier {k} assigned to more than one role"
                )));
            }
        }
        Ok(())
    }

    /// The reserved bins must be exactly the multisine's tones.
    pub fn validate_against(&self, multisine: &MultisineConfig) -> Result<()> {
        let reserved: BTreeSet<_> = self.reserved_wpt_subcarriers.iter().collect();
        let tones: BTreeSet<_> = multisine.tone_subcarriers.iter().collect();
        if reserved != tones {
            return Err(Error::invalid(format!(
                "reserved subcarriers {:?} do not match multisine tones {:?}",
                self.reserved_wpt_subcarriers, multisine.tone_subcarriers
            )));
        }
        Ok(())
    }

    /// Coded (or raw, when uncoded) bits needed on the air for a payload.
    pub fn air_bits_for_payload(&self, n_payload: usize) -> usize {
        match self.coding {
            CodingRate::ThreeQuarters => coded_len_for_payload(n_payload),
            CodingRate::Uncoded => n_payload,
        }
    }

    pub fn symbols_for_payload(&self, n_payload: usize) -> usize {
        self.air_bits_for_payload(n_payload)
            .div_ceil(self.coded_bits_per_symbol())
    }

    /// Largest payload that fits into `n_symbols` OFDM symbols.
    pub fn payload_capacity(&self, n_symbols: usize) -> usize {
        let air = n_symbols * self.coded_bits_per_symbol();
        match self.coding {
            CodingRate::ThreeQuarters => {
                let mut n = (3 * air / 4).saturating_sub(TAIL_BITS);
                while n > 0 && coded_len_for_payload(n) > air {
                    n -= 1;
                }
                if coded_len_for_payload(n) > air {
                    0
                } else {
                    n
                }
            }
            CodingRate::Uncoded => air,
        }
    }

    fn bin_mask(&self, subcarriers: &[i32]) -> Vec<bool> {
        let mut mask = vec![false; self.fft_size];
        for &k in subcarriers {
            mask[bin_of(k, self.fft_size)] = true;
        }
        mask
    }

    /// FFT-bin mask of data plus pilot bins.
    pub fn occupied_mask(&self) -> Vec<bool> {
        let mut m = self.bin_mask(&self.data_subcarriers);
        for (a, b) in m.iter_mut().zip(self.bin_mask(&self.pilot_subcarriers)) {
            *a |= b;
        }
        m
    }

    pub fn reserved_mask(&self) -> Vec<bool> {
        self.bin_mask(&self.reserved_wpt_subcarriers)
    }
}

/// Peak rate of the default 40-data-bin plan at rate 3/4.
pub fn max_data_rate(scheme: ModulationScheme) -> f64 {
    OfdmPlan::new(scheme).max_data_rate_mbps()
}

/// A modulated frame and the bookkeeping a receiver needs.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    pub signal: IqBuffer,
    /// Amplitude a unit constellation point has in the orthonormal FFT of a
    /// symbol body.
    pub symbol_gain: f64,
    pub n_symbols: usize,
    pub n_payload_bits: usize,
    /// Zero bits appended after coding to fill the last symbol.
    pub pad_bits: usize,
}

/// Modulate a payload into whole OFDM symbols scaled to `total_power_w`.
pub fn ofdm_modulate(
    payload: &BitStream,
    plan: &OfdmPlan,
    total_power_w: f64,
) -> Result<OfdmFrame> {
    let n_sym = plan.symbols_for_payload(payload.len());
    ofdm_modulate_padded(payload, plan, n_sym * plan.symbol_len(), total_power_w)
}

/// Modulate into a buffer of exactly `n_samples`, zero-filling after the
/// last symbol. The whole buffer, tail included, is scaled to
/// `total_power_w`.
pub fn ofdm_modulate_padded(
    payload: &BitStream,
    plan: &OfdmPlan,
    n_samples: usize,
    total_power_w: f64,
) -> Result<OfdmFrame> {
    plan.validate()?;
    if payload.is_empty() {
        return Err(Error::invalid("payload is empty"));
    }
    let mut air = match plan.coding {
        CodingRate::ThreeQuarters => conv_encode(payload),
        CodingRate::Uncoded => payload.clone(),
    };
    let cbps = plan.coded_bits_per_symbol();
    let n_sym = air.len().div_ceil(cbps);
    let pad_bits = air.pad_zeros(n_sym * cbps - air.len());
    if n_sym * plan.symbol_len() > n_samples {
        return Err(Error::LengthMismatch {
            expected: n_sym * plan.symbol_len(),
            actual: n_samples,
        });
    }

    let fft = GridFft::new(plan.fft_size);
    let data_bins: Vec<usize> = plan
        .data_subcarriers
        .iter()
        .map(|&k| bin_of(k, plan.fft_size))
        .collect();
    let pilot_bins: Vec<usize> = plan
        .pilot_subcarriers
        .iter()
        .map(|&k| bin_of(k, plan.fft_size))
        .collect();

    let mut samples = Vec::with_capacity(n_samples);
    let mut grid = vec![Complex64::new(0.0, 0.0); plan.fft_size];
    for sym_bits in air.0.chunks_exact(cbps) {
        grid.fill(Complex64::new(0.0, 0.0));
        let points = map_symbols(sym_bits, plan.modulation)?;
        for (&bin, p) in data_bins.iter().zip(points) {
            grid[bin] = p;
        }
        for &bin in &pilot_bins {
            grid[bin] = Complex64::new(1.0, 0.0);
        }
        fft.inverse(&mut grid);
        samples.extend_from_slice(&grid[plan.fft_size - plan.cp_len..]);
        samples.extend_from_slice(&grid);
    }
    samples.resize(n_samples, Complex64::new(0.0, 0.0));

    let unit = IqBuffer::new(samples, plan.sample_rate_hz)?;
    let (signal, symbol_gain) = scale_to_power_with_gain(&unit, total_power_w)?;
    Ok(OfdmFrame {
        signal,
        symbol_gain,
        n_symbols: n_sym,
        n_payload_bits: payload.len(),
        pad_bits,
    })
}

/// How the receiver learns the per-bin gains.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelEstimate {
    /// Known complex gain per FFT bin (length `fft_size`), covering the
    /// propagation channel and every amplitude scaling since the mapper.
    Genie(Vec<Complex64>),
    /// Least-squares estimate from the `+1` pilots, averaged over the frame
    /// and interpolated linearly across subcarriers.
    PilotLeastSquares,
}

/// Recover the payload from a frame that starts at sample 0.
pub fn ofdm_demodulate(
    rx: &IqBuffer,
    plan: &OfdmPlan,
    chan_est: &ChannelEstimate,
    n_payload_bits: usize,
) -> Result<BitStream> {
    let symbols = equalized_symbols(rx, plan, chan_est, n_payload_bits)?;
    let mut air = demap_symbols(&symbols, plan.modulation);
    air.truncate(plan.air_bits_for_payload(n_payload_bits));
    match plan.coding {
        CodingRate::ThreeQuarters => {
            let mut decoded = viterbi_decode(&BitStream(air))?;
            decoded.0.truncate(n_payload_bits);
            Ok(decoded)
        }
        CodingRate::Uncoded => Ok(BitStream(air)),
    }
}

/// CP removal, FFT and one-tap equalization of every data bin, in symbol
/// order.
pub fn equalized_symbols(
    rx: &IqBuffer,
    plan: &OfdmPlan,
    chan_est: &ChannelEstimate,
    n_payload_bits: usize,
) -> Result<Vec<Complex64>> {
    plan.validate()?;
    if n_payload_bits == 0 {
        return Ok(Vec::new());
    }
    let n_sym = plan.symbols_for_payload(n_payload_bits);
    let need = n_sym * plan.symbol_len();
    if rx.len() < need {
        return Err(Error::LengthMismatch {
            expected: need,
            actual: rx.len(),
        });
    }

    let fft = GridFft::new(plan.fft_size);
    let spectra: Vec<Vec<Complex64>> = (0..n_sym)
        .map(|s| {
            let start = s * plan.symbol_len() + plan.cp_len;
            let mut body = rx.samples[start..start + plan.fft_size].to_vec();
            fft.forward(&mut body);
            body
        })
        .collect();

    let gains = match chan_est {
        ChannelEstimate::Genie(g) => {
            if g.len() != plan.fft_size {
                return Err(Error::LengthMismatch {
                    expected: plan.fft_size,
                    actual: g.len(),
                });
            }
            g.clone()
        }
        ChannelEstimate::PilotLeastSquares => pilot_ls_estimate(&spectra, plan),
    };

    let data_bins: Vec<(i32, usize)> = plan
        .data_subcarriers
        .iter()
        .map(|&k| (k, bin_of(k, plan.fft_size)))
        .collect();
    for &(k, bin) in &data_bins {
        if gains[bin].norm_sqr() == 0.0 || !gains[bin].norm_sqr().is_finite() {
            return Err(Error::UnequalizableBin(k));
        }
    }

    let mut out = Vec::with_capacity(n_sym * data_bins.len());
    for spec in &spectra {
        out.extend(data_bins.iter().map(|&(_, bin)| spec[bin] / gains[bin]));
    }
    Ok(out)
}

fn pilot_ls_estimate(spectra: &[Vec<Complex64>], plan: &OfdmPlan) -> Vec<Complex64> {
    let mut pilots: Vec<(i32, Complex64)> = plan
        .pilot_subcarriers
        .iter()
        .map(|&k| {
            let bin = bin_of(k, plan.fft_size);
            let sum: Complex64 = spectra.iter().map(|s| s[bin]).sum();
            (k, sum / spectra.len().max(1) as f64)
        })
        .collect();
    pilots.sort_by_key(|p| p.0);

    let half = (plan.fft_size / 2) as i32;
    let mut gains = vec![Complex64::new(0.0, 0.0); plan.fft_size];
    for k in -half..half {
        let g = match pilots.iter().position(|p| p.0 >= k) {
            None => pilots.last().map(|p| p.1).unwrap_or_default(),
            Some(0) => pilots[0].1,
            Some(i) => {
                let (k0, g0) = pilots[i - 1];
                let (k1, g1) = pilots[i];
                let w = (k - k0) as f64 / (k1 - k0) as f64;
                g0 * (1.0 - w) + g1 * w
            }
        };
        gains[bin_of(k, plan.fft_size)] = g;
    }
    gains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::average_power;
    use crate::spectrum::{tap_response, windowed_bin_power};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn plan_partitions_the_grid() {
        let plan = OfdmPlan::new(ModulationScheme::Qpsk);
        plan.validate().unwrap();
        assert_eq!(plan.data_subcarriers.len(), 40);
        assert_eq!(plan.pilot_subcarriers.len(), 4);
        assert_eq!(plan.reserved_wpt_subcarriers.len(), 8);
        let nulls = plan.null_subcarriers();
        assert_eq!(nulls.len(), 64 - 40 - 4 - 8);
        assert!(nulls.contains(&0));
        let all: BTreeSet<i32> = plan
            .data_subcarriers
            .iter()
            .chain(&plan.pilot_subcarriers)
            .chain(&plan.reserved_wpt_subcarriers)
            .chain(&nulls)
            .copied()
            .collect();
        assert_eq!(all, (-32..32).collect());
        plan.validate_against(&MultisineConfig::default()).unwrap();
        assert!(plan
            .validate_against(&MultisineConfig::with_tones(vec![4], 1.0))
            .is_err());
    }

    #[test]
    fn rate_table() {
        assert_eq!(max_data_rate(ModulationScheme::Bpsk), 7.5);
        assert_eq!(max_data_rate(ModulationScheme::Qpsk), 15.0);
        assert_eq!(max_data_rate(ModulationScheme::Qam16), 30.0);
        assert_eq!(max_data_rate(ModulationScheme::Qam64), 45.0);
    }

    #[test]
    fn symbol_is_80_samples() {
        let plan = OfdmPlan::new(ModulationScheme::Bpsk);
        assert_eq!(plan.symbol_len(), 80);
        assert!((plan.symbol_duration_s() - 4e-6).abs() < 1e-18);
        let frame = ofdm_modulate(&BitStream::zeros(24), &plan, 1.0).unwrap();
        assert_eq!(frame.n_symbols, 1);
        assert_eq!(frame.signal.len(), 80);
    }

    #[test]
    fn capacity_fills_symbols_exactly() {
        for scheme in ModulationScheme::ALL {
            let plan = OfdmPlan::new(scheme);
            for n_sym in [1, 3, 50, 500] {
                let p = plan.payload_capacity(n_sym);
                assert_eq!(plan.symbols_for_payload(p), n_sym);
                assert!(plan.symbols_for_payload(p + 1) > n_sym);
            }
        }
        assert_eq!(
            OfdmPlan::new(ModulationScheme::Qpsk).payload_capacity(500),
            29_994
        );
    }

    #[test]
    fn spectral_occupancy_by_construction() {
        let plan = OfdmPlan::new(ModulationScheme::Bpsk);
        let frame = ofdm_modulate(&BitStream::zeros(24), &plan, 1.0).unwrap();
        let power = windowed_bin_power(&frame.signal.samples, 64, plan.cp_len, 80);
        let total: f64 = power.iter().sum();
        let occupied = plan.occupied_mask();
        for (bin, p) in power.iter().enumerate() {
            if !occupied[bin] {
                assert!(*p < 1e-12 * total, "bin {bin}");
            } else {
                assert!(*p > 0.0);
            }
        }
    }

    #[test]
    fn reserved_bins_are_empty_for_random_payloads() {
        let plan = OfdmPlan::new(ModulationScheme::Qam16);
        let payload = BitStream::random(5000, &mut rng(1));
        let frame = ofdm_modulate(&payload, &plan, 1e-5).unwrap();
        let power = windowed_bin_power(&frame.signal.samples, 64, plan.cp_len, 80);
        let total: f64 = power.iter().sum();
        for &k in &plan.reserved_wpt_subcarriers {
            assert!(power[bin_of(k, 64)] < 1e-12 * total);
        }
        let p = average_power(&frame.signal).unwrap();
        assert!((p - 1e-5).abs() < 1e-12 * 1e-5);
    }

    #[test]
    fn noiseless_loopback_every_scheme() {
        for scheme in ModulationScheme::ALL {
            let plan = OfdmPlan::new(scheme);
            let payload = BitStream::random(10_000, &mut rng(scheme as u64));
            let frame = ofdm_modulate(&payload, &plan, 2.0).unwrap();
            let genie = ChannelEstimate::Genie(vec![Complex64::new(frame.symbol_gain, 0.0); 64]);
            let out = ofdm_demodulate(&frame.signal, &plan, &genie, payload.len()).unwrap();
            assert_eq!(out, payload, "{scheme}");
            let out_ls = ofdm_demodulate(
                &frame.signal,
                &plan,
                &ChannelEstimate::PilotLeastSquares,
                payload.len(),
            )
            .unwrap();
            assert_eq!(out_ls, payload, "{scheme} pilot LS");
        }
    }

    #[test]
    fn two_tap_channel_with_genie_equalization() {
        let plan = OfdmPlan::new(ModulationScheme::Qam64);
        let payload = BitStream::random(4000, &mut rng(9));
        let frame = ofdm_modulate(&payload, &plan, 1.0).unwrap();
        let taps = [Complex64::new(0.9, 0.1), Complex64::new(0.25, -0.3)];
        // linear convolution, zero initial state
        let x = &frame.signal.samples;
        let y: Vec<Complex64> = (0..x.len())
            .map(|n| {
                taps[0] * x[n]
                    + if n > 0 {
                        taps[1] * x[n - 1]
                    } else {
                        Complex64::default()
                    }
            })
            .collect();
        let rx = IqBuffer::new(y, plan.sample_rate_hz).unwrap();
        let gains: Vec<_> = tap_response(&taps, 64)
            .into_iter()
            .map(|h| h * frame.symbol_gain)
            .collect();
        let out =
            ofdm_demodulate(&rx, &plan, &ChannelEstimate::Genie(gains), payload.len()).unwrap();
        assert_eq!(out, payload);
    }

    #[test]
    fn zero_gain_on_data_bin_is_rejected() {
        let plan = OfdmPlan::new(ModulationScheme::Qpsk);
        let frame = ofdm_modulate(&BitStream::zeros(100), &plan, 1.0).unwrap();
        let mut g = vec![Complex64::new(1.0, 0.0); 64];
        g[bin_of(-26, 64)] = Complex64::new(0.0, 0.0);
        assert!(matches!(
            ofdm_demodulate(&frame.signal, &plan, &ChannelEstimate::Genie(g), 100),
            Err(Error::UnequalizableBin(-26))
        ));
    }

    #[test]
    fn empty_payload_is_rejected() {
        let plan = OfdmPlan::new(ModulationScheme::Qpsk);
        assert!(ofdm_modulate(&BitStream::default(), &plan, 1.0).is_err());
    }

    #[test]
    fn padded_frame_keeps_power_and_decodes() {
        let plan = OfdmPlan::new(ModulationScheme::Qpsk);
        let payload = BitStream::random(plan.payload_capacity(3), &mut rng(4));
        let frame = ofdm_modulate_padded(&payload, &plan, 3 * 80 + 37, 1.0).unwrap();
        assert_eq!(frame.signal.len(), 277);
        assert!((average_power(&frame.signal).unwrap() - 1.0).abs() < 1e-12);
        let g = ChannelEstimate::Genie(vec![Complex64::new(frame.symbol_gain, 0.0); 64]);
        assert_eq!(
            ofdm_demodulate(&frame.signal, &plan, &g, payload.len()).unwrap(),
            payload
        );
        assert!(ofdm_modulate_padded(&payload, &plan, 200, 1.0).is_err());
    }
}
