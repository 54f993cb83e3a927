//! Transmit-side combination of the power and information waveforms.
//!
//! Time-sharing sends the multisine for the first `alpha_tx` of the slot
//! and the OFDM frame for the rest, each segment at the full transmit
//! power. Superposition adds `sqrt(rho_tx)` of the multisine to
//! `sqrt(1 - rho_tx)` of the OFDM signal; the two occupy disjoint
//! subcarriers, so the information bins stay clean.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{scale_to_power_with_gain, IqBuffer};
use crate::spectrum::windowed_bin_power;
use crate::wit::OfdmPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxMode {
    TimeSharing,
    Superposition,
    WitOnly,
    WptOnly,
}

impl TxMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::TimeSharing => "time-sharing",
            Self::Superposition => "superposition",
            Self::WitOnly => "wit-only",
            Self::WptOnly => "wpt-only",
        }
    }
}

impl fmt::Display for TxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time-sharing" => Ok(Self::TimeSharing),
            "superposition" => Ok(Self::Superposition),
            "wit-only" => Ok(Self::WitOnly),
            "wpt-only" => Ok(Self::WptOnly),
            other => Err(Error::invalid(format!(
                "unknown tx mode `{other}` (expected time-sharing, superposition, wit-only or wpt-only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxDesign {
    pub mode: TxMode,
    /// Fraction of the slot given to the power waveform.
    pub alpha_tx: f64,
    /// Fraction of the transmit power given to the power waveform.
    pub rho_tx: f64,
    pub slot_duration_s: f64,
    pub total_tx_power_w: f64,
}

impl Default for TxDesign {
    fn default() -> Self {
        Self {
            mode: TxMode::Superposition,
            alpha_tx: 0.5,
            rho_tx: 0.5,
            slot_duration_s: 1.0,
            total_tx_power_w: crate::signal::dbm_to_watts(35.0),
        }
    }
}

pub(crate) fn check_ratio(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

impl TxDesign {
    pub fn validate(&self) -> Result<()> {
        check_ratio("alpha_tx", self.alpha_tx)?;
        check_ratio("rho_tx", self.rho_tx)?;
        if !(self.slot_duration_s > 0.0) {
            return Err(Error::invalid(format!(
                "slot duration must be positive, got {}",
                self.slot_duration_s
            )));
        }
        if !(self.total_tx_power_w >= 0.0) || !self.total_tx_power_w.is_finite() {
            return Err(Error::invalid(
                "transmit power must be finite and non-negative",
            ));
        }
        Ok(())
    }

    pub fn slot_samples(&self, sample_rate_hz: f64) -> usize {
        (self.slot_duration_s * sample_rate_hz).round() as usize
    }
}

/// Where the power segment of a time-shared slot ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentMap {
    /// Index of the first sample after the power segment.
    pub boundary: usize,
    pub n_samples: usize,
}

impl SegmentMap {
    pub fn for_ratio(alpha: f64, n_samples: usize) -> Self {
        Self {
            boundary: ((alpha * n_samples as f64).round() as usize).min(n_samples),
            n_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeShared {
    pub signal: IqBuffer,
    pub segments: SegmentMap,
    /// Amplitude factor applied to the first segment's source.
    pub first_gain: f64,
    /// Amplitude factor applied to the second segment's source.
    pub second_gain: f64,
}

/// Time-division combination: the power waveform for the first
/// `round(alpha_tx * N)` samples, then the information waveform. Both
/// sources are repeated cyclically if shorter than their segment.
pub fn time_share(x_p: &IqBuffer, x_i: &IqBuffer, design: &TxDesign) -> Result<TimeShared> {
    if design.mode != TxMode::TimeSharing {
        return Err(Error::invalid(format!(
            "time_share called with tx mode {}",
            design.mode
        )));
    }
    design.validate()?;
    let n = design.slot_samples(x_p.sample_rate_hz);
    time_share_segments(
        x_p,
        x_i,
        SegmentMap::for_ratio(design.alpha_tx, n),
        design.total_tx_power_w,
    )
}

/// Two-segment slot with each segment independently scaled to `power_w`.
pub fn time_share_segments(
    first: &IqBuffer,
    second: &IqBuffer,
    segments: SegmentMap,
    power_w: f64,
) -> Result<TimeShared> {
    if first.sample_rate_hz != second.sample_rate_hz {
        return Err(Error::SampleRateMismatch(
            first.sample_rate_hz,
            second.sample_rate_hz,
        ));
    }
    let SegmentMap {
        boundary,
        n_samples,
    } = segments;
    let mut samples = Vec::with_capacity(n_samples);
    let mut first_gain = 0.0;
    let mut second_gain = 0.0;
    if boundary > 0 {
        let (seg, g) = scale_to_power_with_gain(&first.cyclic_take(boundary)?, power_w)?;
        samples.extend(seg.samples);
        first_gain = g;
    }
    if n_samples > boundary {
        let (seg, g) =
            scale_to_power_with_gain(&second.cyclic_take(n_samples - boundary)?, power_w)?;
        samples.extend(seg.samples);
        second_gain = g;
    }
    Ok(TimeShared {
        signal: IqBuffer::new(samples, first.sample_rate_hz)?,
        segments,
        first_gain,
        second_gain,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superposed {
    /// `wpt_gain * x_p + wit_gain * x_i`.
    pub signal: IqBuffer,
    pub wpt_gain: f64,
    pub wit_gain: f64,
}

/// Off-support energy ratio above which two components count as
/// overlapping (-120 dBc).
const LEAK_LIMIT: f64 = 1e-12;

fn check_support(x: &IqBuffer, plan: &OfdmPlan, mask: &[bool], name: &'static str) -> Result<()> {
    let power = windowed_bin_power(&x.samples, plan.fft_size, plan.cp_len, plan.symbol_len());
    let total: f64 = power.iter().sum();
    if total == 0.0 {
        return Ok(());
    }
    let leak: f64 = power
        .iter()
        .zip(mask)
        .filter(|(_, &on)| !on)
        .map(|(p, _)| p)
        .sum();
    if leak > LEAK_LIMIT * total {
        return Err(Error::NotOrthogonal {
            component: name,
            leak_dbc: 10.0 * (leak / total).log10(),
        });
    }
    Ok(())
}

/// Power-ratio combination on disjoint subcarriers.
///
/// Each component is first scaled to the transmit power. The cyclic prefix
/// is not orthogonal to the multisine, so the sum carries a small
/// cross-term; a final common scale restores the configured power exactly.
/// At `rho_tx` 0 or 1 the output is the scaled component itself.
pub fn superpose(
    x_p: &IqBuffer,
    x_i: &IqBuffer,
    design: &TxDesign,
    plan: &OfdmPlan,
) -> Result<Superposed> {
    if design.mode != TxMode::Superposition {
        return Err(Error::invalid(format!(
            "superpose called with tx mode {}",
            design.mode
        )));
    }
    design.validate()?;
    if x_p.sample_rate_hz != x_i.sample_rate_hz {
        return Err(Error::SampleRateMismatch(
            x_p.sample_rate_hz,
            x_i.sample_rate_hz,
        ));
    }
    if x_p.len() != x_i.len() {
        return Err(Error::LengthMismatch {
            expected: x_p.len(),
            actual: x_i.len(),
        });
    }
    check_support(x_p, plan, &plan.reserved_mask(), "WPT")?;
    check_support(x_i, plan, &plan.occupied_mask(), "WIT")?;

    let power = design.total_tx_power_w;
    let rho = design.rho_tx;
    if rho == 0.0 {
        let (s, g) = scale_to_power_with_gain(x_i, power)?;
        return Ok(Superposed {
            signal: s,
            wpt_gain: 0.0,
            wit_gain: g,
        });
    }
    if rho == 1.0 {
        let (s, g) = scale_to_power_with_gain(x_p, power)?;
        return Ok(Superposed {
            signal: s,
            wpt_gain: g,
            wit_gain: 0.0,
        });
    }

    let (p, gp) = scale_to_power_with_gain(x_p, power)?;
    let (i, gi) = scale_to_power_with_gain(x_i, power)?;
    let (ap, ai) = (rho.sqrt(), (1.0 - rho).sqrt());
    let sum: Vec<Complex64> = p
        .samples
        .iter()
        .zip(&i.samples)
        .map(|(a, b)| a * ap + b * ai)
        .collect();
    let (signal, c) = scale_to_power_with_gain(&IqBuffer::new(sum, x_p.sample_rate_hz)?, power)?;
    Ok(Superposed {
        signal,
        wpt_gain: c * ap * gp,
        wit_gain: c * ai * gi,
    })
}
