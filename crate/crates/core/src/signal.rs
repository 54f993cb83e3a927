//! Complex-baseband signal buffers and power arithmetic.
//!
//! Sample magnitudes are normalized so that `|x|^2` is power in watts; the
//! antenna reference impedance lives inside the rectifier constants instead
//! of being threaded through every block.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Baseband sample rate of the 64-bin OFDM grid (64 x 312.5 kHz).
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 20e6;

/// Complex baseband sample sequence tagged with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl IqBuffer {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn zeros(len: usize, sample_rate_hz: f64) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); len],
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Multiply every sample by a complex scalar.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&x| x * factor).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Copy of `self.samples[range]` at the same sample rate.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            samples: self.samples[range].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Returns `len` samples starting at the buffer origin, wrapping around
    /// as many times as needed.
    pub fn cyclic_take(&self, len: usize) -> Result<Self> {
        if self.samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        Ok(Self {
            samples: self.samples.iter().copied().cycle().take(len).collect(),
            sample_rate_hz: self.sample_rate_hz,
        })
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum::<f64>() / self.sample_rate_hz
    }
}

/// An absolute power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerLevel {
    pub value_dbm: f64,
}

impl PowerLevel {
    pub const fn dbm(value_dbm: f64) -> Self {
        Self { value_dbm }
    }

    /// A level of exactly zero watts.
    pub const fn off() -> Self {
        Self {
            value_dbm: f64::NEG_INFINITY,
        }
    }

    pub fn from_watts(watts: f64) -> Self {
        Self {
            value_dbm: watts_to_dbm(watts),
        }
    }

    pub fn watts(self) -> f64 {
        dbm_to_watts(self.value_dbm)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Mean of `|x_n|^2` over the buffer, in watts.
pub fn average_power(buf: &IqBuffer) -> Result<f64> {
    mean_power(&buf.samples)
}

pub(crate) fn mean_power(samples: &[Complex64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(samples.iter().map(|x| x.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Peak-to-average power ratio in dB.
pub fn papr_db(buf: &IqBuffer) -> Result<f64> {
    let mean = average_power(buf)?;
    if mean <= 0.0 {
        return Err(Error::ZeroPower { target_w: 0.0 });
    }
    let peak = buf
        .samples
        .iter()
        .map(|x| x.norm_sqr())
        .fold(0.0f64, f64::max);
    Ok(linear_to_db(peak / mean))
}

/// Relative tolerance under which a buffer already counts as being at the
/// requested power. Keeps `scale_to_power` idempotent bit-for-bit.
const POWER_MATCH_RTOL: f64 = 1e-12;

/// Scale `buf` by a single positive real factor so that its average power
/// equals `target_w`.
pub fn scale_to_power(buf: &IqBuffer, target_w: f64) -> Result<IqBuffer> {
    Ok(scale_to_power_with_gain(buf, target_w)?.0)
}

/// Like [`scale_to_power`], also returning the amplitude factor applied.
pub fn scale_to_power_with_gain(buf: &IqBuffer, target_w: f64) -> Result<(IqBuffer, f64)> {
    if !(target_w >= 0.0) || !target_w.is_finite() {
        return Err(Error::invalid(format!(
            "target power must be finite and non-negative, got {target_w}"
        )));
    }
    let power = average_power(buf)?;
    if power <= 0.0 {
        if target_w == 0.0 {
            return Ok((buf.clone(), 1.0));
        }
        return Err(Error::ZeroPower { target_w });
    }
    if (power - target_w).abs() <= POWER_MATCH_RTOL * target_w {
        return Ok((buf.clone(), 1.0));
    }
    let gain = (target_w / power).sqrt();
    Ok((buf.scaled(Complex64::new(gain, 0.0)), gain))
}
