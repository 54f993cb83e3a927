//! Gray-coded square constellations (802.11a/g bit ordering).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModulationScheme {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 4] = [Self::Bpsk, Self::Qpsk, Self::Qam16, Self::Qam64];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qpsk => 2,
            Self::Qam16 => 4,
            Self::Qam64 => 6,
        }
    }

    /// Amplitude factor giving unit mean symbol energy.
    pub fn normalization(self) -> f64 {
        match self {
            Self::Bpsk => 1.0,
            Self::Qpsk => 1.0 / 2f64.sqrt(),
            Self::Qam16 => 1.0 / 10f64.sqrt(),
            Self::Qam64 => 1.0 / 42f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "BPSK",
            Self::Qpsk => "QPSK",
            Self::Qam16 => "16QAM",
            Self::Qam64 => "64QAM",
        }
    }

    /// Bits carried on each of I and Q (BPSK uses I only).
    fn axis_bits(self) -> usize {
        match self {
            Self::Bpsk => 1,
            other => other.bits_per_symbol() / 2,
        }
    }

    /// Map one symbol's worth of bits to a constellation point.
    pub fn map_one(self, bits: &[u8]) -> Complex64 {
        let m = self.axis_bits();
        let norm = self.normalization();
        let i = pam_level(&bits[..m]);
        if self == Self::Bpsk {
            return Complex64::new(i * norm, 0.0);
        }
        let q = pam_level(&bits[m..2 * m]);
        Complex64::new(i * norm, q * norm)
    }

    /// Nearest-point hard decision, appending the bits to `out`.
    pub fn demap_one(self, y: Complex64, out: &mut Vec<u8>) {
        let m = self.axis_bits();
        let norm = self.normalization();
        push_pam_bits(y.re / norm, m, out);
        if self != Self::Bpsk {
            push_pam_bits(y.im / norm, m, out);
        }
    }

    /// All constellation points, indexed by their bit label read MSB first.
    pub fn points(self) -> Vec<Complex64> {
        let k = self.bits_per_symbol();
        (0..1usize << k)
            .map(|word| {
                let bits: Vec<u8> = (0..k).rev().map(|i| ((word >> i) & 1) as u8).collect();
                self.map_one(&bits)
            })
            .collect()
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Bpsk),
            "qpsk" => Ok(Self::Qpsk),
            "16qam" | "qam16" => Ok(Self::Qam16),
            "64qam" | "qam64" => Ok(Self::Qam64),
            other => Err(Error::invalid(format!("unknown modulation `{other}`"))),
        }
    }
}

/// Odd-integer PAM level for a Gray-coded bit group, MSB first:
/// level index `i` carries label `i ^ (i >> 1)`.
fn pam_level(bits: &[u8]) -> f64 {
    let gray = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut idx = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        idx ^= shift;
        shift >>= 1;
    }
    let levels = 1usize << bits.len();
    (2 * idx) as f64 - (levels - 1) as f64
}

fn push_pam_bits(v: f64, m: usize, out: &mut Vec<u8>) {
    let levels = 1usize << m;
    let idx = ((v + (levels - 1) as f64) / 2.0)
        .round()
        .clamp(0.0, (levels - 1) as f64) as usize;
    let gray = idx ^ (idx >> 1);
    out.extend((0..m).rev().map(|i| ((gray >> i) & 1) as u8));
}

/// Map a bit sequence to symbols.
pub fn map_symbols(bits: &[u8], scheme: ModulationScheme) -> Result<Vec<Complex64>> {
    let k = scheme.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::LengthMismatch {
            expected: bits.len().div_ceil(k) * k,
            actual: bits.len(),
        });
    }
    Ok(bits.chunks_exact(k).map(|c| scheme.map_one(c)).collect())
}

pub fn demap_symbols(symbols: &[Complex64], scheme: ModulationScheme) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * scheme.bits_per_symbol());
    for &y in symbols {
        scheme.demap_one(y, &mut out);
    }
    out
}
