use rand::Rng;

use crate::error::{Error, Result};

/// A sequence of bits, one per byte, each 0 or 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream(pub Vec<u8>);

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random::<bool>() as u8).collect())
    }

    /// Unpack bytes most-significant bit first.
    pub fn from_bytes_msb_first(bytes: &[u8]) -> Self {
        Self(
            bytes
                .iter()
                .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1))
                .collect(),
        )
    }

    /// Pack most-significant bit first; a ragged tail is zero-filled.
    pub fn to_bytes_msb_first(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Append `n` zero bits, returning how many were added.
    pub fn pad_zeros(&mut self, n: usize) -> usize {
        self.0.resize(self.0.len() + n, 0);
        n
    }
}

/// Fraction of positions where the two streams differ.
pub fn ber(reference: &BitStream, decoded: &BitStream) -> Result<f64> {
    if reference.len() != decoded.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: decoded.len(),
        });
    }
    if reference.is_empty() {
        return Ok(0.0);
    }
    let errors = reference
        .0
        .iter()
        .zip(&decoded.0)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / reference.len() as f64)
}
