//! Subcarrier-grid FFT helpers shared by the waveform generators and the
//! spectral checks.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Spacing of the 802.11a/g subcarrier grid.
pub const SUBCARRIER_SPACING_HZ: f64 = 312.5e3;

/// FFT size of the 802.11a/g grid.
pub const GRID_FFT_SIZE: usize = 64;

/// Map a signed subcarrier index (e.g. -26..=26) to its FFT bin.
pub fn bin_of(index: i32, fft_size: usize) -> usize {
    index.rem_euclid(fft_size as i32) as usize
}

/// Signed subcarrier index of an FFT bin, in `[-n/2, n/2)`.
pub fn index_of(bin: usize, fft_size: usize) -> i32 {
    let half = fft_size / 2;
    if bin >= half {
        bin as i32 - fft_size as i32
    } else {
        bin as i32
    }
}

/// Orthonormal forward/inverse FFT pair of a fixed size.
#[derive(Clone)]
pub struct GridFft {
    size: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFft").field("size", &self.size).finish()
    }
}

impl GridFft {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            scale: 1.0 / (size as f64).sqrt(),
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// In-place orthonormal forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        for x in buf.iter_mut() {
            *x *= self.scale;
        }
    }

    /// In-place orthonormal inverse transform.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        for x in buf.iter_mut() {
            *x *= self.scale;
        }
    }
}

/// Unnormalized DFT of a short tap vector evaluated on an `n`-bin grid.
/// With an orthonormal OFDM FFT this is the per-bin gain of the channel.
pub fn tap_response(taps: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, t) in taps.iter().enumerate() {
        buf[i % n] += t;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf
}

/// Per-bin power of consecutive `fft_size` windows starting at `offset`
/// with stride `stride`, summed over all complete windows.
pub fn windowed_bin_power(
    samples: &[Complex64],
    fft_size: usize,
    offset: usize,
    stride: usize,
) -> Vec<f64> {
    let fft = GridFft::new(fft_size);
    let mut acc = vec![0.0; fft_size];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft_size];
    let mut start = offset;
    while start + fft_size <= samples.len() {
        scratch.copy_from_slice(&samples[start..start + fft_size]);
        fft.forward(&mut scratch);
        for (a, x) in acc.iter_mut().zip(&scratch) {
            *a += x.norm_sqr();
        }
        start += stride;
    }
    acc
}
