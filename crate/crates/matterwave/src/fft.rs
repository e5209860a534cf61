//! Thin wrapper around rustfft holding the forward/inverse plans and scratch
//! space for one transform length.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    inv_len: f64,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Spectral {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            inv_len: 1.0 / n as f64,
        }
    }

    /// Unnormalized forward DFT, in place.
    #[inline]
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse DFT including the 1/n normalization, in place.
    #[inline]
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        for v in buf.iter_mut() {
            *v *= self.inv_len;
        }
    }
}
