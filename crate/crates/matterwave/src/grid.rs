//! Uniform spatial grid with its conjugate momentum grid.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs n_points to be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("grid needs x_max > x_min, got [{0}, {1}]")]
    EmptyRange(f64, f64),
}

/// Uniform 1D grid on [x_min, x_max) with a power-of-two number of points.
///
/// Positions are x_i = x_min + i·dx. The conjugate momenta follow the
/// standard DFT layout: k_j = 2πj/L for j ≤ n/2 and 2π(j−n)/L above, so
/// max |k| = π/dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min_um: f64, x_max_um: f64, n_points: usize) -> Result<Self, GridError> {
        if !(x_max_um > x_min_um) {
            return Err(GridError::EmptyRange(x_min_um, x_max_um));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(GridError::NotPowerOfTwo(n_points));
        }
        let dx = (x_max_um - x_min_um) / n_points as f64;
        Ok(Self { x_min: x_min_um, x_max: x_max_um, n_points, dx })
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Momentum-space sample spacing 2π/L in rad/μm.
    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.x_max - self.x_min)
    }

    /// Position of sample i in μm.
    #[inline]
    pub fn x_at(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// Wavenumber of DFT bin j in rad/μm (standard DFT ordering).
    #[inline]
    pub fn k_at(&self, j: usize) -> f64 {
        let n = self.n_points;
        debug_assert!(j < n);
        if j <= n / 2 {
            j as f64 * self.dk()
        } else {
            (j as f64 - n as f64) * self.dk()
        }
    }

    /// All positions, ascending.
    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x_at(i)).collect()
    }

    /// All wavenumbers in DFT ordering.
    pub fn k_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.k_at(j)).collect()
    }

    /// Index of the grid point closest to x, clamped to the grid.
    pub fn index_of(&self, x_um: f64) -> usize {
        let i = ((x_um - self.x_min) / self.dx).round();
        i.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(Grid1D::new(0.0, 1.0, 1000).unwrap_err(), GridError::NotPowerOfTwo(1000));
        assert_eq!(Grid1D::new(1.0, 1.0, 8).unwrap_err(), GridError::EmptyRange(1.0, 1.0));
    }

    #[test]
    fn spacing_and_layout() {
        let g = Grid1D::new(-100.0, 300.0, 1 << 16).unwrap();
        assert!((g.dx() - 400.0 / 65536.0).abs() < 1e-15);
        assert_eq!(g.x_at(0), -100.0);
        // DFT ordering: k_0 = 0, ascending to +k_max at n/2, then negative.
        assert_eq!(g.k_at(0), 0.0);
        assert!((g.k_at(1) - g.dk()).abs() < 1e-15);
        assert!(g.k_at(g.len() - 1) < 0.0);
        let k_max = g.k_at(g.len() / 2).abs();
        assert!((k_max - PI / g.dx()).abs() / k_max < 1e-12);
    }

    #[test]
    fn index_of_round_trips() {
        let g = Grid1D::new(-10.0, 10.0, 256).unwrap();
        for i in [0usize, 7, 128, 255] {
            assert_eq!(g.index_of(g.x_at(i)), i);
        }
    }
}
