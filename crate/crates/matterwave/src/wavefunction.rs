//! Wave-function state on a [`Grid1D`] and observable extraction.

use num_complex::Complex64;
use thiserror::Error;

use crate::fft::Spectral;
use crate::grid::Grid1D;
use crate::units::{uk_from_rad_per_us, velocity_from_wavenumber, wavenumber_from_velocity, HBAR_EFF};

#[derive(Debug, Error, PartialEq)]
pub enum PacketError {
    #[error("gaussian packet needs fwhm > 0, got {0}")]
    NonPositiveFwhm(f64),
    #[error("packet at x0={x0} μm with σ={sigma} μm does not fit the grid [{x_min}, {x_max}] with a 5σ margin")]
    GridTooSmall { x0: f64, sigma: f64, x_min: f64, x_max: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum ObservableError {
    #[error("observables are undefined for a zero-norm state")]
    ZeroNorm,
}

/// Complex amplitudes (μm^(-1/2)) on a grid, tagged with the physical time.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: Grid1D,
    pub amplitudes: Vec<Complex64>,
    pub time_us: f64,
}

/// Scalar observables of a state. Moments of x are taken over |Ψ|²; the
/// momentum moments are computed spectrally from the DFT of Ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm: f64,
    pub mean_x_um: f64,
    /// Δx = sqrt(⟨x²⟩ − ⟨x⟩²).
    pub width_dx_um: f64,
    /// ⟨p⟩/m as a velocity in cm/s.
    pub mean_p_cm_s: f64,
    pub kinetic_energy_uk: f64,
}

impl WaveFunction {
    /// Zero state at t = 0 (useful as a buffer).
    pub fn zero(grid: Grid1D) -> Self {
        WaveFunction { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()], time_us: 0.0 }
    }

    /// ∫|Ψ|² dx.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// |Ψ|² per grid point (1/μm).
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rescale so that the norm becomes exactly 1.
    pub fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n.sqrt();
            for a in &mut self.amplitudes {
                *a *= s;
            }
        }
    }

    /// Multiply by a plane-wave phase, shifting ⟨p⟩ by m·v.
    pub fn boost(&mut self, v_cm_s: f64) {
        let k0 = wavenumber_from_velocity(v_cm_s);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= Complex64::cis(k0 * self.grid.x_at(i));
        }
    }

    /// Momentum density |Ψ̃(k)|²/2π in DFT bin order (pairs with
    /// [`Grid1D::k_values`]); integrates over dk to the norm.
    pub fn momentum_density(&self) -> Vec<f64> {
        let mut spectral = Spectral::new(self.grid.len());
        let mut buf = self.amplitudes.clone();
        spectral.forward(&mut buf);
        let scale = self.grid.dx() * self.grid.dx() / (2.0 * std::f64::consts::PI);
        buf.iter().map(|c| c.norm_sqr() * scale).collect()
    }

    /// All scalar observables. Fails on a zero-norm state.
    pub fn observables(&self) -> Result<Observables, ObservableError> {
        let mut spectral = Spectral::new(self.grid.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.observables_using(&mut spectral, &mut buf)
    }

    /// Same as [`observables`](Self::observables) with caller-provided plan
    /// and scratch, for tight snapshot loops.
    pub(crate) fn observables_using(
        &self,
        spectral: &mut Spectral,
        buf: &mut [Complex64],
    ) -> Result<Observables, ObservableError> {
        let dx = self.grid.dx();
        let mut norm = 0.0;
        let mut mx = 0.0;
        let mut mx2 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = a.norm_sqr();
            let x = self.grid.x_at(i);
            norm += d;
            mx += x * d;
            mx2 += x * x * d;
        }
        norm *= dx;
        if !(norm > 0.0) {
            return Err(ObservableError::ZeroNorm);
        }
        mx = mx * dx / norm;
        mx2 = mx2 * dx / norm;
        let width = (mx2 - mx * mx).max(0.0).sqrt();

        buf.copy_from_slice(&self.amplitudes);
        spectral.forward(buf);
        // Unnormalized DFT; weights |F_j|² sum to n·Σ|ψ|² (Parseval), so the
        // common factor cancels in the momentum averages.
        let mut w_sum = 0.0;
        let mut mk = 0.0;
        let mut mk2 = 0.0;
        for (j, c) in buf.iter().enumerate() {
            let w = c.norm_sqr();
            let k = self.grid.k_at(j);
            w_sum += w;
            mk += k * w;
            mk2 += k * k * w;
        }
        mk /= w_sum;
        mk2 /= w_sum;
        Ok(Observables {
            norm,
            mean_x_um: mx,
            width_dx_um: width,
            mean_p_cm_s: velocity_from_wavenumber(mk),
            kinetic_energy_uk: uk_from_rad_per_us(HBAR_EFF * mk2 / 2.0),
        })
    }
}

/// Normalized Gaussian wave packet: amplitude e^{−(x−x0)²/2σ²} with
/// σ = fwhm/(2√(2 ln 2)) (fwhm refers to the amplitude |Ψ|), moving at
/// `v_cm_s`.
pub fn gaussian_packet(
    grid: Grid1D,
    fwhm_um: f64,
    v_cm_s: f64,
    x0_um: f64,
) -> Result<WaveFunction, PacketError> {
    if !(fwhm_um > 0.0) {
        return Err(PacketError::NonPositiveFwhm(fwhm_um));
    }
    let sigma = sigma_from_fwhm(fwhm_um);
    if x0_um - 5.0 * sigma < grid.x_min() || x0_um + 5.0 * sigma > grid.x_max() {
        return Err(PacketError::GridTooSmall {
            x0: x0_um,
            sigma,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
        });
    }
    let k0 = wavenumber_from_velocity(v_cm_s);
    let amp = 1.0 / (sigma * std::f64::consts::PI.sqrt()).sqrt();
    let amplitudes = (0..grid.len())
        .map(|i| {
            let u = grid.x_at(i) - x0_um;
            amp * (-u * u / (2.0 * sigma * sigma)).exp() * Complex64::cis(k0 * u)
        })
        .collect();
    let mut wf = WaveFunction { grid, amplitudes, time_us: 0.0 };
    wf.renormalize();
    Ok(wf)
}

/// σ of a Gaussian amplitude with the given full width at half maximum.
#[inline]
pub fn sigma_from_fwhm(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{HBAR, KB, M_RB87};
    use approx::assert_relative_eq;

    fn test_grid() -> Grid1D {
        Grid1D::new(-100.0, 300.0, 1 << 12).unwrap()
    }

    #[test]
    fn sigma_from_fwhm_10um() {
        // σ = FWHM/(2√(2 ln 2)), computed independently.
        let expected = 10.0 / (2.0 * (2.0 * 0.693_147_180_559_945_3_f64).sqrt());
        assert_relative_eq!(sigma_from_fwhm(10.0), expected, max_relative = 1e-14);
        assert_relative_eq!(sigma_from_fwhm(10.0), 4.246_609, max_relative = 1e-6);
    }

    #[test]
    fn packet_norm_is_one() {
        let wf = gaussian_packet(test_grid(), 10.0, 10.0, 0.0).unwrap();
        assert!((wf.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn packet_width_is_sigma_over_sqrt2() {
        let wf = gaussian_packet(test_grid(), 10.0, 10.0, 0.0).unwrap();
        let obs = wf.observables().unwrap();
        // |Ψ|² has standard deviation σ/√2 ≈ 3.003 μm; also the cross-check
        // 27.8 × 0.1079 μm ≈ 3.0 μm.
        let expected = sigma_from_fwhm(10.0) / 2.0_f64.sqrt();
        assert_relative_eq!(obs.width_dx_um, expected, max_relative = 1e-8);
        assert!((obs.width_dx_um - 3.003).abs() < 1e-3);
    }

    #[test]
    fn packet_mean_momentum_matches_boost() {
        let wf = gaussian_packet(test_grid(), 10.0, 10.0, 0.0).unwrap();
        let obs = wf.observables().unwrap();
        assert!((obs.mean_p_cm_s - 10.0).abs() < 1e-6);
        assert_relative_eq!(obs.mean_x_um, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn packet_kinetic_energy_analytic() {
        // E = ½mv² + ħ²/(4mσ²), converted to μK. Independent of the spectral
        // sum used by observables().
        let sigma_m = sigma_from_fwhm(10.0) * 1e-6;
        let v = 0.10; // 10 cm/s in m/s
        let e_joule = 0.5 * M_RB87 * v * v + HBAR * HBAR / (4.0 * M_RB87 * sigma_m * sigma_m);
        let e_uk = e_joule / KB * 1e6;
        let obs = gaussian_packet(test_grid(), 10.0, 10.0, 0.0).unwrap().observables().unwrap();
        assert_relative_eq!(obs.kinetic_energy_uk, e_uk, max_relative = 1e-9);
        // Dominated by the center-of-mass part, ~52.3 μK.
        assert!((e_uk - 52.2).abs() < 0.2);
    }

    #[test]
    fn real_even_state_has_zero_momentum() {
        let mut wf = gaussian_packet(test_grid(), 10.0, 0.0, 100.0).unwrap();
        wf.amplitudes.iter_mut().for_each(|a| *a = Complex64::new(a.re, 0.0));
        let obs = wf.observables().unwrap();
        assert!(obs.mean_p_cm_s.abs() < 1e-10);
    }

    #[test]
    fn momentum_density_integrates_to_norm() {
        let wf = gaussian_packet(test_grid(), 10.0, 10.0, 0.0).unwrap();
        let total: f64 = wf.momentum_density().iter().sum::<f64>() * wf.grid.dk();
        assert!((total - wf.norm()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            gaussian_packet(test_grid(), -1.0, 0.0, 0.0).unwrap_err(),
            PacketError::NonPositiveFwhm(-1.0)
        );
        assert!(matches!(
            gaussian_packet(test_grid(), 10.0, 0.0, 290.0).unwrap_err(),
            PacketError::GridTooSmall { .. }
        ));
        let zero = WaveFunction::zero(test_grid());
        assert_eq!(zero.observables().unwrap_err(), ObservableError::ZeroNorm);
    }
}
