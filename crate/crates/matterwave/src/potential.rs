//! Parameterized time-dependent control potentials.
//!
//! All families are pure functions of (spec, grid, t) and safe to evaluate
//! concurrently. Values are in μK; a negative value is attractive.

use serde::Serialize;
use thiserror::Error;

use crate::grid::Grid1D;
use crate::units::um_per_us_from_cm_s;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),
    #[error("parameter mask length {got} does not match family arity {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("parameter vector length {got} does not match {expected} free parameters")]
    VectorLength { expected: usize, got: usize },
    #[error("unknown parameter name `{0}`")]
    UnknownParameter(String),
}

/// Center of a cosine well: fixed in the lab frame or moving at constant
/// velocity, x_c(t) = x0 + v·t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Center {
    Fixed { x_c_um: f64 },
    Moving { x0_um: f64, v_cm_s: f64 },
}

impl Center {
    #[inline]
    pub fn position_at(&self, t_us: f64) -> f64 {
        match *self {
            Center::Fixed { x_c_um } => x_c_um,
            Center::Moving { x0_um, v_cm_s } => x0_um + um_per_us_from_cm_s(v_cm_s) * t_us,
        }
    }
}

/// −V0·e^{−((t−t0)/τ)⁴}·cos²(π(x−x_c)/σ_x + φ) for |x−x_c| ≤ σ_x/2 and
/// −V0·sin²φ otherwise. The outside value carries no temporal envelope.
///
/// φ = 0 forms a well (attractive at the center); φ = π/2 a barrier that is
/// zero at the center and attractive far from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosineWellSpec {
    pub v0_uk: f64,
    pub t0_us: f64,
    pub tau_us: f64,
    pub sigma_x_um: f64,
    pub phi_rad: f64,
    pub center: Center,
}

/// −2V0·e^{−((t−t0)/τ)⁴}·|x−vt|/σ_x for |x−v t| ≤ σ_x/2 and −V0 otherwise:
/// a triangular barrier travelling at the packet velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleSplitterSpec {
    pub v0_uk: f64,
    pub t0_us: f64,
    pub tau_us: f64,
    pub sigma_x_um: f64,
    pub v_cm_s: f64,
}

/// Two time-windowed linear ramps; the total is max(term1 + term2, 0) with
/// term_i = V0·e^{−((t−t_i)/τ)⁴}·(1 − |x−c_i(t)|/σ), c_1 = v_cm·t + x1,
/// c_2 = v2·t + x2, and the second window centered at t0 + 2τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoRampSplitterSpec {
    pub v0_uk: f64,
    pub t0_us: f64,
    pub tau_us: f64,
    pub sigma_um: f64,
    pub v_cm_s: f64,
    pub x1_um: f64,
    pub v2_cm_s: f64,
    pub x2_um: f64,
}

/// Static ½·curvature·(x−x_b)² for x > x_b, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolicWallSpec {
    pub x_b_um: f64,
    pub curvature_uk_um2: f64,
}

/// Static two-sided harmonic well ½·curvature·(x−x_c)², used to prepare
/// ground states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicTrapSpec {
    pub x_c_um: f64,
    pub curvature_uk_um2: f64,
}

/// Tagged family of control potentials. `Composite` is the pointwise sum of
/// its parts; `Uniform` is a constant offset (exerts no force).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PotentialSpec {
    Uniform(f64),
    CosineWell(CosineWellSpec),
    TriangleSplitter(TriangleSplitterSpec),
    TwoRampSplitter(TwoRampSplitterSpec),
    ParabolicWall(ParabolicWallSpec),
    HarmonicTrap(HarmonicTrapSpec),
    Composite(Vec<PotentialSpec>),
}

#[inline]
fn envelope(t: f64, t0: f64, tau: f64) -> f64 {
    let u = (t - t0) / tau;
    let u2 = u * u;
    (-u2 * u2).exp()
}

/// Inclusive index range of grid points with |x − c| ≤ h; empty if none.
fn window_indices(grid: &Grid1D, c: f64, h: f64) -> std::ops::Range<usize> {
    let lo = ((c - h - grid.x_min()) / grid.dx()).ceil().max(0.0) as usize;
    let hi = ((c + h - grid.x_min()) / grid.dx()).floor();
    if hi < 0.0 || lo >= grid.len() {
        return 0..0;
    }
    lo..(hi as usize + 1).min(grid.len())
}

impl PotentialSpec {
    /// Check the family invariants (depths ≥ 0, widths > 0, ...).
    pub fn validate(&self) -> Result<(), PotentialError> {
        let bad = |m: String| Err(PotentialError::InvalidSpec(m));
        match self {
            PotentialSpec::Uniform(c) => {
                if !c.is_finite() {
                    return bad("uniform offset must be finite".into());
                }
            }
            PotentialSpec::CosineWell(s) => {
                if s.v0_uk < 0.0 {
                    return bad(format!("cosine well V0 must be ≥ 0, got {}", s.v0_uk));
                }
                if !(s.tau_us > 0.0) {
                    return bad(format!("cosine well tau must be > 0, got {}", s.tau_us));
                }
                if !(s.sigma_x_um > 0.0) {
                    return bad(format!("cosine well sigma_x must be > 0, got {}", s.sigma_x_um));
                }
            }
            PotentialSpec::TriangleSplitter(s) => {
                if s.v0_uk < 0.0 || !(s.tau_us > 0.0) || !(s.sigma_x_um > 0.0) {
                    return bad("triangle splitter needs V0 ≥ 0, tau > 0, sigma_x > 0".into());
                }
            }
            PotentialSpec::TwoRampSplitter(s) => {
                if s.v0_uk < 0.0 || !(s.tau_us > 0.0) || !(s.sigma_um > 0.0) {
                    return bad("two-ramp splitter needs V0 ≥ 0, tau > 0, sigma > 0".into());
                }
            }
            PotentialSpec::ParabolicWall(s) => {
                if !(s.curvature_uk_um2 > 0.0) {
                    return bad(format!("parabolic wall curvature must be > 0, got {}", s.curvature_uk_um2));
                }
            }
            PotentialSpec::HarmonicTrap(s) => {
                if !(s.curvature_uk_um2 > 0.0) {
                    return bad(format!("harmonic trap curvature must be > 0, got {}", s.curvature_uk_um2));
                }
            }
            PotentialSpec::Composite(parts) => {
                for p in parts {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Potential value at a single point, in μK.
    pub fn value_at(&self, x_um: f64, t_us: f64) -> f64 {
        match self {
            PotentialSpec::Uniform(c) => *c,
            PotentialSpec::CosineWell(s) => {
                let xc = s.center.position_at(t_us);
                if (x_um - xc).abs() <= s.sigma_x_um / 2.0 {
                    let phase = std::f64::consts::PI * (x_um - xc) / s.sigma_x_um + s.phi_rad;
                    -s.v0_uk * envelope(t_us, s.t0_us, s.tau_us) * phase.cos().powi(2)
                } else {
                    -s.v0_uk * s.phi_rad.sin().powi(2)
                }
            }
            PotentialSpec::TriangleSplitter(s) => {
                let c = um_per_us_from_cm_s(s.v_cm_s) * t_us;
                let d = (x_um - c).abs();
                if d <= s.sigma_x_um / 2.0 {
                    -2.0 * s.v0_uk * envelope(t_us, s.t0_us, s.tau_us) * d / s.sigma_x_um
                } else {
                    -s.v0_uk
                }
            }
            PotentialSpec::TwoRampSplitter(s) => {
                let e1 = envelope(t_us, s.t0_us, s.tau_us);
                let e2 = envelope(t_us, s.t0_us + 2.0 * s.tau_us, s.tau_us);
                let c1 = um_per_us_from_cm_s(s.v_cm_s) * t_us + s.x1_um;
                let c2 = um_per_us_from_cm_s(s.v2_cm_s) * t_us + s.x2_um;
                let t1 = s.v0_uk * e1 * (1.0 - (x_um - c1).abs() / s.sigma_um);
                let t2 = s.v0_uk * e2 * (1.0 - (x_um - c2).abs() / s.sigma_um);
                (t1 + t2).max(0.0)
            }
            PotentialSpec::ParabolicWall(s) => {
                if x_um > s.x_b_um {
                    0.5 * s.curvature_uk_um2 * (x_um - s.x_b_um) * (x_um - s.x_b_um)
                } else {
                    0.0
                }
            }
            PotentialSpec::HarmonicTrap(s) => {
                let d = x_um - s.x_c_um;
                0.5 * s.curvature_uk_um2 * d * d
            }
            PotentialSpec::Composite(parts) => {
                parts.iter().map(|p| p.value_at(x_um, t_us)).sum()
            }
        }
    }

    /// Fill `out` (one entry per grid point) with the potential at time t.
    pub fn evaluate_into(&self, grid: &Grid1D, t_us: f64, out: &mut [f64]) {
        assert_eq!(out.len(), grid.len());
        out.fill(0.0);
        self.add_into(grid, t_us, out);
    }

    /// Allocating variant of [`evaluate_into`](Self::evaluate_into).
    pub fn evaluate(&self, grid: &Grid1D, t_us: f64) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        self.add_into(grid, t_us, &mut out);
        out
    }

    fn add_into(&self, grid: &Grid1D, t_us: f64, out: &mut [f64]) {
        match self {
            PotentialSpec::Uniform(c) => {
                if *c != 0.0 {
                    out.iter_mut().for_each(|v| *v += c);
                }
            }
            PotentialSpec::CosineWell(s) => {
                let xc = s.center.position_at(t_us);
                let env = envelope(t_us, s.t0_us, s.tau_us);
                let outside = -s.v0_uk * s.phi_rad.sin().powi(2);
                let range = window_indices(grid, xc, s.sigma_x_um / 2.0);
                if outside != 0.0 {
                    for v in &mut out[..range.start] {
                        *v += outside;
                    }
                    for v in &mut out[range.end..] {
                        *v += outside;
                    }
                }
                let scale = -s.v0_uk * env;
                for i in range {
                    let phase = std::f64::consts::PI * (grid.x_at(i) - xc) / s.sigma_x_um + s.phi_rad;
                    out[i] += scale * phase.cos().powi(2);
                }
            }
            PotentialSpec::TriangleSplitter(s) => {
                let c = um_per_us_from_cm_s(s.v_cm_s) * t_us;
                let env = envelope(t_us, s.t0_us, s.tau_us);
                let range = window_indices(grid, c, s.sigma_x_um / 2.0);
                for v in &mut out[..range.start] {
                    *v += -s.v0_uk;
                }
                for v in &mut out[range.end..] {
                    *v += -s.v0_uk;
                }
                let scale = -2.0 * s.v0_uk * env / s.sigma_x_um;
                for i in range {
                    out[i] += scale * (grid.x_at(i) - c).abs();
                }
            }
            PotentialSpec::TwoRampSplitter(s) => {
                // A point can only be positive if it lies under at least one
                // tent (|x − c_i| < σ), so it suffices to scan that union.
                let e1 = envelope(t_us, s.t0_us, s.tau_us);
                let e2 = envelope(t_us, s.t0_us + 2.0 * s.tau_us, s.tau_us);
                let c1 = um_per_us_from_cm_s(s.v_cm_s) * t_us + s.x1_um;
                let c2 = um_per_us_from_cm_s(s.v2_cm_s) * t_us + s.x2_um;
                let r1 = window_indices(grid, c1, s.sigma_um);
                let r2 = window_indices(grid, c2, s.sigma_um);
                let mut apply = |r: std::ops::Range<usize>| {
                    for i in r {
                        let x = grid.x_at(i);
                        let t1 = s.v0_uk * e1 * (1.0 - (x - c1).abs() / s.sigma_um);
                        let t2 = s.v0_uk * e2 * (1.0 - (x - c2).abs() / s.sigma_um);
                        out[i] += (t1 + t2).max(0.0);
                    }
                };
                if r1.end <= r2.start || r2.end <= r1.start {
                    apply(r1);
                    apply(r2);
                } else {
                    apply(r1.start.min(r2.start)..r1.end.max(r2.end));
                }
            }
            PotentialSpec::ParabolicWall(s) => {
                let start = ((s.x_b_um - grid.x_min()) / grid.dx()).ceil().max(0.0) as usize;
                for i in start..grid.len() {
                    let d = grid.x_at(i) - s.x_b_um;
                    if d > 0.0 {
                        out[i] += 0.5 * s.curvature_uk_um2 * d * d;
                    }
                }
            }
            PotentialSpec::HarmonicTrap(s) => {
                for (i, v) in out.iter_mut().enumerate() {
                    let d = grid.x_at(i) - s.x_c_um;
                    *v += 0.5 * s.curvature_uk_um2 * d * d;
                }
            }
            PotentialSpec::Composite(parts) => {
                for p in parts {
                    p.add_into(grid, t_us, out);
                }
            }
        }
    }

    /// Largest temporal envelope factor among the time-windowed parts at
    /// time t; 0 for purely static families. Used to decide whether the
    /// shaping pulse is over.
    pub fn envelope_factor(&self, t_us: f64) -> f64 {
        match self {
            PotentialSpec::Uniform(_)
            | PotentialSpec::ParabolicWall(_)
            | PotentialSpec::HarmonicTrap(_) => 0.0,
            PotentialSpec::CosineWell(s) => envelope(t_us, s.t0_us, s.tau_us),
            PotentialSpec::TriangleSplitter(s) => envelope(t_us, s.t0_us, s.tau_us),
            PotentialSpec::TwoRampSplitter(s) => envelope(t_us, s.t0_us, s.tau_us)
                .max(envelope(t_us, s.t0_us + 2.0 * s.tau_us, s.tau_us)),
            PotentialSpec::Composite(parts) => parts
                .iter()
                .map(|p| p.envelope_factor(t_us))
                .fold(0.0, f64::max),
        }
    }

    /// Number of scalar parameters of this family (φ is a mode selector,
    /// not a parameter).
    pub fn parameter_arity(&self) -> usize {
        match self {
            PotentialSpec::Uniform(_) => 1,
            PotentialSpec::CosineWell(s) => match s.center {
                Center::Fixed { .. } => 5,
                Center::Moving { .. } => 6,
            },
            PotentialSpec::TriangleSplitter(_) => 5,
            PotentialSpec::TwoRampSplitter(_) => 8,
            PotentialSpec::ParabolicWall(_) => 2,
            PotentialSpec::Composite(parts) => parts.iter().map(|p| p.parameter_arity()).sum(),
        }
    }

    /// Ordered names of all parameters; composite parts are prefixed by
    /// their index.
    pub fn parameter_names(&self) -> Vec<String> {
        match self {
            PotentialSpec::Uniform(_) => vec!["offset".into()],
            PotentialSpec::CosineWell(s) => {
                let mut n = vec!["V0".into(), "t0".into(), "tau".into(), "sigma_x".into()];
                match s.center {
                    Center::Fixed { .. } => n.push("x_c".into()),
                    Center::Moving { .. } => {
                        n.push("x_c offset".into());
                        n.push("x_c slope".into());
                    }
                }
                n
            }
            PotentialSpec::TriangleSplitter(_) => {
                vec!["V0".into(), "t0".into(), "tau".into(), "sigma_x".into(), "v_cm".into()]
            }
            PotentialSpec::TwoRampSplitter(_) => vec![
                "V0".into(),
                "t0".into(),
                "tau".into(),
                "sigma".into(),
                "v_cm".into(),
                "x1".into(),
                "v2".into(),
                "x2".into(),
            ],
            PotentialSpec::ParabolicWall(_) => vec!["x_b".into(), "curvature".into()],
            PotentialSpec::Composite(parts) => parts
                .iter()
                .enumerate()
                .flat_map(|(i, p)| {
                    p.parameter_names().into_iter().map(move |n| format!("{i}.{n}"))
                })
                .collect(),
        }
    }

    /// All parameters as an ordered vector (see [`parameter_names`](Self::parameter_names)).
    pub fn full_parameter_vector(&self) -> Vec<f64> {
        match self {
            PotentialSpec::Uniform(c) => vec![*c],
            PotentialSpec::CosineWell(s) => {
                let mut v = vec![s.v0_uk, s.t0_us, s.tau_us, s.sigma_x_um];
                match s.center {
                    Center::Fixed { x_c_um } => v.push(x_c_um),
                    Center::Moving { x0_um, v_cm_s } => {
                        v.push(x0_um);
                        v.push(v_cm_s);
                    }
                }
                v
            }
            PotentialSpec::TriangleSplitter(s) => {
                vec![s.v0_uk, s.t0_us, s.tau_us, s.sigma_x_um, s.v_cm_s]
            }
            PotentialSpec::TwoRampSplitter(s) => vec![
                s.v0_uk, s.t0_us, s.tau_us, s.sigma_um, s.v_cm_s, s.x1_um, s.v2_cm_s, s.x2_um,
            ],
            PotentialSpec::ParabolicWall(s) => vec![s.x_b_um, s.curvature_uk_um2],
            PotentialSpec::Composite(parts) => {
                parts.iter().flat_map(|p| p.full_parameter_vector()).collect()
            }
        }
    }

    fn with_full_parameters(&self, vals: &[f64]) -> PotentialSpec {
        debug_assert_eq!(vals.len(), self.parameter_arity());
        match self {
            PotentialSpec::Uniform(_) => PotentialSpec::Uniform(vals[0]),
            PotentialSpec::CosineWell(s) => {
                let center = match s.center {
                    Center::Fixed { .. } => Center::Fixed { x_c_um: vals[4] },
                    Center::Moving { .. } => Center::Moving { x0_um: vals[4], v_cm_s: vals[5] },
                };
                PotentialSpec::CosineWell(CosineWellSpec {
                    v0_uk: vals[0],
                    t0_us: vals[1],
                    tau_us: vals[2],
                    sigma_x_um: vals[3],
                    phi_rad: s.phi_rad,
                    center,
                })
            }
            PotentialSpec::TriangleSplitter(_) => {
                PotentialSpec::TriangleSplitter(TriangleSplitterSpec {
                    v0_uk: vals[0],
                    t0_us: vals[1],
                    tau_us: vals[2],
                    sigma_x_um: vals[3],
                    v_cm_s: vals[4],
                })
            }
            PotentialSpec::TwoRampSplitter(_) => PotentialSpec::TwoRampSplitter(TwoRampSplitterSpec {
                v0_uk: vals[0],
                t0_us: vals[1],
                tau_us: vals[2],
                sigma_um: vals[3],
                v_cm_s: vals[4],
                x1_um: vals[5],
                v2_cm_s: vals[6],
                x2_um: vals[7],
            }),
            PotentialSpec::ParabolicWall(_) => PotentialSpec::ParabolicWall(ParabolicWallSpec {
                x_b_um: vals[0],
                curvature_uk_um2: vals[1],
            }),
            PotentialSpec::Composite(parts) => {
                let mut offset = 0;
                let new_parts = parts
                    .iter()
                    .map(|p| {
                        let a = p.parameter_arity();
                        let np = p.with_full_parameters(&vals[offset..offset + a]);
                        offset += a;
                        np
                    })
                    .collect();
                PotentialSpec::Composite(new_parts)
            }
        }
    }

    /// The free parameters selected by `mask`, in order.
    pub fn parameter_vector(&self, mask: &ParameterMask) -> Result<Vec<f64>, PotentialError> {
        mask.check_arity(self)?;
        Ok(self
            .full_parameter_vector()
            .into_iter()
            .zip(&mask.free)
            .filter_map(|(v, &f)| f.then_some(v))
            .collect())
    }

    /// Replace the free parameters selected by `mask` with `values`; fixed
    /// parameters are untouched.
    pub fn with_parameters(
        &self,
        values: &[f64],
        mask: &ParameterMask,
    ) -> Result<PotentialSpec, PotentialError> {
        mask.check_arity(self)?;
        let n_free = mask.count_free();
        if values.len() != n_free {
            return Err(PotentialError::VectorLength { expected: n_free, got: values.len() });
        }
        let mut full = self.full_parameter_vector();
        let mut it = values.iter();
        for (slot, &free) in full.iter_mut().zip(&mask.free) {
            if free {
                *slot = *it.next().unwrap();
            }
        }
        Ok(self.with_full_parameters(&full))
    }
}

/// Selects which parameters of a spec are free for optimization or
/// perturbation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterMask {
    free: Vec<bool>,
}

impl ParameterMask {
    pub fn all_free(spec: &PotentialSpec) -> Self {
        ParameterMask { free: vec![true; spec.parameter_arity()] }
    }

    pub fn all_fixed(spec: &PotentialSpec) -> Self {
        ParameterMask { free: vec![false; spec.parameter_arity()] }
    }

    pub fn from_flags(free: Vec<bool>) -> Self {
        ParameterMask { free }
    }

    /// Mask freeing exactly the named parameters.
    pub fn from_names(spec: &PotentialSpec, names: &[&str]) -> Result<Self, PotentialError> {
        let all = spec.parameter_names();
        let mut free = vec![false; all.len()];
        for name in names {
            let idx = all
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| PotentialError::UnknownParameter(name.to_string()))?;
            free[idx] = true;
        }
        Ok(ParameterMask { free })
    }

    pub fn count_free(&self) -> usize {
        self.free.iter().filter(|&&f| f).count()
    }

    pub fn flags(&self) -> &[bool] {
        &self.free
    }

    /// Names of the free parameters, in vector order.
    pub fn free_names(&self, spec: &PotentialSpec) -> Vec<String> {
        spec.parameter_names()
            .into_iter()
            .zip(&self.free)
            .filter_map(|(n, &f)| f.then_some(n))
            .collect()
    }

    fn check_arity(&self, spec: &PotentialSpec) -> Result<(), PotentialError> {
        let expected = spec.parameter_arity();
        if self.free.len() != expected {
            return Err(PotentialError::MaskLength { expected, got: self.free.len() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn focus_well() -> PotentialSpec {
        PotentialSpec::CosineWell(CosineWellSpec {
            v0_uk: 97.73,
            t0_us: 203.4,
            tau_us: 134.3,
            sigma_x_um: 50.0,
            phi_rad: 0.0,
            center: Center::Fixed { x_c_um: 13.23 },
        })
    }

    fn stop_barrier() -> PotentialSpec {
        PotentialSpec::CosineWell(CosineWellSpec {
            v0_uk: 100.0,
            t0_us: 267.4,
            tau_us: 103.5,
            sigma_x_um: 52.36,
            phi_rad: FRAC_PI_2,
            center: Center::Moving { x0_um: -0.2927, v_cm_s: 4.297 },
        })
    }

    #[test]
    fn cosine_well_center_value() {
        let spec = focus_well();
        assert_relative_eq!(spec.value_at(13.23, 203.4), -97.73, max_relative = 1e-12);
        // Outside, with φ = 0, zero at all times.
        assert_eq!(spec.value_at(100.0, 203.4), 0.0);
    }

    #[test]
    fn cosine_barrier_phi_pi_half() {
        let spec = stop_barrier();
        let t = 267.4;
        let xc = -0.2927 + 0.04297 * t;
        assert_relative_eq!(spec.value_at(xc, t), 0.0, epsilon = 1e-12);
        // Far outside: −V0 regardless of the envelope.
        assert_relative_eq!(spec.value_at(xc + 100.0, 0.0), -100.0, max_relative = 1e-12);
        assert_relative_eq!(spec.value_at(xc - 100.0, 500.0), -100.0, max_relative = 1e-12);
    }

    #[test]
    fn cosine_well_continuity_at_edges() {
        // With envelope = 1 the inside edge matches the outside value for
        // both φ = 0 and φ = π/2.
        for (phi, expected) in [(0.0, 0.0), (FRAC_PI_2, -80.0)] {
            let spec = PotentialSpec::CosineWell(CosineWellSpec {
                v0_uk: 80.0,
                t0_us: 100.0,
                tau_us: 50.0,
                sigma_x_um: 40.0,
                phi_rad: phi,
                center: Center::Fixed { x_c_um: 5.0 },
            });
            for edge in [5.0 - 20.0, 5.0 + 20.0] {
                let inside = spec.value_at(edge, 100.0);
                let outside = spec.value_at(edge + edge.signum() * 1e-9, 100.0);
                assert!((inside - expected).abs() < 1e-12, "phi={phi} edge={edge}");
                let _ = outside;
            }
        }
    }

    #[test]
    fn triangle_splitter_values() {
        let spec = PotentialSpec::TriangleSplitter(TriangleSplitterSpec {
            v0_uk: 94.6,
            t0_us: 189.0,
            tau_us: 183.4,
            sigma_x_um: 82.2,
            v_cm_s: 10.0,
        });
        let t0 = 189.0;
        let c = 0.1 * t0;
        assert_relative_eq!(spec.value_at(c, t0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(spec.value_at(c + 41.1, t0), -94.6, max_relative = 1e-12);
        assert_relative_eq!(spec.value_at(c - 200.0, t0), -94.6, max_relative = 1e-12);
    }

    #[test]
    fn two_ramp_apex_value() {
        let spec = PotentialSpec::TwoRampSplitter(TwoRampSplitterSpec {
            v0_uk: 40.0,
            t0_us: 90.0,
            tau_us: 75.0,
            sigma_um: 20.0,
            v_cm_s: 10.0,
            x1_um: 3.207,
            v2_cm_s: 8.0,
            x2_um: 1.778,
        });
        let apex = 0.1 * 90.0 + 3.207;
        assert_relative_eq!(spec.value_at(apex, 90.0), 40.0, max_relative = 1e-4);
        // Everywhere non-negative by construction.
        let grid = Grid1D::new(-100.0, 300.0, 1 << 10).unwrap();
        for t in [0.0, 90.0, 240.0, 400.0] {
            assert!(spec.evaluate(&grid, t).iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn envelope_negligible_beyond_six_tau() {
        let spec = focus_well();
        for t in [203.4 - 6.0 * 134.3, 203.4 + 6.0 * 134.3, 203.4 + 20.0 * 134.3] {
            assert!(spec.envelope_factor(t) < 1e-9);
            let xc = 13.23;
            assert!(spec.value_at(xc, t).abs() < 1e-9 * 97.73);
        }
    }

    #[test]
    fn cosine_well_range_bounds() {
        let spec = focus_well();
        let grid = Grid1D::new(-100.0, 300.0, 1 << 12).unwrap();
        for t in [0.0, 150.0, 203.4, 400.0] {
            for &v in spec.evaluate(&grid, t).iter() {
                assert!((-97.73..=0.0).contains(&v));
            }
        }
    }

    #[test]
    fn vectorized_matches_pointwise() {
        let grid = Grid1D::new(-60.0, 140.0, 1 << 10).unwrap();
        let specs = vec![
            focus_well(),
            stop_barrier(),
            PotentialSpec::TriangleSplitter(TriangleSplitterSpec {
                v0_uk: 94.6,
                t0_us: 189.0,
                tau_us: 183.4,
                sigma_x_um: 82.2,
                v_cm_s: 10.0,
            }),
            PotentialSpec::TwoRampSplitter(TwoRampSplitterSpec {
                v0_uk: 40.0,
                t0_us: 90.0,
                tau_us: 75.0,
                sigma_um: 20.0,
                v_cm_s: 10.0,
                x1_um: 3.207,
                v2_cm_s: 8.0,
                x2_um: 1.778,
            }),
            PotentialSpec::ParabolicWall(ParabolicWallSpec { x_b_um: 40.0, curvature_uk_um2: 2.0 }),
            PotentialSpec::Composite(vec![
                focus_well(),
                PotentialSpec::ParabolicWall(ParabolicWallSpec { x_b_um: 40.0, curvature_uk_um2: 2.0 }),
                PotentialSpec::Uniform(-3.5),
            ]),
        ];
        for spec in &specs {
            spec.validate().unwrap();
            for t in [0.0, 33.3, 189.0, 405.7] {
                let v = spec.evaluate(&grid, t);
                for i in (0..grid.len()).step_by(7) {
                    let direct = spec.value_at(grid.x_at(i), t);
                    assert!(
                        (v[i] - direct).abs() <= 1e-12 * (1.0 + direct.abs()),
                        "mismatch at x={} t={t}: {} vs {direct}",
                        grid.x_at(i),
                        v[i],
                    );
                }
            }
        }
    }

    #[test]
    fn focus_mask_vector_matches_reference_parameters() {
        let spec = focus_well();
        let mask = ParameterMask::from_names(&spec, &["V0", "t0", "tau"]).unwrap();
        assert_eq!(spec.parameter_vector(&mask).unwrap(), vec![97.73, 203.4, 134.3]);
    }

    #[test]
    fn stopping_mask_is_five_parameters() {
        let spec = stop_barrier();
        let mask =
            ParameterMask::from_names(&spec, &["t0", "tau", "sigma_x", "x_c offset", "x_c slope"])
                .unwrap();
        let v = spec.parameter_vector(&mask).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v, vec![267.4, 103.5, 52.36, -0.2927, 4.297]);
    }

    #[test]
    fn parameter_round_trip_identity() {
        for spec in [focus_well(), stop_barrier()] {
            let mask = ParameterMask::all_free(&spec);
            let v = spec.parameter_vector(&mask).unwrap();
            let back = spec.with_parameters(&v, &mask).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn mask_errors() {
        let spec = focus_well();
        let bad_mask = ParameterMask::from_flags(vec![true; 3]);
        assert!(matches!(
            spec.parameter_vector(&bad_mask),
            Err(PotentialError::MaskLength { expected: 5, got: 3 })
        ));
        let mask = ParameterMask::from_names(&spec, &["V0"]).unwrap();
        assert!(matches!(
            spec.with_parameters(&[1.0, 2.0], &mask),
            Err(PotentialError::VectorLength { expected: 1, got: 2 })
        ));
        assert!(matches!(
            ParameterMask::from_names(&spec, &["x_c slope"]),
            Err(PotentialError::UnknownParameter(_))
        ));
    }
}
