//! Unit system: lengths in μm, times in μs, velocities in cm/s at interfaces,
//! energies in μK (via k_B) at interfaces and as angular frequencies (rad/μs,
//! i.e. E/ħ) internally.
//!
//! Keeping E/ħ internally removes every explicit ħ from the evolution
//! equations: the kinetic phase is ħk²/2m·dt = `HBAR_EFF`·k²/2·dt with k in
//! rad/μm and dt in μs.

use crate::constants::{HBAR, KB, M_RB87};

/// ħ/m for ⁸⁷Rb in μm²/μs (≈ 7.307e-4).
pub const HBAR_EFF: f64 = HBAR / M_RB87 * 1e6;

/// k_B·(1 μK)/ħ expressed in rad/μs (≈ 0.1309).
pub const UK_TO_RAD_PER_US: f64 = KB * 1e-6 / HBAR * 1e-6;

/// 1 cm/s in μm/μs.
pub const CM_PER_S_TO_UM_PER_US: f64 = 1e-2;

/// Energy conversion μK → rad/μs.
#[inline]
pub fn rad_per_us_from_uk(e_uk: f64) -> f64 {
    e_uk * UK_TO_RAD_PER_US
}

/// Energy conversion rad/μs → μK.
#[inline]
pub fn uk_from_rad_per_us(e_rad_us: f64) -> f64 {
    e_rad_us / UK_TO_RAD_PER_US
}

/// Velocity conversion cm/s → μm/μs.
#[inline]
pub fn um_per_us_from_cm_s(v_cm_s: f64) -> f64 {
    v_cm_s * CM_PER_S_TO_UM_PER_US
}

/// Velocity conversion μm/μs → cm/s.
#[inline]
pub fn cm_s_from_um_per_us(v_um_us: f64) -> f64 {
    v_um_us / CM_PER_S_TO_UM_PER_US
}

/// Wavenumber (rad/μm) of a ⁸⁷Rb atom moving at `v_cm_s`: k = mv/ħ.
#[inline]
pub fn wavenumber_from_velocity(v_cm_s: f64) -> f64 {
    um_per_us_from_cm_s(v_cm_s) / HBAR_EFF
}

/// Velocity (cm/s) corresponding to wavenumber k (rad/μm).
#[inline]
pub fn velocity_from_wavenumber(k_rad_um: f64) -> f64 {
    cm_s_from_um_per_us(k_rad_um * HBAR_EFF)
}
