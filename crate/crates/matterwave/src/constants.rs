//! Physical constants in SI units and the derived values used throughout the
//! crate. Everything is specialised to ⁸⁷Rb in the |2,2⟩ state.

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K), exact since the 2019 SI revision.
pub const KB: f64 = 1.380_649e-23;

/// Atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;

/// ⁸⁷Rb atomic mass (u), AME 2020.
pub const RB87_MASS_U: f64 = 86.909_180_531;

/// ⁸⁷Rb atomic mass (kg).
pub const M_RB87: f64 = RB87_MASS_U * ATOMIC_MASS_KG;

/// Bohr radius (m), CODATA 2018.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// s-wave scattering length of ⁸⁷Rb in |2,2⟩, in Bohr radii.
pub const SCATTERING_LENGTH_A0: f64 = 95.5;

/// s-wave scattering length (m).
pub const A_S: f64 = SCATTERING_LENGTH_A0 * BOHR_RADIUS;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scattering_length_is_95p5_bohr_radii() {
        assert_eq!(A_S / BOHR_RADIUS, 95.5);
    }

    #[test]
    fn constants_strictly_positive() {
        for c in [HBAR, KB, ATOMIC_MASS_KG, M_RB87, BOHR_RADIUS, A_S] {
            assert!(c > 0.0);
        }
    }

    #[test]
    fn rb87_mass_magnitude() {
        // 87 u is about 1.44e-25 kg.
        assert!((M_RB87 - 1.443_16e-25).abs() / M_RB87 < 1e-5);
    }
}
