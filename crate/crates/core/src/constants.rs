//! Physical constants (CODATA 2018), SI units throughout.
//!
//! The canonical values are `f64` consts; [`Constants::si`] converts them
//! once into whatever scalar the caller works in. The classical electron
//! radius is stored *and* derivable from the others — a consistency test
//! keeps the set honest to 1e-9 relative.

use crate::real::Real;

/// Elementary charge e (C). Exact since the 2019 SI redefinition.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Electron rest mass m_e (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;
/// Vacuum permittivity epsilon_0 (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
/// Speed of light in vacuum c (m/s). Exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Classical electron radius r_e = e^2 / (4 pi eps0 m_e c^2) (m).
pub const CLASSICAL_ELECTRON_RADIUS: f64 = 2.817_940_3262e-15;
/// Boltzmann constant k_B (J/K). Exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Proton/electron and (4x that) helium-4/electron mass ratios used by the
/// species presets. These are deliberately the round-number convention
/// (1836, 7344 = 4 x 1836), not CODATA isotope masses; the reference
/// magnitude checks in [`crate::report`] depend on them.
pub const HYDROGEN_MASS_RATIO: f64 = 1836.0;
/// Helium-4 / electron mass ratio under the same convention.
pub const HELIUM4_MASS_RATIO: f64 = 7344.0;

/// The constant set converted to a generic scalar.
#[derive(Debug, Clone, Copy)]
pub struct Constants<T> {
    /// Elementary charge (C).
    pub e: T,
    /// Electron mass (kg).
    pub m_e: T,
    /// Vacuum permittivity (F/m).
    pub eps0: T,
    /// Speed of light (m/s).
    pub c: T,
    /// Classical electron radius (m).
    pub r_e: T,
    /// Boltzmann constant (J/K).
    pub k_b: T,
}

impl<T: Real> Constants<T> {
    /// CODATA-2018 values in SI units.
    pub fn si() -> Self {
        Constants {
            e: T::of(ELEMENTARY_CHARGE),
            m_e: T::of(ELECTRON_MASS),
            eps0: T::of(VACUUM_PERMITTIVITY),
            c: T::of(SPEED_OF_LIGHT),
            r_e: T::of(CLASSICAL_ELECTRON_RADIUS),
            k_b: T::of(BOLTZMANN),
        }
    }

    /// r_e recomputed from e, eps0, m_e, c. Agreement with the stored value
    /// is asserted in tests to 1e-9 relative.
    pub fn derived_classical_electron_radius(&self) -> T {
        let four_pi = T::of(4.0) * T::PI();
        // Grouped so no intermediate leaves f32 range: e/(4 pi eps0) ~ 1.4e-9.
        (self.e / (four_pi * self.eps0)) * self.e / (self.m_e * self.c * self.c)
    }
}
