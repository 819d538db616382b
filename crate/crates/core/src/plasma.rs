//! Plasma composition: species, bulk state, and characteristic frequencies.
//!
//! A [`Species`] carries signed charge number, mass, density, perpendicular
//! temperature and field-aligned drift; a [`PlasmaState`] is a set of species
//! in a uniform axial magnetic field B0. The two characteristic frequencies
//! everything else is built from:
//!
//! * plasma frequency      omega_ps = sqrt(Z_s^2 e^2 n_s / (eps0 m_s))
//! * gyrofrequency (signed) Omega_s = Z_s e B0 / m_s
//!
//! Electrons (Z = -1) in a positive B0 gyrate with Omega_e < 0; that sign is
//! load-bearing for the R/L mode splitting in [`crate::dispersion`].

use serde::Serialize;

use crate::constants::{Constants, HELIUM4_MASS_RATIO, HYDROGEN_MASS_RATIO};
use crate::error::{Error, Result};
use crate::real::Real;

/// Maximum field-aligned drift allowed by the nonrelativistic expansion: c/10.
pub const MAX_DRIFT_FRACTION_OF_C: f64 = 0.1;

/// One charged species of a plasma. All quantities SI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Species<T> {
    /// Label used in term tables and error messages.
    pub name: String,
    /// Signed charge number Z_s (electron: -1). Never zero.
    pub charge_number: i32,
    /// Mass (kg), strictly positive.
    pub mass: T,
    /// Number density (m^-3), nonnegative.
    pub density: T,
    /// Perpendicular temperature (J), nonnegative. Inputs in eV go through
    /// [`ev_to_joule`] first.
    pub t_perp: T,
    /// Field-aligned bulk drift (m/s), |v| < c/10.
    pub v_parallel: T,
}

impl<T: Real> Species<T> {
    /// New cold, motionless species. Fails on Z = 0, nonpositive/nonfinite
    /// mass, or negative/nonfinite density.
    pub fn new(name: impl Into<String>, charge_number: i32, mass: T, density: T) -> Result<Self> {
        let name = name.into();
        if charge_number == 0 {
            return Err(Error::invalid(format!(
                "species `{name}`: charge_number must be nonzero"
            )));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::invalid(format!(
                "species `{name}`: mass must be finite and > 0, got {mass}"
            )));
        }
        if !(density >= T::zero()) || !density.is_finite() {
            return Err(Error::invalid(format!(
                "species `{name}`: density must be finite and >= 0, got {density}"
            )));
        }
        Ok(Species {
            name,
            charge_number,
            mass,
            density,
            t_perp: T::zero(),
            v_parallel: T::zero(),
        })
    }

    /// Electron preset (Z = -1, m = m_e).
    pub fn electron(density: T) -> Result<Self> {
        let k = Constants::<T>::si();
        Species::new("electron", -1, k.m_e, density)
    }

    /// Hydrogen ion preset: Z = +1, m = 1836 m_e (round-number convention,
    /// not the CODATA proton mass).
    pub fn hydrogen_ion(density: T) -> Result<Self> {
        let k = Constants::<T>::si();
        Species::new("hydrogen", 1, T::of(HYDROGEN_MASS_RATIO) * k.m_e, density)
    }

    /// Helium-4 ion (alpha) preset: Z = +2, m = 7344 m_e = 4 x 1836 m_e
    /// (same convention as [`Species::hydrogen_ion`]).
    pub fn helium4_ion(density: T) -> Result<Self> {
        let k = Constants::<T>::si();
        Species::new("helium4", 2, T::of(HELIUM4_MASS_RATIO) * k.m_e, density)
    }

    /// Sets the perpendicular temperature from an energy in eV.
    pub fn with_t_perp_ev(mut self, t_perp_ev: T) -> Result<Self> {
        self.t_perp = ev_to_joule(t_perp_ev)?;
        Ok(self)
    }

    /// Sets the perpendicular temperature directly in joules.
    pub fn with_t_perp(mut self, t_perp_j: T) -> Result<Self> {
        if !(t_perp_j >= T::zero()) || !t_perp_j.is_finite() {
            return Err(Error::invalid(format!(
                "species `{}`: t_perp must be finite and >= 0, got {t_perp_j}",
                self.name
            )));
        }
        self.t_perp = t_perp_j;
        Ok(self)
    }

    /// Sets the field-aligned drift speed (signed). Rejects |v| >= c/10.
    pub fn with_v_parallel(mut self, v: T) -> Result<Self> {
        let vmax = T::of(MAX_DRIFT_FRACTION_OF_C) * Constants::<T>::si().c;
        if !v.is_finite() || v.abs() >= vmax {
            return Err(Error::invalid(format!(
                "species `{}`: |v_parallel| must be < c/10 = {:.4e} m/s, got {v}",
                self.name,
                vmax.to_f64_lossy()
            )));
        }
        self.v_parallel = v;
        Ok(self)
    }

    /// Same species with density (and nothing else) multiplied by `scale`.
    pub(crate) fn scaled_density(&self, scale: T) -> Self {
        let mut s = self.clone();
        s.density = s.density * scale;
        s
    }
}

/// A multi-species plasma in a uniform axial magnetic field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlasmaState<T> {
    /// The species present (may be empty: vacuum).
    pub species: Vec<Species<T>>,
    /// Axial magnetic field B0 (T), signed along the propagation direction.
    pub b0: T,
}

impl<T: Real> PlasmaState<T> {
    /// New state. Fails on nonfinite B0.
    pub fn new(species: Vec<Species<T>>, b0: T) -> Result<Self> {
        if !b0.is_finite() {
            return Err(Error::invalid(format!("b0 must be finite, got {b0}")));
        }
        Ok(PlasmaState { species, b0 })
    }

    /// Relative charge imbalance |sum Z_s n_s| / sum |Z_s| n_s
    /// (zero for an empty or neutral plasma).
    pub fn charge_imbalance(&self) -> T {
        let mut net = T::zero();
        let mut gross = T::zero();
        for s in &self.species {
            let z = T::of(s.charge_number as f64);
            net += z * s.density;
            gross += z.abs() * s.density;
        }
        if gross > T::zero() {
            net.abs() / gross
        } else {
            T::zero()
        }
    }

    /// Quasi-neutrality check with a configurable relative tolerance
    /// (1e-6 is the conventional default). A violation is the caller's cue
    /// to warn, not an error: deliberately non-neutral states are allowed.
    pub fn is_quasi_neutral(&self, rel_tol: T) -> bool {
        self.charge_imbalance() <= rel_tol
    }

    /// Largest species plasma frequency, with the species that attains it.
    pub fn max_plasma_frequency(&self) -> Option<(&Species<T>, T)> {
        let mut best: Option<(&Species<T>, T)> = None;
        for s in &self.species {
            let w = plasma_frequency(s);
            match best {
                Some((_, wb)) if wb >= w => {}
                _ => best = Some((s, w)),
            }
        }
        best
    }

    /// All densities (and optionally B0) multiplied by `scale`; used by
    /// chord profiles.
    pub(crate) fn scaled(&self, scale: T, scale_b0: bool) -> Self {
        PlasmaState {
            species: self.species.iter().map(|s| s.scaled_density(scale)).collect(),
            b0: if scale_b0 { self.b0 * scale } else { self.b0 },
        }
    }
}

/// Plasma frequency omega_ps = |Z_s| sqrt(e^2 n_s / (eps0 m_s)) (rad/s).
///
/// Total on valid species: zero density gives zero. Products are grouped as
/// ((e^2/eps0)/m)*n so no intermediate underflows at f32 (eps0*m_e ~ 8e-42
/// would be subnormal there).
pub fn plasma_frequency<T: Real>(s: &Species<T>) -> T {
    let k = Constants::<T>::si();
    let z = T::of(s.charge_number.unsigned_abs() as f64);
    z * (((k.e * k.e / k.eps0) / s.mass) * s.density).sqrt()
}

/// Signed gyrofrequency Omega_s = Z_s e B0 / m_s (rad/s).
///
/// Negative for electrons in a positive field; zero when B0 = 0.
pub fn gyro_frequency<T: Real>(s: &Species<T>, b0: T) -> T {
    let k = Constants::<T>::si();
    T::of(s.charge_number as f64) * (k.e / s.mass) * b0
}

/// Energy conversion eV -> J. Rejects negative input: every consumer here is
/// an energy or temperature.
pub fn ev_to_joule<T: Real>(ev: T) -> Result<T> {
    if !(ev >= T::zero()) || !ev.is_finite() {
        return Err(Error::invalid(format!(
            "energy must be finite and >= 0 eV, got {ev}"
        )));
    }
    Ok(ev * Constants::<T>::si().e)
}

/// Energy conversion J -> eV. Rejects negative input.
pub fn joule_to_ev<T: Real>(joule: T) -> Result<T> {
    if !(joule >= T::zero()) || !joule.is_finite() {
        return Err(Error::invalid(format!(
            "energy must be finite and >= 0 J, got {joule}"
        )));
    }
    Ok(joule / Constants::<T>::si().e)
}

/// Which speed a given kinetic energy is converted to. Both conventions are
/// in circulation for order-of-magnitude work, and they differ by sqrt(2);
/// [`crate::dispersion::ratio_report`] deliberately exposes the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpeedConvention {
    /// v = sqrt(2 E / m): the exact nonrelativistic speed for kinetic energy E.
    Sqrt2EOverM,
    /// v = sqrt(E / m): the rms-style shorthand some magnitude estimates use.
    SqrtEOverM,
}

/// Speed from a kinetic energy (J) and mass (kg) under the chosen convention.
pub fn speed_from_energy<T: Real>(energy_j: T, mass: T, convention: SpeedConvention) -> Result<T> {
    if !(energy_j >= T::zero()) || !energy_j.is_finite() {
        return Err(Error::invalid(format!(
            "energy must be finite and >= 0 J, got {energy_j}"
        )));
    }
    if !(mass > T::zero()) {
        return Err(Error::invalid(format!("mass must be > 0 kg, got {mass}")));
    }
    let e_over_m = energy_j / mass;
    Ok(match convention {
        SpeedConvention::Sqrt2EOverM => (T::of(2.0) * e_over_m).sqrt(),
        SpeedConvention::SqrtEOverM => e_over_m.sqrt(),
    })
}
