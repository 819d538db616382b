//! Reproduction checks for the reference scenario.
//!
//! The reference scenario is an n_e = 1e20 m^-3 column probed at 1 um
//! through B = 1 T, with 100 eV electrons, a 3% helium-4 minority, 100 eV
//! flow energy, a 10 fs biphoton source, and a 0.45-reflectance splitter.
//! [`reference_checks`] recomputes every headline quantity from the library
//! and grades it against its quoted value, so a single table certifies the
//! implementation end to end.

use serde::Serialize;

use crate::biphoton::{
    implied_k0, linear_growth_dip_slope, sensitivity_limit, visibility, InterferometerConfig,
    ScalingLaw, SensitivityQuery,
};
use crate::chord::{phase_shift, ChordProfile};
use crate::dispersion::{
    cutoff_density, ratio_report, refractive_index, Polarization, ProbeWave, RatioEntry,
    RatioReportInputs,
};
use crate::error::{Error, Result};
use crate::inference::{delay_to_density, density_to_delay};
use crate::plasma::{PlasmaState, Species};

/// Pass/fail criterion for one reproduced number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tolerance {
    /// |computed/reference - 1| <= tol.
    Relative {
        /// Quoted value.
        reference: f64,
        /// Allowed relative deviation.
        tol: f64,
    },
    /// |computed - reference| <= tol.
    Absolute {
        /// Quoted value.
        reference: f64,
        /// Allowed absolute deviation.
        tol: f64,
    },
    /// lo <= computed <= hi (bounds inclusive).
    Range {
        /// Lower bound.
        lo: f64,
        /// Upper bound.
        hi: f64,
    },
}

impl Tolerance {
    /// Whether `computed` satisfies the criterion.
    pub fn passes(&self, computed: f64) -> bool {
        if !computed.is_finite() {
            return false;
        }
        match *self {
            Tolerance::Relative { reference, tol } => {
                (computed / reference - 1.0).abs() <= tol
            }
            Tolerance::Absolute { reference, tol } => (computed - reference).abs() <= tol,
            Tolerance::Range { lo, hi } => (lo..=hi).contains(&computed),
        }
    }

    /// Human-readable target, e.g. `4.5e-8 (rel 2%)` or `[360, 440]`.
    pub fn describe(&self) -> String {
        match *self {
            Tolerance::Relative { reference, tol } => {
                format!("{reference:e} (rel {}%)", tol * 100.0)
            }
            Tolerance::Absolute { reference, tol } => {
                format!("{reference:e} (abs {tol:e})")
            }
            Tolerance::Range { lo, hi } => format!("[{lo}, {hi}]"),
        }
    }
}

/// One reproduced number with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    /// What the number is.
    pub name: &'static str,
    /// Value computed by this library.
    pub computed: f64,
    /// Criterion it must satisfy.
    pub tolerance: Tolerance,
    /// Verdict.
    pub passed: bool,
}

impl CheckRow {
    fn new(name: &'static str, computed: f64, tolerance: Tolerance) -> Self {
        CheckRow {
            name,
            computed,
            passed: tolerance.passes(computed),
            tolerance,
        }
    }
}

fn rel(name: &'static str, computed: f64, reference: f64, tol: f64) -> CheckRow {
    CheckRow::new(name, computed, Tolerance::Relative { reference, tol })
}

fn abs(name: &'static str, computed: f64, reference: f64, tol: f64) -> CheckRow {
    CheckRow::new(name, computed, Tolerance::Absolute { reference, tol })
}

fn range(name: &'static str, computed: f64, lo: f64, hi: f64) -> CheckRow {
    CheckRow::new(name, computed, Tolerance::Range { lo, hi })
}

fn find_ratio<'a>(entries: &'a [RatioEntry<f64>], effect: &str) -> Result<&'a RatioEntry<f64>> {
    entries
        .iter()
        .find(|e| e.effect == effect)
        .ok_or_else(|| Error::invalid(format!("ratio table is missing the `{effect}` row")))
}

/// Recomputes every reference-scenario number and grades it.
///
/// All rows passing certifies: dispersion term sizes and ratios, cutoff
/// density, chord delays and their density inversions, minority/flow
/// corrections, dip visibility/width/drift, and the sensitivity-limit
/// prefactors.
pub fn reference_checks() -> Result<Vec<CheckRow>> {
    let wave = ProbeWave::from_wavelength(1e-6, Polarization::R)?;
    let omega_probe = wave.omega;
    let omega_pump = 2.0 * omega_probe;
    let mut rows = Vec::with_capacity(20);

    // Dispersion terms for 100 eV electrons at 1e20 m^-3 in 1 T.
    let warm_electrons = PlasmaState::new(
        vec![Species::electron(1e20)?.with_t_perp_ev(100.0)?],
        1.0,
    )?;
    let breakdown = refractive_index(&warm_electrons, &wave)?;
    let terms = &breakdown.species_terms[0];
    rows.push(rel(
        "electron plasma term (1e20 m^-3, 1 um)",
        terms.plasma_term,
        4.5e-8,
        0.02,
    ));
    rows.push(rel(
        "gyro/plasma term ratio (1 T)",
        (terms.gyro1_term / terms.plasma_term).abs(),
        9.3e-5,
        0.02,
    ));
    rows.push(rel(
        "thermal/plasma term ratio (100 eV)",
        terms.thermal_term / terms.plasma_term,
        2.0e-4,
        0.03,
    ));
    rows.push(rel(
        "cutoff density (1 um)",
        cutoff_density(omega_probe),
        1.1e27,
        0.02,
    ));

    // Chord delay and the delay <-> density inversions.
    let cold_electrons = PlasmaState::new(vec![Species::electron(1e20)?], 0.0)?;
    let chord = ChordProfile::uniform(1.0)?;
    let delay = phase_shift(&cold_electrons, &wave, &chord)?.delta_tau_p;
    rows.push(rel(
        "chord group delay (1e20 m^-3, 1 m)",
        delay.abs(),
        1.5e-16,
        0.02,
    ));
    rows.push(rel(
        "delay at line density 1e22 m^-2",
        density_to_delay(1e22, &wave, 1.0)?.abs(),
        1.5e-14,
        0.02,
    ));
    rows.push(rel(
        "delay at line density 1e23 m^-2",
        density_to_delay(1e23, &wave, 1.0)?.abs(),
        1.5e-13,
        0.02,
    ));
    rows.push(rel(
        "density from a 150 fs delay over 1 mm",
        delay_to_density(1.5e-13, &wave, 1e-3)?,
        1e26,
        0.02,
    ));

    // Species correction ratios (quoted conventions).
    let ratios = ratio_report(&wave, &RatioReportInputs::reference())?;
    rows.push(rel(
        "hydrogen correction ratio (quoted)",
        find_ratio(&ratios, "hydrogen_plasma")?.quoted,
        2.3e-2,
        0.02,
    ));
    rows.push(rel(
        "helium-4 minority correction ratio (quoted, 3%)",
        find_ratio(&ratios, "helium_plasma")?.quoted,
        4.0e-3,
        0.02,
    ));
    rows.push(rel(
        "electron flow correction ratio (quoted, 100 eV)",
        find_ratio(&ratios, "electron_flow")?.quoted,
        1.3e-6,
        0.02,
    ));

    // Dip shape for a 10 fs source through a 0.45 splitter.
    let cfg = InterferometerConfig::from_pulse_width(omega_pump, 1e-14, 0.45)?;
    rows.push(abs(
        "dip visibility (R = 0.45)",
        visibility(0.45),
        0.9802,
        1e-4,
    ));
    rows.push(rel(
        "dip minimum (R = 0.45)",
        cfg.normalization * (1.0 - cfg.visibility()),
        0.020,
        0.015,
    ));
    rows.push(rel(
        "dip 1/e half-width (10 fs source)",
        1.0 / cfg.bandwidth,
        1.59e-15,
        0.02,
    ));

    // Linear-growth drift slopes.
    rows.push(rel(
        "dip drift slope (b = 0.01)",
        linear_growth_dip_slope(0.01),
        0.01005,
        1e-3,
    ));
    rows.push(rel(
        "dip drift slope (b = 0.1)",
        linear_growth_dip_slope(0.1),
        0.105,
        5e-3,
    ));

    // Sensitivity limits.
    let query = SensitivityQuery::new(
        omega_probe,
        1.0,
        100.0,
        ScalingLaw::StandardQuantumLimit,
        0.5,
    )?;
    rows.push(rel(
        "shot-noise phase floor (k0 = 1/2, eta N = 100)",
        sensitivity_limit(&query).phi_min,
        0.05,
        1e-12,
    ));
    let k0_pump = implied_k0(
        omega_pump * 1e-14,
        1.0,
        100.0,
        ScalingLaw::StandardQuantumLimit,
    )?;
    let k0_probe = implied_k0(
        omega_probe * 1e-14,
        1.0,
        100.0,
        ScalingLaw::StandardQuantumLimit,
    )?;
    rows.push(range(
        "implied k0, pump reading (10 fs, eta N = 100)",
        k0_pump,
        360.0,
        440.0,
    ));
    rows.push(range(
        "implied k0, probe reading (10 fs, eta N = 100)",
        k0_probe,
        170.0,
        210.0,
    ));
    rows.push(range(
        "implied k0 relative to the shot-noise prefactor 1/2",
        k0_pump / 0.5,
        350.0,
        900.0,
    ));

    Ok(rows)
}
