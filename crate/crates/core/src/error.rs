//! Error type shared by the whole crate.
//!
//! Error payloads are stored as `f64` regardless of the scalar the caller
//! instantiated, so the error enum stays object-safe and printable without
//! dragging generic parameters through every `Result`.

use thiserror::Error;

/// Everything that can go wrong in the physics core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input failed validation before any physics ran. The message names the
    /// offending field and constraint.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Probe frequency at or below the largest species plasma frequency:
    /// the wave is evanescent and the expansion does not apply.
    #[error(
        "probe below cutoff: omega = {omega:.6e} rad/s <= plasma frequency {omega_ps:.6e} rad/s \
         of species `{species}` (cutoff density {cutoff_density:.6e} m^-3 at this frequency)"
    )]
    BelowCutoff {
        /// Probe angular frequency (rad/s).
        omega: f64,
        /// Largest species plasma frequency (rad/s).
        omega_ps: f64,
        /// Species responsible for the violation.
        species: String,
        /// Electron density that would put the cutoff exactly at `omega` (m^-3).
        cutoff_density: f64,
    },

    /// A chord profile pushed the local density past cutoff somewhere along
    /// the path; reports the first offending position.
    #[error("chord crosses cutoff at position {position:.6e} m: {source}")]
    ChordCutoff {
        /// First quadrature node (m from chord start) where the probe is evanescent.
        position: f64,
        /// The underlying cutoff violation at that node.
        #[source]
        source: Box<Error>,
    },

    /// Asymptotic plasma-dispersion series evaluated inside its divergence
    /// region |zeta| <= 1.
    #[error("asymptotic series invalid for |zeta| = {zeta_abs:.6e} <= 1")]
    SeriesOutOfDomain {
        /// Magnitude of the requested argument.
        zeta_abs: f64,
    },

    /// Asymptotic series truncation order not implemented.
    #[error("unsupported series order {order} (supported: 1, 3)")]
    SeriesOrder {
        /// Requested truncation order.
        order: u8,
    },

    /// Iterated quadrature failed to reach the requested relative tolerance.
    #[error(
        "quadrature did not converge: achieved relative change {achieved:.3e}, \
         requested {requested:.3e}"
    )]
    QuadratureNotConverged {
        /// Relative change between the last two refinement levels.
        achieved: f64,
        /// Tolerance that was requested.
        requested: f64,
    },

    /// Dip fit rejected because the data show no dip to fit.
    #[error(
        "no dip in data: minimum {min:.6e} is not below 0.9 x maximum {max:.6e}; \
         refusing to fit a flat curve"
    )]
    NoDip {
        /// Smallest sample value.
        min: f64,
        /// Largest sample value.
        max: f64,
    },

    /// Normal-equation matrix is numerically rank deficient; the named
    /// parameter is unconstrained by the data.
    #[error("degenerate fit: parameter `{parameter}` is unconstrained by the data")]
    DegenerateFit {
        /// Name of the parameter whose Jacobian column pivoted to ~0.
        parameter: &'static str,
    },

    /// An inferred (or requested) electron density at or above the probe's
    /// cutoff density, where the delay-to-density inversion is unphysical.
    #[error(
        "density {density:.6e} m^-3 is at or above the cutoff {cutoff:.6e} m^-3 \
         for this probe frequency"
    )]
    OverCutoffDensity {
        /// Density implied by the inputs (m^-3).
        density: f64,
        /// Cutoff density at the probe frequency (m^-3).
        cutoff: f64,
    },
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for validation failures.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
