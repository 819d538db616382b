//! Biphoton interferometry of magnetized plasmas: dispersion, coincidence
//! statistics, and parameter inference.
//!
//! The crate models a polarization Hong-Ou-Mandel interferometer whose one
//! arm crosses a magnetized plasma column. It provides:
//!
//! * warm R/L-mode refractive indices with full term bookkeeping
//!   ([`dispersion`]), and chord-integrated phase/group delays ([`chord`]);
//! * closed-form and numerically integrated coincidence-dip shapes for
//!   steady and linearly evolving plasmas ([`biphoton`]);
//! * Monte Carlo pair generation and coincidence counting ([`mc`]);
//! * dip fitting and plasma-parameter inversion ([`inference`]);
//! * reproduction checks for the reference scenario ([`report`]).
//!
//! All physics is generic over the float width through [`Real`]; the
//! `*64` aliases at the crate root pin the common f64 instantiations.

pub mod biphoton;
pub mod chord;
pub mod constants;
pub mod dispersion;
pub mod error;
pub mod inference;
pub mod mc;
pub mod plasma;
pub mod quad;
pub mod real;
pub mod report;

pub use error::{Error, Result};
pub use real::Real;

/// f64 plasma species.
pub type Species64 = plasma::Species<f64>;
/// f64 plasma state.
pub type PlasmaState64 = plasma::PlasmaState<f64>;
/// f64 probe wave.
pub type ProbeWave64 = dispersion::ProbeWave<f64>;
/// f64 dispersion term breakdown.
pub type TermBreakdown64 = dispersion::TermBreakdown<f64>;
/// f64 chord profile.
pub type ChordProfile64 = chord::ChordProfile<f64>;
/// f64 chord phase result.
pub type PhaseResult64 = chord::PhaseResult<f64>;
/// f64 interferometer configuration.
pub type InterferometerConfig64 = biphoton::InterferometerConfig<f64>;
/// f64 path delay pair.
pub type DelayPair64 = biphoton::DelayPair<f64>;
/// f64 linear-growth plasma model.
pub type LinearGrowthModel64 = biphoton::LinearGrowthModel<f64>;
/// f64 coincidence window.
pub type CoincidenceWindow64 = biphoton::CoincidenceWindow<f64>;
/// f64 dip curve.
pub type DipCurve64 = biphoton::DipCurve<f64>;
/// f64 sensitivity query.
pub type SensitivityQuery64 = biphoton::SensitivityQuery<f64>;
/// f64 event batch.
pub type EventBatch64 = mc::EventBatch<f64>;
/// f64 coincidence-count scan.
pub type CoincidenceCounts64 = mc::CoincidenceCounts<f64>;
/// f64 dip fit.
pub type DipFit64 = inference::DipFit<f64>;
/// f64 precision-scaling study.
pub type ScalingStudy64 = inference::ScalingStudy<f64>;
