//! Line-of-sight phase and group-delay integrals through a plasma column.
//!
//! A probe crossing a plasma along a chord of length L accumulates the phase
//! `Phi_P = (omega/c) * integral n dl` and lags a vacuum-propagated twin by
//! `delta_tau_p = integral (n - 1) dl / c`, which is negative for a tenuous
//! plasma (n < 1). Because n deviates from one only at the 1e-8 level, the
//! deviation `1 - n` is integrated on its own and the vacuum part added back
//! analytically; integrating n directly would lose the physics to
//! cancellation.

use serde::Serialize;

use crate::constants::Constants;
use crate::dispersion::{refractive_index, ProbeWave};
use crate::error::{Error, Result};
use crate::plasma::PlasmaState;
use crate::quad::simpson_from_samples;
use crate::real::Real;

/// Default number of Simpson nodes along a chord.
pub const DEFAULT_QUADRATURE_POINTS: usize = 201;

/// Density-scale profile along a chord; the scale multiplies every species
/// density (and, when requested, B0) at each position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ChordShape<T> {
    /// Scale 1 everywhere.
    Uniform,
    /// Gaussian bump `exp(-(l - center)^2 / (2 width^2))`, peak scale 1.
    Gaussian {
        /// Peak position (m), need not lie inside the chord.
        center: T,
        /// Gaussian width (m), > 0.
        width: T,
    },
    /// Piecewise-linear scale through `(position, scale)` points with
    /// strictly increasing positions; positions outside the tabulated range
    /// clamp to the nearest endpoint.
    Table(Vec<(T, T)>),
}

impl<T: Real> ChordShape<T> {
    /// Scale factor at position `l` along the chord.
    fn scale_at(&self, l: T) -> T {
        match self {
            ChordShape::Uniform => T::one(),
            ChordShape::Gaussian { center, width } => {
                let u = (l - *center) / *width;
                (-u * u / T::of(2.0)).exp()
            }
            ChordShape::Table(points) => {
                if l <= points[0].0 {
                    return points[0].1;
                }
                if l >= points[points.len() - 1].0 {
                    return points[points.len() - 1].1;
                }
                let j = points.partition_point(|&(p, _)| p <= l);
                let (x0, y0) = points[j - 1];
                let (x1, y1) = points[j];
                y0 + (y1 - y0) * (l - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChordShape::Uniform => Ok(()),
            ChordShape::Gaussian { center, width } => {
                if !center.is_finite() {
                    return Err(Error::invalid(format!(
                        "gaussian chord center must be finite, got {center}"
                    )));
                }
                if !(*width > T::zero()) || !width.is_finite() {
                    return Err(Error::invalid(format!(
                        "gaussian chord width must be finite and > 0, got {width}"
                    )));
                }
                Ok(())
            }
            ChordShape::Table(points) => {
                if points.is_empty() {
                    return Err(Error::invalid(
                        "table chord profile needs at least one point".to_string(),
                    ));
                }
                for (i, &(p, s)) in points.iter().enumerate() {
                    if !p.is_finite() || !s.is_finite() || s < T::zero() {
                        return Err(Error::invalid(format!(
                            "table chord point {i} must have finite position and \
                             finite scale >= 0, got ({p}, {s})"
                        )));
                    }
                    if i > 0 && !(points[i - 1].0 < p) {
                        return Err(Error::invalid(format!(
                            "table chord positions must be strictly increasing \
                             (point {i}: {p} after {})",
                            points[i - 1].0
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// A straight path of length L through the plasma, with a density-scale
/// profile and a Simpson node count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordProfile<T> {
    /// Path length (m), > 0.
    pub length: T,
    /// Density-scale profile along the path.
    pub shape: ChordShape<T>,
    /// When true the profile scale also multiplies B0 at each node.
    pub scale_b0: bool,
    /// Simpson node count: odd, >= 3.
    pub quadrature_points: usize,
}

impl<T: Real> ChordProfile<T> {
    /// Chord with the given shape and default node count.
    pub fn new(length: T, shape: ChordShape<T>) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::invalid(format!(
                "chord length must be finite and > 0 m, got {length}"
            )));
        }
        shape.validate()?;
        Ok(ChordProfile {
            length,
            shape,
            scale_b0: false,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
        })
    }

    /// Uniform chord of the given length.
    pub fn uniform(length: T) -> Result<Self> {
        ChordProfile::new(length, ChordShape::Uniform)
    }

    /// Same chord with a different node count (odd, >= 3).
    pub fn with_quadrature_points(mut self, n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(format!(
                "quadrature_points must be odd and >= 3, got {n}"
            )));
        }
        self.quadrature_points = n;
        Ok(self)
    }

    /// Same chord with B0 scaling switched on or off.
    pub fn with_scaled_b0(mut self, scale_b0: bool) -> Self {
        self.scale_b0 = scale_b0;
        self
    }
}

/// Chord-integrated phase and delay of a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseResult<T> {
    /// Accumulated phase Phi_P = (omega/c) * integral n dl (rad).
    pub phi_p: T,
    /// Propagation time Phi_P / omega = integral n dl / c (s).
    pub tau_p: T,
    /// Signed lag relative to vacuum, integral (n - 1) dl / c (s);
    /// negative for a tenuous plasma.
    pub delta_tau_p: T,
    /// The lag expressed as a vacuum path length, c * |delta_tau_p| (m).
    pub equivalent_length: T,
}

impl<T: Real> PhaseResult<T> {
    /// |delta_tau_p| (s).
    pub fn delta_tau_p_magnitude(&self) -> T {
        self.delta_tau_p.abs()
    }
}

/// Simpson line integral of the refractive index along a chord.
///
/// The deviation 1 - n is sampled at each node (with the profile scale
/// applied to densities, and to B0 when the chord says so) and integrated
/// separately from the vacuum part. A node at or above cutoff fails with
/// [`Error::ChordCutoff`] naming the first offending position.
pub fn phase_shift<T: Real>(
    state: &PlasmaState<T>,
    wave: &ProbeWave<T>,
    chord: &ChordProfile<T>,
) -> Result<PhaseResult<T>> {
    let n = chord.quadrature_points;
    let dx = chord.length / T::of((n - 1) as f64);
    let mut deviations = Vec::with_capacity(n);

    for i in 0..n {
        let l = dx * T::of(i as f64);
        let scale = chord.shape.scale_at(l);
        let node_state = state.scaled(scale, chord.scale_b0);
        let breakdown = refractive_index(&node_state, wave).map_err(|e| match e {
            cutoff @ Error::BelowCutoff { .. } => Error::ChordCutoff {
                position: l.to_f64_lossy(),
                source: Box::new(cutoff),
            },
            other => other,
        })?;
        deviations.push(breakdown.deviation);
    }

    let deviation_integral = simpson_from_samples(&deviations, dx)?;
    let c = Constants::<T>::si().c;
    let tau_p = (chord.length - deviation_integral) / c;
    Ok(PhaseResult {
        phi_p: wave.omega * tau_p,
        tau_p,
        delta_tau_p: -deviation_integral / c,
        equivalent_length: deviation_integral.abs(),
    })
}
