//! Dip fitting, precision scaling, and plasma-parameter inversion.
//!
//! The coincidence dip is fit with the four-parameter Gaussian model
//!
//! ```text
//! f(x) = C [1 - V exp(-dw^2 (x - x0)^2)]
//! ```
//!
//! by Levenberg-Marquardt with a numerically differenced Jacobian: unit
//! weights for noiseless or externally normalized curves, Poisson weights
//! (1/max(count, 1)) for raw counts. The fitted dip center `x0` estimates
//! the differential plasma delay, which inverts to a line-averaged electron
//! density through the probe's cutoff density.

use rayon::prelude::*;
use serde::Serialize;

use crate::biphoton::{CoincidenceWindow, DelayPair, InterferometerConfig};
use crate::constants::Constants;
use crate::dispersion::{cutoff_density, ProbeWave};
use crate::error::{Error, Result};
use crate::mc::{mc_dip_scan, splitmix64, CoincidenceCounts};
use crate::real::Real;

/// Fit parameter names, in solver order.
pub const FIT_PARAMETER_NAMES: [&str; 4] =
    ["normalization", "visibility", "dip_center", "bandwidth"];

/// Hard floor on sample count for a four-parameter fit.
pub const MIN_FIT_SAMPLES: usize = 8;

/// A dip must dip: the smallest sample has to sit below this fraction of
/// the largest before a fit is attempted.
pub const DIP_DETECTION_FRACTION: f64 = 0.9;

const MAX_ITERATIONS: u32 = 200;
const RELATIVE_STEP_TOLERANCE: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Fit result
// ---------------------------------------------------------------------------

/// Levenberg-Marquardt estimate of the dip model
/// C [1 - V exp(-bandwidth^2 (x - dip_center)^2)].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipFit<T> {
    /// Estimated baseline C (same units as the samples).
    pub normalization: T,
    /// Estimated visibility V.
    pub visibility: T,
    /// Estimated dip center (s).
    pub dip_center: T,
    /// Estimated Gaussian width parameter (rad/s).
    pub bandwidth: T,
    /// Parameter covariance in [`FIT_PARAMETER_NAMES`] order.
    pub covariance: [[T; 4]; 4],
    /// Root of the weighted residual sum of squares at the solution.
    pub residual_norm: T,
    /// False when the solver hit the iteration cap before the step
    /// tolerance.
    pub converged: bool,
    /// Iterations taken.
    pub iterations: u32,
    /// Soft-limit violations (e.g. visibility outside [0, 1.05]).
    pub warnings: Vec<String>,
}

impl<T: Real> DipFit<T> {
    /// Standard error of the dip center (s).
    pub fn dip_center_stderr(&self) -> T {
        self.covariance[2][2].sqrt()
    }

    /// Standard error of the indexed parameter ([`FIT_PARAMETER_NAMES`]).
    pub fn stderr(&self, index: usize) -> T {
        self.covariance[index][index].sqrt()
    }
}

fn model<T: Real>(theta: &[T; 4], x: T) -> T {
    let u = theta[3] * (x - theta[2]);
    theta[0] * (T::one() - theta[1] * (-(u * u)).exp())
}

/// Solve A x = b (4x4) by Gaussian elimination with partial pivoting.
/// A near-zero pivot names the parameter of its column as degenerate.
fn solve_4x4<T: Real>(a: &[[T; 4]; 4], b: &[T; 4]) -> Result<[T; 4]> {
    let mut m = *a;
    let mut rhs = *b;
    let mut scale = T::zero();
    for row in &m {
        for &v in row {
            scale = scale.max(v.abs());
        }
    }
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::DegenerateFit {
            parameter: FIT_PARAMETER_NAMES[0],
        });
    }
    let tiny = scale * T::epsilon() * T::of(16.0);
    let mut row_of = [0usize, 1, 2, 3];
    for col in 0..4 {
        let mut pivot_row = col;
        let mut pivot_abs = m[row_of[col]][col].abs();
        for candidate in (col + 1)..4 {
            let a = m[row_of[candidate]][col].abs();
            if a > pivot_abs {
                pivot_abs = a;
                pivot_row = candidate;
            }
        }
        if !(pivot_abs > tiny) {
            return Err(Error::DegenerateFit {
                parameter: FIT_PARAMETER_NAMES[col],
            });
        }
        row_of.swap(col, pivot_row);
        let pivot = m[row_of[col]][col];
        for lower in (col + 1)..4 {
            let factor = m[row_of[lower]][col] / pivot;
            for k in col..4 {
                let upper = m[row_of[col]][k];
                m[row_of[lower]][k] -= factor * upper;
            }
            let upper_rhs = rhs[row_of[col]];
            rhs[row_of[lower]] -= factor * upper_rhs;
        }
    }
    let mut x = [T::zero(); 4];
    for col in (0..4).rev() {
        let mut acc = rhs[row_of[col]];
        for k in (col + 1)..4 {
            acc -= m[row_of[col]][k] * x[k];
        }
        x[col] = acc / m[row_of[col]][col];
    }
    Ok(x)
}

fn invert_4x4<T: Real>(a: &[[T; 4]; 4]) -> Result<[[T; 4]; 4]> {
    let mut inv = [[T::zero(); 4]; 4];
    for col in 0..4 {
        let mut unit = [T::zero(); 4];
        unit[col] = T::one();
        let column = solve_4x4(a, &unit)?;
        for row in 0..4 {
            inv[row][col] = column[row];
        }
    }
    Ok(inv)
}

fn weighted_sse<T: Real>(xs: &[T], ys: &[T], ws: &[T], theta: &[T; 4]) -> T {
    let mut sse = T::zero();
    for i in 0..xs.len() {
        let r = ys[i] - model(theta, xs[i]);
        sse += ws[i] * r * r;
    }
    sse
}

fn initial_guess<T: Real>(xs: &[T], ys: &[T]) -> [T; 4] {
    let mut y_max = ys[0];
    let mut y_min = ys[0];
    let mut x_at_min = xs[0];
    for i in 0..xs.len() {
        if ys[i] > y_max {
            y_max = ys[i];
        }
        if ys[i] < y_min {
            y_min = ys[i];
            x_at_min = xs[i];
        }
    }
    // Full width of the region at least half as deep as the dip; fall back
    // to one grid spacing when only one sample reaches half depth.
    let half_depth = y_max - T::of(0.5) * (y_max - y_min);
    let mut left = x_at_min;
    let mut right = x_at_min;
    for i in 0..xs.len() {
        if ys[i] <= half_depth {
            left = left.min(xs[i]);
            right = right.max(xs[i]);
        }
    }
    let mut min_gap = T::infinity();
    for pair in xs.windows(2) {
        let gap = (pair[1] - pair[0]).abs();
        if gap > T::zero() {
            min_gap = min_gap.min(gap);
        }
    }
    if !min_gap.is_finite() {
        min_gap = T::one();
    }
    let width = (right - left).max(min_gap);
    let bandwidth0 = T::of(2.0) * T::of(std::f64::consts::LN_2).sqrt() / width;
    [y_max, T::one() - y_min / y_max, x_at_min, bandwidth0]
}

fn fit_samples<T: Real>(
    xs: &[T],
    ys: &[T],
    ws: &[T],
    scale_covariance_by_reduced_sse: bool,
) -> Result<DipFit<T>> {
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::invalid(format!(
            "dip fit needs at least {MIN_FIT_SAMPLES} samples, got {n}"
        )));
    }
    for i in 0..n {
        if !xs[i].is_finite() || !ys[i].is_finite() || !ws[i].is_finite() || ws[i] < T::zero() {
            return Err(Error::invalid(format!(
                "fit sample {i} is not finite (x = {}, y = {}, w = {})",
                xs[i], ys[i], ws[i]
            )));
        }
    }
    let y_max = ys.iter().copied().fold(T::neg_infinity(), T::max);
    let y_min = ys.iter().copied().fold(T::infinity(), T::min);
    if !(y_max > T::zero()) {
        return Err(Error::invalid(format!(
            "fit samples must have a positive maximum, got {y_max}"
        )));
    }
    if y_min >= T::of(DIP_DETECTION_FRACTION) * y_max {
        return Err(Error::NoDip {
            min: y_min.to_f64_lossy(),
            max: y_max.to_f64_lossy(),
        });
    }

    let mut theta = initial_guess(xs, ys);
    // Characteristic parameter scales. The normal equations are formed in
    // scaled variables theta_j / scales_j (the raw system spans ~60 decades
    // because delays are ~1e-15 s and bandwidths ~1e15 rad/s, far beyond
    // f64 conditioning).
    let scales = [theta[0], T::one(), theta[3].recip(), theta[3]];
    let sqrt_eps = T::epsilon().sqrt();

    let mut lambda = T::of(1e-3);
    let lambda_floor = T::of(1e-12);
    let lambda_ceiling = T::of(1e12);
    let mut sse = weighted_sse(xs, ys, ws, &theta);
    let mut converged = false;
    let mut iterations = 0;
    let mut jtwj_scaled = [[T::zero(); 4]; 4];

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Forward-difference Jacobian of the model at theta, with each
        // column pre-multiplied by its parameter scale.
        let mut jac = vec![[T::zero(); 4]; n];
        for j in 0..4 {
            let h = sqrt_eps * (theta[j].abs() + scales[j].abs());
            let mut bumped = theta;
            bumped[j] += h;
            let column_scale = scales[j] / h;
            for (i, row) in jac.iter_mut().enumerate() {
                row[j] = (model(&bumped, xs[i]) - model(&theta, xs[i])) * column_scale;
            }
        }
        jtwj_scaled = [[T::zero(); 4]; 4];
        let mut jtwr_scaled = [T::zero(); 4];
        for i in 0..n {
            let r = ys[i] - model(&theta, xs[i]);
            for j in 0..4 {
                jtwr_scaled[j] += ws[i] * jac[i][j] * r;
                for k in j..4 {
                    jtwj_scaled[j][k] += ws[i] * jac[i][j] * jac[i][k];
                }
            }
        }
        for j in 0..4 {
            for k in 0..j {
                jtwj_scaled[j][k] = jtwj_scaled[k][j];
            }
        }

        // Marquardt damping: retry with larger lambda until a step shrinks
        // the weighted SSE.
        let mut stalled = false;
        loop {
            let mut damped = jtwj_scaled;
            for j in 0..4 {
                damped[j][j] += lambda * jtwj_scaled[j][j];
            }
            let scaled_step = solve_4x4(&damped, &jtwr_scaled)?;
            let mut step = [T::zero(); 4];
            let mut trial = theta;
            for j in 0..4 {
                step[j] = scaled_step[j] * scales[j];
                trial[j] += step[j];
            }
            let trial_sse = weighted_sse(xs, ys, ws, &trial);
            if trial_sse.is_finite() && trial_sse <= sse {
                theta = trial;
                sse = trial_sse;
                lambda = (lambda / T::of(10.0)).max(lambda_floor);
                let mut max_rel_step = T::zero();
                for j in 0..4 {
                    let rel = step[j].abs() / (theta[j].abs() + scales[j].abs());
                    max_rel_step = max_rel_step.max(rel);
                }
                if max_rel_step < T::of(RELATIVE_STEP_TOLERANCE) {
                    converged = true;
                }
                break;
            }
            lambda *= T::of(10.0);
            if lambda > lambda_ceiling {
                stalled = true;
                break;
            }
        }
        if converged || stalled {
            break;
        }
    }

    // Covariance in physical units: scale the inverse of the scaled system
    // back out, cov_jk = s_j s_k (J'^T W J')^-1_jk.
    let inverse_scaled = invert_4x4(&jtwj_scaled)?;
    let mut covariance = [[T::zero(); 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            covariance[j][k] = inverse_scaled[j][k] * scales[j] * scales[k];
        }
    }
    if scale_covariance_by_reduced_sse {
        let dof = T::of((n - 4) as f64);
        let variance = sse / dof;
        for row in covariance.iter_mut() {
            for entry in row.iter_mut() {
                *entry = *entry * variance;
            }
        }
    }

    let mut warnings = Vec::new();
    if theta[1] < T::zero() || theta[1] > T::of(1.05) {
        warnings.push(format!(
            "fitted visibility {} outside the physical range [0, 1.05]",
            theta[1]
        ));
    }
    if !converged {
        warnings.push(format!(
            "solver hit the {MAX_ITERATIONS}-iteration cap before the step tolerance"
        ));
    }

    Ok(DipFit {
        normalization: theta[0],
        visibility: theta[1],
        dip_center: theta[2],
        bandwidth: theta[3],
        covariance,
        residual_norm: sse.sqrt(),
        converged,
        iterations,
        warnings,
    })
}

/// Fits the dip model to (scan delay, rate) samples with unit weights;
/// the covariance is scaled by the reduced residual variance.
pub fn fit_dip_curve<T: Real>(samples: &[(T, T)]) -> Result<DipFit<T>> {
    let xs: Vec<T> = samples.iter().map(|&(x, _)| x).collect();
    let ys: Vec<T> = samples.iter().map(|&(_, y)| y).collect();
    let ws = vec![T::one(); xs.len()];
    fit_samples(&xs, &ys, &ws, true)
}

/// Fits the dip model to raw Monte Carlo counts with Poisson weights
/// 1/max(count, 1); the covariance comes straight from the weighted normal
/// equations (absolute errors).
pub fn fit_dip_counts<T: Real>(counts: &CoincidenceCounts<T>) -> Result<DipFit<T>> {
    let xs: Vec<T> = counts.points.iter().map(|p| p.delta_tau).collect();
    let ys: Vec<T> = counts
        .points
        .iter()
        .map(|p| T::of(p.counted as f64))
        .collect();
    let ws: Vec<T> = counts
        .points
        .iter()
        .map(|p| T::of(p.counted.max(1) as f64).recip())
        .collect();
    fit_samples(&xs, &ys, &ws, false)
}

// ---------------------------------------------------------------------------
// Precision scaling
// ---------------------------------------------------------------------------

/// Dip-center precision at one pair budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow<T> {
    /// Pairs generated per scan point.
    pub pairs_per_point: u64,
    /// Fits that entered the statistics.
    pub trials: u32,
    /// Sample standard deviation of the fitted dip centers (s).
    pub std_dip_center: T,
    /// Mean fitted center minus the true differential delay (s).
    pub mean_bias: T,
    /// Trials dropped because the fit failed or did not converge.
    pub excluded: u32,
}

/// Monte Carlo precision-scaling study: dip-center scatter versus pair
/// budget, with the fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingStudy<T> {
    /// One row per pair budget, in increasing order.
    pub rows: Vec<ScalingRow<T>>,
    /// Least-squares slope of ln(std) versus ln(pairs); shot-noise
    /// statistics give -1/2.
    pub slope: T,
    /// Standard error of the slope.
    pub slope_stderr: T,
}

/// Order-independent compensated (Kahan) sum.
fn kahan_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Repeated simulate-and-fit trials at each pair budget.
///
/// Every trial runs a full [`mc_dip_scan`] with a seed derived from the
/// master seed, the budget index, and the trial index, then fits the
/// counts; rows collect the scatter and bias of the fitted dip centers.
/// Trials run in parallel and reduce deterministically.
#[allow(clippy::too_many_arguments)]
pub fn precision_scaling<T: Real>(
    cfg: &InterferometerConfig<T>,
    delays: &DelayPair<T>,
    delta_taus: &[T],
    pairs_schedule: &[u64],
    trials: u32,
    window: &CoincidenceWindow<T>,
    seed: u64,
) -> Result<ScalingStudy<T>> {
    if trials < 20 {
        return Err(Error::invalid(format!(
            "precision scaling needs at least 20 trials per budget, got {trials}"
        )));
    }
    if pairs_schedule.len() < 2 {
        return Err(Error::invalid(format!(
            "precision scaling needs at least 2 pair budgets, got {}",
            pairs_schedule.len()
        )));
    }
    for pair in pairs_schedule.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::invalid(format!(
                "pair budgets must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }

    let mut rows = Vec::with_capacity(pairs_schedule.len());
    for (row_index, &pairs_per_point) in pairs_schedule.iter().enumerate() {
        let centers: Vec<Option<T>> = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<Option<T>> {
                let stream = ((row_index as u64) << 32) | (trial as u64 + 1);
                let trial_seed =
                    splitmix64(seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
                let (_, counts) = mc_dip_scan(
                    cfg,
                    delays,
                    delta_taus,
                    pairs_per_point,
                    window,
                    T::zero(),
                    trial_seed,
                )?;
                match fit_dip_counts(&counts) {
                    Ok(fit) if fit.converged => Ok(Some(fit.dip_center)),
                    Ok(_) => Ok(None),
                    Err(Error::NoDip { .. }) | Err(Error::DegenerateFit { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let kept: Vec<T> = centers.iter().copied().flatten().collect();
        let excluded = trials - kept.len() as u32;
        if kept.len() < 2 {
            return Err(Error::invalid(format!(
                "budget {pairs_per_point}: only {} of {trials} fits usable",
                kept.len()
            )));
        }
        let count = T::of(kept.len() as f64);
        let mean = kahan_sum(kept.iter().copied()) / count;
        let variance = kahan_sum(kept.iter().map(|&c| (c - mean) * (c - mean)))
            / (count - T::one());
        rows.push(ScalingRow {
            pairs_per_point,
            trials: kept.len() as u32,
            std_dip_center: variance.sqrt(),
            mean_bias: mean - delays.delta_tau_p,
            excluded,
        });
    }

    // Log-log least squares for the precision exponent.
    let m = T::of(rows.len() as f64);
    let lx: Vec<T> = rows
        .iter()
        .map(|r| T::of(r.pairs_per_point as f64).ln())
        .collect();
    let ly: Vec<T> = rows.iter().map(|r| r.std_dip_center.ln()).collect();
    let x_mean = kahan_sum(lx.iter().copied()) / m;
    let y_mean = kahan_sum(ly.iter().copied()) / m;
    let sxx = kahan_sum(lx.iter().map(|&x| (x - x_mean) * (x - x_mean)));
    let sxy = kahan_sum(
        lx.iter()
            .zip(ly.iter())
            .map(|(&x, &y)| (x - x_mean) * (y - y_mean)),
    );
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual_ss = kahan_sum(lx.iter().zip(ly.iter()).map(|(&x, &y)| {
        let r = y - (intercept + slope * x);
        r * r
    }));
    let slope_stderr = if rows.len() > 2 {
        (residual_ss / (m - T::of(2.0)) / sxx).sqrt()
    } else {
        T::zero()
    };

    Ok(ScalingStudy {
        rows,
        slope,
        slope_stderr,
    })
}

// ---------------------------------------------------------------------------
// Delay <-> density inversion
// ---------------------------------------------------------------------------

/// Line-averaged electron density implied by a differential group delay
/// through a column of the given length:
///
/// ```text
/// n_e = 2 n_cutoff c |delta_tau_p| / L
/// ```
///
/// (the tenuous-plasma delay inverted for density). Densities at or above
/// the probe's cutoff are rejected as outside the model's validity.
pub fn delay_to_density<T: Real>(
    delta_tau_p: T,
    wave: &ProbeWave<T>,
    length: T,
) -> Result<T> {
    if !delta_tau_p.is_finite() {
        return Err(Error::invalid(format!(
            "delta_tau_p must be finite, got {delta_tau_p}"
        )));
    }
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::invalid(format!(
            "chord length must be finite and > 0 m, got {length}"
        )));
    }
    let cutoff = cutoff_density(wave.omega);
    let c = Constants::<T>::si().c;
    let density = T::of(2.0) * cutoff * c * delta_tau_p.abs() / length;
    if density >= cutoff {
        return Err(Error::OverCutoffDensity {
            density: density.to_f64_lossy(),
            cutoff: cutoff.to_f64_lossy(),
        });
    }
    Ok(density)
}

/// Differential group delay a uniform electron density produces over a
/// column of the given length: the inverse of [`delay_to_density`].
/// Negative (the dispersive path lags vacuum).
pub fn density_to_delay<T: Real>(density: T, wave: &ProbeWave<T>, length: T) -> Result<T> {
    if !(density >= T::zero()) || !density.is_finite() {
        return Err(Error::invalid(format!(
            "density must be finite and >= 0 m^-3, got {density}"
        )));
    }
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::invalid(format!(
            "chord length must be finite and > 0 m, got {length}"
        )));
    }
    let cutoff = cutoff_density(wave.omega);
    if density >= cutoff {
        return Err(Error::OverCutoffDensity {
            density: density.to_f64_lossy(),
            cutoff: cutoff.to_f64_lossy(),
        });
    }
    let c = Constants::<T>::si().c;
    Ok(-(density * length) / (T::of(2.0) * cutoff * c))
}
