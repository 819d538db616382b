//! Deterministic 1-D quadrature.
//!
//! Two routines cover every integral in this crate:
//!
//! * [`simpson_from_samples`] — composite Simpson on an odd number of
//!   uniformly spaced samples, for integrands already evaluated on a grid
//!   (chord profiles).
//! * [`integrate_1d`] — trapezoid doubling with Romberg extrapolation on a
//!   uniform grid, for smooth analytic integrands. Uniform refinement is
//!   chosen over adaptive subdivision deliberately: the integrands here are
//!   broad windows containing one narrow Gaussian valley, exactly the shape
//!   whose midpoint samples an adaptive first pass can straddle and miss.
//!   A floor on the refinement level ([`QuadratureOptions::min_levels`])
//!   guarantees the valley is seen before convergence is judged.

use crate::error::{Error, Result};
use crate::real::Real;

/// Controls for [`integrate_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    /// Relative change between successive Romberg diagonals below which the
    /// estimate is accepted.
    pub rel_tol: T,
    /// Minimum doubling level before convergence may be declared; level k
    /// uses 2^k + 1 nodes. Guards against false convergence on features much
    /// narrower than the window.
    pub min_levels: u32,
    /// Hard cap on doubling levels; exceeding it yields
    /// [`Error::QuadratureNotConverged`] carrying the best estimate.
    pub max_levels: u32,
}

impl<T: Real> Default for QuadratureOptions<T> {
    /// rel_tol 1e-8, min 8 levels (257 nodes), max 22 levels.
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: T::of(1e-8),
            min_levels: 8,
            max_levels: 22,
        }
    }
}

impl<T: Real> QuadratureOptions<T> {
    /// Same limits with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: T) -> Self {
        QuadratureOptions { rel_tol, ..self }
    }
}

/// Composite Simpson integral of uniformly spaced samples with spacing `dx`.
/// Requires an odd sample count >= 3 (an even number of panels) and a
/// positive finite spacing.
pub fn simpson_from_samples<T: Real>(values: &[T], dx: T) -> Result<T> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!(
            "composite Simpson needs an odd sample count >= 3, got {n}"
        )));
    }
    if !(dx > T::zero()) || !dx.is_finite() {
        return Err(Error::invalid(format!(
            "sample spacing must be finite and > 0, got {dx}"
        )));
    }
    let mut odd = T::zero();
    let mut even = T::zero();
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let sum = values[0] + values[n - 1] + T::of(4.0) * odd + T::of(2.0) * even;
    Ok(sum * dx / T::of(3.0))
}

/// Integral of `f` over `[a, b]` (requires `a <= b`) by trapezoid doubling
/// with Romberg extrapolation on the uniform grids.
///
/// Convergence means the relative change between successive Romberg
/// diagonal entries drops to `opts.rel_tol` at or beyond `opts.min_levels`.
/// If `opts.max_levels` doublings do not get there, the call fails with
/// [`Error::QuadratureNotConverged`] reporting the relative change actually
/// achieved; a non-finite integrand value fails immediately.
pub fn integrate_1d<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    opts: &QuadratureOptions<T>,
) -> Result<T> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a > b {
        return Err(Error::invalid(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(T::zero());
    }
    if !(opts.rel_tol > T::zero()) {
        return Err(Error::invalid(format!(
            "relative tolerance must be > 0, got {}",
            opts.rel_tol
        )));
    }
    if opts.max_levels < opts.min_levels.max(1) {
        return Err(Error::invalid(format!(
            "max_levels ({}) must be >= max(min_levels, 1) ({})",
            opts.max_levels,
            opts.min_levels.max(1)
        )));
    }

    let span = b - a;
    let check_finite = |v: T| -> Result<T> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(
                "integrand produced a non-finite value".to_string(),
            ))
        }
    };

    // rows[k][j]: level-k trapezoid (j = 0) and its Richardson columns.
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(opts.max_levels as usize + 1);
    let trap0 = T::of(0.5) * span * (check_finite(f(a))? + check_finite(f(b))?);
    rows.push(vec![trap0]);

    let mut achieved = f64::INFINITY;
    for k in 1..=opts.max_levels {
        let intervals = 1u64 << k;
        let h = span / T::of(intervals as f64);
        let new_points = 1u64 << (k - 1);
        let mut sum = T::zero();
        for i in 0..new_points {
            let x = a + T::of((2 * i + 1) as f64) * h;
            sum += check_finite(f(x))?;
        }
        let trap = T::of(0.5) * rows[(k - 1) as usize][0] + h * sum;

        let mut row = Vec::with_capacity(k as usize + 1);
        row.push(trap);
        let mut pow4 = T::one();
        for j in 1..=(k as usize) {
            pow4 *= T::of(4.0);
            let prev_row = &rows[(k - 1) as usize];
            let extrapolated = (pow4 * row[j - 1] - prev_row[j - 1]) / (pow4 - T::one());
            row.push(extrapolated);
        }

        let diag = row[k as usize];
        let prev_diag = rows[(k - 1) as usize][(k - 1) as usize];
        let change = (diag - prev_diag).abs();
        let tol_ok = change <= opts.rel_tol * diag.abs();
        achieved = if diag == T::zero() && change == T::zero() {
            0.0
        } else {
            (change / diag.abs()).to_f64_lossy()
        };
        rows.push(row);
        if k >= opts.min_levels && tol_ok {
            return Ok(diag);
        }
    }

    Err(Error::QuadratureNotConverged {
        achieved,
        requested: opts.rel_tol.to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_is_exact_on_cubics() {
        // 3 samples of x^3 on [0, 1]: Simpson integrates cubics exactly.
        let values = [0.0_f64, 0.125, 1.0];
        let got = simpson_from_samples(&values, 0.5).unwrap();
        assert_relative_eq!(got, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn simpson_matches_sine_integral_on_default_grid_size() {
        let n = 201;
        let dx = std::f64::consts::PI / (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * dx).sin()).collect();
        let got = simpson_from_samples(&values, dx).unwrap();
        assert_relative_eq!(got, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn simpson_rejects_bad_inputs() {
        assert!(simpson_from_samples(&[1.0_f64, 2.0], 0.1).is_err());
        assert!(simpson_from_samples(&[1.0_f64], 0.1).is_err());
        assert!(simpson_from_samples(&[1.0_f64, 2.0, 3.0, 4.0], 0.1).is_err());
        assert!(simpson_from_samples(&[1.0_f64, 2.0, 3.0], 0.0).is_err());
        assert!(simpson_from_samples(&[1.0_f64, 2.0, 3.0], -0.1).is_err());
    }

    #[test]
    fn romberg_integrates_gaussian_at_femtosecond_scale() {
        // The physical scale this crate integrates at: sigma ~ 1.6 fs.
        let sigma = 1.6e-15_f64;
        let f = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp();
        let got = integrate_1d(f, -8.0 * sigma, 8.0 * sigma, &QuadratureOptions::default())
            .unwrap();
        let exact = sigma * (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(got, exact, max_relative = 1e-8);
    }

    #[test]
    fn romberg_resolves_narrow_valley_in_wide_window() {
        // A unit plateau with one narrow Gaussian notch, window 60 sigma:
        // the configuration a naive adaptive first pass can miss entirely.
        let sigma = 1.6e-15_f64;
        let half = 30.0 * sigma;
        let f = |x: f64| 1.0 - (-x * x / (2.0 * sigma * sigma)).exp();
        let got = integrate_1d(f, -half, half, &QuadratureOptions::default()).unwrap();
        let exact = 2.0 * half - sigma * (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(got, exact, max_relative = 1e-8);
    }

    #[test]
    fn romberg_converges_exactly_on_polynomials() {
        let got = integrate_1d(
            |x: f64| 3.0 * x * x,
            0.0,
            2.0,
            &QuadratureOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(got, 8.0, max_relative = 1e-12);
    }

    #[test]
    fn romberg_handles_zero_integrand_and_empty_interval() {
        let zero = integrate_1d(|_: f64| 0.0, -1.0, 1.0, &QuadratureOptions::default()).unwrap();
        assert_eq!(zero, 0.0);
        let empty = integrate_1d(|x: f64| x.exp(), 1.5, 1.5, &QuadratureOptions::default())
            .unwrap();
        assert_eq!(empty, 0.0);
    }

    #[test]
    fn romberg_reports_nonconvergence_with_achieved_tolerance() {
        let opts = QuadratureOptions {
            rel_tol: 1e-16_f64,
            min_levels: 1,
            max_levels: 3,
        };
        let err = integrate_1d(|x: f64| x.exp(), 0.0, 1.0, &opts).unwrap_err();
        match err {
            Error::QuadratureNotConverged { achieved, requested } => {
                assert!(achieved > requested);
                assert_eq!(requested, 1e-16);
            }
            other => panic!("expected QuadratureNotConverged, got {other:?}"),
        }
    }

    #[test]
    fn romberg_rejects_invalid_bounds_and_nonfinite_integrands() {
        let opts = QuadratureOptions::default();
        assert!(integrate_1d(|x: f64| x, 1.0, 0.0, &opts).is_err());
        assert!(integrate_1d(|x: f64| x, f64::NAN, 1.0, &opts).is_err());
        assert!(integrate_1d(|x: f64| x, 0.0, f64::INFINITY, &opts).is_err());
        assert!(integrate_1d(|x: f64| 1.0 / x, -1.0, 1.0, &opts).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Scaling the integrand scales the integral.
            #[test]
            fn romberg_is_linear_in_the_integrand(alpha in 0.1f64..10.0) {
                let opts = QuadratureOptions::default();
                let base = integrate_1d(|x: f64| x.sin() + 2.0, 0.0, 3.0, &opts).unwrap();
                let scaled =
                    integrate_1d(|x: f64| alpha * (x.sin() + 2.0), 0.0, 3.0, &opts).unwrap();
                prop_assert!((scaled / base - alpha).abs() < 1e-9 * alpha);
            }

            /// Splitting the interval preserves the total.
            #[test]
            fn romberg_is_additive_over_subintervals(mid in 0.1f64..1.9) {
                let opts = QuadratureOptions::default();
                let f = |x: f64| (x * 1.3).cos() + 0.5 * x;
                let whole = integrate_1d(f, 0.0, 2.0, &opts).unwrap();
                let left = integrate_1d(f, 0.0, mid, &opts).unwrap();
                let right = integrate_1d(f, mid, 2.0, &opts).unwrap();
                prop_assert!((left + right - whole).abs() < 1e-8 * whole.abs().max(1.0));
            }
        }
    }
}
