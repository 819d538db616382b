//! Two-photon coincidence model for a Hong-Ou-Mandel interferometer with a
//! dispersive (plasma) arm.
//!
//! A degenerate biphoton source with a Gaussian spectral amplitude of
//! bandwidth `dw` feeds a beam splitter of reflectance R; one path crosses
//! the plasma and lags by `delta_tau_p`, and path b carries a scan delay
//! `delta_tau` plus an optional compensation phase `phi_0`. The second-order
//! coherence kernel at detection-time separation `tau` is
//!
//! ```text
//! G2 = T^2 g^2[x1] + R^2 g^2[x2]
//!      - 2 R T cos((w_pump/2) b tau) g[x1] g[x2],
//! g(x) = exp(-dw^2 x^2 / 2),
//! x1 = (1 - a0) tau - b t - delta_tau_p,
//! x2 = -(1 - a0) tau - b t + (2 - b) delta_tau - delta_tau_p,
//! ```
//!
//! where `a0` and `b` parameterize a plasma whose delay grows linearly in
//! time (`a0 = b = 0` is the steady case). Windowed integration of the
//! kernel over the accumulation/coincidence windows yields the normalized
//! coincidence rate, whose steady closed form is the Gaussian dip
//!
//! ```text
//! R_c = C [1 - V exp(-dw^2 (delta_tau - delta_tau_p)^2)],
//! V   = 2 R T / (R^2 + T^2),
//! ```
//!
//! so tracking the dip center tracks the plasma group delay. The kernel
//! normalization `g(x) = exp(-dw^2 x^2/2)` is chosen so the windowed
//! integral reproduces this exponent with no extra factors.
//!
//! Everything here is a pure function; scans parallelize trivially.

use serde::Serialize;

use crate::chord::{phase_shift, ChordProfile};
use crate::constants::Constants;
use crate::dispersion::{Polarization, ProbeWave};
use crate::error::{Error, Result};
use crate::plasma::PlasmaState;
use crate::quad::{integrate_1d, QuadratureOptions};
use crate::real::Real;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Spectral filter in front of one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Filter<T> {
    /// All-pass (the default).
    Unity,
    /// Gaussian passband of width `sigma` (rad/s), centered on the biphoton
    /// degeneracy frequency.
    Gaussian {
        /// Passband width (rad/s), > 0.
        sigma: T,
    },
}

impl<T: Real> Filter<T> {
    fn validate(&self) -> Result<()> {
        if let Filter::Gaussian { sigma } = self {
            if !(*sigma > T::zero()) || !sigma.is_finite() {
                return Err(Error::invalid(format!(
                    "filter sigma must be finite and > 0 rad/s, got {sigma}"
                )));
            }
        }
        Ok(())
    }

    /// 1/sigma^2 contribution to the effective inverse-square bandwidth.
    fn inverse_square(&self) -> T {
        match self {
            Filter::Unity => T::zero(),
            Filter::Gaussian { sigma } => (*sigma * *sigma).recip(),
        }
    }
}

/// The interferometer: pump, biphoton bandwidth, splitter, scan delay,
/// compensation phase, detector filters, and output normalization.
///
/// Invariants (enforced at construction): 0 <= R <= 1, bandwidth > 0,
/// omega_pump > bandwidth. Transmittance is never stored: T = 1 - R by
/// construction, so R + T = 1 holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometerConfig<T> {
    /// Pump angular frequency omega_pump (rad/s).
    pub omega_pump: T,
    /// Gaussian biphoton bandwidth dw (rad/s).
    pub bandwidth: T,
    /// Beam-splitter reflectance R in [0, 1].
    pub reflectance: T,
    /// Scan delay delta_tau in path b (s).
    pub delta_tau: T,
    /// Compensation phase phi_0 (rad) in path b, folded into the effective
    /// scan delay as 2 phi_0 / omega_pump (an interpretation: the phase
    /// enters at half the pump frequency).
    pub phi_0: T,
    /// Filter in front of detector 1.
    pub filter_1: Filter<T>,
    /// Filter in front of detector 2.
    pub filter_2: Filter<T>,
    /// Overall normalization C of the closed-form rates (default 1,
    /// matching normalized-rate plots).
    pub normalization: T,
}

impl<T: Real> InterferometerConfig<T> {
    /// Config with zero scan delay, no compensation phase, unity filters,
    /// and unit normalization.
    pub fn new(omega_pump: T, bandwidth: T, reflectance: T) -> Result<Self> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(Error::invalid(format!(
                "bandwidth must be finite and > 0 rad/s, got {bandwidth}"
            )));
        }
        if !omega_pump.is_finite() || omega_pump <= bandwidth {
            return Err(Error::invalid(format!(
                "omega_pump must be finite and > bandwidth ({bandwidth} rad/s), \
                 got {omega_pump}"
            )));
        }
        if !reflectance.is_finite() || reflectance < T::zero() || reflectance > T::one() {
            return Err(Error::invalid(format!(
                "reflectance must lie in [0, 1], got {reflectance}"
            )));
        }
        Ok(InterferometerConfig {
            omega_pump,
            bandwidth,
            reflectance,
            delta_tau: T::zero(),
            phi_0: T::zero(),
            filter_1: Filter::Unity,
            filter_2: Filter::Unity,
            normalization: T::one(),
        })
    }

    /// Config from a biphoton pulse width tau0: bandwidth = 2 pi / tau0.
    pub fn from_pulse_width(omega_pump: T, tau0: T, reflectance: T) -> Result<Self> {
        if !(tau0 > T::zero()) || !tau0.is_finite() {
            return Err(Error::invalid(format!(
                "pulse width must be finite and > 0 s, got {tau0}"
            )));
        }
        InterferometerConfig::new(
            omega_pump,
            T::of(2.0) * T::PI() / tau0,
            reflectance,
        )
    }

    /// Beam-splitter transmittance T = 1 - R (never stored, so R + T = 1
    /// holds by construction).
    pub fn transmittance(&self) -> T {
        T::one() - self.reflectance
    }

    /// Dip visibility 2RT/(R^2 + T^2) of this splitter.
    pub fn visibility(&self) -> T {
        visibility(self.reflectance)
    }

    /// Bandwidth after detector filters: 1/dw_eff^2 = 1/dw^2 + sum 1/sigma^2.
    /// Unity filters return the bare bandwidth unchanged (bit for bit).
    pub fn effective_bandwidth(&self) -> T {
        let extra = self.filter_1.inverse_square() + self.filter_2.inverse_square();
        if extra == T::zero() {
            return self.bandwidth;
        }
        ((self.bandwidth * self.bandwidth).recip() + extra)
            .sqrt()
            .recip()
    }

    /// Scan delay with the compensation phase folded in:
    /// delta_tau + 2 phi_0 / omega_pump.
    pub fn effective_delta_tau(&self) -> T {
        self.delta_tau + T::of(2.0) * self.phi_0 / self.omega_pump
    }

    /// The scan delay at which the steady dip bottoms out for a plasma lag
    /// `delta_tau_p`: where the effective delay meets the lag.
    pub fn dip_center(&self, delta_tau_p: T) -> T {
        delta_tau_p - T::of(2.0) * self.phi_0 / self.omega_pump
    }

    /// Same config at a different scan delay.
    pub fn with_delta_tau(mut self, delta_tau: T) -> Result<Self> {
        if !delta_tau.is_finite() {
            return Err(Error::invalid(format!(
                "delta_tau must be finite, got {delta_tau}"
            )));
        }
        self.delta_tau = delta_tau;
        Ok(self)
    }

    /// Same config with a compensation phase.
    pub fn with_phi_0(mut self, phi_0: T) -> Result<Self> {
        if !phi_0.is_finite() {
            return Err(Error::invalid(format!("phi_0 must be finite, got {phi_0}")));
        }
        self.phi_0 = phi_0;
        Ok(self)
    }

    /// Same config with detector filters.
    pub fn with_filters(mut self, filter_1: Filter<T>, filter_2: Filter<T>) -> Result<Self> {
        filter_1.validate()?;
        filter_2.validate()?;
        self.filter_1 = filter_1;
        self.filter_2 = filter_2;
        Ok(self)
    }

    /// Same config with a different closed-form normalization C > 0.
    pub fn with_normalization(mut self, normalization: T) -> Result<Self> {
        if !(normalization > T::zero()) || !normalization.is_finite() {
            return Err(Error::invalid(format!(
                "normalization must be finite and > 0, got {normalization}"
            )));
        }
        self.normalization = normalization;
        Ok(self)
    }
}

/// Dip visibility V = 2RT/(R^2 + T^2) for a splitter of reflectance R
/// (T = 1 - R). Maximal, V = 1, at R = 1/2.
pub fn visibility<T: Real>(reflectance: T) -> T {
    let t = T::one() - reflectance;
    T::of(2.0) * reflectance * t / (reflectance * reflectance + t * t)
}

// ---------------------------------------------------------------------------
// Delay bookkeeping
// ---------------------------------------------------------------------------

/// Plasma group delays of the two interferometer paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayPair<T> {
    /// Delay of path a (s).
    pub tau_p: T,
    /// Delay of path b (s).
    pub tau_p_prime: T,
    /// Differential delay tau_p - tau_p_prime (s), fixed at construction.
    pub delta_tau_p: T,
}

impl<T: Real> DelayPair<T> {
    /// Pair from the two path delays.
    pub fn new(tau_p: T, tau_p_prime: T) -> Result<Self> {
        if !tau_p.is_finite() || !tau_p_prime.is_finite() {
            return Err(Error::invalid(format!(
                "path delays must be finite, got ({tau_p}, {tau_p_prime})"
            )));
        }
        Ok(DelayPair {
            tau_p,
            tau_p_prime,
            delta_tau_p: tau_p - tau_p_prime,
        })
    }

    /// Pair with all of the differential delay on path a.
    pub fn from_differential(delta_tau_p: T) -> Result<Self> {
        DelayPair::new(delta_tau_p, T::zero())
    }
}

/// A plasma whose path delays grow linearly in time,
/// `tau_p(t) = a0 tau + b t + tau_p(0)`: `a0` couples to the detection-time
/// separation, `b` to absolute time. The attenuation factor
/// `B = B_prefactor exp(-pi omega_b^2 b^2 / (4 dw^2 (1 - a0)^2))` damps the
/// dip; `omega_b` is a free rate parameter of that factor (no canonical
/// value is asserted) and `B_prefactor` defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearGrowthModel<T> {
    /// Separation-coupling growth coefficient, |a0| < 1.
    pub a0: T,
    /// Time-coupling growth coefficient, |b| < 2.
    pub b: T,
    /// Path-a delay at t = 0 (s).
    pub tau_p: T,
    /// Path-b delay at t = 0 (s).
    pub tau_p_prime: T,
    /// Rate parameter of the attenuation factor (rad/s), >= 0.
    pub omega_b: T,
    /// Prefactor of the attenuation factor, >= 0 (default 1).
    pub b_prefactor: T,
}

impl<T: Real> LinearGrowthModel<T> {
    /// Model with omega_b = 0 (no attenuation) and unit prefactor.
    pub fn new(a0: T, b: T, tau_p: T, tau_p_prime: T) -> Result<Self> {
        if !a0.is_finite() || a0.abs() >= T::one() {
            return Err(Error::invalid(format!("|a0| must be < 1, got {a0}")));
        }
        if !b.is_finite() || b.abs() >= T::of(2.0) {
            return Err(Error::invalid(format!("|b| must be < 2, got {b}")));
        }
        if !tau_p.is_finite() || !tau_p_prime.is_finite() {
            return Err(Error::invalid(format!(
                "path delays must be finite, got ({tau_p}, {tau_p_prime})"
            )));
        }
        Ok(LinearGrowthModel {
            a0,
            b,
            tau_p,
            tau_p_prime,
            omega_b: T::zero(),
            b_prefactor: T::one(),
        })
    }

    /// Steady plasma (a0 = b = 0) with the given path delays.
    pub fn steady(delays: &DelayPair<T>) -> Self {
        LinearGrowthModel {
            a0: T::zero(),
            b: T::zero(),
            tau_p: delays.tau_p,
            tau_p_prime: delays.tau_p_prime,
            omega_b: T::zero(),
            b_prefactor: T::one(),
        }
    }

    /// Same model with an attenuation rate parameter.
    pub fn with_omega_b(mut self, omega_b: T) -> Result<Self> {
        if !(omega_b >= T::zero()) || !omega_b.is_finite() {
            return Err(Error::invalid(format!(
                "omega_b must be finite and >= 0, got {omega_b}"
            )));
        }
        self.omega_b = omega_b;
        Ok(self)
    }

    /// Same model with an attenuation prefactor.
    pub fn with_b_prefactor(mut self, b_prefactor: T) -> Result<Self> {
        if !(b_prefactor >= T::zero()) || !b_prefactor.is_finite() {
            return Err(Error::invalid(format!(
                "b_prefactor must be finite and >= 0, got {b_prefactor}"
            )));
        }
        self.b_prefactor = b_prefactor;
        Ok(self)
    }

    /// Differential delay at t = 0 (s).
    pub fn delta_tau_p(&self) -> T {
        self.tau_p - self.tau_p_prime
    }

    /// The t = 0 delays as a pair.
    pub fn delays(&self) -> DelayPair<T> {
        DelayPair {
            tau_p: self.tau_p,
            tau_p_prime: self.tau_p_prime,
            delta_tau_p: self.delta_tau_p(),
        }
    }
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

/// The Gaussian coherence kernel g(x) = exp(-bandwidth^2 x^2 / 2).
/// g(0) = 1 and g(1/bandwidth) = e^(-1/2); the square integrates to
/// sqrt(pi)/bandwidth, the baseline used to normalize windowed rates.
pub fn gaussian_kernel<T: Real>(x: T, bandwidth: T) -> T {
    let u = bandwidth * x;
    (-u * u / T::of(2.0)).exp()
}

/// Shared kernel evaluation; `g2_steady` is exactly this at a0 = b = 0, so
/// the linear-growth kernel reduces to the steady one bit for bit.
fn g2_eval<T: Real>(
    cfg: &InterferometerConfig<T>,
    a0: T,
    b: T,
    t: T,
    tau: T,
    delta_tau_p: T,
) -> T {
    let dw = cfg.effective_bandwidth();
    let dte = cfg.effective_delta_tau();
    let one_minus_a0 = T::one() - a0;
    let x1 = (one_minus_a0 * tau - b * t) - delta_tau_p;
    let x2 = (-one_minus_a0 * tau - b * t) + (T::of(2.0) - b) * dte - delta_tau_p;
    let g1 = gaussian_kernel(x1, dw);
    let g2 = gaussian_kernel(x2, dw);
    let r = cfg.reflectance;
    let tt = cfg.transmittance();
    // T^2 g1^2 + R^2 g2^2 - 2 R T cos(theta) g1 g2, regrouped as a perfect
    // square plus a half-angle remainder so the result is nonnegative by
    // construction: (T g1 - R g2)^2 + 4 R T sin^2(theta/2) g1 g2.
    let amp = tt * g1 - r * g2;
    let half_angle = cfg.omega_pump * b * tau / T::of(4.0);
    let s = half_angle.sin();
    amp * amp + T::of(4.0) * r * tt * (s * s) * g1 * g2
}

/// Steady-plasma coincidence kernel at detection-time separation `tau`:
/// T^2 g^2[tau - dtp] + R^2 g^2[-tau + 2 dte - dtp]
/// - 2RT g[tau - dtp] g[-tau + 2 dte - dtp]. Nonnegative; zero at the
/// balanced-splitter interference point.
pub fn g2_steady<T: Real>(
    tau: T,
    cfg: &InterferometerConfig<T>,
    delays: &DelayPair<T>,
) -> T {
    g2_eval(
        cfg,
        T::zero(),
        T::zero(),
        T::zero(),
        tau,
        delays.delta_tau_p,
    )
}

/// Linear-growth coincidence kernel at absolute time `t` and separation
/// `tau`; reduces bit for bit to [`g2_steady`] at a0 = b = 0.
pub fn g2_linear_growth<T: Real>(
    t: T,
    tau: T,
    cfg: &InterferometerConfig<T>,
    lg: &LinearGrowthModel<T>,
) -> T {
    g2_eval(cfg, lg.a0, lg.b, t, tau, lg.delta_tau_p())
}

// ---------------------------------------------------------------------------
// Closed-form rates
// ---------------------------------------------------------------------------

fn dip_value<T: Real>(normalization: T, factor: T, envelope: T) -> T {
    normalization * (T::one() - factor * envelope)
}

/// Steady-plasma normalized coincidence rate at the config's scan delay:
/// C [1 - V exp(-dw^2 (delta_tau_eff - delta_tau_p)^2)]. The minimum C(1-V)
/// sits exactly where the effective scan delay equals the plasma lag, and
/// the 1/e half-width in scan delay is 1/dw.
pub fn rc_steady<T: Real>(cfg: &InterferometerConfig<T>, delta_tau_p: T) -> T {
    let dw = cfg.effective_bandwidth();
    let arg = cfg.effective_delta_tau() - delta_tau_p;
    let u = dw * arg;
    dip_value(cfg.normalization, cfg.visibility(), (-(u * u)).exp())
}

/// Linear-growth normalized coincidence rate at absolute time `t`:
///
/// ```text
/// C [1 - V B cos((w_pump/2)(b - b^2/2) dte / (1 - a0))
///        exp(-dw^2 ((1 - b/2) dte - b t - delta_tau_p)^2)],
/// B = B_prefactor exp(-pi omega_b^2 b^2 / (4 dw^2 (1 - a0)^2)).
/// ```
///
/// Reduces bit for bit to [`rc_steady`] at a0 = b = 0 (with unit
/// prefactor). The dip center drifts in scan delay at d(dte)/dt =
/// b/(1 - b/2); see [`linear_growth_dip_slope`].
pub fn rc_linear_growth<T: Real>(
    cfg: &InterferometerConfig<T>,
    lg: &LinearGrowthModel<T>,
    t: T,
) -> T {
    let dw = cfg.effective_bandwidth();
    let dte = cfg.effective_delta_tau();
    let one_minus_a0 = T::one() - lg.a0;
    let half_pump = cfg.omega_pump / T::of(2.0);
    let cosine = (half_pump * (lg.b - lg.b * lg.b / T::of(2.0)) * dte / one_minus_a0).cos();
    let q = lg.omega_b * lg.b / (T::of(2.0) * dw * one_minus_a0);
    let attenuation = lg.b_prefactor * (-(T::PI() * q * q)).exp();
    let arg = ((T::one() - lg.b / T::of(2.0)) * dte - lg.b * t) - lg.delta_tau_p();
    let u = dw * arg;
    dip_value(
        cfg.normalization,
        (cfg.visibility() * attenuation) * cosine,
        (-(u * u)).exp(),
    )
}

/// Drift rate of the dip center in scan delay per unit absolute time for a
/// linear-growth plasma: b / (1 - b/2).
pub fn linear_growth_dip_slope<T: Real>(b: T) -> T {
    b / (T::one() - b / T::of(2.0))
}

/// Wide-window steady baseline of the windowed rate, away from the dip:
/// sqrt(pi)/dw_eff * (R^2 + T^2). Dividing [`rc_windowed`] of the steady
/// kernel by this reproduces [`rc_steady`] with C = 1.
pub fn steady_baseline<T: Real>(cfg: &InterferometerConfig<T>) -> T {
    let dw = cfg.effective_bandwidth();
    let r = cfg.reflectance;
    let t = cfg.transmittance();
    T::PI().sqrt() / dw * (r * r + t * t)
}

// ---------------------------------------------------------------------------
// Windowed rate
// ---------------------------------------------------------------------------

/// Detection accumulation and coincidence windows. A pair is a coincidence
/// when |t2 - t1| <= coincidence_width / 2 (top-hat of full width
/// `coincidence_width`), and first-photon times are accumulated over
/// `accumulation_time` around `accumulation_center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceWindow<T> {
    /// Accumulation span S0 (s), > 0.
    pub accumulation_time: T,
    /// Full coincidence width (s), >= 0.
    pub coincidence_width: T,
    /// Center of the accumulation span (s), default 0.
    pub accumulation_center: T,
}

impl<T: Real> CoincidenceWindow<T> {
    /// Window centered at t = 0.
    pub fn new(accumulation_time: T, coincidence_width: T) -> Result<Self> {
        if !(accumulation_time > T::zero()) || !accumulation_time.is_finite() {
            return Err(Error::invalid(format!(
                "accumulation_time must be finite and > 0 s, got {accumulation_time}"
            )));
        }
        if !(coincidence_width >= T::zero()) || !coincidence_width.is_finite() {
            return Err(Error::invalid(format!(
                "coincidence_width must be finite and >= 0 s, got {coincidence_width}"
            )));
        }
        Ok(CoincidenceWindow {
            accumulation_time,
            coincidence_width,
            accumulation_center: T::zero(),
        })
    }

    /// Same window at a different accumulation center.
    pub fn with_center(mut self, center: T) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid(format!(
                "accumulation_center must be finite, got {center}"
            )));
        }
        self.accumulation_center = center;
        Ok(self)
    }

    /// Top-hat coincidence test on a detection pair (boundary inclusive).
    pub fn is_coincidence(&self, t1: T, t2: T) -> bool {
        (t2 - t1).abs() <= self.coincidence_width / T::of(2.0)
    }
}

/// Windowed coincidence rate of an arbitrary kernel `g2(t, tau)`:
///
/// ```text
/// (1/S0) * integral_{t in S0} integral_{|tau| <= width/2} g2(t, tau) dtau dt
/// ```
///
/// i.e. the two-detector double integral reduced to first-photon time t and
/// separation tau (unit Jacobian), with the top-hat coincidence function
/// realized as the tau bounds. Nested uniform-grid Romberg quadrature at the
/// given tolerance; non-convergence surfaces as
/// [`Error::QuadratureNotConverged`] with the achieved tolerance.
pub fn rc_windowed<T: Real>(
    g2: impl Fn(T, T) -> T,
    window: &CoincidenceWindow<T>,
    opts: &QuadratureOptions<T>,
) -> Result<T> {
    if window.coincidence_width == T::zero() {
        return Ok(T::zero());
    }
    let half_tau = window.coincidence_width / T::of(2.0);
    let half_acc = window.accumulation_time / T::of(2.0);
    let t_lo = window.accumulation_center - half_acc;
    let t_hi = window.accumulation_center + half_acc;

    let inner_failure = std::cell::RefCell::new(None);
    let outer = integrate_1d(
        |t| match integrate_1d(|tau| g2(t, tau), -half_tau, half_tau, opts) {
            Ok(v) => v,
            Err(e) => {
                *inner_failure.borrow_mut() = Some(e);
                T::nan()
            }
        },
        t_lo,
        t_hi,
        opts,
    );
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    Ok(outer? / window.accumulation_time)
}

// ---------------------------------------------------------------------------
// Dip curves
// ---------------------------------------------------------------------------

/// A coincidence-dip scan: normalized rate versus scan delay, with the
/// closed-form parameters that generated (or should describe) it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipCurve<T> {
    /// (scan delay delta_tau in s, normalized rate) samples.
    pub samples: Vec<(T, T)>,
    /// Closed-form normalization C.
    pub normalization: T,
    /// Splitter visibility V = 2RT/(R^2+T^2).
    pub visibility: T,
    /// Scan delay of the dip minimum (s).
    pub dip_center: T,
    /// Gaussian width parameter of the dip (rad/s): the rate is
    /// 1/e of full depth at |delta_tau - dip_center| = 1/width_param.
    pub width_param: T,
}

impl<T: Real> DipCurve<T> {
    /// Sample with the smallest rate, if any.
    pub fn min_point(&self) -> Option<(T, T)> {
        self.samples
            .iter()
            .copied()
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("rates must be comparable"))
    }

    /// The closed-form floor C(1 - V) every noiseless sample respects.
    pub fn floor(&self) -> T {
        self.normalization * (T::one() - self.visibility)
    }
}

/// Closed-form steady dip sampled on a scan-delay grid.
pub fn steady_dip_curve<T: Real>(
    cfg: &InterferometerConfig<T>,
    delta_tau_p: T,
    delta_taus: &[T],
) -> Result<DipCurve<T>> {
    let mut samples = Vec::with_capacity(delta_taus.len());
    for &dt in delta_taus {
        let point_cfg = cfg.with_delta_tau(dt)?;
        samples.push((dt, rc_steady(&point_cfg, delta_tau_p)));
    }
    Ok(DipCurve {
        samples,
        normalization: cfg.normalization,
        visibility: cfg.visibility(),
        dip_center: cfg.dip_center(delta_tau_p),
        width_param: cfg.effective_bandwidth(),
    })
}

// ---------------------------------------------------------------------------
// Path configurations
// ---------------------------------------------------------------------------

/// Which circular modes the two interferometer paths send through the
/// plasma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathConfiguration {
    /// Path a carries the R mode through the plasma; path b is a
    /// non-dispersive reference.
    SingleR,
    /// Path a carries the L mode; path b is a reference.
    SingleL,
    /// Both paths carry the R mode: common-mode, zero differential.
    DoubleSymmetricR,
    /// Both paths carry the L mode.
    DoubleSymmetricL,
    /// Path a carries R, path b carries L: the differential is the
    /// birefringent (Faraday-like) phase.
    DoubleAntisymmetric,
}

/// Plasma-induced phases and delays of the two paths. Phases are relative
/// to vacuum propagation (omega * delta_tau_p, negative for a tenuous
/// plasma); a reference path gets exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPhases<T> {
    /// Plasma-induced phase of path a (rad).
    pub phase_a: T,
    /// Plasma-induced phase of path b (rad).
    pub phase_b: T,
    /// phase_a - phase_b (rad).
    pub differential: T,
    /// Plasma group delay of path a (s).
    pub delay_a: T,
    /// Plasma group delay of path b (s).
    pub delay_b: T,
    /// delay_a - delay_b (s): the delta_tau_p the interferometer sees.
    pub differential_delay: T,
}

/// Chord-integrated plasma phases for a path configuration. Symmetric
/// double configurations evaluate the chord once and report a differential
/// of exactly zero; the antisymmetric configuration reports the R-L
/// birefringent phase.
pub fn path_config_phase<T: Real>(
    mode: PathConfiguration,
    state: &PlasmaState<T>,
    wave: &ProbeWave<T>,
    chord: &ChordProfile<T>,
) -> Result<PathPhases<T>> {
    let eval = |pol: Polarization| -> Result<(T, T)> {
        let pr = phase_shift(
            state,
            &ProbeWave {
                omega: wave.omega,
                polarization: pol,
            },
            chord,
        )?;
        Ok((wave.omega * pr.delta_tau_p, pr.delta_tau_p))
    };

    let ((phase_a, delay_a), (phase_b, delay_b)) = match mode {
        PathConfiguration::SingleR => (eval(Polarization::R)?, (T::zero(), T::zero())),
        PathConfiguration::SingleL => (eval(Polarization::L)?, (T::zero(), T::zero())),
        PathConfiguration::DoubleSymmetricR => {
            let a = eval(Polarization::R)?;
            (a, a)
        }
        PathConfiguration::DoubleSymmetricL => {
            let a = eval(Polarization::L)?;
            (a, a)
        }
        PathConfiguration::DoubleAntisymmetric => {
            (eval(Polarization::R)?, eval(Polarization::L)?)
        }
    };

    Ok(PathPhases {
        phase_a,
        phase_b,
        differential: phase_a - phase_b,
        delay_a,
        delay_b,
        differential_delay: delay_a - delay_b,
    })
}

// ---------------------------------------------------------------------------
// Sensitivity limits
// ---------------------------------------------------------------------------

/// Phase-sensitivity scaling law: phi_min = k0 (eta N)^alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalingLaw {
    /// Shot-noise scaling, alpha = -1/2.
    StandardQuantumLimit,
    /// Heisenberg scaling, alpha = -1.
    Heisenberg,
}

impl ScalingLaw {
    /// The exponent alpha.
    pub fn alpha(self) -> f64 {
        match self {
            ScalingLaw::StandardQuantumLimit => -0.5,
            ScalingLaw::Heisenberg => -1.0,
        }
    }

    /// (eta N)^alpha, via sqrt/recip so round powers stay exact.
    fn attenuation<T: Real>(self, eta_n: T) -> T {
        match self {
            ScalingLaw::StandardQuantumLimit => eta_n.sqrt().recip(),
            ScalingLaw::Heisenberg => eta_n.recip(),
        }
    }

    /// (eta N)^(-alpha), the factor converting a measured phase into k0.
    fn amplification<T: Real>(self, eta_n: T) -> T {
        match self {
            ScalingLaw::StandardQuantumLimit => eta_n.sqrt(),
            ScalingLaw::Heisenberg => eta_n,
        }
    }
}

/// Inputs of a phase-sensitivity-limit evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityQuery<T> {
    /// Frequency converting phase to delay (rad/s).
    pub omega: T,
    /// Detection efficiency eta in (0, 1].
    pub eta: T,
    /// Photon number N.
    pub photon_number: T,
    /// Scaling law (exponent alpha).
    pub law: ScalingLaw,
    /// Sensitivity prefactor k0 > 0.
    pub k0: T,
}

impl<T: Real> SensitivityQuery<T> {
    /// Validated query; requires eta N >= 1.
    pub fn new(omega: T, eta: T, photon_number: T, law: ScalingLaw, k0: T) -> Result<Self> {
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::invalid(format!(
                "omega must be finite and > 0, got {omega}"
            )));
        }
        if !(eta > T::zero()) || eta > T::one() {
            return Err(Error::invalid(format!(
                "eta must lie in (0, 1], got {eta}"
            )));
        }
        if !(photon_number > T::zero()) || !photon_number.is_finite() {
            return Err(Error::invalid(format!(
                "photon_number must be finite and > 0, got {photon_number}"
            )));
        }
        if !(k0 > T::zero()) || !k0.is_finite() {
            return Err(Error::invalid(format!(
                "k0 must be finite and > 0, got {k0}"
            )));
        }
        if eta * photon_number < T::one() {
            return Err(Error::invalid(format!(
                "eta * N must be >= 1, got {}",
                eta * photon_number
            )));
        }
        Ok(SensitivityQuery {
            omega,
            eta,
            photon_number,
            law,
            k0,
        })
    }
}

/// Minimum resolvable phase, delay, and equivalent path length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityLimit<T> {
    /// phi_min = k0 (eta N)^alpha (rad).
    pub phi_min: T,
    /// tau_min = phi_min / omega (s).
    pub tau_min: T,
    /// length_min = c tau_min (m).
    pub length_min: T,
}

/// Evaluates the sensitivity limit phi_min = k0 (eta N)^alpha and its
/// delay/length equivalents.
pub fn sensitivity_limit<T: Real>(q: &SensitivityQuery<T>) -> SensitivityLimit<T> {
    let phi_min = q.k0 * q.law.attenuation(q.eta * q.photon_number);
    let tau_min = phi_min / q.omega;
    SensitivityLimit {
        phi_min,
        tau_min,
        length_min: Constants::<T>::si().c * tau_min,
    }
}

/// The k0 a measured phase implies under a scaling law:
/// k0 = Phi (eta N)^(-alpha).
pub fn implied_k0<T: Real>(phi: T, eta: T, photon_number: T, law: ScalingLaw) -> Result<T> {
    if !phi.is_finite() {
        return Err(Error::invalid(format!("phase must be finite, got {phi}")));
    }
    if !(eta > T::zero()) || eta > T::one() {
        return Err(Error::invalid(format!("eta must lie in (0, 1], got {eta}")));
    }
    if !(photon_number > T::zero()) || !photon_number.is_finite() {
        return Err(Error::invalid(format!(
            "photon_number must be finite and > 0, got {photon_number}"
        )));
    }
    let eta_n = eta * photon_number;
    if eta_n < T::one() {
        return Err(Error::invalid(format!(
            "eta * N must be >= 1, got {eta_n}"
        )));
    }
    Ok(phi * law.amplification(eta_n))
}
