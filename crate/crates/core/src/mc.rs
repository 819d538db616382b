//! Monte Carlo photon-pair generation and coincidence counting.
//!
//! Detection-time separations are drawn from the normalized steady
//! coincidence kernel by tabulated inverse-CDF sampling; first-photon times
//! are uniform over the accumulation window. At each scan delay the number
//! of generated pairs is Poisson with mean proportional to the kernel's
//! integrated rate, so counted coincidences carry honest Poisson statistics
//! and their mean traces the closed-form dip. Everything is reproducible
//! bit for bit from a single master seed: scan points derive per-point
//! seeds through a SplitMix64 hash of the point index, making results
//! independent of thread count and schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::biphoton::{
    g2_steady, steady_baseline, CoincidenceWindow, DelayPair, DipCurve, InterferometerConfig,
};
use crate::error::{Error, Result};
use crate::quad::{integrate_1d, QuadratureOptions};
use crate::real::Real;

/// Nodes in the tabulated separation CDF.
pub const SEPARATION_GRID_NODES: usize = 8192;
/// Half-span of the separation grid beyond the outermost kernel peak, in
/// units of 1/bandwidth; exp(-8^2/2) leaves no measurable truncated mass.
pub const SEPARATION_GRID_SPAN: f64 = 8.0;
/// Smallest pairs-per-point budget a scan accepts.
pub const MIN_PAIRS_PER_POINT: u64 = 100;

/// SplitMix64 finalizer (public-domain constants), used to derive
/// decorrelated per-point seeds from a master seed.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of scan point `index` under master seed `master`.
fn point_seed(master: u64, index: usize) -> u64 {
    splitmix64(master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

// ---------------------------------------------------------------------------
// Separation sampler
// ---------------------------------------------------------------------------

/// Tabulated inverse-CDF sampler for detection-time separations.
///
/// The density is tabulated on a uniform grid, integrated by the trapezoid
/// rule into a piecewise-linear CDF, and inverted by binary search with
/// linear interpolation. Sampling therefore follows the tabulated CDF
/// exactly (up to the grid's O(h^2) density discretization).
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationSampler<T> {
    grid: Vec<T>,
    cdf: Vec<T>,
    total_mass: T,
}

impl<T: Real> SeparationSampler<T> {
    /// Sampler for the steady kernel of `cfg` at its scan delay: the grid
    /// covers both coherence peaks plus [`SEPARATION_GRID_SPAN`]/bandwidth
    /// of margin, with [`SEPARATION_GRID_NODES`] nodes.
    pub fn for_steady(cfg: &InterferometerConfig<T>, delays: &DelayPair<T>) -> Result<Self> {
        let dw = cfg.effective_bandwidth();
        let margin = T::of(SEPARATION_GRID_SPAN) / dw;
        let peak_1 = delays.delta_tau_p;
        let peak_2 = T::of(2.0) * cfg.effective_delta_tau() - delays.delta_tau_p;
        let lo = peak_1.min(peak_2) - margin;
        let hi = peak_1.max(peak_2) + margin;
        SeparationSampler::tabulate(
            |tau| g2_steady(tau, cfg, delays),
            lo,
            hi,
            SEPARATION_GRID_NODES,
        )
    }

    /// Sampler for an arbitrary nonnegative density on [lo, hi].
    pub fn tabulate(density: impl Fn(T) -> T, lo: T, hi: T, nodes: usize) -> Result<Self> {
        if nodes < 16 {
            return Err(Error::invalid(format!(
                "separation grid needs at least 16 nodes, got {nodes}"
            )));
        }
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::invalid(format!(
                "separation grid bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        let dx = (hi - lo) / T::of((nodes - 1) as f64);
        let mut grid = Vec::with_capacity(nodes);
        let mut values = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let x = lo + dx * T::of(i as f64);
            let f = density(x);
            if !f.is_finite() || f < T::zero() {
                return Err(Error::invalid(format!(
                    "separation density must be finite and >= 0, got {f} at {x}"
                )));
            }
            grid.push(x);
            values.push(f);
        }
        let mut cdf = Vec::with_capacity(nodes);
        cdf.push(T::zero());
        let half = T::of(0.5);
        for i in 1..nodes {
            let inc = half * (values[i - 1] + values[i]) * dx;
            let prev = cdf[i - 1];
            cdf.push(prev + inc);
        }
        let total_mass = cdf[nodes - 1];
        if !(total_mass > T::zero()) {
            return Err(Error::invalid(
                "separation density integrates to zero over the grid".to_string(),
            ));
        }
        for c in cdf.iter_mut() {
            *c = *c / total_mass;
        }
        cdf[nodes - 1] = T::one();
        Ok(SeparationSampler {
            grid,
            cdf,
            total_mass,
        })
    }

    /// Un-normalized integral of the density over the grid.
    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    /// Grid support [lo, hi].
    pub fn support(&self) -> (T, T) {
        (self.grid[0], *self.grid.last().expect("non-empty grid"))
    }

    /// Tabulated CDF, clamped to [0, 1] outside the grid.
    pub fn cdf(&self, x: T) -> T {
        if x <= self.grid[0] {
            return T::zero();
        }
        if x >= *self.grid.last().expect("non-empty grid") {
            return T::one();
        }
        let idx = self.grid.partition_point(|&g| g <= x);
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }

    /// One separation draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u = T::of(rng.random::<f64>());
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.grid[0];
        }
        if idx >= self.cdf.len() {
            return *self.grid.last().expect("non-empty grid");
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        // partition_point guarantees c0 < u <= c1, so the span is nonzero.
        let frac = (u - c0) / (c1 - c0);
        self.grid[idx - 1] + (self.grid[idx] - self.grid[idx - 1]) * frac
    }
}

// ---------------------------------------------------------------------------
// Event batches
// ---------------------------------------------------------------------------

/// A reproducible batch of detection pairs (t1, t2).
///
/// The first `n_pairs` entries are signal pairs; any remainder are
/// accidentals drawn at `accidental_rate`. Identical inputs (including the
/// seed) reproduce the batch bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventBatch<T> {
    /// Detection-time pairs (t1_s, t2_s).
    pub pair_times: Vec<(T, T)>,
    /// Seed that generated the batch.
    pub seed: u64,
    /// Signal pairs at the start of `pair_times`.
    pub n_pairs: usize,
    /// Accidental-coincidence rate (pairs per second of accumulation).
    pub accidental_rate: T,
}

fn draw_signal_pairs<T: Real>(
    sampler: &SeparationSampler<T>,
    n: usize,
    window: &CoincidenceWindow<T>,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(T, T)>,
) {
    let t_lo = window.accumulation_center - window.accumulation_time / T::of(2.0);
    for _ in 0..n {
        let tau = sampler.sample(rng);
        let t1 = t_lo + T::of(rng.random::<f64>()) * window.accumulation_time;
        out.push((t1, t1 + tau));
    }
}

fn draw_accidentals<T: Real>(
    accidental_rate: T,
    window: &CoincidenceWindow<T>,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(T, T)>,
) -> Result<()> {
    let lambda = (accidental_rate * window.accumulation_time).to_f64_lossy();
    if lambda <= 0.0 {
        return Ok(());
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::invalid(format!("accidental rate draw failed: {e}")))?;
    let k = dist.sample(rng) as usize;
    let t_lo = window.accumulation_center - window.accumulation_time / T::of(2.0);
    let half = T::of(0.5);
    for _ in 0..k {
        let t1 = t_lo + T::of(rng.random::<f64>()) * window.accumulation_time;
        let tau = (T::of(rng.random::<f64>()) - half) * window.coincidence_width;
        out.push((t1, t1 + tau));
    }
    Ok(())
}

/// Draws exactly `n` signal pairs (no accidentals): separations from the
/// normalized steady kernel, first-photon times uniform over the
/// accumulation window. `n = 0` yields an empty batch.
pub fn sample_pair_separations<T: Real>(
    n: usize,
    cfg: &InterferometerConfig<T>,
    delays: &DelayPair<T>,
    window: &CoincidenceWindow<T>,
    seed: u64,
) -> Result<EventBatch<T>> {
    sample_event_batch(n, cfg, delays, window, T::zero(), seed)
}

/// Draws `n` signal pairs plus Poisson(rate * accumulation_time)
/// accidentals, the latter uniform in separation across the coincidence
/// window.
pub fn sample_event_batch<T: Real>(
    n: usize,
    cfg: &InterferometerConfig<T>,
    delays: &DelayPair<T>,
    window: &CoincidenceWindow<T>,
    accidental_rate: T,
    seed: u64,
) -> Result<EventBatch<T>> {
    if !(accidental_rate >= T::zero()) || !accidental_rate.is_finite() {
        return Err(Error::invalid(format!(
            "accidental_rate must be finite and >= 0, got {accidental_rate}"
        )));
    }
    let sampler = SeparationSampler::for_steady(cfg, delays)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pair_times = Vec::with_capacity(n);
    draw_signal_pairs(&sampler, n, window, &mut rng, &mut pair_times);
    draw_accidentals(accidental_rate, window, &mut rng, &mut pair_times)?;
    Ok(EventBatch {
        pair_times,
        seed,
        n_pairs: n,
        accidental_rate,
    })
}

/// Pairs in the batch whose separation passes the top-hat coincidence test
/// (|t2 - t1| <= width/2, boundary inclusive).
pub fn count_coincidences<T: Real>(batch: &EventBatch<T>, window: &CoincidenceWindow<T>) -> u64 {
    batch
        .pair_times
        .iter()
        .filter(|&&(t1, t2)| window.is_coincidence(t1, t2))
        .count() as u64
}

// ---------------------------------------------------------------------------
// Dip scans
// ---------------------------------------------------------------------------

/// Counted and expected coincidences at one scan delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountPoint<T> {
    /// Scan delay (s).
    pub delta_tau: T,
    /// Coincidences counted in the window.
    pub counted: u64,
    /// Expected count: pairs_per_point * windowed mass / steady baseline,
    /// plus the mean accidental count.
    pub expected: T,
}

/// A full Monte Carlo dip scan in count units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceCounts<T> {
    /// One entry per scan delay, in grid order.
    pub points: Vec<CountPoint<T>>,
    /// The window the counts were taken in.
    pub window: CoincidenceWindow<T>,
    /// Pair budget per scan point.
    pub pairs_per_point: u64,
}

/// Monte Carlo coincidence-dip scan over a strictly increasing scan-delay
/// grid.
///
/// At each delay the pair number is Poisson with mean
/// `pairs_per_point * kernel mass / steady baseline`, separations follow
/// the normalized kernel, and counting applies the top-hat window, so
/// `counted` is Poisson-distributed around `expected`. Returns the
/// normalized curve (counted / pairs_per_point versus delay) alongside the
/// raw counts. Scan points are processed in parallel; per-point seeds come
/// from the master seed and the point index only, so results do not depend
/// on thread count.
pub fn mc_dip_scan<T: Real>(
    cfg: &InterferometerConfig<T>,
    delays: &DelayPair<T>,
    delta_taus: &[T],
    pairs_per_point: u64,
    window: &CoincidenceWindow<T>,
    accidental_rate: T,
    seed: u64,
) -> Result<(DipCurve<T>, CoincidenceCounts<T>)> {
    if pairs_per_point < MIN_PAIRS_PER_POINT {
        return Err(Error::invalid(format!(
            "pairs_per_point must be >= {MIN_PAIRS_PER_POINT}, got {pairs_per_point}"
        )));
    }
    if delta_taus.is_empty() {
        return Err(Error::invalid("scan grid must be non-empty".to_string()));
    }
    for pair in delta_taus.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::invalid(format!(
                "scan grid must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if !(accidental_rate >= T::zero()) || !accidental_rate.is_finite() {
        return Err(Error::invalid(format!(
            "accidental_rate must be finite and >= 0, got {accidental_rate}"
        )));
    }

    let quad_opts = QuadratureOptions::default();
    let half_width = window.coincidence_width / T::of(2.0);
    let mean_accidentals = accidental_rate * window.accumulation_time;

    let points: Vec<(T, CountPoint<T>)> = delta_taus
        .par_iter()
        .enumerate()
        .map(|(i, &delta_tau)| -> Result<(T, CountPoint<T>)> {
            let point_cfg = cfg.with_delta_tau(delta_tau)?;
            let sampler = SeparationSampler::for_steady(&point_cfg, delays)?;
            let baseline = steady_baseline(&point_cfg);
            let lambda =
                (T::of(pairs_per_point as f64) * sampler.total_mass() / baseline).to_f64_lossy();
            let dist = Poisson::new(lambda)
                .map_err(|e| Error::invalid(format!("pair number draw failed: {e}")))?;

            let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, i));
            let n_signal = dist.sample(&mut rng) as usize;
            let mut pair_times = Vec::with_capacity(n_signal);
            draw_signal_pairs(&sampler, n_signal, window, &mut rng, &mut pair_times);
            draw_accidentals(accidental_rate, window, &mut rng, &mut pair_times)?;
            let batch = EventBatch {
                pair_times,
                seed: point_seed(seed, i),
                n_pairs: n_signal,
                accidental_rate,
            };
            let counted = count_coincidences(&batch, window);

            let windowed_mass = if window.coincidence_width == T::zero() {
                T::zero()
            } else {
                integrate_1d(
                    |tau| g2_steady(tau, &point_cfg, delays),
                    -half_width,
                    half_width,
                    &quad_opts,
                )?
            };
            let expected =
                T::of(pairs_per_point as f64) * windowed_mass / baseline + mean_accidentals;

            let normalized = T::of(counted as f64) / T::of(pairs_per_point as f64);
            Ok((
                normalized,
                CountPoint {
                    delta_tau,
                    counted,
                    expected,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let samples = delta_taus
        .iter()
        .zip(points.iter())
        .map(|(&dt, (normalized, _))| (dt, *normalized))
        .collect();
    let curve = DipCurve {
        samples,
        normalization: cfg.normalization,
        visibility: cfg.visibility(),
        dip_center: cfg.dip_center(delays.delta_tau_p),
        width_param: cfg.effective_bandwidth(),
    };
    let counts = CoincidenceCounts {
        points: points.into_iter().map(|(_, p)| p).collect(),
        window: *window,
        pairs_per_point,
    };
    Ok((curve, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// 2 pi / 10 fs.
    const BANDWIDTH_10FS: f64 = 6.283185307179586e14;
    const OMEGA_PUMP_1UM: f64 = 3.7673031346177064e15;

    fn reference_config() -> InterferometerConfig<f64> {
        InterferometerConfig::from_pulse_width(OMEGA_PUMP_1UM, 1e-14, 0.45).unwrap()
    }

    fn wide_window() -> CoincidenceWindow<f64> {
        CoincidenceWindow::new(10.0 / BANDWIDTH_10FS, 60.0 / BANDWIDTH_10FS).unwrap()
    }

    mod sampler {
        use super::*;

        #[test]
        fn rejects_degenerate_tabulations() {
            assert!(SeparationSampler::tabulate(|_| 1.0, 0.0, 1.0, 4).is_err());
            assert!(SeparationSampler::tabulate(|_| 1.0, 1.0, 1.0, 64).is_err());
            assert!(SeparationSampler::tabulate(|_| 0.0, 0.0, 1.0, 64).is_err());
            assert!(SeparationSampler::tabulate(|_| -1.0, 0.0, 1.0, 64).is_err());
            assert!(SeparationSampler::tabulate(|_| f64::NAN, 0.0, 1.0, 64).is_err());
        }

        #[test]
        fn grid_covers_both_coherence_peaks() {
            let dtp = 2e-15;
            let scan = 6e-15;
            let cfg = reference_config().with_delta_tau(scan).unwrap();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let (lo, hi) = sampler.support();
            let margin = SEPARATION_GRID_SPAN / cfg.bandwidth;
            let second_peak = 2.0 * scan - dtp;
            assert_relative_eq!(lo, dtp - margin, max_relative = 1e-12);
            assert_relative_eq!(hi, second_peak + margin, max_relative = 1e-12);
        }

        #[test]
        fn cdf_is_monotone_with_unit_range() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let (lo, hi) = sampler.support();
            assert_eq!(sampler.cdf(lo - 1e-15), 0.0);
            assert_eq!(sampler.cdf(hi + 1e-15), 1.0);
            let mut prev = -1.0;
            for i in 0..=200 {
                let x = lo + (hi - lo) * (i as f64) / 200.0;
                let c = sampler.cdf(x);
                assert!(c >= prev, "CDF must be monotone");
                prev = c;
            }
        }

        #[test]
        fn total_mass_matches_the_kernel_integral() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let (lo, hi) = sampler.support();
            let reference = integrate_1d(
                |tau| g2_steady(tau, &cfg, &delays),
                lo,
                hi,
                &QuadratureOptions::default(),
            )
            .unwrap();
            // Trapezoid on 8192 nodes versus Romberg: O(h^2) agreement.
            assert_relative_eq!(sampler.total_mass(), reference, max_relative = 1e-6);
        }

        #[test]
        fn draws_track_the_tabulated_cdf_to_ks_tolerance() {
            let dtp = 2e-15;
            let cfg = reference_config().with_delta_tau(dtp).unwrap();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let n = 1_000_000usize;
            let mut draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
            draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut ks: f64 = 0.0;
            for (i, &x) in draws.iter().enumerate() {
                let c = sampler.cdf(x);
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                ks = ks.max((c - lo).abs()).max((hi - c).abs());
            }
            assert!(ks < 0.002, "KS distance {ks} exceeds 0.002 at n = {n}");
        }

        #[test]
        fn binned_draws_pass_a_chi_square_test_against_the_kernel() {
            let dtp = 2e-15;
            let dw = BANDWIDTH_10FS;
            let cfg = reference_config().with_delta_tau(dtp).unwrap();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let n = 1_000_000usize;
            let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();

            // 100 bins across the dip region (the balanced-delay kernel is
            // a Gaussian of std 1/(sqrt(2) dw), so +-2.5/dw is +-3.5 sigma);
            // expected masses from an independent quadrature of the kernel.
            let bins = 100usize;
            let lo = dtp - 2.5 / dw;
            let hi = dtp + 2.5 / dw;
            let width = (hi - lo) / bins as f64;
            let opts = QuadratureOptions::default();
            let mut expected_mass = Vec::with_capacity(bins);
            let mut range_mass = 0.0;
            for b in 0..bins {
                let a = lo + width * b as f64;
                let m = integrate_1d(|tau| g2_steady(tau, &cfg, &delays), a, a + width, &opts)
                    .unwrap();
                expected_mass.push(m);
                range_mass += m;
            }
            let mut observed = vec![0u64; bins];
            let mut in_range = 0u64;
            for &x in &draws {
                if x >= lo && x < hi {
                    let b = ((x - lo) / width) as usize;
                    observed[b.min(bins - 1)] += 1;
                    in_range += 1;
                }
            }
            let mut chi2 = 0.0;
            for b in 0..bins {
                let e = in_range as f64 * expected_mass[b] / range_mass;
                assert!(e > 10.0, "bin {b} expectation {e} too small for chi-square");
                let o = observed[b] as f64;
                chi2 += (o - e) * (o - e) / e;
            }
            // 99th percentile of chi-square with 99 degrees of freedom.
            let critical = 134.64161685578915;
            let statrs_critical = {
                use statrs::distribution::{ChiSquared, ContinuousCDF};
                ChiSquared::new(99.0).unwrap().inverse_cdf(0.99)
            };
            assert_relative_eq!(critical, statrs_critical, max_relative = 1e-8);
            assert!(
                chi2 < critical,
                "chi-square {chi2} exceeds the df=99 critical value {critical}"
            );
        }

        #[test]
        fn single_path_separations_are_gaussian() {
            // R = 0 leaves one path: the squared kernel is a Gaussian of
            // standard deviation 1/(sqrt(2) dw) centered on the lag.
            let dtp = 2e-15;
            let dw = BANDWIDTH_10FS;
            let cfg = InterferometerConfig::from_pulse_width(OMEGA_PUMP_1UM, 1e-14, 0.0)
                .unwrap()
                .with_delta_tau(dtp)
                .unwrap();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            let n = 100_000usize;
            let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (n as f64 - 1.0);
            let std = var.sqrt();
            let expected_std = 1.0 / (2.0f64.sqrt() * dw);
            assert_relative_eq!(std, expected_std, max_relative = 0.01);
            assert!(
                (mean - dtp).abs() < 4.0 * expected_std / (n as f64).sqrt(),
                "sample mean {mean} deviates from the lag {dtp}"
            );
        }
    }

    mod batches {
        use super::*;

        #[test]
        fn batches_are_bit_reproducible() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let window = wide_window();
            let a = sample_event_batch(500, &cfg, &delays, &window, 2e12, 99).unwrap();
            let b = sample_event_batch(500, &cfg, &delays, &window, 2e12, 99).unwrap();
            assert_eq!(a, b);
            let c = sample_event_batch(500, &cfg, &delays, &window, 2e12, 100).unwrap();
            assert_ne!(a.pair_times, c.pair_times);
        }

        #[test]
        fn zero_requests_give_an_empty_batch() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let batch =
                sample_pair_separations(0, &cfg, &delays, &wide_window(), 1).unwrap();
            assert!(batch.pair_times.is_empty());
            assert_eq!(batch.n_pairs, 0);
        }

        #[test]
        fn signal_only_batches_have_exactly_n_pairs() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let window = wide_window();
            let batch = sample_pair_separations(1234, &cfg, &delays, &window, 5).unwrap();
            assert_eq!(batch.pair_times.len(), 1234);
            assert_eq!(batch.n_pairs, 1234);
            // First-photon times stay inside the accumulation window.
            let half = window.accumulation_time / 2.0;
            for &(t1, _) in &batch.pair_times {
                assert!(t1 >= window.accumulation_center - half);
                assert!(t1 < window.accumulation_center + half);
            }
        }

        #[test]
        fn accidentals_arrive_at_the_requested_rate() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let window = wide_window();
            let rate = 400.0 / window.accumulation_time;
            let batch = sample_event_batch(0, &cfg, &delays, &window, rate, 17).unwrap();
            let k = batch.pair_times.len() as f64;
            assert!(
                (k - 400.0).abs() < 5.0 * 20.0,
                "accidental count {k} inconsistent with mean 400"
            );
            // Uniform-in-separation accidentals all land in the window.
            assert_eq!(count_coincidences(&batch, &window), batch.pair_times.len() as u64);
        }

        #[test]
        fn negative_accidental_rates_are_rejected() {
            let cfg = reference_config().with_delta_tau(2e-15).unwrap();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            assert!(
                sample_event_batch(10, &cfg, &delays, &wide_window(), -1.0, 1).is_err()
            );
        }

        #[test]
        fn counting_applies_an_inclusive_top_hat() {
            let window = CoincidenceWindow::new(1e-12, 4e-15).unwrap();
            let batch = EventBatch {
                pair_times: vec![
                    (0.0, 2e-15),
                    (0.0, -2e-15),
                    (0.0, 2.0001e-15),
                    (1e-13, 1e-13),
                ],
                seed: 0,
                n_pairs: 4,
                accidental_rate: 0.0,
            };
            assert_eq!(count_coincidences(&batch, &window), 3);
            let closed = CoincidenceWindow::new(1e-12, 0.0).unwrap();
            assert_eq!(count_coincidences(&batch, &closed), 1);
        }

        #[test]
        fn windowed_fraction_matches_the_kernel_mass() {
            let dtp = 2e-15;
            let dw = BANDWIDTH_10FS;
            let cfg = reference_config().with_delta_tau(dtp).unwrap();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let window = CoincidenceWindow::new(10.0 / dw, 2.0 / dw).unwrap();
            let n = 100_000usize;
            let batch = sample_pair_separations(n, &cfg, &delays, &window, 23).unwrap();
            let counted = count_coincidences(&batch, &window) as f64;

            let sampler = SeparationSampler::for_steady(&cfg, &delays).unwrap();
            let mass = integrate_1d(
                |tau| g2_steady(tau, &cfg, &delays),
                -1.0 / dw,
                1.0 / dw,
                &QuadratureOptions::default(),
            )
            .unwrap();
            let p = mass / sampler.total_mass();
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (counted - n as f64 * p).abs() < 4.0 * sigma,
                "windowed fraction {counted} vs binomial mean {}",
                n as f64 * p
            );
        }
    }

    mod scans {
        use super::*;
        use crate::biphoton::rc_steady;

        fn scan_grid(center: f64, half_scales: f64, points: usize) -> Vec<f64> {
            let dw = BANDWIDTH_10FS;
            (0..points)
                .map(|i| {
                    center
                        + (2.0 * i as f64 / (points - 1) as f64 - 1.0) * half_scales / dw
                })
                .collect()
        }

        #[test]
        fn scans_are_reproducible_and_validated() {
            let cfg = reference_config();
            let delays = DelayPair::from_differential(2e-15).unwrap();
            let grid = scan_grid(2e-15, 3.0, 9);
            let window = wide_window();
            let a = mc_dip_scan(&cfg, &delays, &grid, 1000, &window, 0.0, 5).unwrap();
            let b = mc_dip_scan(&cfg, &delays, &grid, 1000, &window, 0.0, 5).unwrap();
            assert_eq!(a.0, b.0);
            assert_eq!(a.1, b.1);

            assert!(mc_dip_scan(&cfg, &delays, &grid, 50, &window, 0.0, 5).is_err());
            assert!(mc_dip_scan(&cfg, &delays, &[], 1000, &window, 0.0, 5).is_err());
            let unsorted = vec![1e-15, 0.5e-15];
            assert!(
                mc_dip_scan(&cfg, &delays, &unsorted, 1000, &window, 0.0, 5).is_err()
            );
            assert!(
                mc_dip_scan(&cfg, &delays, &grid, 1000, &window, -1.0, 5).is_err()
            );
        }

        #[test]
        fn expected_counts_trace_the_closed_form_for_wide_windows() {
            let dtp = 2e-15;
            let cfg = reference_config();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let grid = scan_grid(dtp, 5.0, 21);
            let (_, counts) =
                mc_dip_scan(&cfg, &delays, &grid, 10_000, &wide_window(), 0.0, 7).unwrap();
            for point in &counts.points {
                let point_cfg = cfg.with_delta_tau(point.delta_tau).unwrap();
                let rc = rc_steady(&point_cfg, dtp);
                assert_relative_eq!(
                    point.expected / 10_000.0,
                    rc,
                    max_relative = 1e-4
                );
            }
        }

        #[test]
        fn counts_are_poisson_consistent_with_expectations() {
            let dtp = 2e-15;
            let cfg = reference_config();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let grid = scan_grid(dtp, 5.0, 21);
            let (curve, counts) =
                mc_dip_scan(&cfg, &delays, &grid, 10_000, &wide_window(), 0.0, 31).unwrap();
            for point in &counts.points {
                let sigma = point.expected.sqrt();
                assert!(
                    (point.counted as f64 - point.expected).abs() < 5.0 * sigma,
                    "count {} at {} outside 5 sigma of {}",
                    point.counted,
                    point.delta_tau,
                    point.expected
                );
            }
            // The normalized curve bottoms out near 1 - V and recovers to ~1.
            let (_, min_rc) = curve.min_point().unwrap();
            let floor = 1.0 - cfg.visibility();
            let sigma_min = (10_000.0 * floor).sqrt() / 10_000.0;
            assert!(
                (min_rc - floor).abs() < 5.0 * sigma_min,
                "minimum {min_rc} inconsistent with floor {floor}"
            );
            let edge = curve.samples.first().unwrap().1;
            let sigma_edge = (10_000.0f64).sqrt() / 10_000.0;
            assert!((edge - 1.0).abs() < 5.0 * sigma_edge);
        }

        #[test]
        fn symmetric_configurations_scan_symmetrically() {
            let cfg = reference_config();
            let delays = DelayPair::from_differential(0.0).unwrap();
            let grid = scan_grid(0.0, 3.0, 15);
            let (_, counts) =
                mc_dip_scan(&cfg, &delays, &grid, 20_000, &wide_window(), 0.0, 41).unwrap();
            let n = counts.points.len();
            for i in 0..n / 2 {
                let a = &counts.points[i];
                let b = &counts.points[n - 1 - i];
                let sigma = ((a.expected + b.expected) as f64).sqrt();
                assert!(
                    (a.counted as f64 - b.counted as f64).abs() < 5.0 * sigma,
                    "mirror counts {} and {} differ beyond noise",
                    a.counted,
                    b.counted
                );
            }
        }

        #[test]
        fn accidentals_lift_the_expected_floor() {
            let dtp = 2e-15;
            let cfg = reference_config();
            let delays = DelayPair::from_differential(dtp).unwrap();
            let grid = vec![dtp];
            let window = wide_window();
            let rate = 500.0 / window.accumulation_time;
            let (_, without) =
                mc_dip_scan(&cfg, &delays, &grid, 10_000, &window, 0.0, 3).unwrap();
            let (_, with) =
                mc_dip_scan(&cfg, &delays, &grid, 10_000, &window, rate, 3).unwrap();
            let lift = with.points[0].expected - without.points[0].expected;
            assert_relative_eq!(lift, 500.0, max_relative = 1e-9);
            let counted_lift = with.points[0].counted as f64 - without.points[0].counted as f64;
            assert!(
                (counted_lift - 500.0).abs() < 5.0 * (with.points[0].expected).sqrt(),
                "counted lift {counted_lift} inconsistent with 500 accidentals"
            );
        }
    }
}
