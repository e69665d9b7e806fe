//! Estimators and exact distributions for the degree-tail statistics.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::replicate::MonteCarlo;
use crate::rng::Lane;
use crate::tree::RecursiveTree;

/// Growth exponent of `Z_{>=D}`: `1 - ln 2`.
pub const GAMMA: f64 = 1.0 - std::f64::consts::LN_2;

/// Deviations reported by [`gamma_trend`].
pub const TREND_DELTAS: [f64; 3] = [0.05, 0.1, 0.15];

/// `r (r-1) ... (r-a+1)`, and 1 for `a = 0`.
pub fn falling_factorial(r: f64, a: u32) -> f64 {
    (0..a).map(|j| r - j as f64).product()
}

/// `H_m = 1 + 1/2 + ... + 1/m`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).rev().map(|j| 1.0 / j as f64).sum()
}

/// Running count, sum and sum of squares. Merging is associative, so
/// partial sums from any split of the replicates combine to the same totals
/// when merged in replicate order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Accumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub n: usize,
    pub d: usize,
    pub k: u32,
    /// Sample mean of `(Z_{>=d})_k`.
    pub estimate: f64,
    pub std_error: f64,
    /// `(n / 2^d)^k`, reported for `k` in {1, 2} and `d < 1.5 ln n`.
    pub theory: Option<f64>,
    pub replicates: u64,
}

pub fn moment_theory(n: usize, d: usize, k: u32) -> Option<f64> {
    let in_range = (d as f64) < 1.5 * (n as f64).ln();
    ((k == 1 || k == 2) && in_range).then(|| (n as f64 / 2f64.powi(d as i32)).powi(k as i32))
}

/// Sample means of the falling factorial moments `(Z_{>=d})_k` for every
/// pair in `d_values x k_values`, ordered by `d` then `k`.
pub fn estimate_tail_moments(
    n: usize,
    d_values: &[usize],
    k_values: &[u32],
    mc: &MonteCarlo,
) -> Result<Vec<MomentEstimate>> {
    if mc.replicates < 2 {
        return invalid("moment estimation needs at least 2 replicates");
    }
    if n == 0 {
        return invalid("tree size must be at least 1");
    }
    let tails = mc.map(|_, rng| {
        let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).expect("n >= 1");
        let tail = tree.degree_tail();
        d_values.iter().map(|&d| tail.at_least(d)).collect::<Vec<_>>()
    });
    let mut out = Vec::with_capacity(d_values.len() * k_values.len());
    for (j, &d) in d_values.iter().enumerate() {
        for &k in k_values {
            let acc: Accumulator = tails
                .iter()
                .map(|t| falling_factorial(t[j] as f64, k))
                .collect();
            out.push(MomentEstimate {
                n,
                d,
                k,
                estimate: acc.mean(),
                std_error: acc.std_error(),
                theory: moment_theory(n, d, k),
                replicates: mc.replicates,
            });
        }
    }
    Ok(out)
}

/// Tail mass below which the Poisson pmf is no longer summed.
pub const POISSON_TAIL_CUTOFF: f64 = 1e-12;

/// Poisson(mu) pmf on `0..=k_max`, with `k_max` at least the point where the
/// remaining tail drops below [`POISSON_TAIL_CUTOFF`].
pub fn poisson_pmf(mu: f64, min_len: usize) -> Vec<f64> {
    let mut pmf = Vec::new();
    let mut p = (-mu).exp();
    let mut cum = 0.0;
    let mut k = 0usize;
    loop {
        pmf.push(p);
        cum += p;
        k += 1;
        if k >= min_len && (k as f64) > mu && 1.0 - cum < POISSON_TAIL_CUTOFF {
            break;
        }
        // Guard against underflow of exp(-mu) for large mu.
        if k > 100_000 + 20 * mu as usize {
            break;
        }
        p *= mu / k as f64;
    }
    pmf
}

/// Half the L1 distance between two pmfs on `0, 1, 2, ...`; missing
/// entries count as zero.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let l1: f64 = (0..len)
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum();
    (0.5 * l1).clamp(0.0, 1.0)
}

/// TV distance between a pmf and Poisson(mu).
pub fn tv_to_poisson(pmf: &[f64], mu: f64) -> f64 {
    total_variation(pmf, &poisson_pmf(mu, pmf.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvEstimate {
    pub n: usize,
    pub d: usize,
    /// Poisson mean used for the comparison, `n / 2^d`.
    pub mu: f64,
    pub tv: f64,
    pub replicates: u64,
    /// Empirical mean of `Z_{>=d}`, for reference.
    pub empirical_mean: f64,
}

pub fn empirical_pmf(samples: &[usize]) -> Vec<f64> {
    let max = samples.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for &s in samples {
        counts[s] += 1;
    }
    let total = samples.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}

/// TV distance between the empirical law of `Z_{>=d}` and Poisson(n/2^d).
pub fn estimate_tv_to_poisson(n: usize, d: usize, mc: &MonteCarlo) -> Result<TvEstimate> {
    if mc.replicates < 100 {
        return invalid(format!(
            "TV estimation needs at least 100 replicates, got {}",
            mc.replicates
        ));
    }
    if n == 0 {
        return invalid("tree size must be at least 1");
    }
    let samples = mc.map(|_, rng| {
        RecursiveTree::generate(n, &mut rng.fork(Lane::Tree))
            .expect("n >= 1")
            .degree_tail()
            .at_least(d)
    });
    let mu = n as f64 / 2f64.powi(d as i32);
    let pmf = empirical_pmf(&samples);
    Ok(TvEstimate {
        n,
        d,
        mu,
        tv: tv_to_poisson(&pmf, mu),
        replicates: mc.replicates,
        empirical_mean: samples.iter().map(|&s| s as f64).sum::<f64>() / samples.len() as f64,
    })
}

/// Largest size accepted by [`root_degree_distribution_exact`].
pub const MAX_EXACT_ROOT_DEGREE_N: usize = 1_000_000;
/// Maximum total mass the convolution may discard.
pub const CONVOLUTION_DROP_BUDGET: f64 = 1e-10;

/// Per-entry truncation threshold for a convolution of `n - 1` factors. At
/// most two entries are dropped per step, so the total discarded mass stays
/// below a tenth of [`CONVOLUTION_DROP_BUDGET`]; never looser than `1e-14`.
pub fn convolution_drop_threshold(n: usize) -> f64 {
    (CONVOLUTION_DROP_BUDGET / (20.0 * n as f64)).min(1e-14)
}

/// Exact law of the root degree `D = sum_{i=2}^n Bernoulli(1/(i-1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootDegreePmf {
    pub n: usize,
    /// `pmf[k] = P(D = k)`; entries outside the retained support are 0.
    pub pmf: Vec<f64>,
    pub dropped_mass: f64,
}

impl RootDegreePmf {
    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn prob_in(&self, window: std::ops::RangeInclusive<usize>) -> f64 {
        window.map(|k| self.prob(k)).sum()
    }
}

/// Poisson-binomial convolution over `i = 2..=n`, trimming support entries
/// below [`convolution_drop_threshold`] at either end.
pub fn root_degree_distribution_exact(n: usize) -> Result<RootDegreePmf> {
    if !(2..=MAX_EXACT_ROOT_DEGREE_N).contains(&n) {
        return invalid(format!(
            "exact root degree law needs 2 <= n <= {MAX_EXACT_ROOT_DEGREE_N}, got {n}"
        ));
    }
    // dist[j] = P(D = lo + j)
    let mut lo = 1usize;
    let mut dist = vec![1.0f64];
    let mut dropped = 0.0;
    let threshold = convolution_drop_threshold(n);
    for i in 3..=n {
        let p = 1.0 / (i - 1) as f64;
        let q = 1.0 - p;
        dist.push(0.0);
        for j in (1..dist.len()).rev() {
            dist[j] = dist[j] * q + dist[j - 1] * p;
        }
        dist[0] *= q;
        while dist.len() > 1 && *dist.last().unwrap() < threshold {
            dropped += dist.pop().unwrap();
        }
        while dist.len() > 1 && dist[0] < threshold {
            dropped += dist.remove(0);
            lo += 1;
        }
    }
    if dropped > CONVOLUTION_DROP_BUDGET {
        return Err(Error::ResourceExhausted(format!(
            "convolution discarded {dropped:e} of mass"
        )));
    }
    let mut pmf = vec![0.0; lo];
    pmf.extend(dist);
    Ok(RootDegreePmf {
        n,
        pmf,
        dropped_mass: dropped,
    })
}

/// `2 n^{-eps^2/12}`, the Bernstein-type bound on `P(D outside (1 +- eps) ln n)`.
pub fn concentration_bound(n: usize, epsilon: f64) -> f64 {
    2.0 * (n as f64).powf(-epsilon * epsilon / 12.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaTrendPoint {
    pub n: usize,
    pub replicates: u64,
    /// Mean of `ln(Z_{>=D}) / ln n`.
    pub mean_ratio: f64,
    pub ratio_std_error: f64,
    /// `kth_moment[k-1]` = mean of `(ln Z_{>=D})^k`.
    pub kth_moment: Vec<f64>,
    pub kth_std_error: Vec<f64>,
    /// `(GAMMA ln n)^k` for the same `k`.
    pub kth_reference: Vec<f64>,
    /// `(delta, P(|ratio - GAMMA| >= delta))` for each of [`TREND_DELTAS`].
    pub tail_probability: Vec<(f64, f64)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Per-size summaries of `ln(Z_{>=D})`.
pub fn gamma_trend(n_ladder: &[usize], mc: &MonteCarlo, k_max: u32) -> Result<Vec<GammaTrendPoint>> {
    if mc.replicates < 100 {
        return invalid(format!(
            "gamma trend needs at least 100 replicates, got {}",
            mc.replicates
        ));
    }
    if let Some(&bad) = n_ladder.iter().find(|&&n| n < 2) {
        return invalid(format!("gamma trend needs n >= 2, got {bad}"));
    }
    let mut points = Vec::with_capacity(n_ladder.len());
    for (level, &n) in n_ladder.iter().enumerate() {
        // Each ladder level gets its own block of streams.
        let level_mc = MonteCarlo {
            seed: crate::rng::mix64(mc.seed ^ (level as u64 + 1).wrapping_mul(0xa076_1d64_78bd_642f)),
            ..*mc
        };
        let logs = level_mc.map(|_, rng| {
            let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).expect("n >= 2");
            (tree.degree_tail().at_root_degree() as f64).ln()
        });
        points.push(summarize_trend(n, &logs, k_max));
    }
    Ok(points)
}

/// Trend summary from samples of `ln(Z_{>=D})` at one size.
pub fn summarize_trend(n: usize, log_z: &[f64], k_max: u32) -> GammaTrendPoint {
    let ln_n = (n as f64).ln();
    let ratios: Vec<f64> = log_z.iter().map(|l| l / ln_n).collect();
    let ratio_acc: Accumulator = ratios.iter().copied().collect();
    let mut kth_moment = Vec::new();
    let mut kth_std_error = Vec::new();
    let mut kth_reference = Vec::new();
    for k in 1..=k_max {
        let acc: Accumulator = log_z.iter().map(|l| l.powi(k as i32)).collect();
        kth_moment.push(acc.mean());
        kth_std_error.push(acc.std_error());
        kth_reference.push((GAMMA * ln_n).powi(k as i32));
    }
    let total = ratios.len() as f64;
    let tail_probability = TREND_DELTAS
        .iter()
        .map(|&delta| {
            let outside = ratios.iter().filter(|&&r| (r - GAMMA).abs() >= delta).count();
            (delta, outside as f64 / total)
        })
        .collect();
    GammaTrendPoint {
        n,
        replicates: ratios.len() as u64,
        mean_ratio: ratio_acc.mean(),
        ratio_std_error: ratio_acc.std_error(),
        kth_moment,
        kth_std_error,
        kth_reference,
        tail_probability,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}
