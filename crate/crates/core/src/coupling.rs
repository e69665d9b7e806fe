//! Coupling of an unconditioned random recursive tree with one conditioned
//! on its root degree.
//!
//! Both trees are grown from the same two-step rule: vertex `i` attaches to
//! the root when its indicator `b_i` is set, and otherwise to `y_i`, a
//! uniform vertex of `2..i`. The unconditioned tree uses independent
//! `Bernoulli(1/(i-1))` indicators. The conditioned tree uses indicators with
//! the law of those same Bernoullis given that their sum falls strictly
//! inside `((1-eps) ln n, (1+eps) ln n)`. Both trees share the `y_i`.
//!
//! The joint law of the two indicator vectors is free; here they are drawn
//! independently of each other ([`CouplingKind::IndependentResample`]).

use std::ops::RangeInclusive;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::{Lane, RngStream};
use crate::tree::{RecursiveTree, TailCounts};

/// Rejection sampler attempt budget.
pub const MAX_ATTEMPTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    /// The conditioned indicators are a fresh rejection sample, independent
    /// of the unconditioned ones.
    #[default]
    IndependentResample,
}

/// Integers `k` in `1..=n-1` with `(1-eps) ln n < k < (1+eps) ln n`.
pub fn root_degree_window(n: usize, epsilon: f64) -> Result<RangeInclusive<usize>> {
    if n < 2 {
        return invalid(format!("coupling needs n >= 2, got {n}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let ln_n = (n as f64).ln();
    let lo = (1.0 - epsilon) * ln_n;
    let hi = (1.0 + epsilon) * ln_n;
    // Smallest integer strictly above lo, largest strictly below hi.
    let first = ((lo.floor() as i64) + 1).max(1) as usize;
    let last_f = hi.ceil() - 1.0;
    let last = (last_f.max(0.0) as usize).min(n - 1);
    if first > last {
        return invalid(format!(
            "window ({lo:.4}, {hi:.4}) holds no admissible root degree for n = {n}"
        ));
    }
    Ok(first..=last)
}

/// Indicator vector indexed by vertex: entry `i` for `i in 2..=n`; entries 0
/// and 1 are always `false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionedBernoulli {
    pub indicators: Vec<bool>,
    pub attempts: u64,
}

impl ConditionedBernoulli {
    pub fn sum(&self) -> usize {
        self.indicators.iter().filter(|&&b| b).count()
    }
}

/// Independent `Bernoulli(1/(i-1))` for `i in 2..=n`.
pub fn sample_bernoulli(n: usize, rng: &mut RngStream) -> Vec<bool> {
    let mut b = vec![false; n + 1];
    fill_bernoulli(&mut b, rng);
    b
}

fn fill_bernoulli(b: &mut [bool], rng: &mut RngStream) -> usize {
    let n = b.len() - 1;
    let mut sum = 0;
    for (i, slot) in b.iter_mut().enumerate().take(n + 1).skip(2) {
        let hit = rng.random_range(0..i as u64 - 1) == 0;
        *slot = hit;
        sum += hit as usize;
    }
    sum
}

/// Exact conditional law by rejection: redraw the whole vector until its sum
/// lands in the window.
pub fn sample_conditioned_bernoulli(
    n: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<ConditionedBernoulli> {
    sample_conditioned_bernoulli_with_budget(n, epsilon, rng, MAX_ATTEMPTS)
}

pub fn sample_conditioned_bernoulli_with_budget(
    n: usize,
    epsilon: f64,
    rng: &mut RngStream,
    max_attempts: u64,
) -> Result<ConditionedBernoulli> {
    let window = root_degree_window(n, epsilon)?;
    let mut b = vec![false; n + 1];
    for attempt in 1..=max_attempts {
        let sum = fill_bernoulli(&mut b, rng);
        if window.contains(&sum) {
            return Ok(ConditionedBernoulli {
                indicators: b,
                attempts: attempt,
            });
        }
    }
    Err(Error::ResourceExhausted(format!(
        "no accepted sample within {max_attempts} attempts (n = {n}, epsilon = {epsilon})"
    )))
}

/// Assembles the tree from root indicators and fallback parents.
/// `b[i]` and `y[i]` are read for `i in 2..=n`.
pub fn assemble_tree(b: &[bool], y: &[usize]) -> Result<RecursiveTree> {
    let n = b.len() - 1;
    let mut parents = vec![0usize; n];
    for i in 2..=n {
        parents[i - 1] = if b[i] || i == 2 { 1 } else { y[i] };
    }
    RecursiveTree::from_parents(&parents)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoupledSample {
    pub n: usize,
    pub epsilon: f64,
    pub kind: CouplingKind,
    /// Unconditioned root indicators, indexed by vertex.
    pub b: Vec<bool>,
    /// Conditioned root indicators, indexed by vertex.
    pub b_cond: Vec<bool>,
    /// Shared non-root parents: `y[2] = 1`, `y[i]` uniform on `2..i`.
    pub y: Vec<usize>,
    pub tree: RecursiveTree,
    pub tree_cond: RecursiveTree,
    pub d: usize,
    pub d_cond: usize,
    /// Rejection attempts spent on `b_cond`.
    pub attempts: u64,
}

pub fn build_coupled_pair(n: usize, epsilon: f64, rng: &mut RngStream) -> Result<CoupledSample> {
    root_degree_window(n, epsilon)?;
    let b = sample_bernoulli(n, &mut rng.fork(Lane::Bernoulli));
    let cond = sample_conditioned_bernoulli(n, epsilon, &mut rng.fork(Lane::Conditioned))?;
    let mut attach = rng.fork(Lane::Attach);
    let mut y = vec![0usize; n + 1];
    if n >= 2 {
        y[2] = 1;
    }
    for (i, slot) in y.iter_mut().enumerate().skip(3) {
        *slot = attach.random_range(2..i);
    }
    let tree = assemble_tree(&b, &y)?;
    let tree_cond = assemble_tree(&cond.indicators, &y)?;
    Ok(CoupledSample {
        n,
        epsilon,
        kind: CouplingKind::IndependentResample,
        d: tree.root_degree(),
        d_cond: tree_cond.root_degree(),
        b,
        b_cond: cond.indicators,
        y,
        tree,
        tree_cond,
        attempts: cond.attempts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WdDiagnostic {
    pub d: usize,
    /// `(1 + Z^cond_{>=d}) / (1 + Z_{>=d})`.
    pub w: f64,
    /// `|C(1) symmetric-difference C^cond(1)|`.
    pub sym_diff_root_children: usize,
    /// Vertices `i >= 2` whose degree differs between the trees.
    pub differing_degree_count: usize,
    /// Vertices `i >= 2` whose children sets differ between the trees.
    pub differing_children_count: usize,
    pub z_d: usize,
    pub z_d_cond: usize,
}

/// Per-sample quantities shared by every threshold `d`.
#[derive(Debug, Clone)]
pub struct CouplingProfile {
    pub tail: TailCounts,
    pub tail_cond: TailCounts,
    pub sym_diff_root_children: usize,
    pub differing_degree_count: usize,
    pub differing_children_count: usize,
}

impl CouplingProfile {
    pub fn new(sample: &CoupledSample) -> Self {
        let n = sample.n;
        let sym_diff_root_children = (2..=n)
            .filter(|&i| sample.tree.parent(i) == Some(1) && sample.tree_cond.parent(i) != Some(1)
                || sample.tree.parent(i) != Some(1) && sample.tree_cond.parent(i) == Some(1))
            .count();
        let differing_degree_count = (2..=n)
            .filter(|&i| sample.tree.degree(i) != sample.tree_cond.degree(i))
            .count();
        // Children sets of i differ iff some j has parent i in exactly one tree.
        let mut differs = vec![false; n + 1];
        for j in 2..=n {
            let (p, q) = (sample.tree.parent_raw(j), sample.tree_cond.parent_raw(j));
            if p != q {
                differs[p] = true;
                differs[q] = true;
            }
        }
        let differing_children_count = differs.iter().skip(2).filter(|&&x| x).count();
        Self {
            tail: sample.tree.degree_tail(),
            tail_cond: sample.tree_cond.degree_tail(),
            sym_diff_root_children,
            differing_degree_count,
            differing_children_count,
        }
    }

    pub fn at(&self, d: usize) -> WdDiagnostic {
        let z_d = self.tail.at_least(d);
        let z_d_cond = self.tail_cond.at_least(d);
        WdDiagnostic {
            d,
            w: (1 + z_d_cond) as f64 / (1 + z_d) as f64,
            sym_diff_root_children: self.sym_diff_root_children,
            differing_degree_count: self.differing_degree_count,
            differing_children_count: self.differing_children_count,
            z_d,
            z_d_cond,
        }
    }
}

pub fn coupling_diagnostics(sample: &CoupledSample, d: usize) -> WdDiagnostic {
    CouplingProfile::new(sample).at(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_endpoints_are_open() {
        let w = root_degree_window(10_000, 0.5).unwrap();
        // (4.605, 13.816)
        assert_eq!(w, 5..=13);
        // n = 2, eps = 0.5: (0.347, 1.040) contains 1.
        assert_eq!(root_degree_window(2, 0.5).unwrap(), 1..=1);
        // n = 2, eps = 0.3: (0.485, 0.901) contains nothing.
        assert!(root_degree_window(2, 0.3).is_err());
        assert!(root_degree_window(100, 0.0).is_err());
        assert!(root_degree_window(100, 1.0).is_err());
        assert!(root_degree_window(100, 1.5).is_err());
    }

    #[test]
    fn window_excludes_integer_endpoint() {
        for n in [20usize, 55, 148, 403, 1097] {
            for eps in [0.1, 0.25, 0.5, 0.75] {
                if let Ok(w) = root_degree_window(n, eps) {
                    let ln = (n as f64).ln();
                    assert!((*w.start() as f64) > (1.0 - eps) * ln);
                    assert!((*w.end() as f64) < (1.0 + eps) * ln);
                    assert!((*w.start() as f64 - 1.0) <= (1.0 - eps) * ln);
                    assert!((*w.end() as f64 + 1.0) >= (1.0 + eps) * ln || *w.end() == n - 1);
                }
            }
        }
    }

    #[test]
    fn conditioned_sample_in_window() {
        let mut rng = RngStream::new(8, 0);
        for _ in 0..50 {
            let s = sample_conditioned_bernoulli(1000, 0.3, &mut rng).unwrap();
            assert!(root_degree_window(1000, 0.3).unwrap().contains(&s.sum()));
            assert!(s.indicators[2]);
            assert!(!s.indicators[0] && !s.indicators[1]);
            assert!(s.attempts >= 1);
        }
    }

    #[test]
    fn budget_exhaustion_is_a_resource_error() {
        // Narrow window, single attempt: most draws are rejected.
        let mut rng = RngStream::new(1, 1);
        let mut saw_error = false;
        for _ in 0..200 {
            match sample_conditioned_bernoulli_with_budget(100_000, 0.05, &mut rng, 1) {
                Err(Error::ResourceExhausted(_)) => saw_error = true,
                Ok(_) => {}
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(saw_error);
    }

    #[test]
    fn n2_pair_is_single_edge() {
        let s = build_coupled_pair(2, 0.5, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(s.tree.to_string(), "0 1");
        assert_eq!(s.tree_cond.to_string(), "0 1");
    }

    #[test]
    fn identical_indicators_give_identical_trees() {
        let mut s = build_coupled_pair(500, 0.5, &mut RngStream::new(2, 2)).unwrap();
        s.b_cond = s.b.clone();
        s.tree_cond = assemble_tree(&s.b_cond, &s.y).unwrap();
        let p = CouplingProfile::new(&s);
        assert_eq!(p.sym_diff_root_children, 0);
        for d in 0..=p.tail.max_degree + 1 {
            assert_eq!(p.at(d).w, 1.0);
        }
    }

    #[test]
    fn diagnostics_invariants() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..100 {
            let s = build_coupled_pair(300, 0.5, &mut rng).unwrap();
            let p = CouplingProfile::new(&s);
            assert_eq!(p.at(0).w, 1.0);
            assert!(p.differing_degree_count <= p.differing_children_count);
            assert!(p.differing_children_count <= p.sym_diff_root_children);
            for i in 2..=s.n {
                if s.b[i] == s.b_cond[i] {
                    assert_eq!(s.tree.parent(i), s.tree_cond.parent(i));
                }
            }
            let top = p.tail.max_degree.max(p.tail_cond.max_degree) + 1;
            for d in 0..=top {
                let diag = p.at(d);
                assert!(diag.z_d.abs_diff(diag.z_d_cond) <= 1 + diag.sym_diff_root_children);
                assert!(diag.w >= 1.0 / s.n as f64 && diag.w <= s.n as f64);
            }
        }
    }
}
