//! Cutting processes on a fixed tree.
//!
//! * [`targeted_cut`] removes vertices in decreasing order of their initial
//!   degree (ties in uniform random order) and stops when the root comes up.
//! * [`uniform_edge_cut`] removes a uniformly chosen live edge together with
//!   the part hanging below it until only the root is left.
//! * [`record_count`] counts record edges under i.i.d. uniform edge labels;
//!   it has the same law as the uniform edge cut count.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::rng::RngStream;
use crate::tree::RecursiveTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutPolicy {
    Targeted,
    UniformEdge,
    Records,
}

impl CutPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            CutPolicy::Targeted => "targeted",
            CutPolicy::UniformEdge => "uniform-edge",
            CutPolicy::Records => "records",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub policy: CutPolicy,
    pub n: usize,
    pub cuts: usize,
    /// `Z_{>=D}` of the initial tree; only set for the targeted policy.
    pub z_at_root_degree: Option<usize>,
    /// Removed vertices in order (targeted), children of cut edges in order
    /// (uniform edge) or children of record edges by label (records).
    pub trace: Option<Vec<usize>>,
}

/// Decreasing-degree removal order for every vertex with degree at least the
/// root degree, ties shuffled. The root is somewhere in the last block.
pub fn targeted_order(tree: &RecursiveTree, rng: &mut RngStream) -> Vec<usize> {
    let root_degree = tree.root_degree();
    let max_degree = tree.max_degree();
    let span = max_degree - root_degree + 1;
    // counts[j] = vertices of degree max_degree - j
    let mut counts = vec![0usize; span + 1];
    for v in 1..=tree.len() {
        let d = tree.degree(v);
        if d >= root_degree {
            counts[max_degree - d + 1] += 1;
        }
    }
    for j in 1..=span {
        counts[j] += counts[j - 1];
    }
    let mut order = vec![0usize; counts[span]];
    let mut fill = counts.clone();
    for v in 1..=tree.len() {
        let d = tree.degree(v);
        if d >= root_degree {
            let j = max_degree - d;
            order[fill[j]] = v;
            fill[j] += 1;
        }
    }
    for j in 0..span {
        order[counts[j]..counts[j + 1]].shuffle(rng);
    }
    order
}

/// Targeted degree-ordered vertex cutting. `rng` only breaks ties.
pub fn targeted_cut(tree: &RecursiveTree, rng: &mut RngStream) -> CutResult {
    run_targeted(tree, rng, false)
}

pub fn targeted_cut_traced(tree: &RecursiveTree, rng: &mut RngStream) -> CutResult {
    run_targeted(tree, rng, true)
}

fn run_targeted(tree: &RecursiveTree, rng: &mut RngStream, keep_trace: bool) -> CutResult {
    let order = targeted_order(tree, rng);
    let (cuts, removed) = cut_in_order(tree, &order);
    CutResult {
        policy: CutPolicy::Targeted,
        n: tree.len(),
        cuts,
        z_at_root_degree: Some(tree.degree_tail().at_root_degree()),
        trace: keep_trace.then_some(removed),
    }
}

/// Walks `order` until the root, deleting every vertex still attached to the
/// root. Returns the number of deletions and the deleted vertices.
pub fn cut_in_order(tree: &RecursiveTree, order: &[usize]) -> (usize, Vec<usize>) {
    let mut deleted = vec![false; tree.len() + 1];
    let mut removed = Vec::new();
    for &v in order {
        if v == 1 {
            break;
        }
        if is_attached(tree, &deleted, v) {
            deleted[v] = true;
            removed.push(v);
        }
    }
    (removed.len(), removed)
}

fn is_attached(tree: &RecursiveTree, deleted: &[bool], mut v: usize) -> bool {
    while v != 1 {
        if deleted[v] {
            return false;
        }
        v = tree.parent_raw(v);
    }
    true
}

/// Uniform edge cutting: each step removes a uniform live edge and the
/// subtree below it. O(n) overall.
pub fn uniform_edge_cut(tree: &RecursiveTree, rng: &mut RngStream) -> CutResult {
    run_uniform(tree, rng, false)
}

pub fn uniform_edge_cut_traced(tree: &RecursiveTree, rng: &mut RngStream) -> CutResult {
    run_uniform(tree, rng, true)
}

fn run_uniform(tree: &RecursiveTree, rng: &mut RngStream, keep_trace: bool) -> CutResult {
    const DEAD: u32 = u32::MAX;
    let n = tree.len();
    let children = tree.children();
    // Edges are named by their child endpoint.
    let mut live: Vec<u32> = (2..=n as u32).collect();
    let mut pos = vec![DEAD; n + 1];
    for (k, &v) in live.iter().enumerate() {
        pos[v as usize] = k as u32;
    }
    let mut cuts = 0;
    let mut trace = Vec::new();
    let mut stack = Vec::new();
    while !live.is_empty() {
        let v = live[rng.random_range(0..live.len())] as usize;
        cuts += 1;
        if keep_trace {
            trace.push(v);
        }
        stack.push(v);
        while let Some(u) = stack.pop() {
            // Already cut off, together with everything below it.
            if pos[u] == DEAD {
                continue;
            }
            let k = pos[u] as usize;
            live.swap_remove(k);
            if let Some(&moved) = live.get(k) {
                pos[moved as usize] = k as u32;
            }
            pos[u] = DEAD;
            stack.extend(children.of(u).iter().map(|&c| c as usize));
        }
    }
    CutResult {
        policy: CutPolicy::UniformEdge,
        n,
        cuts,
        z_at_root_degree: None,
        trace: keep_trace.then_some(trace),
    }
}

/// Number of record edges: edges whose uniform label exceeds every label on
/// the path from the edge up to the root.
pub fn record_count(tree: &RecursiveTree, rng: &mut RngStream) -> CutResult {
    let n = tree.len();
    // path_max[v] = largest label on the edges from v up to the root.
    let mut path_max = vec![f64::NEG_INFINITY; n + 1];
    let mut cuts = 0;
    for v in 2..=n {
        let label: f64 = rng.random();
        let above = path_max[tree.parent_raw(v)];
        if label > above {
            cuts += 1;
            path_max[v] = label;
        } else {
            path_max[v] = above;
        }
    }
    CutResult {
        policy: CutPolicy::Records,
        n,
        cuts,
        z_at_root_degree: None,
        trace: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YnValue(pub f64);

/// `(ln n)^2 / n * cuts - ln n - ln ln n`, the centred and rescaled uniform
/// cut count.
pub fn y_statistic(n: usize, cuts: usize) -> Result<YnValue> {
    if n < 3 {
        return invalid(format!("Y_n needs n >= 3, got {n}"));
    }
    let ln_n = (n as f64).ln();
    Ok(YnValue(ln_n * ln_n / n as f64 * cuts as f64 - ln_n - ln_n.ln()))
}
