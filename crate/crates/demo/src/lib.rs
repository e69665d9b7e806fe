//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each exported function returns a JSON document; the plain-Rust versions
//! (`cut_tree`, `tail_profile`, `cut_comparison`) are what the page's data
//! comes from and are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rrtcut_core::cutting::{targeted_order, uniform_edge_cut_traced, cut_in_order};
use rrtcut_core::stats::{Accumulator, GAMMA};
use rrtcut_core::{Lane, MonteCarlo, RecursiveTree, RngStream};

pub const MAX_DRAWN_N: usize = 5_000;
pub const MAX_SAMPLED_N: usize = 200_000;
pub const MAX_REPS: u64 = 5_000;

#[derive(Debug, Serialize)]
pub struct TreeView {
    pub n: usize,
    /// Parent of each vertex `1..=n` (0 for the root).
    pub parents: Vec<usize>,
    pub degrees: Vec<usize>,
    /// Radial layout in the unit disc, indexed like `parents`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub root_degree: usize,
    pub z_at_root_degree: usize,
    /// Targeted visiting order up to and including the root.
    pub targeted_order: Vec<usize>,
    pub targeted_removed: Vec<usize>,
    /// Child endpoints of the edges removed by uniform cutting, in order.
    pub uniform_removed: Vec<usize>,
}

/// Grows one tree and runs both cutting processes on it.
pub fn cut_tree(n: usize, seed: u64) -> Result<TreeView, String> {
    if !(1..=MAX_DRAWN_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_DRAWN_N}"));
    }
    let rng = RngStream::new(seed, 0);
    let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).map_err(|e| e.to_string())?;
    let order = targeted_order(&tree, &mut rng.fork(Lane::Ties));
    let (_, removed) = cut_in_order(&tree, &order);
    let root_at = order.iter().position(|&v| v == 1).unwrap_or(order.len());
    let uniform = uniform_edge_cut_traced(&tree, &mut rng.fork(Lane::Cuts));
    let (x, y) = radial_layout(&tree);
    Ok(TreeView {
        n,
        parents: tree.parents(),
        degrees: (1..=n).map(|v| tree.degree(v)).collect(),
        x,
        y,
        root_degree: tree.root_degree(),
        z_at_root_degree: tree.degree_tail().at_root_degree(),
        targeted_order: order[..=root_at.min(order.len() - 1)].to_vec(),
        targeted_removed: removed,
        uniform_removed: uniform.trace.unwrap_or_default(),
    })
}

/// Places each vertex at radius proportional to depth, inside an angular
/// wedge proportional to its number of leaves.
fn radial_layout(tree: &RecursiveTree) -> (Vec<f64>, Vec<f64>) {
    let n = tree.len();
    let mut leaves = vec![0usize; n + 1];
    for v in (1..=n).rev() {
        if tree.degree(v) == 0 {
            leaves[v] = 1;
        }
        if let Some(p) = tree.parent(v) {
            leaves[p] += leaves[v];
        }
    }
    let mut depth = vec![0usize; n + 1];
    for v in 2..=n {
        depth[v] = depth[tree.parent(v).unwrap()] + 1;
    }
    let max_depth = depth.iter().copied().max().unwrap_or(0).max(1) as f64;
    // wedge[v] = (start angle, width); children split their parent's wedge.
    let mut wedge = vec![(0.0f64, 0.0f64); n + 1];
    wedge[1] = (0.0, std::f64::consts::TAU);
    let mut next_start: Vec<f64> = vec![0.0; n + 1];
    next_start[1] = 0.0;
    for v in 2..=n {
        let p = tree.parent(v).unwrap();
        let (ps, pw) = wedge[p];
        let width = pw * leaves[v] as f64 / leaves[p] as f64;
        wedge[v] = (ps + next_start[p], width);
        next_start[p] += width;
    }
    let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for v in 1..=n {
        let r = depth[v] as f64 / max_depth;
        let a = wedge[v].0 + wedge[v].1 / 2.0;
        xs.push(r * a.cos());
        ys.push(r * a.sin());
    }
    (xs, ys)
}

#[derive(Debug, Serialize)]
pub struct TailProfile {
    pub n: usize,
    pub reps: u64,
    pub d: Vec<usize>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    /// `n / 2^d`.
    pub reference: Vec<f64>,
    /// Frequency of each root degree.
    pub root_degree_freq: Vec<f64>,
}

/// Mean degree tail `Z_{>=d}` over `reps` trees.
pub fn tail_profile(n: usize, reps: u64, seed: u64) -> Result<TailProfile, String> {
    check_sampling(n, reps)?;
    let tails = MonteCarlo::new(seed, reps).map(|_, rng| {
        RecursiveTree::generate(n, &mut rng.fork(Lane::Tree))
            .expect("n >= 1")
            .degree_tail()
    });
    let top = tails.iter().map(|t| t.max_degree).max().unwrap_or(0);
    let mut out = TailProfile {
        n,
        reps,
        d: Vec::new(),
        mean: Vec::new(),
        std_error: Vec::new(),
        reference: Vec::new(),
        root_degree_freq: vec![0.0; top + 1],
    };
    for d in 0..=top {
        let acc: Accumulator = tails.iter().map(|t| t.at_least(d) as f64).collect();
        out.d.push(d);
        out.mean.push(acc.mean());
        out.std_error.push(acc.std_error());
        out.reference.push(n as f64 / 2f64.powi(d as i32));
    }
    for t in &tails {
        out.root_degree_freq[t.root_degree] += 1.0 / reps as f64;
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct CutComparison {
    pub n: usize,
    pub reps: u64,
    pub targeted: Vec<usize>,
    pub z_at_root_degree: Vec<usize>,
    pub uniform: Vec<usize>,
    pub mean_targeted: f64,
    pub mean_z_at_root_degree: f64,
    pub mean_uniform: f64,
    /// `n^(1 - ln 2)`.
    pub n_to_gamma: f64,
    /// `n / ln n`.
    pub n_over_ln_n: f64,
}

/// Targeted versus uniform cutting on the same trees.
pub fn cut_comparison(n: usize, reps: u64, seed: u64) -> Result<CutComparison, String> {
    check_sampling(n, reps)?;
    let runs = MonteCarlo::new(seed, reps).map(|_, rng| {
        let tree = RecursiveTree::generate(n, &mut rng.fork(Lane::Tree)).expect("n >= 1");
        let t = rrtcut_core::targeted_cut(&tree, &mut rng.fork(Lane::Ties));
        let u = rrtcut_core::uniform_edge_cut(&tree, &mut rng.fork(Lane::Cuts));
        (t.cuts, t.z_at_root_degree.unwrap_or(0), u.cuts)
    });
    let mean = |f: fn(&(usize, usize, usize)) -> usize| runs.iter().map(|r| f(r) as f64).sum::<f64>() / reps as f64;
    Ok(CutComparison {
        n,
        reps,
        mean_targeted: mean(|r| r.0),
        mean_z_at_root_degree: mean(|r| r.1),
        mean_uniform: mean(|r| r.2),
        targeted: runs.iter().map(|r| r.0).collect(),
        z_at_root_degree: runs.iter().map(|r| r.1).collect(),
        uniform: runs.iter().map(|r| r.2).collect(),
        n_to_gamma: (n as f64).powf(GAMMA),
        n_over_ln_n: if n > 1 { n as f64 / (n as f64).ln() } else { 0.0 },
    })
}

fn check_sampling(n: usize, reps: u64) -> Result<(), String> {
    if !(2..=MAX_SAMPLED_N).contains(&n) {
        return Err(format!("n must be between 2 and {MAX_SAMPLED_N}"));
    }
    if !(1..=MAX_REPS).contains(&reps) {
        return Err(format!("replicates must be between 1 and {MAX_REPS}"));
    }
    Ok(())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = cutTree)]
pub fn cut_tree_js(n: u32, seed: u32) -> Result<String, JsError> {
    to_js(cut_tree(n as usize, seed as u64))
}

#[wasm_bindgen(js_name = tailProfile)]
pub fn tail_profile_js(n: u32, reps: u32, seed: u32) -> Result<String, JsError> {
    to_js(tail_profile(n as usize, reps as u64, seed as u64))
}

#[wasm_bindgen(js_name = cutComparison)]
pub fn cut_comparison_js(n: u32, reps: u32, seed: u32) -> Result<String, JsError> {
    to_js(cut_comparison(n as usize, reps as u64, seed as u64))
}
