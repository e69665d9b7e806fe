//! Exact laws for small trees by exhaustive enumeration of every increasing
//! tree and, for the targeted cut, every tie-breaking order.

use serde::Serialize;

use crate::cutting::cut_in_order;
use crate::error::Result;
use crate::stats::falling_factorial;
use crate::tree::{enumerate_increasing_trees, RecursiveTree};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallNOracle {
    pub n: usize,
    pub tree_count: usize,
    /// `root_degree_pmf[k] = P(D = k)` for `k in 0..n`.
    pub root_degree_pmf: Vec<f64>,
    /// `tail_pmf[d][z] = P(Z_{>=d} = z)` for `d in 0..n`, `z in 0..=n`.
    pub tail_pmf: Vec<Vec<f64>>,
    /// `targeted_cuts_pmf[c] = P(X^targ = c)`.
    pub targeted_cuts_pmf: Vec<f64>,
    pub expected_targeted_cuts: f64,
}

impl SmallNOracle {
    pub fn compute(n: usize) -> Result<Self> {
        let trees = enumerate_increasing_trees(n)?;
        let weight = 1.0 / trees.len() as f64;
        let mut root_degree_pmf = vec![0.0; n];
        let mut tail_pmf = vec![vec![0.0; n + 1]; n];
        let mut targeted_cuts_pmf = vec![0.0; n];
        for tree in &trees {
            root_degree_pmf[tree.root_degree()] += weight;
            let tail = tree.degree_tail();
            for (d, row) in tail_pmf.iter_mut().enumerate() {
                row[tail.at_least(d)] += weight;
            }
            for (c, p) in targeted_cut_law(tree).into_iter().enumerate() {
                targeted_cuts_pmf[c] += weight * p;
            }
        }
        let expected_targeted_cuts = targeted_cuts_pmf
            .iter()
            .enumerate()
            .map(|(c, p)| c as f64 * p)
            .sum();
        Ok(Self {
            n,
            tree_count: trees.len(),
            root_degree_pmf,
            tail_pmf,
            targeted_cuts_pmf,
            expected_targeted_cuts,
        })
    }

    pub fn expected_root_degree(&self) -> f64 {
        self.root_degree_pmf
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// `E[(Z_{>=d})_k]`.
    pub fn tail_factorial_moment(&self, d: usize, k: u32) -> f64 {
        match self.tail_pmf.get(d) {
            Some(row) => row
                .iter()
                .enumerate()
                .map(|(z, p)| falling_factorial(z as f64, k) * p)
                .sum(),
            None => 0.0,
        }
    }
}

/// Law of the targeted cut count on one tree, averaged over every order of
/// the equal-degree blocks at or above the root degree.
pub fn targeted_cut_law(tree: &RecursiveTree) -> Vec<f64> {
    let n = tree.len();
    let root_degree = tree.root_degree();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for d in (root_degree..=tree.max_degree()).rev() {
        let block: Vec<usize> = (1..=n).filter(|&v| tree.degree(v) == d).collect();
        if !block.is_empty() {
            blocks.push(block);
        }
    }
    let mut counts = vec![0u64; n.max(1)];
    let mut total = 0u64;
    let mut order = Vec::with_capacity(n);
    for_each_block_order(&mut blocks, 0, &mut order, &mut |order| {
        counts[cut_in_order(tree, order).0] += 1;
        total += 1;
    });
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}

fn for_each_block_order(
    blocks: &mut [Vec<usize>],
    level: usize,
    order: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if level == blocks.len() {
        visit(order);
        return;
    }
    let len = blocks[level].len();
    permute(blocks, level, len, order, visit);
}

// Heap's algorithm over blocks[level], recursing into the next block for
// every permutation.
fn permute(
    blocks: &mut [Vec<usize>],
    level: usize,
    k: usize,
    order: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if k <= 1 {
        let base = order.len();
        order.extend_from_slice(&blocks[level]);
        for_each_block_order(blocks, level + 1, order, visit);
        order.truncate(base);
        return;
    }
    for i in 0..k - 1 {
        permute(blocks, level, k - 1, order, visit);
        if k % 2 == 0 {
            blocks[level].swap(i, k - 1);
        } else {
            blocks[level].swap(0, k - 1);
        }
    }
    permute(blocks, level, k - 1, order, visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_oracle() {
        let o = SmallNOracle::compute(3).unwrap();
        assert_eq!(o.tree_count, 2);
        assert_eq!(o.expected_targeted_cuts, 0.25);
        assert_eq!(o.root_degree_pmf[1], 0.5);
        assert_eq!(o.root_degree_pmf[2], 0.5);
        assert_eq!(o.expected_root_degree(), 1.5);
    }

    #[test]
    fn path_law() {
        let law = targeted_cut_law(&"0 1 2".parse().unwrap());
        assert_eq!(law, vec![0.5, 0.5, 0.0]);
        let star = targeted_cut_law(&"0 1 1".parse().unwrap());
        assert_eq!(star[0], 1.0);
    }

    #[test]
    fn heap_visits_every_permutation() {
        let t: RecursiveTree = "0 1 2 3 4 5".parse().unwrap();
        // Path of 6: vertices 1..=5 share degree 1, so 5! orders.
        let mut blocks = vec![vec![1, 2, 3, 4, 5]];
        let mut seen = std::collections::BTreeSet::new();
        let mut order = Vec::new();
        for_each_block_order(&mut blocks, 0, &mut order, &mut |o| {
            seen.insert(o.to_vec());
        });
        assert_eq!(seen.len(), 120);
        let law = targeted_cut_law(&t);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_root_degree_mean_is_harmonic() {
        for n in 2..=7 {
            let o = SmallNOracle::compute(n).unwrap();
            let h: f64 = (1..n).map(|j| 1.0 / j as f64).sum();
            assert!((o.expected_root_degree() - h).abs() < 1e-12);
            assert!((o.tail_factorial_moment(0, 1) - n as f64).abs() < 1e-12);
        }
    }
}
