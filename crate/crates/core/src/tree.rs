//! Increasing trees stored as parent arrays.
//!
//! Vertices are labelled `1..=n` and vertex 1 is the root. The degree of a
//! vertex is its number of children (edges directed towards it).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Largest size accepted by [`enumerate_increasing_trees`]; `(8-1)! = 5040`.
pub const MAX_ENUMERATION_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveTree {
    // parent[v] for v in 1..=n; parent[0] and parent[1] are 0.
    parent: Vec<u32>,
    degree: Vec<u32>,
}

impl RecursiveTree {
    /// Grows a uniform random recursive tree: vertex `i` attaches to a
    /// uniform vertex of `1..i`, independently for each `i`.
    pub fn generate(n: usize, rng: &mut RngStream) -> Result<Self> {
        if n == 0 {
            return invalid("tree size must be at least 1");
        }
        if n > u32::MAX as usize - 1 {
            return invalid(format!("tree size {n} too large"));
        }
        let mut parent = vec![0u32; n + 1];
        let mut degree = vec![0u32; n + 1];
        for i in 2..=n as u32 {
            let p = rng.random_range(1..i);
            parent[i as usize] = p;
            degree[p as usize] += 1;
        }
        Ok(Self { parent, degree })
    }

    /// Builds a tree from the parents of vertices `1..=n`, where the first
    /// entry (the root) must be 0.
    pub fn from_parents(parents: &[usize]) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::MalformedTree("empty parent list".into()));
        }
        if parents[0] != 0 {
            return Err(Error::MalformedTree(format!(
                "root sentinel must be 0, found {}",
                parents[0]
            )));
        }
        let mut parent = vec![0u32; n + 1];
        let mut degree = vec![0u32; n + 1];
        for (idx, &p) in parents.iter().enumerate().skip(1) {
            let v = idx + 1;
            if p == 0 || p >= v {
                return Err(Error::MalformedTree(format!(
                    "vertex {v} has parent {p}, expected a value in 1..{v}"
                )));
            }
            parent[v] = p as u32;
            degree[p] += 1;
        }
        Ok(Self { parent, degree })
    }

    pub fn len(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parent of `v`, or `None` for the root.
    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            0 => None,
            p => Some(p as usize),
        }
    }

    #[inline]
    pub(crate) fn parent_raw(&self, v: usize) -> usize {
        self.parent[v] as usize
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn root_degree(&self) -> usize {
        self.degree(1)
    }

    pub fn max_degree(&self) -> usize {
        self.degree[1..].iter().copied().max().unwrap_or(0) as usize
    }

    /// Degrees indexed by vertex; entry 0 is unused and always 0.
    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    /// Parent of every vertex `1..=n` with 0 for the root.
    pub fn parents(&self) -> Vec<usize> {
        self.parent[1..].iter().map(|&p| p as usize).collect()
    }

    pub fn children(&self) -> Children {
        Children::new(self)
    }

    pub fn degree_tail(&self) -> TailCounts {
        TailCounts::from_degrees(&self.degree[1..])
    }

    /// Vertices whose path to the root avoids every vertex in `removed`,
    /// in increasing order.
    pub fn root_subtree_after_removal(&self, removed: &[usize]) -> Result<Vec<usize>> {
        let n = self.len();
        let mut cut = vec![false; n + 1];
        for &v in removed {
            if v == 1 {
                return invalid("the root cannot be removed");
            }
            if v == 0 || v > n {
                return invalid(format!("vertex {v} is not in a tree of size {n}"));
            }
            cut[v] = true;
        }
        // parent[v] < v, so one increasing sweep settles every vertex.
        let mut alive = vec![false; n + 1];
        alive[1] = true;
        for v in 2..=n {
            alive[v] = !cut[v] && alive[self.parent_raw(v)];
        }
        Ok((1..=n).filter(|&v| alive[v]).collect())
    }

    /// Root-to-vertex depth (root has depth 0).
    pub fn depth(&self, mut v: usize) -> usize {
        let mut depth = 0;
        while v != 1 {
            v = self.parent_raw(v);
            depth += 1;
        }
        depth
    }
}

impl fmt::Display for RecursiveTree {
    /// Whitespace separated parent list, `0 1 1 2 ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parent[1..].iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for RecursiveTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parents = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::MalformedTree(format!("bad parent entry {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parents(&parents)
    }
}

impl Serialize for RecursiveTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Children lists in compressed (CSR) form, sorted by label.
#[derive(Debug, Clone)]
pub struct Children {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Children {
    fn new(tree: &RecursiveTree) -> Self {
        let n = tree.len();
        let mut offsets = vec![0u32; n + 2];
        for v in 1..=n {
            offsets[v + 1] = offsets[v] + tree.degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; n.saturating_sub(1)];
        for v in 2..=n {
            let p = tree.parent_raw(v);
            targets[fill[p] as usize] = v as u32;
            fill[p] += 1;
        }
        Self { offsets, targets }
    }

    #[inline]
    pub fn of(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Degree-tail profile `Z_{>=d}` of one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailCounts {
    pub n: usize,
    pub root_degree: usize,
    pub max_degree: usize,
    /// `tail[d]` = number of vertices with degree at least `d`, for
    /// `d in 0..=max_degree + 1` (the last entry is 0).
    pub tail: Vec<usize>,
}

impl TailCounts {
    /// `degrees[0]` must be the root's degree.
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let n = degrees.len();
        let max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut tail = vec![0usize; max_degree + 2];
        for &d in degrees {
            tail[d as usize] += 1;
        }
        for d in (0..=max_degree).rev() {
            tail[d] += tail[d + 1];
        }
        Self {
            n,
            root_degree: degrees.first().copied().unwrap_or(0) as usize,
            max_degree,
            tail,
        }
    }

    /// `Z_{>=d}`; zero for `d > max_degree`.
    #[inline]
    pub fn at_least(&self, d: usize) -> usize {
        self.tail.get(d).copied().unwrap_or(0)
    }

    /// `Z_{>=D}` with `D` the root degree.
    pub fn at_root_degree(&self) -> usize {
        self.at_least(self.root_degree)
    }
}

/// Every increasing tree on `n` vertices, each exactly once, ordered
/// lexicographically by parent list.
pub fn enumerate_increasing_trees(n: usize) -> Result<Vec<RecursiveTree>> {
    if !(2..=MAX_ENUMERATION_SIZE).contains(&n) {
        return invalid(format!(
            "enumeration size must be in 2..={MAX_ENUMERATION_SIZE}, got {n}"
        ));
    }
    let mut out = Vec::new();
    let mut parents = vec![1usize; n];
    parents[0] = 0;
    loop {
        out.push(RecursiveTree::from_parents(&parents)?);
        // Odometer over parents[i] in 1..=i (vertex i+1 picks from 1..=i).
        let mut i = n - 1;
        loop {
            if i == 1 {
                return Ok(out);
            }
            if parents[i] < i {
                parents[i] += 1;
                break;
            }
            parents[i] = 1;
            i -= 1;
        }
    }
}
