//! Height-indexed path decomposition of the underlying undirected graph.
//!
//! Bag i collects the vertices at tree height i, every leaf, every branch
//! successor, and every vertex below height i that still has an undirected
//! neighbor at height >= i outside the leaf/branch-successor sets. On a
//! 1-optimal branching with fewer than k leaves and no heavy pair, the
//! width stays below 6k³.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Digraph, OutBranching, Vertex};

/// Ordered bag sequence over an undirected vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<Vec<Vertex>>,
}

/// Which of the three path-decomposition axioms failed, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// A vertex appears in no bag.
    Cover { vertex: Vertex },
    /// An edge has no bag containing both ends.
    Edge { edge: (Vertex, Vertex) },
    /// The bags containing a vertex are not consecutive.
    Consecutive { vertex: Vertex, gap_bag: usize },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Cover { vertex } => {
                write!(f, "vertex {vertex} is in no bag")
            }
            AxiomViolation::Edge { edge } => {
                write!(f, "edge ({}, {}) has no common bag", edge.0, edge.1)
            }
            AxiomViolation::Consecutive { vertex, gap_bag } => {
                write!(
                    f,
                    "bags containing vertex {vertex} are interrupted at bag {gap_bag}"
                )
            }
        }
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<Vec<Vertex>>) -> Self {
        let mut bags = bags;
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn bag_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the three axioms against a graph on `n` vertices with the
    /// given undirected edges. Returns the first violation found.
    pub fn validate(&self, n: usize, edges: &BTreeSet<(Vertex, Vertex)>) -> Option<AxiomViolation> {
        let mut first = vec![usize::MAX; n];
        let mut last = vec![usize::MAX; n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Some(AxiomViolation::Cover { vertex: v });
                }
                if first[v] == usize::MAX {
                    first[v] = i;
                }
                last[v] = i;
            }
        }
        for v in 0..n {
            if first[v] == usize::MAX {
                return Some(AxiomViolation::Cover { vertex: v });
            }
        }
        for &(a, b) in edges {
            let common = self
                .bags
                .iter()
                .any(|bag| bag.binary_search(&a).is_ok() && bag.binary_search(&b).is_ok());
            if !common {
                return Some(AxiomViolation::Edge { edge: (a, b) });
            }
        }
        for v in 0..n {
            for i in first[v]..=last[v] {
                if self.bags[i].binary_search(&v).is_err() {
                    return Some(AxiomViolation::Consecutive { vertex: v, gap_bag: i });
                }
            }
        }
        None
    }

    /// Line-based text form: header `pd <bags> <width>` then one line per
    /// bag listing its vertices.
    pub fn emit(&self) -> String {
        let mut out = format!("pd {} {}\n", self.bag_count(), self.width());
        for bag in &self.bags {
            let line: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Tree depth of `v`; the root has height 0.
pub fn height(t: &OutBranching, v: Vertex) -> Result<usize> {
    t.depth(v)
}

/// Builds the height-indexed decomposition for a branching `t` spanning
/// `d`. The single-vertex case degenerates to one bag holding the root.
pub fn build_path_decomposition(d: &Digraph, t: &OutBranching) -> Result<PathDecomposition> {
    if t.n() != d.n() {
        return Err(Error::invalid("branching does not span the digraph"));
    }
    let n = d.n();
    let mut h = vec![0usize; n];
    let mut max_h = 0;
    for v in 0..n {
        h[v] = t.depth(v)?;
        max_h = max_h.max(h[v]);
    }
    if max_h == 0 {
        return Ok(PathDecomposition::new(vec![vec![t.root()]]));
    }

    let leaves = t.leaves();
    let br_succ = t.br_succ();
    let in_r = |v: Vertex| !leaves.contains(&v) && !br_succ.contains(&v);

    // Highest height of an undirected neighbor that lies in R.
    let mut max_r_neighbor = vec![0usize; n];
    let mut has_r_neighbor = vec![false; n];
    for (a, b) in d.underlying_edges() {
        if in_r(b) && (!has_r_neighbor[a] || h[b] > max_r_neighbor[a]) {
            has_r_neighbor[a] = true;
            max_r_neighbor[a] = h[b];
        }
        if in_r(a) && (!has_r_neighbor[b] || h[a] > max_r_neighbor[b]) {
            has_r_neighbor[b] = true;
            max_r_neighbor[b] = h[a];
        }
    }

    let mut bags = Vec::with_capacity(max_h);
    for i in 1..=max_h {
        let mut bag: Vec<Vertex> = Vec::new();
        for v in 0..n {
            let at_height = h[v] == i;
            let always = leaves.contains(&v) || br_succ.contains(&v);
            let trailing = has_r_neighbor[v] && h[v] < i && i <= max_r_neighbor[v];
            if at_height || always || trailing {
                bag.push(v);
            }
        }
        if i == 1 {
            let r = t.root();
            if bag.binary_search(&r).is_err() {
                bag.push(r);
            }
        }
        bags.push(bag);
    }
    Ok(PathDecomposition::new(bags))
}

/// Width test against the 6k³ bound.
pub fn check_width_bound(pd: &PathDecomposition, k: usize) -> bool {
    pd.width() <= 6 * k * k * k
}
