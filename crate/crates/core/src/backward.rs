//! Backward-arc sets and the heavy-pair scan.
//!
//! For a leaf l and a vertex z on the root-to-l path, the backward arcs
//! B(z, l) are the digraph arcs whose head lies strictly above z and whose
//! tail lies on the z-to-l stretch of the path. HB(z, l) drops heads that are
//! branch successors. Once |HB| reaches 6k² on a 1-optimal branching of a
//! useless-arc-free digraph, a k-leaf branching can be constructed.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exec::{find_map_first, Strategy};
use crate::graph::{Arc, Digraph, OutBranching, Vertex};

/// Evidence for a heavy pair: the pair itself with its B and HB sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardReport {
    pub z: Vertex,
    pub l: Vertex,
    /// B(z, l), sorted by (tail, head).
    pub arcs: Vec<Arc>,
    /// HB(z, l): heads of `arcs` that are not branch successors.
    pub heads: BTreeSet<Vertex>,
}

impl BackwardReport {
    /// Re-derives both sets and checks the structural invariants.
    pub fn validate(&self, d: &Digraph, t: &OutBranching) -> Result<()> {
        if !t.leaves().contains(&self.l) {
            return Err(Error::invalid(format!("{} is not a leaf", self.l)));
        }
        if !t.tree_leq(self.z, self.l)? {
            return Err(Error::invalid(format!(
                "{} does not precede leaf {}",
                self.z, self.l
            )));
        }
        let arcs = backward_arcs(d, t, self.z, self.l)?;
        if arcs != self.arcs {
            return Err(Error::invariant("stored B set does not match recomputation"));
        }
        let heads = hb_set(d, t, self.z, self.l)?;
        if heads != self.heads {
            return Err(Error::invariant("stored HB set does not match recomputation"));
        }
        Ok(())
    }
}

fn check_pair(t: &OutBranching, z: Vertex, l: Vertex) -> Result<Vec<Vertex>> {
    if !t.leaves().contains(&l) {
        return Err(Error::invalid(format!("{l} is not a leaf of the branching")));
    }
    if !t.tree_leq(z, l)? {
        return Err(Error::invalid(format!("{z} does not precede leaf {l}")));
    }
    t.path_from_root(l)
}

/// B(z, l): arcs (u, v) with v strictly above z and z ⪯ u ⪯ l in the tree
/// order, sorted by (tail, head).
pub fn backward_arcs(d: &Digraph, t: &OutBranching, z: Vertex, l: Vertex) -> Result<Vec<Arc>> {
    let path = check_pair(t, z, l)?;
    let mut pos = vec![usize::MAX; d.n()];
    for (i, &v) in path.iter().enumerate() {
        pos[v] = i;
    }
    let iz = pos[z];
    let mut arcs: Vec<Arc> = d
        .arcs()
        .filter(|&(u, v)| {
            pos[u] != usize::MAX && pos[u] >= iz && pos[v] != usize::MAX && pos[v] < iz
        })
        .collect();
    arcs.sort_unstable();
    Ok(arcs)
}

/// Heads of B(z, l) minus the branch successors of `t`.
pub fn hb_set(d: &Digraph, t: &OutBranching, z: Vertex, l: Vertex) -> Result<BTreeSet<Vertex>> {
    let br_succ = t.br_succ();
    Ok(backward_arcs(d, t, z, l)?
        .into_iter()
        .map(|(_, v)| v)
        .filter(|v| !br_succ.contains(v))
        .collect())
}

/// Per-position |HB| counts along the root-to-`l` path, maintained
/// incrementally with one sweep. Index i holds |HB(path[i], l)|.
pub(crate) fn hb_counts_along_path(
    d: &Digraph,
    path: &[Vertex],
    br_succ: &BTreeSet<Vertex>,
    n: usize,
) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in path.iter().enumerate() {
        pos[v] = i;
    }
    // Candidate arcs both of whose ends sit on the path, head before tail.
    // Arc (tail at a, head at b) is in B(path[i], l) exactly for b < i <= a.
    let mut start_at: Vec<Vec<Vertex>> = vec![Vec::new(); path.len() + 1];
    let mut end_at: Vec<Vec<Vertex>> = vec![Vec::new(); path.len() + 1];
    for (u, v) in d.arcs() {
        let (a, b) = (pos[u], pos[v]);
        if a == usize::MAX || b == usize::MAX || b >= a || br_succ.contains(&v) {
            continue;
        }
        start_at[b + 1].push(v);
        end_at[a + 1].push(v);
    }
    let mut mult = vec![0usize; n];
    let mut distinct = 0usize;
    let mut counts = Vec::with_capacity(path.len());
    for i in 0..path.len() {
        for &h in &start_at[i] {
            if mult[h] == 0 {
                distinct += 1;
            }
            mult[h] += 1;
        }
        for &h in &end_at[i] {
            mult[h] -= 1;
            if mult[h] == 0 {
                distinct -= 1;
            }
        }
        counts.push(distinct);
    }
    counts
}

/// Scans for a pair (z, l) with |HB(z, l)| ≥ 6k², walking z down the
/// root-to-l path of each leaf. Returns the first hit in
/// (leaf index, depth of z) order, or `None` when every pair stays below the
/// threshold.
pub fn find_heavy_pair(d: &Digraph, t: &OutBranching, k: usize) -> Result<Option<BackwardReport>> {
    find_heavy_pair_with(d, t, k, Strategy::auto())
}

/// As `find_heavy_pair`, with the per-leaf scans run under `strategy`.
pub fn find_heavy_pair_with(
    d: &Digraph,
    t: &OutBranching,
    k: usize,
    strategy: Strategy,
) -> Result<Option<BackwardReport>> {
    if t.n() != d.n() {
        return Err(Error::invalid("branching does not span the digraph"));
    }
    let threshold = 6 * k * k;
    let br_succ = t.br_succ();
    let leaves: Vec<Vertex> = t.leaves().into_iter().collect();

    let hit = find_map_first(strategy, &leaves, |&l| {
        let path = t.path_from_root(l).expect("leaf is a tree vertex");
        let counts = hb_counts_along_path(d, &path, &br_succ, d.n());
        // z must lie strictly above the leaf.
        counts[..path.len() - 1]
            .iter()
            .position(|&c| c >= threshold)
            .map(|i| (path[i], l))
    });

    match hit {
        None => Ok(None),
        Some((z, l)) => {
            let arcs = backward_arcs(d, t, z, l)?;
            let heads = hb_set(d, t, z, l)?;
            debug_assert!(heads.len() >= threshold);
            Ok(Some(BackwardReport { z, l, arcs, heads }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    fn path_branching(d: &Digraph, n: usize) -> OutBranching {
        let parent = (1..n).map(|v| (v, v - 1)).collect();
        OutBranching::validated(d, 0, parent).unwrap()
    }

    #[test]
    fn dipath_has_no_backward_arcs() {
        let d = Digraph::new(4, (0..3).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let t = path_branching(&d, 4);
        for z in 0..4 {
            assert!(backward_arcs(&d, &t, z, 3).unwrap().is_empty());
        }
        assert_eq!(find_heavy_pair(&d, &t, 1).unwrap(), None);
    }

    #[test]
    fn single_back_arc_is_found_between_its_ends() {
        // r -> a -> b -> c plus (c, a).
        let d = Digraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        let t = path_branching(&d, 4);
        assert_eq!(backward_arcs(&d, &t, 2, 3).unwrap(), vec![(3, 1)]);
        // Strictness: the head must sit strictly above z.
        assert!(backward_arcs(&d, &t, 1, 3).unwrap().is_empty());
        assert_eq!(hb_set(&d, &t, 2, 3).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn hb_drops_branch_successor_heads() {
        // Branch below vertex 2; heads 0 (plain) and 1 (branch successor...)
        // Tree: 0 -> 1 -> 3, 0 -> 2, 3 -> 4; arcs (4, 0) and (4, 1) go back.
        let d = Digraph::new(
            5,
            vec![(0, 1), (0, 2), (1, 3), (3, 4), (4, 0), (4, 1)],
        )
        .unwrap();
        let t = OutBranching::validated(
            &d,
            0,
            BTreeMap::from([(1, 0), (2, 0), (3, 1), (4, 3)]),
        )
        .unwrap();
        assert_eq!(t.br_succ(), BTreeSet::from([1, 2]));
        assert_eq!(
            backward_arcs(&d, &t, 3, 4).unwrap(),
            vec![(4, 0), (4, 1)]
        );
        assert_eq!(hb_set(&d, &t, 3, 4).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn pair_preconditions_are_checked() {
        let d = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let t = path_branching(&d, 3);
        assert!(backward_arcs(&d, &t, 0, 1).is_err()); // 1 is not a leaf
        assert!(backward_arcs(&d, &t, 2, 2).is_ok()); // z = l allowed here
    }

    #[test]
    fn six_planted_heads_trigger_k1() {
        // Spine 0..=12 with six back arcs (7+i, 1+i); threshold 6*1 = 6.
        let mut arcs: Vec<Arc> = (0..12).map(|i| (i, i + 1)).collect();
        for i in 0..6 {
            arcs.push((7 + i, 1 + i));
        }
        let d = Digraph::new(13, arcs).unwrap();
        let t = path_branching(&d, 13);
        let rep = find_heavy_pair(&d, &t, 1).unwrap().expect("must fire");
        assert_eq!(rep.l, 12);
        assert_eq!(rep.z, 7);
        assert!(rep.heads.len() >= 6);
        rep.validate(&d, &t).unwrap();
        // One step earlier only five heads cross.
        assert_eq!(hb_set(&d, &t, 6, 12).unwrap().len(), 5);
    }

    #[test]
    fn incremental_counts_match_scratch_recomputation() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..60 {
            let n = rng.random_range(2..=10);
            let mut arcs: Vec<Arc> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.3) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::new(n, arcs).unwrap();
            let t = crate::graph::extend_to_out_branching(
                &d,
                &crate::graph::OutTree::singleton(0),
            )
            .unwrap();
            let br_succ = t.br_succ();
            for l in t.leaves() {
                let path = t.path_from_root(l).unwrap();
                let counts = hb_counts_along_path(&d, &path, &br_succ, n);
                for (i, &z) in path.iter().enumerate() {
                    assert_eq!(
                        counts[i],
                        hb_set(&d, &t, z, l).unwrap().len(),
                        "n={n} l={l} z={z}"
                    );
                }
            }
        }
    }

    #[test]
    fn none_means_every_pair_is_below_threshold() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..40 {
            let n = rng.random_range(2..=9);
            let mut arcs: Vec<Arc> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.35) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::new(n, arcs).unwrap();
            let t = crate::graph::extend_to_out_branching(
                &d,
                &crate::graph::OutTree::singleton(0),
            )
            .unwrap();
            let k = 1;
            let fired = find_heavy_pair(&d, &t, k).unwrap().is_some();
            let mut max_hb = 0;
            for l in t.leaves() {
                let path = t.path_from_root(l).unwrap();
                for &z in &path[..path.len() - 1] {
                    max_hb = max_hb.max(hb_set(&d, &t, z, l).unwrap().len());
                }
            }
            assert_eq!(fired, max_hb >= 6 * k * k);
            assert!(max_hb <= n);
        }
    }

    #[test]
    fn sequential_and_parallel_scans_agree() {
        let mut arcs: Vec<Arc> = (0..12).map(|i| (i, i + 1)).collect();
        for i in 0..6 {
            arcs.push((7 + i, 1 + i));
        }
        let d = Digraph::new(13, arcs).unwrap();
        let t = path_branching(&d, 13);
        let seq = find_heavy_pair_with(&d, &t, 1, Strategy::Sequential).unwrap();
        let par = find_heavy_pair_with(&d, &t, 1, Strategy::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}
