//! Exhaustive ground truth for small instances and planted instance
//! generation for property tests.
//!
//! The backtracking enumerator walks every assignment of a parent (an
//! in-neighbor) to every non-root vertex, pruning assignments that close a
//! cycle. A second enumerator filters all (n-1)-arc subsets and exists only
//! to cross-check the first on tiny graphs.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::graph::{Digraph, OutBranching, Vertex};

/// Visits every spanning out-branching of `d` rooted at `r` exactly once.
/// The visitor returns `false` to stop early. Yields nothing iff `r` does
/// not reach every vertex.
pub fn for_each_out_branching<F>(d: &Digraph, r: Vertex, mut f: F)
where
    F: FnMut(&OutBranching) -> bool,
{
    let n = d.n();
    if n == 0 || r >= n || !d.reaches_all(r) {
        return;
    }
    if n == 1 {
        let b = OutBranching::validated(d, r, BTreeMap::new()).expect("single vertex");
        f(&b);
        return;
    }
    let targets: Vec<Vertex> = (0..n).filter(|&v| v != r).collect();
    let mut parent = vec![usize::MAX; n];
    let mut stop = false;

    fn closes_cycle(parent: &[usize], r: Vertex, mut cur: Vertex, child: Vertex) -> bool {
        // Walk up from the candidate parent through assigned entries.
        loop {
            if cur == child {
                return true;
            }
            if cur == r || parent[cur] == usize::MAX {
                return false;
            }
            cur = parent[cur];
        }
    }

    fn rec<F: FnMut(&OutBranching) -> bool>(
        d: &Digraph,
        r: Vertex,
        targets: &[Vertex],
        idx: usize,
        parent: &mut Vec<usize>,
        stop: &mut bool,
        f: &mut F,
    ) {
        if *stop {
            return;
        }
        if idx == targets.len() {
            let map: BTreeMap<Vertex, Vertex> = targets.iter().map(|&v| (v, parent[v])).collect();
            let b = OutBranching::validated(d, r, map)
                .expect("cycle-free full assignment is a branching");
            if !f(&b) {
                *stop = true;
            }
            return;
        }
        let v = targets[idx];
        for &u in d.in_neighbors(v) {
            if closes_cycle(parent, r, u, v) {
                continue;
            }
            parent[v] = u;
            rec(d, r, targets, idx + 1, parent, stop, f);
            parent[v] = usize::MAX;
            if *stop {
                return;
            }
        }
    }

    rec(d, r, &targets, 0, &mut parent, &mut stop, &mut f);
}

/// Collects every r-rooted out-branching. Intended for small `n` only.
pub fn enumerate_out_branchings(d: &Digraph, r: Vertex) -> Vec<OutBranching> {
    let mut out = Vec::new();
    for_each_out_branching(d, r, |b| {
        out.push(b.clone());
        true
    });
    out
}

/// Independent cross-check of the backtracking enumerator: tries every
/// (n-1)-subset of the arcs and keeps those forming an r-rooted branching.
pub fn enumerate_by_arc_subsets(d: &Digraph, r: Vertex) -> Vec<OutBranching> {
    let n = d.n();
    if n == 1 {
        return if r == 0 {
            vec![OutBranching::validated(d, r, BTreeMap::new()).unwrap()]
        } else {
            Vec::new()
        };
    }
    let arcs: Vec<_> = d.arcs().collect();
    if n == 0 || arcs.len() < n - 1 {
        return Vec::new();
    }
    let mut found = Vec::new();
    let mut pick = vec![0usize; n - 1];
    fn rec(
        arcs: &[(usize, usize)],
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        depth: usize,
        d: &Digraph,
        r: Vertex,
        found: &mut Vec<OutBranching>,
    ) {
        if depth == k {
            let map: BTreeMap<Vertex, Vertex> =
                pick.iter().map(|&i| (arcs[i].1, arcs[i].0)).collect();
            if map.len() == k && !map.contains_key(&r) {
                if let Ok(b) = OutBranching::validated(d, r, map) {
                    found.push(b);
                }
            }
            return;
        }
        for i in start..arcs.len() {
            pick[depth] = i;
            rec(arcs, k, i + 1, pick, depth + 1, d, r, found);
        }
    }
    rec(&arcs, n - 1, 0, &mut pick, 0, d, r, &mut found);
    found
}

/// Maximum leaf count over every root and every out-branching, with one
/// witness attaining it. `(0, None)` when no out-branching exists.
pub fn brute_force_max_leaves(d: &Digraph) -> (usize, Option<OutBranching>) {
    let n = d.n();
    let mut best = 0usize;
    let mut witness: Option<OutBranching> = None;
    let cap = if n <= 1 { 1 } else { n - 1 };
    for r in 0..n {
        if best == cap {
            break;
        }
        for_each_out_branching(d, r, |b| {
            let leaves = b.leaf_count();
            if leaves > best || witness.is_none() {
                best = leaves;
                witness = Some(b.clone());
            }
            best < cap
        });
    }
    (best, witness)
}

/// Kinds of planted instance; selected by the seed in `plant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantKind {
    /// Small instance embedding a known tree with at least k leaves.
    Leafy,
    /// Two-lane spine forcing the heavy-pair scan to fire; the witness
    /// paths leave the branching through a leaf tail.
    TriggerLeafTail,
    /// Three-lane variant whose witness paths re-enter through a branch
    /// successor. Needs k >= 4 to keep the branching small enough.
    TriggerBranchReentry,
}

/// Seed-routed planted instance family; vertex 0 always spans.
///
/// `seed % 4 == 0` yields a small instance with a known k-leaf branching;
/// other residues yield trigger instances on which the heavy-pair scan
/// fires for the given k (the branch-reentry family requires k >= 4 and
/// falls back to the leaf-tail family below that).
pub fn plant(k: usize, seed: u64) -> Digraph {
    assert!(k >= 2, "planted instances require k >= 2");
    match seed % 4 {
        0 => plant_leafy(k, seed),
        3 if k >= 4 => plant_trigger_branch_reentry(k, seed),
        _ => plant_trigger_leaf_tail(k, seed),
    }
}

/// Small digraph (n <= 8) that contains a known out-branching with at least
/// k leaves, plus random noise arcs.
pub fn plant_leafy(k: usize, seed: u64) -> Digraph {
    let mut rng = StdRng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
    let n = rng.random_range((k + 1).max(3)..=8.max(k + 1));
    // Random tree out of 0; fall back to a star when it is not leafy enough.
    let mut parents: Vec<Vertex> = (1..n).map(|v| rng.random_range(0..v)).collect();
    let leaves = |ps: &[Vertex]| {
        let mut is_leaf = vec![true; n];
        for &p in ps {
            is_leaf[p] = false;
        }
        is_leaf.iter().skip(1).filter(|&&b| b).count() + usize::from(is_leaf[0])
    };
    if leaves(&parents) < k {
        parents = vec![0; n - 1];
    }
    let mut arcs: Vec<(Vertex, Vertex)> = parents
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i + 1))
        .collect();
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            arcs.push((u, v));
        }
    }
    Digraph::new(n, arcs).unwrap()
}

/// Two-lane trigger family. A main lane of length 2M (M = 6k²) carries M
/// planted back arcs with distinct heads, and a short second lane ending in
/// a leaf provides exit arcs that make every back arc usable from the root.
/// The greedy 1-optimal branching of the instance is the two lanes, it has
/// two leaves, and |HB| = M fires at the first vertex past the planted
/// heads.
pub fn plant_trigger_leaf_tail(k: usize, seed: u64) -> Digraph {
    assert!(k >= 2);
    let mut rng = StdRng::seed_from_u64(seed ^ 0xa5a5_0000 ^ (k as u64));
    let m = 6 * k * k;
    let slack = rng.random_range(0..=4);
    let lane_len = 2 * m + slack; // main lane m_0 .. m_{lane_len}
    let bypass_len = rng.random_range(0..=3); // b_0 .. b_{bypass_len}

    // Indices: root 0, main lane 1..=lane_len+1, bypass after it.
    let main = |i: usize| 1 + i;
    let b0 = lane_len + 2;
    let bp = b0 + bypass_len;
    let n = bp + 1;

    let mut arcs = Vec::new();
    arcs.push((0, main(0)));
    for i in 0..lane_len {
        arcs.push((main(i), main(i + 1)));
    }
    arcs.push((0, b0));
    for b in b0..bp {
        arcs.push((b, b + 1));
    }
    // Exit arcs from the bypass leaf into the main lane; the one landing
    // just past the planted heads keeps every back arc reachable.
    arcs.push((bp, main(m + 1)));
    for _ in 0..rng.random_range(0..=3) {
        arcs.push((bp, main(rng.random_range(2..=m + 1))));
    }
    // Planted back arcs: head m_i, tail m_{m + sigma(i)} for a permutation.
    let mut sigma: Vec<usize> = (1..=m).collect();
    sigma.shuffle(&mut rng);
    for (idx, &s) in sigma.iter().enumerate() {
        arcs.push((main(m + s), main(idx + 1)));
    }
    // Extra back arcs with duplicate heads keep |HB| unchanged.
    for _ in 0..rng.random_range(0..=m / 2) {
        let h = rng.random_range(1..=m);
        let t = rng.random_range(m + 1..=2 * m);
        arcs.push((main(t), main(h)));
    }
    Digraph::new(n, arcs).unwrap()
}

/// Three-lane trigger family for k >= 4. The main lane branches past the
/// planted heads into a stub, so the re-entry vertex is a branch successor
/// and the exit tail is an internal bypass vertex. The greedy 1-optimal
/// branching has three leaves.
pub fn plant_trigger_branch_reentry(k: usize, seed: u64) -> Digraph {
    assert!(k >= 4, "branch-reentry family needs k >= 4");
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5a5a_0000 ^ (k as u64));
    let m = 6 * k * k;
    let slack = rng.random_range(0..=4);
    let lane_len = 2 * m + 2 + slack;
    let stub_len = rng.random_range(1..=2);
    let bypass_len = rng.random_range(1..=3);

    let main = |i: usize| 1 + i;
    let s0 = lane_len + 2;
    let b0 = s0 + stub_len;
    let bp = b0 + bypass_len;
    let n = bp + 1;
    let gamma = main(m + 1); // branch vertex on the main lane
    let reentry = main(m + 2); // its lane child, a branch successor

    let mut arcs = Vec::new();
    arcs.push((0, main(0)));
    for i in 0..lane_len {
        arcs.push((main(i), main(i + 1)));
    }
    // Stub off the branch vertex.
    arcs.push((gamma, s0));
    for s in s0..b0 - 1 {
        arcs.push((s, s + 1));
    }
    // Bypass lane and a single exit from an internal bypass vertex.
    arcs.push((0, b0));
    for b in b0..bp {
        arcs.push((b, b + 1));
    }
    arcs.push((bp - 1, reentry));
    // Planted back arcs: head m_i, tail past the re-entry vertex.
    let mut sigma: Vec<usize> = (1..=m).collect();
    sigma.shuffle(&mut rng);
    for (idx, &s) in sigma.iter().enumerate() {
        arcs.push((main(m + 2 + s), main(idx + 1)));
    }
    Digraph::new(n, arcs).unwrap()
}
