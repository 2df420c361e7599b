//! Leaf-counting dynamic programming over a nice path decomposition.
//!
//! The decomposition is refined into introduce / forget / edge events. A
//! state tracks, per active vertex, whether it has a parent yet, whether it
//! has adopted a child, and the connected block of the partial branching it
//! sits in; the leaf counter saturates at k. A vertex is a leaf exactly when
//! it is forgotten without ever adopting, so leaves are counted at forget
//! time. States that strand a block (no active vertex left, not the root
//! block at the very end) are dead and dropped.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Digraph, OutBranching, Vertex};
use crate::pathdecomp::PathDecomposition;
use crate::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceEvent {
    Introduce(Vertex),
    Forget(Vertex),
    /// Underlying edge, endpoints in ascending order. The event offers the
    /// digraph arcs that exist between the two ends.
    Edge(Vertex, Vertex),
}

/// Event refinement of a path decomposition. Every vertex is introduced and
/// forgotten exactly once, and every underlying edge appears exactly once
/// while both ends are active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicePathDecomposition {
    pub events: Vec<NiceEvent>,
}

/// Refines a validated path decomposition: between consecutive bags the
/// removed vertices are forgotten and the added ones introduced, each edge
/// is scheduled at the first bag containing both ends, and the final bag is
/// flushed with trailing forgets.
pub fn to_nice(
    pd: &PathDecomposition,
    n: usize,
    edges: &BTreeSet<(Vertex, Vertex)>,
) -> Result<NicePathDecomposition> {
    if let Some(violation) = pd.validate(n, edges) {
        return Err(Error::invalid(format!(
            "invalid path decomposition: {violation}"
        )));
    }
    let bags = pd.bags();
    let mut first = vec![usize::MAX; n];
    for (i, bag) in bags.iter().enumerate() {
        for &v in bag {
            if first[v] == usize::MAX {
                first[v] = i;
            }
        }
    }
    let mut edges_at: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); bags.len()];
    for &(a, b) in edges {
        edges_at[first[a].max(first[b])].push((a, b));
    }
    let mut events = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        if i == 0 {
            events.extend(bag.iter().map(|&v| NiceEvent::Introduce(v)));
        } else {
            let prev: BTreeSet<_> = bags[i - 1].iter().copied().collect();
            let cur: BTreeSet<_> = bag.iter().copied().collect();
            events.extend(prev.difference(&cur).map(|&v| NiceEvent::Forget(v)));
            events.extend(cur.difference(&prev).map(|&v| NiceEvent::Introduce(v)));
        }
        edges_at[i].sort_unstable();
        events.extend(edges_at[i].iter().map(|&(a, b)| NiceEvent::Edge(a, b)));
    }
    if let Some(last) = bags.last() {
        events.extend(last.iter().map(|&v| NiceEvent::Forget(v)));
    }
    Ok(NicePathDecomposition { events })
}

const NO_BLOCK: u16 = u16::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cell {
    /// 0 = unparented, 1 = parented, 2 = root.
    status: u8,
    has_child: bool,
    block: u16,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct StateKey {
    cells: Vec<Cell>,
    root_block: u16,
}

impl StateKey {
    /// Renumbers blocks by first appearance so equal partitions hash alike.
    fn canonicalized(mut self) -> Self {
        let mut remap: Vec<u16> = Vec::new();
        let mut next = 0u16;
        for cell in &mut self.cells {
            let old = cell.block;
            let found = remap
                .iter()
                .position(|&(o)| o == old)
                .map(|i| i as u16);
            let new = match found {
                Some(i) => i,
                None => {
                    remap.push(old);
                    let i = next;
                    next += 1;
                    i
                }
            };
            cell.block = new;
        }
        if self.root_block != NO_BLOCK {
            self.root_block = remap
                .iter()
                .position(|&o| o == self.root_block)
                .map(|i| i as u16)
                .unwrap_or(NO_BLOCK);
        }
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    leaf: usize,
    ptr: usize,
}

/// Back-pointer arena recording the adoptions along each surviving state.
struct Trace {
    entries: Vec<(usize, Option<(Vertex, Vertex)>)>,
}

impl Trace {
    fn new() -> Self {
        Trace {
            entries: vec![(usize::MAX, None)],
        }
    }

    fn push(&mut self, prev: usize, adopt: Option<(Vertex, Vertex)>) -> usize {
        match adopt {
            None => prev,
            Some(_) => {
                self.entries.push((prev, adopt));
                self.entries.len() - 1
            }
        }
    }

    fn collect(&self, mut ptr: usize) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        while ptr != usize::MAX {
            let (prev, adopt) = self.entries[ptr];
            if let Some(a) = adopt {
                out.push(a);
            }
            ptr = prev;
        }
        out
    }
}

fn offer(
    layer: &mut HashMap<StateKey, Best>,
    key: StateKey,
    leaf: usize,
    ptr: usize,
) {
    let key = key.canonicalized();
    layer
        .entry(key)
        .and_modify(|b| {
            if leaf > b.leaf {
                *b = Best { leaf, ptr };
            }
        })
        .or_insert(Best { leaf, ptr });
}

/// Decides whether `d` has an out-branching rooted at `r` with at least `k`
/// leaves, walking the event list of `npd`, and extracts a witness on YES.
pub fn count_leaf_branching(
    d: &Digraph,
    npd: &NicePathDecomposition,
    k: usize,
    r: Vertex,
) -> Result<Decision> {
    d.check_vertex(r)?;
    let events = &npd.events;
    // Introduces remaining strictly after each event index.
    let mut intros_after = vec![0usize; events.len() + 1];
    for i in (0..events.len()).rev() {
        intros_after[i] = intros_after[i + 1]
            + usize::from(matches!(events[i], NiceEvent::Introduce(_)));
    }

    let mut active: Vec<Vertex> = Vec::new();
    let mut trace = Trace::new();
    let mut layer: HashMap<StateKey, Best> = HashMap::new();
    layer.insert(
        StateKey {
            cells: Vec::new(),
            root_block: NO_BLOCK,
        },
        Best { leaf: 0, ptr: usize::MAX },
    );

    for (ei, &ev) in events.iter().enumerate() {
        let mut next: HashMap<StateKey, Best> = HashMap::with_capacity(layer.len());
        match ev {
            NiceEvent::Introduce(v) => {
                if active.contains(&v) {
                    return Err(Error::invariant(format!("vertex {v} introduced twice")));
                }
                let pos = active.partition_point(|&x| x < v);
                active.insert(pos, v);
                for (key, best) in layer.drain() {
                    let mut cells = key.cells;
                    let fresh = cells.iter().map(|c| c.block).max().map_or(0, |b| b + 1);
                    cells.insert(
                        pos,
                        Cell {
                            status: if v == r { 2 } else { 0 },
                            has_child: false,
                            block: fresh,
                        },
                    );
                    let root_block = if v == r { fresh } else { key.root_block };
                    offer(
                        &mut next,
                        StateKey { cells, root_block },
                        best.leaf,
                        best.ptr,
                    );
                }
            }
            NiceEvent::Edge(a, b) => {
                let pa = active
                    .binary_search(&a)
                    .map_err(|_| Error::invariant(format!("edge end {a} inactive")))?;
                let pb = active
                    .binary_search(&b)
                    .map_err(|_| Error::invariant(format!("edge end {b} inactive")))?;
                let forward = d.has_arc(a, b);
                let backward = d.has_arc(b, a);
                for (key, best) in layer.drain() {
                    // Leaving the edge unused is always an option.
                    offer(&mut next, key.clone(), best.leaf, best.ptr);
                    for (have, pu, pv, arc) in [
                        (forward, pa, pb, (a, b)),
                        (backward, pb, pa, (b, a)),
                    ] {
                        if !have {
                            continue;
                        }
                        let head = key.cells[pv];
                        let tail = key.cells[pu];
                        if head.status != 0 || tail.block == head.block {
                            continue;
                        }
                        let mut cells = key.cells.clone();
                        cells[pv].status = 1;
                        cells[pu].has_child = true;
                        let from = head.block;
                        let into = tail.block;
                        for c in &mut cells {
                            if c.block == from {
                                c.block = into;
                            }
                        }
                        let root_block = if key.root_block == from {
                            into
                        } else {
                            key.root_block
                        };
                        let ptr = trace.push(best.ptr, Some(arc));
                        offer(&mut next, StateKey { cells, root_block }, best.leaf, ptr);
                    }
                }
            }
            NiceEvent::Forget(v) => {
                let pos = active
                    .binary_search(&v)
                    .map_err(|_| Error::invariant(format!("vertex {v} forgotten while inactive")))?;
                active.remove(pos);
                for (key, best) in layer.drain() {
                    let cell = key.cells[pos];
                    // An unparented non-root can never get a parent later.
                    if cell.status == 0 {
                        continue;
                    }
                    let mut cells = key.cells;
                    cells.remove(pos);
                    let mut root_block = key.root_block;
                    let block_lives = cells.iter().any(|c| c.block == cell.block);
                    if !block_lives {
                        if cell.block != root_block {
                            continue; // stranded component
                        }
                        if intros_after[ei + 1] > 0 || !cells.is_empty() {
                            continue; // root component sealed too early
                        }
                        root_block = NO_BLOCK;
                    }
                    let leaf = if cell.has_child {
                        best.leaf
                    } else {
                        (best.leaf + 1).min(k)
                    };
                    offer(&mut next, StateKey { cells, root_block }, leaf, best.ptr);
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            return Ok(Decision::No);
        }
    }

    let final_key = StateKey {
        cells: Vec::new(),
        root_block: NO_BLOCK,
    };
    match layer.get(&final_key) {
        Some(best) if best.leaf >= k => {
            let parent = trace.collect(best.ptr).into_iter().map(|(u, v)| (v, u)).collect();
            let witness = OutBranching::validated(d, r, parent)
                .map_err(|e| Error::invariant(format!("dp witness failed validation: {e}")))?;
            if witness.leaf_count() < k {
                return Err(Error::invariant("dp witness has too few leaves"));
            }
            Ok(Decision::Yes(witness))
        }
        _ => Ok(Decision::No),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OutTree;
    use crate::local_search::one_optimal_out_branching;
    use crate::oracle;
    use crate::pathdecomp::build_path_decomposition;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    fn nice_for(d: &Digraph, r: Vertex) -> NicePathDecomposition {
        let t = one_optimal_out_branching(d, r).unwrap();
        let pd = build_path_decomposition(d, &t).unwrap();
        to_nice(&pd, d.n(), &d.underlying_edges()).unwrap()
    }

    #[test]
    fn to_nice_emits_forget_then_introduce_then_edges() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let edges = BTreeSet::from([(0, 1), (1, 2)]);
        let npd = to_nice(&pd, 3, &edges).unwrap();
        assert_eq!(
            npd.events,
            vec![
                NiceEvent::Introduce(0),
                NiceEvent::Introduce(1),
                NiceEvent::Edge(0, 1),
                NiceEvent::Forget(0),
                NiceEvent::Introduce(2),
                NiceEvent::Edge(1, 2),
                NiceEvent::Forget(1),
                NiceEvent::Forget(2),
            ]
        );
    }

    #[test]
    fn to_nice_schedules_edges_at_first_common_bag() {
        let pd = PathDecomposition::new(vec![vec![0], vec![0, 1]]);
        let edges = BTreeSet::from([(0, 1)]);
        let npd = to_nice(&pd, 2, &edges).unwrap();
        assert_eq!(
            npd.events,
            vec![
                NiceEvent::Introduce(0),
                NiceEvent::Introduce(1),
                NiceEvent::Edge(0, 1),
                NiceEvent::Forget(0),
                NiceEvent::Forget(1),
            ]
        );
    }

    #[test]
    fn to_nice_rejects_invalid_decompositions() {
        let pd = PathDecomposition::new(vec![vec![0], vec![1]]);
        let edges = BTreeSet::from([(0, 1)]);
        assert!(to_nice(&pd, 2, &edges).is_err());
    }

    #[test]
    fn replaying_events_reproduces_the_bags() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.random_range(2..=10);
            let mut arcs: Vec<(usize, usize)> =
                (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.3) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::new(n, arcs).unwrap();
            let t = one_optimal_out_branching(&d, 0).unwrap();
            let pd = build_path_decomposition(&d, &t).unwrap();
            let edges = d.underlying_edges();
            let npd = to_nice(&pd, n, &edges).unwrap();

            // Active set after each bag's block must equal the bag; every
            // edge appears exactly once with both ends active.
            let mut active = BTreeSet::new();
            let mut seen_edges = BTreeSet::new();
            let mut bag_iter = pd.bags().iter();
            let mut expect: BTreeSet<usize> =
                bag_iter.next().unwrap().iter().copied().collect();
            for ev in &npd.events {
                match *ev {
                    NiceEvent::Introduce(v) => {
                        assert!(active.insert(v));
                    }
                    NiceEvent::Forget(v) => {
                        if active.len() == expect.len() && active == expect {
                            if let Some(bag) = bag_iter.next() {
                                expect = bag.iter().copied().collect();
                            }
                        }
                        assert!(active.remove(&v));
                    }
                    NiceEvent::Edge(a, b) => {
                        assert!(active.contains(&a) && active.contains(&b));
                        assert!(seen_edges.insert((a, b)));
                    }
                }
            }
            assert!(active.is_empty());
            assert_eq!(seen_edges, edges);
        }
    }

    #[test]
    fn star_says_yes_for_k_n_minus_one() {
        let d = Digraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let npd = nice_for(&d, 0);
        match count_leaf_branching(&d, &npd, 3, 0).unwrap() {
            Decision::Yes(w) => assert_eq!(w.leaf_count(), 3),
            Decision::No => panic!("star must have n-1 leaves"),
        }
    }

    #[test]
    fn dipath_says_no_for_two_leaves() {
        let d = Digraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let npd = nice_for(&d, 0);
        assert_eq!(count_leaf_branching(&d, &npd, 2, 0).unwrap(), Decision::No);
        assert!(matches!(
            count_leaf_branching(&d, &npd, 1, 0).unwrap(),
            Decision::Yes(_)
        ));
    }

    #[test]
    fn single_vertex_counts_its_root_as_leaf() {
        let d = Digraph::new(1, vec![]).unwrap();
        let t = OutBranching::validated(&d, 0, BTreeMap::new()).unwrap();
        let pd = build_path_decomposition(&d, &t).unwrap();
        let npd = to_nice(&pd, 1, &BTreeSet::new()).unwrap();
        assert!(matches!(
            count_leaf_branching(&d, &npd, 1, 0).unwrap(),
            Decision::Yes(_)
        ));
        assert_eq!(count_leaf_branching(&d, &npd, 2, 0).unwrap(), Decision::No);
    }

    #[test]
    fn dp_matches_oracle_on_small_digraphs() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..120 {
            let n = rng.random_range(1..=6);
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.4) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::new(n, arcs).unwrap();
            for r in 0..n {
                if !d.reaches_all(r) {
                    continue;
                }
                let npd = nice_for(&d, r);
                let mut best_r = 0;
                oracle::for_each_out_branching(&d, r, |b| {
                    best_r = best_r.max(b.leaf_count());
                    true
                });
                for k in 0..=n + 1 {
                    let dec = count_leaf_branching(&d, &npd, k, r).unwrap();
                    assert_eq!(
                        dec.is_yes(),
                        best_r >= k,
                        "n={n} r={r} k={k} best={best_r}"
                    );
                    if let Decision::Yes(w) = dec {
                        w.validate_in(&d).unwrap();
                        assert!(w.leaf_count() >= k);
                        assert_eq!(w.root(), r);
                    }
                }
            }
        }
    }

    #[test]
    fn yes_is_monotone_in_k() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..40 {
            let n = rng.random_range(2..=7);
            let mut arcs: Vec<(usize, usize)> =
                (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.3) {
                        arcs.push((u, v));
                    }
                }
            }
            let d = Digraph::new(n, arcs).unwrap();
            let npd = nice_for(&d, 0);
            let mut prev_yes = true;
            for k in 1..=n {
                let yes = count_leaf_branching(&d, &npd, k, 0).unwrap().is_yes();
                assert!(prev_yes || !yes, "yes for k={k} after no for k-1");
                prev_yes = yes;
            }
        }
    }
}
