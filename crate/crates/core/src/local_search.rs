//! 1-changes and 1-optimal out-branchings.
//!
//! A 1-change replaces the parent arc of a vertex v with a non-tree arc
//! (u, v). It keeps the branching valid iff v is not an ancestor of u, and it
//! gains a leaf iff u is not a leaf and v is not a branch successor. The local
//! search applies improving changes until no arc passes both tests; that
//! fixpoint is what later stages rely on.

use crate::error::{Error, Result};
use crate::graph::{extend_to_out_branching, Arc, Digraph, OutBranching, OutTree, Vertex};

fn check_change(t: &OutBranching, (u, v): Arc) -> Result<()> {
    if v == t.root() {
        return Err(Error::RootHasNoParent);
    }
    if t.parent_of(v) == Some(u) {
        return Err(Error::ArcAlreadyInTree(u, v));
    }
    if t.tree_leq(v, u)? {
        return Err(Error::WouldCreateCycle(u, v));
    }
    Ok(())
}

/// Re-parents `v` to `u`. Requires (u, v) to be a digraph arc outside the
/// tree with v not an ancestor of u; those guards make the result a valid
/// out-branching again.
pub fn one_change(t: &OutBranching, arc: Arc) -> Result<OutBranching> {
    check_change(t, arc)?;
    Ok(t.with_parent(arc.1, arc.0))
}

/// Does the 1-change for `arc` strictly increase the leaf count?
pub fn improves(t: &OutBranching, arc: Arc) -> Result<bool> {
    check_change(t, arc)?;
    let (u, v) = arc;
    Ok(!t.leaves().contains(&u) && !t.br_succ().contains(&v))
}

/// First non-tree arc that is both applicable and improving, scanning in
/// (tail, head) order; `None` certifies 1-optimality.
pub fn one_optimality_violation(d: &Digraph, t: &OutBranching) -> Option<Arc> {
    let leaves = t.leaves();
    let br_succ = t.br_succ();
    d.arcs().find(|&(u, v)| {
        v != t.root()
            && t.parent_of(v) != Some(u)
            && !t.tree_leq(v, u).unwrap_or(true)
            && !leaves.contains(&u)
            && !br_succ.contains(&v)
    })
}

/// Computes an out-branching of `d` rooted at `r` admitting no
/// leaf-increasing 1-change. Starts from the greedy extension of the trivial
/// tree and sweeps the arc list until a full pass applies nothing; every
/// applied change raises the leaf count, so at most n - 1 changes happen.
pub fn one_optimal_out_branching(d: &Digraph, r: Vertex) -> Result<OutBranching> {
    if !d.reaches_all(r) {
        return Err(Error::RootUnreachable { root: r });
    }
    let mut t = extend_to_out_branching(d, &OutTree::singleton(r))?;
    let arcs: Vec<Arc> = d.arcs().collect();
    loop {
        let mut changed = false;
        let mut leaves = t.leaves();
        let mut br_succ = t.br_succ();
        for &(u, v) in &arcs {
            if v == r || t.parent_of(v) == Some(u) {
                continue;
            }
            if t.tree_leq(v, u)? || leaves.contains(&u) || br_succ.contains(&v) {
                continue;
            }
            let before = leaves.len();
            t = t.with_parent(v, u);
            leaves = t.leaves();
            br_succ = t.br_succ();
            debug_assert!(leaves.len() > before);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    debug_assert!(one_optimality_violation(d, &t).is_none());
    Ok(t)
}

/// Applies, in path order, the 1-change for every arc of the dipath `q`
/// that is not already a tree arc. `q` must be a simple vertex sequence
/// starting at the root; the result is an out-branching containing `q`.
pub fn apply_path_changes(t: &OutBranching, q: &[Vertex]) -> Result<OutBranching> {
    if q.is_empty() {
        return Err(Error::NotADipath("empty sequence".into()));
    }
    if q[0] != t.root() {
        return Err(Error::NotADipath(format!(
            "starts at {} instead of the root {}",
            q[0],
            t.root()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &v in q {
        if v >= t.n() {
            return Err(Error::NotADipath(format!("vertex {v} out of range")));
        }
        if !seen.insert(v) {
            return Err(Error::NotADipath(format!("vertex {v} repeats")));
        }
    }
    let mut cur = t.clone();
    for w in q.windows(2) {
        let (u, v) = (w[0], w[1]);
        if cur.parent_of(v) != Some(u) {
            cur = one_change(&cur, (u, v))?;
        }
    }
    Ok(cur)
}
