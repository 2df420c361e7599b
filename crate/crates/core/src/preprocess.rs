//! Removal of arcs that no out-branching rooted at `r` can use.
//!
//! An arc (u, v) is useless for r exactly when no dipath from r ends with
//! (u, v), which reduces to a single reachability test in the graph minus v.
//! Arcs with head r are useless outright (the root keeps in-degree zero) and
//! arcs with tail r are never useless once r reaches everything.

use crate::error::{Error, Result};
use crate::exec::{map_flags, Strategy};
use crate::graph::{Arc, Digraph, Vertex};

fn check_root(d: &Digraph, r: Vertex) -> Result<()> {
    d.check_vertex(r)?;
    if d.reaches_all(r) {
        Ok(())
    } else {
        Err(Error::RootUnreachable { root: r })
    }
}

fn useless_unchecked(d: &Digraph, r: Vertex, (u, v): Arc) -> bool {
    if v == r {
        return true;
    }
    if u == r {
        return false;
    }
    d.shortest_path_avoiding(r, u, Some(v)).is_none()
}

/// True iff no out-branching of `d` rooted at `r` contains the arc.
/// Requires `r` to reach every vertex and the arc to be present.
pub fn is_useless(d: &Digraph, r: Vertex, arc: Arc) -> Result<bool> {
    check_root(d, r)?;
    if !d.has_arc(arc.0, arc.1) {
        return Err(Error::ArcNotInGraph(arc.0, arc.1));
    }
    Ok(useless_unchecked(d, r, arc))
}

/// Drops every arc useless for `r`. The surviving digraph has exactly the
/// same r-rooted out-branchings as the input, and `r` still reaches all
/// vertices.
pub fn remove_useless_arcs(d: &Digraph, r: Vertex) -> Result<Digraph> {
    remove_useless_arcs_with(d, r, Strategy::auto())
}

/// As `remove_useless_arcs`, with the per-arc tests run under `strategy`.
pub fn remove_useless_arcs_with(d: &Digraph, r: Vertex, strategy: Strategy) -> Result<Digraph> {
    check_root(d, r)?;
    let arcs: Vec<Arc> = d.arcs().collect();
    let useless = map_flags(strategy, &arcs, |&a| useless_unchecked(d, r, a));
    let kept = arcs
        .into_iter()
        .zip(useless)
        .filter_map(|(a, dead)| (!dead).then_some(a));
    Digraph::new(d.n(), kept)
}
