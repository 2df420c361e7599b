//! Digraphs, out-trees and out-branchings.
//!
//! Vertices are dense indices `0..n`. A digraph stores sorted in- and
//! out-adjacency; trees are parent maps. Everything downstream (reachability,
//! the tree order, leaf/branch bookkeeping) is built on these two types.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::Deref;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Arc = (Vertex, Vertex);

/// Immutable digraph over vertices `0..n`, no self-loops, no duplicate arcs.
///
/// Self-loops and duplicates are silently dropped at construction: a
/// self-loop can never sit in an out-branching and a duplicate is
/// semantically void in an arc set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<Vertex>>,
    ins: Vec<Vec<Vertex>>,
    m: usize,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        let mut ins = vec![Vec::new(); n];
        for (u, v) in arcs {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                continue;
            }
            out[u].push(v);
        }
        let mut m = 0;
        for u in 0..n {
            out[u].sort_unstable();
            out[u].dedup();
            m += out[u].len();
            for &v in &out[u] {
                ins[v].push(u);
            }
        }
        for list in &mut ins {
            list.sort_unstable();
        }
        Ok(Digraph { out, ins, m })
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n()
    }

    pub fn out_neighbors(&self, u: Vertex) -> &[Vertex] {
        &self.out[u]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.ins[v]
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.out[u].binary_search(&v).is_ok()
    }

    /// All arcs in (tail, head) lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// BFS reachability mask from `u`, optionally treating `avoid` as deleted.
    pub(crate) fn reach_mask(&self, u: Vertex, avoid: Option<Vertex>) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        if Some(u) == avoid {
            return seen;
        }
        let mut queue = VecDeque::new();
        seen[u] = true;
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            for &y in &self.out[x] {
                if !seen[y] && Some(y) != avoid {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// The set of vertices reachable from `u`, including `u` itself.
    pub fn reachable_set(&self, u: Vertex) -> Result<BTreeSet<Vertex>> {
        self.check_vertex(u)?;
        let mask = self.reach_mask(u, None);
        Ok(mask
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
            .collect())
    }

    pub fn reaches_all(&self, r: Vertex) -> bool {
        r < self.n() && self.reach_mask(r, None).iter().all(|&b| b)
    }

    /// Shortest dipath from `src` to `dst` in the graph minus `avoid`,
    /// as a vertex sequence. BFS over sorted adjacency, so the result is
    /// deterministic.
    pub(crate) fn shortest_path_avoiding(
        &self,
        src: Vertex,
        dst: Vertex,
        avoid: Option<Vertex>,
    ) -> Option<Vec<Vertex>> {
        if Some(src) == avoid || Some(dst) == avoid {
            return None;
        }
        let mut pred = vec![usize::MAX; self.n()];
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::new();
        seen[src] = true;
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            if x == dst {
                break;
            }
            for &y in &self.out[x] {
                if !seen[y] && Some(y) != avoid {
                    seen[y] = true;
                    pred[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if !seen[dst] {
            return None;
        }
        let mut path = vec![dst];
        let mut cur = dst;
        while cur != src {
            cur = pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Edges of the underlying undirected graph as (min, max) pairs.
    pub fn underlying_edges(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.arcs()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect()
    }
}

/// Rooted out-tree over a subset of a digraph's vertices, stored as a parent
/// map that is defined exactly on the non-root tree vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutTree {
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
}

impl OutTree {
    pub fn singleton(root: Vertex) -> Self {
        OutTree {
            root,
            parent: BTreeMap::new(),
        }
    }

    /// Builds a tree from a parent map, checking the structural invariants:
    /// the root carries no parent entry, and every entry walks back to the
    /// root without revisiting a vertex.
    pub fn new(root: Vertex, parent: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        if parent.contains_key(&root) {
            return Err(Error::MalformedTree(format!(
                "root {root} has a parent entry"
            )));
        }
        for (&child, &par) in &parent {
            if par != root && !parent.contains_key(&par) {
                return Err(Error::MalformedTree(format!(
                    "parent {par} of {child} is not a tree vertex"
                )));
            }
        }
        let tree = OutTree { root, parent };
        // Walking up from every vertex must reach the root in bounded steps.
        let bound = tree.parent.len() + 1;
        for &v in tree.parent.keys() {
            let mut cur = v;
            let mut steps = 0;
            while cur != root {
                cur = tree.parent[&cur];
                steps += 1;
                if steps > bound {
                    return Err(Error::MalformedTree(format!(
                        "parent chain from {v} does not reach the root"
                    )));
                }
            }
        }
        Ok(tree)
    }

    /// `new` plus the host-graph invariant: every parent arc is an arc of `d`.
    pub fn validated_in(d: &Digraph, root: Vertex, parent: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        d.check_vertex(root)?;
        for (&child, &par) in &parent {
            d.check_vertex(child)?;
            d.check_vertex(par)?;
            if !d.has_arc(par, child) {
                return Err(Error::ArcNotInGraph(par, child));
            }
        }
        OutTree::new(root, parent)
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    pub fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied()
    }

    pub fn parent_map(&self) -> &BTreeMap<Vertex, Vertex> {
        &self.parent
    }

    /// Tree vertices in ascending index order.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.parent.keys().copied().collect();
        let pos = vs.binary_search(&self.root).unwrap_err();
        vs.insert(pos, self.root);
        vs
    }

    /// Tree arcs (parent, child), sorted by child.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn children_map(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut map: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for (&child, &par) in &self.parent {
            map.entry(par).or_default().push(child);
        }
        map
    }

    fn out_degrees(&self) -> BTreeMap<Vertex, usize> {
        let mut deg = BTreeMap::new();
        for &p in self.parent.values() {
            *deg.entry(p).or_insert(0) += 1;
        }
        deg
    }

    /// Tree vertices of out-degree zero. A single-vertex tree has its root
    /// as a leaf, reading the out-degree-zero definition literally.
    pub fn leaves(&self) -> BTreeSet<Vertex> {
        let deg = self.out_degrees();
        self.vertices()
            .into_iter()
            .filter(|v| !deg.contains_key(v))
            .collect()
    }

    /// Vertices whose tree parent has out-degree at least two.
    pub fn br_succ(&self) -> BTreeSet<Vertex> {
        let deg = self.out_degrees();
        self.parent
            .iter()
            .filter(|(_, &p)| deg[&p] >= 2)
            .map(|(&c, _)| c)
            .collect()
    }

    /// True iff `v` equals `u` or descends from `u` in the tree.
    pub fn tree_leq(&self, u: Vertex, v: Vertex) -> Result<bool> {
        if !self.contains(u) {
            return Err(Error::NotATreeVertex(u));
        }
        if !self.contains(v) {
            return Err(Error::NotATreeVertex(v));
        }
        let mut cur = v;
        loop {
            if cur == u {
                return Ok(true);
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return Ok(false),
            }
        }
    }

    /// Distance from the root; the root itself has depth 0.
    pub fn depth(&self, v: Vertex) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::NotATreeVertex(v));
        }
        let mut d = 0;
        let mut cur = v;
        while let Some(p) = self.parent_of(cur) {
            cur = p;
            d += 1;
        }
        Ok(d)
    }

    /// The vertex sequence of the unique tree path from the root to `v`.
    pub fn path_from_root(&self, v: Vertex) -> Result<Vec<Vertex>> {
        if !self.contains(v) {
            return Err(Error::NotATreeVertex(v));
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent_of(cur) {
            cur = p;
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// All vertices reachable from `v` inside the tree, including `v`.
    pub fn descendants(&self, v: Vertex) -> Result<BTreeSet<Vertex>> {
        if !self.contains(v) {
            return Err(Error::NotATreeVertex(v));
        }
        let children = self.children_map();
        let mut out = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if out.insert(x) {
                if let Some(cs) = children.get(&x) {
                    stack.extend(cs.iter().copied());
                }
            }
        }
        Ok(out)
    }
}

/// Spanning out-tree of a digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutBranching {
    tree: OutTree,
    n: usize,
}

impl Deref for OutBranching {
    type Target = OutTree;

    fn deref(&self) -> &OutTree {
        &self.tree
    }
}

impl OutBranching {
    /// Validates the full invariant set: out-tree structure, membership of
    /// every parent arc in `d`, and the spanning property.
    pub fn validated(d: &Digraph, root: Vertex, parent: BTreeMap<Vertex, Vertex>) -> Result<Self> {
        let tree = OutTree::validated_in(d, root, parent)?;
        if tree.vertex_count() != d.n() {
            return Err(Error::NotSpanning {
                got: tree.vertex_count(),
                need: d.n(),
            });
        }
        Ok(OutBranching { tree, n: d.n() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Re-checks every invariant against the host digraph.
    pub fn validate_in(&self, d: &Digraph) -> Result<()> {
        let rebuilt = OutBranching::validated(d, self.root(), self.parent_map().clone())?;
        debug_assert_eq!(&rebuilt, self);
        Ok(())
    }

    /// Copy of this branching with `v` re-parented to `u`. The caller is
    /// responsible for having checked that the change keeps the branching
    /// acyclic; used by the 1-change operation after its guards.
    pub(crate) fn with_parent(&self, v: Vertex, u: Vertex) -> OutBranching {
        let mut parent = self.tree.parent.clone();
        parent.insert(v, u);
        OutBranching {
            tree: OutTree {
                root: self.tree.root,
                parent,
            },
            n: self.n,
        }
    }
}

/// Grows `t` into an out-branching of `d` by repeatedly adding the
/// lexicographically smallest (tail, head) arc that leaves the current tree.
/// Requires the root of `t` to reach every vertex of `d`.
pub fn extend_to_out_branching(d: &Digraph, t: &OutTree) -> Result<OutBranching> {
    let tree = OutTree::validated_in(d, t.root(), t.parent_map().clone())?;
    if !d.reaches_all(tree.root()) {
        return Err(Error::RootUnreachable { root: tree.root() });
    }
    let mut in_tree = vec![false; d.n()];
    for v in tree.vertices() {
        in_tree[v] = true;
    }
    let mut parent = tree.parent_map().clone();
    let mut size = tree.vertex_count();
    while size < d.n() {
        let mut added = false;
        'scan: for u in 0..d.n() {
            if !in_tree[u] {
                continue;
            }
            for &v in d.out_neighbors(u) {
                if !in_tree[v] {
                    parent.insert(v, u);
                    in_tree[v] = true;
                    size += 1;
                    added = true;
                    break 'scan;
                }
            }
        }
        if !added {
            return Err(Error::invariant(
                "extension stalled although the root reaches every vertex",
            ));
        }
    }
    OutBranching::validated(d, tree.root(), parent)
}
