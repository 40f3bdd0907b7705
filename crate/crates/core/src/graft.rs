//! Graphs, grafts, joins and the ±1 weighting a join induces.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;

use crate::error::{GraftError, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

const NO_EDGE: u32 = u32::MAX;

/// A simple undirected graph on at most 64 vertices.
///
/// Vertices are dense indices `0..n` carrying external string labels. Edge ids
/// are dense `0..m` in insertion order; endpoints are stored as `(u, v)` with
/// `u < v`.
#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<VertexSet>,
    incidence: Vec<Vec<(usize, usize)>>,
    edge_ids: Vec<u32>,
}

impl Graph {
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n > MAX_VERTICES {
            return Err(GraftError::Size {
                what: "vertex count",
                actual: n,
                limit: MAX_VERTICES,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GraftError::Format(format!("duplicate vertex `{l}`")));
            }
        }
        let mut adj = vec![VertexSet::EMPTY; n];
        let mut incidence = vec![Vec::new(); n];
        let mut edge_ids = vec![NO_EDGE; n * n];
        let mut stored = Vec::with_capacity(edges.len());
        for (id, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(GraftError::Format(format!(
                    "edge {id} has an endpoint outside the vertex set"
                )));
            }
            if a == b {
                return Err(GraftError::Format(format!("loop at `{}`", labels[a])));
            }
            if edge_ids[a * n + b] != NO_EDGE {
                return Err(GraftError::Format(format!(
                    "parallel edge between `{}` and `{}`",
                    labels[a], labels[b]
                )));
            }
            edge_ids[a * n + b] = id as u32;
            edge_ids[b * n + a] = id as u32;
            adj[a].insert(b);
            adj[b].insert(a);
            incidence[a].push((b, id));
            incidence[b].push((a, id));
            stored.push((a.min(b), a.max(b)));
        }
        for inc in &mut incidence {
            inc.sort_unstable();
        }
        Ok(Graph {
            labels,
            edges: stored,
            adj,
            incidence,
            edge_ids,
        })
    }

    /// Builds a graph from labelled vertices and label pairs.
    pub fn from_labels(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let labels: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let lookup = |name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| GraftError::Format(format!("unknown vertex `{name}`")))
        };
        let pairs = edges
            .iter()
            .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Graph::new(labels, &pairs)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.labels.len())
    }

    #[inline]
    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let id = self.edge_ids[u * self.labels.len() + v];
        (id != NO_EDGE).then_some(id as usize)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    /// `(neighbor, edge id)` pairs at `v`, sorted by neighbor.
    #[inline]
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    /// Vertices outside `set` adjacent to some vertex of `set`.
    pub fn neighborhood(&self, set: VertexSet) -> VertexSet {
        set.iter()
            .fold(VertexSet::EMPTY, |acc, v| acc.union(self.adj[v]))
            .difference(set)
    }

    /// Edges with exactly one endpoint in `set`.
    pub fn cut(&self, set: VertexSet) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, &(u, v))| set.contains(u) != set.contains(v))
            .map(|(e, _)| e)
    }

    /// Edges with both endpoints in `set`.
    pub fn edges_within(&self, set: VertexSet) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, &(u, v))| set.contains(u) && set.contains(v))
            .map(|(e, _)| e)
    }

    /// Vertices reachable from `start` inside `within` (which must contain `start`).
    pub fn reach(&self, start: usize, within: VertexSet) -> VertexSet {
        let mut seen = VertexSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier {
                next = next.union(self.adj[v]);
            }
            frontier = next.intersection(within).difference(seen);
            seen = seen.union(frontier);
        }
        seen
    }

    /// Connected components of the subgraph induced by `within`, ordered by
    /// smallest member.
    pub fn components_within(&self, within: VertexSet) -> Vec<VertexSet> {
        let mut rest = within;
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let comp = self.reach(v, within);
            rest = rest.difference(comp);
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(self.vertices())
    }

    /// One color class of a proper 2-coloring, the smallest vertex of each
    /// component colored into it; `None` when the graph has an odd cycle.
    pub fn bipartition(&self) -> Option<VertexSet> {
        let n = self.vertex_count();
        let mut color: Vec<Option<bool>> = vec![None; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            stack.push(s);
            while let Some(v) = stack.pop() {
                let c = color[v].unwrap_or(false);
                for &(w, _) in &self.incidence[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(!c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(
            color
                .iter()
                .enumerate()
                .filter(|(_, c)| **c == Some(false))
                .map(|(v, _)| v)
                .collect(),
        )
    }

    /// Subgraph induced by `set`, with maps from new to old vertex and edge ids.
    pub fn induced(&self, set: VertexSet) -> (Graph, Vec<usize>, Vec<usize>) {
        let vertex_map: Vec<usize> = set.iter().collect();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertex_map.iter().enumerate() {
            new_id[v] = i;
        }
        let edge_map: Vec<usize> = self.edges_within(set).collect();
        let pairs: Vec<(usize, usize)> = edge_map
            .iter()
            .map(|&e| {
                let (u, v) = self.edges[e];
                (new_id[u], new_id[v])
            })
            .collect();
        let labels = vertex_map.iter().map(|&v| self.labels[v].clone()).collect();
        let graph = Graph::new(labels, &pairs).expect("induced subgraph of a simple graph is simple");
        (graph, vertex_map, edge_map)
    }

    /// Vertices of odd degree in the edge set.
    pub fn odd_vertices(&self, edges: &EdgeSet) -> VertexSet {
        let mut odd = VertexSet::EMPTY;
        for e in edges.iter() {
            let (u, v) = self.edges[e];
            odd.toggle(u);
            odd.toggle(v);
        }
        odd
    }
}

/// A set of edge ids of one graph.
///
/// Ordering is lexicographic over the ascending id sequences, so the minimum
/// of a collection of joins is the lexicographically smallest one.
#[derive(Clone)]
pub struct EdgeSet {
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn new(edge_count: usize) -> Self {
        EdgeSet {
            bits: FixedBitSet::with_capacity(edge_count),
        }
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(edge_count: usize, ids: I) -> Self {
        let mut set = EdgeSet::new(edge_count);
        for e in ids {
            set.insert(e);
        }
        set
    }

    /// Builds a set from the low `edge_count` bits of a mask.
    pub fn from_mask(edge_count: usize, mask: u64) -> Self {
        EdgeSet::from_ids(edge_count, (0..edge_count.min(64)).filter(|e| (mask >> e) & 1 == 1))
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        self.bits.contains(e)
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        self.bits.insert(e);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        self.bits.set(e, false);
    }

    #[inline]
    pub fn toggle(&mut self, e: usize) {
        self.bits.toggle(e);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn symmetric_difference(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.symmetric_difference_with(&other.bits);
        EdgeSet { bits }
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        EdgeSet { bits }
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        EdgeSet { bits }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl PartialEq for EdgeSet {
    fn eq(&self, other: &Self) -> bool {
        self.iter().eq(other.iter())
    }
}

impl Eq for EdgeSet {}

impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl Hash for EdgeSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for e in self.iter() {
            e.hash(state);
        }
    }
}

impl core::fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A graph with a terminal set meeting every component in an even number of
/// vertices.
#[derive(Clone, Debug)]
pub struct Graft {
    graph: Graph,
    terminals: VertexSet,
    bipartition: Option<VertexSet>,
    components: Vec<VertexSet>,
}

impl Graft {
    pub fn new(graph: Graph, terminals: VertexSet) -> Result<Self> {
        if !terminals.is_subset(graph.vertices()) {
            return Err(GraftError::Format(
                "terminal set is not a subset of the vertex set".into(),
            ));
        }
        let components = graph.components();
        for comp in &components {
            let count = comp.intersection(terminals).len();
            if count % 2 == 1 {
                let v = comp.first().unwrap_or(0);
                return Err(GraftError::Parity {
                    vertex: graph.label(v).into(),
                    count,
                });
            }
        }
        let bipartition = graph.bipartition();
        Ok(Graft {
            graph,
            terminals,
            bipartition,
            components,
        })
    }

    /// Builds a graft from labels; see [`Graph::from_labels`].
    pub fn from_labels(vertices: &[&str], edges: &[(&str, &str)], terminals: &[&str]) -> Result<Self> {
        let graph = Graph::from_labels(vertices, edges)?;
        let t = terminals
            .iter()
            .map(|name| {
                graph
                    .vertex_by_label(name)
                    .ok_or_else(|| GraftError::Format(format!("unknown terminal `{name}`")))
            })
            .collect::<Result<VertexSet>>()?;
        Graft::new(graph, t)
    }

    /// The same graph with another terminal set.
    pub fn with_terminals(&self, terminals: VertexSet) -> Result<Self> {
        Graft::new(self.graph.clone(), terminals)
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn terminals(&self) -> VertexSet {
        self.terminals
    }

    #[inline]
    pub fn bipartition(&self) -> Option<VertexSet> {
        self.bipartition
    }

    #[inline]
    pub fn is_bipartite(&self) -> bool {
        self.bipartition.is_some()
    }

    pub fn components(&self) -> &[VertexSet] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> VertexSet {
        self.components
            .iter()
            .copied()
            .find(|c| c.contains(v))
            .unwrap_or(VertexSet::EMPTY)
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    /// Errors with `Disconnected` unless `x` and `y` share a component.
    pub fn require_same_component(&self, x: usize, y: usize) -> Result<()> {
        if self.component_of(x).contains(y) {
            Ok(())
        } else {
            Err(GraftError::Disconnected {
                x: self.graph.label(x).into(),
                y: self.graph.label(y).into(),
            })
        }
    }

    /// `edges` has odd degree exactly at the terminals.
    pub fn is_join(&self, edges: &EdgeSet) -> bool {
        self.graph.odd_vertices(edges) == self.terminals
    }

    /// Validates `edges` as a join.
    pub fn join(&self, edges: EdgeSet) -> Result<Join> {
        if self.is_join(&edges) {
            Ok(Join { edges })
        } else {
            Err(GraftError::Precondition(
                "edge set does not have odd degree exactly at the terminals".into(),
            ))
        }
    }
}

/// An edge set with odd degree exactly at the terminals of its graft.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Join {
    edges: EdgeSet,
}

impl Join {
    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn into_edges(self) -> EdgeSet {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weights(&self) -> WeightFn<'_> {
        WeightFn::new(&self.edges)
    }
}

/// The weighting `-1` on the edges of a fixed set and `+1` elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct WeightFn<'a> {
    join: &'a EdgeSet,
}

impl<'a> WeightFn<'a> {
    pub fn new(join: &'a EdgeSet) -> Self {
        WeightFn { join }
    }

    #[inline]
    pub fn edge(&self, e: usize) -> i32 {
        if self.join.contains(e) {
            -1
        } else {
            1
        }
    }

    /// `|S \ F| - |S ∩ F|`.
    pub fn weight(&self, set: &EdgeSet) -> i64 {
        set.len() as i64 - 2 * set.intersection(self.join).len() as i64
    }

    pub fn weight_of<I: IntoIterator<Item = usize>>(&self, edges: I) -> i64 {
        edges.into_iter().map(|e| self.edge(e) as i64).sum()
    }

    /// Weight of the path visiting `vertices` in order.
    pub fn path_weight(&self, graph: &Graph, vertices: &[usize]) -> Option<i64> {
        vertices
            .windows(2)
            .map(|w| graph.edge_between(w[0], w[1]).map(|e| self.edge(e) as i64))
            .sum()
    }
}

/// `(G, T)_F[X]` together with the id maps back into `G`.
#[derive(Clone, Debug)]
pub struct InducedGraft {
    pub graft: Graft,
    /// New vertex id → original vertex id.
    pub vertex_map: Vec<usize>,
    /// New edge id → original edge id.
    pub edge_map: Vec<usize>,
    /// `F ∩ E[X]` in new edge ids.
    pub join: EdgeSet,
}

impl InducedGraft {
    pub fn local_vertex(&self, original: usize) -> Option<usize> {
        self.vertex_map.iter().position(|&v| v == original)
    }
}

/// The graft on `G[X]` whose terminals are the vertices of odd
/// `F ∩ E[X]`-degree.
pub fn induced_graft(graft: &Graft, join: &EdgeSet, set: VertexSet) -> Result<InducedGraft> {
    let (graph, vertex_map, edge_map) = graft.graph().induced(set);
    let local_join = EdgeSet::from_ids(
        edge_map.len(),
        edge_map
            .iter()
            .enumerate()
            .filter(|(_, &e)| join.contains(e))
            .map(|(i, _)| i),
    );
    let terminals = graph.odd_vertices(&local_join);
    let graft = Graft::new(graph, terminals).map_err(|e| {
        GraftError::InternalInvariant(format!("induced graft failed validation: {e}"))
    })?;
    Ok(InducedGraft {
        graft,
        vertex_map,
        edge_map,
        join: local_join,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(t: &[&str]) -> Result<Graft> {
        Graft::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c")], t)
    }

    #[test]
    fn k2_with_both_terminals_is_a_graft() {
        let g = Graft::from_labels(&["a", "b"], &[("a", "b")], &["a", "b"]).unwrap();
        assert!(g.is_connected());
        assert!(g.is_bipartite());
    }

    #[test]
    fn odd_terminal_count_is_rejected() {
        assert!(matches!(p3(&["a"]), Err(GraftError::Parity { count: 1, .. })));
        let err = Graft::from_labels(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("c", "d")],
            &["a", "b", "c"],
        )
        .unwrap_err();
        assert_eq!(
            err,
            GraftError::Parity {
                vertex: "c".into(),
                count: 1
            }
        );
    }

    #[test]
    fn loops_and_parallel_edges_are_format_errors() {
        assert!(matches!(
            Graph::from_labels(&["a"], &[("a", "a")]),
            Err(GraftError::Format(_))
        ));
        assert!(matches!(
            Graph::from_labels(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(GraftError::Format(_))
        ));
        assert!(matches!(
            Graph::from_labels(&["a", "a"], &[]),
            Err(GraftError::Format(_))
        ));
    }

    #[test]
    fn join_parity_examples() {
        let k2 = Graft::from_labels(&["a", "b"], &[("a", "b")], &["a", "b"]).unwrap();
        assert!(k2.is_join(&EdgeSet::from_ids(1, [0])));
        assert!(!k2.is_join(&EdgeSet::new(1)));
        let g = p3(&["a", "c"]).unwrap();
        assert!(g.is_join(&EdgeSet::from_ids(2, [0, 1])));
        assert!(!g.is_join(&EdgeSet::from_ids(2, [0])));
    }

    #[test]
    fn weight_examples() {
        let f = EdgeSet::from_ids(2, [0, 1]);
        let w = WeightFn::new(&f);
        assert_eq!(w.weight(&EdgeSet::from_ids(2, [0, 1])), -2);
        assert_eq!(w.weight(&EdgeSet::new(2)), 0);
        // C4: edges 12, 23, 34, 41 with F = {12, 34}
        let f = EdgeSet::from_ids(4, [0, 2]);
        let w = WeightFn::new(&f);
        assert_eq!(w.weight(&EdgeSet::from_ids(4, 0..4)), 0);
    }

    #[test]
    fn induced_graft_examples() {
        let g = p3(&["a", "c"]).unwrap();
        let f = EdgeSet::from_ids(2, [0, 1]);
        let bc = induced_graft(&g, &f, [1, 2].into_iter().collect()).unwrap();
        assert_eq!(bc.graft.graph().edge_count(), 1);
        assert_eq!(bc.graft.terminals(), VertexSet::full(2));
        assert_eq!(bc.vertex_map, [1, 2]);
        assert_eq!(bc.edge_map, [1]);

        let empty = induced_graft(&g, &f, VertexSet::EMPTY).unwrap();
        assert_eq!(empty.graft.graph().vertex_count(), 0);

        let ac = induced_graft(&g, &f, [0, 2].into_iter().collect()).unwrap();
        assert_eq!(ac.graft.graph().edge_count(), 0);
        assert!(ac.graft.terminals().is_empty());
    }

    #[test]
    fn edge_sets_order_lexicographically() {
        let a = EdgeSet::from_ids(4, [0, 3]);
        let b = EdgeSet::from_ids(4, [1, 2]);
        let c = EdgeSet::from_ids(8, [0, 3]);
        assert!(a < b);
        assert_eq!(a, c);
    }

    #[test]
    fn bipartition_detects_odd_cycles() {
        let tri = Graph::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert!(tri.bipartition().is_none());
        let c4 = Graph::from_labels(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
        )
        .unwrap();
        assert_eq!(c4.bipartition(), Some([0, 2].into_iter().collect()));
    }
}
