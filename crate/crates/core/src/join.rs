//! Minimum joins: exact solving through terminal pairings, the exhaustive
//! oracle, enumeration of all optima, and conservativeness of `±1` weights.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::distance::DistanceTable;
use crate::error::{GraftError, Result};
use crate::graft::{EdgeSet, Graft, Graph, WeightFn};
use crate::vset::VertexSet;
use crate::Limits;

const UNREACHABLE: u32 = u32::MAX;
const INFINITE: u32 = u32::MAX / 4;

/// How a [`MinJoinResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactMatching,
    BruteForce,
}

#[derive(Clone, Debug)]
pub struct MinJoinResult {
    pub join: EdgeSet,
    pub nu: usize,
    pub method: Method,
}

/// Edges contained in at least one minimum join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowedEdgeSet {
    pub edges: EdgeSet,
}

impl AllowedEdgeSet {
    pub fn contains(&self, e: usize) -> bool {
        self.edges.contains(e)
    }
}

/// All-pairs hop distances.
#[derive(Clone, Debug)]
pub(crate) struct HopMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl HopMatrix {
    pub(crate) fn new(graph: &Graph) -> Self {
        let n = graph.vertex_count();
        let mut dist = vec![UNREACHABLE; n * n];
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            let mut seen = VertexSet::singleton(s);
            let mut frontier = seen;
            let mut d = 0;
            while !frontier.is_empty() {
                let mut next = VertexSet::EMPTY;
                for v in frontier {
                    row[v] = d;
                    next = next.union(graph.neighbors(v));
                }
                frontier = next.difference(seen);
                seen = seen.union(frontier);
                d += 1;
            }
        }
        HopMatrix { n, dist }
    }

    #[inline]
    pub(crate) fn get(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    /// Edges of one shortest `u`–`v` path, preferring small vertex ids.
    fn path_edges(&self, graph: &Graph, u: usize, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = v;
        while cur != u {
            let d = self.get(u, cur);
            let (prev, e) = graph
                .incident(cur)
                .iter()
                .copied()
                .find(|&(w, _)| self.get(u, w) + 1 == d)
                .expect("a vertex at positive distance has a predecessor");
            out.push(e);
            cur = prev;
        }
        out
    }
}

/// Minimum-cost perfect pairings of every even subset of a point list, by
/// dynamic programming over subsets.
pub(crate) struct PairingTable {
    points: Vec<usize>,
    cost: Vec<u32>,
}

impl PairingTable {
    pub(crate) fn new(points: Vec<usize>, hops: &HopMatrix) -> Self {
        let k = points.len();
        let mut cost = vec![INFINITE; 1usize << k];
        cost[0] = 0;
        for mask in 1usize..(1 << k) {
            if mask.count_ones() % 2 == 1 {
                continue;
            }
            let i = mask.trailing_zeros() as usize;
            let rest = mask ^ (1 << i);
            let mut best = INFINITE;
            let mut m = rest;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                let c = cost[rest ^ (1 << j)].saturating_add(hops.get(points[i], points[j]));
                best = best.min(c);
            }
            cost[mask] = best;
        }
        PairingTable { points, cost }
    }

    #[inline]
    pub(crate) fn full_mask(&self) -> usize {
        (1usize << self.points.len()) - 1
    }

    #[inline]
    pub(crate) fn cost(&self, mask: usize) -> u32 {
        self.cost[mask]
    }

    pub(crate) fn points(&self) -> &[usize] {
        &self.points
    }

    /// An optimal pairing of `mask`, as point pairs.
    fn pairs(&self, hops: &HopMatrix, mut mask: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            let rest = mask ^ (1 << i);
            let target = self.cost[mask];
            let mut m = rest;
            let j = loop {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                let c = self.cost[rest ^ (1 << j)].saturating_add(hops.get(self.points[i], self.points[j]));
                if c == target {
                    break j;
                }
            };
            out.push((self.points[i], self.points[j]));
            mask = rest ^ (1 << j);
        }
        out
    }
}

pub(crate) fn check_terminal_bound(count: usize, limits: &Limits) -> Result<()> {
    if count > limits.matching_terminals {
        Err(GraftError::Size {
            what: "terminals in one component",
            actual: count,
            limit: limits.matching_terminals,
        })
    } else {
        Ok(())
    }
}

/// `ν(G, T)` for an arbitrary terminal set with even parity per component.
pub(crate) fn nu_with(graft: &Graft, hops: &HopMatrix, terminals: VertexSet, limits: &Limits) -> Result<usize> {
    let mut total = 0;
    for comp in graft.components() {
        let points: Vec<usize> = comp.intersection(terminals).iter().collect();
        check_terminal_bound(points.len(), limits)?;
        let table = PairingTable::new(points, hops);
        total += table.cost(table.full_mask()) as usize;
    }
    Ok(total)
}

/// `ν(G, T)`, the size of a minimum join.
pub fn nu(graft: &Graft, limits: &Limits) -> Result<usize> {
    nu_with(graft, &HopMatrix::new(graft.graph()), graft.terminals(), limits)
}

/// A minimum join, from an optimal pairing of the terminals of each component
/// under hop distance, realized as the symmetric difference of shortest paths.
pub fn min_join(graft: &Graft, limits: &Limits) -> Result<MinJoinResult> {
    let graph = graft.graph();
    let hops = HopMatrix::new(graph);
    let mut join = EdgeSet::new(graph.edge_count());
    let mut nu = 0;
    for comp in graft.components() {
        let points: Vec<usize> = comp.intersection(graft.terminals()).iter().collect();
        check_terminal_bound(points.len(), limits)?;
        let table = PairingTable::new(points, &hops);
        let full = table.full_mask();
        nu += table.cost(full) as usize;
        for (u, v) in table.pairs(&hops, full) {
            for e in hops.path_edges(graph, u, v) {
                join.toggle(e);
            }
        }
    }
    if join.len() != nu || !graft.is_join(&join) {
        return Err(GraftError::InternalInvariant(format!(
            "pairing of cost {nu} realized an edge set of size {} that is{} a join",
            join.len(),
            if graft.is_join(&join) { "" } else { " not" }
        )));
    }
    Ok(MinJoinResult {
        join,
        nu,
        method: Method::ExactMatching,
    })
}

/// Endpoint masks of every edge, for parity checks over edge bitmasks.
fn endpoint_masks(graph: &Graph) -> Vec<u64> {
    graph
        .edges()
        .iter()
        .map(|&(u, v)| VertexSet::singleton(u).union(VertexSet::singleton(v)).bits())
        .collect()
}

#[inline]
fn odd_mask(endpoints: &[u64], mut edges: u64) -> u64 {
    let mut odd = 0;
    while edges != 0 {
        odd ^= endpoints[edges.trailing_zeros() as usize];
        edges &= edges - 1;
    }
    odd
}

/// All `k`-subsets of `0..m` as bitmasks, in increasing numeric order.
pub(crate) fn combinations(m: usize, k: usize) -> impl Iterator<Item = u64> {
    debug_assert!(m < 64);
    let limit = 1u64 << m;
    let mut next = if k > m { None } else { Some((1u64 << k) - 1) };
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (n < limit).then_some(n)
        };
        Some(cur)
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive oracle: scans edge subsets by increasing size.
pub fn brute_force_min_join(graft: &Graft, limits: &Limits) -> Result<MinJoinResult> {
    let graph = graft.graph();
    let m = graph.edge_count();
    let bound = limits.brute_force_edges.min(63);
    if m > bound {
        return Err(GraftError::Size {
            what: "edge count for exhaustive join search",
            actual: m,
            limit: bound,
        });
    }
    let ends = endpoint_masks(graph);
    let target = graft.terminals().bits();
    for k in 0..=m {
        if let Some(mask) = combinations(m, k).find(|&mask| odd_mask(&ends, mask) == target) {
            return Ok(MinJoinResult {
                join: EdgeSet::from_mask(m, mask),
                nu: k,
                method: Method::BruteForce,
            });
        }
    }
    Err(GraftError::InternalInvariant("no join found".into()))
}

/// Strategy for [`enumerate_min_joins`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Every edge subset of cardinality `ν`.
    SubsetScan,
    /// Closure of one minimum join under toggling zero-weight circuits.
    CircuitClosure,
}

#[derive(Clone, Debug)]
pub struct JoinEnumeration {
    pub nu: usize,
    /// Sorted lexicographically.
    pub joins: Vec<EdgeSet>,
    /// More than `cap` minimum joins exist; `joins` holds `cap` of them.
    pub truncated: bool,
}

impl JoinEnumeration {
    /// The joins, or `CapExceeded` when the enumeration was cut short.
    pub fn complete(self, cap: usize) -> Result<Vec<EdgeSet>> {
        if self.truncated {
            Err(GraftError::CapExceeded { cap })
        } else {
            Ok(self.joins)
        }
    }
}

/// Minimum joins of `graft`, up to `cap` of them.
pub fn enumerate_min_joins(
    graft: &Graft,
    cap: usize,
    method: Enumeration,
    limits: &Limits,
) -> Result<JoinEnumeration> {
    let seed = min_join(graft, limits)?;
    let graph = graft.graph();
    let m = graph.edge_count();
    let mut truncated = false;
    let mut joins = match method {
        Enumeration::SubsetScan => {
            let candidates = if m >= 64 { u128::MAX } else { binomial(m, seed.nu) };
            if candidates > limits.subset_scan as u128 {
                return Err(GraftError::Size {
                    what: "edge subsets of minimum-join size",
                    actual: candidates.min(usize::MAX as u128) as usize,
                    limit: limits.subset_scan,
                });
            }
            let ends = endpoint_masks(graph);
            let target = graft.terminals().bits();
            let mut found = Vec::new();
            for mask in combinations(m, seed.nu) {
                if odd_mask(&ends, mask) == target {
                    if found.len() == cap {
                        truncated = true;
                        break;
                    }
                    found.push(EdgeSet::from_mask(m, mask));
                }
            }
            found
        }
        Enumeration::CircuitClosure => {
            let cycles = simple_cycles(graph, limits.cycle_count)?;
            let mut seen: BTreeSet<EdgeSet> = BTreeSet::new();
            let mut queue = VecDeque::new();
            seen.insert(seed.join.clone());
            queue.push_back(seed.join);
            'search: while let Some(f) = queue.pop_front() {
                let w = WeightFn::new(&f);
                for c in &cycles {
                    if w.weight(c) != 0 {
                        continue;
                    }
                    let next = f.symmetric_difference(c);
                    if !seen.contains(&next) {
                        if seen.len() == cap {
                            truncated = true;
                            break 'search;
                        }
                        seen.insert(next.clone());
                        queue.push_back(next);
                    }
                }
            }
            seen.into_iter().collect()
        }
    };
    joins.sort();
    Ok(JoinEnumeration {
        nu: seed.nu,
        joins,
        truncated,
    })
}

/// The lexicographically smallest minimum join when all optima can be
/// enumerated, otherwise the pairing-based one.
pub fn canonical_min_join(graft: &Graft, limits: &Limits) -> Result<MinJoinResult> {
    match enumerate_min_joins(graft, usize::MAX, Enumeration::SubsetScan, limits) {
        Ok(en) => Ok(MinJoinResult {
            join: en.joins.into_iter().next().expect("every graft has a join"),
            nu: en.nu,
            method: Method::ExactMatching,
        }),
        Err(GraftError::Size { .. }) => min_join(graft, limits),
        Err(e) => Err(e),
    }
}

/// Edge sets of every simple cycle of `graph`; `Size` beyond `limit` cycles.
pub fn simple_cycles(graph: &Graph, limit: usize) -> Result<Vec<EdgeSet>> {
    struct Search<'a> {
        graph: &'a Graph,
        start: usize,
        path: Vec<usize>,
        edges: Vec<usize>,
        on_path: VertexSet,
        out: Vec<EdgeSet>,
        limit: usize,
    }

    impl Search<'_> {
        fn extend(&mut self, v: usize) -> Result<()> {
            for &(w, e) in self.graph.incident(v) {
                if w == self.start {
                    // Close the cycle once per direction pair: length at least
                    // three and second vertex smaller than the last.
                    if self.path.len() >= 3 && self.path[1] < v {
                        if self.out.len() == self.limit {
                            return Err(GraftError::Size {
                                what: "simple cycle count",
                                actual: self.limit + 1,
                                limit: self.limit,
                            });
                        }
                        let mut c = EdgeSet::from_ids(self.graph.edge_count(), self.edges.iter().copied());
                        c.insert(e);
                        self.out.push(c);
                    }
                } else if w > self.start && !self.on_path.contains(w) {
                    self.path.push(w);
                    self.edges.push(e);
                    self.on_path.insert(w);
                    self.extend(w)?;
                    self.on_path.remove(w);
                    self.edges.pop();
                    self.path.pop();
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        graph,
        start: 0,
        path: Vec::new(),
        edges: Vec::new(),
        on_path: VertexSet::EMPTY,
        out: Vec::new(),
        limit,
    };
    for s in 0..graph.vertex_count() {
        search.start = s;
        search.path.clear();
        search.path.push(s);
        search.on_path = VertexSet::singleton(s);
        search.extend(s)?;
    }
    Ok(search.out)
}

/// Whether every circuit has nonnegative `w_F`-weight.
///
/// Beyond the cycle bound this falls back to "`F` is a join of size `ν`",
/// which is equivalent for joins.
pub fn is_conservative(graft: &Graft, f: &EdgeSet, limits: &Limits) -> Result<bool> {
    match simple_cycles(graft.graph(), limits.cycle_count) {
        Ok(cycles) => {
            let w = WeightFn::new(f);
            Ok(cycles.iter().all(|c| w.weight(c) >= 0))
        }
        Err(err @ GraftError::Size { .. }) => {
            if graft.is_join(f) {
                Ok(f.len() == nu(graft, limits)?)
            } else {
                Err(err)
            }
        }
        Err(e) => Err(e),
    }
}

/// Allowed edges by the distance criterion: `xy` is allowed iff `dist(x, y) = -1`.
pub fn allowed_edges(graft: &Graft, limits: &Limits) -> Result<AllowedEdgeSet> {
    let table = DistanceTable::new(graft, limits)?;
    Ok(allowed_from_table(graft, &table))
}

pub(crate) fn allowed_from_table(graft: &Graft, table: &DistanceTable) -> AllowedEdgeSet {
    let graph = graft.graph();
    AllowedEdgeSet {
        edges: EdgeSet::from_ids(
            graph.edge_count(),
            graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| table.get(u, v) == Some(-1))
                .map(|(e, _)| e),
        ),
    }
}

/// Allowed edges as the union of all minimum joins.
pub fn allowed_edges_by_enumeration(graft: &Graft, cap: usize, limits: &Limits) -> Result<AllowedEdgeSet> {
    let joins = enumerate_min_joins(graft, cap, Enumeration::SubsetScan, limits)?.complete(cap)?;
    let mut edges = EdgeSet::new(graft.graph().edge_count());
    for j in &joins {
        edges = edges.union(j);
    }
    Ok(AllowedEdgeSet { edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graft::Graft;

    fn k2(t: &[&str]) -> Graft {
        Graft::from_labels(&["a", "b"], &[("a", "b")], t).unwrap()
    }

    fn p3() -> Graft {
        Graft::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c")], &["a", "c"]).unwrap()
    }

    fn c4() -> Graft {
        Graft::from_labels(
            &["v1", "v2", "v3", "v4"],
            &[("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")],
            &["v1", "v2", "v3", "v4"],
        )
        .unwrap()
    }

    #[test]
    fn min_join_examples() {
        let l = Limits::default();
        let r = min_join(&k2(&["a", "b"]), &l).unwrap();
        assert_eq!((r.nu, r.join.to_vec()), (1, vec![0]));
        let r = min_join(&p3(), &l).unwrap();
        assert_eq!((r.nu, r.join.to_vec()), (2, vec![0, 1]));
        let r = min_join(&c4(), &l).unwrap();
        assert_eq!(r.nu, 2);
        assert!(r.join.to_vec() == [0, 2] || r.join.to_vec() == [1, 3]);
    }

    #[test]
    fn brute_force_examples() {
        let l = Limits::default();
        let r = brute_force_min_join(&k2(&[]), &l).unwrap();
        assert_eq!((r.nu, r.join.len()), (0, 0));
        assert_eq!(brute_force_min_join(&p3(), &l).unwrap().nu, 2);
        assert_eq!(brute_force_min_join(&c4(), &l).unwrap().nu, 2);
    }

    #[test]
    fn terminal_bound_is_enforced() {
        let l = Limits {
            matching_terminals: 1,
            ..Limits::default()
        };
        assert!(matches!(min_join(&p3(), &l), Err(GraftError::Size { .. })));
        let l = Limits {
            brute_force_edges: 1,
            ..Limits::default()
        };
        assert!(matches!(brute_force_min_join(&p3(), &l), Err(GraftError::Size { .. })));
    }

    #[test]
    fn enumeration_examples_agree_across_methods() {
        let l = Limits::default();
        for (g, expected) in [
            (p3(), vec![vec![0, 1]]),
            (c4(), vec![vec![0, 2], vec![1, 3]]),
            (k2(&["a", "b"]), vec![vec![0]]),
        ] {
            for method in [Enumeration::SubsetScan, Enumeration::CircuitClosure] {
                let en = enumerate_min_joins(&g, 200, method, &l).unwrap();
                let got: Vec<Vec<usize>> = en.joins.iter().map(EdgeSet::to_vec).collect();
                assert_eq!(got, expected, "{method:?}");
                assert!(!en.truncated);
            }
        }
        let en = enumerate_min_joins(&c4(), 1, Enumeration::SubsetScan, &l).unwrap();
        assert!(en.truncated);
        assert_eq!(en.complete(1), Err(GraftError::CapExceeded { cap: 1 }));
    }

    #[test]
    fn conservativeness_examples() {
        let l = Limits::default();
        assert!(is_conservative(&p3(), &EdgeSet::from_ids(2, [0, 1]), &l).unwrap());
        assert!(is_conservative(&c4(), &EdgeSet::from_ids(4, [0, 2]), &l).unwrap());
        assert!(!is_conservative(&c4(), &EdgeSet::from_ids(4, [0, 1, 2]), &l).unwrap());
    }

    #[test]
    fn conservativeness_falls_back_beyond_cycle_bound() {
        let l = Limits {
            cycle_count: 0,
            ..Limits::default()
        };
        assert!(is_conservative(&c4(), &EdgeSet::from_ids(4, [0, 2]), &l).unwrap());
        let pair = c4().with_terminals(VertexSet::from_bits(0b11)).unwrap();
        assert!(is_conservative(&pair, &EdgeSet::from_ids(4, [0]), &l).unwrap());
        assert!(!is_conservative(&pair, &EdgeSet::from_ids(4, [1, 2, 3]), &l).unwrap());
        assert!(matches!(
            is_conservative(&c4(), &EdgeSet::from_ids(4, [0, 1, 2]), &l),
            Err(GraftError::Size { .. })
        ));
    }

    #[test]
    fn allowed_edge_examples() {
        let l = Limits::default();
        assert_eq!(allowed_edges(&p3(), &l).unwrap().edges.to_vec(), [0, 1]);
        assert_eq!(allowed_edges(&c4(), &l).unwrap().edges.to_vec(), [0, 1, 2, 3]);
        assert!(allowed_edges(&k2(&[]), &l).unwrap().edges.is_empty());
        for g in [p3(), c4(), k2(&[])] {
            assert_eq!(
                allowed_edges(&g, &l).unwrap(),
                allowed_edges_by_enumeration(&g, 200, &l).unwrap()
            );
        }
    }

    #[test]
    fn cycles_of_k4_minus_edge() {
        // Two triangles sharing an edge plus the outer 4-cycle.
        let g = Graph::from_labels(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")],
        )
        .unwrap();
        let mut lens: Vec<usize> = simple_cycles(&g, 100).unwrap().iter().map(EdgeSet::len).collect();
        lens.sort();
        assert_eq!(lens, [3, 3, 4]);
    }

    #[test]
    fn combinations_count_matches_binomial() {
        for m in 0..10 {
            for k in 0..=m + 1 {
                assert_eq!(combinations(m, k).count() as u128, binomial(m, k), "m={m} k={k}");
            }
        }
    }
}
