//! Distances induced by a minimum join and their stratification around a root.
//!
//! For a minimum join `F`, the `F`-distance between `x` and `y` is the least
//! `w_F`-weight of an `x`–`y` path. It does not depend on `F`: it equals
//! `ν(G, T Δ {x, y}) - ν(G, T)`, which is how [`DistanceTable`] computes it.
//! [`dist_via_paths`] evaluates the path minimum directly and serves as the
//! oracle for that identity.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GraftError, Result};
use crate::graft::{EdgeSet, Graft, WeightFn};
use crate::join::{check_terminal_bound, nu, nu_with, HopMatrix, PairingTable};
use crate::vset::VertexSet;
use crate::Limits;

const NONE: i32 = i32::MIN;

/// All-pairs distances of a graft; pairs in different components have none.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    nu: usize,
    dist: Vec<i32>,
}

impl DistanceTable {
    /// One pairing table over the terminals of each component yields
    /// `ν(G, T Δ {x, y})` for every pair at once: the vertices `x`, `y` either
    /// leave the terminal set or must be paired with a remaining terminal.
    pub fn new(graft: &Graft, limits: &Limits) -> Result<Self> {
        let graph = graft.graph();
        let n = graph.vertex_count();
        let hops = HopMatrix::new(graph);
        let mut dist = vec![NONE; n * n];
        let mut total_nu = 0;
        for comp in graft.components() {
            let points: Vec<usize> = comp.intersection(graft.terminals()).iter().collect();
            check_terminal_bound(points.len(), limits)?;
            let table = PairingTable::new(points, &hops);
            let full = table.full_mask();
            let base = table.cost(full) as i64;
            total_nu += base as usize;
            let pts = table.points();
            let index = |v: usize| pts.iter().position(|&p| p == v);
            let pair_with = |excluded: usize, outside: usize| {
                (0..pts.len())
                    .filter(|&c| c != excluded)
                    .map(|c| table.cost(full ^ (1 << excluded) ^ (1 << c)) as i64 + hops.get(outside, pts[c]) as i64)
                    .min()
                    .expect("a terminal has a partner in its component")
            };
            for x in comp.iter() {
                dist[x * n + x] = 0;
                for y in comp.iter().filter(|&y| y > x) {
                    let shifted = match (index(x), index(y)) {
                        (Some(a), Some(b)) => table.cost(full ^ (1 << a) ^ (1 << b)) as i64,
                        (Some(a), None) => pair_with(a, y),
                        (None, Some(b)) => pair_with(b, x),
                        (None, None) => {
                            let mut best = base + hops.get(x, y) as i64;
                            for c in 0..pts.len() {
                                for e in (0..pts.len()).filter(|&e| e != c) {
                                    let cost = table.cost(full ^ (1 << c) ^ (1 << e)) as i64
                                        + hops.get(x, pts[c]) as i64
                                        + hops.get(y, pts[e]) as i64;
                                    best = best.min(cost);
                                }
                            }
                            best
                        }
                    };
                    let d = (shifted - base) as i32;
                    dist[x * n + y] = d;
                    dist[y * n + x] = d;
                }
            }
        }
        Ok(DistanceTable { n, nu: total_nu, dist })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<i32> {
        let d = self.dist[x * self.n + y];
        (d != NONE).then_some(d)
    }

    /// Distance between co-component vertices.
    ///
    /// # Panics
    /// If `x` and `y` lie in different components.
    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> i32 {
        self.get(x, y).expect("distance queried across components")
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }
}

/// `ν(G, T Δ {x, y}) - ν(G, T)`, computed from two independent minimum-join
/// sizes.
pub fn dist(graft: &Graft, x: usize, y: usize, limits: &Limits) -> Result<i32> {
    graft.require_same_component(x, y)?;
    let hops = HopMatrix::new(graft.graph());
    let mut shifted = graft.terminals();
    shifted.toggle(x);
    shifted.toggle(y);
    let before = nu(graft, limits)?;
    let after = nu_with(graft, &hops, shifted, limits)?;
    Ok(after as i32 - before as i32)
}

/// Minimum `w_F`-weight over all simple `x`–`y` paths, by exhaustive search.
pub fn dist_via_paths(graft: &Graft, join: &EdgeSet, x: usize, y: usize, limits: &Limits) -> Result<i32> {
    let graph = graft.graph();
    if graph.vertex_count() > limits.path_vertices {
        return Err(GraftError::Size {
            what: "vertex count for path enumeration",
            actual: graph.vertex_count(),
            limit: limits.path_vertices,
        });
    }
    graft.require_same_component(x, y)?;
    if x == y {
        return Ok(0);
    }
    let w = WeightFn::new(join);
    let mut best = i64::MAX;
    let mut stack = vec![(x, VertexSet::singleton(x), 0i64, 0usize)];
    // Iterative DFS: (vertex, visited, weight so far, next incidence index).
    while let Some(top) = stack.last_mut() {
        let (v, visited, weight, idx) = *top;
        let incident = graph.incident(v);
        if idx == incident.len() {
            stack.pop();
            continue;
        }
        top.3 += 1;
        let (u, e) = incident[idx];
        if visited.contains(u) {
            continue;
        }
        let total = weight + w.edge(e) as i64;
        if u == y {
            best = best.min(total);
        } else {
            stack.push((u, visited.union(VertexSet::singleton(u)), total, 0));
        }
    }
    Ok(best as i32)
}

/// Distances from a root, grouped into levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    pub root: usize,
    /// Attained distances, ascending.
    pub interval: Vec<i32>,
    pub levels: BTreeMap<i32, VertexSet>,
}

impl Stratification {
    pub fn level(&self, i: i32) -> VertexSet {
        self.levels.get(&i).copied().unwrap_or_default()
    }

    /// Vertices at distance at most `i` from the root.
    pub fn lower_set(&self, i: i32) -> VertexSet {
        self.levels
            .range(..=i)
            .fold(VertexSet::EMPTY, |acc, (_, s)| acc.union(*s))
    }
}

/// Levels of the root's component.
pub fn stratify(graft: &Graft, table: &DistanceTable, root: usize) -> Stratification {
    let mut levels: BTreeMap<i32, VertexSet> = BTreeMap::new();
    for v in graft.component_of(root) {
        levels.entry(table.dist(root, v)).or_default().insert(v);
    }
    Stratification {
        root,
        interval: levels.keys().copied().collect(),
        levels,
    }
}

/// Whether all pairwise distances within `set` are nonnegative.
pub fn is_extreme(graft: &Graft, table: &DistanceTable, set: VertexSet) -> Result<bool> {
    let mut extreme = true;
    for x in set {
        for y in set {
            graft.require_same_component(x, y)?;
            extreme &= table.dist(x, y) >= 0;
        }
    }
    Ok(extreme)
}

/// Whether no vertex of the root's component is at positive distance.
pub fn is_primal(graft: &Graft, table: &DistanceTable, root: usize) -> bool {
    graft.component_of(root).iter().all(|v| table.dist(root, v) <= 0)
}
