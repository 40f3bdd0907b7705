//! Distance components of bipartite grafts: capital and decapital members,
//! their beams, and the correspondence between oriented join edges and
//! decapital components over all roots.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::distance::{is_primal, stratify, DistanceTable};
use crate::error::{GraftError, Result};
use crate::graft::{induced_graft, EdgeSet, Graft};
use crate::join::nu;
use crate::vset::VertexSet;
use crate::Limits;

/// The unique join edge leaving a decapital component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Beam {
    pub edge: usize,
    /// Endpoint inside the component.
    pub root: usize,
    /// Endpoint outside the component.
    pub antiroot: usize,
}

/// A connected component of the subgraph induced by `{x : dist(r, x) <= level}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceComponent {
    pub root: usize,
    pub level: i32,
    pub vertices: VertexSet,
    /// Contains the root.
    pub capital: bool,
    /// Join edges in the cut of the component.
    pub join_cut: Vec<usize>,
    /// Set for decapital components whose cut carries exactly one join edge.
    pub beam: Option<Beam>,
    /// Members at distance exactly `level`.
    pub ak: VertexSet,
    /// Members at distance below `level`.
    pub dk: VertexSet,
    /// Connected components of the subgraph induced by `dk`.
    pub dk_components: Vec<VertexSet>,
}

impl DistanceComponent {
    pub fn is_decapital(&self) -> bool {
        !self.capital
    }

    /// The cut law: no join edge leaves a capital component, exactly one
    /// leaves a decapital one.
    pub fn satisfies_cut_law(&self) -> bool {
        if self.capital {
            self.join_cut.is_empty()
        } else {
            self.join_cut.len() == 1
        }
    }

    fn beam_or_err(&self) -> Result<Beam> {
        self.beam
            .ok_or_else(|| GraftError::Precondition("component has no beam (capital or malformed)".into()))
    }
}

fn require_bipartite(graft: &Graft) -> Result<()> {
    if graft.is_bipartite() {
        Ok(())
    } else {
        Err(GraftError::NotBipartite)
    }
}

/// Every distance component for `root`, one per (level, component) pair,
/// ordered by level and then by smallest member. The cut law is recorded but
/// not enforced.
pub fn raw_components(graft: &Graft, table: &DistanceTable, join: &EdgeSet, root: usize) -> Result<Vec<DistanceComponent>> {
    require_bipartite(graft)?;
    let graph = graft.graph();
    let strat = stratify(graft, table, root);
    let mut out = Vec::new();
    for &level in &strat.interval {
        let lower = strat.lower_set(level);
        for vertices in graph.components_within(lower) {
            let capital = vertices.contains(root);
            let join_cut: Vec<usize> = graph.cut(vertices).filter(|&e| join.contains(e)).collect();
            let beam = match (capital, join_cut.as_slice()) {
                (false, &[edge]) => {
                    let (u, v) = graph.endpoints(edge);
                    let (inner, outer) = if vertices.contains(u) { (u, v) } else { (v, u) };
                    Some(Beam {
                        edge,
                        root: inner,
                        antiroot: outer,
                    })
                }
                _ => None,
            };
            let ak = vertices.intersection(strat.level(level));
            let dk = vertices.difference(ak);
            out.push(DistanceComponent {
                root,
                level,
                vertices,
                capital,
                join_cut,
                beam,
                ak,
                dk,
                dk_components: graph.components_within(dk),
            });
        }
    }
    Ok(out)
}

/// Distance components for `root`, failing with `InternalInvariant` if any
/// of them breaks the cut law (which a minimum join cannot do).
pub fn components(graft: &Graft, table: &DistanceTable, join: &EdgeSet, root: usize) -> Result<Vec<DistanceComponent>> {
    let comps = raw_components(graft, table, join, root)?;
    if let Some(bad) = comps.iter().find(|k| !k.satisfies_cut_law()) {
        return Err(GraftError::InternalInvariant(format!(
            "{} component {:?} at level {} for root {} has {} join edges in its cut",
            if bad.capital { "capital" } else { "decapital" },
            bad.vertices,
            bad.level,
            graft.graph().label(root),
            bad.join_cut.len()
        )));
    }
    Ok(comps)
}

/// The decapital distance components for `root`.
pub fn noncap(graft: &Graft, table: &DistanceTable, join: &EdgeSet, root: usize) -> Result<Vec<DistanceComponent>> {
    Ok(components(graft, table, join, root)?
        .into_iter()
        .filter(DistanceComponent::is_decapital)
        .collect())
}

/// Whether `dist(r', r_K) = dist(r', s_K) - 1`.
pub fn is_k_congruent(graft: &Graft, table: &DistanceTable, other_root: usize, k: &DistanceComponent) -> Result<bool> {
    let beam = k.beam_or_err()?;
    graft.require_same_component(other_root, beam.root)?;
    Ok(table.dist(other_root, beam.root) == table.dist(other_root, beam.antiroot) - 1)
}

/// Oriented join edge `(root, antiroot)` → the decapital component with that
/// beam orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalityMap {
    pub pairs: BTreeMap<(usize, usize), DistanceComponent>,
}

impl UniversalityMap {
    /// Distinct vertex sets in the image.
    pub fn image(&self) -> Vec<VertexSet> {
        let mut img: Vec<VertexSet> = self.pairs.values().map(|k| k.vertices).collect();
        img.sort();
        img.dedup();
        img
    }
}

/// Decapital components over every root, keyed by vertex set.
pub fn all_noncap(graft: &Graft, table: &DistanceTable, join: &EdgeSet) -> Result<BTreeMap<VertexSet, DistanceComponent>> {
    let mut union: BTreeMap<VertexSet, DistanceComponent> = BTreeMap::new();
    for r in graft.graph().vertices() {
        for k in noncap(graft, table, join, r)? {
            if let Some(prev) = union.get(&k.vertices) {
                if prev.beam != k.beam {
                    return Err(GraftError::InternalInvariant(format!(
                        "component {:?} carries two different beams",
                        k.vertices
                    )));
                }
            } else {
                union.insert(k.vertices, k);
            }
        }
    }
    Ok(union)
}

/// For each join edge `xy` and orientation `(x, y)`: the component containing
/// `x` of the subgraph induced by `{v : dist(y, v) <= -1}`. Verifies that its
/// beam runs from `x` to `y`, that no other decapital component over any root
/// has that orientation, and that the map is a bijection onto all decapital
/// components.
pub fn universality_map(graft: &Graft, table: &DistanceTable, join: &EdgeSet) -> Result<UniversalityMap> {
    let graph = graft.graph();
    let union = all_noncap(graft, table, join)?;
    let mut by_orientation: BTreeMap<(usize, usize), VertexSet> = BTreeMap::new();
    for k in union.values() {
        let b = k.beam_or_err()?;
        if let Some(prev) = by_orientation.insert((b.root, b.antiroot), k.vertices) {
            return Err(GraftError::InternalInvariant(format!(
                "orientation ({}, {}) is the beam of both {:?} and {:?}",
                graph.label(b.root),
                graph.label(b.antiroot),
                prev,
                k.vertices
            )));
        }
    }
    let mut pairs = BTreeMap::new();
    for e in join.iter() {
        let (u, v) = graph.endpoints(e);
        for (x, y) in [(u, v), (v, u)] {
            let k = components(graft, table, join, y)?
                .into_iter()
                .find(|k| k.level == -1 && k.vertices.contains(x))
                .ok_or_else(|| {
                    GraftError::InternalInvariant(format!(
                        "`{}` is not at distance -1 from `{}`",
                        graph.label(x),
                        graph.label(y)
                    ))
                })?;
            if k.beam.map(|b| (b.root, b.antiroot)) != Some((x, y)) {
                return Err(GraftError::InternalInvariant(format!(
                    "component {:?} of root `{}` does not have beam ({}, {})",
                    k.vertices,
                    graph.label(y),
                    graph.label(x),
                    graph.label(y)
                )));
            }
            pairs.insert((x, y), k);
        }
    }
    let map = UniversalityMap { pairs };
    let image = map.image();
    if image.len() != map.pairs.len() {
        return Err(GraftError::InternalInvariant("orientation map is not injective".into()));
    }
    if image.iter().ne(union.keys()) {
        return Err(GraftError::InternalInvariant(
            "orientation map image differs from the union of decapital components".into(),
        ));
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub nu: usize,
    /// `(root, number of decapital components)`.
    pub per_root: Vec<(usize, usize)>,
    /// Distinct decapital components over all roots.
    pub union: usize,
}

/// Checks that each root has `ν` decapital components (`ν` of its graph
/// component) and that there are `2ν` distinct ones over all roots.
pub fn check_counts(graft: &Graft, table: &DistanceTable, join: &EdgeSet) -> Result<CountReport> {
    let graph = graft.graph();
    let nu_of = |comp: VertexSet| graph.edges_within(comp).filter(|&e| join.contains(e)).count();
    let mut per_root = Vec::new();
    for r in graph.vertices() {
        let count = noncap(graft, table, join, r)?.len();
        let expected = nu_of(graft.component_of(r));
        if count != expected {
            return Err(GraftError::PropertyViolation {
                check: "counting",
                detail: format!(
                    "root `{}` has {count} decapital components, expected {expected}",
                    graph.label(r)
                ),
            });
        }
        per_root.push((r, count));
    }
    let union = all_noncap(graft, table, join)?.len();
    if union != 2 * join.len() {
        return Err(GraftError::PropertyViolation {
            check: "counting",
            detail: format!("{union} distinct decapital components, expected {}", 2 * join.len()),
        });
    }
    Ok(CountReport {
        nu: table.nu(),
        per_root,
        union,
    })
}

/// Checks, for a decapital `K`, that `F ∩ E(K)` is a minimum join of
/// `(G, T)_F[K]`, that this graft is primal with respect to the beam root, and
/// that its distances from the beam root are the outer distances from the root
/// shifted by `dist(r, r_K)`.
pub fn check_primal_shift(
    graft: &Graft,
    table: &DistanceTable,
    join: &EdgeSet,
    k: &DistanceComponent,
    limits: &Limits,
) -> Result<()> {
    let beam = k.beam_or_err()?;
    let violation = |detail: alloc::string::String| GraftError::PropertyViolation {
        check: "primal-shift",
        detail,
    };
    let inner = induced_graft(graft, join, k.vertices)?;
    let local_nu = nu(&inner.graft, limits)?;
    if !inner.graft.is_join(&inner.join) || inner.join.len() != local_nu {
        return Err(violation(format!(
            "F ∩ E(K) has {} edges but the induced graft has ν = {local_nu}",
            inner.join.len()
        )));
    }
    let local = DistanceTable::new(&inner.graft, limits)?;
    let local_root = inner.local_vertex(beam.root).expect("beam root lies in K");
    if !is_primal(&inner.graft, &local, local_root) {
        return Err(violation(format!("induced graft is not primal for {:?}", k.vertices)));
    }
    let offset = table.dist(k.root, beam.root);
    for (i, &x) in inner.vertex_map.iter().enumerate() {
        let expected = table.dist(k.root, x) - offset;
        let got = local.dist(local_root, i);
        if got != expected {
            return Err(violation(format!(
                "inner distance to `{}` is {got}, expected {expected}",
                graft.graph().label(x)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::join::min_join;
    use alloc::vec;

    fn setup(g: &Graft, f: &[usize]) -> (DistanceTable, EdgeSet) {
        let t = DistanceTable::new(g, &Limits::default()).unwrap();
        (t, EdgeSet::from_ids(g.graph().edge_count(), f.iter().copied()))
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

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn p3_components_for_root_a() {
        let g = p3();
        let (t, f) = setup(&g, &[0, 1]);
        let comps = components(&g, &t, &f, 0).unwrap();
        let decap: Vec<(i32, VertexSet)> = comps.iter().filter(|k| !k.capital).map(|k| (k.level, k.vertices)).collect();
        assert_eq!(decap, [(-2, set(&[2])), (-1, set(&[1, 2]))]);
        let cap: Vec<VertexSet> = comps.iter().filter(|k| k.capital).map(|k| k.vertices).collect();
        assert_eq!(cap, [set(&[0, 1, 2])]);
        let bc = &comps[1];
        assert_eq!(
            bc.beam,
            Some(Beam {
                edge: 0,
                root: 1,
                antiroot: 0
            })
        );
        assert_eq!((bc.ak, bc.dk, bc.dk_components.clone()), (set(&[1]), set(&[2]), vec![set(&[2])]));
    }

    #[test]
    fn noncap_examples() {
        let g = p3();
        let (t, f) = setup(&g, &[0, 1]);
        assert_eq!(noncap(&g, &t, &f, 0).unwrap().len(), 2);
        let b: Vec<VertexSet> = noncap(&g, &t, &f, 1).unwrap().iter().map(|k| k.vertices).collect();
        assert_eq!(b, [set(&[0]), set(&[2])]);
        let k2 = Graft::from_labels(&["a", "b"], &[("a", "b")], &["a", "b"]).unwrap();
        let (t, f) = setup(&k2, &[0]);
        let ks = noncap(&k2, &t, &f, 0).unwrap();
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0].vertices, set(&[1]));
    }

    #[test]
    fn c4_decapital_components_for_v1() {
        let g = c4();
        let (t, f) = setup(&g, &[0, 2]);
        let ks: Vec<(i32, VertexSet)> = noncap(&g, &t, &f, 0).unwrap().iter().map(|k| (k.level, k.vertices)).collect();
        assert_eq!(ks, [(-1, set(&[1])), (-1, set(&[3]))]);
    }

    #[test]
    fn congruence_examples() {
        let g = p3();
        let (t, f) = setup(&g, &[0, 1]);
        let kc = noncap(&g, &t, &f, 0).unwrap().into_iter().find(|k| k.vertices == set(&[2])).unwrap();
        assert_eq!(kc.beam.map(|b| (b.root, b.antiroot)), Some((2, 1)));
        assert_eq!(is_k_congruent(&g, &t, 0, &kc), Ok(true));
        assert_eq!(is_k_congruent(&g, &t, 1, &kc), Ok(true));
        for r in 0..3 {
            for k in noncap(&g, &t, &f, r).unwrap() {
                let s = k.beam.unwrap().antiroot;
                assert_eq!(is_k_congruent(&g, &t, s, &k), Ok(true));
            }
        }
    }

    #[test]
    fn universality_examples() {
        let g = p3();
        let (t, f) = setup(&g, &[0, 1]);
        let map = universality_map(&g, &t, &f).unwrap();
        assert_eq!(map.pairs[&(1, 0)].vertices, set(&[1, 2]));
        assert_eq!(map.pairs[&(2, 1)].vertices, set(&[2]));
        assert_eq!(map.pairs.len(), 4);

        let g = c4();
        let (t, f) = setup(&g, &[0, 2]);
        let map = universality_map(&g, &t, &f).unwrap();
        assert_eq!(map.pairs.len(), 4);
        assert_eq!(map.image().len(), 4);
    }

    #[test]
    fn count_examples() {
        let cases: [(Graft, Vec<usize>, Vec<usize>, usize); 3] = [
            (p3(), vec![0, 1], vec![2, 2, 2], 4),
            (
                Graft::from_labels(&["a", "b"], &[("a", "b")], &["a", "b"]).unwrap(),
                vec![0],
                vec![1, 1],
                2,
            ),
            (c4(), vec![0, 2], vec![2, 2, 2, 2], 4),
        ];
        for (g, f, per_root, union) in cases {
            let (t, f) = setup(&g, &f);
            let report = check_counts(&g, &t, &f).unwrap();
            assert_eq!(report.per_root.iter().map(|p| p.1).collect::<Vec<_>>(), per_root);
            assert_eq!(report.union, union);
        }
    }

    #[test]
    fn primal_shift_examples() {
        let l = Limits::default();
        let g = p3();
        let (t, f) = setup(&g, &[0, 1]);
        for k in noncap(&g, &t, &f, 0).unwrap() {
            check_primal_shift(&g, &t, &f, &k, &l).unwrap();
        }
        let g = c4();
        let f = min_join(&g, &l).unwrap().join;
        let t = DistanceTable::new(&g, &l).unwrap();
        for r in 0..4 {
            for k in noncap(&g, &t, &f, r).unwrap() {
                check_primal_shift(&g, &t, &f, &k, &l).unwrap();
            }
        }
    }

    #[test]
    fn non_minimum_join_breaks_cut_law() {
        // C4 with all four edges as the join of T = ∅.
        let g = Graft::from_labels(
            &["v1", "v2", "v3", "v4"],
            &[("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")],
            &[],
        )
        .unwrap();
        let t = DistanceTable::new(&g, &Limits::default()).unwrap();
        // Distances are hop distances; with F = E(C4) every component's cut
        // carries two join edges.
        let f = EdgeSet::from_ids(4, 0..4);
        assert!(matches!(components(&g, &t, &f, 0), Err(GraftError::InternalInvariant(_))));
    }

    #[test]
    fn odd_cycles_are_rejected() {
        let g = Graft::from_labels(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")], &[]).unwrap();
        let t = DistanceTable::new(&g, &Limits::default()).unwrap();
        assert_eq!(raw_components(&g, &t, &EdgeSet::new(3), 0), Err(GraftError::NotBipartite));
    }
}
