//! Maximum negative sets.
//!
//! `X ⊆ V \ S` is negative for `S` (under a join `F`) when every `x ∈ X` has
//! a path of negative `w_F`-weight ending in `S` whose other vertices all lie
//! in `X`. Negative sets are closed under union, so a maximum one exists; it
//! is the greatest fixed point of peeling off vertices that lack such a path.

use alloc::format;
use alloc::vec::Vec;

use crate::decomposition::DistanceComponent;
use crate::error::{GraftError, Result};
use crate::graft::{EdgeSet, Graft, WeightFn};
use crate::kl::{attachments, ComponentClasses, KlDecomposition};
use crate::join::AllowedEdgeSet;
use crate::vset::VertexSet;
use crate::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeSetResult {
    pub base: VertexSet,
    pub avoided: VertexSet,
    pub set: VertexSet,
    /// For each member, a negative path from it to the base, as vertices.
    pub witnesses: Vec<(usize, Vec<usize>)>,
}

/// A negative-weight path from `x` to a vertex of `base` through `within`.
pub fn negative_witness(graft: &Graft, join: &EdgeSet, x: usize, within: VertexSet, base: VertexSet) -> Option<Vec<usize>> {
    fn extend(
        graft: &Graft,
        w: WeightFn<'_>,
        path: &mut Vec<usize>,
        visited: VertexSet,
        weight: i64,
        within: VertexSet,
        base: VertexSet,
    ) -> bool {
        let v = *path.last().expect("path is never empty");
        // The rest of the path has at most one edge per unvisited vertex plus
        // the final edge into the base.
        let reachable_drop = within.difference(visited).len() as i64 + 1;
        if weight - reachable_drop >= 0 {
            return false;
        }
        for &(u, e) in graft.graph().incident(v) {
            let total = weight + w.edge(e) as i64;
            if base.contains(u) {
                if total < 0 {
                    path.push(u);
                    return true;
                }
            } else if within.contains(u) && !visited.contains(u) {
                path.push(u);
                if extend(graft, w, path, visited.union(VertexSet::singleton(u)), total, within, base) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }

    let mut path = alloc::vec![x];
    let found = extend(graft, WeightFn::new(join), &mut path, VertexSet::singleton(x), 0, within, base);
    found.then_some(path)
}

/// Whether `path` certifies membership in a negative set `set` for `base`
/// avoiding `avoid`.
pub fn is_valid_witness(graft: &Graft, join: &EdgeSet, base: VertexSet, set: VertexSet, avoid: VertexSet, path: &[usize]) -> bool {
    let Some((&end, inner)) = path.split_last() else {
        return false;
    };
    let distinct = path.iter().copied().collect::<VertexSet>().len() == path.len();
    let weight = WeightFn::new(join).path_weight(graft.graph(), path);
    distinct
        && !inner.is_empty()
        && base.contains(end)
        && inner.iter().all(|&v| set.contains(v) && !avoid.contains(v) && !base.contains(v))
        && matches!(weight, Some(w) if w < 0)
}

fn check_inputs(graft: &Graft, base: VertexSet, avoid: VertexSet, limits: &Limits) -> Result<()> {
    let n = graft.graph().vertex_count();
    if n > limits.path_vertices {
        return Err(GraftError::Size {
            what: "vertex count for negative-path search",
            actual: n,
            limit: limits.path_vertices,
        });
    }
    if !base.is_disjoint(avoid) {
        return Err(GraftError::Precondition("base and avoided sets intersect".into()));
    }
    Ok(())
}

/// The maximum negative set for `base` avoiding `avoid` (empty `avoid` gives
/// the plain maximum negative set).
pub fn max_negative_set(
    graft: &Graft,
    join: &EdgeSet,
    base: VertexSet,
    avoid: VertexSet,
    limits: &Limits,
) -> Result<NegativeSetResult> {
    let order: Vec<usize> = graft.graph().vertices().iter().collect();
    max_negative_set_in_order(graft, join, base, avoid, &order, limits)
}

/// Like [`max_negative_set`], visiting vertices in `order` on every peeling
/// round. The result does not depend on the order.
pub fn max_negative_set_in_order(
    graft: &Graft,
    join: &EdgeSet,
    base: VertexSet,
    avoid: VertexSet,
    order: &[usize],
    limits: &Limits,
) -> Result<NegativeSetResult> {
    check_inputs(graft, base, avoid, limits)?;
    let mut set = graft.graph().vertices().difference(base).difference(avoid);
    loop {
        let mut changed = false;
        for &x in order {
            if set.contains(x) && negative_witness(graft, join, x, set, base).is_none() {
                set.remove(x);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let witnesses = set
        .iter()
        .map(|x| {
            let path = negative_witness(graft, join, x, set, base)
                .ok_or_else(|| GraftError::InternalInvariant(format!("peeled set lost the witness of {x}")))?;
            Ok((x, path))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NegativeSetResult {
        base,
        avoided: avoid,
        set,
        witnesses,
    })
}

/// Components of `G[D(K)]` joined to `s` by an allowed edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborFamily {
    pub components: Vec<VertexSet>,
    pub union: VertexSet,
}

pub fn nei_comp_family(graft: &Graft, allowed: &AllowedEdgeSet, k: &DistanceComponent, s: VertexSet) -> Result<NeighborFamily> {
    if s.is_disjoint(k.ak) {
        return Err(GraftError::Precondition(format!(
            "set {s:?} does not meet A(K) = {:?}",
            k.ak
        )));
    }
    let graph = graft.graph();
    let components: Vec<VertexSet> = k
        .dk_components
        .iter()
        .copied()
        .filter(|&l| {
            graph.cut(l).any(|e| {
                let (u, v) = graph.endpoints(e);
                allowed.contains(e) && (s.contains(u) || s.contains(v))
            })
        })
        .collect();
    let union = components.iter().fold(VertexSet::EMPTY, |acc, l| acc.union(*l));
    Ok(NeighborFamily { components, union })
}

/// Verifies for a decapital `K` that the components of `G[D(K)]` split
/// disjointly over the family by allowed attachment, and that each member's
/// neighbor set is its maximum negative set avoiding the antiroot class
/// (and, away from the root fragment, also its plain maximum negative set),
/// so that these sets partition `D(K)`.
pub fn check_neicomp2negset(
    graft: &Graft,
    join: &EdgeSet,
    kl: &KlDecomposition,
    k: &DistanceComponent,
    cc: &ComponentClasses,
    limits: &Limits,
) -> Result<()> {
    let violation = |clause: &str, detail: alloc::string::String| GraftError::PropertyViolation {
        check: "neighbor-negative-sets",
        detail: format!("clause {clause} for {:?}: {detail}", k.vertices),
    };
    for &l in &k.dk_components {
        let n = attachments(graft, kl, cc, l).len();
        if n != 1 {
            return Err(violation("(a)", format!("{l:?} attaches to {n} family members")));
        }
    }
    let antiroot_class = kl.classes[cc.antiroot_class];
    let mut covered = VertexSet::EMPTY;
    for (i, &s) in cc.ak_family.iter().enumerate() {
        let fam = nei_comp_family(graft, &kl.allowed, k, s)?;
        let avoiding = max_negative_set(graft, join, s, antiroot_class, limits)?.set;
        if fam.union != avoiding {
            return Err(violation(
                if i == 0 { "(b)" } else { "(c)" },
                format!("N*({s:?}) = {:?} but the negative set avoiding the antiroot class is {avoiding:?}", fam.union),
            ));
        }
        if i > 0 {
            let plain = max_negative_set(graft, join, s, VertexSet::EMPTY, limits)?.set;
            if plain != avoiding {
                return Err(violation(
                    "(c)",
                    format!("negative sets of {s:?} differ with and without avoidance: {plain:?} vs {avoiding:?}"),
                ));
            }
        }
        if !covered.is_disjoint(fam.union) {
            return Err(violation("(d)", format!("N*({s:?}) overlaps another member's")));
        }
        covered = covered.union(fam.union);
    }
    if covered != k.dk {
        return Err(violation("(d)", format!("union {covered:?} differs from D(K) = {:?}", k.dk)));
    }
    Ok(())
}
