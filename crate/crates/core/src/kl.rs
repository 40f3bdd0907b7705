//! Factor-components and the Kotzig–Lovász partition of a graft, plus the
//! classes a decapital distance component borders on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::DistanceComponent;
use crate::distance::DistanceTable;
use crate::error::{GraftError, Result};
use crate::graft::Graft;
use crate::join::{allowed_from_table, AllowedEdgeSet};
use crate::vset::VertexSet;

#[derive(Clone, Debug)]
pub struct KlDecomposition {
    pub allowed: AllowedEdgeSet,
    /// Components of the allowed-edge subgraph; isolated vertices are
    /// singletons. Ordered by smallest member.
    pub factor_components: Vec<VertexSet>,
    /// Equivalence classes, ordered by smallest member.
    pub classes: Vec<VertexSet>,
    class_of: Vec<usize>,
    factor_of_class: Vec<usize>,
}

impl KlDecomposition {
    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Index of the factor-component holding class `c`.
    pub fn factor_of_class(&self, c: usize) -> usize {
        self.factor_of_class[c]
    }

    pub fn factor_component_of(&self, v: usize) -> usize {
        self.factor_of_class[self.class_of[v]]
    }

    /// Indices of the classes inside factor-component `fc`.
    pub fn classes_in(&self, fc: usize) -> Vec<usize> {
        (0..self.classes.len()).filter(|&c| self.factor_of_class[c] == fc).collect()
    }

    /// Canonical class label: the smallest external vertex id in the class.
    pub fn class_label<'g>(&self, graft: &'g Graft, c: usize) -> &'g str {
        self.classes[c]
            .iter()
            .map(|v| graft.graph().label(v))
            .min()
            .unwrap_or("")
    }
}

/// Factor-components from the allowed edges, classes by `u ~ v` iff
/// `u = v` or both share a factor-component with `dist(u, v) = 0`.
///
/// The relation is grown from the smallest unassigned vertex; transitivity
/// is then verified over every pair, failing with `PropertyViolation`.
pub fn kl_decomposition(graft: &Graft, table: &DistanceTable) -> Result<KlDecomposition> {
    let graph = graft.graph();
    let n = graph.vertex_count();
    let allowed = allowed_from_table(graft, table);

    let mut allowed_adj = vec![VertexSet::EMPTY; n];
    for e in allowed.edges.iter() {
        let (u, v) = graph.endpoints(e);
        allowed_adj[u].insert(v);
        allowed_adj[v].insert(u);
    }
    let mut factor_components = Vec::new();
    let mut rest = graph.vertices();
    while let Some(s) = rest.first() {
        let mut comp = VertexSet::singleton(s);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let next = frontier.iter().fold(VertexSet::EMPTY, |acc, v| acc.union(allowed_adj[v]));
            frontier = next.difference(comp);
            comp = comp.union(frontier);
        }
        rest = rest.difference(comp);
        factor_components.push(comp);
    }

    let related = |u: usize, v: usize| u == v || table.get(u, v) == Some(0);
    let mut classes = Vec::new();
    let mut factor_of_class = Vec::new();
    for (fi, &fc) in factor_components.iter().enumerate() {
        let mut rest = fc;
        while let Some(u) = rest.first() {
            let class: VertexSet = rest.iter().filter(|&v| related(u, v)).collect();
            rest = rest.difference(class);
            classes.push(class);
            factor_of_class.push(fi);
        }
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&c| classes[c].first());
    let classes: Vec<VertexSet> = order.iter().map(|&c| classes[c]).collect();
    let factor_of_class: Vec<usize> = order.iter().map(|&c| factor_of_class[c]).collect();
    let mut class_of = vec![0; n];
    for (c, class) in classes.iter().enumerate() {
        for v in *class {
            class_of[v] = c;
        }
    }

    for &fc in &factor_components {
        for u in fc {
            for v in fc {
                if related(u, v) != (class_of[u] == class_of[v]) {
                    return Err(GraftError::PropertyViolation {
                        check: "kl-equivalence",
                        detail: format!(
                            "relation is not transitive at `{}`, `{}`",
                            graph.label(u),
                            graph.label(v)
                        ),
                    });
                }
            }
        }
    }

    Ok(KlDecomposition {
        allowed,
        factor_components,
        classes,
        class_of,
        factor_of_class,
    })
}

/// Classes bordering a decapital distance component `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentClasses {
    /// Class containing the inner ends of allowed edges leaving `K`.
    pub root_class: usize,
    /// Class containing the outer ends of allowed edges leaving `K`.
    pub antiroot_class: usize,
    pub factor_component: usize,
    /// `V(K) ∩ root class`.
    pub root_fragment: VertexSet,
    /// The root fragment first, then every other class meeting `A(K)`.
    pub ak_family: Vec<VertexSet>,
}

impl ComponentClasses {
    /// Family members other than the root fragment.
    pub fn non_fragment(&self) -> &[VertexSet] {
        &self.ak_family[1..]
    }
}

/// Locates the root and antiroot classes of a decapital component: every
/// allowed edge of its cut must run from one class inside to one class
/// outside, both in a single factor-component.
pub fn component_classes(graft: &Graft, kl: &KlDecomposition, k: &DistanceComponent) -> Result<ComponentClasses> {
    if k.capital {
        return Err(GraftError::Precondition("component is capital".into()));
    }
    let graph = graft.graph();
    let violation = |detail| GraftError::PropertyViolation {
        check: "shore-classes",
        detail,
    };
    let mut inner_classes = Vec::new();
    let mut outer_classes = Vec::new();
    for e in graph.cut(k.vertices).filter(|&e| kl.allowed.contains(e)) {
        let (u, v) = graph.endpoints(e);
        let (inner, outer) = if k.vertices.contains(u) { (u, v) } else { (v, u) };
        inner_classes.push(kl.class_of(inner));
        outer_classes.push(kl.class_of(outer));
    }
    inner_classes.sort_unstable();
    outer_classes.sort_unstable();
    inner_classes.dedup();
    outer_classes.dedup();
    let (root_class, antiroot_class) = match (inner_classes.as_slice(), outer_classes.as_slice()) {
        (&[s], &[t]) => (s, t),
        _ => {
            return Err(violation(format!(
                "allowed edges leaving {:?} touch {} inner and {} outer classes",
                k.vertices,
                inner_classes.len(),
                outer_classes.len()
            )))
        }
    };
    if root_class == antiroot_class || kl.factor_of_class(root_class) != kl.factor_of_class(antiroot_class) {
        return Err(violation(format!(
            "root and antiroot classes of {:?} are equal or lie in different factor-components",
            k.vertices
        )));
    }
    let root_fragment = k.vertices.intersection(kl.classes[root_class]);
    let mut ak_family = vec![root_fragment];
    ak_family.extend(
        kl.classes
            .iter()
            .enumerate()
            .filter(|&(c, class)| c != root_class && !class.is_disjoint(k.ak))
            .map(|(_, class)| *class),
    );
    Ok(ComponentClasses {
        root_class,
        antiroot_class,
        factor_component: kl.factor_of_class(root_class),
        root_fragment,
        ak_family,
    })
}

/// Family members joined to `component` by an allowed edge, as indices into
/// `cc.ak_family`.
pub fn attachments(graft: &Graft, kl: &KlDecomposition, cc: &ComponentClasses, component: VertexSet) -> Vec<usize> {
    let graph = graft.graph();
    let touched: VertexSet = graph
        .cut(component)
        .filter(|&e| kl.allowed.contains(e))
        .map(|e| {
            let (u, v) = graph.endpoints(e);
            if component.contains(u) {
                v
            } else {
                u
            }
        })
        .collect();
    cc.ak_family
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_disjoint(touched))
        .map(|(i, _)| i)
        .collect()
}

/// Verifies for a decapital `K` that the family partitions `A(K)`, that the
/// factor-component of every non-fragment member lies inside `K`, and that
/// every component of `G[D(K)]` attaches by allowed edges to exactly one
/// family member.
pub fn check_ak2part(graft: &Graft, kl: &KlDecomposition, k: &DistanceComponent, cc: &ComponentClasses) -> Result<()> {
    let graph = graft.graph();
    let violation = |clause: &str, detail: alloc::string::String| GraftError::PropertyViolation {
        check: "ak-partition",
        detail: format!("clause {clause} for {:?}: {detail}", k.vertices),
    };
    let mut covered = VertexSet::EMPTY;
    for s in &cc.ak_family {
        if s.is_empty() || !s.is_disjoint(covered) {
            return Err(violation("(i)", format!("member {s:?} is empty or overlaps another")));
        }
        covered = covered.union(*s);
    }
    if covered != k.ak {
        return Err(violation("(i)", format!("family covers {covered:?}, A(K) is {:?}", k.ak)));
    }
    for s in cc.non_fragment() {
        let c = s.first().map(|v| kl.factor_component_of(v)).unwrap_or(0);
        let fc = kl.factor_components[c];
        if !fc.is_subset(k.vertices) {
            return Err(violation(
                "(ii)",
                format!("factor-component {fc:?} of class {s:?} leaves K"),
            ));
        }
    }
    for &l in &k.dk_components {
        let att = attachments(graft, kl, cc, l);
        if att.len() != 1 {
            return Err(violation(
                "(iii)",
                format!(
                    "component {:?} (around `{}`) attaches to {} family members",
                    l,
                    graph.label(l.first().unwrap_or(0)),
                    att.len()
                ),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::noncap;
    use crate::graft::EdgeSet;
    use crate::Limits;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
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
    fn decomposition_examples() {
        let l = Limits::default();
        let g = p3();
        let kl = kl_decomposition(&g, &DistanceTable::new(&g, &l).unwrap()).unwrap();
        assert_eq!(kl.factor_components, [set(&[0, 1, 2])]);
        assert_eq!(kl.classes, [set(&[0]), set(&[1]), set(&[2])]);

        let g = c4();
        let kl = kl_decomposition(&g, &DistanceTable::new(&g, &l).unwrap()).unwrap();
        assert_eq!(kl.factor_components.len(), 1);
        assert_eq!(kl.classes, [set(&[0, 2]), set(&[1, 3])]);
        assert_eq!(kl.class_label(&g, 1), "v2");

        let g = Graft::from_labels(&["a", "b"], &[("a", "b")], &[]).unwrap();
        let kl = kl_decomposition(&g, &DistanceTable::new(&g, &l).unwrap()).unwrap();
        assert!(kl.allowed.edges.is_empty());
        assert_eq!(kl.factor_components, [set(&[0]), set(&[1])]);
        assert_eq!(kl.classes, [set(&[0]), set(&[1])]);
    }

    fn classes_for(g: &Graft, f: &[usize], root: usize, k: VertexSet) -> (DistanceComponent, KlDecomposition, ComponentClasses) {
        let l = Limits::default();
        let t = DistanceTable::new(g, &l).unwrap();
        let f = EdgeSet::from_ids(g.graph().edge_count(), f.iter().copied());
        let kl = kl_decomposition(g, &t).unwrap();
        let comp = noncap(g, &t, &f, root).unwrap().into_iter().find(|c| c.vertices == k).unwrap();
        let cc = component_classes(g, &kl, &comp).unwrap();
        (comp, kl, cc)
    }

    #[test]
    fn component_class_examples() {
        let g = p3();
        let (_, kl, cc) = classes_for(&g, &[0, 1], 0, set(&[1, 2]));
        assert_eq!((kl.classes[cc.root_class], kl.classes[cc.antiroot_class]), (set(&[1]), set(&[0])));
        assert_eq!(cc.root_fragment, set(&[1]));
        assert_eq!(cc.ak_family, [set(&[1])]);

        let (_, kl, cc) = classes_for(&g, &[0, 1], 1, set(&[2]));
        assert_eq!((kl.classes[cc.root_class], kl.classes[cc.antiroot_class]), (set(&[2]), set(&[1])));
        assert_eq!(cc.root_fragment, set(&[2]));

        let g = c4();
        let (_, kl, cc) = classes_for(&g, &[0, 2], 0, set(&[1]));
        assert_eq!(kl.classes[cc.root_class], set(&[1, 3]));
        assert_eq!(kl.classes[cc.antiroot_class], set(&[0, 2]));
        assert_eq!(cc.root_fragment, set(&[1]));
    }

    #[test]
    fn ak2part_examples() {
        let g = p3();
        let (k, kl, cc) = classes_for(&g, &[0, 1], 0, set(&[1, 2]));
        assert_eq!((k.ak, k.dk), (set(&[1]), set(&[2])));
        check_ak2part(&g, &kl, &k, &cc).unwrap();
        assert_eq!(attachments(&g, &kl, &cc, set(&[2])), [0]);

        let (k, kl, cc) = classes_for(&g, &[0, 1], 0, set(&[2]));
        assert!(k.dk.is_empty());
        check_ak2part(&g, &kl, &k, &cc).unwrap();

        let g = c4();
        let (k, kl, cc) = classes_for(&g, &[0, 2], 0, set(&[1]));
        assert_eq!(cc.ak_family, [set(&[1])]);
        check_ak2part(&g, &kl, &k, &cc).unwrap();
    }
}
