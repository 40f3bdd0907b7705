//! Executable statements about a bipartite graft and its minimum joins.
//!
//! Each check runs over every enumerated minimum join and every root where
//! that applies, and reports findings as data. A [`Violation`] embeds the
//! graft so it can be replayed with [`replay`].

use graft_core::{
    brute_force_min_join, check_ak2part, check_counts, check_neicomp2negset, check_primal_shift,
    component_classes, dist, dist_via_paths, enumerate_min_joins, is_conservative, is_extreme, is_k_congruent,
    is_primal, kl_decomposition, max_negative_set, min_join, raw_components, simple_cycles, stratify,
    universality_map, DistanceComponent, DistanceTable, EdgeSet, Enumeration, Graft, GraftError, KlDecomposition,
    Limits, VertexSet, WeightFn,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::json::{edge_labels, vertex_labels, GraftJson};
use crate::{LabError, Result};

/// Everything the checks share about one graft.
pub struct Context<'a> {
    pub graft: &'a Graft,
    pub limits: Limits,
    pub table: DistanceTable,
    /// Minimum joins in lexicographic order, at most the enumeration cap.
    pub joins: Vec<EdgeSet>,
    pub joins_truncated: bool,
    pub cycles: Vec<EdgeSet>,
    kl: std::result::Result<KlDecomposition, GraftError>,
    /// `components[j][r]`: distance components of root `r` under join `j`.
    components: Vec<Vec<Vec<DistanceComponent>>>,
}

impl<'a> Context<'a> {
    pub fn new(graft: &'a Graft, limits: Limits) -> std::result::Result<Self, GraftError> {
        if !graft.is_bipartite() {
            return Err(GraftError::NotBipartite);
        }
        let table = DistanceTable::new(graft, &limits)?;
        let enumeration = enumerate_min_joins(graft, limits.enumeration_cap, Enumeration::CircuitClosure, &limits)?;
        let cycles = simple_cycles(graft.graph(), limits.cycle_count)?;
        let kl = kl_decomposition(graft, &table);
        let components = enumeration
            .joins
            .iter()
            .map(|f| {
                graft
                    .graph()
                    .vertices()
                    .iter()
                    .map(|r| raw_components(graft, &table, f, r))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Context {
            graft,
            limits,
            table,
            joins: enumeration.joins,
            joins_truncated: enumeration.truncated,
            cycles,
            kl,
            components,
        })
    }

    pub fn kl(&self) -> std::result::Result<&KlDecomposition, GraftError> {
        self.kl.as_ref().map_err(Clone::clone)
    }

    pub fn components(&self, join: usize, root: usize) -> &[DistanceComponent] {
        &self.components[join][root]
    }

    fn decapital(&self, join: usize) -> impl Iterator<Item = (usize, &DistanceComponent)> {
        (0..self.graft.graph().vertex_count())
            .flat_map(move |r| self.components(join, r).iter().filter(|k| !k.capital).map(move |k| (r, k)))
    }

    fn n(&self) -> usize {
        self.graft.graph().vertex_count()
    }

    fn label(&self, v: usize) -> &str {
        self.graft.graph().label(v)
    }

    fn set(&self, s: VertexSet) -> Vec<String> {
        vertex_labels(self.graft, s)
    }

    fn join_param(&self, j: usize) -> Value {
        json!(edge_labels(self.graft, &self.joins[j]))
    }

    fn component_param(&self, j: usize, k: &DistanceComponent) -> Value {
        json!({
            "join": self.join_param(j),
            "root": self.label(k.root),
            "level": k.level,
            "component": self.set(k.vertices),
        })
    }
}

/// One failed instance of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub params: Value,
    pub detail: String,
}

type Findings = Vec<Finding>;
type CheckFn = fn(&Context, &mut Findings) -> std::result::Result<(), GraftError>;

pub struct Check {
    pub id: &'static str,
    pub statement: &'static str,
    run: CheckFn,
}

pub static CHECKS: &[Check] = &[
    Check {
        id: "join-oracle",
        statement: "the matching solver's ν equals the brute-force minimum and every enumerated join is a join of size ν",
        run: join_oracle,
    },
    Check {
        id: "conservative",
        statement: "every minimum join is conservative: no circuit has negative weight",
        run: conservative,
    },
    Check {
        id: "circuit-toggle",
        statement: "toggling a zero-weight circuit of a minimum join yields a minimum join",
        run: circuit_toggle,
    },
    Check {
        id: "allowed-edges",
        statement: "an edge lies in some minimum join iff its endpoints are at distance -1",
        run: allowed_edges_check,
    },
    Check {
        id: "distance-identity",
        statement: "ν(T Δ {x, y}) - ν(T) equals the minimum path weight under every minimum join",
        run: distance_identity,
    },
    Check {
        id: "adjacency",
        statement: "distances from any root differ by exactly one across every edge",
        run: adjacency,
    },
    Check {
        id: "distunit",
        statement: "vertices of one Kotzig-Lovász class have equal distances to every vertex",
        run: distunit,
    },
    Check {
        id: "spineroot",
        statement: "for a primal root r and r' at level 0, dist(r, x) <= dist(r', x) for all x",
        run: spineroot,
    },
    Check {
        id: "ak-extreme",
        statement: "the top level A(K) of every distance component is extreme",
        run: ak_extreme,
    },
    Check {
        id: "cut-law",
        statement: "no join edge leaves a capital component; exactly one leaves a decapital component",
        run: cut_law,
    },
    Check {
        id: "ear-nonneg",
        statement: "ears of a distance component weigh at least 0, and 0 only through the beam at the join root",
        run: ear_nonneg,
    },
    Check {
        id: "primal-shift",
        statement: "a decapital component with its induced graft is primal at its join root, with shifted distances",
        run: primal_shift,
    },
    Check {
        id: "counts",
        statement: "every root has ν decapital components and there are 2ν distinct ones over all roots",
        run: counts,
    },
    Check {
        id: "universality",
        statement: "oriented join edges correspond bijectively to decapital components over all roots",
        run: universality,
    },
    Check {
        id: "antiroot-anchoring",
        statement: "a decapital component is a component of the -1 lower set of its join antiroot",
        run: antiroot_anchoring,
    },
    Check {
        id: "congruence",
        statement: "a decapital component of r is decapital for every K-congruent r' outside it",
        run: congruence,
    },
    Check {
        id: "congruence-converse",
        statement: "a root r' outside K for which K is decapital is K-congruent",
        run: congruence_converse,
    },
    Check {
        id: "distance-translation",
        statement: "for K-congruent r', distances on K shift by a constant and neighbors of K sit one above the join root",
        run: distance_translation,
    },
    Check {
        id: "kl-equivalence",
        statement: "the Kotzig-Lovász relation is an equivalence whose classes lie in single factor-components",
        run: kl_equivalence,
    },
    Check {
        id: "shore-classes",
        statement: "allowed edges leaving a decapital component join one inner class to one distinct outer class",
        run: shore_classes,
    },
    Check {
        id: "ak-partition",
        statement: "the family of a decapital component partitions A(K) and splits the components of D(K)",
        run: ak_partition,
    },
    Check {
        id: "neighbor-negative-sets",
        statement: "each family member's neighbor components form its maximum negative set, partitioning D(K)",
        run: neighbor_negative_sets,
    },
    Check {
        id: "negset-lemmas",
        statement: "D(K)-components lie in the negative set of their own member, outside the others, and the outside stays nonnegative",
        run: negset_lemmas,
    },
    Check {
        id: "negset-invariance",
        statement: "maximum negative sets of classes and family members do not depend on the minimum join",
        run: negset_invariance,
    },
];

/// Check id under which failures to analyse a graft at all are reported.
pub const SETUP: &str = "setup";

/// Id of the check applied to a join supplied from outside.
pub const SUPPLIED_JOIN: &str = "supplied-join";

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}

pub fn find_check(id: &str) -> Result<&'static Check> {
    CHECKS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| LabError::UnknownCheck(id.to_string()))
}

impl Check {
    pub fn run(&self, ctx: &Context) -> Findings {
        let mut findings = Vec::new();
        if let Err(e) = (self.run)(ctx, &mut findings) {
            findings.push(Finding {
                params: Value::Null,
                detail: e.to_string(),
            });
        }
        findings
    }
}

/// A finding bound to its check and graft.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub graft: GraftJson,
    pub params: Value,
    pub detail: String,
}

/// Runs the given checks on one graft.
pub fn run_checks(graft: &Graft, checks: &[&Check], limits: &Limits) -> Vec<Violation> {
    let graft_json = || GraftJson::from_graft(graft);
    match Context::new(graft, *limits) {
        Ok(ctx) => checks
            .iter()
            .flat_map(|check| {
                check.run(&ctx).into_iter().map(|f| Violation {
                    check: check.id.to_string(),
                    graft: graft_json(),
                    params: f.params,
                    detail: f.detail,
                })
            })
            .collect(),
        Err(e) => vec![Violation {
            check: SETUP.to_string(),
            graft: graft_json(),
            params: Value::Null,
            detail: e.to_string(),
        }],
    }
}

/// Checks that a supplied edge set is a minimum join: a join, conservative,
/// and of size ν.
pub fn check_supplied_join(graft: &Graft, join: &EdgeSet, limits: &Limits) -> Vec<Violation> {
    let mut details = Vec::new();
    if !graft.is_join(join) {
        details.push("the edge set is not a join".to_string());
    } else {
        match is_conservative(graft, join, limits) {
            Ok(true) => {}
            Ok(false) => details.push("a circuit has negative weight, so the join is not minimum".to_string()),
            Err(e) => details.push(e.to_string()),
        }
        match min_join(graft, limits) {
            Ok(m) if m.nu != join.len() => details.push(format!("the join has {} edges but ν = {}", join.len(), m.nu)),
            Ok(_) => {}
            Err(e) => details.push(e.to_string()),
        }
    }
    details
        .into_iter()
        .map(|detail| Violation {
            check: SUPPLIED_JOIN.to_string(),
            graft: GraftJson::from_graft(graft),
            params: json!({ "join": edge_labels(graft, join) }),
            detail,
        })
        .collect()
}

/// Reruns the check of a violation on its embedded graft and reports whether
/// it fails again.
pub fn replay(violation: &Violation, limits: &Limits) -> Result<bool> {
    let graft = violation.graft.to_graft()?;
    let again = match violation.check.as_str() {
        SUPPLIED_JOIN => {
            let edges: Vec<(String, String)> = serde_json::from_value(violation.params["join"].clone())?;
            let list: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
            let join = crate::json::parse_edge_list(&graft, &list.join(","))?;
            check_supplied_join(&graft, &join, limits)
        }
        SETUP => run_checks(&graft, &[], limits),
        id => run_checks(&graft, &[find_check(id)?], limits),
    };
    Ok(!again.is_empty())
}

fn fail(out: &mut Findings, params: Value, detail: impl Into<String>) {
    out.push(Finding {
        params,
        detail: detail.into(),
    });
}

fn join_oracle(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let g = ctx.graft;
    let solved = min_join(g, &ctx.limits)?;
    if !g.is_join(&solved.join) || solved.nu != ctx.table.nu() {
        fail(out, Value::Null, format!("solver returned {} edges, ν = {}", solved.join.len(), ctx.table.nu()));
    }
    if g.graph().edge_count() <= ctx.limits.brute_force_edges {
        let brute = brute_force_min_join(g, &ctx.limits)?;
        if brute.nu != solved.nu {
            fail(out, Value::Null, format!("matching ν = {}, brute-force ν = {}", solved.nu, brute.nu));
        }
    }
    for (j, f) in ctx.joins.iter().enumerate() {
        if !g.is_join(f) || f.len() != solved.nu {
            fail(out, json!({ "join": ctx.join_param(j) }), "enumerated set is not a join of size ν");
        }
    }
    Ok(())
}

fn conservative(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        let w = WeightFn::new(f);
        for c in &ctx.cycles {
            if w.weight(c) < 0 {
                fail(
                    out,
                    json!({ "join": ctx.join_param(j), "circuit": edge_labels(ctx.graft, c) }),
                    format!("circuit weight {}", w.weight(c)),
                );
            }
        }
    }
    Ok(())
}

fn circuit_toggle(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        let w = WeightFn::new(f);
        for c in ctx.cycles.iter().filter(|c| w.weight(c) == 0) {
            let toggled = f.symmetric_difference(c);
            let known = ctx.joins_truncated || ctx.joins.binary_search(&toggled).is_ok();
            if !ctx.graft.is_join(&toggled) || toggled.len() != f.len() || !known {
                fail(
                    out,
                    json!({ "join": ctx.join_param(j), "circuit": edge_labels(ctx.graft, c) }),
                    "toggled edge set is not a minimum join",
                );
            }
        }
    }
    Ok(())
}

fn allowed_edges_check(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    let graph = ctx.graft.graph();
    if !ctx.joins_truncated {
        let union = ctx
            .joins
            .iter()
            .fold(EdgeSet::new(graph.edge_count()), |acc, f| acc.union(f));
        if union != kl.allowed.edges {
            fail(
                out,
                json!({ "in_some_join": edge_labels(ctx.graft, &union), "at_distance_minus_one": edge_labels(ctx.graft, &kl.allowed.edges) }),
                "allowed edges by distance differ from the union of minimum joins",
            );
        }
    }
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let d = ctx.table.dist(u, v);
        if d != if kl.allowed.contains(e) { -1 } else { 1 } {
            fail(out, json!({ "edge": [ctx.label(u), ctx.label(v)] }), format!("edge at distance {d}"));
        }
    }
    Ok(())
}

fn distance_identity(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let g = ctx.graft;
    let pairs: Vec<(usize, usize)> = (0..ctx.n())
        .flat_map(|x| (x..ctx.n()).map(move |y| (x, y)))
        .filter(|&(x, y)| ctx.table.get(x, y).is_some())
        .collect();
    for &(x, y) in &pairs {
        let literal = dist(g, x, y, &ctx.limits)?;
        if literal != ctx.table.dist(x, y) || ctx.table.dist(y, x) != ctx.table.dist(x, y) {
            fail(
                out,
                json!({ "x": ctx.label(x), "y": ctx.label(y) }),
                format!("table {} vs ν difference {literal}", ctx.table.dist(x, y)),
            );
        }
    }
    for (j, f) in ctx.joins.iter().enumerate() {
        for &(x, y) in &pairs {
            let paths = dist_via_paths(g, f, x, y, &ctx.limits)?;
            if paths != ctx.table.dist(x, y) {
                fail(
                    out,
                    json!({ "join": ctx.join_param(j), "x": ctx.label(x), "y": ctx.label(y) }),
                    format!("ν difference {} vs minimum path weight {paths}", ctx.table.dist(x, y)),
                );
            }
        }
    }
    Ok(())
}

fn adjacency(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for r in 0..ctx.n() {
        for &(u, v) in ctx.graft.graph().edges() {
            if let (Some(du), Some(dv)) = (ctx.table.get(r, u), ctx.table.get(r, v)) {
                if (du - dv).abs() != 1 {
                    fail(
                        out,
                        json!({ "root": ctx.label(r), "edge": [ctx.label(u), ctx.label(v)] }),
                        format!("distances {du} and {dv}"),
                    );
                }
            }
        }
    }
    Ok(())
}

fn distunit(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    for class in &kl.classes {
        let first = class.first().expect("classes are nonempty");
        for x in class.iter().skip(1) {
            for y in 0..ctx.n() {
                if ctx.table.get(x, y) != ctx.table.get(first, y) {
                    fail(
                        out,
                        json!({ "class": ctx.set(*class), "x1": ctx.label(first), "x2": ctx.label(x), "y": ctx.label(y) }),
                        format!("distances {:?} and {:?}", ctx.table.get(first, y), ctx.table.get(x, y)),
                    );
                }
            }
        }
    }
    Ok(())
}

fn spineroot(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for r in 0..ctx.n() {
        if !is_primal(ctx.graft, &ctx.table, r) {
            continue;
        }
        let strat = stratify(ctx.graft, &ctx.table, r);
        for r2 in strat.level(0) {
            for x in ctx.graft.component_of(r) {
                if ctx.table.dist(r, x) > ctx.table.dist(r2, x) {
                    fail(
                        out,
                        json!({ "root": ctx.label(r), "other_root": ctx.label(r2), "x": ctx.label(x) }),
                        format!("dist(r, x) = {} > dist(r', x) = {}", ctx.table.dist(r, x), ctx.table.dist(r2, x)),
                    );
                }
            }
        }
    }
    Ok(())
}

fn ak_extreme(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for r in 0..ctx.n() {
        for k in ctx.components(0, r) {
            if !is_extreme(ctx.graft, &ctx.table, k.ak)? {
                fail(out, ctx.component_param(0, k), "A(K) contains a pair at negative distance");
            }
        }
    }
    Ok(())
}

fn cut_law(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for j in 0..ctx.joins.len() {
        for r in 0..ctx.n() {
            for k in ctx.components(j, r).iter().filter(|k| !k.satisfies_cut_law()) {
                fail(
                    out,
                    ctx.component_param(j, k),
                    format!(
                        "{} component with {} join edges in its cut",
                        if k.capital { "capital" } else { "decapital" },
                        k.join_cut.len()
                    ),
                );
            }
        }
    }
    Ok(())
}

/// Receives the vertices, edges and weight of a path.
type PathVisitor<'a> = dyn FnMut(&[usize], &[usize], i64) + 'a;

/// Paths with both ends in `k`, at least one inner vertex, and inner
/// vertices outside `k`; calls `visit` once per unordered path.
fn for_each_ear(ctx: &Context, f: &EdgeSet, k: VertexSet, mut visit: impl FnMut(&[usize], &[usize], i64)) {
    let graph = ctx.graft.graph();
    let w = WeightFn::new(f);
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    fn go(
        graph: &graft_core::Graph,
        w: &WeightFn,
        k: VertexSet,
        vertices: &mut Vec<usize>,
        edges: &mut Vec<usize>,
        weight: i64,
        visit: &mut PathVisitor,
    ) {
        let v = *vertices.last().expect("path is nonempty");
        for &(u, e) in graph.incident(v) {
            if vertices.contains(&u) {
                continue;
            }
            let total = weight + w.edge(e) as i64;
            vertices.push(u);
            edges.push(e);
            if k.contains(u) {
                if vertices.len() > 2 && u > vertices[0] {
                    visit(vertices, edges, total);
                }
            } else {
                go(graph, w, k, vertices, edges, total, visit);
            }
            vertices.pop();
            edges.pop();
        }
    }
    for x in k {
        vertices.push(x);
        go(graph, &w, k, &mut vertices, &mut edges, 0, &mut visit);
        vertices.pop();
    }
}

fn ear_nonneg(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        for r in 0..ctx.n() {
            for k in ctx.components(j, r) {
                for_each_ear(ctx, f, k.vertices, |path, edges, weight| {
                    let tight_ok = k.beam.is_some_and(|b| {
                        (path[0] == b.root || path[path.len() - 1] == b.root) && edges.contains(&b.edge)
                    });
                    if weight < 0 || (weight == 0 && !tight_ok) {
                        let mut params = ctx.component_param(j, k);
                        params["path"] = json!(path.iter().map(|&v| ctx.label(v)).collect::<Vec<_>>());
                        fail(out, params, format!("ear of weight {weight}"));
                    }
                });
            }
        }
    }
    Ok(())
}

fn primal_shift(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        for (_, k) in ctx.decapital(j) {
            if k.beam.is_none() {
                continue;
            }
            if let Err(e) = check_primal_shift(ctx.graft, &ctx.table, f, k, &ctx.limits) {
                fail(out, ctx.component_param(j, k), e.to_string());
            }
        }
    }
    Ok(())
}

fn counts(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        match check_counts(ctx.graft, &ctx.table, f) {
            Ok(report) => {
                let bad = report.per_root.iter().find(|&&(_, c)| c != report.nu);
                if bad.is_some() || report.union != 2 * report.nu {
                    fail(
                        out,
                        json!({ "join": ctx.join_param(j) }),
                        format!("per-root counts {:?}, union {}, ν {}", report.per_root, report.union, report.nu),
                    );
                }
            }
            Err(e) => fail(out, json!({ "join": ctx.join_param(j) }), e.to_string()),
        }
    }
    Ok(())
}

fn universality(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for (j, f) in ctx.joins.iter().enumerate() {
        match universality_map(ctx.graft, &ctx.table, f) {
            Ok(map) if map.pairs.len() != 2 * f.len() => fail(
                out,
                json!({ "join": ctx.join_param(j) }),
                format!("{} oriented pairs for {} join edges", map.pairs.len(), f.len()),
            ),
            Ok(_) => {}
            Err(e) => fail(out, json!({ "join": ctx.join_param(j) }), e.to_string()),
        }
    }
    Ok(())
}

fn antiroot_anchoring(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for j in 0..ctx.joins.len() {
        for (_, k) in ctx.decapital(j) {
            let Some(beam) = k.beam else { continue };
            let anchored = ctx
                .components(j, beam.antiroot)
                .iter()
                .any(|c| c.level == -1 && c.vertices == k.vertices);
            if !anchored {
                fail(
                    out,
                    ctx.component_param(j, k),
                    format!("not a component of the -1 lower set of `{}`", ctx.label(beam.antiroot)),
                );
            }
        }
    }
    Ok(())
}

fn noncap_sets(ctx: &Context, j: usize, r: usize) -> Vec<VertexSet> {
    ctx.components(j, r).iter().filter(|k| !k.capital).map(|k| k.vertices).collect()
}

fn congruence(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for j in 0..ctx.joins.len() {
        for (_, k) in ctx.decapital(j) {
            if k.beam.is_none() {
                continue;
            }
            for r2 in ctx.graft.component_of(k.root).difference(k.vertices) {
                if is_k_congruent(ctx.graft, &ctx.table, r2, k)? && !noncap_sets(ctx, j, r2).contains(&k.vertices) {
                    let mut params = ctx.component_param(j, k);
                    params["other_root"] = json!(ctx.label(r2));
                    fail(out, params, "K-congruent root for which K is not decapital");
                }
            }
        }
    }
    Ok(())
}

fn congruence_converse(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    for j in 0..ctx.joins.len() {
        for (_, k) in ctx.decapital(j) {
            if k.beam.is_none() {
                continue;
            }
            for r2 in ctx.graft.component_of(k.root).difference(k.vertices) {
                if noncap_sets(ctx, j, r2).contains(&k.vertices) && !is_k_congruent(ctx.graft, &ctx.table, r2, k)? {
                    let mut params = ctx.component_param(j, k);
                    params["other_root"] = json!(ctx.label(r2));
                    fail(out, params, "K is decapital for a root that is not K-congruent");
                }
            }
        }
    }
    Ok(())
}

fn distance_translation(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let t = &ctx.table;
    let graph = ctx.graft.graph();
    for j in 0..ctx.joins.len() {
        for (r, k) in ctx.decapital(j) {
            let Some(beam) = k.beam else { continue };
            for r2 in ctx.graft.component_of(r).difference(k.vertices) {
                if !is_k_congruent(ctx.graft, t, r2, k)? {
                    continue;
                }
                let d = t.dist(r2, beam.root) - t.dist(r, beam.root);
                let mut params = ctx.component_param(j, k);
                params["other_root"] = json!(ctx.label(r2));
                if let Some(x) = k.vertices.iter().find(|&x| t.dist(r2, x) != t.dist(r, x) + d) {
                    params["x"] = json!(ctx.label(x));
                    fail(out, params, format!("shift at x differs from d = {d}"));
                    continue;
                }
                let outside = graph.neighborhood(k.vertices).difference(k.vertices);
                if let Some(x) = outside.iter().find(|&x| t.dist(r2, x) != t.dist(r2, beam.root) + 1) {
                    params["x"] = json!(ctx.label(x));
                    fail(out, params, "neighbor of K not one above the join root");
                }
            }
        }
    }
    Ok(())
}

fn kl_equivalence(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    let covered = kl.classes.iter().fold(VertexSet::EMPTY, |acc, c| acc.union(*c));
    let total: usize = kl.classes.iter().map(|c| c.len()).sum();
    if covered != ctx.graft.graph().vertices() || total != ctx.n() {
        fail(out, Value::Null, "classes do not partition the vertex set");
    }
    for (c, class) in kl.classes.iter().enumerate() {
        if !class.is_subset(kl.factor_components[kl.factor_of_class(c)]) {
            fail(out, json!({ "class": ctx.set(*class) }), "class leaves its factor-component");
        }
    }
    for u in 0..ctx.n() {
        for v in 0..ctx.n() {
            let related = u == v
                || (kl.factor_component_of(u) == kl.factor_component_of(v) && ctx.table.get(u, v) == Some(0));
            if related != (kl.class_of(u) == kl.class_of(v)) {
                fail(out, json!({ "u": ctx.label(u), "v": ctx.label(v) }), "classes disagree with the relation");
            }
        }
    }
    Ok(())
}

fn shore_classes(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    let graph = ctx.graft.graph();
    for (_, k) in ctx.decapital(0) {
        let factors: Vec<usize> = graph
            .cut(k.vertices)
            .filter(|&e| kl.allowed.contains(e))
            .map(|e| kl.factor_component_of(graph.endpoints(e).0))
            .collect();
        if factors.windows(2).any(|w| w[0] != w[1]) {
            fail(out, ctx.component_param(0, k), "allowed cut edges span several factor-components");
        }
        if let Err(e) = component_classes(ctx.graft, kl, k) {
            fail(out, ctx.component_param(0, k), e.to_string());
        }
    }
    Ok(())
}

fn ak_partition(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    for (_, k) in ctx.decapital(0) {
        let result = component_classes(ctx.graft, kl, k).and_then(|cc| check_ak2part(ctx.graft, kl, k, &cc));
        if let Err(e) = result {
            fail(out, ctx.component_param(0, k), e.to_string());
        }
    }
    Ok(())
}

fn neighbor_negative_sets(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    for (j, f) in ctx.joins.iter().enumerate() {
        for (_, k) in ctx.decapital(j) {
            let result = component_classes(ctx.graft, kl, k)
                .and_then(|cc| check_neicomp2negset(ctx.graft, f, kl, k, &cc, &ctx.limits));
            if let Err(e) = result {
                fail(out, ctx.component_param(j, k), e.to_string());
            }
        }
    }
    Ok(())
}

fn negset_lemmas(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    let kl = ctx.kl()?;
    let g = ctx.graft;
    let graph = g.graph();
    let l = &ctx.limits;
    for (j, f) in ctx.joins.iter().enumerate() {
        for (r, k) in ctx.decapital(j) {
            let cc = match component_classes(g, kl, k) {
                Ok(cc) => cc,
                Err(e) => {
                    fail(out, ctx.component_param(j, k), e.to_string());
                    continue;
                }
            };
            let t_k = kl.classes[cc.antiroot_class];
            let plain: Vec<VertexSet> = cc
                .ak_family
                .iter()
                .map(|&s| max_negative_set(g, f, s, VertexSet::EMPTY, l).map(|r| r.set))
                .collect::<std::result::Result<_, _>>()?;
            let avoiding: Vec<VertexSet> = cc
                .ak_family
                .iter()
                .map(|&s| max_negative_set(g, f, s, t_k, l).map(|r| r.set))
                .collect::<std::result::Result<_, _>>()?;
            let param = |extra: Value| {
                let mut p = ctx.component_param(j, k);
                p["detail"] = extra;
                p
            };
            for &lv in &k.dk_components {
                let Some(lc) = ctx.components(j, r).iter().find(|c| c.level == k.level - 1 && c.vertices == lv) else {
                    fail(out, param(json!(ctx.set(lv))), "D(K)-component is not a distance component");
                    continue;
                };
                let t_l = match component_classes(g, kl, lc) {
                    Ok(c) => kl.classes[c.antiroot_class].intersection(k.ak),
                    Err(e) => {
                        fail(out, param(json!(ctx.set(lv))), e.to_string());
                        continue;
                    }
                };
                let Some(own) = cc.ak_family.iter().position(|&s| s == t_l) else {
                    fail(out, param(json!(ctx.set(lv))), "antiroot class of L within A(K) is not a family member");
                    continue;
                };
                if !lv.is_subset(avoiding[own]) {
                    fail(out, param(json!(ctx.set(lv))), "L is not inside the negative set of its own member");
                }
                for (i, p) in plain.iter().enumerate() {
                    if i != own && !lv.is_disjoint(*p) {
                        fail(out, param(json!(ctx.set(lv))), "L meets the negative set of another member");
                    }
                }
            }
            let outside = graph.vertices().difference(k.vertices);
            for (i, &s) in cc.ak_family.iter().enumerate() {
                let excluded = if i == 0 { t_k } else { VertexSet::EMPTY };
                for x in graph.neighborhood(s).difference(k.vertices).difference(excluded) {
                    if let Some(v) = s.iter().find(|&v| ctx.table.dist(v, x) != 1) {
                        fail(
                            out,
                            param(json!([ctx.label(v), ctx.label(x)])),
                            "neighbor of a family member outside K is not at distance 1",
                        );
                    }
                }
                let negative = if i == 0 { avoiding[0] } else { plain[i] };
                if !negative.is_disjoint(outside) {
                    fail(out, param(json!(ctx.set(s))), "negative set of a family member leaves K");
                }
            }
        }
    }
    Ok(())
}

fn negset_invariance(ctx: &Context, out: &mut Findings) -> std::result::Result<(), GraftError> {
    if ctx.joins.len() < 2 {
        return Ok(());
    }
    let kl = ctx.kl()?;
    let g = ctx.graft;
    // Arbitrary bases are not covered: on C4 with every vertex a terminal,
    // the base {a} has different maximum negative sets under the two joins.
    let mut queries: Vec<(VertexSet, VertexSet)> = kl.classes.iter().map(|&c| (c, VertexSet::EMPTY)).collect();
    for (_, k) in ctx.decapital(0) {
        if let Ok(cc) = component_classes(g, kl, k) {
            let t_k = kl.classes[cc.antiroot_class];
            // A root fragment need not be a class; only its negative set
            // avoiding the antiroot class is determined by the graft.
            queries.push((cc.root_fragment, t_k));
            queries.extend(cc.non_fragment().iter().flat_map(|&s| [(s, VertexSet::EMPTY), (s, t_k)]));
        }
    }
    queries.sort();
    queries.dedup();
    for (s, y) in queries {
        let first = max_negative_set(g, &ctx.joins[0], s, y, &ctx.limits)?.set;
        for j in 1..ctx.joins.len() {
            let other = max_negative_set(g, &ctx.joins[j], s, y, &ctx.limits)?.set;
            if other != first {
                fail(
                    out,
                    json!({ "base": ctx.set(s), "avoid": ctx.set(y), "join": ctx.join_param(j), "first_join": ctx.join_param(0) }),
                    format!("negative sets {:?} and {:?} differ", ctx.set(first), ctx.set(other)),
                );
            }
        }
    }
    Ok(())
}
