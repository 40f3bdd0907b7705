//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use graft_core::{
    component_classes, enumerate_min_joins, kl_decomposition, max_negative_set, min_join, noncap, DistanceTable,
    EdgeSet, Enumeration, Graft, Limits, VertexSet,
};
use graft_lab::generate::{generate, CorpusSpec};
use graft_lab::json::parse_graft;
use graft_lab::suite::{run_suite, select_checks, SuiteReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Minimum join size by scanning every edge subset.
fn oracle_nu(g: &Graft) -> usize {
    let graph = g.graph();
    let m = graph.edge_count();
    let masks: Vec<u64> = (0..m)
        .map(|e| {
            let (u, v) = graph.endpoints(e);
            (1u64 << u) | (1u64 << v)
        })
        .collect();
    let target = g.terminals().bits();
    (0u64..1 << m)
        .filter(|&sel| {
            let odd = (0..m).filter(|&e| sel >> e & 1 == 1).fold(0u64, |acc, e| acc ^ masks[e]);
            odd == target
        })
        .map(|sel| sel.count_ones() as usize)
        .min()
        .expect("an even terminal set on a connected graph has a join")
}

/// Whether `x` reaches `base` by a simple negative path whose vertices other
/// than the last lie in `inside`.
fn oracle_negative_path(g: &Graft, f: &EdgeSet, x: usize, inside: VertexSet, base: VertexSet) -> bool {
    fn go(g: &Graft, f: &EdgeSet, v: usize, seen: VertexSet, w: i64, inside: VertexSet, base: VertexSet) -> bool {
        g.graph().neighbors(v).iter().any(|u| {
            let e = g.graph().edge_between(u, v).unwrap();
            let w = w + if f.contains(e) { -1 } else { 1 };
            if base.contains(u) {
                w < 0
            } else {
                inside.contains(u) && !seen.contains(u) && go(g, f, u, seen.union(VertexSet::singleton(u)), w, inside, base)
            }
        })
    }
    go(g, f, x, VertexSet::singleton(x), 0, inside, base)
}

/// Union of all subsets of `V \ (S ∪ Y)` that are negative for `S`.
fn oracle_max_negative(g: &Graft, f: &EdgeSet, s: VertexSet, y: VertexSet) -> VertexSet {
    let pool: Vec<usize> = g.graph().vertices().difference(s).difference(y).iter().collect();
    let mut union = VertexSet::EMPTY;
    for mask in 0u64..1 << pool.len() {
        let x: VertexSet = (0..pool.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
        if x.difference(union).is_empty() {
            continue;
        }
        if x.iter().all(|v| oracle_negative_path(g, f, v, x, s)) {
            union = union.union(x);
        }
    }
    union
}

fn suite_criterion(report: &SuiteReport, ids: &[&str]) -> Outcome {
    let mut parts = Vec::new();
    let mut failed = false;
    for id in ids {
        let c = report.check(id).ok_or_else(|| format!("check {id} missing from the report"))?;
        failed |= c.violation_count > 0;
        parts.push(format!("{id}: {} violations", c.violation_count));
        if let Some(v) = c.violations.first() {
            parts.push(format!("first: {} on {}", v.detail, serde_json::to_string(&v.graft).unwrap()));
        }
    }
    let setup = report.check("setup").map_or(0, |c| c.violation_count);
    parts.push(format!("{} grafts, {setup} unanalysable", report.grafts));
    let line = parts.join("; ");
    if failed || setup > 0 {
        Err(line)
    } else {
        Ok(line)
    }
}

fn nu_oracle() -> Outcome {
    let start = Instant::now();
    let corpus = generate(&CorpusSpec::exhaustive(6)).map_err(|e| e.to_string())?;
    let limits = Limits::default();
    let mut count = 0;
    let mut mismatches = Vec::new();
    for g in corpus.grafts() {
        count += 1;
        let nu = min_join(&g, &limits).map_err(|e| e.to_string())?.nu;
        let expected = oracle_nu(&g);
        if nu != expected && mismatches.len() < 3 {
            mismatches.push(format!("{} (solver {nu}, oracle {expected})", graft_lab::json::graft_to_string(&g)));
        }
    }
    let elapsed = start.elapsed();
    let line = format!("{count} grafts, {} mismatches, {:.1}s single-threaded", mismatches.len(), elapsed.as_secs_f64());
    if mismatches.is_empty() && elapsed < Duration::from_secs(600) {
        Ok(line)
    } else {
        Err(format!("{line}; {}", mismatches.join(", ")))
    }
}

fn counting(report: &SuiteReport) -> Outcome {
    let suite = suite_criterion(report, &["counts"])?;
    let g = parse_graft(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]],"terminals":["a","c"]}"#).unwrap();
    let l = Limits::default();
    let table = DistanceTable::new(&g, &l).unwrap();
    let f = min_join(&g, &l).unwrap().join;
    let per_root: Vec<usize> = (0..3).map(|r| noncap(&g, &table, &f, r).unwrap().len()).collect();
    let union = graft_core::all_noncap(&g, &table, &f).unwrap().len();
    if per_root != [2, 2, 2] || union != 4 {
        return Err(format!("P3 per-root {per_root:?}, union {union}"));
    }
    Ok(format!("{suite}; P3 per-root {per_root:?}, union {union}"))
}

/// How often the structure theorems had something to say.
fn structure_coverage() -> String {
    let l = Limits::default();
    let corpus = generate(&CorpusSpec::exhaustive(6)).unwrap();
    let (mut decapital, mut with_dk, mut multi_family) = (0usize, 0usize, 0usize);
    for g in corpus.grafts() {
        let table = DistanceTable::new(&g, &l).unwrap();
        let kl = kl_decomposition(&g, &table).unwrap();
        let f = min_join(&g, &l).unwrap().join;
        for r in g.graph().vertices() {
            for k in noncap(&g, &table, &f, r).unwrap() {
                decapital += 1;
                with_dk += usize::from(!k.dk.is_empty());
                let cc = component_classes(&g, &kl, &k).unwrap();
                multi_family += usize::from(cc.ak_family.len() > 1);
            }
        }
    }
    format!("{decapital} decapital instances, {with_dk} with nonempty D(K), {multi_family} with several family members")
}

fn structure(report: &SuiteReport) -> Outcome {
    let suite = suite_criterion(
        report,
        &["shore-classes", "ak-partition", "neighbor-negative-sets", "negset-lemmas"],
    )?;
    Ok(format!("{suite}; {}", structure_coverage()))
}

fn negative_sets(report: &SuiteReport) -> Outcome {
    let l = Limits::default();
    let spec = CorpusSpec::random(250, 20240601, 10);
    let corpus = generate(&spec).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut grafts, mut oracle_queries, mut invariance_queries, mut multi_join) = (0, 0, 0, 0);
    for g in corpus.grafts() {
        grafts += 1;
        let n = g.graph().vertex_count();
        let joins = enumerate_min_joins(&g, l.enumeration_cap, Enumeration::CircuitClosure, &l)
            .map_err(|e| e.to_string())?
            .joins;
        multi_join += usize::from(joins.len() > 1);
        let table = DistanceTable::new(&g, &l).map_err(|e| e.to_string())?;
        let kl = kl_decomposition(&g, &table).map_err(|e| e.to_string())?;

        // Peeling against the definition, on random bases and avoided sets.
        let all = g.graph().vertices();
        for _ in 0..3 {
            let s = VertexSet::from_bits(rng.random::<u64>()).intersection(all);
            let y = VertexSet::from_bits(rng.random::<u64>() & rng.random::<u64>()).intersection(all).difference(s);
            let f = &joins[rng.random_range(0..joins.len())];
            let peeled = max_negative_set(&g, f, s, y, &l).map_err(|e| e.to_string())?;
            let expected = oracle_max_negative(&g, f, s, y);
            oracle_queries += 1;
            if peeled.set != expected {
                return Err(format!(
                    "peeling gave {:?}, definition {:?} on {} with S={s:?}, Y={y:?}",
                    peeled.set,
                    expected,
                    graft_lab::json::graft_to_string(&g)
                ));
            }
        }

        // Invariance over every minimum join for classes and family members.
        let mut bases: Vec<(VertexSet, VertexSet)> = kl.classes.iter().map(|&c| (c, VertexSet::EMPTY)).collect();
        for r in 0..n {
            for k in noncap(&g, &table, &joins[0], r).map_err(|e| e.to_string())? {
                let cc = component_classes(&g, &kl, &k).map_err(|e| e.to_string())?;
                let t_k = kl.classes[cc.antiroot_class];
                bases.push((cc.root_fragment, t_k));
                for &s in cc.non_fragment() {
                    bases.push((s, VertexSet::EMPTY));
                    bases.push((s, t_k));
                }
            }
        }
        bases.sort();
        bases.dedup();
        for (s, y) in bases {
            let sets: Vec<VertexSet> = joins
                .iter()
                .map(|f| max_negative_set(&g, f, s, y, &l).map(|r| r.set))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            invariance_queries += 1;
            let expected = oracle_max_negative(&g, &joins[0], s, y);
            if sets.iter().any(|&x| x != expected) {
                return Err(format!(
                    "negative sets {sets:?} (definition {expected:?}) vary across joins on {} with S={s:?}, Y={y:?}",
                    graft_lab::json::graft_to_string(&g)
                ));
            }
        }
    }
    let suite = suite_criterion(report, &["negset-invariance"])?;
    Ok(format!(
        "{grafts} random grafts (|V| <= 10, seed {}): {oracle_queries} peeling/definition comparisons, \
         {invariance_queries} join-invariance queries over classes and family members ({multi_join} grafts with several minimum joins), 0 differences; {suite}",
        spec.seed
    ))
}

fn performance(report: &SuiteReport) -> Outcome {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_graft-lab"))
        .args(["verify", "--exhaustive-n", "5", "--seed", "42", "--checks", "all"])
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let n5 = start.elapsed();
    let line = format!(
        "verify --exhaustive-n 5: {:.1}s (exit {:?}); exhaustive-n 6 suite: {:.1}s",
        n5.as_secs_f64(),
        status.code(),
        report.elapsed_seconds
    );
    if status.success() && n5 < Duration::from_secs(60) && report.elapsed_seconds < 600.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() {
    let mut rows: Vec<(&str, &str, Outcome)> = Vec::new();
    let mut run = |id: &'static str, name: &'static str, f: &dyn Fn() -> Outcome| {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        println!(
            "criterion {id:>2} {name}: {} ({})",
            if outcome.is_ok() { "PASS" } else { "FAIL" },
            match &outcome {
                Ok(s) | Err(s) => s,
            }
        );
        rows.push((id, name, outcome));
    };

    run("1", "minimum join size matches brute force", &nu_oracle);

    let report = run_suite(
        &CorpusSpec::exhaustive(6),
        &select_checks("all").unwrap(),
        &Limits::default(),
    )
    .expect("exhaustive corpus runs");

    run("2", "distance identity", &|| suite_criterion(&report, &["distance-identity"]));
    run("3", "cut law", &|| suite_criterion(&report, &["cut-law"]));
    run("4", "counting", &|| counting(&report));
    run("5", "universality bijection", &|| {
        suite_criterion(&report, &["universality", "antiroot-anchoring"])
    });
    run("6", "congruence transfer and its converse", &|| {
        suite_criterion(&report, &["congruence", "congruence-converse", "distance-translation"])
    });
    run("7", "structure theorems for decapital components", &|| structure(&report));
    run("8", "negative sets: definition and join invariance", &|| negative_sets(&report));
    run("9", "class constancy", &|| suite_criterion(&report, &["distunit"]));
    run("10", "suite performance", &|| performance(&report));

    let failed = rows.iter().filter(|r| r.2.is_err()).count();
    println!("{} criteria, {failed} failed", rows.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
