use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use graft_core::{
    brute_force_min_join, canonical_min_join, components, enumerate_min_joins, kl_decomposition, max_negative_set,
    stratify, DistanceComponent, DistanceTable, EdgeSet, Enumeration, Graft, Limits, VertexSet,
};
use graft_lab::checks::{check_supplied_join, run_checks};
use graft_lab::dot::export_dot;
use graft_lab::generate::{generate, CorpusSpec, GraphClass, Mode};
use graft_lab::json::{edge_labels, graft_to_string, parse_edge_list, parse_vertex_list, read_graft, vertex, vertex_labels};
use graft_lab::suite::{run_suite, select_checks, SuiteReport};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "graft-lab", version, about = "Minimum joins, distance components and Kotzig-Lovász decompositions of grafts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum join size and a minimum join (or all of them).
    SolveJoin {
        #[arg(long)]
        input: PathBuf,
        /// List every minimum join, up to --cap.
        #[arg(long)]
        enumerate: bool,
        /// Use brute force over edge subsets instead of the matching solver.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 200)]
        cap: usize,
    },
    /// Distances from a root, grouped into levels, plus the full table.
    Distances {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        root: String,
    },
    /// Distance components for one root or for every root.
    Components {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, required_unless_present = "all_roots")]
        root: Option<String>,
        #[arg(long)]
        all_roots: bool,
        /// Minimum join to use, as `u-v,x-y`; the lexicographically first by default.
        #[arg(long)]
        join: Option<String>,
    },
    /// Allowed edges, factor-components and Kotzig-Lovász classes.
    Kl {
        #[arg(long)]
        input: PathBuf,
    },
    /// Maximum negative set for a base set, optionally avoiding another.
    Negset {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated vertex labels.
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "")]
        avoid: String,
        #[arg(long)]
        join: Option<String>,
    },
    /// Run the theorem checks on a corpus or a single graft.
    Verify {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// `all` or a comma-separated list of check ids.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check a single graft instead of a corpus.
        #[arg(long, conflicts_with_all = ["exhaustive_n", "random"])]
        input: Option<PathBuf>,
        /// With --input: also check that this edge set is a minimum join.
        #[arg(long, requires = "input")]
        join: Option<String>,
    },
    /// Print a corpus as JSON lines.
    Gen {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Graphviz rendering of a graft.
    ExportDot {
        #[arg(long)]
        input: PathBuf,
        /// Draw the distance components of this root as nested clusters.
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        join: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CorpusArgs {
    /// Every connected bipartite graft with at most this many vertices.
    #[arg(long, conflicts_with = "random")]
    exhaustive_n: Option<usize>,
    /// This many random grafts.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_vertices: usize,
    /// Vertex bound for random grafts.
    #[arg(long, default_value_t = 10)]
    max_vertices: usize,
    #[arg(long)]
    max_edges: Option<usize>,
    /// Comma-separated: trees, even_cycles, grids, general_bipartite.
    #[arg(long)]
    classes: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    edge_probability: f64,
}

impl CorpusArgs {
    fn spec(&self) -> Result<CorpusSpec> {
        let mut spec = match (self.exhaustive_n, self.random) {
            (Some(n), None) => CorpusSpec::exhaustive(n),
            (None, Some(count)) => CorpusSpec {
                min_vertices: self.min_vertices,
                ..CorpusSpec::random(count, self.seed, self.max_vertices)
            },
            _ => bail!("give exactly one of --exhaustive-n and --random"),
        };
        if spec.mode == Mode::Exhaustive {
            spec.min_vertices = self.min_vertices;
        }
        spec.seed = self.seed;
        spec.max_edges = self.max_edges;
        spec.edge_probability = self.edge_probability;
        if let Some(list) = &self.classes {
            spec.classes = list
                .split(',')
                .map(|s| s.trim().parse::<GraphClass>())
                .collect::<Result<_, _>>()?;
        }
        Ok(spec)
    }
}

fn load(path: &Path) -> Result<Graft> {
    read_graft(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(value: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// The supplied join after checking it is minimum, or the canonical one.
fn pick_join(graft: &Graft, join: Option<&str>, limits: &Limits) -> Result<EdgeSet> {
    match join {
        None => Ok(canonical_min_join(graft, limits)?.join),
        Some(list) => {
            let edges = parse_edge_list(graft, list)?;
            if let Some(v) = check_supplied_join(graft, &edges, limits).first() {
                bail!("--join is not a minimum join: {}", v.detail);
            }
            Ok(edges)
        }
    }
}

fn component_json(graft: &Graft, k: &DistanceComponent) -> Value {
    let g = graft.graph();
    json!({
        "level": k.level,
        "vertices": vertex_labels(graft, k.vertices),
        "capital": k.capital,
        "beam": k.beam.map(|b| json!({
            "edge": [g.label(g.endpoints(b.edge).0), g.label(g.endpoints(b.edge).1)],
            "root": g.label(b.root),
            "antiroot": g.label(b.antiroot),
        })),
        "ak": vertex_labels(graft, k.ak),
        "dk": vertex_labels(graft, k.dk),
        "dk_components": k.dk_components.iter().map(|&s| vertex_labels(graft, s)).collect::<Vec<_>>(),
    })
}

fn solve_join(input: &Path, enumerate: bool, oracle: bool, cap: usize, limits: &Limits) -> Result<Value> {
    let graft = load(input)?;
    if enumerate {
        let method = if oracle { Enumeration::SubsetScan } else { Enumeration::CircuitClosure };
        let e = enumerate_min_joins(&graft, cap, method, limits)?;
        return Ok(json!({
            "nu": e.nu,
            "joins": e.joins.iter().map(|f| edge_labels(&graft, f)).collect::<Vec<_>>(),
            "truncated": e.truncated,
        }));
    }
    let result = if oracle {
        brute_force_min_join(&graft, limits)?
    } else {
        canonical_min_join(&graft, limits)?
    };
    Ok(json!({ "nu": result.nu, "joins": [edge_labels(&graft, &result.join)] }))
}

fn distances(input: &Path, root: &str, limits: &Limits) -> Result<Value> {
    let graft = load(input)?;
    let r = vertex(&graft, root)?;
    let table = DistanceTable::new(&graft, limits)?;
    let strat = stratify(&graft, &table, r);
    let levels: Map<String, Value> = strat
        .levels
        .iter()
        .map(|(i, s)| (i.to_string(), json!(vertex_labels(&graft, *s))))
        .collect();
    let g = graft.graph();
    let rows: Map<String, Value> = g
        .vertices()
        .iter()
        .map(|x| {
            let row: Map<String, Value> = g.vertices().iter().map(|y| (g.label(y).to_string(), json!(table.get(x, y)))).collect();
            (g.label(x).to_string(), Value::Object(row))
        })
        .collect();
    Ok(json!({ "root": root, "interval": strat.interval, "levels": levels, "table": rows }))
}

fn components_cmd(input: &Path, root: Option<&str>, all_roots: bool, join: Option<&str>, limits: &Limits) -> Result<Value> {
    let graft = load(input)?;
    let join = pick_join(&graft, join, limits)?;
    let table = DistanceTable::new(&graft, limits)?;
    let roots: Vec<usize> = if all_roots {
        graft.graph().vertices().iter().collect()
    } else {
        vec![vertex(&graft, root.expect("clap requires --root without --all-roots"))?]
    };
    let mut out = Vec::new();
    for r in roots {
        let comps = components(&graft, &table, &join, r)?;
        out.push(json!({
            "root": graft.graph().label(r),
            "components": comps.iter().map(|k| component_json(&graft, k)).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "join": edge_labels(&graft, &join), "roots": out }))
}

fn kl(input: &Path, limits: &Limits) -> Result<Value> {
    let graft = load(input)?;
    let table = DistanceTable::new(&graft, limits)?;
    let kl = kl_decomposition(&graft, &table)?;
    let classes: Vec<Value> = kl
        .classes
        .iter()
        .enumerate()
        .map(|(c, s)| {
            json!({
                "id": kl.class_label(&graft, c),
                "vertices": vertex_labels(&graft, *s),
                "factor_component": kl.factor_of_class(c),
            })
        })
        .collect();
    Ok(json!({
        "allowed_edges": edge_labels(&graft, &kl.allowed.edges),
        "factor_components": kl.factor_components.iter().map(|&s| vertex_labels(&graft, s)).collect::<Vec<_>>(),
        "classes": classes,
    }))
}

fn negset(input: &Path, base: &str, avoid: &str, join: Option<&str>, limits: &Limits) -> Result<Value> {
    let graft = load(input)?;
    let base: VertexSet = parse_vertex_list(&graft, base)?;
    let avoid: VertexSet = parse_vertex_list(&graft, avoid)?;
    let join = pick_join(&graft, join, limits)?;
    let result = max_negative_set(&graft, &join, base, avoid, limits)?;
    let g = graft.graph();
    let witnesses: Map<String, Value> = result
        .witnesses
        .iter()
        .map(|(x, path)| (g.label(*x).to_string(), json!(path.iter().map(|&v| g.label(v)).collect::<Vec<_>>())))
        .collect();
    Ok(json!({
        "base": vertex_labels(&graft, base),
        "avoid": vertex_labels(&graft, avoid),
        "join": edge_labels(&graft, &join),
        "set": vertex_labels(&graft, result.set),
        "witnesses": witnesses,
    }))
}

fn print_summary(report: &SuiteReport) {
    for c in &report.checks {
        println!(
            "{:<24} {:>8} grafts {:>6} violations",
            c.id, c.grafts_tested, c.violation_count
        );
    }
    println!(
        "{} grafts, {} violations, {:.1}s",
        report.grafts,
        report.total_violations(),
        report.elapsed_seconds
    );
}

fn verify(
    corpus: &CorpusArgs,
    checks: &str,
    report_path: Option<&Path>,
    input: Option<&Path>,
    join: Option<&str>,
    limits: &Limits,
) -> Result<bool> {
    let selected = select_checks(checks)?;
    let value = if let Some(path) = input {
        let graft = load(path)?;
        let mut violations = run_checks(&graft, &selected, limits);
        if let Some(list) = join {
            violations.extend(check_supplied_join(&graft, &parse_edge_list(&graft, list)?, limits));
        }
        for v in &violations {
            println!("{}: {}", v.check, v.detail);
        }
        println!("{} violations", violations.len());
        json!({ "violations": violations })
    } else {
        let report = run_suite(&corpus.spec()?, &selected, limits)?;
        print_summary(&report);
        serde_json::to_value(&report)?
    };
    if let Some(path) = report_path {
        std::fs::write(path, serde_json::to_string_pretty(&value)?).with_context(|| format!("writing {}", path.display()))?;
    }
    let clean = match value.get("violations") {
        Some(Value::Array(v)) => v.is_empty(),
        _ => value["checks"]
            .as_array()
            .is_some_and(|cs| cs.iter().all(|c| c["violation_count"] == 0)),
    };
    Ok(clean)
}

fn run(cli: Cli) -> Result<bool> {
    let limits = Limits::default();
    match cli.command {
        Command::SolveJoin {
            input,
            enumerate,
            oracle,
            cap,
        } => print_json(&solve_join(&input, enumerate, oracle, cap, &limits)?)?,
        Command::Distances { input, root } => print_json(&distances(&input, &root, &limits)?)?,
        Command::Components {
            input,
            root,
            all_roots,
            join,
        } => print_json(&components_cmd(&input, root.as_deref(), all_roots, join.as_deref(), &limits)?)?,
        Command::Kl { input } => print_json(&kl(&input, &limits)?)?,
        Command::Negset {
            input,
            base,
            avoid,
            join,
        } => print_json(&negset(&input, &base, &avoid, join.as_deref(), &limits)?)?,
        Command::Verify {
            corpus,
            checks,
            report,
            input,
            join,
        } => return verify(&corpus, &checks, report.as_deref(), input.as_deref(), join.as_deref(), &limits),
        Command::Gen { corpus } => {
            let generated = generate(&corpus.spec()?)?;
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for g in generated.grafts() {
                writeln!(out, "{}", graft_to_string(&g))?;
            }
        }
        Command::ExportDot {
            input,
            root,
            join,
            output,
        } => {
            let graft = load(&input)?;
            let join = pick_join(&graft, join.as_deref(), &limits)?;
            let root = root.as_deref().map(|r| vertex(&graft, r)).transpose()?;
            let dot = export_dot(&graft, &join, root, &limits)?;
            match output {
                Some(path) => std::fs::write(&path, dot).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{dot}"),
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
