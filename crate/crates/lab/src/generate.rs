//! Corpora of bipartite grafts: every labeled connected bipartite graph up
//! to a vertex bound crossed with every even terminal set, or a seeded
//! random sample.

use std::fmt;
use std::str::FromStr;

use graft_core::{Graft, GraftError, Graph, VertexSet, MAX_VERTICES};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

/// Largest vertex bound accepted in exhaustive mode.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphClass {
    Trees,
    EvenCycles,
    Grids,
    GeneralBipartite,
}

impl GraphClass {
    pub const ALL: [GraphClass; 4] = [
        GraphClass::Trees,
        GraphClass::EvenCycles,
        GraphClass::Grids,
        GraphClass::GeneralBipartite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Trees => "trees",
            GraphClass::EvenCycles => "even_cycles",
            GraphClass::Grids => "grids",
            GraphClass::GeneralBipartite => "general_bipartite",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphClass {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        GraphClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| LabError::Corpus(format!("unknown graph class `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub mode: Mode,
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_edges: Option<usize>,
    /// Number of grafts in random mode.
    pub count: usize,
    pub seed: u64,
    pub classes: Vec<GraphClass>,
    /// Probability of each optional edge in random general bipartite graphs.
    pub edge_probability: f64,
}

impl CorpusSpec {
    /// Every connected bipartite graft with at most `max_vertices` vertices.
    pub fn exhaustive(max_vertices: usize) -> Self {
        CorpusSpec {
            mode: Mode::Exhaustive,
            min_vertices: 1,
            max_vertices,
            max_edges: None,
            count: 0,
            seed: 0,
            classes: vec![GraphClass::GeneralBipartite],
            edge_probability: 0.3,
        }
    }

    /// `count` random grafts over all classes.
    pub fn random(count: usize, seed: u64, max_vertices: usize) -> Self {
        CorpusSpec {
            mode: Mode::Random,
            min_vertices: 1,
            max_vertices,
            max_edges: None,
            count,
            seed,
            classes: GraphClass::ALL.to_vec(),
            edge_probability: 0.3,
        }
    }

    fn validate(&self) -> Result<()> {
        let bound = match self.mode {
            Mode::Exhaustive => MAX_EXHAUSTIVE_VERTICES,
            Mode::Random => MAX_VERTICES,
        };
        if self.max_vertices > bound {
            return Err(GraftError::Size {
                what: "corpus vertex bound",
                actual: self.max_vertices,
                limit: bound,
            }
            .into());
        }
        if self.min_vertices == 0 || self.min_vertices > self.max_vertices {
            return Err(LabError::Corpus(format!(
                "vertex range {}..={} is empty or starts at 0",
                self.min_vertices, self.max_vertices
            )));
        }
        if self.classes.is_empty() {
            return Err(LabError::Corpus("no graph classes selected".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(LabError::Corpus(format!("edge probability {} is not in [0, 1]", self.edge_probability)));
        }
        Ok(())
    }
}

/// Terminal sets to pair with a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminals {
    /// Every even subset of the (connected) vertex set, in mask order.
    AllEven,
    Fixed(VertexSet),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub graph: Graph,
    pub terminals: Terminals,
}

impl CorpusEntry {
    pub fn graft_count(&self) -> usize {
        match self.terminals {
            Terminals::AllEven => 1 << (self.graph.vertex_count() - 1),
            Terminals::Fixed(_) => 1,
        }
    }

    pub fn grafts(&self) -> impl Iterator<Item = Graft> + '_ {
        let n = self.graph.vertex_count();
        let sets: Box<dyn Iterator<Item = VertexSet>> = match self.terminals {
            Terminals::AllEven => Box::new(
                (0u64..1 << n)
                    .filter(|m| m.count_ones() % 2 == 0)
                    .map(VertexSet::from_bits),
            ),
            Terminals::Fixed(t) => Box::new(std::iter::once(t)),
        };
        sets.map(|t| Graft::new(self.graph.clone(), t).expect("corpus terminal sets are even"))
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn graft_count(&self) -> usize {
        self.entries.iter().map(CorpusEntry::graft_count).sum()
    }

    pub fn grafts(&self) -> impl Iterator<Item = Graft> + '_ {
        self.entries.iter().flat_map(CorpusEntry::grafts)
    }
}

/// Vertex label for index `i`: `a` through `z`, then `v26`, `v27`, ...
pub fn label(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("v{i}")
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(label).collect()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::new(labels(n), edges).expect("generated graphs are simple")
}

/// Builds the corpus; deterministic in the spec.
pub fn generate(spec: &CorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let entries = match spec.mode {
        Mode::Exhaustive => exhaustive(spec),
        Mode::Random => random(spec)?,
    };
    Ok(Corpus { entries })
}

fn within_edge_bound(spec: &CorpusSpec, edges: usize) -> bool {
    spec.max_edges.is_none_or(|m| edges <= m)
}

fn exhaustive(spec: &CorpusSpec) -> Vec<CorpusEntry> {
    let mut graphs = Vec::new();
    let mut classes = spec.classes.clone();
    classes.sort();
    classes.dedup();
    for class in classes {
        for n in spec.min_vertices..=spec.max_vertices {
            match class {
                GraphClass::GeneralBipartite => graphs.extend(labeled_connected_bipartite(n, false)),
                GraphClass::Trees => graphs.extend(labeled_connected_bipartite(n, true)),
                GraphClass::EvenCycles if n >= 4 && n % 2 == 0 => graphs.push(cycle(n)),
                GraphClass::Grids => {
                    for a in 2..=n {
                        if n % a == 0 && a <= n / a && n / a >= 2 {
                            graphs.push(grid(a, n / a));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    graphs
        .into_iter()
        .filter(|g| within_edge_bound(spec, g.edge_count()))
        .map(|graph| CorpusEntry {
            graph,
            terminals: Terminals::AllEven,
        })
        .collect()
}

/// Every connected bipartite graph on vertices `0..n` (only trees if asked),
/// in edge-mask order.
fn labeled_connected_bipartite(n: usize, trees_only: bool) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let m = mask.count_ones() as usize;
        if m + 1 < n || (trees_only && m + 1 != n) {
            continue;
        }
        let mut adj = vec![0u64; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        if is_connected_bipartite(&adj) {
            let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            out.push(graph(n, &edges));
        }
    }
    out
}

fn is_connected_bipartite(adj: &[u64]) -> bool {
    let n = adj.len();
    let mut color = vec![u8::MAX; n];
    let mut stack = vec![0];
    color[0] = 0;
    let mut seen = 1;
    while let Some(v) = stack.pop() {
        let mut nb = adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if color[u] == u8::MAX {
                color[u] = 1 - color[v];
                seen += 1;
                stack.push(u);
            } else if color[u] == color[v] {
                return false;
            }
        }
    }
    seen == n
}

fn cycle(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(n, &edges)
}

fn grid(a: usize, b: usize) -> Graph {
    let id = |i: usize, j: usize| i * b + j;
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            if j + 1 < b {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < a {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    graph(a * b, &edges)
}

fn random(spec: &CorpusSpec) -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let range = spec.min_vertices..=spec.max_vertices;
    let cycle_lengths: Vec<usize> = range.clone().filter(|&n| n >= 4 && n % 2 == 0).collect();
    let grid_shapes: Vec<(usize, usize)> = (2..=spec.max_vertices)
        .flat_map(|a| (a..=spec.max_vertices).map(move |b| (a, b)))
        .filter(|&(a, b)| range.contains(&(a * b)))
        .collect();
    let mut classes = spec.classes.clone();
    classes.retain(|c| match c {
        GraphClass::EvenCycles => !cycle_lengths.is_empty(),
        GraphClass::Grids => !grid_shapes.is_empty(),
        _ => true,
    });
    if classes.is_empty() {
        return Err(LabError::Corpus("no selected class has members in the vertex range".into()));
    }
    let mut entries = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let class = classes[rng.random_range(0..classes.len())];
        let (n, mut edges) = match class {
            GraphClass::Trees => {
                let n = rng.random_range(range.clone());
                (n, random_tree(&mut rng, n).0)
            }
            GraphClass::GeneralBipartite => {
                let n = rng.random_range(range.clone());
                let (mut edges, side) = random_tree(&mut rng, n);
                for u in 0..n {
                    for v in u + 1..n {
                        if side[u] != side[v]
                            && !edges.contains(&(u, v))
                            && within_edge_bound(spec, edges.len() + 1)
                            && rng.random_bool(spec.edge_probability)
                        {
                            edges.push((u, v));
                        }
                    }
                }
                (n, edges)
            }
            GraphClass::EvenCycles => {
                let n = cycle_lengths[rng.random_range(0..cycle_lengths.len())];
                (n, cycle(n).edges().to_vec())
            }
            GraphClass::Grids => {
                let (a, b) = grid_shapes[rng.random_range(0..grid_shapes.len())];
                (a * b, grid(a, b).edges().to_vec())
            }
        };
        if !within_edge_bound(spec, edges.len()) {
            return Err(LabError::Corpus(format!(
                "a {class} graph on {n} vertices needs {} edges, above the bound",
                edges.len()
            )));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for e in &mut edges {
            *e = (perm[e.0], perm[e.1]);
        }
        let mut terminals = VertexSet::EMPTY;
        for v in 0..n.saturating_sub(1) {
            if rng.random_bool(0.5) {
                terminals.insert(v);
            }
        }
        if terminals.len() % 2 == 1 {
            terminals.insert(n - 1);
        }
        entries.push(CorpusEntry {
            graph: graph(n, &edges),
            terminals: Terminals::Fixed(terminals),
        });
    }
    Ok(entries)
}

/// A random recursive tree on `0..n` and its 2-coloring.
fn random_tree(rng: &mut impl Rng, n: usize) -> (Vec<(usize, usize)>, Vec<bool>) {
    let mut side = vec![false; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let p = rng.random_range(0..v);
        side[v] = !side[p];
        edges.push((p, v));
    }
    (edges, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::graft_to_string;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn tiny_exhaustive_corpus() {
        let grafts: Vec<String> = generate(&CorpusSpec::exhaustive(2)).unwrap().grafts().map(|g| graft_to_string(&g)).collect();
        assert_eq!(
            grafts,
            [
                r#"{"vertices":["a"],"edges":[],"terminals":[]}"#,
                r#"{"vertices":["a","b"],"edges":[["a","b"]],"terminals":[]}"#,
                r#"{"vertices":["a","b"],"edges":[["a","b"]],"terminals":["a","b"]}"#,
            ]
        );
    }

    #[test]
    fn connected_bipartite_counts() {
        // Labeled connected bipartite graphs on 1..=6 vertices.
        let counts: Vec<usize> = (1..=6).map(|n| labeled_connected_bipartite(n, false).len()).collect();
        assert_eq!(counts, [1, 1, 3, 19, 195, 3031]);
        // Labeled trees: n^(n-2).
        let trees: Vec<usize> = (1..=6).map(|n| labeled_connected_bipartite(n, true).len()).collect();
        assert_eq!(trees, [1, 1, 3, 16, 125, 1296]);
    }

    #[test]
    fn even_cycles_up_to_six() {
        let spec = CorpusSpec {
            classes: vec![GraphClass::EvenCycles],
            ..CorpusSpec::exhaustive(6)
        };
        let corpus = generate(&spec).unwrap();
        let expected: u64 = (0..=4).step_by(2).map(|k| binomial(4, k)).sum::<u64>()
            + (0..=6).step_by(2).map(|k| binomial(6, k)).sum::<u64>();
        assert_eq!(corpus.graft_count() as u64, expected);
        assert_eq!(corpus.grafts().count(), 40);
        let sizes: Vec<usize> = corpus.entries.iter().map(|e| e.graph.vertex_count()).collect();
        assert_eq!(sizes, [4, 6]);
    }

    #[test]
    fn grids_and_edge_bounds() {
        let spec = CorpusSpec {
            classes: vec![GraphClass::Grids],
            ..CorpusSpec::exhaustive(6)
        };
        let shapes: Vec<(usize, usize)> = generate(&spec)
            .unwrap()
            .entries
            .iter()
            .map(|e| (e.graph.vertex_count(), e.graph.edge_count()))
            .collect();
        assert_eq!(shapes, [(4, 4), (6, 7)]);
        let bounded = CorpusSpec {
            max_edges: Some(3),
            ..CorpusSpec::exhaustive(4)
        };
        assert!(generate(&bounded).unwrap().entries.iter().all(|e| e.graph.edge_count() <= 3));
    }

    #[test]
    fn random_corpus_is_deterministic_and_valid() {
        let spec = CorpusSpec::random(10, 7, 9);
        let a: Vec<String> = generate(&spec).unwrap().grafts().map(|g| graft_to_string(&g)).collect();
        let b: Vec<String> = generate(&spec).unwrap().grafts().map(|g| graft_to_string(&g)).collect();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        let c: Vec<String> = generate(&CorpusSpec::random(10, 8, 9)).unwrap().grafts().map(|g| graft_to_string(&g)).collect();
        assert_ne!(a, c);
        for g in generate(&CorpusSpec::random(200, 1, 10)).unwrap().grafts() {
            assert!(g.is_connected() && g.is_bipartite());
            assert!(g.terminals().len() % 2 == 0);
        }
    }

    #[test]
    fn rejects_absurd_bounds() {
        assert!(matches!(
            generate(&CorpusSpec::exhaustive(8)),
            Err(LabError::Graft(GraftError::Size { .. }))
        ));
        assert!(matches!(generate(&CorpusSpec::random(1, 0, 65)), Err(LabError::Graft(GraftError::Size { .. }))));
        let cycles_only = CorpusSpec {
            classes: vec![GraphClass::EvenCycles],
            ..CorpusSpec::random(1, 0, 3)
        };
        assert!(matches!(generate(&cycles_only), Err(LabError::Corpus(_))));
    }
}
