//! Graphviz export. Vertices are filled by Kotzig-Lovász class, terminals
//! are double circles and join edges are bold. With a root, the distance
//! components become nested clusters (blue capital, red decapital) and each
//! beam is drawn red.

use std::collections::BTreeSet;
use std::fmt::Write;

use graft_core::{components, kl_decomposition, DistanceComponent, DistanceTable, EdgeSet, Graft, Limits, VertexSet};

use crate::Result;

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(graft: &Graft, join: &EdgeSet, root: Option<usize>, limits: &Limits) -> Result<String> {
    let graph = graft.graph();
    let table = DistanceTable::new(graft, limits)?;
    let kl = kl_decomposition(graft, &table)?;
    let comps = match root {
        Some(r) => components(graft, &table, join, r)?,
        None => Vec::new(),
    };
    let mut out = String::from("graph graft {\n  node [style=filled];\n");
    let node = |v: usize| {
        format!(
            "{} [shape={}, fillcolor={}];",
            quote(graph.label(v)),
            if graft.terminals().contains(v) { "doublecircle" } else { "circle" },
            quote(PALETTE[kl.class_of(v) % PALETTE.len()])
        )
    };

    // Components form a laminar family; nest each inside its smallest
    // strict superset.
    let mut sets: Vec<&DistanceComponent> = Vec::new();
    let mut seen = BTreeSet::new();
    for k in &comps {
        if seen.insert(k.vertices) {
            sets.push(k);
        }
    }
    let parent = |i: usize| {
        (0..sets.len())
            .filter(|&p| p != i && sets[i].vertices.is_subset(sets[p].vertices) && sets[i].vertices != sets[p].vertices)
            .min_by_key(|&p| sets[p].vertices.len())
    };
    let parents: Vec<Option<usize>> = (0..sets.len()).map(parent).collect();

    fn emit(
        out: &mut String,
        i: usize,
        depth: usize,
        sets: &[&DistanceComponent],
        parents: &[Option<usize>],
        node: &dyn Fn(usize) -> String,
    ) {
        let pad = "  ".repeat(depth);
        let k = sets[i];
        let _ = writeln!(out, "{pad}subgraph cluster_{i} {{");
        let _ = writeln!(
            out,
            "{pad}  label=\"level {}{}\"; color={};",
            k.level,
            if k.capital { ", capital" } else { ", decapital" },
            if k.capital { "blue" } else { "red" }
        );
        let children: Vec<usize> = (0..sets.len()).filter(|&c| parents[c] == Some(i)).collect();
        let covered = children.iter().fold(VertexSet::EMPTY, |acc, &c| acc.union(sets[c].vertices));
        for v in k.vertices.difference(covered) {
            let _ = writeln!(out, "{pad}  {}", node(v));
        }
        for c in children {
            emit(out, c, depth + 1, sets, parents, node);
        }
        let _ = writeln!(out, "{pad}}}");
    }

    let mut clustered = VertexSet::EMPTY;
    for i in (0..sets.len()).filter(|&i| parents[i].is_none()) {
        clustered = clustered.union(sets[i].vertices);
        emit(&mut out, i, 1, &sets, &parents, &node);
    }
    for v in graph.vertices().difference(clustered) {
        let _ = writeln!(out, "  {}", node(v));
    }
    let beams: BTreeSet<usize> = comps.iter().filter_map(|k| k.beam).map(|b| b.edge).collect();
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let mut attrs = Vec::new();
        if join.contains(e) {
            attrs.push("penwidth=3".to_string());
        }
        if beams.contains(&e) {
            attrs.push("color=red".to_string());
            attrs.push("label=\"beam\"".to_string());
        }
        let attrs = if attrs.is_empty() { String::new() } else { format!(" [{}]", attrs.join(", ")) };
        let _ = writeln!(out, "  {} -- {}{attrs};", quote(graph.label(u)), quote(graph.label(v)));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::parse_graft;
    use graft_core::min_join;

    #[test]
    fn p3_with_root() {
        let g = parse_graft(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]],"terminals":["a","c"]}"#).unwrap();
        let l = Limits::default();
        let f = min_join(&g, &l).unwrap().join;
        let dot = export_dot(&g, &f, Some(0), &l).unwrap();
        assert!(dot.starts_with("graph graft {"));
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
        assert_eq!(dot.matches("label=\"beam\"").count(), 2);
        assert_eq!(dot.matches("shape=doublecircle").count(), 2);
        // Each vertex is declared exactly once.
        for v in ["a", "b", "c"] {
            assert_eq!(dot.matches(&format!("\"{v}\" [shape")).count(), 1);
        }
        let plain = export_dot(&g, &f, None, &l).unwrap();
        assert!(!plain.contains("cluster"));
        assert_eq!(plain.matches("penwidth=3").count(), 2);
    }
}
