//! The graft file format:
//! `{"vertices": [...], "edges": [["u", "v"], ...], "terminals": [...]}`,
//! with edges listed in id order.

use std::path::Path;

use graft_core::{EdgeSet, Graft, VertexSet};
use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraftJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub terminals: Vec<String>,
}

impl GraftJson {
    pub fn from_graft(graft: &Graft) -> Self {
        let graph = graft.graph();
        GraftJson {
            vertices: graph.labels().to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|&(u, v)| (graph.label(u).to_string(), graph.label(v).to_string()))
                .collect(),
            terminals: vertex_labels(graft, graft.terminals()),
        }
    }

    /// Builds the graft; parallel edges, loops, unknown vertices and odd
    /// terminal parity are rejected.
    pub fn to_graft(&self) -> Result<Graft> {
        let vertices: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|(u, v)| (u.as_str(), v.as_str())).collect();
        let terminals: Vec<&str> = self.terminals.iter().map(String::as_str).collect();
        Ok(Graft::from_labels(&vertices, &edges, &terminals)?)
    }
}

pub fn parse_graft(text: &str) -> Result<Graft> {
    serde_json::from_str::<GraftJson>(text)?.to_graft()
}

pub fn read_graft(path: &Path) -> Result<Graft> {
    parse_graft(&std::fs::read_to_string(path)?)
}

pub fn graft_to_string(graft: &Graft) -> String {
    serde_json::to_string(&GraftJson::from_graft(graft)).expect("graft JSON serializes")
}

/// Labels of a vertex set, in id order.
pub fn vertex_labels(graft: &Graft, set: VertexSet) -> Vec<String> {
    set.iter().map(|v| graft.graph().label(v).to_string()).collect()
}

pub fn edge_labels(graft: &Graft, edges: &EdgeSet) -> Vec<(String, String)> {
    let graph = graft.graph();
    edges
        .iter()
        .map(|e| {
            let (u, v) = graph.endpoints(e);
            (graph.label(u).to_string(), graph.label(v).to_string())
        })
        .collect()
}

pub fn vertex(graft: &Graft, label: &str) -> Result<usize> {
    graft
        .graph()
        .vertex_by_label(label)
        .ok_or_else(|| LabError::UnknownVertex(label.to_string()))
}

/// Parses a comma-separated list of vertex labels.
pub fn parse_vertex_list(graft: &Graft, list: &str) -> Result<VertexSet> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|label| vertex(graft, label))
        .collect()
}

/// Parses a comma-separated list of edges written `u-v`.
pub fn parse_edge_list(graft: &Graft, list: &str) -> Result<EdgeSet> {
    let graph = graft.graph();
    let mut edges = EdgeSet::new(graph.edge_count());
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (u, v) = item
            .split_once('-')
            .ok_or_else(|| LabError::Input(format!("edge `{item}` is not written as u-v")))?;
        let (u, v) = (vertex(graft, u.trim())?, vertex(graft, v.trim())?);
        let e = graph
            .edge_between(u, v)
            .ok_or_else(|| LabError::Input(format!("`{item}` is not an edge")))?;
        edges.insert(e);
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use graft_core::GraftError;

    #[test]
    fn round_trip() {
        let text = r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]],"terminals":["a","c"]}"#;
        let g = parse_graft(text).unwrap();
        assert_eq!(g.graph().edge_count(), 2);
        assert_eq!(graft_to_string(&g), text);
    }

    #[test]
    fn rejects_bad_input() {
        let dup = r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]],"terminals":[]}"#;
        assert!(matches!(parse_graft(dup), Err(LabError::Graft(GraftError::Format(_)))));
        let odd = r#"{"vertices":["a","b"],"edges":[["a","b"]],"terminals":["a"]}"#;
        assert!(matches!(parse_graft(odd), Err(LabError::Graft(GraftError::Parity { .. }))));
        assert!(matches!(parse_graft("{\"vertices\":[]"), Err(LabError::Json(_))));
    }

    #[test]
    fn parses_lists() {
        let g = parse_graft(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]]}"#).unwrap();
        assert_eq!(parse_vertex_list(&g, "a, c").unwrap().iter().collect::<Vec<_>>(), [0, 2]);
        assert_eq!(parse_edge_list(&g, "c-b").unwrap().to_vec(), [1]);
        assert!(matches!(parse_vertex_list(&g, "z"), Err(LabError::UnknownVertex(_))));
        assert!(parse_edge_list(&g, "a-c").is_err());
    }
}
