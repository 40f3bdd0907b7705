//! Grafts, minimum joins, and the structures they induce: join distances,
//! distance components around a root, the Kotzig–Lovász decomposition by
//! allowed edges, and maximum negative sets.
//!
//! Graphs are small (at most [`MAX_VERTICES`] vertices) and vertices are
//! indices; vertex sets are bitmasks.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod decomposition;
pub mod distance;
pub mod error;
pub mod graft;
pub mod join;
pub mod kl;
pub mod negative;
pub mod vset;

pub use decomposition::{
    all_noncap, check_counts, check_primal_shift, components, is_k_congruent, noncap, raw_components,
    universality_map, Beam, CountReport, DistanceComponent, UniversalityMap,
};
pub use distance::{dist, dist_via_paths, is_extreme, is_primal, stratify, DistanceTable, Stratification};
pub use error::{GraftError, Result};
pub use graft::{induced_graft, EdgeSet, Graft, Graph, InducedGraft, Join, WeightFn};
pub use join::{
    allowed_edges, allowed_edges_by_enumeration, brute_force_min_join, canonical_min_join, enumerate_min_joins,
    is_conservative, min_join, nu, simple_cycles, AllowedEdgeSet, Enumeration, JoinEnumeration, Method,
    MinJoinResult,
};
pub use kl::{attachments, check_ak2part, component_classes, kl_decomposition, ComponentClasses, KlDecomposition};
pub use negative::{
    check_neicomp2negset, is_valid_witness, max_negative_set, max_negative_set_in_order, negative_witness,
    nei_comp_family, NeighborFamily, NegativeSetResult,
};
pub use vset::{VertexSet, MAX_VERTICES};

/// Size bounds past which exact routines refuse to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Terminals per component for the matching-based solver.
    pub matching_terminals: usize,
    /// Edge count for the brute-force join oracle.
    pub brute_force_edges: usize,
    /// Vertex count for exhaustive path searches.
    pub path_vertices: usize,
    /// Simple cycles enumerated before giving up.
    pub cycle_count: usize,
    /// Candidate edge subsets scanned when enumerating joins by size.
    pub subset_scan: usize,
    /// Default number of minimum joins to enumerate.
    pub enumeration_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            matching_terminals: 20,
            brute_force_edges: 20,
            path_vertices: 15,
            cycle_count: 100_000,
            subset_scan: 5_000_000,
            enumeration_cap: 200,
        }
    }
}
