//! Oracles, instance generators and randomized audits of the relation and
//! consistency properties.
//!
//! Audits run in parallel; instance `i` of a batch draws from ChaCha stream
//! `i` of the master seed, so any report can be replayed from
//! `(master seed, index)` alone.

mod audit;
mod batch;
mod generators;
mod oracles;
mod triangle;

pub use audit::{
    check_c1, check_c2, check_clique_bound, check_hereditary, check_midpoint, related_in_union,
    trichotomy, AuditReport, Condition, Instance, Trichotomy, Verdict,
};
pub use batch::{
    audit_c1, audit_c2, audit_clique_bound, audit_distance, audit_grid_oracle, audit_hereditary,
    audit_midpoint, audit_trichotomy, draw_graph, instance_rng, AuditSettings, AuditSummary,
    GraphFamily,
};
pub use generators::{random_graph, random_tree, GeneratorError};
pub use oracles::{
    brute_force_distance, brute_force_paths, grid_voronoi_oracle, local_delaunay_by_restriction,
    witness_gap, OracleError, MAX_BRUTE_FORCE_EDGES,
};
pub use triangle::{
    reproduce_triangle_counterexample, triangle_graph, triangle_midpoints, TriangleReproduction,
};
