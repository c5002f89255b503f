//! Nearest-neighbour Markov point processes on graphs with Euclidean edges.
//!
//! The crate is organised bottom-up:
//!
//! - [`metric_graph`]: graphs, network points, shortest-path distances,
//!   per-edge distance profiles and Poisson sampling.
//! - [`network_voronoi`]: network Voronoi cells, the Delaunay relation, the
//!   local (edge-adjacency restricted) Delaunay relation, cliques and
//!   general-position checks.
//! - [`markov_model`]: pairwise-interaction densities, Papangelou conditional
//!   intensities and a birth–death Metropolis–Hastings sampler.
//! - [`consistency_lab`]: brute-force oracles, instance generators and audits
//!   of the consistency conditions (C1)/(C2).
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod consistency_lab;
pub mod markov_model;
pub mod metric_graph;
pub mod network_voronoi;
mod scalar;

pub use scalar::Scalar;

pub type Graph = metric_graph::MetricGraph<f64>;
pub type Point = metric_graph::NetworkPoint<f64>;
pub type Config = metric_graph::Configuration<f64>;
pub type Partition = network_voronoi::VoronoiPartition<f64>;
pub type Model = markov_model::InteractionModel<f64>;

pub type Graph32 = metric_graph::MetricGraph<f32>;
pub type Point32 = metric_graph::NetworkPoint<f32>;
pub type Config32 = metric_graph::Configuration<f32>;
