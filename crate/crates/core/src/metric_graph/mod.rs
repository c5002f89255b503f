//! Graphs with Euclidean edges and the shortest-path geometry of the
//! network of points on them.
//!
//! Edges are described by their lengths alone; distances, the length measure
//! and the Poisson process depend on nothing else. Optional polylines are kept
//! for export.

mod graph;
mod io;
mod path;
mod pl;
mod point;
mod sampling;

pub use graph::{polyline_length, Edge, EdgeId, GraphBuilder, GraphError, MetricGraph, Vertex, VertexId};
pub use io::{
    configuration_docs, configuration_to_json, graph_to_json, load_configuration, load_graph,
    ConfigLoadError, EdgeDoc, GraphDoc, PointDoc, VertexDoc,
};
pub use path::{MidpointError, Path, Segment};
pub use pl::PiecewiseLinearFn;
pub(crate) use pl::crossing;
pub use point::{Configuration, NetworkPoint, PointError, Support};
pub use sampling::SamplingError;
