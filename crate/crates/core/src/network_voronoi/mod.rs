//! Voronoi cells, the Delaunay relation and its local variant.

mod general_position;
mod local;
mod partition;
mod relation;

pub use general_position::{in_general_position, GeneralPosition};
pub use local::{edge_adjacency, local_delaunay_relation, relation, EdgeAdjacency};
pub use partition::{
    delaunay_relation, neighbor_witness, voronoi_partition, CellPiece, EdgeCells, VoronoiError,
    VoronoiPartition, Witness,
};
pub use relation::{IndexError, Relation, RelationKind};
