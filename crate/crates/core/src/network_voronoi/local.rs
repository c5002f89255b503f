use super::partition::delaunay_relation;
use super::relation::{Relation, RelationKind};
use crate::metric_graph::{Configuration, EdgeId, MetricGraph, NetworkPoint, Support, VertexId};
use crate::scalar::{cmp, Scalar};

/// Configuration-free adjacency of vertices and edges: edges sharing an
/// endpoint, a vertex and its incident edges, and the two ends of an edge.
#[derive(Clone, Debug)]
pub struct EdgeAdjacency {
    ends: Vec<(VertexId, VertexId)>,
    n_vertices: usize,
}

pub fn edge_adjacency<T: Scalar>(g: &MetricGraph<T>) -> EdgeAdjacency {
    EdgeAdjacency {
        ends: g.edges().iter().map(|e| e.ends).collect(),
        n_vertices: g.vertex_count(),
    }
}

impl EdgeAdjacency {
    pub fn related(&self, a: Support, b: Support) -> bool {
        let has = |e: EdgeId, v: VertexId| self.ends[e.0].0 == v || self.ends[e.0].1 == v;
        match (a, b) {
            (Support::Edge(e), Support::Edge(f)) => {
                let (u, v) = self.ends[f.0];
                e == f || has(e, u) || has(e, v)
            }
            (Support::Edge(e), Support::Vertex(v)) | (Support::Vertex(v), Support::Edge(e)) => {
                has(e, v)
            }
            (Support::Vertex(v), Support::Vertex(w)) => {
                v == w
                    || self
                        .ends
                        .iter()
                        .any(|&(a, b)| (a, b) == (v, w) || (a, b) == (w, v))
            }
        }
    }

    /// Edges related to `e`, including `e`.
    pub fn edge_neighbors(&self, e: EdgeId) -> Vec<EdgeId> {
        (0..self.ends.len())
            .map(EdgeId)
            .filter(|&f| self.related(Support::Edge(e), Support::Edge(f)))
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }
}

/// The local Delaunay relation.
///
/// Restricted to one closed edge, or to two closed edges meeting at a vertex,
/// the Delaunay relation is the sequential order along that path; this is
/// evaluated directly instead of building the sub-networks.
pub fn local_delaunay_relation<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> Relation {
    let mut r = Relation::identity(RelationKind::LocalDelaunay, x.len());
    let mut interior: Vec<Vec<(T, usize)>> = vec![Vec::new(); g.edge_count()];
    let mut at_vertex: Vec<Option<usize>> = vec![None; g.vertex_count()];
    for (k, p) in x.iter().enumerate() {
        match *p {
            NetworkPoint::Vertex(v) => at_vertex[v.0] = Some(k),
            NetworkPoint::Edge { edge, offset } => interior[edge.0].push((offset, k)),
        }
    }
    for list in &mut interior {
        list.sort_by(|a, b| cmp(&a.0, &b.0));
    }

    // along each closed edge
    for e in g.edge_ids() {
        let (a, b) = g.edge(e).ends;
        let seq: Vec<usize> = at_vertex[a.0]
            .into_iter()
            .chain(interior[e.0].iter().map(|&(_, k)| k))
            .chain(at_vertex[b.0])
            .collect();
        for w in seq.windows(2) {
            r.relate(w[0], w[1]);
        }
    }

    // across an empty shared vertex
    for w in g.vertex_ids() {
        if at_vertex[w.0].is_some() {
            continue;
        }
        let nearest: Vec<usize> = g
            .incident_edges(w)
            .iter()
            .filter_map(|&e| {
                let list = &interior[e.0];
                if g.edge(e).ends.0 == w {
                    list.first()
                } else {
                    list.last()
                }
                .map(|&(_, k)| k)
            })
            .collect();
        for (i, &p) in nearest.iter().enumerate() {
            for &q in &nearest[i + 1..] {
                r.relate(p, q);
            }
        }
    }
    r
}

/// Relation of the requested kind.
pub fn relation<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>, kind: RelationKind) -> Relation {
    match kind {
        RelationKind::Delaunay => delaunay_relation(g, x),
        RelationKind::LocalDelaunay => local_delaunay_relation(g, x),
    }
}
