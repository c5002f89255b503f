use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex<T> {
    pub label: String,
    pub xy: Option<[T; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub label: String,
    /// Endpoints `(v¹, v²)`; offsets along the edge are measured from `v¹`.
    pub ends: (VertexId, VertexId),
    pub length: T,
    /// Planar geometry kept for export and plotting only.
    pub polyline: Option<Vec<[T; 2]>>,
}

impl<T: Scalar> Edge<T> {
    /// The endpoint opposite to `v`, if `v` is an endpoint at all.
    pub fn other_end(&self, v: VertexId) -> Option<VertexId> {
        if self.ends.0 == v {
            Some(self.ends.1)
        } else if self.ends.1 == v {
            Some(self.ends.0)
        } else {
            None
        }
    }

    pub fn has_end(&self, v: VertexId) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("parse failure: {0}")]
    Parse(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdgeId(String),
    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("loop forbidden: edge {0:?} joins a vertex to itself")]
    Loop(String),
    #[error("duplicate edge: {0:?} and {1:?} join the same vertices")]
    MultipleEdge(String, String),
    #[error("nonpositive length on edge {0:?}")]
    NonPositiveLength(String),
    #[error("edge {0:?} needs exactly one of length or polyline")]
    LengthSpec(String),
    #[error("disconnected: vertex {0:?} is unreachable")]
    Disconnected(String),
}

impl GraphError {
    /// Short machine-readable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::Parse(_) => "parse",
            GraphError::Empty => "empty",
            GraphError::DuplicateVertex(_) => "duplicate-vertex",
            GraphError::DuplicateEdgeId(_) => "duplicate-edge-id",
            GraphError::UnknownVertex { .. } => "unknown-vertex",
            GraphError::Loop(_) => "loop",
            GraphError::MultipleEdge(..) => "multiple-edge",
            GraphError::NonPositiveLength(_) => "nonpositive-length",
            GraphError::LengthSpec(_) => "length-spec",
            GraphError::Disconnected(_) => "disconnected",
        }
    }
}

/// Arc length of a planar polyline.
pub fn polyline_length<T: Scalar>(points: &[[T; 2]]) -> T {
    points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum()
}

/// Incremental constructor for [`MetricGraph`]; all invariants are checked in
/// [`GraphBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder<T> {
    vertices: Vec<Vertex<T>>,
    edges: Vec<(String, String, String, Option<T>, Option<Vec<[T; 2]>>)>,
}

impl<T: Scalar> GraphBuilder<T> {
    pub fn new() -> Self {
        GraphBuilder {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn vertex(mut self, label: impl Into<String>, xy: Option<[T; 2]>) -> Self {
        self.vertices.push(Vertex {
            label: label.into(),
            xy,
        });
        self
    }

    pub fn edge(
        mut self,
        label: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        length: T,
    ) -> Self {
        self.edges
            .push((label.into(), a.into(), b.into(), Some(length), None));
        self
    }

    /// Adds an edge with planar geometry. When `length` is `None` it is
    /// derived from the polyline arc length.
    pub fn edge_with_polyline(
        mut self,
        label: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
        polyline: Vec<[T; 2]>,
        length: Option<T>,
    ) -> Self {
        self.edges
            .push((label.into(), a.into(), b.into(), length, Some(polyline)));
        self
    }

    pub fn build(self) -> Result<MetricGraph<T>, GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vertex_index.insert(v.label.clone(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateVertex(v.label.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut pairs: HashMap<(VertexId, VertexId), String> = HashMap::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut warnings = Vec::new();
        for (label, a, b, length, polyline) in self.edges {
            let lookup = |name: &String| {
                vertex_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownVertex {
                        edge: label.clone(),
                        vertex: name.clone(),
                    })
            };
            let (va, vb) = (lookup(&a)?, lookup(&b)?);
            if va == vb {
                return Err(GraphError::Loop(label));
            }
            let key = (va.min(vb), va.max(vb));
            if let Some(prev) = pairs.get(&key) {
                return Err(GraphError::MultipleEdge(prev.clone(), label));
            }
            let length = match (length, &polyline) {
                (Some(l), Some(poly)) => {
                    let arc = polyline_length(poly);
                    if ((arc - l).abs() / l.abs()).as_f64() > 1e-6 {
                        warnings.push(format!(
                            "edge {label:?}: polyline arc length {arc} differs from declared length {l}"
                        ));
                    }
                    l
                }
                (Some(l), None) => l,
                (None, Some(poly)) => polyline_length(poly),
                (None, None) => return Err(GraphError::LengthSpec(label)),
            };
            if !(length.is_finite() && length > T::zero()) {
                return Err(GraphError::NonPositiveLength(label));
            }
            if edge_index
                .insert(label.clone(), EdgeId(edges.len()))
                .is_some()
            {
                return Err(GraphError::DuplicateEdgeId(label));
            }
            pairs.insert(key, label.clone());
            edges.push(Edge {
                label,
                ends: (va, vb),
                length,
                polyline,
            });
        }
        MetricGraph::assemble(self.vertices, edges, vertex_index, edge_index, warnings)
    }
}

/// A finite, simple, connected graph whose edges carry positive lengths,
/// together with the network of points lying on it.
///
/// Graphs are immutable once built. All-pairs vertex distances are computed
/// at construction, so every point-to-point query is a constant number of
/// table lookups.
#[derive(Clone, Debug)]
pub struct MetricGraph<T> {
    vertices: Vec<Vertex<T>>,
    edges: Vec<Edge<T>>,
    incident: Vec<Vec<EdgeId>>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    // row-major: dist[s * n + v]
    dist: Vec<T>,
    // last edge on a shortest path from s into v
    pred: Vec<Option<EdgeId>>,
    eps: T,
    warnings: Vec<String>,
}

impl<T: Scalar> PartialEq for MetricGraph<T> {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

struct HeapItem<T> {
    dist: T,
    vertex: usize,
}

impl<T: Scalar> PartialEq for HeapItem<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for HeapItem<T> {}
impl<T: Scalar> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for HeapItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties broken by vertex id for determinism
        crate::scalar::cmp(&other.dist, &self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<T: Scalar> MetricGraph<T> {
    fn assemble(
        vertices: Vec<Vertex<T>>,
        edges: Vec<Edge<T>>,
        vertex_index: HashMap<String, VertexId>,
        edge_index: HashMap<String, EdgeId>,
        warnings: Vec<String>,
    ) -> Result<Self, GraphError> {
        let n = vertices.len();
        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incident[e.ends.0 .0].push(EdgeId(i));
            incident[e.ends.1 .0].push(EdgeId(i));
        }
        let mut g = MetricGraph {
            vertices,
            edges,
            incident,
            vertex_index,
            edge_index,
            dist: vec![T::infinity(); n * n],
            pred: vec![None; n * n],
            eps: T::default_eps(),
            warnings,
        };
        for s in 0..n {
            g.dijkstra(s);
        }
        if let Some(v) = (0..n).find(|&v| g.dist[v].is_infinite()) {
            return Err(GraphError::Disconnected(g.vertices[v].label.clone()));
        }
        Ok(g)
    }

    fn dijkstra(&mut self, source: usize) {
        let n = self.vertices.len();
        let row = source * n;
        let mut done: HashSet<usize> = HashSet::new();
        let mut heap = BinaryHeap::new();
        self.dist[row + source] = T::zero();
        heap.push(HeapItem {
            dist: T::zero(),
            vertex: source,
        });
        while let Some(HeapItem { dist, vertex }) = heap.pop() {
            if !done.insert(vertex) {
                continue;
            }
            for &e in &self.incident[vertex] {
                let edge = &self.edges[e.0];
                let w = edge.other_end(VertexId(vertex)).unwrap().0;
                let cand = dist + edge.length;
                if cand < self.dist[row + w] {
                    self.dist[row + w] = cand;
                    self.pred[row + w] = Some(e);
                    heap.push(HeapItem {
                        dist: cand,
                        vertex: w,
                    });
                }
            }
        }
    }

    /// Returns a copy using `eps` as the absolute tie tolerance.
    pub fn with_eps(mut self, eps: T) -> Self {
        assert!(eps > T::zero(), "tolerance must be positive");
        self.eps = eps;
        self
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Non-fatal validation findings, such as polylines whose arc length
    /// disagrees with the declared length.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex<T> {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge<T> {
        &self.edges[e.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn find_vertex(&self, label: &str) -> Option<VertexId> {
        self.vertex_index.get(label).copied()
    }

    pub fn find_edge(&self, label: &str) -> Option<EdgeId> {
        self.edge_index.get(label).copied()
    }

    /// The edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.incident[a.0]
            .iter()
            .copied()
            .find(|&e| self.edges[e.0].other_end(a) == Some(b))
    }

    /// Shortest-path distance between two vertices.
    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> T {
        self.dist[a.0 * self.vertices.len() + b.0]
    }

    /// Edges of a shortest vertex-to-vertex route, in travel order.
    pub fn vertex_route(&self, a: VertexId, b: VertexId) -> Vec<EdgeId> {
        let n = self.vertices.len();
        let mut route = Vec::new();
        let mut cur = b;
        while cur != a {
            let e = self.pred[a.0 * n + cur.0].expect("connected graph");
            route.push(e);
            cur = self.edges[e.0].other_end(cur).unwrap();
        }
        route.reverse();
        route
    }

    /// True iff the underlying graph has no cycles.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    /// Total length of the network. Vertices carry no mass.
    pub fn total_length(&self) -> T {
        self.edges.iter().map(|e| e.length).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("L", Some([-1.0, 0.0]))
            .vertex("R", Some([1.0, 0.0]))
            .vertex("T", Some([0.0, 1.0]))
            .edge_with_polyline("bottom", "L", "R", vec![[-1.0, 0.0], [1.0, 0.0]], None)
            .edge_with_polyline("right", "R", "T", vec![[1.0, 0.0], [0.0, 1.0]], None)
            .edge_with_polyline("left", "L", "T", vec![[-1.0, 0.0], [0.0, 1.0]], None)
            .build()
            .unwrap()
    }

    #[test]
    fn minimal_graph() {
        let g = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge("e", "A", "B", 1.0)
            .build()
            .unwrap();
        assert_eq!(g.total_length(), 1.0);
        assert!(g.is_tree());
    }

    #[test]
    fn triangle_side_lengths() {
        let g = triangle();
        let lens: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
        assert!((lens[0] - 2.0).abs() < 1e-12);
        assert!((lens[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!((lens[2] - 2f64.sqrt()).abs() < 1e-12);
        assert!((g.total_length() - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(!g.is_tree());
    }

    #[test]
    fn rejects_invalid_graphs() {
        let lp = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .edge("e", "A", "A", 1.0)
            .build();
        assert!(matches!(lp, Err(GraphError::Loop(_))));
        assert!(lp.unwrap_err().to_string().contains("loop forbidden"));

        let dup = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge("e", "A", "B", 1.0)
            .edge("f", "B", "A", 2.0)
            .build();
        assert!(matches!(dup, Err(GraphError::MultipleEdge(..))));

        let disc = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("e", "A", "B", 1.0)
            .build();
        assert!(matches!(disc, Err(GraphError::Disconnected(_))));

        for bad in [0.0, -1.0, f64::INFINITY, f64::NAN] {
            let r = GraphBuilder::<f64>::new()
                .vertex("A", None)
                .vertex("B", None)
                .edge("e", "A", "B", bad)
                .build();
            assert!(matches!(r, Err(GraphError::NonPositiveLength(_))), "{bad}");
        }
    }

    #[test]
    fn polyline_mismatch_is_a_warning() {
        let g = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge_with_polyline("e", "A", "B", vec![[0.0, 0.0], [1.0, 0.0]], Some(1.5))
            .build()
            .unwrap();
        assert_eq!(g.warnings().len(), 1);
        assert_eq!(g.edge(EdgeId(0)).length, 1.5);
    }

    #[test]
    fn tree_detection() {
        let path = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("ab", "A", "B", 1.0)
            .edge("bc", "B", "C", 1.0)
            .build()
            .unwrap();
        assert!(path.is_tree());
        assert_eq!(path.total_length(), 2.0);
        let single = GraphBuilder::<f64>::new().vertex("A", None).build().unwrap();
        assert!(single.is_tree());
        assert_eq!(single.total_length(), 0.0);
        assert!(!triangle().is_tree());
    }

    #[test]
    fn vertex_shortcut_beats_direct_edge() {
        let g = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("ab", "A", "B", 10.0)
            .edge("ac", "A", "C", 1.0)
            .edge("cb", "C", "B", 1.0)
            .build()
            .unwrap();
        let (a, b) = (g.find_vertex("A").unwrap(), g.find_vertex("B").unwrap());
        assert_eq!(g.vertex_distance(a, b), 2.0);
        let route = g.vertex_route(a, b);
        assert_eq!(route.len(), 2);
    }
}
