use std::cmp::Ordering;

use thiserror::Error;

use super::graph::{EdgeId, MetricGraph, VertexId};
use crate::scalar::{cmp, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("offset {offset} outside [0, {length}] on edge {edge:?}")]
    OffsetOutOfRange {
        edge: String,
        offset: f64,
        length: f64,
    },
    #[error("duplicate point in configuration")]
    Duplicate,
    #[error("point index {0} out of range")]
    BadIndex(usize),
}

/// A location on the network: a vertex, or the interior of an edge at a
/// given offset from its first endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetworkPoint<T> {
    Vertex(VertexId),
    Edge { edge: EdgeId, offset: T },
}

/// The part of the network a point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Support {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl<T: Scalar> NetworkPoint<T> {
    pub fn support(&self) -> Support {
        match *self {
            NetworkPoint::Vertex(v) => Support::Vertex(v),
            NetworkPoint::Edge { edge, .. } => Support::Edge(edge),
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self, NetworkPoint::Vertex(_))
    }

    /// Total order: vertices first by id, then edge points by (edge, offset).
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NetworkPoint::Vertex(a), NetworkPoint::Vertex(b)) => a.cmp(b),
            (NetworkPoint::Vertex(_), NetworkPoint::Edge { .. }) => Ordering::Less,
            (NetworkPoint::Edge { .. }, NetworkPoint::Vertex(_)) => Ordering::Greater,
            (
                NetworkPoint::Edge { edge: e, offset: s },
                NetworkPoint::Edge { edge: f, offset: t },
            ) => e.cmp(f).then_with(|| cmp(s, t)),
        }
    }
}

impl<T: Scalar> MetricGraph<T> {
    /// Point at `offset` along edge `e`; offsets `0` and the edge length map
    /// to the corresponding endpoint vertex.
    pub fn edge_point(&self, e: EdgeId, offset: T) -> Result<NetworkPoint<T>, PointError> {
        if e.0 >= self.edge_count() {
            return Err(PointError::UnknownEdge(format!("#{}", e.0)));
        }
        let edge = self.edge(e);
        if !(offset >= T::zero() && offset <= edge.length) {
            return Err(PointError::OffsetOutOfRange {
                edge: edge.label.clone(),
                offset: offset.as_f64(),
                length: edge.length.as_f64(),
            });
        }
        Ok(if offset == T::zero() {
            NetworkPoint::Vertex(edge.ends.0)
        } else if offset == edge.length {
            NetworkPoint::Vertex(edge.ends.1)
        } else {
            NetworkPoint::Edge { edge: e, offset }
        })
    }

    /// Same as [`MetricGraph::edge_point`], addressing the edge by label.
    pub fn point_on(&self, edge_label: &str, offset: T) -> Result<NetworkPoint<T>, PointError> {
        let e = self
            .find_edge(edge_label)
            .ok_or_else(|| PointError::UnknownEdge(edge_label.to_string()))?;
        self.edge_point(e, offset)
    }

    pub fn vertex_point(&self, label: &str) -> Result<NetworkPoint<T>, PointError> {
        self.find_vertex(label)
            .map(NetworkPoint::Vertex)
            .ok_or_else(|| PointError::UnknownVertex(label.to_string()))
    }

    /// Verifies that `p` references this graph and is canonical.
    pub fn check_point(&self, p: &NetworkPoint<T>) -> Result<(), PointError> {
        match *p {
            NetworkPoint::Vertex(v) if v.0 < self.vertex_count() => Ok(()),
            NetworkPoint::Vertex(v) => Err(PointError::UnknownVertex(format!("#{}", v.0))),
            NetworkPoint::Edge { edge, offset } => {
                if edge.0 >= self.edge_count() {
                    return Err(PointError::UnknownEdge(format!("#{}", edge.0)));
                }
                let len = self.edge(edge).length;
                if offset > T::zero() && offset < len {
                    Ok(())
                } else {
                    Err(PointError::OffsetOutOfRange {
                        edge: self.edge(edge).label.clone(),
                        offset: offset.as_f64(),
                        length: len.as_f64(),
                    })
                }
            }
        }
    }

    /// Endpoint vertices reachable from `p` without passing another vertex,
    /// each with the travel distance to it.
    pub(crate) fn exits(&self, p: &NetworkPoint<T>) -> ([(VertexId, T); 2], usize) {
        match *p {
            NetworkPoint::Vertex(v) => ([(v, T::zero()), (v, T::zero())], 1),
            NetworkPoint::Edge { edge, offset } => {
                let e = self.edge(edge);
                ([(e.ends.0, offset), (e.ends.1, e.length - offset)], 2)
            }
        }
    }

    /// Planar coordinates of a point, when the graph carries geometry.
    pub fn embed(&self, p: &NetworkPoint<T>) -> Option<[T; 2]> {
        match *p {
            NetworkPoint::Vertex(v) => self.vertex(v).xy,
            NetworkPoint::Edge { edge, offset } => {
                let e = self.edge(edge);
                let frac = offset / e.length;
                if let Some(poly) = &e.polyline {
                    let arc = super::graph::polyline_length(poly);
                    let mut remaining = frac * arc;
                    for w in poly.windows(2) {
                        let seg = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
                        if remaining <= seg && seg > T::zero() {
                            let f = remaining / seg;
                            return Some([
                                w[0][0] + f * (w[1][0] - w[0][0]),
                                w[0][1] + f * (w[1][1] - w[0][1]),
                            ]);
                        }
                        remaining = remaining - seg;
                    }
                    poly.last().copied()
                } else {
                    let a = self.vertex(e.ends.0).xy?;
                    let b = self.vertex(e.ends.1).xy?;
                    Some([a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])])
                }
            }
        }
    }
}

/// A finite set of distinct network points, stored in canonical order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Configuration<T> {
    points: Vec<NetworkPoint<T>>,
}

impl<T: Scalar> Configuration<T> {
    pub fn empty() -> Self {
        Configuration { points: Vec::new() }
    }

    pub fn new(mut points: Vec<NetworkPoint<T>>) -> Result<Self, PointError> {
        points.sort_by(|a, b| a.total_cmp(b));
        if points
            .windows(2)
            .any(|w| w[0].total_cmp(&w[1]) == Ordering::Equal)
        {
            return Err(PointError::Duplicate);
        }
        Ok(Configuration { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[NetworkPoint<T>] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Option<&NetworkPoint<T>> {
        self.points.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NetworkPoint<T>> {
        self.points.iter()
    }

    pub fn index_of(&self, p: &NetworkPoint<T>) -> Option<usize> {
        self.points.binary_search_by(|q| q.total_cmp(p)).ok()
    }

    pub fn contains(&self, p: &NetworkPoint<T>) -> bool {
        self.index_of(p).is_some()
    }

    /// Adds `p`, returning the new configuration and the index `p` received.
    pub fn with_point(&self, p: NetworkPoint<T>) -> Result<(Self, usize), PointError> {
        match self.points.binary_search_by(|q| q.total_cmp(&p)) {
            Ok(_) => Err(PointError::Duplicate),
            Err(pos) => {
                let mut points = self.points.clone();
                points.insert(pos, p);
                Ok((Configuration { points }, pos))
            }
        }
    }

    pub fn without(&self, i: usize) -> Result<Self, PointError> {
        if i >= self.points.len() {
            return Err(PointError::BadIndex(i));
        }
        let mut points = self.points.clone();
        points.remove(i);
        Ok(Configuration { points })
    }

    /// Sub-configuration formed by the listed indices.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, PointError> {
        let pts = indices
            .iter()
            .map(|&i| self.points.get(i).copied().ok_or(PointError::BadIndex(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(pts)
    }

    /// Number of points lying in the interior of each edge.
    pub fn edge_counts(&self, edge_count: usize) -> Vec<usize> {
        let mut counts = vec![0; edge_count];
        for p in &self.points {
            if let NetworkPoint::Edge { edge, .. } = p {
                counts[edge.0] += 1;
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::GraphBuilder;

    fn segment() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge("e", "A", "B", 4.0)
            .build()
            .unwrap()
    }

    #[test]
    fn endpoints_canonicalize_to_vertices() {
        let g = segment();
        assert_eq!(
            g.point_on("e", 0.0).unwrap(),
            NetworkPoint::Vertex(VertexId(0))
        );
        assert_eq!(
            g.point_on("e", 4.0).unwrap(),
            NetworkPoint::Vertex(VertexId(1))
        );
        assert!(matches!(
            g.point_on("e", 2.0).unwrap(),
            NetworkPoint::Edge { .. }
        ));
        assert!(g.point_on("e", 4.5).is_err());
        assert!(g.point_on("nope", 1.0).is_err());
    }

    #[test]
    fn configuration_is_sorted_and_distinct() {
        let g = segment();
        let pts = vec![
            g.point_on("e", 3.0).unwrap(),
            g.vertex_point("B").unwrap(),
            g.point_on("e", 1.0).unwrap(),
        ];
        let x = Configuration::new(pts).unwrap();
        assert!(x.points()[0].is_vertex());
        assert_eq!(x.index_of(&g.point_on("e", 3.0).unwrap()), Some(2));
        let dup = Configuration::new(vec![g.point_on("e", 1.0).unwrap(); 2]);
        assert_eq!(dup, Err(PointError::Duplicate));
        let (y, at) = x.with_point(g.point_on("e", 2.0).unwrap()).unwrap();
        assert_eq!(at, 2);
        assert_eq!(y.len(), 4);
        assert_eq!(y.without(at).unwrap(), x);
    }
}
