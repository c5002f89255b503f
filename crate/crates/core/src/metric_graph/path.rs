use super::graph::{EdgeId, MetricGraph, VertexId};
use super::point::{NetworkPoint, PointError};
use crate::scalar::Scalar;

/// A traversal of part of one edge, `from` and `to` being offsets from the
/// edge's first endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub edge: EdgeId,
    pub from: T,
    pub to: T,
}

impl<T: Scalar> Segment<T> {
    pub fn length(&self) -> T {
        (self.to - self.from).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    pub start: NetworkPoint<T>,
    pub end: NetworkPoint<T>,
    pub segments: Vec<Segment<T>>,
    pub weight: T,
}

impl<T: Scalar> Path<T> {
    /// Vertices passed strictly between the two ends.
    pub fn interior_vertices(&self, g: &MetricGraph<T>) -> Vec<VertexId> {
        let mut out = Vec::new();
        for s in self.segments.iter().take(self.segments.len().saturating_sub(1)) {
            let e = g.edge(s.edge);
            out.push(if s.to == T::zero() { e.ends.0 } else { e.ends.1 });
        }
        out
    }

    /// Whether `p` lies on the path (within the graph tolerance).
    pub fn contains(&self, g: &MetricGraph<T>, p: &NetworkPoint<T>) -> bool {
        if *p == self.start || *p == self.end {
            return true;
        }
        let eps = g.eps();
        match *p {
            NetworkPoint::Vertex(v) => self.interior_vertices(g).contains(&v),
            NetworkPoint::Edge { edge, offset } => self.segments.iter().any(|s| {
                s.edge == edge
                    && offset >= s.from.min(s.to) - eps
                    && offset <= s.from.max(s.to) + eps
            }),
        }
    }

    /// The point at travel distance `s` from the start.
    pub fn point_at(&self, g: &MetricGraph<T>, s: T) -> NetworkPoint<T> {
        let mut remaining = s;
        for seg in &self.segments {
            let len = seg.length();
            if remaining <= len {
                let dir = if seg.to >= seg.from { T::one() } else { -T::one() };
                let offset = (seg.from + dir * remaining)
                    .max(T::zero())
                    .min(g.edge(seg.edge).length);
                return g.edge_point(seg.edge, offset).expect("offset clamped to edge");
            }
            remaining = remaining - len;
        }
        self.end
    }
}

enum Route {
    Direct,
    Via { exit: VertexId, entry: VertexId },
}

impl<T: Scalar> MetricGraph<T> {
    fn best_route(&self, p: &NetworkPoint<T>, q: &NetworkPoint<T>) -> (T, Route) {
        let mut best = (T::infinity(), Route::Direct);
        if let (
            NetworkPoint::Edge { edge: e, offset: s },
            NetworkPoint::Edge { edge: f, offset: t },
        ) = (p, q)
        {
            if e == f {
                best.0 = (*s - *t).abs();
            }
        }
        let (pe, np) = self.exits(p);
        let (qe, nq) = self.exits(q);
        for &(a, da) in &pe[..np] {
            for &(b, db) in &qe[..nq] {
                let w = da + self.vertex_distance(a, b) + db;
                if w < best.0 {
                    best = (
                        w,
                        Route::Via {
                            exit: a,
                            entry: b,
                        },
                    );
                }
            }
        }
        best
    }

    /// Shortest-path distance between two network points.
    pub fn distance(&self, p: &NetworkPoint<T>, q: &NetworkPoint<T>) -> Result<T, PointError> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &NetworkPoint<T>, q: &NetworkPoint<T>) -> T {
        if p == q {
            return T::zero();
        }
        // fixed argument order keeps the result exactly symmetric
        if p.total_cmp(q) == std::cmp::Ordering::Greater {
            self.best_route(q, p).0
        } else {
            self.best_route(p, q).0
        }
    }

    /// Distance from every vertex to `p`.
    pub(crate) fn vertex_distances_to(&self, p: &NetworkPoint<T>) -> Vec<T> {
        let (exits, n) = self.exits(p);
        self.vertex_ids()
            .map(|v| {
                exits[..n]
                    .iter()
                    .map(|&(a, da)| da + self.vertex_distance(v, a))
                    .fold(T::infinity(), T::min)
            })
            .collect()
    }

    /// A path realizing [`MetricGraph::distance`]; it never revisits an edge
    /// segment or a vertex.
    pub fn shortest_path(
        &self,
        p: &NetworkPoint<T>,
        q: &NetworkPoint<T>,
    ) -> Result<Path<T>, PointError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let mut segments = Vec::new();
        if p == q {
            return Ok(Path {
                start: *p,
                end: *q,
                segments,
                weight: T::zero(),
            });
        }
        let (weight, route) = self.best_route(p, q);
        match route {
            Route::Direct => {
                if let (
                    NetworkPoint::Edge { edge, offset: s },
                    NetworkPoint::Edge { offset: t, .. },
                ) = (p, q)
                {
                    segments.push(Segment {
                        edge: *edge,
                        from: *s,
                        to: *t,
                    });
                }
            }
            Route::Via { exit, entry, .. } => {
                if let NetworkPoint::Edge { edge, offset } = *p {
                    let e = self.edge(edge);
                    let to = if exit == e.ends.0 { T::zero() } else { e.length };
                    segments.push(Segment {
                        edge,
                        from: offset,
                        to,
                    });
                }
                let mut cur = exit;
                for e in self.vertex_route(exit, entry) {
                    let edge = self.edge(e);
                    let (from, to) = if edge.ends.0 == cur {
                        (T::zero(), edge.length)
                    } else {
                        (edge.length, T::zero())
                    };
                    segments.push(Segment { edge: e, from, to });
                    cur = edge.other_end(cur).unwrap();
                }
                if let NetworkPoint::Edge { edge, offset } = *q {
                    let e = self.edge(edge);
                    let from = if entry == e.ends.0 { T::zero() } else { e.length };
                    segments.push(Segment {
                        edge,
                        from,
                        to: offset,
                    });
                }
            }
        }
        Ok(Path {
            start: *p,
            end: *q,
            segments,
            weight,
        })
    }

    /// The point halfway along [`MetricGraph::shortest_path`] from `p` to `q`.
    /// On trees this is the unique metric midpoint.
    pub fn midpoint_on_path(
        &self,
        p: &NetworkPoint<T>,
        q: &NetworkPoint<T>,
    ) -> Result<NetworkPoint<T>, MidpointError> {
        if p == q {
            return Err(MidpointError::SamePoint);
        }
        let path = self.shortest_path(p, q)?;
        Ok(path.point_at(self, path.weight / T::lit(2.0)))
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MidpointError {
    #[error("midpoint requires two distinct points")]
    SamePoint,
    #[error(transparent)]
    Point(#[from] PointError),
}
