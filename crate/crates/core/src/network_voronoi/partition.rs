use thiserror::Error;

use super::relation::{Relation, RelationKind};
use crate::metric_graph::{crossing, Configuration, EdgeId, MetricGraph, NetworkPoint, PiecewiseLinearFn};
use crate::scalar::{cmp, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VoronoiError {
    #[error("Voronoi partition of an empty configuration")]
    EmptyConfiguration,
}

/// Open subinterval of an edge on which the set of nearest points is constant.
#[derive(Clone, Debug, PartialEq)]
pub struct CellPiece<T> {
    pub start: T,
    pub end: T,
    pub labels: Vec<usize>,
}

/// Nearest-point labels along one edge: breakpoints (including both
/// endpoints) interleaved with the open pieces between them.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCells<T> {
    pub edge: EdgeId,
    pub breakpoints: Vec<(T, Vec<usize>)>,
    pub pieces: Vec<CellPiece<T>>,
}

impl<T: Scalar> EdgeCells<T> {
    pub fn labels_at(&self, t: T, eps: T) -> &[usize] {
        if let Some((_, l)) = self.breakpoints.iter().find(|(b, _)| (*b - t).abs() <= eps) {
            return l;
        }
        self.pieces
            .iter()
            .find(|p| t > p.start && t < p.end)
            .map(|p| p.labels.as_slice())
            .unwrap_or(&[])
    }
}

/// Network Voronoi partition of a configuration. Cells are closed: a boundary
/// point carries every index attaining the minimum distance there.
#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiPartition<T> {
    pub edges: Vec<EdgeCells<T>>,
    pub vertices: Vec<Vec<usize>>,
    eps: T,
}

impl<T: Scalar> VoronoiPartition<T> {
    /// Indices whose closed cell contains `p`.
    pub fn labels_at(&self, p: &NetworkPoint<T>) -> &[usize] {
        match *p {
            NetworkPoint::Vertex(v) => &self.vertices[v.0],
            NetworkPoint::Edge { edge, offset } => self.edges[edge.0].labels_at(offset, self.eps),
        }
    }

    pub fn cell_contains(&self, p: &NetworkPoint<T>, i: usize) -> bool {
        self.labels_at(p).contains(&i)
    }

    /// Every label set appearing anywhere on the network.
    pub fn label_sets(&self) -> impl Iterator<Item = &[usize]> {
        self.vertices.iter().map(Vec::as_slice).chain(self.edges.iter().flat_map(|c| {
            c.breakpoints
                .iter()
                .map(|(_, l)| l.as_slice())
                .chain(c.pieces.iter().map(|p| p.labels.as_slice()))
        }))
    }

    /// A location in both closed cells, if the cells meet.
    pub fn common_point(&self, i: usize, j: usize) -> Option<NetworkPoint<T>> {
        let both = |l: &[usize]| l.contains(&i) && l.contains(&j);
        if let Some(v) = self.vertices.iter().position(|l| both(l)) {
            return Some(NetworkPoint::Vertex(crate::metric_graph::VertexId(v)));
        }
        for c in &self.edges {
            let last = c.breakpoints.len() - 1;
            for (t, l) in &c.breakpoints[1..last] {
                if both(l) {
                    return Some(NetworkPoint::Edge { edge: c.edge, offset: *t });
                }
            }
            for p in &c.pieces {
                if both(&p.labels) {
                    let mid = (p.start + p.end) / T::lit(2.0);
                    return Some(NetworkPoint::Edge { edge: c.edge, offset: mid });
                }
            }
        }
        None
    }
}

fn merge_labels(into: &mut Vec<usize>, from: &[usize]) {
    into.extend_from_slice(from);
    into.sort_unstable();
    into.dedup();
}

fn argmin_labels<T: Scalar>(values: &[T], labels: &[&[usize]], eps: T) -> Vec<usize> {
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let mut out = Vec::new();
    for (v, l) in values.iter().zip(labels) {
        if *v <= min + eps {
            merge_labels(&mut out, l);
        }
    }
    out
}

/// Exact lower envelope of labelled piecewise-linear functions on `[0, len]`,
/// reported as the label set attaining the minimum (within `eps`) at each
/// breakpoint and on each open piece in between.
fn labelled_envelope<T: Scalar>(
    candidates: &[(PiecewiseLinearFn<T>, &[usize])],
    eps: T,
) -> (Vec<(T, Vec<usize>)>, Vec<CellPiece<T>>) {
    let len = candidates[0].0.domain_len();
    let mut grid: Vec<T> = candidates
        .iter()
        .flat_map(|(f, _)| f.knots().iter().copied())
        .collect();
    grid.sort_by(cmp);
    grid.dedup();

    let labels: Vec<&[usize]> = candidates.iter().map(|(_, l)| *l).collect();
    let mut points = grid.clone();
    let mut va: Vec<T> = candidates.iter().map(|(f, _)| f.eval(grid[0])).collect();
    for w in grid.windows(2) {
        let vb: Vec<T> = candidates.iter().map(|(f, _)| f.eval(w[1])).collect();
        for i in 0..candidates.len() {
            for j in i + 1..candidates.len() {
                if let Some(f) = crossing(va[i] - va[j], vb[i] - vb[j]) {
                    let t = w[0] + f * (w[1] - w[0]);
                    if t > w[0] && t < w[1] {
                        points.push(t);
                    }
                }
            }
        }
        va = vb;
    }
    points.sort_by(cmp);
    let min_gap = T::lit(16.0) * T::epsilon() * len.max(T::one());
    points.dedup_by(|b, a| *b - *a <= min_gap);
    *points.last_mut().unwrap() = len;

    let eval_at = |t: T| -> Vec<usize> {
        let vals: Vec<T> = candidates.iter().map(|(f, _)| f.eval(t)).collect();
        argmin_labels(&vals, &labels, eps)
    };
    let bp_labels: Vec<Vec<usize>> = points.iter().map(|&t| eval_at(t)).collect();
    let piece_labels: Vec<Vec<usize>> = points
        .windows(2)
        .map(|w| eval_at((w[0] + w[1]) / T::lit(2.0)))
        .collect();

    // merge runs where nothing changes across a breakpoint
    let mut breakpoints = vec![(points[0], bp_labels[0].clone())];
    let mut pieces: Vec<CellPiece<T>> = Vec::new();
    for k in 0..piece_labels.len() {
        let end = points[k + 1];
        match pieces.last_mut() {
            Some(last)
                if last.labels == piece_labels[k]
                    && breakpoints.last().unwrap().1 == piece_labels[k]
                    && breakpoints.len() > 1 =>
            {
                breakpoints.pop();
                last.end = end;
            }
            _ => pieces.push(CellPiece {
                start: points[k],
                end,
                labels: piece_labels[k].clone(),
            }),
        }
        breakpoints.push((end, bp_labels[k + 1].clone()));
    }
    (breakpoints, pieces)
}

/// Distance from every vertex to every configuration point: `table[k][v]`.
pub(crate) fn vertex_table<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> Vec<Vec<T>> {
    x.iter().map(|p| g.vertex_distances_to(p)).collect()
}

/// Computes the network Voronoi partition of `x`.
///
/// On each edge only three kinds of candidate matter: the nearest points seen
/// through either endpoint (every other route through that endpoint is a
/// parallel translate lying above), and the points on the edge itself.
pub fn voronoi_partition<T: Scalar>(
    g: &MetricGraph<T>,
    x: &Configuration<T>,
) -> Result<VoronoiPartition<T>, VoronoiError> {
    if x.is_empty() {
        return Err(VoronoiError::EmptyConfiguration);
    }
    let eps = g.eps();
    let table = vertex_table(g, x);
    let vertices: Vec<(T, Vec<usize>)> = g
        .vertex_ids()
        .map(|v| {
            let vals: Vec<T> = table.iter().map(|row| row[v.0]).collect();
            let min = vals.iter().copied().fold(T::infinity(), T::min);
            let labels = (0..vals.len()).filter(|&k| vals[k] <= min + eps).collect();
            (min, labels)
        })
        .collect();

    let mut on_edge: Vec<Vec<(usize, T)>> = vec![Vec::new(); g.edge_count()];
    for (k, p) in x.iter().enumerate() {
        if let NetworkPoint::Edge { edge, offset } = *p {
            on_edge[edge.0].push((k, offset));
        }
    }

    let singles: Vec<[usize; 1]> = (0..x.len()).map(|k| [k]).collect();
    let edges = g
        .edge_ids()
        .map(|e| {
            let edge = g.edge(e);
            let len = edge.length;
            let (a, b) = (&vertices[edge.ends.0 .0], &vertices[edge.ends.1 .0]);
            let mut cands: Vec<(PiecewiseLinearFn<T>, &[usize])> = vec![
                (PiecewiseLinearFn::affine(len, a.0, T::one()), &a.1),
                (PiecewiseLinearFn::affine(len, len + b.0, -T::one()), &b.1),
            ];
            for &(k, s) in &on_edge[e.0] {
                cands.push((PiecewiseLinearFn::tent(len, s), &singles[k]));
            }
            let (mut breakpoints, pieces) = labelled_envelope(&cands, eps);
            breakpoints.first_mut().unwrap().1 = a.1.clone();
            breakpoints.last_mut().unwrap().1 = b.1.clone();
            EdgeCells {
                edge: e,
                breakpoints,
                pieces,
            }
        })
        .collect();

    Ok(VoronoiPartition {
        edges,
        vertices: vertices.into_iter().map(|(_, l)| l).collect(),
        eps,
    })
}

/// The Delaunay relation: two points are related iff their closed Voronoi
/// cells share at least one location.
pub fn delaunay_relation<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> Relation {
    let mut r = Relation::identity(RelationKind::Delaunay, x.len());
    if x.len() < 2 {
        return r;
    }
    let part = voronoi_partition(g, x).expect("nonempty");
    relation_from_partition(&part, &mut r);
    r
}

pub(crate) fn relation_from_partition<T: Scalar>(part: &VoronoiPartition<T>, r: &mut Relation) {
    for labels in part.label_sets() {
        for (a, &i) in labels.iter().enumerate() {
            for &j in &labels[a + 1..] {
                r.relate(i, j);
            }
        }
    }
}

/// Equidistant point certifying that two configuration points are neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub point: NetworkPoint<T>,
    pub distance: T,
}

/// A point equidistant to `x_i` and `x_j` with no configuration point closer,
/// or `None` when the two are not Delaunay neighbours.
///
/// The path midpoint is preferred when it qualifies, which on trees in
/// general position it always does for neighbours.
pub fn neighbor_witness<T: Scalar>(
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    i: usize,
    j: usize,
) -> Option<Witness<T>> {
    if i == j || i >= x.len() || j >= x.len() {
        return None;
    }
    let part = voronoi_partition(g, x).ok()?;
    let (pi, pj) = (x.points()[i], x.points()[j]);
    let mid = g.midpoint_on_path(&pi, &pj).ok()?;
    let point = if part.cell_contains(&mid, i) && part.cell_contains(&mid, j) {
        mid
    } else {
        part.common_point(i, j)?
    };
    Some(Witness {
        point,
        distance: g.distance_unchecked(&point, &pi),
    })
}
