use thiserror::Error;

use crate::metric_graph::{
    Configuration, EdgeId, GraphBuilder, MetricGraph, NetworkPoint, PointError, Support,
};
use crate::network_voronoi::{delaunay_relation, edge_adjacency, Relation, RelationKind};
use crate::scalar::{cmp, Scalar};

pub const MAX_BRUTE_FORCE_EDGES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("graph has {0} edges; exhaustive enumeration is limited to {MAX_BRUTE_FORCE_EDGES}")]
    TooLarge(usize),
    #[error(transparent)]
    Point(#[from] PointError),
}

/// Vertices plus one extra node per interior query point, with every edge
/// cut at the query points it carries.
struct SplitGraph<T> {
    adj: Vec<Vec<(usize, T)>>,
    start: usize,
    target: usize,
}

fn split_graph<T: Scalar>(g: &MetricGraph<T>, p: &NetworkPoint<T>, q: &NetworkPoint<T>) -> SplitGraph<T> {
    let nv = g.vertex_count();
    let mut adj: Vec<Vec<(usize, T)>> = vec![Vec::new(); nv + 2];
    let node = |pt: &NetworkPoint<T>, extra: usize| match *pt {
        NetworkPoint::Vertex(v) => v.0,
        NetworkPoint::Edge { .. } => extra,
    };
    let (start, target) = (node(p, nv), node(q, nv + 1));
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let mut cuts: Vec<(T, usize)> = vec![(T::zero(), edge.ends.0 .0), (edge.length, edge.ends.1 .0)];
        for (pt, id) in [(p, nv), (q, nv + 1)] {
            if let NetworkPoint::Edge { edge: pe, offset } = *pt {
                if pe == e {
                    cuts.push((offset, id));
                }
            }
        }
        cuts.sort_by(|a, b| cmp(&a.0, &b.0));
        for w in cuts.windows(2) {
            let len = w[1].0 - w[0].0;
            adj[w[0].1].push((w[1].1, len));
            adj[w[1].1].push((w[0].1, len));
        }
    }
    SplitGraph { adj, start, target }
}

/// Minimum weight and number of simple paths between two points, by
/// exhaustive depth-first enumeration.
pub fn brute_force_paths<T: Scalar>(
    g: &MetricGraph<T>,
    p: &NetworkPoint<T>,
    q: &NetworkPoint<T>,
) -> Result<(T, usize), OracleError> {
    if g.edge_count() > MAX_BRUTE_FORCE_EDGES {
        return Err(OracleError::TooLarge(g.edge_count()));
    }
    g.check_point(p)?;
    g.check_point(q)?;
    if p == q {
        return Ok((T::zero(), 1));
    }
    let sg = split_graph(g, p, q);
    let mut visited = vec![false; sg.adj.len()];
    let mut best = T::infinity();
    let mut count = 0;
    fn dfs<T: Scalar>(
        sg: &SplitGraph<T>,
        at: usize,
        weight: T,
        visited: &mut [bool],
        best: &mut T,
        count: &mut usize,
    ) {
        if at == sg.target {
            *count += 1;
            *best = best.min(weight);
            return;
        }
        visited[at] = true;
        for &(next, len) in &sg.adj[at] {
            if !visited[next] {
                dfs(sg, next, weight + len, visited, best, count);
            }
        }
        visited[at] = false;
    }
    dfs(&sg, sg.start, T::zero(), &mut visited, &mut best, &mut count);
    Ok((best, count))
}

pub fn brute_force_distance<T: Scalar>(
    g: &MetricGraph<T>,
    p: &NetworkPoint<T>,
    q: &NetworkPoint<T>,
) -> Result<T, OracleError> {
    Ok(brute_force_paths(g, p, q)?.0)
}

/// Grid nodes of spacing at most `h` on every edge, endpoints included.
fn grid_points<T: Scalar>(g: &MetricGraph<T>, h: T) -> Vec<NetworkPoint<T>> {
    let mut out: Vec<NetworkPoint<T>> = g.vertex_ids().map(NetworkPoint::Vertex).collect();
    for e in g.edge_ids() {
        let len = g.edge(e).length;
        let m = (len / h).ceil().to_usize().unwrap_or(1).max(1);
        for k in 1..m {
            let t = len * T::lit(k as f64) / T::lit(m as f64);
            out.push(NetworkPoint::Edge { edge: e, offset: t });
        }
    }
    out
}

/// Delaunay relation from label sets on a grid of spacing `h`.
///
/// A grid node carries every index within `h` of its minimum distance: the
/// nearest node to a cell boundary lies within `h/2` of it, and distances
/// change at unit rate.
pub fn grid_voronoi_oracle<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>, h: T) -> Relation {
    let mut r = Relation::identity(RelationKind::Delaunay, x.len());
    if x.len() < 2 {
        return r;
    }
    let mut labels = Vec::with_capacity(x.len());
    for node in grid_points(g, h) {
        let d: Vec<T> = x.iter().map(|p| g.distance(&node, p).expect("valid")).collect();
        let min = d.iter().copied().fold(T::infinity(), T::min);
        labels.clear();
        labels.extend((0..d.len()).filter(|&k| d[k] <= min + h));
        for (a, &i) in labels.iter().enumerate() {
            for &j in &labels[a + 1..] {
                r.relate(i, j);
            }
        }
    }
    r
}

/// `min over L of max(d_i, d_j) − min_k d_k`: zero exactly when the closed
/// cells of `x_i` and `x_j` meet, and otherwise the margin by which they miss.
pub fn witness_gap<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>, i: usize, j: usize) -> T {
    let mut best = T::infinity();
    for e in g.edge_ids() {
        let f: Vec<_> = x.iter().map(|p| g.distance_profile(e, p).expect("valid")).collect();
        let mut ts: Vec<T> = f.iter().flat_map(|p| p.knots().iter().copied()).collect();
        ts.sort_by(cmp);
        ts.dedup();
        let mut cand = ts.clone();
        for w in ts.windows(2) {
            let (a, b) = (w[0], w[1]);
            for k in 0..f.len() {
                for l in k + 1..f.len() {
                    let da = f[k].eval(a) - f[l].eval(a);
                    let db = f[k].eval(b) - f[l].eval(b);
                    if (da < T::zero()) != (db < T::zero()) && da != db {
                        cand.push(a + (b - a) * da / (da - db));
                    }
                }
            }
        }
        for t in cand {
            let vals: Vec<T> = f.iter().map(|p| p.eval(t)).collect();
            let env = vals.iter().copied().fold(T::infinity(), T::min);
            best = best.min(vals[i].max(vals[j]) - env);
        }
    }
    best.max(T::zero())
}

/// The local Delaunay relation evaluated literally: for each pair, build the
/// one- or two-edge sub-network the case split prescribes, restrict the
/// configuration to it and ask the Delaunay relation there.
pub fn local_delaunay_by_restriction<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> Relation {
    let adj = edge_adjacency(g);
    let mut r = Relation::identity(RelationKind::LocalDelaunay, x.len());
    let pts = x.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[i].support(), pts[j].support());
            if !adj.related(a, b) {
                continue;
            }
            let edges: Vec<EdgeId> = match (a, b) {
                (Support::Edge(e), Support::Edge(f)) if e == f => vec![e],
                (Support::Edge(e), Support::Edge(f)) => vec![e, f],
                (Support::Edge(e), Support::Vertex(_)) | (Support::Vertex(_), Support::Edge(e)) => vec![e],
                (Support::Vertex(v), Support::Vertex(w)) => vec![g.edge_between(v, w).expect("adjacent")],
            };
            if restricted_related(g, x, &edges, i, j) {
                r.relate(i, j);
            }
        }
    }
    r
}

fn restricted_related<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>, edges: &[EdgeId], i: usize, j: usize) -> bool {
    let mut b = GraphBuilder::new();
    let mut verts = Vec::new();
    for &e in edges {
        let (u, v) = g.edge(e).ends;
        for w in [u, v] {
            if !verts.contains(&w) {
                verts.push(w);
                b = b.vertex(g.vertex(w).label.clone(), None);
            }
        }
    }
    for &e in edges {
        let edge = g.edge(e);
        b = b.edge(
            edge.label.clone(),
            g.vertex(edge.ends.0).label.clone(),
            g.vertex(edge.ends.1).label.clone(),
            edge.length,
        );
    }
    let sub = b.build().expect("sub-network is valid");
    let map = |p: &NetworkPoint<T>| -> Option<NetworkPoint<T>> {
        match *p {
            NetworkPoint::Vertex(v) if verts.contains(&v) => sub.vertex_point(&g.vertex(v).label).ok(),
            NetworkPoint::Edge { edge, offset } if edges.contains(&edge) => {
                sub.point_on(&g.edge(edge).label, offset).ok()
            }
            _ => None,
        }
    };
    let mut kept = Vec::new();
    let mut si = None;
    let mut sj = None;
    for (k, p) in x.iter().enumerate() {
        if let Some(q) = map(p) {
            if k == i {
                si = Some(q);
            }
            if k == j {
                sj = Some(q);
            }
            kept.push(q);
        }
    }
    let y = Configuration::new(kept).expect("distinct");
    let (si, sj) = (si.expect("kept"), sj.expect("kept"));
    let r = delaunay_relation(&sub, &y);
    r.related(y.index_of(&si).unwrap(), y.index_of(&sj).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn detour() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("ab", "A", "B", 10.0)
            .edge("ac", "A", "C", 1.0)
            .edge("cb", "C", "B", 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn detour_by_enumeration() {
        let g = detour();
        let p = g.point_on("ab", 1.0).unwrap();
        let q = g.point_on("ab", 9.0).unwrap();
        let (d, n) = brute_force_paths(&g, &p, &q).unwrap();
        assert_eq!(d, 4.0);
        // direct, and around through C
        assert_eq!(n, 2);
        assert_eq!(brute_force_distance(&g, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn path_graph_pair() {
        let g = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("ab", "A", "B", 1.0)
            .edge("bc", "B", "C", 1.0)
            .build()
            .unwrap();
        let p = g.point_on("ab", 0.3).unwrap();
        let q = g.point_on("bc", 0.4).unwrap();
        let (d, n) = brute_force_paths(&g, &p, &q).unwrap();
        assert!((d - 1.1).abs() < 1e-12);
        assert_eq!(n, 1);
    }

    #[test]
    fn size_limit() {
        let mut b = GraphBuilder::<f64>::new();
        for v in 0..14 {
            b = b.vertex(format!("v{v}"), None);
        }
        for v in 0..13 {
            b = b.edge(format!("e{v}"), format!("v{v}"), format!("v{}", v + 1), 1.0);
        }
        let g = b.build().unwrap();
        let p = g.vertex_point("v0").unwrap();
        assert_eq!(brute_force_distance(&g, &p, &p), Err(OracleError::TooLarge(13)));
    }

    fn segment_config(ts: &[f64]) -> (MetricGraph<f64>, Configuration<f64>) {
        let g = GraphBuilder::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge("e", "A", "B", 4.0)
            .build()
            .unwrap();
        let x = Configuration::new(ts.iter().map(|&t| g.point_on("e", t).unwrap()).collect()).unwrap();
        (g, x)
    }

    #[test]
    fn grid_oracle_examples() {
        let (g, x) = segment_config(&[1.0, 2.0, 3.0]);
        assert_eq!(grid_voronoi_oracle(&g, &x, 1e-3).pairs(), vec![(0, 1), (1, 2)]);
        let (g, x) = segment_config(&[1.0]);
        assert!(grid_voronoi_oracle(&g, &x, 1e-3).pairs().is_empty());
    }

    #[test]
    fn gaps() {
        let (g, x) = segment_config(&[1.0, 2.0, 3.0]);
        assert_eq!(witness_gap(&g, &x, 0, 1), 0.0);
        // best spot is 2.0 itself: max(1, 1) - 0
        assert!((witness_gap(&g, &x, 0, 2) - 1.0).abs() < 1e-12);
    }
}
