use serde::Serialize;

use super::audit::{check_c1, check_c2, related_in_union, AuditReport};
use crate::metric_graph::{Configuration, GraphBuilder, MetricGraph, NetworkPoint};
use crate::network_voronoi::{relation, RelationKind};
use crate::scalar::Scalar;

/// Triangle on `(−1, 0)`, `(1, 0)`, `(0, 1)` with straight edges.
pub fn triangle_graph<T: Scalar>() -> MetricGraph<T> {
    let p = |x: f64, y: f64| [T::lit(x), T::lit(y)];
    GraphBuilder::new()
        .vertex("L", Some(p(-1.0, 0.0)))
        .vertex("R", Some(p(1.0, 0.0)))
        .vertex("T", Some(p(0.0, 1.0)))
        .edge_with_polyline("bottom", "L", "R", vec![p(-1.0, 0.0), p(1.0, 0.0)], None)
        .edge_with_polyline("right", "R", "T", vec![p(1.0, 0.0), p(0.0, 1.0)], None)
        .edge_with_polyline("left", "L", "T", vec![p(-1.0, 0.0), p(0.0, 1.0)], None)
        .build()
        .expect("triangle is valid")
}

/// One point at the midpoint of every side.
pub fn triangle_midpoints<T: Scalar>(g: &MetricGraph<T>) -> Configuration<T> {
    Configuration::new(
        g.edge_ids()
            .map(|e| g.edge_point(e, g.edge(e).length / T::lit(2.0)).unwrap())
            .collect(),
    )
    .unwrap()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleReproduction {
    /// The midpoints form a clique of the Delaunay relation.
    pub clique_before: bool,
    pub c1: AuditReport,
    pub c2: AuditReport,
    /// The same `(z, u)` and `(z, u, v)` under the local relation.
    pub local_c1: AuditReport,
    pub local_c2: AuditReport,
}

impl TriangleReproduction {
    /// The midpoints start as a clique and both global checks fail.
    pub fn reproduced(&self) -> bool {
        self.clique_before && self.c1.is_violation() && self.c2.is_violation()
    }

    pub fn local_clean(&self) -> bool {
        !self.local_c1.is_violation() && !self.local_c2.is_violation()
    }
}

fn candidates<T: Scalar>(g: &MetricGraph<T>, z: &Configuration<T>) -> Vec<NetworkPoint<T>> {
    let steps = 40;
    g.edge_ids()
        .flat_map(|e| {
            let len = g.edge(e).length;
            (1..steps).map(move |k| (e, len * T::lit(k as f64 / steps as f64)))
        })
        .map(|(e, t)| g.edge_point(e, t).unwrap())
        .filter(|p| !z.contains(p))
        .collect()
}

/// Searches a fixed grid of positions for the first `u` breaking (C1) and the
/// first `v` completing a (C2) failure, both for the global Delaunay relation.
pub fn reproduce_triangle_counterexample<T: Scalar>() -> TriangleReproduction {
    let g = triangle_graph::<T>();
    let z = triangle_midpoints(&g);
    let clique_before = relation(&g, &z, RelationKind::Delaunay).max_clique_size() == 3;
    let cand = candidates(&g, &z);
    let kind = RelationKind::Delaunay;

    let mut c1 = None;
    for u in &cand {
        let r = check_c1(&g, kind, &z, u);
        if r.is_violation() {
            c1 = Some((*u, r));
            break;
        }
    }
    let (u, c1) = c1.unwrap_or_else(|| (cand[0], check_c1(&g, kind, &z, &cand[0])));

    let mut c2 = None;
    for v in &cand {
        if *v == u || related_in_union(&g, kind, &z, &u, v) {
            continue;
        }
        let r = check_c2(&g, kind, &z, &u, v);
        if r.is_violation() {
            c2 = Some((*v, r));
            break;
        }
    }
    let (v, c2) = c2.unwrap_or_else(|| {
        let v = *cand.iter().rev().find(|&&v| v != u).unwrap();
        (v, check_c2(&g, kind, &z, &u, &v))
    });

    let local = RelationKind::LocalDelaunay;
    TriangleReproduction {
        clique_before,
        c1,
        c2,
        local_c1: check_c1(&g, local, &z, &u),
        local_c2: check_c2(&g, local, &z, &u, &v),
    }
}
