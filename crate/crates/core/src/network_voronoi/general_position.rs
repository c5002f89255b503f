use crate::metric_graph::{Configuration, MetricGraph, NetworkPoint, PiecewiseLinearFn};
use crate::scalar::{cmp, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum GeneralPosition<T> {
    Holds,
    /// Three points at equal distance `radius` (within tolerance) from `centre`.
    Violated {
        triple: [usize; 3],
        centre: NetworkPoint<T>,
        radius: T,
    },
}

impl<T> GeneralPosition<T> {
    pub fn holds(&self) -> bool {
        matches!(self, GeneralPosition::Holds)
    }
}

/// Decides whether some ball boundary carries three configuration points.
///
/// Every distance profile is linear with slope ±1 between consecutive knots
/// of the merged knot set, so three profiles can agree at a point only if two
/// of them coincide as lines there; the third is then either the same line
/// or crosses it.
pub fn in_general_position<T: Scalar>(
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    eps: T,
) -> GeneralPosition<T> {
    if x.len() < 3 {
        return GeneralPosition::Holds;
    }
    for e in g.edge_ids() {
        let profiles: Vec<PiecewiseLinearFn<T>> = x
            .iter()
            .map(|p| g.distance_profile(e, p).expect("point on graph"))
            .collect();
        let mut grid: Vec<T> = profiles.iter().flat_map(|f| f.knots().iter().copied()).collect();
        grid.sort_by(cmp);
        grid.dedup();
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= T::epsilon() {
                continue;
            }
            if let Some((triple, t, r)) = interval_triple(&profiles, a, b, eps) {
                let centre = g.edge_point(e, t).expect("offset within edge");
                return GeneralPosition::Violated {
                    triple,
                    centre,
                    radius: r,
                };
            }
        }
    }
    GeneralPosition::Holds
}

/// Lines `slope·t + intercept` of each profile over `(a, b)`.
fn interval_triple<T: Scalar>(
    profiles: &[PiecewiseLinearFn<T>],
    a: T,
    b: T,
    eps: T,
) -> Option<([usize; 3], T, T)> {
    let mid = (a + b) / T::lit(2.0);
    let lines: Vec<(bool, T, usize)> = profiles
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let rising = f.eval(b) > f.eval(a);
            let slope = if rising { T::one() } else { -T::one() };
            (rising, f.eval(mid) - slope * mid, k)
        })
        .collect();

    for rising in [true, false] {
        let slope = if rising { T::one() } else { -T::one() };
        let mut same: Vec<(T, usize)> = lines
            .iter()
            .filter(|l| l.0 == rising)
            .map(|l| (l.1, l.2))
            .collect();
        same.sort_by(|p, q| cmp(&p.0, &q.0));
        let mut start = 0;
        while start < same.len() {
            let mut end = start + 1;
            while end < same.len() && same[end].0 - same[start].0 <= eps {
                end += 1;
            }
            let cluster = &same[start..end];
            if cluster.len() >= 3 {
                let mut triple = [cluster[0].1, cluster[1].1, cluster[2].1];
                triple.sort_unstable();
                return Some((triple, mid, slope * mid + cluster[0].0));
            }
            if cluster.len() == 2 {
                let c = cluster[0].0;
                for &(r2, c2, k) in &lines {
                    if r2 == rising {
                        continue;
                    }
                    // slope·t + c = −slope·t + c2
                    let t = (c2 - c) / (T::lit(2.0) * slope);
                    if t >= a - eps && t <= b + eps {
                        let t = t.max(a).min(b);
                        let mut triple = [cluster[0].1, cluster[1].1, k];
                        triple.sort_unstable();
                        return Some((triple, t, slope * t + c));
                    }
                }
            }
            start = end;
        }
    }
    None
}
