use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::metric_graph::{
    configuration_docs, Configuration, GraphDoc, MetricGraph, NetworkPoint, PointDoc,
};
use crate::network_voronoi::{relation, voronoi_partition, Relation, RelationKind};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    C1,
    C2,
    Hereditary,
    CliqueBound,
    Midpoint,
    Trichotomy,
    Oracle,
    Distance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Violation,
    NearDegenerate,
    /// Instance does not satisfy the hypotheses of the check.
    Inadmissible,
}

/// Everything needed to replay an instance without the generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub graph: GraphDoc,
    pub z: Vec<PointDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<PointDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<PointDoc>,
    /// Offending subset, as indices into `z`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub condition: Condition,
    pub kind: Option<RelationKind>,
    pub verdict: Verdict,
    /// `(master seed, instance index)` for generated instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<(u64, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    pub details: String,
}

impl AuditReport {
    pub fn new(condition: Condition, kind: Option<RelationKind>, verdict: Verdict, details: impl Into<String>) -> Self {
        AuditReport {
            condition,
            kind,
            verdict,
            seed: None,
            instance: None,
            details: details.into(),
        }
    }

    pub fn is_violation(&self) -> bool {
        self.verdict == Verdict::Violation
    }

    pub fn with_seed(mut self, master: u64, index: u64) -> Self {
        self.seed = Some((master, index));
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub(crate) fn instance<T: Scalar>(
    g: &MetricGraph<T>,
    z: &Configuration<T>,
    u: Option<&NetworkPoint<T>>,
    v: Option<&NetworkPoint<T>>,
    y: Option<Vec<usize>>,
) -> Instance {
    Instance {
        graph: GraphDoc::from_graph(g),
        z: configuration_docs(g, z),
        u: u.map(|p| PointDoc::from_point(g, p)),
        v: v.map(|p| PointDoc::from_point(g, p)),
        y,
    }
}

/// Relation of `z ∪ extra` pulled back to the indices of `z`.
struct Pulled {
    rel: Relation,
    map: Vec<usize>,
}

impl Pulled {
    fn new<T: Scalar>(g: &MetricGraph<T>, z: &Configuration<T>, extra: &[NetworkPoint<T>], kind: RelationKind) -> (Self, Configuration<T>) {
        let mut pts = z.points().to_vec();
        pts.extend_from_slice(extra);
        let big = Configuration::new(pts).expect("extra points are new");
        let map = z.iter().map(|p| big.index_of(p).unwrap()).collect();
        (
            Pulled {
                rel: relation(g, &big, kind),
                map,
            },
            big,
        )
    }

    fn clique(&self, y: &[usize]) -> bool {
        y.iter()
            .enumerate()
            .all(|(a, &i)| y[a + 1..].iter().all(|&j| self.rel.related(self.map[i], self.map[j])))
    }

    fn related(&self, i: usize, j: usize) -> bool {
        self.rel.related(self.map[i], self.map[j])
    }
}

/// Visits every subset of `0..n` with at least two elements that is a clique
/// in at least one of `rels` (the others can never change the indicator).
/// Stops early when `visit` returns false.
fn for_each_candidate(n: usize, rels: &[&Pulled], visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn grow(
        n: usize,
        rels: &[&Pulled],
        y: &mut Vec<usize>,
        alive: Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let from = y.last().map_or(0, |&l| l + 1);
        for k in from..n {
            let next: Vec<bool> = rels
                .iter()
                .zip(&alive)
                .map(|(r, &a)| a && y.iter().all(|&i| r.related(i, k)))
                .collect();
            if !next.iter().any(|&a| a) {
                continue;
            }
            y.push(k);
            if y.len() >= 2 && !visit(y) {
                return false;
            }
            if !grow(n, rels, y, next, visit) {
                return false;
            }
            y.pop();
        }
        true
    }
    grow(n, rels, &mut Vec::new(), vec![true; rels.len()], visit);
}

/// Condition (C1) for one `(z, u)`: whenever adding `u` changes whether a
/// subset `y ⊆ z` is a clique, `y` must lie in the neighbourhood of `u`.
///
/// Every subset that is a clique with or without `u` is examined.
pub fn check_c1<T: Scalar>(
    g: &MetricGraph<T>,
    kind: RelationKind,
    z: &Configuration<T>,
    u: &NetworkPoint<T>,
) -> AuditReport {
    if z.contains(u) {
        return AuditReport::new(Condition::C1, Some(kind), Verdict::Inadmissible, "u is in z");
    }
    let (rz, _) = Pulled::new(g, z, &[], kind);
    let (rzu, zu) = Pulled::new(g, z, std::slice::from_ref(u), kind);
    let iu = zu.index_of(u).unwrap();
    let mut bad = None;
    let mut checked = 0usize;
    for_each_candidate(z.len(), &[&rz, &rzu], &mut |y| {
        checked += 1;
        if rz.clique(y) != rzu.clique(y) && !y.iter().all(|&i| rzu.rel.related(rzu.map[i], iu)) {
            bad = Some(y.to_vec());
            return false;
        }
        true
    });
    match bad {
        None => AuditReport::new(Condition::C1, Some(kind), Verdict::Pass, format!("{checked} subsets")),
        Some(y) => {
            let outside: Vec<usize> = y.iter().copied().filter(|&i| !rzu.rel.related(rzu.map[i], iu)).collect();
            let mut r = AuditReport::new(
                Condition::C1,
                Some(kind),
                Verdict::Violation,
                format!(
                    "clique(y|z)={} clique(y|z+u)={} but {:?} not neighbours of u",
                    rz.clique(&y) as u8,
                    rzu.clique(&y) as u8,
                    outside
                ),
            );
            r.instance = Some(instance(g, z, Some(u), None, Some(y)));
            r
        }
    }
}

/// Whether `u` and `v` are related in `z ∪ {u, v}`.
pub fn related_in_union<T: Scalar>(
    g: &MetricGraph<T>,
    kind: RelationKind,
    z: &Configuration<T>,
    u: &NetworkPoint<T>,
    v: &NetworkPoint<T>,
) -> bool {
    let mut pts = z.points().to_vec();
    pts.push(*u);
    pts.push(*v);
    let x = Configuration::new(pts).expect("distinct");
    relation(g, &x, kind).related(x.index_of(u).unwrap(), x.index_of(v).unwrap())
}

/// Condition (C2) for one `(z, u, v)` with `u`, `v` unrelated in
/// `z ∪ {u, v}`: `χ(y|z∪u) + χ(y|z∪v) = χ(y|z) + χ(y|z∪u∪v)` for all `y ⊆ z`.
pub fn check_c2<T: Scalar>(
    g: &MetricGraph<T>,
    kind: RelationKind,
    z: &Configuration<T>,
    u: &NetworkPoint<T>,
    v: &NetworkPoint<T>,
) -> AuditReport {
    if z.contains(u) || z.contains(v) || u == v {
        return AuditReport::new(Condition::C2, Some(kind), Verdict::Inadmissible, "u, v must be new and distinct");
    }
    let (rz, _) = Pulled::new(g, z, &[], kind);
    let (ru, _) = Pulled::new(g, z, std::slice::from_ref(u), kind);
    let (rv, _) = Pulled::new(g, z, std::slice::from_ref(v), kind);
    let (ruv, zuv) = Pulled::new(g, z, &[*u, *v], kind);
    if ruv.rel.related(zuv.index_of(u).unwrap(), zuv.index_of(v).unwrap()) {
        return AuditReport::new(Condition::C2, Some(kind), Verdict::Inadmissible, "u and v are related");
    }
    let mut bad = None;
    let mut checked = 0usize;
    for_each_candidate(z.len(), &[&rz, &ru, &rv, &ruv], &mut |y| {
        checked += 1;
        let c = [rz.clique(y), ru.clique(y), rv.clique(y), ruv.clique(y)].map(|b| b as u8);
        if c[1] + c[2] != c[0] + c[3] {
            bad = Some((y.to_vec(), c));
            return false;
        }
        true
    });
    match bad {
        None => AuditReport::new(Condition::C2, Some(kind), Verdict::Pass, format!("{checked} subsets")),
        Some((y, c)) => {
            let mut r = AuditReport::new(
                Condition::C2,
                Some(kind),
                Verdict::Violation,
                format!(
                    "clique(y|z+u) + clique(y|z+v) = {} + {} but clique(y|z) + clique(y|z+u+v) = {} + {}",
                    c[1], c[2], c[0], c[3]
                ),
            );
            r.instance = Some(instance(g, z, Some(u), Some(v), Some(y)));
            r
        }
    }
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, from: &[usize], p: f64) -> Vec<usize> {
    from.iter().copied().filter(|_| rng.random_bool(p)).collect()
}

/// Random chains `y ⊆ z ⊆ x`: a clique in `x` must stay a clique in `z`
/// (equivalently, a non-clique in `z` is a non-clique in `x`).
pub fn check_hereditary<T: Scalar, R: Rng + ?Sized>(
    g: &MetricGraph<T>,
    kind: RelationKind,
    x: &Configuration<T>,
    chains: usize,
    rng: &mut R,
) -> AuditReport {
    let rx = relation(g, x, kind);
    let pairs = rx.pairs();
    let all: Vec<usize> = (0..x.len()).collect();
    for _ in 0..chains {
        // bias y towards cliques of x so the implication is exercised
        let y: Vec<usize> = if !pairs.is_empty() && rng.random_bool(0.5) {
            let &(i, j) = pairs.choose(rng).unwrap();
            let mut y = vec![i, j];
            let common: Vec<usize> = all.iter().copied().filter(|&k| k != i && k != j && rx.related(i, k) && rx.related(j, k)).collect();
            if let Some(&k) = common.choose(rng) {
                y.push(k);
            }
            y.sort_unstable();
            y
        } else {
            let mut pool = all.clone();
            pool.shuffle(rng);
            pool.truncate(rng.random_range(0..=x.len().min(3)));
            pool.sort_unstable();
            pool
        };
        let rest: Vec<usize> = all.iter().copied().filter(|k| !y.contains(k)).collect();
        let mut zi = y.clone();
        zi.extend(random_subset(rng, &rest, 0.5));
        zi.sort_unstable();
        let z = x.subset(&zi).expect("valid indices");
        let rz = relation(g, &z, kind);
        let yz: Vec<usize> = y.iter().map(|&k| z.index_of(&x.points()[k]).unwrap()).collect();
        let in_x = rx.is_clique_unchecked(&y);
        let in_z = rz.is_clique_unchecked(&yz);
        if in_x && !in_z {
            let mut r = AuditReport::new(
                Condition::Hereditary,
                Some(kind),
                Verdict::Violation,
                format!("clique in x but not in z = {zi:?}"),
            );
            r.instance = Some(instance(g, x, None, None, Some(y)));
            return r;
        }
    }
    AuditReport::new(Condition::Hereditary, Some(kind), Verdict::Pass, format!("{chains} chains"))
}

/// On a tree in general position: `i ~ j` exactly when the path midpoint
/// lies in both closed cells. Returns the report and the number of pairs.
pub fn check_midpoint<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> (AuditReport, usize) {
    let mk = |verdict, details: String| AuditReport::new(Condition::Midpoint, Some(RelationKind::Delaunay), verdict, details);
    if x.len() < 2 {
        return (mk(Verdict::Pass, "no pairs".into()), 0);
    }
    let part = voronoi_partition(g, x).expect("nonempty");
    let r = relation(g, x, RelationKind::Delaunay);
    let pts = x.points();
    let mut n = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            n += 1;
            let m = g.midpoint_on_path(&pts[i], &pts[j]).expect("distinct");
            let both = part.cell_contains(&m, i) && part.cell_contains(&m, j);
            if both != r.related(i, j) {
                let mut rep = mk(Verdict::Violation, format!("pair ({i},{j}): related={} midpoint in both={both}", r.related(i, j)));
                rep.instance = Some(instance(g, x, None, None, Some(vec![i, j])));
                return (rep, n);
            }
        }
    }
    (mk(Verdict::Pass, format!("{n} pairs")), n)
}

/// Largest clique of the Delaunay relation must not exceed two.
pub fn check_clique_bound<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> AuditReport {
    let size = relation(g, x, RelationKind::Delaunay).max_clique_size();
    let verdict = if size <= 2 { Verdict::Pass } else { Verdict::Violation };
    let mut r = AuditReport::new(Condition::CliqueBound, Some(RelationKind::Delaunay), verdict, format!("max clique {size}"));
    if size > 2 {
        r.instance = Some(instance(g, x, None, None, None));
    }
    r
}

/// Shape of the three pairwise shortest paths between points of a tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Trichotomy {
    /// The middle point lies on the path between the other two.
    Path { middle: usize },
    /// Three arms of positive length meet at a vertex.
    Wheel { hub: crate::metric_graph::VertexId },
}

/// Classifies three distinct points of a tree; `None` if neither shape fits.
pub fn trichotomy<T: Scalar>(g: &MetricGraph<T>, p: [&NetworkPoint<T>; 3]) -> Option<Trichotomy> {
    let tol = g.eps() * T::lit(10.0);
    let path = |a: usize, b: usize| g.shortest_path(p[a], p[b]).expect("distinct points");
    let paths = [path(1, 2), path(0, 2), path(0, 1)];
    for (m, pm) in paths.iter().enumerate() {
        if pm.contains(g, p[m]) {
            let (a, b) = ((m + 1) % 3, (m + 2) % 3);
            let sum = paths[b].weight + paths[a].weight;
            if (sum - pm.weight).abs() <= tol {
                return Some(Trichotomy::Path { middle: m });
            }
        }
    }
    let sets: Vec<Vec<_>> = paths.iter().map(|q| q.interior_vertices(g)).collect();
    let common: Vec<_> = sets[0].iter().copied().filter(|v| sets[1].contains(v) && sets[2].contains(v)).collect();
    if let [hub] = common[..] {
        let h = NetworkPoint::Vertex(hub);
        let arms: Vec<T> = p.iter().map(|q| g.distance(&h, q).unwrap()).collect();
        let consistent = (0..3).all(|k| {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            (arms[a] + arms[b] - paths[k].weight).abs() <= tol
        });
        if consistent && arms.iter().all(|&d| d > tol) && g.degree(hub) >= 3 {
            return Some(Trichotomy::Wheel { hub });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::metric_graph::GraphBuilder;

    fn star() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("H", None)
            .vertex("S1", None)
            .vertex("S2", None)
            .vertex("S3", None)
            .edge("s1", "H", "S1", 1.0)
            .edge("s2", "H", "S2", 1.0)
            .edge("s3", "H", "S3", 1.0)
            .build()
            .unwrap()
    }

    fn config(g: &MetricGraph<f64>, pts: &[(&str, f64)]) -> Configuration<f64> {
        Configuration::new(pts.iter().map(|&(e, t)| g.point_on(e, t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn empty_z_passes_vacuously() {
        let g = star();
        let u = g.point_on("s1", 0.3).unwrap();
        let r = check_c1(&g, RelationKind::Delaunay, &Configuration::empty(), &u);
        assert_eq!(r.verdict, Verdict::Pass);
        let v = g.point_on("s2", 0.3).unwrap();
        // u and v are neighbours in {u, v}, so C2 does not apply
        let r = check_c2(&g, RelationKind::Delaunay, &Configuration::empty(), &u, &v);
        assert_eq!(r.verdict, Verdict::Inadmissible);
    }

    #[test]
    fn star_instances_pass() {
        let g = star();
        let z = config(&g, &[("s1", 0.2), ("s2", 0.5), ("s3", 0.9)]);
        for (e, t) in [("s1", 0.1), ("s2", 0.7), ("s3", 0.3), ("s1", 0.6)] {
            let u = g.point_on(e, t).unwrap();
            assert_eq!(check_c1(&g, RelationKind::Delaunay, &z, &u).verdict, Verdict::Pass);
        }
        let u = g.point_on("s2", 0.9).unwrap();
        let v = g.point_on("s3", 0.4).unwrap();
        assert!(!related_in_union(&g, RelationKind::Delaunay, &z, &u, &v));
        assert_eq!(check_c2(&g, RelationKind::Delaunay, &z, &u, &v).verdict, Verdict::Pass);
        assert_eq!(check_c1(&g, RelationKind::Delaunay, &z, &z.points()[0]).verdict, Verdict::Inadmissible);
    }

    #[test]
    fn hereditary_on_stars() {
        let g = star();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let single = config(&g, &[("s1", 0.5)]);
        assert_eq!(check_hereditary(&g, RelationKind::Delaunay, &single, 10, &mut rng).verdict, Verdict::Pass);
        // nested points along every spoke
        let x = config(&g, &[("s1", 0.1), ("s1", 0.4), ("s1", 0.8), ("s2", 0.15), ("s2", 0.5), ("s3", 0.3), ("s3", 0.95)]);
        for kind in [RelationKind::Delaunay, RelationKind::LocalDelaunay] {
            assert_eq!(check_hereditary(&g, kind, &x, 2000, &mut rng).verdict, Verdict::Pass);
        }
    }

    #[test]
    fn midpoints_and_cliques_on_star() {
        let g = star();
        let x = config(&g, &[("s1", 0.2), ("s2", 0.5), ("s3", 0.9)]);
        let (r, pairs) = check_midpoint(&g, &x);
        assert_eq!((r.verdict, pairs), (Verdict::Pass, 3));
        assert_eq!(check_clique_bound(&g, &x).verdict, Verdict::Pass);
    }

    #[test]
    fn trichotomy_shapes() {
        let g = star();
        let a = g.point_on("s1", 0.5).unwrap();
        let b = g.point_on("s2", 0.5).unwrap();
        let c = g.point_on("s3", 0.5).unwrap();
        let hub = g.find_vertex("H").unwrap();
        assert_eq!(trichotomy(&g, [&a, &b, &c]), Some(Trichotomy::Wheel { hub }));
        let d = g.point_on("s1", 0.9).unwrap();
        assert_eq!(trichotomy(&g, [&d, &a, &b]), Some(Trichotomy::Path { middle: 1 }));
        let h = NetworkPoint::Vertex(hub);
        assert_eq!(trichotomy(&g, [&a, &h, &b]), Some(Trichotomy::Path { middle: 1 }));
    }

    #[test]
    fn reports_serialize_as_one_line() {
        let r = AuditReport::new(Condition::C1, Some(RelationKind::Delaunay), Verdict::Pass, "ok").with_seed(7, 3);
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        assert!(line.contains("\"seed\":[7,3]"));
    }
}
