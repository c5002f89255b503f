use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::audit::{
    check_c1, check_c2, check_clique_bound, check_hereditary, check_midpoint, instance, related_in_union,
    trichotomy, AuditReport, Condition, Verdict,
};
use super::generators::{random_graph, random_tree};
use super::oracles::{brute_force_paths, grid_voronoi_oracle, witness_gap};
use crate::metric_graph::{Configuration, MetricGraph, NetworkPoint};
use crate::network_voronoi::{delaunay_relation, in_general_position, RelationKind};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    Trees,
    /// Trees plus at least one chord.
    Cyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuditSettings {
    pub instances: usize,
    pub master_seed: u64,
    pub kind: RelationKind,
    pub family: GraphFamily,
    /// Inclusive range of vertex counts.
    pub vertices: (usize, usize),
    pub max_extra_edges: usize,
    pub lengths: (f64, f64),
    /// Intensity of the Poisson configurations.
    pub rate: f64,
    /// Redraws allowed per instance before giving up on its hypotheses.
    pub max_resample: usize,
}

impl AuditSettings {
    pub fn trees(instances: usize, master_seed: u64) -> Self {
        AuditSettings {
            instances,
            master_seed,
            kind: RelationKind::Delaunay,
            family: GraphFamily::Trees,
            vertices: (3, 8),
            max_extra_edges: 0,
            lengths: (0.5, 2.0),
            rate: 1.0,
            max_resample: 100,
        }
    }

    pub fn cyclic(instances: usize, master_seed: u64) -> Self {
        AuditSettings {
            kind: RelationKind::LocalDelaunay,
            family: GraphFamily::Cyclic,
            max_extra_edges: 3,
            ..Self::trees(instances, master_seed)
        }
    }

    pub fn with_kind(mut self, kind: RelationKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub condition: Condition,
    pub kind: RelationKind,
    pub instances: usize,
    /// Atomic checks performed (instances, pairs or chains).
    pub checks: usize,
    pub violations: usize,
    pub near_degenerate: usize,
    pub resampled: usize,
    pub reports: Vec<AuditReport>,
}

impl AuditSummary {
    fn collect(condition: Condition, kind: RelationKind, results: Vec<Outcome>) -> Self {
        let mut s = AuditSummary {
            condition,
            kind,
            instances: results.len(),
            checks: 0,
            violations: 0,
            near_degenerate: 0,
            resampled: 0,
            reports: Vec::with_capacity(results.len()),
        };
        for o in results {
            s.checks += o.checks;
            s.near_degenerate += o.near_degenerate;
            s.resampled += o.resampled;
            if o.report.is_violation() {
                s.violations += 1;
            }
            s.reports.push(o.report);
        }
        s
    }

    pub fn first_violation(&self) -> Option<&AuditReport> {
        self.reports.iter().find(|r| r.is_violation())
    }

    pub fn near_degenerate_fraction(&self) -> f64 {
        self.near_degenerate as f64 / self.checks.max(1) as f64
    }

    /// Reports as newline-delimited JSON.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&r.to_json_line());
            out.push('\n');
        }
        out
    }
}

struct Outcome {
    report: AuditReport,
    checks: usize,
    near_degenerate: usize,
    resampled: usize,
}

impl Outcome {
    fn one(report: AuditReport, resampled: usize) -> Self {
        Outcome {
            report,
            checks: 1,
            near_degenerate: 0,
            resampled,
        }
    }
}

/// Independent random source of instance `index`: one ChaCha stream per
/// instance under the master seed.
pub fn instance_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

pub fn draw_graph<T: Scalar>(s: &AuditSettings, rng: &mut ChaCha8Rng) -> MetricGraph<T> {
    let n = rng.random_range(s.vertices.0..=s.vertices.1);
    match s.family {
        GraphFamily::Trees => random_tree(rng, n, s.lengths).expect("valid settings"),
        GraphFamily::Cyclic => {
            let free = n * (n - 1) / 2 - (n - 1);
            let extra = rng.random_range(1..=s.max_extra_edges.min(free).max(1));
            random_graph(rng, n, extra, s.lengths).expect("valid settings")
        }
    }
}

fn draw_config<T: Scalar>(g: &MetricGraph<T>, s: &AuditSettings, rng: &mut ChaCha8Rng) -> Configuration<T> {
    g.sample_poisson(T::lit(s.rate), rng).expect("nonnegative rate")
}

fn general<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> bool {
    in_general_position(g, x, g.eps()).holds()
}

fn union<T: Scalar>(z: &Configuration<T>, extra: &[NetworkPoint<T>]) -> Configuration<T> {
    let mut pts = z.points().to_vec();
    pts.extend_from_slice(extra);
    Configuration::new(pts).expect("distinct")
}

fn run<F>(s: &AuditSettings, f: F) -> Vec<Outcome>
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync,
{
    (0..s.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(s.master_seed, i as u64);
            let mut o = f(&mut rng);
            o.report = o.report.with_seed(s.master_seed, i as u64);
            o
        })
        .collect()
}

fn exhausted(condition: Condition, kind: RelationKind, tries: usize) -> Outcome {
    Outcome::one(
        AuditReport::new(condition, Some(kind), Verdict::NearDegenerate, "hypotheses never met"),
        tries,
    )
}

/// (C1) on random `(graph, z, u)`. Delaunay instances must be in general
/// position; degenerate draws are redrawn.
pub fn audit_c1<T: Scalar>(s: &AuditSettings) -> AuditSummary {
    let results = run(s, |rng| {
        for tries in 0..s.max_resample {
            let g: MetricGraph<T> = draw_graph(s, rng);
            let z = draw_config(&g, s, rng);
            let u = g.sample_uniform(rng).expect("positive length");
            if z.contains(&u) || (s.kind == RelationKind::Delaunay && !general(&g, &union(&z, &[u]))) {
                continue;
            }
            return Outcome::one(check_c1(&g, s.kind, &z, &u), tries);
        }
        exhausted(Condition::C1, s.kind, s.max_resample)
    });
    AuditSummary::collect(Condition::C1, s.kind, results)
}

/// (C2) on random `(graph, z, u, v)` with `u`, `v` unrelated in `z ∪ {u, v}`.
pub fn audit_c2<T: Scalar>(s: &AuditSettings) -> AuditSummary {
    let results = run(s, |rng| {
        for tries in 0..s.max_resample {
            let g: MetricGraph<T> = draw_graph(s, rng);
            let z = draw_config(&g, s, rng);
            let u = g.sample_uniform(rng).expect("positive length");
            let v = g.sample_uniform(rng).expect("positive length");
            if u == v || z.contains(&u) || z.contains(&v) {
                continue;
            }
            if s.kind == RelationKind::Delaunay && !general(&g, &union(&z, &[u, v])) {
                continue;
            }
            if related_in_union(&g, s.kind, &z, &u, &v) {
                continue;
            }
            return Outcome::one(check_c2(&g, s.kind, &z, &u, &v), tries);
        }
        exhausted(Condition::C2, s.kind, s.max_resample)
    });
    AuditSummary::collect(Condition::C2, s.kind, results)
}

/// Nested-subset chains on random Poisson configurations.
pub fn audit_hereditary<T: Scalar>(s: &AuditSettings, chains_per_instance: usize) -> AuditSummary {
    let results = run(s, |rng| {
        let g: MetricGraph<T> = draw_graph(s, rng);
        let x = draw_config(&g, s, rng);
        let report = check_hereditary(&g, s.kind, &x, chains_per_instance, rng);
        Outcome {
            report,
            checks: chains_per_instance,
            near_degenerate: 0,
            resampled: 0,
        }
    });
    AuditSummary::collect(Condition::Hereditary, s.kind, results)
}

fn general_config<T: Scalar>(s: &AuditSettings, rng: &mut ChaCha8Rng) -> Option<(MetricGraph<T>, Configuration<T>, usize)> {
    for tries in 0..s.max_resample {
        let g: MetricGraph<T> = draw_graph(s, rng);
        let x = draw_config(&g, s, rng);
        if general(&g, &x) {
            return Some((g, x, tries));
        }
    }
    None
}

/// Midpoint characterization over all pairs of random tree configurations.
pub fn audit_midpoint<T: Scalar>(s: &AuditSettings) -> AuditSummary {
    let results = run(s, |rng| match general_config::<T>(s, rng) {
        Some((g, x, tries)) => {
            let (report, pairs) = check_midpoint(&g, &x);
            Outcome {
                report,
                checks: pairs,
                near_degenerate: 0,
                resampled: tries,
            }
        }
        None => exhausted(Condition::Midpoint, RelationKind::Delaunay, s.max_resample),
    });
    AuditSummary::collect(Condition::Midpoint, RelationKind::Delaunay, results)
}

pub fn audit_clique_bound<T: Scalar>(s: &AuditSettings) -> AuditSummary {
    let results = run(s, |rng| match general_config::<T>(s, rng) {
        Some((g, x, tries)) => Outcome::one(check_clique_bound(&g, &x), tries),
        None => exhausted(Condition::CliqueBound, RelationKind::Delaunay, s.max_resample),
    });
    AuditSummary::collect(Condition::CliqueBound, RelationKind::Delaunay, results)
}

/// Exact Delaunay relation against the grid oracle at spacing `h`. Pairs
/// that disagree with a witness gap below `10h` count as near-degenerate.
pub fn audit_grid_oracle<T: Scalar>(s: &AuditSettings, h: f64) -> AuditSummary {
    let h_t = T::lit(h);
    let results = run(s, |rng| {
        let g: MetricGraph<T> = draw_graph(s, rng);
        let x = draw_config(&g, s, rng);
        let exact = delaunay_relation(&g, &x);
        let grid = grid_voronoi_oracle(&g, &x, h_t);
        let mut near = 0;
        let mut pairs = 0;
        let mut bad = None;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                pairs += 1;
                if exact.related(i, j) == grid.related(i, j) {
                    continue;
                }
                let gap = witness_gap(&g, &x, i, j);
                if gap < T::lit(10.0 * h) {
                    near += 1;
                } else if bad.is_none() {
                    bad = Some((i, j, gap));
                }
            }
        }
        let report = match bad {
            None => AuditReport::new(Condition::Oracle, Some(RelationKind::Delaunay), Verdict::Pass, format!("{pairs} pairs, {near} near-degenerate")),
            Some((i, j, gap)) => {
                let mut r = AuditReport::new(
                    Condition::Oracle,
                    Some(RelationKind::Delaunay),
                    Verdict::Violation,
                    format!("pair ({i},{j}): exact={} grid={} gap={gap}", exact.related(i, j), grid.related(i, j)),
                );
                r.instance = Some(instance(&g, &x, None, None, Some(vec![i, j])));
                r
            }
        };
        Outcome {
            report,
            checks: pairs,
            near_degenerate: near,
            resampled: 0,
        }
    });
    AuditSummary::collect(Condition::Oracle, RelationKind::Delaunay, results)
}

fn random_point<T: Scalar>(g: &MetricGraph<T>, rng: &mut ChaCha8Rng) -> NetworkPoint<T> {
    if rng.random_bool(0.1) {
        let v: Vec<_> = g.vertex_ids().collect();
        NetworkPoint::Vertex(*v.choose(rng).unwrap())
    } else {
        g.sample_uniform(rng).expect("positive length")
    }
}

/// Shortest-path distance against exhaustive path enumeration. On trees the
/// enumeration must also find exactly one path.
pub fn audit_distance<T: Scalar>(s: &AuditSettings, pairs_per_graph: usize, tol: f64) -> AuditSummary {
    let results = run(s, |rng| {
        let g: MetricGraph<T> = draw_graph(s, rng);
        for _ in 0..pairs_per_graph {
            let p = random_point(&g, rng);
            let q = random_point(&g, rng);
            let d = g.distance(&p, &q).expect("valid");
            let (b, count) = brute_force_paths(&g, &p, &q).expect("small graph");
            let unique_ok = !g.is_tree() || count == 1;
            if (d - b).abs().as_f64() > tol || !unique_ok {
                let mut r = AuditReport::new(
                    Condition::Distance,
                    None,
                    Verdict::Violation,
                    format!("distance {d} vs enumeration {b} over {count} paths"),
                );
                r.instance = Some(instance(&g, &Configuration::empty(), Some(&p), Some(&q), None));
                return Outcome {
                    report: r,
                    checks: pairs_per_graph,
                    near_degenerate: 0,
                    resampled: 0,
                };
            }
        }
        Outcome {
            report: AuditReport::new(Condition::Distance, None, Verdict::Pass, format!("{pairs_per_graph} pairs")),
            checks: pairs_per_graph,
            near_degenerate: 0,
            resampled: 0,
        }
    });
    AuditSummary::collect(Condition::Distance, RelationKind::Delaunay, results)
}

/// Three random points per tree must form a path or a wheel.
pub fn audit_trichotomy<T: Scalar>(s: &AuditSettings, triples_per_tree: usize) -> AuditSummary {
    let results = run(s, |rng| {
        let g: MetricGraph<T> = draw_graph(s, rng);
        for _ in 0..triples_per_tree {
            let p: Vec<NetworkPoint<T>> = (0..3).map(|_| g.sample_uniform(rng).expect("positive length")).collect();
            if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
                continue;
            }
            if trichotomy(&g, [&p[0], &p[1], &p[2]]).is_none() {
                let z = Configuration::new(p.clone()).expect("distinct");
                let mut r = AuditReport::new(Condition::Trichotomy, None, Verdict::Violation, "neither path nor wheel");
                r.instance = Some(instance(&g, &z, None, None, None));
                return Outcome::one(r, 0);
            }
        }
        Outcome {
            report: AuditReport::new(Condition::Trichotomy, None, Verdict::Pass, format!("{triples_per_tree} triples")),
            checks: triples_per_tree,
            near_degenerate: 0,
            resampled: 0,
        }
    });
    AuditSummary::collect(Condition::Trichotomy, RelationKind::Delaunay, results)
}
