use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use netpp::consistency_lab::{
    audit_c1, audit_c2, audit_clique_bound, audit_distance, audit_grid_oracle, audit_hereditary,
    audit_midpoint, audit_trichotomy, instance_rng, reproduce_triangle_counterexample, AuditSettings,
    AuditSummary, GraphFamily,
};
use netpp::markov_model::{
    batch_means_se, log_density, log_papangelou, run_sampler, InteractionModel, ModelError, Schedule,
};
use netpp::metric_graph::{configuration_to_json, graph_to_json, Path as NetPath, PointDoc};
use netpp::network_voronoi::{relation, voronoi_partition, EdgeCells, RelationKind};
use netpp::{Graph, Point};

use crate::input::Numbered;
use crate::output::{invalid, json_num, num, row, Rendered};

pub fn validate(g: &Graph) -> Rendered {
    let total = g.total_length();
    let json = json!({
        "valid": true,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "total_length": total,
        "tree": g.is_tree(),
        "warnings": g.warnings(),
    });
    let mut pretty = format!(
        "vertices={} edges={} total_length≈{:.4} tree={}",
        g.vertex_count(),
        g.edge_count(),
        total,
        g.is_tree()
    );
    for w in g.warnings() {
        pretty.push_str(&format!("\nwarning: {w}"));
    }
    Rendered::single(
        json,
        vec![
            row(["vertices", "edges", "total_length", "tree"]),
            row([
                g.vertex_count().to_string(),
                g.edge_count().to_string(),
                num(total),
                g.is_tree().to_string(),
            ]),
        ],
        pretty,
    )
}

pub fn invalid_graph(code: &str, message: &str) -> Rendered {
    Rendered::single(
        json!({"valid": false, "code": code, "error": message}),
        vec![row(["valid", "code", "error"]), row(["false", code, message])],
        format!("invalid: {message}"),
    )
}

fn point_doc(g: &Graph, p: &Point) -> Value {
    serde_json::to_value(PointDoc::from_point(g, p)).expect("point serializes")
}

fn point_text(g: &Graph, p: &Point) -> String {
    match PointDoc::from_point(g, p) {
        PointDoc::Edge { edge, t } => format!("{edge}@{}", num(t)),
        PointDoc::Vertex { vertex } => vertex,
    }
}

fn segments_json(g: &Graph, path: &NetPath<f64>) -> Value {
    path.segments
        .iter()
        .map(|s| json!({"edge": g.edge(s.edge).label, "from": s.from, "to": s.to}))
        .collect()
}

fn segments_text(g: &Graph, path: &NetPath<f64>) -> String {
    path.segments
        .iter()
        .map(|s| format!("{}[{}..{}]", g.edge(s.edge).label, num(s.from), num(s.to)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn dist(g: &Graph, p: &Point, q: &Point) -> Result<Rendered> {
    let d = g.distance(p, q)?;
    let path = g.shortest_path(p, q)?;
    let mut pretty = num(d);
    if !path.segments.is_empty() {
        pretty.push_str(&format!("\nvia {}", segments_text(g, &path)));
    }
    Ok(Rendered::single(
        json!({"distance": d, "segments": segments_json(g, &path)}),
        vec![row(["distance"]), row([num(d)])],
        pretty,
    ))
}

pub fn path(g: &Graph, p: &Point, q: &Point) -> Result<Rendered> {
    let path = g.shortest_path(p, q)?;
    let vertices: Vec<String> = path
        .interior_vertices(g)
        .into_iter()
        .map(|v| g.vertex(v).label.clone())
        .collect();
    let midpoint = if p == q {
        None
    } else {
        Some(g.midpoint_on_path(p, q).map_err(|e| invalid("midpoint", e))?)
    };
    let mut tsv = vec![row(["edge", "from", "to"])];
    tsv.extend(
        path.segments
            .iter()
            .map(|s| row([g.edge(s.edge).label.clone(), num(s.from), num(s.to)])),
    );
    let mut pretty = format!("weight {}\n{}", num(path.weight), segments_text(g, &path));
    if let Some(m) = &midpoint {
        pretty.push_str(&format!("\nmidpoint {}", point_text(g, m)));
    }
    Ok(Rendered::single(
        json!({
            "weight": path.weight,
            "segments": segments_json(g, &path),
            "vertices": vertices,
            "midpoint": midpoint.map(|m| point_doc(g, &m)),
        }),
        tsv,
        pretty,
    ))
}

/// Planar coordinates of the part `[start, end]` of an edge, when the graph
/// has geometry for it.
fn piece_geometry(g: &Graph, c: &EdgeCells<f64>, start: f64, end: f64) -> Option<Vec<[f64; 2]>> {
    let e = g.edge(c.edge);
    let at = |t: f64| g.embed(&g.edge_point(c.edge, t).ok()?);
    let mut out = vec![at(start)?];
    if let Some(poly) = &e.polyline {
        let arc = netpp::metric_graph::polyline_length(poly);
        let mut s = 0.0;
        for w in poly.windows(2) {
            s += (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            let t = s / arc * e.length;
            if t > start && t < end {
                out.push(w[1]);
            }
        }
    }
    out.push(at(end)?);
    Some(out)
}

pub fn voronoi(g: &Graph, x: &Numbered) -> Result<Rendered> {
    let part = voronoi_partition(g, &x.config).map_err(|e| invalid("configuration", e))?;
    let mut edges = Vec::new();
    let mut tsv = vec![row(["edge", "start", "end", "labels"])];
    let mut pretty = String::new();
    for c in &part.edges {
        let label = &g.edge(c.edge).label;
        let pieces: Vec<Value> = c
            .pieces
            .iter()
            .map(|p| {
                let mut v = json!({"start": p.start, "end": p.end, "labels": x.labels(&p.labels)});
                if let Some(geom) = piece_geometry(g, c, p.start, p.end) {
                    v["geometry"] = json!(geom);
                }
                v
            })
            .collect();
        let breakpoints: Vec<Value> = c
            .breakpoints
            .iter()
            .map(|(t, l)| json!({"t": t, "labels": x.labels(l)}))
            .collect();
        edges.push(json!({"edge": label, "breakpoints": breakpoints, "pieces": pieces}));
        for p in &c.pieces {
            let labels = x.labels(&p.labels);
            let text = labels.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            tsv.push(row([label.clone(), num(p.start), num(p.end), text.clone()]));
            pretty.push_str(&format!("{label} [{}, {}] {{{text}}}\n", num(p.start), num(p.end)));
        }
    }
    let vertices: Vec<Value> = g
        .vertex_ids()
        .map(|v| json!({"vertex": g.vertex(v).label, "labels": x.labels(&part.vertices[v.0])}))
        .collect();
    for v in g.vertex_ids() {
        let labels = x.labels(&part.vertices[v.0]);
        let text = labels.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        pretty.push_str(&format!("{} {{{text}}}\n", g.vertex(v).label));
    }
    Ok(Rendered::single(json!({"edges": edges, "vertices": vertices}), tsv, pretty))
}

pub fn neighbors(g: &Graph, x: &Numbered, kind: RelationKind) -> Rendered {
    let r = relation(g, &x.config, kind);
    let mut pairs: Vec<(usize, usize)> = r
        .pairs()
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (x.label(i), x.label(j));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    let mut tsv = vec![row(["i", "j"])];
    tsv.extend(pairs.iter().map(|&(i, j)| row([i, j])));
    let pretty = pairs
        .iter()
        .map(|(i, j)| format!("({i},{j})"))
        .collect::<Vec<_>>()
        .join(" ");
    Rendered::single(
        json!({"kind": kind, "points": x.config.len(), "pairs": pairs, "max_clique": r.max_clique_size()}),
        tsv,
        pretty,
    )
}

pub fn density(m: &InteractionModel<f64>, g: &Graph, x: &Numbered) -> Rendered {
    let ld = log_density(m, g, &x.config);
    let pairs = relation(g, &x.config, m.relation).pairs().len();
    Rendered::single(
        json!({
            "log_density": json_num(ld),
            "zero_density": ld == f64::NEG_INFINITY,
            "count": x.config.len(),
            "related_pairs": pairs,
        }),
        vec![
            row(["log_density", "count", "related_pairs"]),
            row([num(ld), x.config.len().to_string(), pairs.to_string()]),
        ],
        format!("log_density={} count={} related_pairs={pairs}", num(ld), x.config.len()),
    )
}

pub fn papangelou(m: &InteractionModel<f64>, g: &Graph, x: &Numbered, u: Point) -> Result<Rendered> {
    let log = log_papangelou(m, g, &x.config, u).map_err(|e| match e {
        ModelError::Duplicate => invalid("duplicate-point", e),
        ModelError::ZeroDensity => invalid("zero-density", e),
        other => invalid("model", other),
    })?;
    let lam = log.exp();
    Ok(Rendered::single(
        json!({"intensity": lam, "log_intensity": json_num(log)}),
        vec![row(["intensity", "log_intensity"]), row([num(lam), num(log)])],
        format!("intensity={} log_intensity={}", num(lam), num(log)),
    ))
}

pub struct SampleArgs {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub replicates: u64,
}

fn counts_summary(counts: &[f64]) -> (f64, f64) {
    let n = counts.len().max(1) as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Independent draws of the Poisson process of intensity `rate`.
pub fn sample_poisson(g: &Graph, rate: f64, replicates: u64, seed: u64) -> Result<(Rendered, String)> {
    let edges: Vec<String> = g.edges().iter().map(|e| e.label.clone()).collect();
    let mut json = Vec::new();
    let mut tsv = vec![row(["replicate", "count"].into_iter().map(String::from).chain(edges.clone()))];
    let mut counts = Vec::new();
    for r in 0..replicates {
        let mut rng = instance_rng(seed, r);
        let x = g
            .sample_poisson(rate, &mut rng)
            .map_err(|e| invalid("rate", e))?;
        json.push(serde_json::from_str(&configuration_to_json(g, &x))?);
        let mut cells = vec![r.to_string(), x.len().to_string()];
        cells.extend(x.edge_counts(g.edge_count()).iter().map(usize::to_string));
        tsv.push(cells);
        counts.push(x.len() as f64);
    }
    let (mean, se) = counts_summary(&counts);
    let summary = format!(
        "replicates={replicates} mean_count={} se={} expected={}",
        num(mean),
        num(se),
        num(rate * g.total_length())
    );
    Ok((
        Rendered {
            json,
            tsv,
            pretty: summary.clone(),
        },
        summary,
    ))
}

/// Birth–death chains, one per replicate, each on its own random stream.
pub fn sample_model(
    m: &InteractionModel<f64>,
    g: &Graph,
    a: &SampleArgs,
    seed: u64,
) -> Result<(Rendered, String)> {
    let mut schedule = Schedule::new(a.iterations, a.burn_in, a.thin);
    schedule.keep_configurations = true;
    schedule.validate().map_err(|e| invalid("schedule", e))?;
    let mut json = Vec::new();
    let mut tsv = vec![row(["replicate", "iteration", "count", "related_pairs"])];
    let mut pretty = String::new();
    let mut all = Vec::new();
    for r in 0..a.replicates {
        let mut rng = instance_rng(seed, r);
        let trace = run_sampler(m, g, None, schedule, &mut rng).map_err(|e| invalid("model", e))?;
        for rec in &trace.records {
            let mut v = serde_json::to_value(rec)?;
            v["replicate"] = json!(r);
            json.push(v);
            tsv.push(row([
                r.to_string(),
                rec.iteration.to_string(),
                rec.count.to_string(),
                rec.related_pairs.to_string(),
            ]));
        }
        let counts = trace.counts();
        let se = batch_means_se(&counts, 20);
        pretty.push_str(&format!(
            "replicate {r}: records={} mean_count={} batch_se={} birth_acceptance={} death_acceptance={}\n",
            counts.len(),
            num(trace.mean_count()),
            num(se),
            num(trace.acceptance.birth_rate()),
            num(trace.acceptance.death_rate())
        ));
        all.extend(counts);
    }
    let (mean, _) = counts_summary(&all);
    let summary = format!("replicates={} records={} mean_count={}", a.replicates, all.len(), num(mean));
    pretty.push_str(&summary);
    Ok((Rendered { json, tsv, pretty }, summary))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    C1,
    C2,
    Hereditary,
    Triangle,
    Oracle,
    Midpoint,
    CliqueBound,
    Distance,
    Trichotomy,
}

pub struct CheckArgs {
    pub what: CheckKind,
    pub kind: RelationKind,
    pub family: Option<GraphFamily>,
    pub instances: usize,
    pub seed: u64,
    pub spacing: f64,
    pub per_instance: usize,
}

fn summary_json(s: &AuditSummary) -> Value {
    json!({
        "condition": s.condition,
        "kind": s.kind,
        "instances": s.instances,
        "checks": s.checks,
        "violations": s.violations,
        "near_degenerate": s.near_degenerate,
        "near_degenerate_fraction": s.near_degenerate_fraction(),
        "resampled": s.resampled,
    })
}

fn write_report(path: Option<&Path>, ndjson: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, ndjson).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

/// Runs one audit. The flag is true when the outcome needs attention:
/// violations found, or the triangle counterexample not reproduced.
pub fn check(a: &CheckArgs, report: Option<&Path>) -> Result<(Rendered, bool)> {
    if a.what == CheckKind::Triangle {
        let t = reproduce_triangle_counterexample::<f64>();
        let mut lines = String::new();
        for r in [&t.c1, &t.c2, &t.local_c1, &t.local_c2] {
            lines.push_str(&r.to_json_line());
            lines.push('\n');
        }
        write_report(report, &lines)?;
        let mut v = serde_json::to_value(&t)?;
        v["reproduced"] = json!(t.reproduced());
        v["local_clean"] = json!(t.local_clean());
        let verdicts = [&t.c1, &t.c2, &t.local_c1, &t.local_c2].map(|r| format!("{:?}", r.verdict));
        let pretty = format!(
            "triangle midpoints clique: {}\ndelaunay: C1 {} C2 {}\nlocal: C1 {} C2 {}\n{}",
            t.clique_before,
            verdicts[0],
            verdicts[1],
            verdicts[2],
            verdicts[3],
            if t.reproduced() {
                "violation reproduced (expected)"
            } else {
                "violation NOT reproduced"
            }
        );
        let tsv = vec![
            row(["relation", "c1", "c2"]),
            row(["delaunay", &verdicts[0], &verdicts[1]]),
            row(["local-delaunay", &verdicts[2], &verdicts[3]]),
        ];
        return Ok((Rendered::single(v, tsv, pretty), !t.reproduced()));
    }

    let family = a.family.unwrap_or(match a.kind {
        RelationKind::Delaunay => GraphFamily::Trees,
        RelationKind::LocalDelaunay => GraphFamily::Cyclic,
    });
    let s = match family {
        GraphFamily::Trees => AuditSettings::trees(a.instances, a.seed),
        GraphFamily::Cyclic => AuditSettings::cyclic(a.instances, a.seed),
    }
    .with_kind(a.kind);
    let summary = match a.what {
        CheckKind::C1 => audit_c1::<f64>(&s),
        CheckKind::C2 => audit_c2::<f64>(&s),
        CheckKind::Hereditary => audit_hereditary::<f64>(&s, a.per_instance),
        CheckKind::Oracle => audit_grid_oracle::<f64>(&s, a.spacing),
        CheckKind::Midpoint => audit_midpoint::<f64>(&s),
        CheckKind::CliqueBound => audit_clique_bound::<f64>(&s),
        CheckKind::Distance => audit_distance::<f64>(&s, a.per_instance, 1e-9),
        CheckKind::Trichotomy => audit_trichotomy::<f64>(&s, a.per_instance),
        CheckKind::Triangle => unreachable!(),
    };
    write_report(report, &summary.to_ndjson())?;
    let v = summary_json(&summary);
    let pretty = format!(
        "{} ({}, {}): {} instances, {} checks, {} violations, {} near-degenerate, {} resampled{}",
        v["condition"].as_str().unwrap_or_default(),
        v["kind"].as_str().unwrap_or_default(),
        format!("{family:?}").to_lowercase(),
        summary.instances,
        summary.checks,
        summary.violations,
        summary.near_degenerate,
        summary.resampled,
        summary
            .first_violation()
            .map(|r| format!("\nfirst violation: {}", r.to_json_line()))
            .unwrap_or_default()
    );
    let tsv = vec![
        row(["condition", "kind", "instances", "checks", "violations", "near_degenerate", "resampled"]),
        row([
            v["condition"].as_str().unwrap_or_default().to_string(),
            v["kind"].as_str().unwrap_or_default().to_string(),
            summary.instances.to_string(),
            summary.checks.to_string(),
            summary.violations.to_string(),
            summary.near_degenerate.to_string(),
            summary.resampled.to_string(),
        ]),
    ];
    Ok((Rendered::single(v, tsv, pretty), summary.violations > 0))
}

/// Canonical re-emission of a graph or of a configuration on it.
pub fn export(g: &Graph, x: Option<&Numbered>, indent: bool) -> Result<String> {
    let text = match x {
        Some(x) => configuration_to_json(g, &x.config),
        None => graph_to_json(g),
    };
    if indent {
        let v: Value = serde_json::from_str(&text)?;
        return Ok(serde_json::to_string_pretty(&v)?);
    }
    Ok(text)
}
