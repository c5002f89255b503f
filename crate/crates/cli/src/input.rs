use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use netpp::markov_model::InteractionModel;
use netpp::metric_graph::{load_configuration, load_graph, PointDoc};
use netpp::{Config, Graph, Point};

use crate::output::invalid;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn graph(path: &Path, eps: f64) -> Result<Graph> {
    let text = read(path)?;
    let g: Graph = load_graph(&text).map_err(|e| invalid(e.code(), e))?;
    Ok(g.with_eps(eps))
}

/// A configuration file together with the 1-based input position of
/// every canonical index.
pub struct Numbered {
    pub config: Config,
    pub number: Vec<usize>,
}

impl Numbered {
    pub fn label(&self, canonical: usize) -> usize {
        self.number[canonical]
    }

    pub fn labels(&self, canonical: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = canonical.iter().map(|&i| self.number[i]).collect();
        out.sort_unstable();
        out
    }
}

pub fn configuration(g: &Graph, path: &Path) -> Result<Numbered> {
    let text = read(path)?;
    let (config, order) = load_configuration(g, &text).map_err(|e| invalid("configuration", e))?;
    let mut number = vec![0; config.len()];
    for (pos, &canon) in order.iter().enumerate() {
        number[canon] = pos + 1;
    }
    Ok(Numbered { config, number })
}

/// `EDGE@t` for a point on an edge, `VERTEX` for a vertex.
pub fn point(g: &Graph, spec: &str) -> Result<Point> {
    let doc = match spec.rsplit_once('@') {
        Some((edge, t)) => PointDoc::Edge {
            edge: edge.to_string(),
            t: t
                .parse()
                .map_err(|_| invalid("point", format!("bad offset in {spec:?}")))?,
        },
        None => PointDoc::Vertex {
            vertex: spec.to_string(),
        },
    };
    doc.resolve(g).map_err(|e| invalid("point", e))
}

pub fn model(path: &Path) -> Result<InteractionModel<f64>> {
    let text = read(path)?;
    InteractionModel::from_json(&text).map_err(|e| invalid("model", e))
}
