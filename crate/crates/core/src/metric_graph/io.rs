//! JSON documents for graphs and configurations.
//!
//! Graph:
//! ```json
//! {"vertices": [{"id": "A", "xy": [0, 0]}],
//!  "edges": [{"id": "e", "ends": ["A", "B"], "length": 1.5}]}
//! ```
//! Every edge carries exactly one of `length` or `polyline`; a polyline's arc
//! length becomes the edge length.
//!
//! Configuration: `[{"edge": "e", "t": 0.3}, {"vertex": "A"}]`.

use serde::{Deserialize, Serialize};

use super::graph::{GraphBuilder, GraphError, MetricGraph};
use super::point::{Configuration, NetworkPoint, PointError};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xy: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Edge { edge: String, t: f64 },
    Vertex { vertex: String },
}

impl GraphDoc {
    pub fn build<T: Scalar>(&self) -> Result<MetricGraph<T>, GraphError> {
        let mut b = GraphBuilder::new();
        for v in &self.vertices {
            b = b.vertex(v.id.clone(), v.xy.map(|[x, y]| [T::lit(x), T::lit(y)]));
        }
        for e in &self.edges {
            let [a, c] = e.ends.clone();
            b = match (&e.polyline, e.length) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(GraphError::LengthSpec(e.id.clone()))
                }
                (None, Some(l)) => b.edge(e.id.clone(), a, c, T::lit(l)),
                (Some(poly), None) => b.edge_with_polyline(
                    e.id.clone(),
                    a,
                    c,
                    poly.iter().map(|&[x, y]| [T::lit(x), T::lit(y)]).collect(),
                    None,
                ),
            };
        }
        b.build()
    }

    pub fn from_graph<T: Scalar>(g: &MetricGraph<T>) -> Self {
        GraphDoc {
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexDoc {
                    id: v.label.clone(),
                    xy: v.xy.map(|[x, y]| [x.as_f64(), y.as_f64()]),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    let polyline = e
                        .polyline
                        .as_ref()
                        .map(|p| p.iter().map(|&[x, y]| [x.as_f64(), y.as_f64()]).collect());
                    EdgeDoc {
                        id: e.label.clone(),
                        ends: [
                            g.vertex(e.ends.0).label.clone(),
                            g.vertex(e.ends.1).label.clone(),
                        ],
                        length: if polyline.is_some() {
                            None
                        } else {
                            Some(e.length.as_f64())
                        },
                        polyline,
                    }
                })
                .collect(),
        }
    }
}

/// Parses and validates a graph document.
pub fn load_graph<T: Scalar>(document: &str) -> Result<MetricGraph<T>, GraphError> {
    let doc: GraphDoc =
        serde_json::from_str(document).map_err(|e| GraphError::Parse(e.to_string()))?;
    doc.build()
}

pub fn graph_to_json<T: Scalar>(g: &MetricGraph<T>) -> String {
    serde_json::to_string(&GraphDoc::from_graph(g)).expect("graph serializes")
}

impl PointDoc {
    pub fn resolve<T: Scalar>(&self, g: &MetricGraph<T>) -> Result<NetworkPoint<T>, PointError> {
        match self {
            PointDoc::Edge { edge, t } => g.point_on(edge, T::lit(*t)),
            PointDoc::Vertex { vertex } => g.vertex_point(vertex),
        }
    }

    pub fn from_point<T: Scalar>(g: &MetricGraph<T>, p: &NetworkPoint<T>) -> Self {
        match *p {
            NetworkPoint::Vertex(v) => PointDoc::Vertex {
                vertex: g.vertex(v).label.clone(),
            },
            NetworkPoint::Edge { edge, offset } => PointDoc::Edge {
                edge: g.edge(edge).label.clone(),
                t: offset.as_f64(),
            },
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigLoadError {
    #[error("parse failure: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("point {index}: {source}")]
    Point { index: usize, source: PointError },
}

/// Resolves a configuration document. Returns the configuration together with
/// the canonical index of each input entry, in input order.
pub fn load_configuration<T: Scalar>(
    g: &MetricGraph<T>,
    document: &str,
) -> Result<(Configuration<T>, Vec<usize>), ConfigLoadError> {
    let docs: Vec<PointDoc> = serde_json::from_str(document)?;
    let points = docs
        .iter()
        .enumerate()
        .map(|(index, d)| d.resolve(g).map_err(|source| ConfigLoadError::Point { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    let x = Configuration::new(points.clone()).map_err(|source| ConfigLoadError::Point {
        index: 0,
        source,
    })?;
    let order = points.iter().map(|p| x.index_of(p).unwrap()).collect();
    Ok((x, order))
}

pub fn configuration_docs<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> Vec<PointDoc> {
    x.iter().map(|p| PointDoc::from_point(g, p)).collect()
}

pub fn configuration_to_json<T: Scalar>(g: &MetricGraph<T>, x: &Configuration<T>) -> String {
    serde_json::to_string(&configuration_docs(g, x)).expect("configuration serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = r#"{
        "vertices": [{"id": "L", "xy": [-1, 0]}, {"id": "R", "xy": [1, 0]}, {"id": "T", "xy": [0, 1]}],
        "edges": [
            {"id": "bottom", "ends": ["L", "R"], "polyline": [[-1, 0], [1, 0]]},
            {"id": "right", "ends": ["R", "T"], "polyline": [[1, 0], [0, 1]]},
            {"id": "left", "ends": ["L", "T"], "polyline": [[-1, 0], [0, 1]]}
        ]}"#;

    #[test]
    fn loads_triangle_from_polylines() {
        let g: MetricGraph<f64> = load_graph(TRIANGLE).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!((g.total_length() - 4.828427124746).abs() < 1e-9);
    }

    #[test]
    fn parse_and_validation_errors() {
        assert!(matches!(load_graph::<f64>("{"), Err(GraphError::Parse(_))));
        let lp = r#"{"vertices":[{"id":"A"}],"edges":[{"id":"e","ends":["A","A"],"length":1}]}"#;
        assert!(matches!(load_graph::<f64>(lp), Err(GraphError::Loop(_))));
        let both = r#"{"vertices":[{"id":"A"},{"id":"B"}],
            "edges":[{"id":"e","ends":["A","B"],"length":1,"polyline":[[0,0],[1,0]]}]}"#;
        assert!(matches!(load_graph::<f64>(both), Err(GraphError::LengthSpec(_))));
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let g: MetricGraph<f64> = load_graph(TRIANGLE).unwrap();
        let once = graph_to_json(&g);
        let g2: MetricGraph<f64> = load_graph(&once).unwrap();
        assert_eq!(g, g2);
        assert_eq!(once, graph_to_json(&g2));
    }

    #[test]
    fn configuration_round_trip() {
        let g: MetricGraph<f64> = load_graph(TRIANGLE).unwrap();
        let doc = r#"[{"edge":"right","t":0.5},{"vertex":"T"},{"edge":"bottom","t":2.0}]"#;
        let (x, order) = load_configuration(&g, doc).unwrap();
        assert_eq!(x.len(), 3);
        // bottom@2.0 canonicalizes to vertex R
        assert!(x.points()[0].is_vertex() && x.points()[1].is_vertex());
        assert_eq!(order.len(), 3);
        let json = configuration_to_json(&g, &x);
        let (y, _) = load_configuration(&g, &json).unwrap();
        assert_eq!(x, y);
        assert_eq!(json, configuration_to_json(&g, &y));
        assert!(load_configuration(&g, r#"[{"edge":"nope","t":1}]"#).is_err());
    }
}
