use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::metric_graph::{GraphBuilder, MetricGraph};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("need at least one vertex")]
    NoVertices,
    #[error("length range must satisfy 0 < lo <= hi, got [{0}, {1}]")]
    BadRange(f64, f64),
    #[error("{extra} extra edges requested but only {available} vertex pairs are free")]
    TooManyEdges { extra: usize, available: usize },
}

fn draw_length<T: Scalar, R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> T {
    if lo == hi {
        T::lit(lo)
    } else {
        T::lit(rng.random_range(lo..hi))
    }
}

fn check(n: usize, (lo, hi): (f64, f64)) -> Result<(), GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::NoVertices);
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(GeneratorError::BadRange(lo, hi));
    }
    Ok(())
}

/// Tree edges from a uniformly random Prüfer sequence.
fn tree_edges<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf remains");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn assemble<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    edges: &[(usize, usize)],
    range: (f64, f64),
) -> MetricGraph<T> {
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b = b.vertex(format!("v{v}"), None);
    }
    for (k, &(a, c)) in edges.iter().enumerate() {
        let len = draw_length(rng, range);
        b = b.edge(format!("e{k}"), format!("v{a}"), format!("v{c}"), len);
    }
    b.build().expect("generated graph is valid")
}

/// Uniform random labelled tree on `n` vertices with edge lengths uniform in
/// `range`.
pub fn random_tree<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    range: (f64, f64),
) -> Result<MetricGraph<T>, GeneratorError> {
    check(n, range)?;
    let edges = tree_edges(rng, n);
    Ok(assemble(rng, n, &edges, range))
}

/// Random tree plus `extra` chords chosen uniformly among absent vertex pairs.
pub fn random_graph<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    extra: usize,
    range: (f64, f64),
) -> Result<MetricGraph<T>, GeneratorError> {
    check(n, range)?;
    let mut edges = tree_edges(rng, n);
    let mut free: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |c| (a, c)))
        .filter(|&(a, c)| !edges.iter().any(|&e| e == (a, c) || e == (c, a)))
        .collect();
    if extra > free.len() {
        return Err(GeneratorError::TooManyEdges {
            extra,
            available: free.len(),
        });
    }
    free.shuffle(rng);
    edges.extend_from_slice(&free[..extra]);
    Ok(assemble(rng, n, &edges, range))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn sizes_and_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g: MetricGraph<f64> = random_graph(&mut rng, 1, 0, (1.0, 1.0)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let t: MetricGraph<f64> = random_tree(&mut rng, 5, (0.5, 2.0)).unwrap();
        assert_eq!(t.edge_count(), 4);
        assert!(t.is_tree());
        let c: MetricGraph<f64> = random_graph(&mut rng, 5, 2, (0.5, 2.0)).unwrap();
        assert_eq!(c.edge_count(), 6);
        assert!(!c.is_tree());
        assert!(c.edges().iter().all(|e| e.length >= 0.5 && e.length < 2.0));
    }

    #[test]
    fn impossible_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_tree::<f64, _>(&mut rng, 0, (1.0, 2.0)).is_err());
        assert!(random_tree::<f64, _>(&mut rng, 3, (0.0, 2.0)).is_err());
        assert!(random_tree::<f64, _>(&mut rng, 3, (2.0, 1.0)).is_err());
        assert!(matches!(
            random_graph::<f64, _>(&mut rng, 3, 2, (1.0, 2.0)),
            Err(GeneratorError::TooManyEdges { available: 1, .. })
        ));
    }

    #[test]
    fn prufer_trees_cover_all_shapes() {
        // 4 labelled vertices: 16 trees, 4 stars and 12 paths
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut stars = 0;
        let n = 4000;
        for _ in 0..n {
            let t: MetricGraph<f64> = random_tree(&mut rng, 4, (1.0, 1.0)).unwrap();
            assert!(t.is_tree());
            if t.max_degree() == 3 {
                stars += 1;
            }
        }
        let p = 0.25;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((stars as f64 / n as f64 - p).abs() < 4.0 * se);
    }
}
