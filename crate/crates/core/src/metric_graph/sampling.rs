use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use super::graph::{EdgeId, MetricGraph};
use super::point::{Configuration, NetworkPoint};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("network has zero total length")]
    ZeroLength,
    #[error("rate must be finite and nonnegative, got {0}")]
    BadRate(f64),
}

impl<T: Scalar> MetricGraph<T> {
    fn uniform_offset<R: Rng + ?Sized>(&self, e: EdgeId, rng: &mut R) -> NetworkPoint<T> {
        let len = self.edge(e).length;
        loop {
            let u: f64 = rng.random();
            let t = T::lit(u) * len;
            if t > T::zero() && t < len {
                return NetworkPoint::Edge { edge: e, offset: t };
            }
        }
    }

    /// A point drawn from the normalized length measure: the edge is chosen
    /// proportionally to its length and the offset uniformly on it.
    pub fn sample_uniform<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<NetworkPoint<T>, SamplingError> {
        let total = self.total_length();
        if !(total > T::zero()) {
            return Err(SamplingError::ZeroLength);
        }
        let u: f64 = rng.random();
        let target = T::lit(u) * total;
        let mut acc = T::zero();
        let mut chosen = EdgeId(self.edge_count() - 1);
        for e in self.edge_ids() {
            acc = acc + self.edge(e).length;
            if target < acc {
                chosen = e;
                break;
            }
        }
        Ok(self.uniform_offset(chosen, rng))
    }

    /// Homogeneous Poisson process of intensity `rate` per unit length.
    pub fn sample_poisson<R: Rng + ?Sized>(
        &self,
        rate: T,
        rng: &mut R,
    ) -> Result<Configuration<T>, SamplingError> {
        if !(rate >= T::zero() && rate.is_finite()) {
            return Err(SamplingError::BadRate(rate.as_f64()));
        }
        let mut points = Vec::new();
        for e in self.edge_ids() {
            let mean = (rate * self.edge(e).length).as_f64();
            if mean <= 0.0 {
                continue;
            }
            let n = Poisson::new(mean).expect("positive finite mean").sample(rng) as usize;
            for _ in 0..n {
                points.push(self.uniform_offset(e, rng));
            }
        }
        loop {
            match Configuration::new(points.clone()) {
                Ok(x) => return Ok(x),
                // coincident draws have probability zero in exact arithmetic
                Err(_) => {
                    points.sort_by(|a, b| a.total_cmp(b));
                    points.dedup_by(|a, b| a.total_cmp(b) == std::cmp::Ordering::Equal);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::metric_graph::GraphBuilder;

    fn two_edges() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("short", "A", "B", 1.0)
            .edge("long", "B", "C", 3.0)
            .build()
            .unwrap()
    }

    #[test]
    fn uniform_offset_mean() {
        let g = GraphBuilder::<f64>::new()
            .vertex("A", None)
            .vertex("B", None)
            .edge("e", "A", "B", 1.0)
            .build()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            match g.sample_uniform(&mut rng).unwrap() {
                NetworkPoint::Edge { offset, .. } => {
                    assert!(offset > 0.0 && offset < 1.0);
                    sum += offset;
                }
                NetworkPoint::Vertex(_) => panic!("vertex sampled"),
            }
        }
        let se = (1.0f64 / 12.0).sqrt() / (n as f64).sqrt();
        assert!((sum / n as f64 - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn edge_choice_is_length_proportional() {
        let g = two_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let long = g.find_edge("long").unwrap();
        let hits = (0..n)
            .filter(|_| {
                matches!(g.sample_uniform(&mut rng).unwrap(), NetworkPoint::Edge { edge, .. } if edge == long)
            })
            .count();
        let se = (0.75f64 * 0.25 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.75).abs() < 3.0 * se);
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let g = two_edges();
        let a = g.sample_uniform(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = g.sample_uniform(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let x = g.sample_poisson(2.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let y = g.sample_poisson(2.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn poisson_edge_cases() {
        let g = two_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(g.sample_poisson(0.0, &mut rng).unwrap().is_empty());
        assert!(g.sample_poisson(-1.0, &mut rng).is_err());
        let single = GraphBuilder::<f64>::new().vertex("A", None).build().unwrap();
        assert!(single.sample_poisson(5.0, &mut rng).unwrap().is_empty());
        assert_eq!(single.sample_uniform(&mut rng), Err(SamplingError::ZeroLength));
    }

    #[test]
    fn poisson_per_edge_means() {
        let g = two_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reps = 10_000;
        let mut sums = [0usize; 2];
        for _ in 0..reps {
            let x = g.sample_poisson(1.0, &mut rng).unwrap();
            let c = x.edge_counts(2);
            sums[0] += c[0];
            sums[1] += c[1];
        }
        for (e, &s) in sums.iter().enumerate() {
            let mean = g.edges()[e].length;
            let se = (mean / reps as f64).sqrt();
            assert!((s as f64 / reps as f64 - mean).abs() < 3.0 * se, "edge {e}");
        }
    }
}
