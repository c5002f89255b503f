use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use super::density::{log_density_with, log_papangelou_with};
use super::interaction::{InteractionModel, ModelError};
use crate::metric_graph::{configuration_docs, Configuration, MetricGraph, PointDoc, SamplingError};
use crate::network_voronoi::{relation, Relation};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Acceptance {
    pub births_proposed: u64,
    pub births_accepted: u64,
    pub deaths_proposed: u64,
    pub deaths_accepted: u64,
}

impl Acceptance {
    pub fn birth_rate(&self) -> f64 {
        self.births_accepted as f64 / self.births_proposed.max(1) as f64
    }

    pub fn death_rate(&self) -> f64 {
        self.deaths_accepted as f64 / self.deaths_proposed.max(1) as f64
    }
}

/// Current configuration of a chain with its relation and log density kept
/// in sync.
#[derive(Clone, Debug)]
pub struct SamplerState<T> {
    config: Configuration<T>,
    relation: Relation,
    log_density: T,
    iteration: u64,
    acceptance: Acceptance,
}

impl<T: Scalar> SamplerState<T> {
    pub fn new(
        m: &InteractionModel<T>,
        g: &MetricGraph<T>,
        x: Configuration<T>,
    ) -> Result<Self, ModelError> {
        let r = relation(g, &x, m.relation);
        let ld = log_density_with(m, g, &x, &r);
        if ld == T::neg_infinity() {
            return Err(ModelError::ZeroDensity);
        }
        Ok(SamplerState {
            config: x,
            relation: r,
            log_density: ld,
            iteration: 0,
            acceptance: Acceptance::default(),
        })
    }

    pub fn configuration(&self) -> &Configuration<T> {
        &self.config
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn log_density(&self) -> T {
        self.log_density
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn acceptance(&self) -> Acceptance {
        self.acceptance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Birth { accepted: bool },
    Death { accepted: bool },
    /// Death proposed on the empty configuration.
    EmptyDeath,
}

fn accept<T: Scalar, R: Rng + ?Sized>(log_ratio: T, rng: &mut R) -> bool {
    if log_ratio >= T::zero() {
        return true;
    }
    if log_ratio == T::neg_infinity() || log_ratio.is_nan() {
        return false;
    }
    let u: f64 = rng.random();
    u.ln() < log_ratio.as_f64()
}

/// One birth–death Metropolis–Hastings move with uniform proposals.
pub fn birth_death_step<T: Scalar, R: Rng + ?Sized>(
    s: &mut SamplerState<T>,
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    rng: &mut R,
) -> Result<Move, SamplerError> {
    s.iteration += 1;
    let n = s.config.len();
    let log_len = g.total_length().ln();
    let birth: bool = rng.random_bool(0.5);
    if birth {
        s.acceptance.births_proposed += 1;
        let u = g.sample_uniform(rng)?;
        let (log_lambda, xu, ru) = match log_papangelou_with(m, g, &s.config, &s.relation, u) {
            Ok(v) => v,
            // a uniform draw coincides with an existing point with probability zero
            Err(ModelError::Duplicate) => return Ok(Move::Birth { accepted: false }),
            Err(e) => return Err(e.into()),
        };
        let ratio = log_lambda + log_len - T::lit((n + 1) as f64).ln();
        let accepted = accept(ratio, rng);
        if accepted {
            s.log_density = s.log_density + log_lambda;
            s.config = xu;
            s.relation = ru;
            s.acceptance.births_accepted += 1;
        }
        Ok(Move::Birth { accepted })
    } else {
        if n == 0 {
            return Ok(Move::EmptyDeath);
        }
        s.acceptance.deaths_proposed += 1;
        let i = rng.random_range(0..n);
        let x1 = s.config.without(i).expect("index in range");
        let r1 = relation(g, &x1, m.relation);
        let ld1 = log_density_with(m, g, &x1, &r1);
        let ratio = ld1 - s.log_density + T::lit(n as f64).ln() - log_len;
        let accepted = accept(ratio, rng);
        if accepted {
            s.log_density = ld1;
            s.config = x1;
            s.relation = r1;
            s.acceptance.deaths_accepted += 1;
        }
        Ok(Move::Death { accepted })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub iterations: u64,
    pub burn_in: u64,
    pub thin: u64,
    /// Store full configurations in the trace, not only summaries.
    pub keep_configurations: bool,
}

impl Schedule {
    pub fn new(iterations: u64, burn_in: u64, thin: u64) -> Self {
        Schedule {
            iterations,
            burn_in,
            thin,
            keep_configurations: false,
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.thin == 0 {
            return Err(SamplerError::Schedule("thin must be at least 1".into()));
        }
        if self.burn_in > self.iterations {
            return Err(SamplerError::Schedule(format!(
                "burn-in {} exceeds iterations {}",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }

    pub fn recorded(&self) -> u64 {
        (self.iterations - self.burn_in) / self.thin
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub count: usize,
    pub edge_counts: Vec<usize>,
    pub related_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Vec<PointDoc>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub acceptance: Acceptance,
}

impl Trace {
    pub fn counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.count as f64).collect()
    }

    pub fn mean_count(&self) -> f64 {
        let c = self.counts();
        c.iter().sum::<f64>() / c.len().max(1) as f64
    }

    /// Newline-delimited JSON, one record per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Standard error of the mean of a correlated series by non-overlapping
/// batch means.
pub fn batch_means_se(values: &[f64], batches: usize) -> f64 {
    let size = values.len() / batches.max(1);
    if batches < 2 || size == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Runs the chain from `start` (the empty configuration if `None`).
pub fn run_sampler<T: Scalar, R: Rng + ?Sized>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    start: Option<Configuration<T>>,
    schedule: Schedule,
    rng: &mut R,
) -> Result<Trace, SamplerError> {
    schedule.validate()?;
    m.validate()?;
    let mut state = SamplerState::new(m, g, start.unwrap_or_else(Configuration::empty))?;
    let mut records = Vec::with_capacity(schedule.recorded() as usize);
    if schedule.iterations > 0 && g.total_length() <= T::zero() {
        return Err(SamplingError::ZeroLength.into());
    }
    for k in 1..=schedule.iterations {
        birth_death_step(&mut state, m, g, rng)?;
        if k > schedule.burn_in && (k - schedule.burn_in).is_multiple_of(schedule.thin) {
            let x = &state.config;
            records.push(TraceRecord {
                iteration: k,
                count: x.len(),
                edge_counts: x.edge_counts(g.edge_count()),
                related_pairs: state.relation.pairs().len(),
                configuration: schedule.keep_configurations.then(|| configuration_docs(g, x)),
            });
        }
    }
    Ok(Trace {
        records,
        acceptance: state.acceptance,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::markov_model::{log_density, PairInteraction};
    use crate::metric_graph::GraphBuilder;
    use crate::network_voronoi::RelationKind;

    fn path() -> MetricGraph<f64> {
        GraphBuilder::new()
            .vertex("A", None)
            .vertex("B", None)
            .vertex("C", None)
            .edge("ab", "A", "B", 1.0)
            .edge("bc", "B", "C", 2.0)
            .build()
            .unwrap()
    }

    #[test]
    fn schedule_lengths() {
        let g = path();
        let m = InteractionModel::poisson(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = run_sampler(&m, &g, None, Schedule::new(0, 0, 1), &mut rng).unwrap();
        assert!(t.records.is_empty());
        let t = run_sampler(&m, &g, None, Schedule::new(1005, 100, 10), &mut rng).unwrap();
        assert_eq!(t.records.len(), 90);
        assert!(run_sampler(&m, &g, None, Schedule::new(10, 20, 1), &mut rng).is_err());
        assert!(run_sampler(&m, &g, None, Schedule::new(10, 0, 0), &mut rng).is_err());
    }

    #[test]
    fn cached_state_matches_recomputation() {
        let g = path();
        let m = InteractionModel::new(
            2.0,
            PairInteraction::Strauss { gamma: 0.4, r: 0.5 },
            RelationKind::Delaunay,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = SamplerState::new(&m, &g, Configuration::empty()).unwrap();
        for _ in 0..500 {
            birth_death_step(&mut s, &m, &g, &mut rng).unwrap();
            let x = s.configuration();
            assert_eq!(s.relation(), &relation(&g, x, m.relation));
            assert!((s.log_density() - log_density(&m, &g, x)).abs() < 1e-9);
        }
        assert_eq!(s.iteration(), 500);
    }

    #[test]
    fn empty_death_counts_as_step() {
        let g = path();
        let m = InteractionModel::poisson(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = 0;
        for _ in 0..20 {
            let mut s = SamplerState::new(&m, &g, Configuration::empty()).unwrap();
            if birth_death_step(&mut s, &m, &g, &mut rng).unwrap() == Move::EmptyDeath {
                assert!(s.configuration().is_empty());
                assert_eq!(s.iteration(), 1);
                assert_eq!(s.acceptance(), Acceptance::default());
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = path();
        let m = InteractionModel::new(1.0, PairInteraction::Hardcore { r: 0.2 }, RelationKind::Delaunay)
            .unwrap();
        let mut sch = Schedule::new(2000, 100, 7);
        sch.keep_configurations = true;
        let a = run_sampler(&m, &g, None, sch, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = run_sampler(&m, &g, None, sch, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_ndjson(), b.to_ndjson());
        assert_eq!(a.to_ndjson().lines().count(), a.records.len());
    }

    #[test]
    fn batch_means_on_iid_series() {
        let v: Vec<f64> = (0..1000).map(|i| (i % 2) as f64).collect();
        let se = batch_means_se(&v, 10);
        assert!(se.abs() < 1e-12);
        assert!(batch_means_se(&v, 1).is_nan());
    }
}
