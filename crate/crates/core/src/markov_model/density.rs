use super::interaction::{InteractionModel, ModelError};
use crate::metric_graph::{Configuration, MetricGraph, NetworkPoint};
use crate::network_voronoi::{relation, Relation};
use crate::scalar::{CompensatedSum, Scalar};

/// Sum of `log g` over related pairs.
pub(crate) fn log_pair_sum<T: Scalar>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    r: &Relation,
) -> T {
    let pts = x.points();
    let mut total = CompensatedSum::default();
    for (i, j) in r.pairs() {
        total.add(m.pair.log_eval(g.distance_unchecked(&pts[i], &pts[j])));
        if total.value() == T::neg_infinity() {
            break;
        }
    }
    total.value()
}

pub(crate) fn log_density_with<T: Scalar>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    r: &Relation,
) -> T {
    T::lit(x.len() as f64) * m.beta.ln() + log_pair_sum(m, g, x, r)
}

/// Unnormalized log density with respect to the unit-rate Poisson process:
/// `n log β + Σ log g(d(x_i, x_j))` over related pairs. `−∞` when a related
/// pair has `g = 0`.
pub fn log_density<T: Scalar>(m: &InteractionModel<T>, g: &MetricGraph<T>, x: &Configuration<T>) -> T {
    let r = relation(g, x, m.relation);
    log_density_with(m, g, x, &r)
}

/// `log λ(u | x)` given the relation of `x`, computed from the pairs whose
/// status changes when `u` is added.
pub(crate) fn log_papangelou_with<T: Scalar>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    rx: &Relation,
    u: NetworkPoint<T>,
) -> Result<(T, Configuration<T>, Relation), ModelError> {
    let (xu, iu) = x.with_point(u).map_err(|_| ModelError::Duplicate)?;
    let ru = relation(g, &xu, m.relation);
    let shift = |i: usize| if i >= iu { i + 1 } else { i };
    let pts = x.points();
    let mut log = CompensatedSum::default();
    log.add(m.beta.ln());
    for j in ru.neighbors(iu) {
        log.add(m.pair.log_eval(g.distance_unchecked(&u, &xu.points()[j])));
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let before = rx.related(i, j);
            let after = ru.related(shift(i), shift(j));
            if before != after {
                let lg = m.pair.log_eval(g.distance_unchecked(&pts[i], &pts[j]));
                if before {
                    if lg == T::neg_infinity() {
                        return Err(ModelError::ZeroDensity);
                    }
                    log.add(-lg);
                } else {
                    log.add(lg);
                }
            }
        }
    }
    let mut log = log.value();
    if log.is_nan() {
        log = T::neg_infinity();
    }
    Ok((log, xu, ru))
}

/// Papangelou conditional intensity `λ(u | x) = p(x ∪ {u}) / p(x)`.
pub fn papangelou<T: Scalar>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    u: NetworkPoint<T>,
) -> Result<T, ModelError> {
    Ok(log_papangelou(m, g, x, u)?.exp())
}

/// `log λ(u | x)`; stays accurate where `λ` itself underflows.
pub fn log_papangelou<T: Scalar>(
    m: &InteractionModel<T>,
    g: &MetricGraph<T>,
    x: &Configuration<T>,
    u: NetworkPoint<T>,
) -> Result<T, ModelError> {
    let rx = relation(g, x, m.relation);
    if log_pair_sum(m, g, x, &rx) == T::neg_infinity() {
        return Err(ModelError::ZeroDensity);
    }
    Ok(log_papangelou_with(m, g, x, &rx, u)?.0)
}
