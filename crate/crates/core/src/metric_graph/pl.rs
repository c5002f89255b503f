use super::graph::{EdgeId, MetricGraph};
use super::point::{NetworkPoint, PointError};
use crate::scalar::{cmp, Scalar};

/// Continuous piecewise-linear function on `[0, len]`, stored as knots and
/// values with linear interpolation in between.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearFn<T> {
    knots: Vec<T>,
    values: Vec<T>,
}

/// Parameter in `[0, 1]` where a linear function going `da → db` crosses zero,
/// when the sign change is strict.
pub(crate) fn crossing<T: Scalar>(da: T, db: T) -> Option<T> {
    if (da < T::zero() && db > T::zero()) || (da > T::zero() && db < T::zero()) {
        Some(da / (da - db))
    } else {
        None
    }
}

impl<T: Scalar> PiecewiseLinearFn<T> {
    pub fn new(knots: Vec<T>, values: Vec<T>) -> Self {
        assert!(knots.len() >= 2 && knots.len() == values.len());
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        PiecewiseLinearFn { knots, values }
    }

    /// `t ↦ start + slope·t` on `[0, len]`.
    pub fn affine(len: T, start: T, slope: T) -> Self {
        Self::new(vec![T::zero(), len], vec![start, start + slope * len])
    }

    /// `t ↦ |t − s|` on `[0, len]`.
    pub fn tent(len: T, s: T) -> Self {
        if s <= T::zero() {
            Self::affine(len, T::zero(), T::one())
        } else if s >= len {
            Self::affine(len, len, -T::one())
        } else {
            Self::new(vec![T::zero(), s, len], vec![s, T::zero(), len - s])
        }
    }

    pub fn domain_len(&self) -> T {
        *self.knots.last().unwrap()
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn eval(&self, t: T) -> T {
        let k = &self.knots;
        if t <= k[0] {
            return self.values[0];
        }
        if t >= k[k.len() - 1] {
            return self.values[k.len() - 1];
        }
        let i = k.partition_point(|&x| x <= t) - 1;
        let f = (t - k[i]) / (k[i + 1] - k[i]);
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }

    /// Slopes of the linear pieces.
    pub fn slopes(&self) -> Vec<T> {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, v)| (v[1] - v[0]) / (k[1] - k[0]))
            .collect()
    }

    /// Pointwise minimum, with exact breakpoints at every crossing.
    pub fn min(&self, other: &Self) -> Self {
        let mut grid: Vec<T> = self.knots.iter().chain(other.knots.iter()).copied().collect();
        grid.sort_by(cmp);
        grid.dedup();
        let mut knots = Vec::with_capacity(grid.len() * 2);
        for w in grid.windows(2) {
            knots.push(w[0]);
            let da = self.eval(w[0]) - other.eval(w[0]);
            let db = self.eval(w[1]) - other.eval(w[1]);
            if let Some(f) = crossing(da, db) {
                let t = w[0] + f * (w[1] - w[0]);
                if t > w[0] && t < w[1] {
                    knots.push(t);
                }
            }
        }
        knots.push(*grid.last().unwrap());
        let values = knots
            .iter()
            .map(|&t| self.eval(t).min(other.eval(t)))
            .collect();
        PiecewiseLinearFn { knots, values }.simplified()
    }

    /// Drops knots where the slope does not change.
    pub fn simplified(self) -> Self {
        let n = self.knots.len();
        if n <= 2 {
            return self;
        }
        let tol = T::lit(1e3) * T::epsilon();
        let mut knots = vec![self.knots[0]];
        let mut values = vec![self.values[0]];
        for i in 1..n - 1 {
            let s0 = (self.values[i] - values[values.len() - 1])
                / (self.knots[i] - knots[knots.len() - 1]);
            let s1 = (self.values[i + 1] - self.values[i]) / (self.knots[i + 1] - self.knots[i]);
            if (s0 - s1).abs() > tol {
                knots.push(self.knots[i]);
                values.push(self.values[i]);
            }
        }
        knots.push(self.knots[n - 1]);
        values.push(self.values[n - 1]);
        PiecewiseLinearFn { knots, values }
    }
}

impl<T: Scalar> MetricGraph<T> {
    /// `t ↦ distance((e, t), x)` on `[0, length(e)]`.
    pub fn distance_profile(
        &self,
        e: EdgeId,
        x: &NetworkPoint<T>,
    ) -> Result<PiecewiseLinearFn<T>, PointError> {
        self.check_point(x)?;
        if e.0 >= self.edge_count() {
            return Err(PointError::UnknownEdge(format!("#{}", e.0)));
        }
        let edge = self.edge(e);
        let len = edge.length;
        let d1 = self.distance_unchecked(&NetworkPoint::Vertex(edge.ends.0), x);
        let d2 = self.distance_unchecked(&NetworkPoint::Vertex(edge.ends.1), x);
        let mut f = PiecewiseLinearFn::affine(len, d1, T::one())
            .min(&PiecewiseLinearFn::affine(len, len + d2, -T::one()));
        if let NetworkPoint::Edge { edge: xe, offset } = *x {
            if xe == e {
                f = f.min(&PiecewiseLinearFn::tent(len, offset));
            }
        }
        Ok(f)
    }
}
