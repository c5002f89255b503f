use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network_voronoi::RelationKind;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model parse failure: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("point already in the configuration")]
    Duplicate,
    #[error("current configuration has zero density")]
    ZeroDensity,
}

/// Parametric pair-interaction function `g` of the distance between two
/// related points. All families satisfy `0 ≤ g ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum PairInteraction<T> {
    Constant { c: T },
    /// `gamma` within distance `r`, 1 beyond.
    Strauss { gamma: T, r: T },
    Hardcore { r: T },
    /// `exp(−(sigma/d)^kappa)`.
    Softcore { sigma: T, kappa: T },
}

impl<T: Scalar> PairInteraction<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        let positive = |v: T| v > T::zero() && v.is_finite();
        let ok = match *self {
            PairInteraction::Constant { c } => unit(c),
            PairInteraction::Strauss { gamma, r } => unit(gamma) && positive(r),
            PairInteraction::Hardcore { r } => positive(r),
            PairInteraction::Softcore { sigma, kappa } => positive(sigma) && positive(kappa),
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::Param(format!("{self:?}")))
        }
    }

    pub fn eval(&self, d: T) -> T {
        match *self {
            PairInteraction::Constant { c } => c,
            PairInteraction::Strauss { gamma, r } => {
                if d <= r {
                    gamma
                } else {
                    T::one()
                }
            }
            PairInteraction::Hardcore { r } => {
                if d <= r {
                    T::zero()
                } else {
                    T::one()
                }
            }
            PairInteraction::Softcore { sigma, kappa } => {
                if d <= T::zero() {
                    T::zero()
                } else {
                    (-(sigma / d).powf(kappa)).exp()
                }
            }
        }
    }

    /// `log g(d)`, `−∞` where `g` vanishes.
    pub fn log_eval(&self, d: T) -> T {
        match *self {
            PairInteraction::Softcore { sigma, kappa } if d > T::zero() => -(sigma / d).powf(kappa),
            _ => self.eval(d).ln(),
        }
    }

    /// True when `g ≡ 1`, i.e. the model is a Poisson process.
    pub fn is_trivial(&self) -> bool {
        matches!(*self, PairInteraction::Constant { c } if c == T::one())
    }
}

/// Activity `beta`, pair interaction and the relation deciding which pairs
/// interact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionModel<T> {
    pub beta: T,
    pub pair: PairInteraction<T>,
    #[serde(default = "default_kind")]
    pub relation: RelationKind,
}

fn default_kind() -> RelationKind {
    RelationKind::Delaunay
}

impl<T: Scalar> InteractionModel<T> {
    pub fn new(beta: T, pair: PairInteraction<T>, relation: RelationKind) -> Result<Self, ModelError> {
        let m = InteractionModel { beta, pair, relation };
        m.validate()?;
        Ok(m)
    }

    pub fn poisson(beta: T) -> Self {
        InteractionModel {
            beta,
            pair: PairInteraction::Constant { c: T::one() },
            relation: RelationKind::Delaunay,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(ModelError::Param(format!("beta = {}", self.beta)));
        }
        self.pair.validate()
    }
}

impl<T: Scalar + serde::de::DeserializeOwned> InteractionModel<T> {
    /// `{"beta": 2, "pair": {"family": "strauss", "params": {"gamma": 0.5, "r": 1}},
    /// "relation": "delaunay"}`
    pub fn from_json(document: &str) -> Result<Self, ModelError> {
        let m: Self = serde_json::from_str(document).map_err(|e| ModelError::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}
