//! Weight specifications for laws of the form `U = sum_i lambda_i * Q_i`
//! with independent `Q_i ~ chi-squared(m_i)`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{parse_all, Rational, Scalar};

/// The law of `U`: weights `lambda_1..lambda_r` (nonzero, pairwise distinct
/// after canonical merge) and strictly positive degrees of freedom
/// `m_1..m_r`.
///
/// Input with repeated weights is accepted and canonically merged by
/// summing the dofs of equal weights: `lambda*Q_a + lambda*Q_b` has the law
/// of `lambda*Q_{a+b}`. The merge is recorded in [`WeightSpec::merged_from`].
///
/// Dofs may be any positive scalars, not just integers; the chi-squared
/// marginal then generalizes to the gamma law with shape `m/2` and scale 2.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec<S> {
    weights: Vec<S>,
    dofs: Vec<S>,
    merged_from: Option<usize>,
}

impl<S: Scalar> WeightSpec<S> {
    pub fn new(weights: Vec<S>, dofs: Vec<S>) -> Result<Self, Error> {
        if weights.is_empty() {
            return Err(Error::EmptySpec);
        }
        if weights.len() != dofs.len() {
            return Err(Error::LengthMismatch {
                weights: weights.len(),
                dofs: dofs.len(),
            });
        }
        for (index, w) in weights.iter().enumerate() {
            if !w.is_finite() || w.is_zero() {
                return Err(Error::InvalidWeight { index });
            }
        }
        for (index, m) in dofs.iter().enumerate() {
            if !m.is_finite() || !m.is_positive() {
                return Err(Error::InvalidDof { index });
            }
        }

        let given = weights.len();
        let mut merged_weights: Vec<S> = Vec::with_capacity(given);
        let mut merged_dofs: Vec<S> = Vec::with_capacity(given);
        for (w, m) in weights.into_iter().zip(dofs) {
            match merged_weights.iter().position(|seen| *seen == w) {
                Some(at) => merged_dofs[at] += m,
                None => {
                    merged_weights.push(w);
                    merged_dofs.push(m);
                }
            }
        }
        let merged_from = (merged_weights.len() < given).then_some(given);
        Ok(WeightSpec {
            weights: merged_weights,
            dofs: merged_dofs,
            merged_from,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(weights: &[i64], dofs: &[i64]) -> Result<Self, Error> {
        Self::new(
            weights.iter().map(|&w| S::from_int(w)).collect(),
            dofs.iter().map(|&m| S::from_int(m)).collect(),
        )
    }

    /// Number of distinct weights after the canonical merge.
    pub fn r(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn dofs(&self) -> &[S] {
        &self.dofs
    }

    /// The number of weight entries supplied before the canonical merge,
    /// when a merge actually happened.
    pub fn merged_from(&self) -> Option<usize> {
        self.merged_from
    }

    /// Lossy conversion to the float-mode spec used by the sampling
    /// pipeline.
    pub fn to_float(&self) -> WeightSpec<f64> {
        WeightSpec {
            weights: self.weights.iter().map(Scalar::to_f64).collect(),
            dofs: self.dofs.iter().map(Scalar::to_f64).collect(),
            merged_from: self.merged_from,
        }
    }

    pub fn to_doc(&self) -> WeightSpecDoc {
        WeightSpecDoc {
            weights: self.weights.iter().map(Scalar::render).collect(),
            dofs: self.dofs.iter().map(Scalar::render).collect(),
            mode: if S::EXACT { Mode::Exact } else { Mode::Float },
        }
    }
}

/// Arithmetic mode requested by a spec document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// Wire form of a weight spec: scalars as decimal strings or `"p/q"`
/// rational strings, plus the arithmetic mode (default `exact`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpecDoc {
    pub weights: Vec<String>,
    pub dofs: Vec<String>,
    #[serde(default)]
    pub mode: Mode,
}

impl WeightSpecDoc {
    pub fn parse_exact(&self) -> Result<WeightSpec<Rational>, Error> {
        WeightSpec::new(parse_all(&self.weights)?, parse_all(&self.dofs)?)
    }

    pub fn parse_float(&self) -> Result<WeightSpec<f64>, Error> {
        WeightSpec::new(parse_all(&self.weights)?, parse_all(&self.dofs)?)
    }
}
