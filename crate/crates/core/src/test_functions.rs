//! Test functions with exact derivatives of every order.
//!
//! Only families closed under differentiation with closed-form derivatives
//! are admitted; there is no numerical differentiation anywhere. The
//! polynomial family carries scalars of the active field and is the only
//! family that evaluates in exact mode; exponential, sine, and cosine are
//! float-only.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::weights::WeightSpec;

/// A test function the operator can consume: a polynomial, `a * e^(s x)`,
/// `a * sin(t x)`, or `a * cos(t x)`.
///
/// The amplitude `a` starts at 1 and tracks the constant factors produced
/// by differentiation (`s^k` for the exponential, the sign-and-`t^k`
/// 4-cycle for the trigonometric pair).
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction<S> {
    Polynomial(Polynomial<S>),
    Exponential { amplitude: f64, scale: f64 },
    Sine { amplitude: f64, frequency: f64 },
    Cosine { amplitude: f64, frequency: f64 },
}

impl<S: Scalar> TestFunction<S> {
    pub fn polynomial(p: Polynomial<S>) -> Self {
        TestFunction::Polynomial(p)
    }

    pub fn exponential(scale: f64) -> Self {
        TestFunction::Exponential {
            amplitude: 1.0,
            scale,
        }
    }

    pub fn sine(frequency: f64) -> Self {
        TestFunction::Sine {
            amplitude: 1.0,
            frequency,
        }
    }

    pub fn cosine(frequency: f64) -> Self {
        TestFunction::Cosine {
            amplitude: 1.0,
            frequency,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            TestFunction::Polynomial(_) => "polynomial",
            TestFunction::Exponential { .. } => "exponential",
            TestFunction::Sine { .. } => "sine",
            TestFunction::Cosine { .. } => "cosine",
        }
    }

    fn derivative_once(&self) -> Self {
        match self {
            TestFunction::Polynomial(p) => TestFunction::Polynomial(p.derivative()),
            TestFunction::Exponential { amplitude, scale } => TestFunction::Exponential {
                amplitude: amplitude * scale,
                scale: *scale,
            },
            TestFunction::Sine {
                amplitude,
                frequency,
            } => TestFunction::Cosine {
                amplitude: amplitude * frequency,
                frequency: *frequency,
            },
            TestFunction::Cosine {
                amplitude,
                frequency,
            } => TestFunction::Sine {
                amplitude: -amplitude * frequency,
                frequency: *frequency,
            },
        }
    }

    /// The exact k-th derivative, staying within the family.
    pub fn derivative(&self, k: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.derivative_once();
        }
        f
    }

    /// Pointwise value. Non-polynomial families evaluate in float mode
    /// only and return [`Error::ModeUnsupported`] when the scalar field is
    /// exact.
    pub fn evaluate(&self, x: &S) -> Result<S, Error> {
        let unsupported = || Error::ModeUnsupported {
            family: self.family_name(),
        };
        match self {
            TestFunction::Polynomial(p) => Ok(p.eval(x)),
            TestFunction::Exponential { amplitude, scale } => {
                S::from_f64(amplitude * (scale * x.to_f64()).exp()).ok_or_else(unsupported)
            }
            TestFunction::Sine {
                amplitude,
                frequency,
            } => S::from_f64(amplitude * (frequency * x.to_f64()).sin()).ok_or_else(unsupported),
            TestFunction::Cosine {
                amplitude,
                frequency,
            } => S::from_f64(amplitude * (frequency * x.to_f64()).cos()).ok_or_else(unsupported),
        }
    }

    pub fn to_doc(&self) -> TestFunctionDoc {
        match self {
            TestFunction::Polynomial(p) => TestFunctionDoc::Polynomial {
                coeffs: p.render_coeffs(),
            },
            TestFunction::Exponential { amplitude, scale } => TestFunctionDoc::Exponential {
                scale: *scale,
                amplitude: *amplitude,
            },
            TestFunction::Sine {
                amplitude,
                frequency,
            } => TestFunctionDoc::Sine {
                frequency: *frequency,
                amplitude: *amplitude,
            },
            TestFunction::Cosine {
                amplitude,
                frequency,
            } => TestFunctionDoc::Cosine {
                frequency: *frequency,
                amplitude: *amplitude,
            },
        }
    }
}

impl TestFunction<f64> {
    /// Infallible float-mode evaluation for the sampling hot path.
    pub fn eval_float(&self, x: f64) -> f64 {
        match self {
            TestFunction::Polynomial(p) => p.eval(&x),
            TestFunction::Exponential { amplitude, scale } => amplitude * (scale * x).exp(),
            TestFunction::Sine {
                amplitude,
                frequency,
            } => amplitude * (frequency * x).sin(),
            TestFunction::Cosine {
                amplitude,
                frequency,
            } => amplitude * (frequency * x).cos(),
        }
    }
}

/// Whether every `E|f^(k)(U)|` and `E|U f^(k)(U)|` is finite under the
/// weighted chi-squared law described by `spec`.
#[derive(Debug, Clone, PartialEq)]
pub enum Integrability {
    Ok,
    /// First weight index (0-based) whose exponential moment diverges,
    /// with the offending product `2 s lambda_i`.
    Violation { index: usize, product: f64 },
}

impl Integrability {
    pub fn is_ok(&self) -> bool {
        matches!(self, Integrability::Ok)
    }
}

/// Screen a test function against the moment hypotheses of the operator.
///
/// Polynomials have all moments under each chi-squared marginal; sine and
/// cosine derivatives are bounded; both always pass. The exponential
/// family requires `2 s lambda_i < 1` for every weight (the moment
/// generating function domain of each `lambda_i * chi^2` term), strictly:
/// at equality the required expectations diverge.
pub fn integrability_check<S: Scalar>(f: &TestFunction<S>, spec: &WeightSpec<S>) -> Integrability {
    match f {
        TestFunction::Exponential { scale, .. } => {
            match exponential_bound_violation(*scale, spec, 2.0) {
                None => Integrability::Ok,
                Some((index, product)) => Integrability::Violation { index, product },
            }
        }
        _ => Integrability::Ok,
    }
}

/// First index where `factor * s * lambda_i >= 1`, if any. `factor` 2
/// screens integrability of `e^(sU)`; 4 screens its square-integrability.
pub(crate) fn exponential_bound_violation<S: Scalar>(
    scale: f64,
    spec: &WeightSpec<S>,
    factor: f64,
) -> Option<(usize, f64)> {
    spec.weights()
        .iter()
        .map(|w| factor * scale * w.to_f64())
        .enumerate()
        .find(|&(_, product)| product >= 1.0)
}

/// Wire form of a test function. The amplitude is an output of
/// differentiation and defaults to 1 on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TestFunctionDoc {
    Polynomial {
        coeffs: Vec<String>,
    },
    Exponential {
        scale: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Sine {
        frequency: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Cosine {
        frequency: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

impl TestFunctionDoc {
    pub fn parse<S: Scalar>(&self) -> Result<TestFunction<S>, Error> {
        let finite = |name: &str, value: f64| {
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::ParseScalar {
                    text: format!("{name} = {value}"),
                    reason: "parameter must be finite".to_string(),
                })
            }
        };
        Ok(match self {
            TestFunctionDoc::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::ParseScalar {
                        text: "coeffs = []".to_string(),
                        reason: "polynomial needs at least one coefficient".to_string(),
                    });
                }
                TestFunction::Polynomial(Polynomial::parse_coeffs(coeffs)?)
            }
            TestFunctionDoc::Exponential { scale, amplitude } => TestFunction::Exponential {
                amplitude: finite("amplitude", *amplitude)?,
                scale: finite("scale", *scale)?,
            },
            TestFunctionDoc::Sine {
                frequency,
                amplitude,
            } => TestFunction::Sine {
                amplitude: finite("amplitude", *amplitude)?,
                frequency: finite("frequency", *frequency)?,
            },
            TestFunctionDoc::Cosine {
                frequency,
                amplitude,
            } => TestFunction::Cosine {
                amplitude: finite("amplitude", *amplitude)?,
                frequency: finite("frequency", *frequency)?,
            },
        })
    }
}
