//! Dense univariate polynomials over the active scalar field.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;
use crate::scalar::Scalar;

/// A dense univariate polynomial, coefficients in ascending degree.
///
/// Trailing zero coefficients are stripped on construction; the zero
/// polynomial is the empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![S::zero(); d + 1];
        coeffs[d] = S::one();
        Polynomial { coeffs }
    }

    /// Convenience constructor from small integers, ascending degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| S::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluate by Horner's rule.
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// First derivative, by the power rule.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, c)| c.clone() * S::from_int(d as i64))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        )
    }

    /// Coefficients as JSON-ready strings, ascending degree.
    pub fn render_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::render).collect()
    }

    pub fn parse_coeffs(texts: &[String]) -> Result<Self, Error> {
        Ok(Self::new(crate::scalar::parse_all(texts)?))
    }
}

impl<S: Scalar> Add for &Polynomial<S> {
    type Output = Polynomial<S>;

    fn add(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(S::zero);
                let b = rhs.coeffs.get(i).cloned().unwrap_or_else(S::zero);
                a + b
            })
            .collect();
        Polynomial::new(coeffs)
    }
}

impl<S: Scalar> Sub for &Polynomial<S> {
    type Output = Polynomial<S>;

    fn sub(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;

    fn neg(self) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Mul for &Polynomial<S> {
    type Output = Polynomial<S>;

    fn mul(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a.clone() * b.clone();
            }
        }
        Polynomial::new(coeffs)
    }
}
