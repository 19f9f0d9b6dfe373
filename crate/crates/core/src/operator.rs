//! The characterizing operators for weighted sums of independent
//! chi-squared variables.
//!
//! For a coefficient table over weights `lambda_1..lambda_r` the centered
//! operator is
//!
//! ```text
//! Tf(x) = sum_{k=0}^{r} (-2)^k (mu_k + Lambda_k x) f^(k)(x)
//! ```
//!
//! and the non-centered variant replaces the affine factor by
//! `mu_k + Lambda_k x - Lambda_k mu`. Both have expectation zero under
//! their law (centered: `U - mu`; non-centered: `U`), which is what the
//! exact oracle in [`crate::moments`] certifies.

use crate::coefficients::CoefficientTable;
use crate::error::Error;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::test_functions::TestFunction;

fn apply<S: Scalar>(
    table: &CoefficientTable<S>,
    f: &TestFunction<S>,
    x: &S,
    centered: bool,
) -> Result<S, Error> {
    let r = table.r();
    // Materialize each derivative once; the trigonometric families would
    // otherwise re-walk their 4-cycle per term.
    let mut derivs = Vec::with_capacity(r + 1);
    derivs.push(f.clone());
    for k in 0..r {
        let next = derivs[k].derivative(1);
        derivs.push(next);
    }

    let mut acc = S::zero();
    let mut power = S::one(); // (-2)^k, an exact integer in both modes
    let minus_two = S::from_int(-2);
    for (k, derivative) in derivs.iter().enumerate() {
        let fk = derivative.evaluate(x)?;
        let mut affine =
            table.mu_seq()[k].clone() + table.lambda_full()[k].clone() * x.clone();
        if !centered {
            affine -= table.lambda_full()[k].clone() * table.mu().clone();
        }
        acc += power.clone() * affine * fk;
        power *= minus_two.clone();
    }
    Ok(acc)
}

/// Evaluate the centered operator at `x`; exact in rational mode for
/// polynomial `f`.
pub fn apply_centered<S: Scalar>(
    table: &CoefficientTable<S>,
    f: &TestFunction<S>,
    x: &S,
) -> Result<S, Error> {
    apply(table, f, x, true)
}

/// Evaluate the non-centered operator at `x`.
pub fn apply_noncentered<S: Scalar>(
    table: &CoefficientTable<S>,
    f: &TestFunction<S>,
    x: &S,
) -> Result<S, Error> {
    apply(table, f, x, false)
}

/// The exact polynomial image of a polynomial test function under the
/// operator: degree `deg(f) + 1`, and evaluating it anywhere agrees with
/// [`apply_centered`] / [`apply_noncentered`].
pub fn operator_polynomial<S: Scalar>(
    table: &CoefficientTable<S>,
    f: &Polynomial<S>,
    centered: bool,
) -> Polynomial<S> {
    let r = table.r();
    let mut acc = Polynomial::zero();
    let mut dk = f.clone();
    let mut power = S::one();
    let minus_two = S::from_int(-2);
    for k in 0..=r {
        if dk.is_zero() {
            break;
        }
        let mut constant = table.mu_seq()[k].clone();
        if !centered {
            constant -= table.lambda_full()[k].clone() * table.mu().clone();
        }
        let affine = Polynomial::new(vec![constant, table.lambda_full()[k].clone()]);
        acc = &acc + &(&affine * &dk).scale(&power);
        dk = dk.derivative();
        power *= minus_two.clone();
    }
    acc
}

/// The classical operator for one centered chi-squared law with `p`
/// degrees of freedom: `2(x + p) f'(x) - x f(x)`.
///
/// This is the negative of the r = 1 centered operator; both
/// characterize the same law.
pub fn single_chisq_operator<S: Scalar>(
    p: &S,
    f: &TestFunction<S>,
    x: &S,
) -> Result<S, Error> {
    let two = S::from_int(2);
    let fprime = f.derivative(1).evaluate(x)?;
    let fx = f.evaluate(x)?;
    Ok(two * (x.clone() + p.clone()) * fprime - x.clone() * fx)
}
