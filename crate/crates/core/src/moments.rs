//! Exact expectations under the weighted chi-squared law.
//!
//! This is the brute-force side of the artifact: polynomial expectations
//! computed from exact cumulants, used to certify that the operator has
//! expectation exactly zero without any sampling. Two independent routes
//! are kept deliberately: the cumulant recursion and a direct multinomial
//! expansion over per-coordinate chi-squared moments. A bug in one cannot
//! silently validate a bug in the other.
//!
//! Everything here runs in exact rational mode only; float callers convert
//! at the boundary.

use num_bigint::BigInt;
use num_integer::binomial;

use crate::coefficients::build_table;
use crate::error::Error;
use crate::operator::operator_polynomial;
use crate::poly::Polynomial;
use crate::scalar::{Rational, Scalar};
use crate::weights::WeightSpec;

/// Exact moment data for one spec up to a fixed order. Immutable, so safe
/// to cache and share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    spec: WeightSpec<Rational>,
    cumulants: Vec<Rational>,
    central_moments: Vec<Rational>,
    raw_moments: Vec<Rational>,
    order: usize,
}

impl MomentTable {
    pub fn new(spec: &WeightSpec<Rational>, order: usize) -> Self {
        let kappa = cumulants(spec, order.max(1));
        MomentTable {
            spec: spec.clone(),
            central_moments: moments_from_cumulants(&kappa, order, true),
            raw_moments: moments_from_cumulants(&kappa, order, false),
            cumulants: kappa,
            order,
        }
    }

    pub fn spec(&self) -> &WeightSpec<Rational> {
        &self.spec
    }

    /// `[kappa_1 .. kappa_max(order,1)]`.
    pub fn cumulants(&self) -> &[Rational] {
        &self.cumulants
    }

    /// Central moments `E (U - mu)^j` for `j = 0..order`.
    pub fn central_moments(&self) -> &[Rational] {
        &self.central_moments
    }

    /// Raw moments `E U^j` for `j = 0..order`.
    pub fn raw_moments(&self) -> &[Rational] {
        &self.raw_moments
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1usize), |acc, k| acc * big(k))
}

/// Raw moments `[E Q^0 .. E Q^n]` of a chi-squared variable with `p`
/// degrees of freedom, by the product formula `E Q^j = p (p+2) ... (p+2j-2)`.
pub fn chisq_raw_moments(p: &Rational, n: usize) -> Vec<Rational> {
    let mut moments = Vec::with_capacity(n + 1);
    moments.push(Rational::one());
    let mut running = Rational::one();
    for j in 0..n {
        running *= p.clone() + Rational::from_int(2 * j as i64);
        moments.push(running.clone());
    }
    moments
}

/// Cumulants `[kappa_1 .. kappa_n]` of the weighted sum: by independence
/// and the chi-squared cumulant formula,
/// `kappa_j = sum_i lambda_i^j * 2^(j-1) * (j-1)! * m_i`.
pub fn cumulants(spec: &WeightSpec<Rational>, n: usize) -> Vec<Rational> {
    let mut kappa = Vec::with_capacity(n);
    let mut powers: Vec<Rational> = spec.weights().to_vec();
    for j in 1..=n {
        let factor = Rational::from(big(2).pow(j as u32 - 1) * factorial(j - 1));
        let sum = powers
            .iter()
            .zip(spec.dofs())
            .fold(Rational::zero(), |acc, (wj, m)| {
                acc + wj.clone() * m.clone()
            });
        kappa.push(factor * sum);
        for (power, w) in powers.iter_mut().zip(spec.weights()) {
            *power *= w.clone();
        }
    }
    kappa
}

/// Moments from cumulants via
/// `m_j = sum_{a=0}^{j-1} C(j-1, a) kappa_{a+1} m_{j-1-a}`;
/// zeroing `kappa_1` yields the central moments.
fn moments_from_cumulants(kappa: &[Rational], order: usize, central: bool) -> Vec<Rational> {
    let mut adjusted = kappa.to_vec();
    if central {
        if let Some(first) = adjusted.first_mut() {
            *first = Rational::zero();
        }
    }
    let mut moments = vec![Rational::one()];
    for j in 1..=order {
        let mut m_j = Rational::zero();
        for a in 0..j {
            let weight = Rational::from(binomial(big(j - 1), big(a)));
            m_j += weight * adjusted[a].clone() * moments[j - 1 - a].clone();
        }
        moments.push(m_j);
    }
    moments
}

/// Central moments `[E (U-mu)^0 .. E (U-mu)^n]` by the cumulant recursion.
pub fn central_moments(spec: &WeightSpec<Rational>, n: usize) -> Vec<Rational> {
    moments_from_cumulants(&cumulants(spec, n.max(1)), n, true)
}

/// Raw moments `[E U^0 .. E U^n]` by the cumulant recursion.
pub fn raw_moments(spec: &WeightSpec<Rational>, n: usize) -> Vec<Rational> {
    moments_from_cumulants(&cumulants(spec, n.max(1)), n, false)
}

/// Independent second route to the central moments: expand
/// `E (sum_i lambda_i (Q_i - m_i))^j` multinomially over per-coordinate
/// centered chi-squared moments. Exponential in `r`; meant for
/// cross-checking the cumulant recursion at small `r`.
pub fn central_moments_by_expansion(spec: &WeightSpec<Rational>, n: usize) -> Vec<Rational> {
    let r = spec.r();
    // Per-coordinate centered moments E (Q_i - m_i)^t for t = 0..n.
    let centered: Vec<Vec<Rational>> = spec
        .dofs()
        .iter()
        .map(|m| {
            let raw = chisq_raw_moments(m, n);
            (0..=n)
                .map(|t| {
                    let mut sum = Rational::zero();
                    for (s, raw_s) in raw.iter().enumerate().take(t + 1) {
                        let c = Rational::from(binomial(big(t), big(s)));
                        let shift = (-m.clone()).pow((t - s) as i32);
                        sum += c * raw_s.clone() * shift;
                    }
                    sum
                })
                .collect()
        })
        .collect();

    let mut result = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut total = Rational::zero();
        let mut exponents = vec![0usize; r];
        expand_compositions(j, 0, &mut exponents, &mut |exponents| {
            let mut term = Rational::from(factorial(j));
            for (i, &e) in exponents.iter().enumerate() {
                term /= Rational::from(factorial(e));
                term *= spec.weights()[i].clone().pow(e as i32);
                term *= centered[i][e].clone();
            }
            total += term;
        });
        result.push(total);
    }
    result
}

fn expand_compositions(
    remaining: usize,
    position: usize,
    exponents: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if position + 1 == exponents.len() {
        exponents[position] = remaining;
        visit(exponents);
        return;
    }
    for take in 0..=remaining {
        exponents[position] = take;
        expand_compositions(remaining - take, position + 1, exponents, visit);
    }
}

/// Exact `E f(U - mu)` (centered) or `E f(U)` from the moment table;
/// moment order is `deg f`.
pub fn expect_polynomial(
    spec: &WeightSpec<Rational>,
    f: &Polynomial<Rational>,
    centered: bool,
) -> Rational {
    let order = f.degree().unwrap_or(0);
    let moments = if centered {
        central_moments(spec, order)
    } else {
        raw_moments(spec, order)
    };
    f.coeffs()
        .iter()
        .zip(&moments)
        .fold(Rational::zero(), |acc, (c, m)| acc + c.clone() * m.clone())
}

/// The machine verification that the operator annihilates expectations:
/// compose [`operator_polynomial`] with [`expect_polynomial`]. The result
/// must be exactly zero for every valid spec and polynomial; anything else
/// is reported as [`Error::TheoremViolation`] and signals an
/// implementation bug.
pub fn expect_operator(
    spec: &WeightSpec<Rational>,
    f: &Polynomial<Rational>,
    centered: bool,
) -> Result<Rational, Error> {
    let table = build_table(spec)?;
    let image = operator_polynomial(&table, f, centered);
    let value = expect_polynomial(spec, &image, centered);
    if !value.is_zero() {
        return Err(Error::TheoremViolation {
            value: value.render(),
            form: if centered { "centered" } else { "non-centered" },
        });
    }
    Ok(value)
}

/// Integration-by-parts residual `E((Q - p) f(Q)) - E(2 Q f'(Q))` for
/// `Q ~ chi-squared(p)`, via the raw-moment product formula. Must be
/// exactly zero; anything else is [`Error::LemmaViolation`].
pub fn verify_ibp(p: &Rational, f: &Polynomial<Rational>) -> Result<Rational, Error> {
    let x = Polynomial::monomial(1);
    let shift = Polynomial::new(vec![-p.clone(), Rational::one()]);
    let lhs_poly = &shift * f;
    let rhs_poly = &x.scale(&Rational::from_int(2)) * &f.derivative();

    let order = lhs_poly
        .degree()
        .unwrap_or(0)
        .max(rhs_poly.degree().unwrap_or(0));
    let raw = chisq_raw_moments(p, order);
    let expect = |poly: &Polynomial<Rational>| {
        poly.coeffs()
            .iter()
            .zip(&raw)
            .fold(Rational::zero(), |acc, (c, m)| acc + c.clone() * m.clone())
    };

    let residual = expect(&lhs_poly) - expect(&rhs_poly);
    if !residual.is_zero() {
        return Err(Error::LemmaViolation {
            value: residual.render(),
        });
    }
    Ok(residual)
}
