//! Combinatorial coefficients of the characterizing operator.
//!
//! For weights `lambda_1..lambda_r` the operator is built from the
//! elementary symmetric polynomials
//!
//! ```text
//! Lambda_k     = sum over size-k subsets S of {1..r} of prod_{j in S} lambda_j
//! Lambda_{k,i} = the same sum over subsets of {1..r} \ {i}
//! mu_k         = sum_i lambda_i^2 * Lambda_{k-1,i} * m_i     (k >= 1)
//! mu           = sum_i lambda_i * m_i
//! ```
//!
//! Everything here is a pure function; exact mode is the default for
//! coefficient construction and asserts the full identity battery before a
//! table is returned.

use serde::Serialize;

use crate::error::Error;
use crate::scalar::Scalar;
use crate::weights::WeightSpec;

/// All operator coefficients for one weight spec.
///
/// `lambda_full[k]` is `Lambda_k` (k = 0..r), `lambda_loo[i][k]` is
/// `Lambda_{k,i}` for the 0-based weight index `i`, `mu_seq[k]` is `mu_k`,
/// and `mu` is the mean of the weighted sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<S> {
    spec: WeightSpec<S>,
    lambda_full: Vec<S>,
    lambda_loo: Vec<Vec<S>>,
    mu_seq: Vec<S>,
    mu: S,
}

/// One-pass recurrence for all elementary symmetric polynomials of the
/// weights: process one weight at a time, updating degrees in descending
/// order so each weight enters every product at most once.
pub fn elementary_symmetric<S: Scalar>(weights: &[S]) -> Result<Vec<S>, Error> {
    if weights.is_empty() {
        return Err(Error::EmptySpec);
    }
    if let Some(index) = weights.iter().position(Scalar::is_zero) {
        return Err(Error::InvalidWeight { index });
    }
    Ok(symmetric_recurrence(weights.iter()))
}

fn symmetric_recurrence<'a, S: Scalar + 'a>(weights: impl Iterator<Item = &'a S>) -> Vec<S> {
    let mut table = vec![S::one()];
    for w in weights {
        table.push(S::zero());
        for k in (1..table.len()).rev() {
            let bump = w.clone() * table[k - 1].clone();
            table[k] += bump;
        }
    }
    table
}

/// Leave-one-out coefficients `[Lambda_{0,i} .. Lambda_{r,i}]` for the
/// 0-based index `i`, by rerunning the symmetric recurrence on the weights
/// with entry `i` removed and appending the vanishing top coefficient
/// `Lambda_{r,i} = 0`. Recomputation is O(r^2) overall but avoids the
/// numerically unstable polynomial deflation in float mode.
pub fn leave_one_out<S: Scalar>(weights: &[S], i: usize) -> Result<Vec<S>, Error> {
    if i >= weights.len() {
        return Err(Error::BadIndex {
            index: i,
            r: weights.len(),
        });
    }
    if let Some(index) = weights.iter().position(Scalar::is_zero) {
        return Err(Error::InvalidWeight { index });
    }
    let mut row = symmetric_recurrence(
        weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w),
    );
    row.push(S::zero());
    Ok(row)
}

/// The mean `mu = sum_i lambda_i m_i` and the sequence `[mu_0 .. mu_r]`
/// with `mu_0 = 0` and `mu_k = sum_i lambda_i^2 Lambda_{k-1,i} m_i`.
pub fn mu_sequence<S: Scalar>(spec: &WeightSpec<S>) -> (S, Vec<S>) {
    let r = spec.r();
    let loo: Vec<Vec<S>> = (0..r)
        .map(|i| leave_one_out(spec.weights(), i).expect("validated spec"))
        .collect();
    let mu = spec
        .weights()
        .iter()
        .zip(spec.dofs())
        .fold(S::zero(), |acc, (w, m)| acc + w.clone() * m.clone());
    let mut mus = Vec::with_capacity(r + 1);
    mus.push(S::zero());
    for k in 1..=r {
        let mut mu_k = S::zero();
        for ((w, m), row) in spec.weights().iter().zip(spec.dofs()).zip(&loo) {
            mu_k += w.clone() * w.clone() * row[k - 1].clone() * m.clone();
        }
        mus.push(mu_k);
    }
    (mu, mus)
}

/// Assemble the full coefficient table. In exact mode every identity in
/// [`verify_table`] is asserted before the table is returned; a violation
/// is an implementation bug, never a user error.
pub fn build_table<S: Scalar>(spec: &WeightSpec<S>) -> Result<CoefficientTable<S>, Error> {
    let lambda_full = elementary_symmetric(spec.weights())?;
    let lambda_loo = (0..spec.r())
        .map(|i| leave_one_out(spec.weights(), i))
        .collect::<Result<Vec<_>, _>>()?;
    let (mu, mu_seq) = mu_sequence(spec);
    let table = CoefficientTable {
        spec: spec.clone(),
        lambda_full,
        lambda_loo,
        mu_seq,
        mu,
    };
    if S::EXACT {
        if let Some(check) = verify_table(&table).iter().find(|c| !c.pass) {
            return Err(Error::InternalInconsistency {
                identity: check.name,
                detail: check.detail.clone().unwrap_or_default(),
            });
        }
    }
    Ok(table)
}

impl<S: Scalar> CoefficientTable<S> {
    pub fn spec(&self) -> &WeightSpec<S> {
        &self.spec
    }

    pub fn r(&self) -> usize {
        self.spec.r()
    }

    /// `[Lambda_0 .. Lambda_r]`.
    pub fn lambda_full(&self) -> &[S] {
        &self.lambda_full
    }

    /// Row `i` is `[Lambda_{0,i} .. Lambda_{r,i}]`, `i` 0-based.
    pub fn lambda_loo(&self) -> &[Vec<S>] {
        &self.lambda_loo
    }

    /// `[mu_0 .. mu_r]`.
    pub fn mu_seq(&self) -> &[S] {
        &self.mu_seq
    }

    /// `mu = E(U)`.
    pub fn mu(&self) -> &S {
        &self.mu
    }

    pub fn to_doc(&self) -> CoefficientTableDoc {
        CoefficientTableDoc {
            lambda_full: self.lambda_full.iter().map(Scalar::render).collect(),
            lambda_loo: self
                .lambda_loo
                .iter()
                .map(|row| row.iter().map(Scalar::render).collect())
                .collect(),
            mu_seq: self.mu_seq.iter().map(Scalar::render).collect(),
            mu: self.mu.render(),
        }
    }

    /// Negative-control hook: damage one coefficient so the identity
    /// battery must report a failure. Only for exercising failure paths.
    #[doc(hidden)]
    pub fn corrupt_for_negative_control(&mut self) {
        self.lambda_full[1] += S::one();
    }
}

/// Wire form of a coefficient table, scalars rendered as strings.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTableDoc {
    pub lambda_full: Vec<String>,
    pub lambda_loo: Vec<Vec<String>>,
    pub mu_seq: Vec<String>,
    pub mu: String,
}

/// Outcome of one identity check over a coefficient table.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl IdentityCheck {
    fn passed(name: &'static str) -> Self {
        IdentityCheck {
            name,
            pass: true,
            detail: None,
        }
    }

    fn failed(name: &'static str, detail: String) -> Self {
        IdentityCheck {
            name,
            pass: false,
            detail: Some(detail),
        }
    }
}

fn check(name: &'static str, violation: Option<String>) -> IdentityCheck {
    match violation {
        None => IdentityCheck::passed(name),
        Some(detail) => IdentityCheck::failed(name, detail),
    }
}

/// Run the identity battery over a table: the boundary values
/// `Lambda_0 = Lambda_{0,i} = 1`, `Lambda_{r,i} = 0`, `mu_0 = 0`,
/// `mu_r = Lambda_r * mu`, the two leave-one-out recurrences
/// `Lambda_k - Lambda_{k-1,i} lambda_i = Lambda_{k,i}` and
/// `sum_i Lambda_{k,i} lambda_i = (k+1) Lambda_{k+1}`, and the row sum
/// `sum_i Lambda_{k,i} = (r-k) Lambda_k`.
///
/// Comparisons are exact equality, so this is meaningful in exact mode
/// only; [`build_table`] runs it automatically there.
pub fn verify_table<S: Scalar>(table: &CoefficientTable<S>) -> Vec<IdentityCheck> {
    let r = table.r();
    let one = S::one();
    let lambda = table.lambda_full();
    let loo = table.lambda_loo();
    let weights = table.spec().weights();

    let mut checks = Vec::new();

    let mut bad = None;
    if lambda[0] != one {
        bad = Some(format!("Lambda_0 = {}", lambda[0]));
    }
    for (i, row) in loo.iter().enumerate() {
        if row[0] != one && bad.is_none() {
            bad = Some(format!("Lambda_0,{i} = {}", row[0]));
        }
    }
    checks.push(check("unit_constant_term", bad));

    let bad = loo
        .iter()
        .enumerate()
        .find(|(_, row)| !row[r].is_zero())
        .map(|(i, row)| format!("Lambda_{r},{i} = {}", row[r]));
    checks.push(check("vanishing_top_loo", bad));

    let bad = (!table.mu_seq()[0].is_zero()).then(|| format!("mu_0 = {}", table.mu_seq()[0]));
    checks.push(check("zero_mu0", bad));

    let expected = lambda[r].clone() * table.mu().clone();
    let bad = (table.mu_seq()[r] != expected)
        .then(|| format!("mu_{r} = {} but Lambda_{r} * mu = {expected}", table.mu_seq()[r]));
    checks.push(check("mu_top_factorization", bad));

    let mut bad = None;
    'outer: for i in 0..r {
        for k in 1..=r {
            let lhs = lambda[k].clone() - loo[i][k - 1].clone() * weights[i].clone();
            if lhs != loo[i][k] {
                bad = Some(format!("i={i}, k={k}: {lhs} != {}", loo[i][k]));
                break 'outer;
            }
        }
    }
    checks.push(check("loo_peel_recurrence", bad));

    let mut bad = None;
    for k in 0..r {
        let lhs = (0..r).fold(S::zero(), |acc, i| {
            acc + loo[i][k].clone() * weights[i].clone()
        });
        let rhs = S::from_int((k + 1) as i64) * lambda[k + 1].clone();
        if lhs != rhs {
            bad = Some(format!("k={k}: {lhs} != {rhs}"));
            break;
        }
    }
    checks.push(check("weighted_loo_sum", bad));

    let mut bad = None;
    for k in 0..=r {
        let lhs = (0..r).fold(S::zero(), |acc, i| acc + loo[i][k].clone());
        let rhs = S::from_int((r - k) as i64) * lambda[k].clone();
        if lhs != rhs {
            bad = Some(format!("k={k}: {lhs} != {rhs}"));
            break;
        }
    }
    checks.push(check("loo_row_sum", bad));

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn rational_weights(ints: &[i64]) -> Vec<Rational> {
        ints.iter().map(|&w| Rational::from_int(w)).collect()
    }

    fn ints(values: &[i64]) -> Vec<Rational> {
        rational_weights(values)
    }

    /// Independent oracle: enumerate every subset of the weights by
    /// bitmask and accumulate the size-k products directly.
    fn subset_enumeration_oracle(weights: &[Rational]) -> Vec<Rational> {
        let r = weights.len();
        let mut sums = vec![Rational::zero(); r + 1];
        for mask in 0u32..(1 << r) {
            let mut product = Rational::one();
            for (j, w) in weights.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    product *= w.clone();
                }
            }
            sums[mask.count_ones() as usize] += product;
        }
        sums
    }

    #[test]
    fn matches_enumerated_subset_sums() {
        assert_eq!(
            elementary_symmetric(&ints(&[1, 2, 3])).unwrap(),
            ints(&[1, 6, 11, 6])
        );
        assert_eq!(elementary_symmetric(&ints(&[5])).unwrap(), ints(&[1, 5]));
        assert_eq!(
            elementary_symmetric(&ints(&[1, -1])).unwrap(),
            ints(&[1, 0, -1])
        );
    }

    #[test]
    fn rejects_zero_weights_and_empty_input() {
        assert_eq!(
            elementary_symmetric(&ints(&[1, 0, 3])),
            Err(Error::InvalidWeight { index: 1 })
        );
        assert_eq!(
            elementary_symmetric::<Rational>(&[]),
            Err(Error::EmptySpec)
        );
    }

    #[test]
    fn leave_one_out_drops_the_indexed_weight() {
        assert_eq!(
            leave_one_out(&ints(&[1, 2, 3]), 0).unwrap(),
            ints(&[1, 5, 6, 0])
        );
        // Peel recurrence at i=0, k=2: Lambda_2 - lambda_0 * Lambda_{1,0}.
        let full = elementary_symmetric(&ints(&[1, 2, 3])).unwrap();
        let row = leave_one_out(&ints(&[1, 2, 3]), 0).unwrap();
        assert_eq!(
            full[2].clone() - Rational::from_int(1) * row[1].clone(),
            row[2]
        );
        assert_eq!(leave_one_out(&ints(&[5]), 0).unwrap(), ints(&[1, 0]));
        assert_eq!(
            leave_one_out(&ints(&[5]), 1),
            Err(Error::BadIndex { index: 1, r: 1 })
        );
    }

    #[test]
    fn mu_sequence_frozen_values() {
        let spec = WeightSpec::<Rational>::from_ints(&[1, 2, 3], &[1, 1, 1]).unwrap();
        let (mu, mus) = mu_sequence(&spec);
        assert_eq!(mu, Rational::from_int(6));
        assert_eq!(mus, ints(&[0, 14, 48, 36]));

        let spec = WeightSpec::<Rational>::from_ints(&[1, 2], &[1, 1]).unwrap();
        assert_eq!(mu_sequence(&spec), (Rational::from_int(3), ints(&[0, 5, 6])));

        let spec = WeightSpec::<Rational>::from_ints(&[1, -1], &[1, 1]).unwrap();
        assert_eq!(mu_sequence(&spec), (Rational::from_int(0), ints(&[0, 2, 0])));
    }

    #[test]
    fn build_table_frozen_values() {
        let spec = WeightSpec::<Rational>::from_ints(&[1, 2], &[1, 1]).unwrap();
        let table = build_table(&spec).unwrap();
        assert_eq!(table.lambda_full(), &ints(&[1, 3, 2])[..]);
        assert_eq!(table.mu_seq(), &ints(&[0, 5, 6])[..]);
        assert_eq!(table.mu(), &Rational::from_int(3));

        let spec = WeightSpec::<Rational>::from_ints(&[5], &[2]).unwrap();
        let table = build_table(&spec).unwrap();
        assert_eq!(table.lambda_full(), &ints(&[1, 5])[..]);
        assert_eq!(table.mu_seq(), &ints(&[0, 50])[..]);
        assert_eq!(table.mu(), &Rational::from_int(10));
    }

    #[test]
    fn corrupted_table_fails_verification() {
        let spec = WeightSpec::<Rational>::from_ints(&[1, 2], &[1, 1]).unwrap();
        let mut table = build_table(&spec).unwrap();
        table.corrupt_for_negative_control();
        assert!(verify_table(&table).iter().any(|c| !c.pass));
    }

    #[test]
    fn table_doc_renders_rational_strings() {
        let spec = WeightSpec::<Rational>::from_ints(&[1, 2], &[1, 1]).unwrap();
        let doc = build_table(&spec).unwrap().to_doc();
        assert_eq!(doc.lambda_full, vec!["1", "3", "2"]);
        assert_eq!(doc.mu, "3");
    }

    /// Distinct nonzero integer weights in [-9, 9] and integer dofs in
    /// [1, 10], up to the requested count.
    fn spec_strategy(max_r: usize) -> impl Strategy<Value = WeightSpec<Rational>> {
        let pool: Vec<i64> = (-9..=9).filter(|&w| w != 0).collect();
        (1..=max_r)
            .prop_flat_map(move |r| {
                (
                    proptest::sample::subsequence(pool.clone(), r),
                    proptest::collection::vec(1i64..=10, r),
                )
            })
            .prop_map(|(weights, dofs)| {
                WeightSpec::<Rational>::from_ints(&weights, &dofs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn recurrence_agrees_with_enumeration(weights in proptest::sample::subsequence(
            (-9i64..=9).filter(|&w| w != 0).collect::<Vec<_>>(), 1..=12)) {
            let weights = rational_weights(&weights);
            prop_assert_eq!(
                elementary_symmetric(&weights).unwrap(),
                subset_enumeration_oracle(&weights)
            );
        }

        #[test]
        fn leave_one_out_equals_symmetric_of_remainder(
            weights in proptest::sample::subsequence(
                (-9i64..=9).filter(|&w| w != 0).collect::<Vec<_>>(), 2..=8),
            pick in 0usize..8,
        ) {
            let weights = rational_weights(&weights);
            let i = pick % weights.len();
            let mut rest = weights.clone();
            rest.remove(i);
            let mut expected = elementary_symmetric(&rest).unwrap();
            expected.push(Rational::zero());
            prop_assert_eq!(leave_one_out(&weights, i).unwrap(), expected);
        }

        #[test]
        fn identity_battery_holds_exactly(spec in spec_strategy(8)) {
            let table = build_table(&spec).unwrap();
            for check in verify_table(&table) {
                prop_assert!(check.pass, "{} failed: {:?}", check.name, check.detail);
            }
        }

        #[test]
        fn float_mode_tracks_exact_mode(spec in spec_strategy(8)) {
            let exact = build_table(&spec).unwrap();
            let float = build_table(&spec.to_float()).unwrap();
            let close = |a: &Rational, b: f64| {
                let a = a.to_f64();
                (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
            };
            for (a, b) in exact.lambda_full().iter().zip(float.lambda_full()) {
                prop_assert!(close(a, *b));
            }
            for (a, b) in exact.mu_seq().iter().zip(float.mu_seq()) {
                prop_assert!(close(a, *b));
            }
            prop_assert!(close(exact.mu(), *float.mu()));
        }
    }
}
