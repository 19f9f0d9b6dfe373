//! Build a coefficient table and certify the operator's zero expectation
//! exactly, no sampling involved.

use stein_chisq::{build_table, expect_operator, Polynomial, Rational, Scalar, WeightSpec};

fn main() -> Result<(), stein_chisq::Error> {
    let spec = WeightSpec::<Rational>::from_ints(&[1, 2], &[1, 1])?;
    let table = build_table(&spec)?; // identity battery asserted here
    assert_eq!(table.lambda_full()[1], Rational::from_int(3));

    // E[T(x)] under the centered law, exactly zero:
    let value = expect_operator(&spec, &Polynomial::monomial(1), true)?;
    assert!(value.is_zero());

    println!(
        "lambda = {:?}, mu sequence = {:?}, operator expectation = {}",
        table
            .lambda_full()
            .iter()
            .map(Scalar::render)
            .collect::<Vec<_>>(),
        table
            .mu_seq()
            .iter()
            .map(Scalar::render)
            .collect::<Vec<_>>(),
        value.render(),
    );
    Ok(())
}
