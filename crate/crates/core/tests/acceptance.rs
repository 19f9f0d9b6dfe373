//! Acceptance battery: every release-gating property of the crate, one
//! test per criterion, each printing a PASS line with its evidence.
//!
//! Exact criteria tolerate nothing (rational arithmetic, equality to
//! zero); stochastic criteria pin their seeds so reruns are bit-for-bit
//! reproducible.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use stein_chisq::coefficients::{build_table, elementary_symmetric, leave_one_out};
use stein_chisq::gof::{bootstrap_pvalue, FunctionBattery};
use stein_chisq::moments::{
    central_moments, central_moments_by_expansion, expect_operator, verify_ibp,
};
use stein_chisq::operator::{apply_centered, single_chisq_operator};
use stein_chisq::poly::Polynomial;
use stein_chisq::scalar::{Rational, Scalar};
use stein_chisq::simulation::{mc_expect_operator, sample};
use stein_chisq::test_functions::TestFunction;
use stein_chisq::weights::WeightSpec;

/// Deterministic random specs: `r <= max_r` distinct nonzero integer
/// weights drawn from `[-bound, bound]`, integer dofs in `[1, 10]`.
fn random_specs(
    count: usize,
    max_r: usize,
    bound: i64,
    seed: u64,
) -> Vec<WeightSpec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = |n: u64| (rng.next_u64() % n) as i64;
    (0..count)
        .map(|_| {
            let r = 1 + pick(max_r as u64) as usize;
            let mut pool: Vec<i64> = (-bound..=bound).filter(|&w| w != 0).collect();
            let mut weights = Vec::with_capacity(r);
            for _ in 0..r {
                let at = pick(pool.len() as u64) as usize;
                weights.push(pool.swap_remove(at));
            }
            let dofs: Vec<i64> = (0..r).map(|_| 1 + pick(10)).collect();
            WeightSpec::from_ints(&weights, &dofs).expect("valid random spec")
        })
        .collect()
}

#[test]
fn zero_expectation_of_operator_is_exact() {
    let specs = random_specs(100, 6, 5, 0xA11CE);
    let mut checked = 0usize;
    for spec in &specs {
        for degree in 0..=8 {
            let monomial = Polynomial::monomial(degree);
            for centered in [true, false] {
                let value = expect_operator(spec, &monomial, centered)
                    .expect("operator expectation must be exactly zero");
                assert!(value.is_zero());
                checked += 1;
            }
        }
    }
    println!(
        "PASS zero expectation: {} operator expectations over {} specs, all exactly 0",
        checked,
        specs.len()
    );
}

#[test]
fn leave_one_out_identities_are_exact() {
    let specs = random_specs(100, 6, 5, 0xA11CE);
    for spec in &specs {
        let w = spec.weights();
        let r = spec.r();
        let full = elementary_symmetric(w).unwrap();
        let loo: Vec<Vec<Rational>> =
            (0..r).map(|i| leave_one_out(w, i).unwrap()).collect();
        for i in 0..r {
            for k in 1..=r {
                assert_eq!(
                    full[k].clone() - loo[i][k - 1].clone() * w[i].clone(),
                    loo[i][k],
                    "peel identity failed at i={i}, k={k}"
                );
            }
        }
        for k in 0..r {
            let weighted: Rational = (0..r)
                .map(|i| loo[i][k].clone() * w[i].clone())
                .fold(Rational::zero(), |a, b| a + b);
            assert_eq!(
                weighted,
                Rational::from_int((k + 1) as i64) * full[k + 1].clone(),
                "weighted sum identity failed at k={k}"
            );
        }
        for k in 0..=r {
            let row_sum: Rational = (0..r)
                .map(|i| loo[i][k].clone())
                .fold(Rational::zero(), |a, b| a + b);
            assert_eq!(
                row_sum,
                Rational::from_int((r - k) as i64) * full[k].clone(),
                "row sum identity failed at k={k}"
            );
        }
    }
    println!(
        "PASS leave-one-out identities: peel, weighted-sum, and row-sum checks exact on {} specs",
        specs.len()
    );
}

#[test]
fn integration_by_parts_is_exact() {
    let mut checked = 0usize;
    for p in 1..=20i64 {
        for degree in 0..=8 {
            let residual = verify_ibp(&Rational::from_int(p), &Polynomial::monomial(degree))
                .expect("integration-by-parts residual must vanish");
            assert!(residual.is_zero());
            checked += 1;
        }
    }
    println!("PASS integration by parts: {checked} residuals exactly 0 (p in 1..=20, degree <= 8)");
}

#[test]
fn structural_identities_hold_on_every_table() {
    let mut specs = random_specs(100, 6, 5, 0xA11CE);
    specs.push(WeightSpec::from_ints(&[1, 2], &[1, 1]).unwrap());
    specs.push(WeightSpec::from_ints(&[1, -1], &[1, 1]).unwrap());
    specs.push(WeightSpec::from_ints(&[5], &[2]).unwrap());
    let count = specs.len();
    for spec in specs {
        let r = spec.r();
        let table = build_table(&spec).expect("construction asserts the identity battery");
        assert_eq!(table.lambda_full()[0], Rational::one());
        assert!(table.mu_seq()[0].is_zero());
        for (i, row) in table.lambda_loo().iter().enumerate() {
            assert!(row[r].is_zero(), "top leave-one-out nonzero at i={i}");
        }
        assert_eq!(
            table.mu_seq()[r],
            table.lambda_full()[r].clone() * table.mu().clone()
        );
    }
    println!("PASS structural identities: boundary values exact on {count} tables");
}

#[test]
fn moment_oracles_agree_cross_route() {
    let specs = random_specs(20, 3, 5, 0xBEEF);
    for spec in &specs {
        assert_eq!(
            central_moments(spec, 6),
            central_moments_by_expansion(spec, 6),
            "cumulant recursion and multinomial expansion disagree"
        );
    }
    println!(
        "PASS cross-oracle equivalence: central moments to order 6 identical on {} specs (r <= 3)",
        specs.len()
    );
}

#[test]
fn monte_carlo_operator_means_are_consistent_with_zero() {
    let specs: Vec<WeightSpec<f64>> = [
        (vec![1, 2], vec![1, 1]),
        (vec![1, -1], vec![1, 1]),
        (vec![1, 2, 3], vec![1, 1, 1]),
        (vec![2, 5], vec![3, 1]),
        (vec![-1, 3], vec![2, 2]),
        (vec![1, 4, -2], vec![1, 2, 1]),
        (vec![3], vec![5]),
        (vec![1, 2, 3, 4], vec![1, 1, 1, 1]),
        (vec![-2, -3], vec![4, 1]),
        (vec![5, 1, -1], vec![1, 1, 6]),
    ]
    .iter()
    .map(|(w, m)| WeightSpec::from_ints(w, m).unwrap())
    .collect();

    let n = 1_000_000;
    let mut passes = 0usize;
    let mut total = 0usize;
    let mut seed = 0x5EED_0001u64;
    for spec in &specs {
        let max_abs = spec.weights().iter().fold(0.0f64, |a, w| a.max(w.abs()));
        let functions: [TestFunction<f64>; 4] = [
            TestFunction::polynomial(Polynomial::from_ints(&[0, 1])),
            TestFunction::polynomial(Polynomial::from_ints(&[0, 0, 1])),
            TestFunction::sine(1.0),
            // Scale keeps 4*s*lambda <= 1/2, safely inside both guards.
            TestFunction::exponential(1.0 / (8.0 * max_abs)),
        ];
        for f in &functions {
            let est = mc_expect_operator(spec, f, true, n, seed, 16).unwrap();
            total += 1;
            if est.mean.abs() <= 4.0 * est.std_error {
                passes += 1;
            }
            seed += 1;
        }
    }
    assert!(
        passes >= 38,
        "only {passes} of {total} runs inside the 4-sigma band"
    );
    println!(
        "PASS Monte Carlo consistency: {passes}/{total} runs with |mean| <= 4*std_error at n = 10^6"
    );
}

#[test]
fn single_chisq_operator_is_negated_reduction() {
    let polynomials: Vec<Polynomial<Rational>> = vec![
        Polynomial::from_ints(&[1]),
        Polynomial::from_ints(&[0, 1]),
        Polynomial::from_ints(&[3, -2, 1]),
        Polynomial::from_ints(&[0, 0, 0, 1]),
        Polynomial::from_ints(&[-5, 0, 2, 0, 1]),
    ];
    let mut checked = 0usize;
    for p_dof in [1i64, 3, 7] {
        let p = Rational::from_int(p_dof);
        let table =
            build_table(&WeightSpec::<Rational>::from_ints(&[1], &[p_dof]).unwrap()).unwrap();
        for poly in &polynomials {
            let f = TestFunction::polynomial(poly.clone());
            for j in 0..16i64 {
                let x = Rational::from_ratio(2 * j - 15, 4);
                let classical = single_chisq_operator(&p, &f, &x).unwrap();
                let reduced = apply_centered(&table, &f, &x).unwrap();
                assert_eq!(classical, -reduced);
                checked += 1;
            }
        }
    }
    println!(
        "PASS sign convention: classical single chi-squared operator equals the negated r=1 \
         reduction at {checked} exact points"
    );
}

#[test]
fn stochastic_outputs_are_thread_count_invariant() {
    let spec = WeightSpec::<f64>::from_ints(&[1, 2], &[1, 1]).unwrap();
    let f = TestFunction::polynomial(Polynomial::<f64>::from_ints(&[0, 0, 1]));
    let battery = FunctionBattery::default_for(&spec);
    let data = sample(&spec, 500, 0xDA7A, 8).unwrap();

    let run_all = || {
        let draws = sample(&spec, 40_000, 1, 16).unwrap();
        let estimate = mc_expect_operator(&spec, &f, true, 40_000, 2, 16).unwrap();
        let gof = bootstrap_pvalue(&data, &spec, &battery, false, 99, 3, 16).unwrap();
        (draws, estimate, gof)
    };

    let (draws_ref, est_ref, gof_ref) = run_all();
    for threads in [1usize, 4, 16] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let (draws, est, gof) = pool.install(run_all);
        assert!(
            draws
                .iter()
                .zip(&draws_ref)
                .all(|(a, b)| a.to_bits() == b.to_bits()),
            "sample output differs at {threads} threads"
        );
        assert_eq!(est.mean.to_bits(), est_ref.mean.to_bits());
        assert_eq!(est.std_error.to_bits(), est_ref.std_error.to_bits());
        assert_eq!(gof.statistic.to_bits(), gof_ref.statistic.to_bits());
        assert_eq!(gof.pvalue.to_bits(), gof_ref.pvalue.to_bits());
        for (a, b) in gof.per_function.iter().zip(&gof_ref.per_function) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
    println!(
        "PASS determinism: sample, Monte Carlo, and bootstrap outputs bit-identical across 1, 4, \
         and 16 worker threads"
    );
}

#[test]
fn gof_calibration_and_power() {
    let spec = WeightSpec::<f64>::from_ints(&[1, 2], &[1, 1]).unwrap();
    let battery = FunctionBattery::default_for(&spec);

    // Calibration: independent null runs must reject at close to the
    // nominal 5% level.
    let null_runs = 200;
    let mut null_rejections = 0usize;
    for k in 0..null_runs {
        let data = sample(&spec, 400, 10_000 + k, 4).unwrap();
        let result =
            bootstrap_pvalue(&data, &spec, &battery, false, 199, 60_000 + k, 4).unwrap();
        if result.pvalue <= 0.05 {
            null_rejections += 1;
        }
    }
    let fraction = null_rejections as f64 / null_runs as f64;
    assert!(
        (0.02..=0.10).contains(&fraction),
        "null rejection fraction {fraction} outside [0.02, 0.10]"
    );

    // Power: doubling every weight must be detected almost always.
    let alternative = WeightSpec::<f64>::from_ints(&[2, 4], &[1, 1]).unwrap();
    let power_runs = 50;
    let mut alt_rejections = 0usize;
    for k in 0..power_runs {
        let data = sample(&alternative, 5_000, 90_000 + k, 4).unwrap();
        let result =
            bootstrap_pvalue(&data, &spec, &battery, false, 999, 130_000 + k, 4).unwrap();
        if result.pvalue <= 0.05 {
            alt_rejections += 1;
        }
    }
    assert!(
        alt_rejections as u64 * 10 >= power_runs * 9,
        "power {alt_rejections}/{power_runs} below 90%"
    );
    println!(
        "PASS calibration and power: null rejection fraction {fraction:.3} in [0.02, 0.10]; \
         doubled-weights alternative rejected in {alt_rejections}/{power_runs} runs"
    );
}
