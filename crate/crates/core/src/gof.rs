//! Goodness-of-fit testing against a hypothesized weighted chi-squared
//! law.
//!
//! The operator of the hypothesized law has expectation zero under that
//! law, so its empirical mean over a dataset, standardized and maximized
//! over a battery of test functions, measures departure from the null.
//! Calibration is by parametric bootstrap: the battery functions are
//! correlated and the null law of the max is awkward analytically but
//! cheap by simulation. A nonzero statistic is evidence against the null;
//! the test is a necessary-condition check, not a proven metric.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::build_table;
use crate::error::Error;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::simulation::{check_mc_admissible, sample_with_stream_base, OperatorEvaluator};
use crate::test_functions::TestFunction;
use crate::weights::{WeightSpec, WeightSpecDoc};

/// An ordered battery of test functions, all admissible for the target
/// spec (integrable with finite Monte Carlo variance).
#[derive(Debug, Clone)]
pub struct FunctionBattery {
    functions: Vec<TestFunction<f64>>,
}

impl FunctionBattery {
    pub fn new(
        functions: Vec<TestFunction<f64>>,
        spec: &WeightSpec<f64>,
    ) -> Result<Self, Error> {
        if functions.is_empty() {
            return Err(Error::EmptyBattery);
        }
        for (index, f) in functions.iter().enumerate() {
            if functions[..index].contains(f) {
                return Err(Error::DuplicateFunction { index });
            }
            check_mc_admissible(f, spec)?;
        }
        Ok(FunctionBattery { functions })
    }

    /// The standard battery: monomials x, x^2, x^3 for the low moments,
    /// sin(x) and cos(x) as bounded oscillatory probes, plus the
    /// exponential with scale `0.25 / max |lambda_i|` whenever that scale
    /// clears the variance guard.
    pub fn default_for(spec: &WeightSpec<f64>) -> Self {
        let mut functions = vec![
            TestFunction::polynomial(Polynomial::from_ints(&[0, 1])),
            TestFunction::polynomial(Polynomial::from_ints(&[0, 0, 1])),
            TestFunction::polynomial(Polynomial::from_ints(&[0, 0, 0, 1])),
            TestFunction::sine(1.0),
            TestFunction::cosine(1.0),
        ];
        let max_abs = spec
            .weights()
            .iter()
            .fold(0.0f64, |acc, w| acc.max(w.abs()));
        let exponential = TestFunction::exponential(0.25 / max_abs);
        if check_mc_admissible(&exponential, spec).is_ok() {
            functions.push(exponential);
        }
        FunctionBattery { functions }
    }

    pub fn functions(&self) -> &[TestFunction<f64>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

/// Result of a bootstrap goodness-of-fit run.
#[derive(Debug, Clone, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    /// Resolution 1/(B+1); never exactly zero.
    pub pvalue: f64,
    /// Standardized mean of the operator image per battery function.
    pub per_function: Vec<f64>,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub seed: u64,
    pub shards: u32,
    pub spec: WeightSpecDoc,
}

fn standardized_means(
    evaluators: &[OperatorEvaluator],
    data: &[f64],
) -> (f64, Vec<f64>) {
    let per_function: Vec<f64> = evaluators
        .iter()
        .map(|evaluator| {
            let values: Vec<f64> = data.iter().map(|&x| evaluator.eval(x)).collect();
            let (mean, se) = crate::simulation::batch_mean_se(&values);
            if se == 0.0 && mean == 0.0 {
                0.0
            } else {
                mean / se
            }
        })
        .collect();
    let statistic = per_function.iter().fold(0.0f64, |acc, z| acc.max(z.abs()));
    (statistic, per_function)
}

fn build_evaluators(
    spec: &WeightSpec<f64>,
    battery: &FunctionBattery,
    centered: bool,
) -> Result<(Vec<OperatorEvaluator>, f64), Error> {
    for f in battery.functions() {
        check_mc_admissible(f, spec)?;
    }
    let table = build_table(spec)?;
    let evaluators = battery
        .functions()
        .iter()
        .map(|f| OperatorEvaluator::new(&table, f, centered))
        .collect();
    Ok((evaluators, *table.mu()))
}

fn validate_data(data: &[f64]) -> Result<(), Error> {
    if data.len() < 2 {
        return Err(Error::BadCount {
            given: data.len(),
            min: 2,
        });
    }
    if let Some(row) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteData { row });
    }
    Ok(())
}

/// The empirical operator statistic: per battery function the
/// standardized mean of `Tf` over the data, and their max in absolute
/// value. With `centered` set the data are treated as draws of `U - mu`
/// and the centered operator is used; otherwise the non-centered operator
/// applies to raw draws of `U`.
pub fn stein_statistic(
    data: &[f64],
    spec: &WeightSpec<f64>,
    battery: &FunctionBattery,
    centered: bool,
) -> Result<(f64, Vec<f64>), Error> {
    validate_data(data)?;
    let (evaluators, _) = build_evaluators(spec, battery, centered)?;
    Ok(standardized_means(&evaluators, data))
}

/// Parametric bootstrap p-value: draw `replicates` synthetic datasets of
/// the same size from the hypothesized spec, recompute the statistic on
/// each, and report `p = (1 + #{replicate >= observed}) / (replicates + 1)`.
///
/// Replicate `b` occupies stream ids `(b+1)*shards ..`, keeping every
/// replicate disjoint from the plain sampling streams under the same seed.
pub fn bootstrap_pvalue(
    data: &[f64],
    spec: &WeightSpec<f64>,
    battery: &FunctionBattery,
    centered: bool,
    replicates: usize,
    seed: u64,
    shards: u32,
) -> Result<GofResult, Error> {
    if replicates < 99 {
        return Err(Error::BadCount {
            given: replicates,
            min: 99,
        });
    }
    if shards == 0 {
        return Err(Error::BadShards);
    }
    validate_data(data)?;
    let (evaluators, mu) = build_evaluators(spec, battery, centered)?;
    let (observed, per_function) = standardized_means(&evaluators, data);

    let exceeding = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let base = (b as u64 + 1) * shards as u64;
            let mut synthetic = sample_with_stream_base(spec, data.len(), seed, shards, base);
            if centered {
                for x in &mut synthetic {
                    *x -= mu;
                }
            }
            let (stat, _) = standardized_means(&evaluators, &synthetic);
            u64::from(stat >= observed)
        })
        .sum::<u64>();

    Ok(GofResult {
        statistic: observed,
        pvalue: (1.0 + exceeding as f64) / (replicates as f64 + 1.0),
        per_function,
        replicates,
        seed,
        shards,
        spec: spec.to_doc(),
    })
}
