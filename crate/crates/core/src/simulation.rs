//! Monte Carlo sampling of the weighted chi-squared sum and stochastic
//! verification of the operator's zero expectation.
//!
//! Reproducibility contract: every result is a pure function of
//! `(spec, f, n, seed, shards)`. The draw stream is partitioned into
//! `shards` substreams; shard `j` owns the contiguous block of draws
//! `[j*n/shards ..)` from its own counter-based stream, and per-shard
//! partial results are combined by pairwise reduction in shard-index
//! order. Physical thread count therefore never affects any output bit.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{build_table, CoefficientTable};
use crate::error::Error;
use crate::rng::ShardStream;
use crate::test_functions::{exponential_bound_violation, TestFunction};
use crate::weights::WeightSpec;

/// A Monte Carlo mean with its standard error and replay coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
    pub shards: u32,
}

/// Mean and centered second-moment accumulator (Welford), mergeable so
/// shards can be combined deterministically.
#[derive(Debug, Clone, Copy, Default)]
struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: RunningMoments, b: RunningMoments) -> RunningMoments {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        let nf = n as f64;
        RunningMoments {
            n,
            mean: a.mean + delta * (b.n as f64 / nf),
            m2: a.m2 + b.m2 + delta * delta * (a.n as f64) * (b.n as f64) / nf,
        }
    }

    /// Sample standard deviation over sqrt(n).
    fn std_error(&self) -> f64 {
        (self.m2 / (self.n as f64 - 1.0)).sqrt() / (self.n as f64).sqrt()
    }
}

/// Pairwise reduction in index order; the combination tree depends only on
/// the slice layout, never on scheduling.
fn reduce_pairwise(parts: &[RunningMoments]) -> RunningMoments {
    match parts.len() {
        0 => RunningMoments::default(),
        1 => parts[0],
        len => {
            let (left, right) = parts.split_at(len / 2);
            RunningMoments::merge(reduce_pairwise(left), reduce_pairwise(right))
        }
    }
}

/// Contiguous per-shard draw counts: `n` split as evenly as possible,
/// earlier shards taking the remainder.
fn shard_counts(n: usize, shards: u32) -> Vec<usize> {
    let shards = shards as usize;
    let base = n / shards;
    let extra = n % shards;
    (0..shards)
        .map(|j| base + usize::from(j < extra))
        .collect()
}

fn validate_counts(n: usize, min: usize, shards: u32) -> Result<(), Error> {
    if n < min {
        return Err(Error::BadCount { given: n, min });
    }
    if shards == 0 {
        return Err(Error::BadShards);
    }
    Ok(())
}

/// Draw `n` values of `U = sum_i lambda_i Q_i`, deterministic in
/// `(seed, shards)`.
pub fn sample(spec: &WeightSpec<f64>, n: usize, seed: u64, shards: u32) -> Result<Vec<f64>, Error> {
    validate_counts(n, 1, shards)?;
    Ok(sample_with_stream_base(spec, n, seed, shards, 0))
}

/// Sampling core with an explicit stream-id base so bootstrap replicates
/// can occupy disjoint stream ranges under one seed.
pub(crate) fn sample_with_stream_base(
    spec: &WeightSpec<f64>,
    n: usize,
    seed: u64,
    shards: u32,
    stream_base: u64,
) -> Vec<f64> {
    let counts = shard_counts(n, shards);
    let blocks: Vec<Vec<f64>> = counts
        .par_iter()
        .enumerate()
        .map(|(j, &count)| {
            let mut stream = ShardStream::new(seed, stream_base + j as u64);
            (0..count)
                .map(|_| stream.weighted_chisq_sum(spec.weights(), spec.dofs()))
                .collect()
        })
        .collect();
    blocks.concat()
}

/// Check an operator input against both exponential-family guards: the
/// integrability bound `2 s lambda_i < 1` and the stricter
/// square-integrability bound `4 s lambda_i < 1` that keeps the Monte
/// Carlo variance finite. Other families always pass.
pub fn check_mc_admissible(f: &TestFunction<f64>, spec: &WeightSpec<f64>) -> Result<(), Error> {
    if let TestFunction::Exponential { scale, .. } = f {
        if let Some((index, product)) = exponential_bound_violation(*scale, spec, 2.0) {
            return Err(Error::NotIntegrable {
                check: "integrability",
                index,
                product,
            });
        }
        if let Some((index, product)) = exponential_bound_violation(*scale, spec, 4.0) {
            return Err(Error::NotIntegrable {
                check: "variance",
                index,
                product,
            });
        }
    }
    Ok(())
}

/// Precomputed float-mode operator: per-order factors `(-2)^k`, affine
/// coefficients, and the materialized derivative chain.
pub(crate) struct OperatorEvaluator {
    terms: Vec<(f64, f64, f64, TestFunction<f64>)>,
}

impl OperatorEvaluator {
    pub(crate) fn new(
        table: &CoefficientTable<f64>,
        f: &TestFunction<f64>,
        centered: bool,
    ) -> Self {
        let r = table.r();
        let mut terms = Vec::with_capacity(r + 1);
        let mut derivative = f.clone();
        let mut factor = 1.0;
        for k in 0..=r {
            let mut constant = table.mu_seq()[k];
            if !centered {
                constant -= table.lambda_full()[k] * table.mu();
            }
            terms.push((factor, constant, table.lambda_full()[k], derivative.clone()));
            derivative = derivative.derivative(1);
            factor *= -2.0;
        }
        OperatorEvaluator { terms }
    }

    pub(crate) fn eval(&self, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|(factor, c0, c1, fk)| factor * ((c0 + c1 * u) * fk.eval_float(u)))
            .sum()
    }
}

/// Monte Carlo estimate of `E Tf` over `n` draws: for a valid test
/// function the mean is a consistent estimator of zero.
pub fn mc_expect_operator(
    spec: &WeightSpec<f64>,
    f: &TestFunction<f64>,
    centered: bool,
    n: usize,
    seed: u64,
    shards: u32,
) -> Result<MCEstimate, Error> {
    validate_counts(n, 2, shards)?;
    check_mc_admissible(f, spec)?;
    let table = build_table(spec)?;
    let evaluator = OperatorEvaluator::new(&table, f, centered);
    let mu = *table.mu();

    let counts = shard_counts(n, shards);
    let partials: Vec<RunningMoments> = counts
        .par_iter()
        .enumerate()
        .map(|(j, &count)| {
            let mut stream = ShardStream::new(seed, j as u64);
            let mut acc = RunningMoments::default();
            for _ in 0..count {
                let mut u = stream.weighted_chisq_sum(spec.weights(), spec.dofs());
                if centered {
                    u -= mu;
                }
                acc.push(evaluator.eval(u));
            }
            acc
        })
        .collect();

    let total = reduce_pairwise(&partials);
    Ok(MCEstimate {
        mean: total.mean,
        std_error: total.std_error(),
        n: total.n,
        seed,
        shards,
    })
}

/// Standardized means of a batch: per-value mean and standard error by the
/// same merge rules the sampler uses. Exposed for the goodness-of-fit
/// statistic.
pub(crate) fn batch_mean_se(values: &[f64]) -> (f64, f64) {
    let mut acc = RunningMoments::default();
    for &v in values {
        acc.push(v);
    }
    (acc.mean, acc.std_error())
}

/// Write one float per line with 17 significant digits, enough to
/// round-trip every double exactly.
pub fn write_samples_csv<W: Write>(mut out: W, samples: &[f64]) -> io::Result<()> {
    for x in samples {
        writeln!(out, "{x:.16e}")?;
    }
    Ok(())
}
