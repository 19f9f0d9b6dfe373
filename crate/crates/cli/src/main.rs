//! Batch front end for the weighted chi-squared operator library.
//!
//! One subcommand per invocation, machine-readable output (JSON by
//! default, CSV for flat tables and sample dumps). Exit codes are stable:
//! 0 success, 2 usage or validation failure, 3 identity or test failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stein_chisq::coefficients::{build_table, verify_table};
use stein_chisq::gof::{bootstrap_pvalue, FunctionBattery};
use stein_chisq::moments::{expect_operator, expect_polynomial, verify_ibp};
use stein_chisq::operator::operator_polynomial;
use stein_chisq::poly::Polynomial;
use stein_chisq::scalar::{Rational, Scalar};
use stein_chisq::simulation::{mc_expect_operator, sample, write_samples_csv};
use stein_chisq::test_functions::{TestFunction, TestFunctionDoc};
use stein_chisq::weights::{Mode, WeightSpecDoc};
use stein_chisq::Error;

const SHARDS_ENV: &str = "STEIN_CHISQ_SHARDS";
const DEFAULT_SHARDS: u32 = 16;

const EXIT_USAGE: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "stein-chisq",
    version,
    about = "Stein characterizing operator for weighted sums of independent chi-squared variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the operator coefficient table for a weight spec.
    Coeffs {
        /// Spec JSON, inline or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Override the mode recorded in the spec document.
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
    },
    /// Run the exact identity suite and report pass/fail per identity.
    Verify {
        /// Spec JSON, inline or a file path.
        #[arg(long, required_unless_present = "single_chisq")]
        spec: Option<String>,
        /// Check only the integration-by-parts identity for one
        /// chi-squared law with this many degrees of freedom.
        #[arg(long, conflicts_with = "spec")]
        single_chisq: Option<String>,
        /// Highest monomial degree exercised.
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        /// Negative-control hook: damage the table before checking.
        #[arg(long, hide = true)]
        corrupt_table: bool,
    },
    /// Exact expectation of a polynomial, or of its operator image.
    Expect {
        #[arg(long)]
        spec: String,
        /// Test function: JSON or shorthand (poly:c0,c1,... | exp:s | sin:t | cos:t).
        #[arg(long)]
        f: String,
        /// Use the non-centered operator / raw moments.
        #[arg(long)]
        noncentered: bool,
        /// Take the expectation of the operator image instead of f itself.
        #[arg(long)]
        operator: bool,
    },
    /// Monte Carlo estimate of the operator mean.
    Mc {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        shards: Option<u32>,
        #[arg(long)]
        noncentered: bool,
    },
    /// Draw samples of the weighted sum and dump them as CSV.
    Sample {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        shards: Option<u32>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bootstrap goodness-of-fit test of data against a spec.
    Gof {
        #[arg(long)]
        spec: String,
        /// CSV of observations, one float per line.
        #[arg(long)]
        data: PathBuf,
        /// Bootstrap replicates.
        #[arg(long = "B", default_value_t = 999)]
        replicates: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        shards: Option<u32>,
        /// Treat the data as draws of U - mu and use the centered operator.
        #[arg(long)]
        centered: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Exact,
    Float,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CHECK_FAILED,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InternalInconsistency { .. }
            | Error::TheoremViolation { .. }
            | Error::LemmaViolation { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Inline JSON if the argument starts with `{`, otherwise a file path.
fn load_text(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::usage(format!("cannot read {arg}: {e}")))
}

fn load_spec_doc(arg: &str) -> Result<WeightSpecDoc, Failure> {
    let text = load_text(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("malformed spec JSON: {e}")))
}

fn load_function_doc(arg: &str) -> Result<TestFunctionDoc, Failure> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Failure::usage(format!("malformed function JSON: {e}")));
    }
    let (family, params) = trimmed
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("unrecognized function {trimmed:?}")))?;
    let scalar_param = || {
        params
            .trim()
            .parse::<f64>()
            .map_err(|e| Failure::usage(format!("bad parameter in {trimmed:?}: {e}")))
    };
    match family {
        "poly" => Ok(TestFunctionDoc::Polynomial {
            coeffs: params.split(',').map(|c| c.trim().to_string()).collect(),
        }),
        "exp" => Ok(TestFunctionDoc::Exponential {
            scale: scalar_param()?,
            amplitude: 1.0,
        }),
        "sin" => Ok(TestFunctionDoc::Sine {
            frequency: scalar_param()?,
            amplitude: 1.0,
        }),
        "cos" => Ok(TestFunctionDoc::Cosine {
            frequency: scalar_param()?,
            amplitude: 1.0,
        }),
        other => Err(Failure::usage(format!("unknown function family {other:?}"))),
    }
}

fn resolve_shards(flag: Option<u32>) -> Result<u32, Failure> {
    if let Some(shards) = flag {
        return Ok(shards);
    }
    match std::env::var(SHARDS_ENV) {
        Ok(text) => text
            .parse::<u32>()
            .map_err(|e| Failure::usage(format!("bad {SHARDS_ENV}: {e}"))),
        Err(_) => Ok(DEFAULT_SHARDS),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<CheckLine>,
    all_pass: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Coeffs { spec, format, mode } => cmd_coeffs(&spec, format, mode),
        Command::Verify {
            spec,
            single_chisq,
            max_degree,
            corrupt_table,
        } => cmd_verify(spec.as_deref(), single_chisq.as_deref(), max_degree, corrupt_table),
        Command::Expect {
            spec,
            f,
            noncentered,
            operator,
        } => cmd_expect(&spec, &f, !noncentered, operator),
        Command::Mc {
            spec,
            f,
            n,
            seed,
            shards,
            noncentered,
        } => cmd_mc(&spec, &f, n, seed, resolve_shards(shards)?, !noncentered),
        Command::Sample {
            spec,
            n,
            seed,
            shards,
            out,
        } => cmd_sample(&spec, n, seed, resolve_shards(shards)?, out.as_deref()),
        Command::Gof {
            spec,
            data,
            replicates,
            seed,
            shards,
            centered,
        } => cmd_gof(&spec, &data, replicates, seed, resolve_shards(shards)?, centered),
    }
}

fn cmd_coeffs(spec_arg: &str, format: Format, mode: Option<CliMode>) -> Result<(), Failure> {
    let doc = load_spec_doc(spec_arg)?;
    let mode = match mode {
        Some(CliMode::Exact) => Mode::Exact,
        Some(CliMode::Float) => Mode::Float,
        None => doc.mode,
    };
    let table_doc = match mode {
        Mode::Exact => build_table(&doc.parse_exact()?)?.to_doc(),
        Mode::Float => build_table(&doc.parse_float()?)?.to_doc(),
    };
    match format {
        Format::Json => print_json(&table_doc),
        Format::Csv => {
            let mut out = String::from("k,lambda_k,mu_k\n");
            for (k, (lambda, mu)) in table_doc
                .lambda_full
                .iter()
                .zip(&table_doc.mu_seq)
                .enumerate()
            {
                out.push_str(&format!("{k},{lambda},{mu}\n"));
            }
            print!("{out}");
        }
    }
    Ok(())
}

fn cmd_verify(
    spec_arg: Option<&str>,
    single_chisq: Option<&str>,
    max_degree: usize,
    corrupt_table: bool,
) -> Result<(), Failure> {
    let mut checks: Vec<CheckLine> = Vec::new();

    if let Some(p_text) = single_chisq {
        let p = Rational::parse(p_text)?;
        if !p.is_positive() {
            return Err(Failure::usage("degrees of freedom must be positive"));
        }
        push_ibp_checks(&mut checks, &p, "", max_degree);
    } else {
        let doc = load_spec_doc(spec_arg.expect("clap enforces spec or single-chisq"))?;
        let spec = doc.parse_exact()?;
        let mut table = build_table(&spec)?;
        if corrupt_table {
            table.corrupt_for_negative_control();
        }
        for check in verify_table(&table) {
            checks.push(CheckLine {
                name: check.name.to_string(),
                pass: check.pass,
                detail: check.detail,
            });
        }
        for degree in 0..=max_degree {
            for (form, centered) in [("centered", true), ("non_centered", false)] {
                let outcome = expect_operator(&spec, &Polynomial::monomial(degree), centered);
                checks.push(CheckLine {
                    name: format!("zero_expectation_{form}_x^{degree}"),
                    pass: outcome.is_ok(),
                    detail: outcome.err().map(|e| e.to_string()),
                });
            }
        }
        for (i, dof) in spec.dofs().iter().enumerate() {
            push_ibp_checks(&mut checks, dof, &format!("_m{i}"), max_degree);
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    print_json(&VerifyReport { checks, all_pass });
    if all_pass {
        Ok(())
    } else {
        Err(Failure::check("identity suite reported failures"))
    }
}

fn push_ibp_checks(checks: &mut Vec<CheckLine>, p: &Rational, tag: &str, max_degree: usize) {
    for degree in 0..=max_degree {
        let outcome = verify_ibp(p, &Polynomial::monomial(degree));
        checks.push(CheckLine {
            name: format!("integration_by_parts{tag}_x^{degree}"),
            pass: outcome.is_ok(),
            detail: outcome.err().map(|e| e.to_string()),
        });
    }
}

#[derive(Serialize)]
struct ExpectOutput {
    function: TestFunctionDoc,
    centered: bool,
    operator: bool,
    expectation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    operator_polynomial: Option<Vec<String>>,
}

fn cmd_expect(spec_arg: &str, f_arg: &str, centered: bool, operator: bool) -> Result<(), Failure> {
    let spec = load_spec_doc(spec_arg)?.parse_exact()?;
    let function_doc = load_function_doc(f_arg)?;
    let function: TestFunction<Rational> = function_doc.parse()?;
    let TestFunction::Polynomial(poly) = &function else {
        return Err(Failure::from(Error::ModeUnsupported {
            family: function.family_name(),
        }));
    };

    let (expectation, image) = if operator {
        let table = build_table(&spec)?;
        let image = operator_polynomial(&table, poly, centered);
        let value = expect_operator(&spec, poly, centered)?;
        (value, Some(image.render_coeffs()))
    } else {
        (expect_polynomial(&spec, poly, centered), None)
    };

    print_json(&ExpectOutput {
        function: function_doc,
        centered,
        operator,
        expectation: expectation.render(),
        operator_polynomial: image,
    });
    Ok(())
}

#[derive(Serialize)]
struct McOutput {
    mean: f64,
    std_error: f64,
    n: u64,
    seed: u64,
    shards: u32,
    centered: bool,
    within_4se: bool,
}

fn cmd_mc(
    spec_arg: &str,
    f_arg: &str,
    n: usize,
    seed: u64,
    shards: u32,
    centered: bool,
) -> Result<(), Failure> {
    let spec = load_spec_doc(spec_arg)?.parse_float()?;
    let function: TestFunction<f64> = load_function_doc(f_arg)?.parse()?;
    let estimate = mc_expect_operator(&spec, &function, centered, n, seed, shards)?;
    print_json(&McOutput {
        mean: estimate.mean,
        std_error: estimate.std_error,
        n: estimate.n,
        seed: estimate.seed,
        shards: estimate.shards,
        centered,
        within_4se: estimate.mean.abs() <= 4.0 * estimate.std_error,
    });
    Ok(())
}

fn cmd_sample(
    spec_arg: &str,
    n: usize,
    seed: u64,
    shards: u32,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let spec = load_spec_doc(spec_arg)?.parse_float()?;
    let samples = sample(&spec, n, seed, shards)?;
    let write_failed = |e: std::io::Error| Failure::usage(format!("cannot write samples: {e}"));
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(write_failed)?;
            write_samples_csv(std::io::BufWriter::new(file), &samples).map_err(write_failed)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_samples_csv(&mut lock, &samples).map_err(write_failed)?;
            lock.flush().map_err(write_failed)?;
        }
    }
    Ok(())
}

fn cmd_gof(
    spec_arg: &str,
    data_path: &std::path::Path,
    replicates: usize,
    seed: u64,
    shards: u32,
    centered: bool,
) -> Result<(), Failure> {
    let spec = load_spec_doc(spec_arg)?.parse_float()?;
    let text = fs::read_to_string(data_path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", data_path.display())))?;
    let mut data = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|e| {
            Failure::usage(format!("data line {}: {e}", line_no + 1))
        })?;
        data.push(value);
    }
    let battery = FunctionBattery::default_for(&spec);
    let result = bootstrap_pvalue(&data, &spec, &battery, centered, replicates, seed, shards)?;
    print_json(&result);
    Ok(())
}
