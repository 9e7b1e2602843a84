//! Command-line runner: reproducible simulations, exact tables, the
//! enumeration oracle and the certification suites.
//!
//! Exit codes: 0 success / all certifications pass, 1 certification
//! failure, 2 bad instance, 3 bad algorithm or parameter spec, 4 instance
//! over the enumeration cap.

mod exact_ops;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use googol_core::algorithms::AlgorithmSpec;
use googol_core::error::Error;
use googol_core::guarantees;
use googol_core::instance::Instance;
use googol_core::montecarlo::{self, AdversarialPreset};
use googol_core::oracle;
use googol_core::records::rational_str;

use output::{emit, timestamp, Format};

#[derive(Parser)]
#[command(
    name = "googol",
    version,
    about = "Two-sided game of Googol: stopping-rule simulation, exact distributions, \
             enumeration oracle and guarantee verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of an algorithm's outcome distribution and
    /// competitive ratio on an instance
    Simulate(SimulateArgs),
    /// Closed-form quantities evaluated over parameter grids
    Exact(exact_ops::ExactArgs),
    /// Exact rational outcome distribution by exhaustive enumeration
    Oracle(OracleArgs),
    /// Certification suites; exits 0 only if every requested suite passes
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Suppress the timestamp field so reruns are byte-identical
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file: {"pairs": [[a1,b1],[a2,b2],...]}
    #[arg(long, conflicts_with = "preset")]
    instance: Option<PathBuf>,
    /// Built-in instance: open-bad | closed-bad | large-k:<k>,<n>
    #[arg(long)]
    preset: Option<String>,
    /// Epsilon for the adversarial presets
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Algorithm: open | closed | full | mixture:<r> | window:<t>
    #[arg(long)]
    alg: String,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Confidence multiplier for the reported intervals
    #[arg(long, default_value_t = 4.0)]
    z: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Algorithm: open | closed | full | mixture:<r>
    #[arg(long)]
    alg: String,
    /// Seed for the large-k preset construction
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// all | secretary | oracle | dominance | adversarial | tstar | largek | inequalities
    #[arg(long, default_value = "all")]
    suite: String,
    /// Slack allowed below each certified constant
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Mixture probability for the dominance sweep (default r*)
    #[arg(long)]
    r: Option<f64>,
    /// Largest couple structure in the dominance sweep
    #[arg(long, default_value_t = 50)]
    kmax: usize,
    /// Epsilon for the adversarial suite
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[command(flatten)]
    output: OutputArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DuplicateValue(_) | Error::NonPositiveValue(_) | Error::BadInstanceFile(_) => 2,
            Error::BadAlgorithmSpec(_)
            | Error::BadRange(_)
            | Error::InvalidWindowSpec(_)
            | Error::InvalidTarget { .. } => 3,
            Error::InstanceTooLarge { .. } => 4,
            Error::BracketFailure { .. } | Error::ResolutionTooCoarse { .. } => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(2, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Exact(args) => exact_ops::cmd_exact(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_instance(args: &InstanceArgs, seed: u64) -> Result<Instance, Failure> {
    match (&args.instance, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
            Ok(Instance::from_json(&text)?)
        }
        (None, Some(preset)) => {
            if let Some(spec) = preset.strip_prefix("large-k:") {
                let (k, n) = spec
                    .split_once(',')
                    .and_then(|(k, n)| Some((k.trim().parse().ok()?, n.trim().parse().ok()?)))
                    .ok_or_else(|| {
                        Failure::new(
                            3,
                            format!("bad large-k preset `{preset}`; want large-k:<k>,<n>"),
                        )
                    })?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(montecarlo::synthetic_large_k_instance(k, n, &mut rng)?)
            } else {
                let named: AdversarialPreset = preset
                    .parse()
                    .map_err(|_| Failure::new(3, format!("unknown preset `{preset}`")))?;
                Ok(montecarlo::adversarial_instance(named, args.eps)?)
            }
        }
        _ => Err(Failure::new(
            2,
            "exactly one of --instance / --preset is required",
        )),
    }
}

fn parse_alg(s: &str) -> Result<AlgorithmSpec, Failure> {
    Ok(s.parse::<AlgorithmSpec>()?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let alg = parse_alg(&args.alg)?;
    let instance = load_instance(&args.instance, args.seed)?;
    let report = montecarlo::estimate(&instance, &alg, args.trials, args.seed, args.z)?;
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                #[serde(skip_serializing_if = "Option::is_none")]
                timestamp: Option<u64>,
                #[serde(flatten)]
                report: &'a montecarlo::EstimateReport,
            }
            serde_json::to_string_pretty(&Out {
                timestamp: timestamp(args.output.deterministic),
                report: &report,
            })
            .expect("serializable")
        }
        Format::Csv => {
            let mut rows = vec!["outcome,frequency,ci_halfwidth".to_string()];
            for (outcome, freq) in &report.frequencies {
                rows.push(format!("{outcome},{freq},{}", report.frequency_ci[outcome]));
            }
            rows.join("\n") + "\n"
        }
    };
    emit(&args.output.out, &text)?;
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let alg = parse_alg(&args.alg)?;
    let instance = load_instance(&args.instance, args.seed)?;
    let dist = oracle::enumerate_distribution(&instance, &alg)?;
    let (e_alg, e_max) = oracle::enumerate_expectation(&instance, &alg)?;
    let ratio = &e_alg / &e_max;
    let text = match args.output.format {
        Format::Json => {
            let mass: BTreeMap<String, String> = dist
                .mass
                .iter()
                .map(|(o, p)| (o.to_string(), rational_str(p)))
                .collect();
            let body = serde_json::json!({
                "timestamp": timestamp(args.output.deterministic),
                "algorithm": alg.to_string(),
                "instance_digest": format!("{:016x}", dist.instance_digest),
                "mass": mass,
                "expected_value": rational_str(&e_alg),
                "expected_max_hidden": rational_str(&e_max),
                "ratio": rational_str(&ratio),
            });
            let mut value = body;
            if args.output.deterministic {
                value.as_object_mut().unwrap().remove("timestamp");
            }
            serde_json::to_string_pretty(&value).expect("serializable")
        }
        Format::Csv => {
            let mut rows = vec!["outcome,probability".to_string()];
            for (o, p) in &dist.mass {
                rows.push(format!("{o},{}", rational_str(p)));
            }
            rows.join("\n") + "\n"
        }
    };
    emit(&args.output.out, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SuiteResult {
    suite: String,
    pass: bool,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<guarantees::GuaranteeReport>,
}

fn run_suite(name: &str, args: &VerifyArgs) -> Result<SuiteResult, Failure> {
    let result = match name {
        "secretary" => {
            let report = guarantees::certify_secretary(40);
            SuiteResult {
                suite: name.into(),
                pass: report.pass && report.min_ratio >= report.target_constant - args.tol,
                detail: format!(
                    "min F(k) = {:.7} vs limit {:.7} at {}",
                    report.min_ratio, report.target_constant, report.witness
                ),
                report: Some(report),
            }
        }
        "dominance" => {
            let r = args.r.unwrap_or_else(guarantees::r_star);
            let report = guarantees::certify_dominance(args.kmax, r);
            SuiteResult {
                suite: name.into(),
                pass: report.min_ratio >= report.target_constant - args.tol,
                detail: format!(
                    "r = {r:.7}: min ratio {:.9} vs target {:.9} at {}",
                    report.min_ratio, report.target_constant, report.witness
                ),
                report: Some(report),
            }
        }
        "largek" => {
            let t = guarantees::find_t_star(1e-9)?;
            let report = guarantees::certify_large_k(t, 50, 30);
            SuiteResult {
                suite: name.into(),
                pass: report.pass,
                detail: format!(
                    "t* = {t:.7}: min limit ratio {:.7} vs {:.7}, checks {:?}",
                    report.min_ratio, report.target_constant, report.checks
                ),
                report: Some(report),
            }
        }
        "tstar" => suite_from(name, guarantees::verify_t_star()),
        "oracle" => suite_from(name, guarantees::verify_oracle_equality(4)),
        "adversarial" => suite_from(name, guarantees::verify_adversarial(args.eps)),
        "inequalities" => suite_from(name, guarantees::verify_inequalities()),
        other => return Err(Failure::new(3, format!("unknown suite `{other}`"))),
    };
    Ok(result)
}

fn suite_from(name: &str, outcome: Result<(), String>) -> SuiteResult {
    match outcome {
        Ok(()) => SuiteResult {
            suite: name.into(),
            pass: true,
            detail: "ok".into(),
            report: None,
        },
        Err(witness) => SuiteResult {
            suite: name.into(),
            pass: false,
            detail: witness,
            report: None,
        },
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let suites: Vec<&str> = match args.suite.as_str() {
        "all" => vec![
            "secretary",
            "oracle",
            "dominance",
            "adversarial",
            "tstar",
            "largek",
            "inequalities",
        ],
        one => vec![one],
    };
    let mut results = Vec::new();
    let mut all_pass = true;
    for name in suites {
        let result = run_suite(name, &args)?;
        println!(
            "VERIFY {}: {} — {}",
            result.suite,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
        all_pass &= result.pass;
        results.push(result);
    }
    if let Some(path) = &args.output.out {
        let body = serde_json::json!({
            "timestamp": timestamp(args.output.deterministic),
            "suites": results,
        });
        let mut value = body;
        if args.output.deterministic {
            value.as_object_mut().unwrap().remove("timestamp");
        }
        emit(
            &Some(path.clone()),
            &serde_json::to_string_pretty(&value).expect("serializable"),
        )?;
    }
    Ok(if all_pass { 0 } else { 1 })
}
