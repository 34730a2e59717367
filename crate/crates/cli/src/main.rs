use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use heightforge::curve::{parse_quadratic_point, parse_rational_point, quadratic_x_scan, CurveSpec, WeierstrassCurve};
use heightforge::fields::{BaseField, QuadraticField};
use heightforge::formal::{elliptic_formal_group, ideal_membership_report, mult_by_m, verify_structure_ap_pb};
use heightforge::frobenius::verify_annihilation;
use heightforge::heights::{canonical_height_doubling, height_decomposition, C1Mode, DecompositionConfig, DoublingConfig};
use heightforge::pipeline::{run_pipeline, Corpus, CorpusConfig, PipelineConfig, SelectionConfig, DEFAULT_MAX_P};
use heightforge::ramified::{ramified_point_check, verify_power_congruence};
use heightforge::Error;

#[derive(Parser)]
#[command(name = "heightforge", version, about = "Canonical heights and explicit lower bounds on elliptic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum C1Arg {
    Empirical,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Select a prime, compute the lower bound and check it on a corpus.
    Bound {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, value_enum, default_value = "empirical")]
        c1: C1Arg,
        /// Accept condition (1) when the image heuristic is inconclusive.
        #[arg(long)]
        assert_condition_1: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_P)]
        max_p: u64,
        /// Start the prime scan here.
        #[arg(long, default_value_t = 2)]
        min_p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corpus file; built from the curve when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical height of a point and its local decomposition.
    Heights {
        #[arg(long)]
        curve: PathBuf,
        /// "x,y", with coordinates a+b*sqrt(d) when --d is given.
        #[arg(long)]
        point: String,
        #[arg(long)]
        d: Option<i64>,
    },
    /// Frobenius annihilation of a point at p.
    Frobenius {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        point: String,
        #[arg(long)]
        d: Option<i64>,
    },
    /// Formal group law, [p] and the ideal membership test.
    Formal {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        series_degree: usize,
    },
    /// The congruence (τα)^p ≡ α^p mod p in Z[ζ_m].
    Congruence {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Valuation check of [p](τ-1)²P at a ramified prime.
    Ramified {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        x: i64,
        #[arg(long)]
        p: u64,
    },
}

struct Outcome {
    report: Value,
    passed: bool,
}

fn to_value<T: Serialize>(t: &T) -> Result<Value, Error> {
    serde_json::to_value(t).map_err(|e| Error::Invariant(format!("serialization: {e}")))
}

fn load_curve(path: &Path) -> Result<WeierstrassCurve, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let spec: CurveSpec = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    spec.build()
}

fn load_corpus(path: &Path) -> Result<Corpus, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn point_report<F, G>(point: &str, d: Option<i64>, rational: F, quadratic: G) -> Result<Outcome, Error>
where
    F: FnOnce(heightforge::curve::CurvePoint<num_rational::BigRational>) -> Result<Outcome, Error>,
    G: FnOnce(heightforge::curve::CurvePoint<heightforge::fields::QuadraticElement>) -> Result<Outcome, Error>,
{
    match d {
        None => rational(parse_rational_point(point)?),
        Some(d) => quadratic(parse_quadratic_point(point, QuadraticField::new(d)?)?),
    }
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Bound { curve, c1, assert_condition_1, max_p, min_p, seed, corpus, out } => {
            let e = load_curve(&curve)?;
            let corpus = corpus.map(|p| load_corpus(&p)).transpose()?;
            if let Some(c) = &corpus {
                if c.curve.build()? != e {
                    return Err(Error::InvalidArgument("corpus file is for a different curve".into()));
                }
            }
            let cfg = PipelineConfig {
                selection: SelectionConfig {
                    c1_mode: match c1 {
                        C1Arg::Empirical => C1Mode::Empirical,
                        C1Arg::Derived => C1Mode::Derived,
                    },
                    assert_condition_1,
                    max_p,
                    min_p,
                    ..SelectionConfig::default()
                },
                corpus: CorpusConfig { seed, ..CorpusConfig::default() },
                ..PipelineConfig::default()
            };
            let report = to_value(&run_pipeline(&e, corpus.as_ref(), &cfg)?)?;
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).expect("JSON value");
                std::fs::write(&path, text + "\n").map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            }
            Ok(Outcome { report, passed: true })
        }
        Command::Heights { curve, point, d } => {
            let e = load_curve(&curve)?;
            let cfg = DecompositionConfig::default();
            let doubling = DoublingConfig::default();
            point_report(
                &point,
                d,
                |pt| {
                    let report = json!({
                        "point": pt.to_string(),
                        "field": "Q",
                        "doubling": to_value(&canonical_height_doubling(&e, &pt, &doubling)?)?,
                        "decomposition": to_value(&height_decomposition(&e, &pt, &cfg)?)?,
                    });
                    Ok(Outcome { report, passed: true })
                },
                |pt| {
                    let field = match pt.base() {
                        Some(BaseField::Quadratic(k)) => k.to_string(),
                        _ => "Q".into(),
                    };
                    let report = json!({
                        "point": pt.to_string(),
                        "field": field,
                        "doubling": to_value(&canonical_height_doubling(&e, &pt, &doubling)?)?,
                        "decomposition": to_value(&height_decomposition(&e, &pt, &cfg)?)?,
                    });
                    Ok(Outcome { report, passed: true })
                },
            )
        }
        Command::Frobenius { curve, p, point, d } => {
            let e = load_curve(&curve)?;
            point_report(
                &point,
                d,
                |pt| {
                    let r = verify_annihilation(&e, &pt, p)?;
                    Ok(Outcome { passed: r.passed(), report: to_value(&r)? })
                },
                |pt| {
                    let r = verify_annihilation(&e, &pt, p)?;
                    Ok(Outcome { passed: r.passed(), report: to_value(&r)? })
                },
            )
        }
        Command::Formal { curve, p, series_degree } => {
            let e = load_curve(&curve)?;
            let law = elliptic_formal_group(&e, series_degree)?;
            let membership = ideal_membership_report(&law, p)?;
            let structure = verify_structure_ap_pb(&law, p)?;
            let report = json!({
                "p": p,
                "precision": law.precision,
                "integral": law.integral,
                "law": to_value(&law.law)?,
                "inverse": to_value(&law.inverse)?,
                "multiplication_by_p": to_value(&mult_by_m(&law, p)?)?,
                "ideal_membership": to_value(&membership)?,
                "structure_ap_pb": structure,
            });
            Ok(Outcome { passed: membership.holds && structure, report })
        }
        Command::Congruence { m, p, samples, seed } => {
            let w = verify_power_congruence(m, p, samples, seed)?;
            Ok(Outcome { passed: w.all_pass, report: to_value(&w)? })
        }
        Command::Ramified { curve, d, x, p } => {
            let e = load_curve(&curve)?;
            let k = QuadraticField::new(d)?;
            let pt = quadratic_x_scan(&e, x, x)?
                .into_iter()
                .find(|pt| pt.base() == Some(BaseField::Quadratic(k)))
                .ok_or_else(|| Error::InvalidArgument(format!("x = {x} does not give a point over {k}")))?;
            let r = ramified_point_check(&e, &pt, p)?;
            Ok(Outcome { passed: r.bound_met(), report: to_value(&r)? })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.report).expect("JSON value"));
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            let code = match err {
                Error::VerificationFailed(_) | Error::Invariant(_) => 2,
                _ => 1,
            };
            println!("{}", json!({ "error": err.to_string() }));
            eprintln!("heightforge: {err}");
            ExitCode::from(code)
        }
    }
}
