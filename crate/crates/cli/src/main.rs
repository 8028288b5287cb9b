//! Command-line front end: parse forms and certificates, run the deciders
//! and the construction pipeline, and emit text or line-delimited JSON.
//!
//! Exit codes: 0 = success or true verdict, 1 = false verdict, 2 = input
//! error, 3 = internal invariant violation (a pipeline step that fails its
//! own verification).

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use witt::construct::{self, Certificate, SeedSearchConfig, VarNamer, VerificationReport};
use witt::forms::TowerField;
use witt::{base, parse, tower, Error};

#[derive(Parser)]
#[command(
    name = "witt",
    version,
    about = "Exact quadratic-form deciders and certificate pipelines over Q((t1))...((tm))"
)]
struct Cli {
    /// Ordered Laurent variables of the tower, e.g. --tower t1,t2.
    /// Every variable appearing in an input form must be declared here.
    #[arg(long, global = true, value_delimiter = ',', value_name = "VARS")]
    tower: Vec<String>,

    /// Output format: human-readable text or line-delimited JSON records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Print dim, signature, signed discriminant, and Hasse invariants of a form over Q
    Invariants { form: String },
    /// Decide isotropy over the tower (exit 0 = isotropic, 1 = anisotropic)
    Isotropy { form: String },
    /// Decide hyperbolicity over the tower
    Hyperbolic { form: String },
    /// Decide equality of two forms in the Witt ring of the tower
    WittEqual { form1: String, form2: String },
    /// Decide isometry of two forms over the tower
    Isometric { form1: String, form2: String },
    /// Decide whether a scalar is a similarity factor of a form
    Similar { form: String, lambda: String },
    /// Decide whether a form represents a value
    Represents { form: String, value: String },
    /// Decide whether <1,-lambda> ⊗ p is hyperbolic for a Pfister literal p
    Annihilates { pfister: String, lambda: String },
    /// Split a form as q0 ⊥ t·q1 along one tower variable
    Residue {
        form: String,
        /// The tower variable to take the residue at, e.g. --var t1
        #[arg(long)]
        var: String,
    },
    /// Check every decidable clause of a certificate file
    VerifyCert { path: PathBuf },
    /// Run the recursion pipeline from a seed certificate file
    Construct {
        path: PathBuf,
        /// Number of recursion steps to apply
        #[arg(long, default_value_t = 1)]
        levels: usize,
        /// Write the full transcript as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a 1-fold seed certificate over Q (exit 1 if none is found)
    SeedSearch {
        form: String,
        /// Comma-separated candidate similarity factors, tried in order
        #[arg(long = "lambda", value_delimiter = ',', required = true)]
        lambdas: Vec<String>,
        /// Largest squarefree coefficient explored by the greedy search
        #[arg(long, default_value_t = 30)]
        budget: i64,
        /// Write the certificate as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Either an exit code or (exit code, message to print on stderr).
type CliResult = Result<u8, (u8, String)>;

fn code_for(err: &Error) -> u8 {
    match err {
        Error::PipelineVerification { .. } => 3,
        _ => 2,
    }
}

fn lib_err(err: Error) -> (u8, String) {
    (code_for(&err), err.to_string())
}

fn input_err(err: impl Display) -> (u8, String) {
    (2, err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let tower_field = TowerField::new(cli.tower.clone()).map_err(lib_err)?;
    let fmt = cli.format;

    match &cli.command {
        Command::Invariants { form } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let inv = base::invariants(&q).map_err(lib_err)?;
            match fmt {
                Format::Text => {
                    println!("dim: {}", inv.dim);
                    println!("signature: {}", inv.signature);
                    println!("signed_disc: {}", inv.signed_disc);
                    for (v, c) in &inv.hasse {
                        println!("hasse[{v}]: {c}");
                    }
                }
                Format::Structured => {
                    let hasse: serde_json::Map<String, serde_json::Value> = inv
                        .hasse
                        .iter()
                        .map(|(v, c)| (v.to_string(), json!(c)))
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "verb": "invariants",
                            "form": q.to_string(),
                            "dim": inv.dim,
                            "signature": inv.signature,
                            "signed_disc": inv.signed_disc.to_string(),
                            "hasse": hasse,
                        })
                    );
                }
            }
            Ok(0)
        }

        Command::Isotropy { form } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let isotropic = !tower::is_anisotropic(&q);
            verdict(
                fmt,
                "isotropy",
                "isotropic",
                isotropic,
                "isotropic",
                "anisotropic",
            )
        }

        Command::Hyperbolic { form } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let hyperbolic = tower::is_hyperbolic(&q);
            verdict(
                fmt,
                "hyperbolic",
                "hyperbolic",
                hyperbolic,
                "hyperbolic",
                "not hyperbolic",
            )
        }

        Command::WittEqual { form1, form2 } => {
            let q1 = parse::form(form1, &tower_field).map_err(lib_err)?;
            let q2 = parse::form(form2, &tower_field).map_err(lib_err)?;
            let equal = tower::witt_equivalent(&q1, &q2).map_err(lib_err)?;
            verdict(
                fmt,
                "witt-equal",
                "witt_equal",
                equal,
                "witt-equivalent",
                "not witt-equivalent",
            )
        }

        Command::Isometric { form1, form2 } => {
            let q1 = parse::form(form1, &tower_field).map_err(lib_err)?;
            let q2 = parse::form(form2, &tower_field).map_err(lib_err)?;
            let isometric = tower::isometric(&q1, &q2).map_err(lib_err)?;
            verdict(
                fmt,
                "isometric",
                "isometric",
                isometric,
                "isometric",
                "not isometric",
            )
        }

        Command::Similar { form, lambda } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let l = parse::square_class(lambda, &tower_field).map_err(lib_err)?;
            let similar = tower::is_similarity_factor(&q, &l).map_err(lib_err)?;
            verdict(
                fmt,
                "similar",
                "similar",
                similar,
                "similarity factor",
                "not a similarity factor",
            )
        }

        Command::Represents { form, value } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let c = parse::square_class(value, &tower_field).map_err(lib_err)?;
            let represented = tower::represents(&q, &c).map_err(lib_err)?;
            verdict(
                fmt,
                "represents",
                "represents",
                represented,
                "represented",
                "not represented",
            )
        }

        Command::Annihilates { pfister, lambda } => {
            let p = parse::pfister(pfister, &tower_field).map_err(lib_err)?;
            let l = parse::square_class(lambda, &tower_field).map_err(lib_err)?;
            let annihilated = tower::annihilated_by(&p, &l).map_err(lib_err)?;
            verdict(
                fmt,
                "annihilates",
                "annihilates",
                annihilated,
                "annihilated",
                "not annihilated",
            )
        }

        Command::Residue { form, var } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let index = tower_field
                .var_index(var)
                .ok_or_else(|| input_err(format!("variable {var:?} is not in the tower")))?;
            let (q0, q1) = tower::second_residue(&q, index).map_err(lib_err)?;
            match fmt {
                Format::Text => {
                    println!("unit part: {q0}");
                    println!("second residue: {q1}");
                }
                Format::Structured => println!(
                    "{}",
                    json!({
                        "verb": "residue",
                        "var": var,
                        "unit_part": q0.to_string(),
                        "second_residue": q1.to_string(),
                    })
                ),
            }
            Ok(0)
        }

        Command::VerifyCert { path } => {
            let text = std::fs::read_to_string(path).map_err(input_err)?;
            let cert = Certificate::from_json_str(&text).map_err(lib_err)?;
            let report = construct::verify(&cert).map_err(lib_err)?;
            print_report(fmt, "verify-cert", &report);
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Construct { path, levels, out } => {
            let text = std::fs::read_to_string(path).map_err(input_err)?;
            let seed = Certificate::from_json_str(&text).map_err(lib_err)?;
            let transcript =
                construct::run_pipeline(&seed, *levels, &VarNamer::default()).map_err(lib_err)?;
            for step in &transcript.steps {
                match fmt {
                    Format::Text => println!(
                        "level n={}: tower level {}, dim {}, verification {}",
                        step.level,
                        step.tower_level,
                        step.dim,
                        if step.report.passed() { "pass" } else { "fail" }
                    ),
                    Format::Structured => println!(
                        "{}",
                        json!({
                            "verb": "construct",
                            "level": step.level,
                            "tower_level": step.tower_level,
                            "dim": step.dim,
                            "overall": step.report.passed(),
                            "certificate": serde_json::to_value(&step.certificate)
                                .map_err(input_err)?,
                        })
                    ),
                }
            }
            if let Some(out) = out {
                let json = transcript.to_json_string().map_err(lib_err)?;
                std::fs::write(out, json).map_err(input_err)?;
                if fmt == Format::Text {
                    println!("transcript written to {}", out.display());
                }
            }
            Ok(0)
        }

        Command::SeedSearch {
            form,
            lambdas,
            budget,
            out,
        } => {
            let q = parse::form(form, &tower_field).map_err(lib_err)?;
            let candidates = lambdas
                .iter()
                .map(|l| parse::square_class(l, &tower_field))
                .collect::<Result<Vec<_>, _>>()
                .map_err(lib_err)?;
            let config = SeedSearchConfig {
                max_coeff: *budget,
                ..SeedSearchConfig::default()
            };
            match construct::seed_search(&q, &candidates, &config).map_err(lib_err)? {
                Some(cert) => {
                    let json = cert.to_json_string().map_err(lib_err)?;
                    match fmt {
                        Format::Text => println!("{json}"),
                        Format::Structured => println!(
                            "{}",
                            json!({
                                "verb": "seed-search",
                                "found": true,
                                "certificate": serde_json::to_value(&cert).map_err(input_err)?,
                            })
                        ),
                    }
                    if let Some(out) = out {
                        std::fs::write(out, json).map_err(input_err)?;
                    }
                    Ok(0)
                }
                None => {
                    match fmt {
                        Format::Text => println!("no seed certificate found"),
                        Format::Structured => {
                            println!("{}", json!({"verb": "seed-search", "found": false}))
                        }
                    }
                    Ok(1)
                }
            }
        }
    }
}

/// Prints a boolean verdict and maps it to the exit code (true → 0, false → 1).
fn verdict(
    fmt: Format,
    verb: &str,
    key: &str,
    value: bool,
    text_true: &str,
    text_false: &str,
) -> CliResult {
    match fmt {
        Format::Text => println!("{}", if value { text_true } else { text_false }),
        Format::Structured => println!("{}", json!({ "verb": verb, key: value })),
    }
    Ok(if value { 0 } else { 1 })
}

fn print_report(fmt: Format, verb: &str, report: &VerificationReport) {
    match fmt {
        Format::Text => println!("{report}"),
        Format::Structured => {
            for clause in &report.clauses {
                println!(
                    "{}",
                    json!({
                        "verb": verb,
                        "clause": clause.clause,
                        "verdict": clause.verdict.to_string(),
                        "detail": clause.detail,
                    })
                );
            }
            println!("{}", json!({ "verb": verb, "overall": report.passed() }));
        }
    }
}
