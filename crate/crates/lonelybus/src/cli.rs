//! Command-line front end.
//!
//! Every subcommand prints one machine-readable document on standard output
//! (JSON by default; `pmf` and `dominance` also speak CSV) and reports
//! through the exit status: 0 when the command succeeds and every verdict
//! passes, 2 when a verification claim fails, 1 for usage, parameter, or
//! resource errors. Diagnostics go to standard error, one line each.
//!
//! The enumeration cap defaults to 10^8 configurations and can be set with
//! `--max-enum` or the `LONELYBUS_MAX_ENUM` environment variable; the flag
//! wins when both are present.

use std::ffi::OsString;
use std::time::Instant;

use clap::{value_parser, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::output::{
    self, DominanceResults, OutputDocument, PmfResults, ReportDto, SimulateResults, VerifyResults,
    Verdicts,
};
use crate::verify::EnumOptions;
use crate::{dist, mc, verify, Error, Params, Result};

const DEFAULT_MAX_ENUM: u64 = 100_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "lonelybus",
    version,
    about = "Exact lonely-passenger statistics, dominance tables, and coupling-proof verification"
)]
struct Cli {
    /// Cap on how many configurations an exhaustive command may enumerate.
    #[arg(
        long = "max-enum",
        global = true,
        env = "LONELYBUS_MAX_ENUM",
        default_value_t = DEFAULT_MAX_ENUM
    )]
    max_enum: u64,

    /// Suppress the document on standard output; the exit status still
    /// reflects the verdicts.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distribution of the lonely-passenger count.
    Pmf {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Exact tail probability P(lonely count >= r).
    Tail {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
    },
    /// Exact expected number of lonely passengers.
    Expected {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Exact tail comparisons between k and k+1 buses for every k <= k-max.
    Dominance {
        #[arg(long)]
        n: u32,
        #[arg(long = "k-max")]
        k_max: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Exhaustively verify the coupling proof of one theorem.
    Verify {
        /// 1 = existence of a lonely passenger, 2 = stochastic dominance.
        #[arg(long, value_parser = value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Threshold for theorem 2; omitted means every r in 2..=n.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Monte Carlo tail estimate with a 95% Wilson interval.
    Simulate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

enum Body {
    Json(Box<OutputDocument>),
    Csv(String),
}

struct Outcome {
    body: Body,
    all_pass: bool,
}

/// Parses `argv`, runs the command, prints the document, and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => return handle_parse_error(err),
    };
    let started = Instant::now();
    match dispatch(&cli) {
        Ok(mut outcome) => {
            if let Body::Json(doc) = &mut outcome.body {
                doc.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            }
            if !cli.quiet {
                match &outcome.body {
                    Body::Json(doc) => println!("{}", doc.to_json_pretty()),
                    Body::Csv(csv) => print!("{csv}"),
                }
            }
            if outcome.all_pass {
                0
            } else {
                eprintln!("verification failed: at least one claim does not hold");
                2
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn handle_parse_error(err: clap::Error) -> i32 {
    use clap::error::ErrorKind;
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = err.print();
            0
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = err.print();
            1
        }
        _ => {
            let message = err.to_string();
            let line = message
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{line}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Pmf { n, k, format } => {
            let params = Params::new(*n, *k)?;
            let pmf = dist::exact_pmf(&params);
            match format {
                Format::Csv => Ok(Outcome {
                    body: Body::Csv(output::pmf_csv(&pmf)),
                    all_pass: true,
                }),
                Format::Json => {
                    let doc = OutputDocument::new(
                        "pmf",
                        json!({"n": n, "k": k}),
                        serde_json::to_value(PmfResults::from_pmf(&pmf)).expect("serializable"),
                    );
                    Ok(Outcome {
                        body: Body::Json(Box::new(doc)),
                        all_pass: true,
                    })
                }
            }
        }
        Command::Tail { n, k, r } => {
            let params = Params::new(*n, *k)?;
            let tail = dist::tail_prob(&params, *r)?;
            let doc = OutputDocument::new(
                "tail",
                json!({"n": n, "k": k, "r": r}),
                json!({"tail_probability": output::RationalValue::from(&tail)}),
            );
            Ok(Outcome {
                body: Body::Json(Box::new(doc)),
                all_pass: true,
            })
        }
        Command::Expected { n, k } => {
            let params = Params::new(*n, *k)?;
            let expected = dist::expected_lonely(&params);
            let doc = OutputDocument::new(
                "expected",
                json!({"n": n, "k": k}),
                json!({"expected_lonely": output::RationalValue::from(&expected)}),
            );
            Ok(Outcome {
                body: Body::Json(Box::new(doc)),
                all_pass: true,
            })
        }
        Command::Dominance { n, k_max, format } => {
            let report = dist::dominance_report(*n, *k_max)?;
            let all_pass = report.overall_pass();
            match format {
                Format::Csv => Ok(Outcome {
                    body: Body::Csv(output::dominance_csv(&report)),
                    all_pass,
                }),
                Format::Json => {
                    let mut doc = OutputDocument::new(
                        "dominance",
                        json!({"n": n, "k_max": k_max}),
                        serde_json::to_value(DominanceResults::from_report(&report))
                            .expect("serializable"),
                    );
                    doc.verdicts = Some(Verdicts {
                        all_pass,
                        failed_claims: report
                            .rows
                            .iter()
                            .filter(|row| !row.weak_holds || (row.r == 1 && !row.strict))
                            .map(|row| format!("dominance[k={},r={}]", row.k, row.r))
                            .collect(),
                    });
                    Ok(Outcome {
                        body: Body::Json(Box::new(doc)),
                        all_pass,
                    })
                }
            }
        }
        Command::Verify {
            theorem,
            n,
            k,
            r,
            workers,
        } => {
            let params = Params::new(*n, *k)?;
            let opts = EnumOptions {
                max_configurations: cli.max_enum,
                workers: *workers,
            };
            let reports = match theorem {
                1 => {
                    if r.is_some() {
                        return Err(Error::InvalidInput(
                            "--r applies only to --theorem 2".into(),
                        ));
                    }
                    vec![verify::verify_theorem1(&params, &opts)?]
                }
                2 => match r {
                    Some(r) => vec![verify::verify_theorem2(&params, *r, &opts)?],
                    None => (2..=*n)
                        .map(|r| verify::verify_theorem2(&params, r, &opts))
                        .collect::<Result<Vec<_>>>()?,
                },
                _ => unreachable!("clap restricts --theorem to 1..=2"),
            };
            let all_pass = reports.iter().all(|report| report.all_pass());
            let failed_claims = reports
                .iter()
                .flat_map(|report| {
                    report.failed_claims().map(|claim| match report.r {
                        Some(r) => format!("[r={r}] {}", claim.name),
                        None => claim.name.clone(),
                    })
                })
                .collect();
            let mut doc = OutputDocument::new(
                "verify",
                json!({
                    "theorem": theorem,
                    "n": n,
                    "k": k,
                    "r": r,
                    "max_enum": cli.max_enum,
                    "workers": workers,
                }),
                serde_json::to_value(VerifyResults {
                    theorem: *theorem,
                    reports: reports.iter().map(ReportDto::from_report).collect(),
                })
                .expect("serializable"),
            );
            doc.verdicts = Some(Verdicts {
                all_pass,
                failed_claims,
            });
            Ok(Outcome {
                body: Body::Json(Box::new(doc)),
                all_pass,
            })
        }
        Command::Simulate {
            n,
            k,
            r,
            trials,
            seed,
            workers,
        } => {
            let params = Params::new(*n, *k)?;
            let estimate = mc::estimate_tail(&params, *r, *trials, *seed, *workers)?;
            let doc = OutputDocument::new(
                "simulate",
                json!({
                    "n": n, "k": k, "r": r,
                    "trials": trials, "seed": seed, "workers": workers,
                }),
                serde_json::to_value(SimulateResults::from_estimate(&estimate))
                    .expect("serializable"),
            );
            Ok(Outcome {
                body: Body::Json(Box::new(doc)),
                all_pass: true,
            })
        }
    }
}
