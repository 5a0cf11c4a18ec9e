//! `structmat` command-line tool: instance generation, structured products,
//! inversion, solving, benchmarks and simultaneous approximation.
//!
//! Exit codes: 0 success (including `singular` and `no_solution` tags),
//! 1 verification mismatch, 2 bad input, 3 `failure` tag.

mod commands;
mod instance;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchParams, FlavorArg, GenParams, PadeSource, Task};
use instance::{CliError, CliResult, InstanceFile, KindSpec, PadeFile, PrimeChoice};

#[derive(Debug, Parser)]
#[command(
    name = "structmat",
    version,
    about = "Exact structured matrix computations over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen {
        /// Rows of `A`.
        #[arg(long)]
        m: usize,
        /// Columns of `A`.
        #[arg(long)]
        n: usize,
        /// Generator length.
        #[arg(long)]
        alpha: usize,
        /// Columns of the dense factor `B`.
        #[arg(long, default_value_t = 1)]
        beta: usize,
        #[arg(long, value_enum, default_value_t = KindSpec::Sylvester)]
        kind: KindSpec,
        #[arg(long, value_enum, default_value_t = FlavorArg::SinglePower)]
        p_flavor: FlavorArg,
        #[arg(long, value_enum, default_value_t = FlavorArg::SinglePower)]
        q_flavor: FlavorArg,
        /// `phi` of a single power family `x^m - phi` for `P`.
        #[arg(long, default_value_t = 0)]
        p_phi: u64,
        /// `phi` of a single power family `x^n - phi` for `Q`.
        #[arg(long, default_value_t = 1)]
        q_phi: u64,
        /// Ratio of geometric families; random when omitted.
        #[arg(long)]
        geom_ratio: Option<u64>,
        #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
        transpose_p: bool,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        transpose_q: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PrimeChoice::Default)]
        prime: PrimeChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run `mul`, `inv` or `solve` on an instance file.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        task: Task,
        /// Cross-check against the dense oracle when the instance is small enough.
        #[arg(long)]
        verify: bool,
        /// Overrides the seed stored in the instance.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the full JSON report instead of a summary line.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time tasks on Toeplitz-like instances and emit CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 2048, 4096])]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [8usize])]
        alphas: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        beta: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Task::Mul])]
        task: Vec<Task>,
        /// Also time the column-by-column product as task `mul_naive`.
        #[arg(long)]
        baseline: bool,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PrimeChoice::Default)]
        prime: PrimeChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a simultaneous approximation problem, from a file or a planted instance.
    Pade {
        #[arg(long, conflicts_with_all = ["moduli_degrees", "bounds"])]
        instance: Option<PathBuf>,
        /// Degrees of the random moduli of a planted instance.
        #[arg(long, value_delimiter = ',')]
        moduli_degrees: Vec<usize>,
        /// Degree bounds `n_j` of a planted instance.
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PrimeChoice::Default)]
        prime: PrimeChoice,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: &Option<PathBuf>, print: bool) -> CliResult<()> {
    if let Some(path) = out {
        fs::write(path, format!("{text}\n"))?;
    }
    if print {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.write_all(b"\n")?;
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Gen {
            m,
            n,
            alpha,
            beta,
            kind,
            p_flavor,
            q_flavor,
            p_phi,
            q_phi,
            geom_ratio,
            transpose_p,
            transpose_q,
            seed,
            prime,
            out,
        } => {
            let params = GenParams {
                m,
                n,
                alpha,
                beta,
                kind,
                p_flavor,
                q_flavor,
                p_phi,
                q_phi,
                geom_ratio,
                transpose_p,
                transpose_q,
                seed,
                prime,
            };
            let inst = commands::cmd_gen(&params)?;
            let text = serde_json::to_string_pretty(&inst)?;
            emit(&text, &out, out.is_none())?;
            Ok(0)
        }
        Command::Run {
            instance,
            task,
            verify,
            seed,
            json,
            out,
        } => {
            let inst: InstanceFile = read_json(&instance)?;
            let report = commands::cmd_run(&inst, task, verify, seed)?;
            let text = serde_json::to_string_pretty(&report)?;
            emit(&text, &out, json)?;
            if !json {
                let verified = match report.verified {
                    Some(true) => "verified",
                    Some(false) => "MISMATCH",
                    None => "unverified",
                };
                println!(
                    "{} {}x{} alpha={}: {} ({verified}, {:.3} ms)",
                    serde_json::to_value(report.task)?
                        .as_str()
                        .unwrap_or_default(),
                    report.m,
                    report.n,
                    report.alpha,
                    serde_json::to_value(report.tag)?
                        .as_str()
                        .unwrap_or_default(),
                    report.wall_ns as f64 / 1e6
                );
            }
            Ok(report.exit_code())
        }
        Command::Bench {
            sizes,
            alphas,
            beta,
            reps,
            task,
            baseline,
            verify,
            seed,
            prime,
            out,
        } => {
            let params = BenchParams {
                sizes,
                alphas,
                beta,
                reps,
                tasks: task,
                baseline,
                verify,
                seed,
                prime,
            };
            let rows = commands::cmd_bench(&params)?;
            let mismatch = rows.iter().any(|r| r.verified == Some(false));
            match out {
                Some(path) => commands::write_csv(&rows, fs::File::create(path)?)?,
                None => commands::write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(if mismatch { 1 } else { 0 })
        }
        Command::Pade {
            instance,
            moduli_degrees,
            bounds,
            seed,
            prime,
            json,
            out,
        } => {
            let src = match instance {
                Some(path) => PadeSource::File(read_json::<PadeFile>(&path)?),
                None => {
                    if moduli_degrees.is_empty() || bounds.is_empty() {
                        return Err(CliError::BadInput(
                            "give --instance or both --moduli-degrees and --bounds".into(),
                        ));
                    }
                    PadeSource::Planted {
                        modulus_degrees: moduli_degrees,
                        bounds,
                        prime,
                    }
                }
            };
            let report = commands::cmd_pade(&src, seed)?;
            let text = serde_json::to_string_pretty(&report)?;
            emit(&text, &out, json)?;
            if !json {
                println!(
                    "pade: {} (generator length {}, {} unknowns, {} equations)",
                    serde_json::to_value(report.tag)?
                        .as_str()
                        .unwrap_or_default(),
                    report.generator_length,
                    report.unknowns,
                    report.equations
                );
            }
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
