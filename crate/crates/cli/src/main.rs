//! `aphyper`: instance generation, counting, moments, solving and threshold
//! scans for random AP hypergraphs.
//!
//! Results go to stdout as JSON (CSV for `scan --out`). Failures print one
//! JSON line `{"error": kind, "message": text}` to stderr and exit nonzero.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aphyper_core::counting::count_monochromatic_brute;
use aphyper_core::harness::{rows_to_csv, DEFAULT_NODE_BUDGET};
use aphyper_core::solvers::{count_2col_exhaustive, count_nae_exhaustive};
use aphyper_core::{
    crossover_estimate, decide_2col, decide_nae, moment_report, mono_ap3_closed_form,
    parse_instance, sample_ap_hypergraph_m, sample_ap_hypergraph_p, sample_nae_formula,
    threshold_scan, verify_moments_montecarlo, write_instance, Coloring, Error, Experiment,
    Instance, PrimeModulus, Problem, TrialRng,
};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "aphyper",
    version,
    about = "Random AP hypergraphs, AP-NAE-SAT and 2-coloring experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Apnae,
    Aphg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Nae,
    #[value(name = "2col")]
    TwoCol,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Nae => Problem::Nae,
            ProblemArg::TwoCol => Problem::TwoCol,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Dpll,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance and write it in the text format.
    #[command(group(ArgGroup::new("size").required(true).args(["m", "p"])))]
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Number of clauses or edges.
        #[arg(long)]
        m: Option<usize>,
        /// Edge probability (aphg only).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        exclude_trivial: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count monochromatic k-term progressions of a coloring.
    #[command(group(ArgGroup::new("source").required(true).args(["coloring", "random"])))]
    CountMono {
        /// 0/1 string, one character per vertex.
        #[arg(long)]
        coloring: Option<String>,
        #[arg(long, requires_all = ["n", "seed"])]
        random: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        k: usize,
    },
    /// First and second moments of the solution count.
    Moments {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        diagnostic: bool,
    },
    /// Solve an instance file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Decision budget for dpll.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Monte Carlo satisfiability scan over a density grid.
    Scan {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long)]
        r_step: f64,
        #[arg(long)]
        trials: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long)]
        exclude_trivial: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare sampled solution-count moments with the closed forms.
    VerifyMoments {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        samples: u32,
        #[arg(long)]
        seed: u64,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        kind: "io-error",
        message: format!("{}: {e}", path.display()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure {
        kind: "internal",
        message: e.to_string(),
    })?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            model,
            n,
            k,
            m,
            p,
            seed,
            exclude_trivial,
            out,
        } => {
            let nm = PrimeModulus::new(n)?;
            let mut rng = TrialRng::new(seed, 0);
            let inst = match (model, m, p) {
                (Model::Apnae, Some(m), _) => {
                    Instance::Formula(sample_nae_formula(nm, k, m, exclude_trivial, &mut rng)?)
                }
                (Model::Aphg, Some(m), _) => Instance::Hypergraph(sample_ap_hypergraph_m(
                    nm,
                    k,
                    m,
                    exclude_trivial,
                    &mut rng,
                )?),
                (Model::Aphg, None, Some(p)) => Instance::Hypergraph(sample_ap_hypergraph_p(
                    nm,
                    k,
                    p,
                    exclude_trivial,
                    &mut rng,
                )?),
                (Model::Apnae, None, Some(_)) => {
                    return Err(Error::InvalidParameter(
                        "--p is only supported for --model aphg".into(),
                    )
                    .into())
                }
                (_, None, None) => unreachable!("clap requires --m or --p"),
            };
            let size = match (m, p) {
                (Some(m), _) => format!("m={m}"),
                (_, Some(p)) => format!("p={p}"),
                _ => unreachable!(),
            };
            let comments = vec![format!(
                "seed={seed} {size} exclude_trivial={exclude_trivial}"
            )];
            let text = write_instance(&inst, &comments);
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| io_failure(&path, e))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::CountMono {
            coloring,
            random,
            n,
            seed,
            k,
        } => {
            let c = match (coloring, random) {
                (Some(bits), _) => Coloring::from_bitstring(&bits)?,
                (None, true) => {
                    let mut rng = TrialRng::new(seed.expect("clap requires --seed"), 0);
                    Coloring::from_fn(n.expect("clap requires --n"), |_| rng.next_u32() & 1 == 1)
                }
                (None, false) => unreachable!("clap requires a coloring source"),
            };
            let nm = PrimeModulus::new(c.len())?;
            let count = count_monochromatic_brute(&c, k, nm)?;
            let closed_form = if k == 3 {
                Some(mono_ap3_closed_form(nm, c.ones_count())?)
            } else {
                None
            };
            print_json(&json!({
                "n": c.len(),
                "k": k,
                "ones": c.ones_count(),
                "count": count.monochromatic,
                "total": count.total_progressions,
                "fraction": count.fraction,
                "closed_form": closed_form,
            }))
        }
        Command::Moments {
            problem,
            n,
            k,
            r,
            diagnostic,
        } => print_json(&moment_report(
            problem.into(),
            PrimeModulus::new(n)?,
            k,
            r,
            diagnostic,
        )?),
        Command::Solve {
            input,
            method,
            budget,
        } => {
            let text = fs::read_to_string(&input).map_err(|e| io_failure(&input, e))?;
            let result = match (parse_instance(&text)?, method) {
                (Instance::Formula(f), Method::Exhaustive) => count_nae_exhaustive(&f)?,
                (Instance::Formula(f), Method::Dpll) => decide_nae(&f, budget),
                (Instance::Hypergraph(h), Method::Exhaustive) => count_2col_exhaustive(&h)?,
                (Instance::Hypergraph(h), Method::Dpll) => decide_2col(&h, budget),
            };
            print_json(&result)
        }
        Command::Scan {
            problem,
            n,
            k,
            r_min,
            r_max,
            r_step,
            trials,
            seed,
            budget,
            exclude_trivial,
            out,
        } => {
            let mut exp = Experiment::new(problem.into(), PrimeModulus::new(n)?, k, trials, seed);
            exp.node_budget = budget;
            exp.exclude_trivial = exclude_trivial;
            let rows = threshold_scan(&exp, r_min, r_max, r_step)?;
            fs::write(&out, rows_to_csv(&rows)).map_err(|e| io_failure(&out, e))?;
            print_json(&json!({
                "rows": rows.len(),
                "out": out.display().to_string(),
                "crossover": crossover_estimate(&rows).ok(),
            }))
        }
        Command::VerifyMoments {
            problem,
            n,
            k,
            m,
            samples,
            seed,
        } => print_json(&verify_moments_montecarlo(
            problem.into(),
            PrimeModulus::new(n)?,
            k,
            m,
            samples,
            seed,
        )?),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    let line = json!({ "error": kind, "message": message.trim() });
    eprintln!("{line}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.to_string();
            let message: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
                .collect();
            return fail("usage", message.join(" ").trim_start_matches("error: "));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(f.kind, &f.message),
    }
}
