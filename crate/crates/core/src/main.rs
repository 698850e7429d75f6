use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pshcert::certify::{emit_grid, run_suite, CertifyError, FunctionId, PlaneRect, SliceSpec, Suite, SuiteConfig};

/// Thread count for the worker pool; unset means one per core.
const THREADS_ENV: &str = "PSHCERT_THREADS";

#[derive(Parser)]
#[command(name = "pshcert", version, about = "Sampled certification of plurisubharmonic constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Complex dimension.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Truncation order of the pole series.
    #[arg(long, default_value_t = 60)]
    trunc: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
    /// Samples for the form bound of the final lemma.
    #[arg(long, default_value_t = 100_000)]
    lemma3_samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite: example1, thm1, lemma21, lemma3, thm2 or all.
    Certify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
        /// Samples per certificate.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the scenario constants behind the fingerprint.
        #[arg(long)]
        dump_schedule: Option<PathBuf>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate a function on a grid of a complex plane slice and write CSV.
    Grid {
        #[arg(value_parser = parse_function)]
        function_id: FunctionId,
        /// Varying coordinate and fixed ones, e.g. `z,w1=0.5:0`.
        #[arg(long, value_parser = parse_slice)]
        slice: SliceSpec,
        /// Plane rectangle `x0:x1,y0:y1`.
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        region: PlaneRect,
        /// Resolution `NXxNY`.
        #[arg(long, value_parser = parse_res)]
        res: (usize, usize),
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: CertifyError| e.to_string())
}

fn parse_function(s: &str) -> Result<FunctionId, String> {
    s.parse().map_err(|e: CertifyError| e.to_string())
}

fn parse_slice(s: &str) -> Result<SliceSpec, String> {
    s.parse().map_err(|e: CertifyError| e.to_string())
}

fn parse_rect(s: &str) -> Result<PlaneRect, String> {
    s.parse().map_err(|e: CertifyError| e.to_string())
}

fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("bad resolution '{s}', expected NXxNY"))?;
    let p = |t: &str| t.parse::<usize>().map_err(|e| format!("bad resolution '{s}': {e}"));
    Ok((p(a)?, p(b)?))
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize =
        v.parse().ok().filter(|n| *n > 0).ok_or_else(|| format!("{THREADS_ENV}='{v}' is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, CertifyError> {
    match cli.command {
        Command::Certify { suite, common, samples, tol, report, dump_schedule, timing } => {
            let cfg = SuiteConfig {
                n: common.n,
                trunc: common.trunc,
                samples,
                lemma3_samples: common.lemma3_samples,
                seed: common.seed,
                tol,
                fd_step: common.fd_step,
                timing,
            };
            let r = run_suite(suite, &cfg)?;
            eprint!("{}", r.summary());
            match report {
                Some(path) => std::fs::write(path, r.to_json())?,
                None => print!("{}", r.to_json()),
            }
            if let Some(path) = dump_schedule {
                std::fs::write(path, r.schedule_dump())?;
            }
            Ok(r.passed())
        }
        Command::Grid { function_id, slice, region, res, out, common } => {
            let cfg = SuiteConfig {
                n: common.n,
                trunc: common.trunc,
                seed: common.seed,
                fd_step: common.fd_step,
                lemma3_samples: common.lemma3_samples,
                ..SuiteConfig::default()
            };
            let g = emit_grid(function_id, &slice, region, res, &cfg)?;
            g.write_csv(&out)?;
            eprintln!("wrote {} values to {}", g.values.len(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
