use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockdiag::commands::{self, CliError, CliResult, Method, Outcome, Status};
use blockdiag::generate::RandomParams;
use blockdiag_core::subspace::Selector;
use clap::{Args, Parser, Subcommand};

/// Block diagonalization of 2×2 block matrices through angular operators.
///
/// Exit codes: 0 success, 1 verification failure, 2 parse or dimension
/// error, 3 gap violation or subspace not a graph, 4 no convergence.
#[derive(Parser)]
#[command(name = "blockdiag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Normalized residual tolerance.
    #[arg(long, global = true, env = "BLOCKDIAG_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Worker threads for independent instances.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Write the JSON report (or generated problem) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct SplitArgs {
    /// Select eigenvalues of B at or below this value.
    #[arg(long)]
    threshold: Option<f64>,

    /// Select eigenvalues of B by ascending position, e.g. 0,1,2.
    #[arg(long, value_delimiter = ',')]
    indices: Option<Vec<usize>>,
}

impl SplitArgs {
    fn selector(self) -> Option<Selector> {
        self.threshold
            .map(Selector::Threshold)
            .or(self.indices.map(Selector::Indices))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute X, diagonalize, and verify every identity.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Spectral)]
        method: Method,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Check a given X against a problem.
    Verify { problem: PathBuf, x: PathBuf },
    /// Generate seeded random Hermitian problems with a spectral gap.
    ///
    /// With --count above 1, --out names a directory that receives
    /// problem-0000.json, problem-0001.json, ...
    Random {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Operator norm of the coupling W.
        #[arg(long, default_value_t = 0.5)]
        coupling: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Relative bounds, resolvent estimates and the projection bound.
    Bounds {
        problem: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4")]
        a_grid: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        lambda_samples: usize,
    },
    /// Run a family of growing finite sections.
    ///
    /// Family file: {"kind": "diag-power", "p": 1, "q": 0,
    /// "coupling": "identity" | "banded", "band": 1, "scale": 1}.
    /// Blocks are A0 = diag(-j^p), A1 = diag(j^p) and W weighted by j^q.
    Sweep {
        family: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4")]
        a_grid: Vec<f64>,
    },
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(outcome: Outcome, out: Option<&Path>) -> CliResult<Status> {
    print!("{}", outcome.text);
    if let Some(path) = out {
        write(path, &outcome.json)?;
    }
    Ok(outcome.status)
}

fn run(cli: Cli) -> CliResult<Status> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Solve { problem, method, split } => emit(commands::solve(&problem, method, split.selector(), cli.tol)?, out),
        Command::Verify { problem, x } => emit(commands::verify(&problem, &x, cli.tol)?, out),
        Command::Random { n0, n1, gap, coupling, seed, count } => {
            let params = RandomParams {
                n0,
                n1,
                gap,
                coupling_scale: coupling,
                seed,
            };
            let files = commands::random(&params, count, cli.jobs)?;
            match (out, files.as_slice()) {
                (None, [single]) => print!("{single}"),
                (None, _) => return Err(CliError::Usage("--out <dir> is required with --count above 1".into())),
                (Some(path), [single]) => write(path, single)?,
                (Some(dir), many) => {
                    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                        path: dir.to_owned(),
                        source,
                    })?;
                    for (i, text) in many.iter().enumerate() {
                        write(&dir.join(format!("problem-{i:04}.json")), text)?;
                    }
                }
            }
            Ok(Status::Ok)
        }
        Command::Bounds { problem, a_grid, lambda_samples } => emit(commands::bounds(&problem, &a_grid, lambda_samples)?, out),
        Command::Sweep { family, sizes, a_grid } => emit(commands::sweep(&family, &sizes, &a_grid, cli.tol, cli.jobs)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.status()
    });
    ExitCode::from(status.code() as u8)
}
