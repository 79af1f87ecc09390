use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use sonc_core::bnb::{normalize, solve, BnbConfig, Normalized, Problem, SolveStatus};
use sonc_core::generate::{random_instance, GenSpec};
use sonc_core::gp::GpSolver;
use sonc_core::interval::interval_bound;
use sonc_core::io;
use sonc_core::oracle::grid_minimum;
use sonc_core::pbc::{ExponentStrategy, MaxSource};
use sonc_core::relax::{sonc_bound, BoundResult, RelaxConfig, RelaxStatus};
use sonc_core::report::{bound_report, inspect_report, solve_report, BoundRun, GridCheck, Report};

const EXIT_OK: u8 = 0;
const EXIT_IO: u8 = 1;
const EXIT_UNSOLVED: u8 = 2;
const EXIT_INTERRUPTED: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_UNSOUND: u8 = 5;

const GRID_STEP: f64 = 0.02;
const GRID_SLACK: f64 = 1e-5;
const GRID_MAX_POINTS: f64 = 2e7;

#[derive(Parser)]
#[command(
    name = "sonc",
    version,
    about = "SONC lower bounds for polynomial optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Root SONC bound
    Bound {
        /// Instance file (JSON)
        file: PathBuf,
        #[command(flatten)]
        relax: RelaxArgs,
        /// Check the bound against a brute-force grid minimum
        #[arg(long)]
        grid_oracle: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Branch and bound
    Solve {
        /// Instance file (JSON)
        file: PathBuf,
        #[command(flatten)]
        relax: RelaxArgs,
        /// Solve the relaxation at depths divisible by this
        #[arg(long, default_value_t = 10)]
        freq: usize,
        /// Relative gap tolerance
        #[arg(long, default_value_t = 1e-4)]
        gap: f64,
        /// Stop after this many nodes [default: 100000]
        #[arg(long)]
        node_limit: Option<usize>,
        /// Seed for incumbent sampling
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Newton polytope, ST verdict and bound-constraint preview
    Inspect {
        /// Instance file (JSON)
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fixed4")]
        strategy: StrategyArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a random instance
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long, default_value_t = 6)]
        terms: usize,
        #[arg(long, default_value_t = 0)]
        constraints: usize,
        /// Omit the odd non-square vertex term
        #[arg(long)]
        no_odd_vertex: bool,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum StrategyArg {
    N0,
    N4,
    Fixed4,
}

impl From<StrategyArg> for ExponentStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::N0 => ExponentStrategy::N0,
            StrategyArg::N4 => ExponentStrategy::N4,
            StrategyArg::Fixed4 => ExponentStrategy::Fixed4,
        }
    }
}

#[derive(Args)]
struct RelaxArgs {
    #[arg(long, value_enum, default_value = "fixed4")]
    strategy: StrategyArg,
    /// Disable bound constraints
    #[arg(long)]
    no_pbc: bool,
    /// Solver tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
}

impl RelaxArgs {
    fn config(&self) -> RelaxConfig {
        let mut solver = GpSolver::default().with_tol(self.tol);
        if let Some(t) = self.time_limit {
            solver = solver.with_time_limit(Some(Duration::from_secs_f64(t.max(0.0))));
        }
        RelaxConfig {
            use_pbc: !self.no_pbc,
            strategy: self.strategy.into(),
            max_source: MaxSource::default(),
            solver,
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of text
    #[arg(long)]
    json: bool,
}

fn load(path: &Path) -> Result<(Problem, Normalized), u8> {
    match io::parse(path) {
        Ok(p) => {
            let n = normalize(&p);
            Ok((p, n))
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(if e.is_parse() { EXIT_PARSE } else { EXIT_IO })
        }
    }
}

fn emit(report: &Report, out: &OutArgs) -> Result<(), u8> {
    if out.json {
        print!("{}", report.to_json_string());
    } else {
        print!("{}", report.text);
    }
    if let Some(path) = &out.out {
        if let Err(e) = std::fs::write(path, report.to_json_string()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return Err(EXIT_IO);
        }
    }
    Ok(())
}

fn relax_exit(s: RelaxStatus) -> u8 {
    match s {
        RelaxStatus::Optimal | RelaxStatus::Infeasible => EXIT_OK,
        RelaxStatus::Interrupted => EXIT_INTERRUPTED,
        RelaxStatus::Unsolvable | RelaxStatus::DidNotRun => EXIT_UNSOLVED,
    }
}

fn cmd_bound(file: &Path, relax: &RelaxArgs, oracle: bool, out: &OutArgs) -> u8 {
    let start = Instant::now();
    let (problem, norm) = match load(file) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = relax.config();
    let p = &norm.problem;
    let gs = p.polynomial_constraints();
    let bx = p.var_box().ok();
    let result = if norm.sonc_enabled {
        sonc_bound(&p.objective, &gs, bx.as_ref(), &cfg)
    } else {
        BoundResult {
            status: RelaxStatus::DidNotRun,
            bound: f64::NEG_INFINITY,
            gp_solution: None,
            notes: Vec::new(),
            formulation: None,
            strategy: None,
            pb_constraints: 0,
            pieces: 0,
        }
    };
    let interval = bx.as_ref().map(|b| interval_bound(&p.objective, b));

    let grid = if oracle {
        match &bx {
            Some(b) => {
                let points: f64 = (0..b.dim())
                    .map(|i| (b.width(i) / GRID_STEP).floor() + 2.0)
                    .product();
                if points > GRID_MAX_POINTS {
                    eprintln!("error: grid oracle needs {points:.0} points");
                    return EXIT_IO;
                }
                let minimum = grid_minimum(&p.objective, &gs, b, GRID_STEP).map(|(v, _)| v);
                let sound = match minimum {
                    Some(m) if result.bound.is_finite() => result.bound <= m + GRID_SLACK,
                    _ => true,
                };
                Some(GridCheck {
                    step: GRID_STEP,
                    minimum,
                    sound,
                })
            }
            None => {
                eprintln!("error: grid oracle needs a finite box");
                return EXIT_IO;
            }
        }
    } else {
        None
    };

    let report = bound_report(&BoundRun {
        problem: &problem,
        normalized: &norm,
        strategy: relax.strategy.into(),
        use_pbc: !relax.no_pbc,
        result: &result,
        interval,
        grid,
        elapsed: start.elapsed(),
    });
    if let Err(code) = emit(&report, out) {
        return code;
    }
    if grid.is_some_and(|g| !g.sound) {
        eprintln!("error: bound exceeds the grid minimum");
        return EXIT_UNSOUND;
    }
    relax_exit(result.status)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    file: &Path,
    relax: &RelaxArgs,
    freq: usize,
    gap: f64,
    node_limit: Option<usize>,
    seed: u64,
    out: &OutArgs,
) -> u8 {
    let (problem, norm) = match load(file) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let mut rc = relax.config();
    rc.solver.time_limit = None;
    let cfg = BnbConfig {
        freq,
        gap_tol: gap,
        time_limit: relax
            .time_limit
            .map(|t| Duration::from_secs_f64(t.max(0.0))),
        node_limit: node_limit.or(BnbConfig::default().node_limit),
        seed,
        relax: rc,
        ..BnbConfig::default()
    };
    let rep = match solve(&norm, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_UNSOLVED;
        }
    };
    let report = solve_report(&problem, &norm, relax.strategy.into(), !relax.no_pbc, &rep);
    if let Err(code) = emit(&report, out) {
        return code;
    }
    match rep.status {
        SolveStatus::GapClosed | SolveStatus::Infeasible => EXIT_OK,
        SolveStatus::Interrupted | SolveStatus::NodeLimit => EXIT_INTERRUPTED,
        SolveStatus::NoIncumbent => EXIT_UNSOLVED,
    }
}

fn cmd_inspect(file: &Path, strategy: StrategyArg, out: &OutArgs) -> u8 {
    let (problem, norm) = match load(file) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let report = inspect_report(&problem, &norm, strategy.into(), MaxSource::default());
    match emit(&report, out) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

fn cmd_generate(spec: &GenSpec, seed: u64, out: Option<&Path>) -> u8 {
    let p = random_instance(spec, seed);
    match out {
        None => {
            print!("{}", io::serialize(&p));
            EXIT_OK
        }
        Some(path) => match io::write(path, &p) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_IO
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Bound {
            file,
            relax,
            grid_oracle,
            out,
        } => cmd_bound(file, relax, *grid_oracle, out),
        Command::Solve {
            file,
            relax,
            freq,
            gap,
            node_limit,
            seed,
            out,
        } => cmd_solve(file, relax, *freq, *gap, *node_limit, *seed, out),
        Command::Inspect {
            file,
            strategy,
            out,
        } => cmd_inspect(file, *strategy, out),
        Command::Generate {
            seed,
            vars,
            degree,
            terms,
            constraints,
            no_odd_vertex,
            out,
        } => {
            if *vars == 0 || *degree == 0 {
                eprintln!("error: --vars and --degree must be positive");
                return ExitCode::from(EXIT_IO);
            }
            let spec = GenSpec {
                vars: *vars,
                max_degree: *degree,
                terms: *terms,
                constraints: *constraints,
                odd_vertex: !no_odd_vertex,
                ..GenSpec::default()
            };
            cmd_generate(&spec, *seed, out.as_deref())
        }
    };
    ExitCode::from(code)
}
