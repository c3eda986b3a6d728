use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use memxbar::cs::{support_error, DEFAULT_RHO, DEFAULT_SUPPORT_THRESHOLD};
use memxbar::eigen::PiConfig;
use memxbar::harness::generate::{
    generate_cs, generate_lp, generate_socp, generate_sym_with_multiplicity, DEFAULT_DOMINANT_EIGENVALUE,
    DEFAULT_GAP_FRACTION, DEFAULT_NOISE_BOUND, DEFAULT_NOISE_STD,
};
use memxbar::harness::plot::{emit_plots, write_signal_csv};
use memxbar::harness::problem_file::{read_problem, ConeProblemFile, CsProblemFile, ProblemFile};
use memxbar::harness::{run_experiment, ExperimentSpec, Kind};
use memxbar::pca::{bundled_iris_path, load_iris, write_scores};
use memxbar::{AdmmConfig, CsProblem, Error, LpProblem, SeededRng, SocpProblem, SparseSignal};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_SINGULAR: u8 = 4;

#[derive(Parser)]
#[command(name = "memxbar", version, about = "Memristor crossbar solvers and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a linear program on a simulated crossbar.
    SolveLp(SolveArgs),
    /// Solve a second-order cone program on a simulated crossbar.
    SolveQp(SolveArgs),
    /// Recover a sparse signal from noisy measurements.
    SolveCs(SolveArgs),
    /// Dominant eigenspace and deflated eigenpairs of a planted-spectrum matrix.
    Eig(EigArgs),
    /// Principal components of the Iris data (or another CSV).
    Pca(PcaArgs),
    /// Run an experiment sweep and write trials.csv / summary.csv.
    Bench(BenchArgs),
    /// Render SVG plots from a harness CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    variation: f64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// JSON problem file; a random instance is generated when omitted.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Dimension n (lp/qp) or sparsity s (cs) of a generated instance.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    paper_scale: bool,
    #[arg(long, default_value_t = memxbar::admm::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
}

#[derive(Args)]
struct EigArgs {
    #[command(flatten)]
    common: Common,
    /// Matrix dimension.
    #[arg(long, default_value_t = 50)]
    size: usize,
    /// Planted multiplicity of the dominant eigenvalue.
    #[arg(long, default_value_t = 1)]
    multiplicity: usize,
    /// Number of eigenpairs to report.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    standardize: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "lp")]
    kind: String,
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    variation: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    size: Option<Vec<usize>>,
    #[arg(long)]
    paper_scale: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Record wall-clock times (makes outputs run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Harness CSV (summary, trials, scores or signal).
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = "plots")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe is not a failure
        Err(err) if err.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Json(_) | Error::Csv(_)) => EXIT_PARSE,
        Some(Error::SingularMatrix { .. } | Error::RankDeficient { .. }) => EXIT_SINGULAR,
        Some(
            Error::InvalidConfig(_)
            | Error::InvalidRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotSquare { .. }
            | Error::NotSymmetric { .. }
            | Error::WrongShape { .. },
        ) => EXIT_USAGE,
        _ => 1,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::SolveLp(args) => solve_cone(args, false),
        Command::SolveQp(args) => solve_cone(args, true),
        Command::SolveCs(args) => solve_cs(args),
        Command::Eig(args) => eig(args),
        Command::Pca(args) => pca(args),
        Command::Bench(args) => bench(args),
        Command::Plot(args) => {
            for p in emit_plots(&args.csv, &args.out)? {
                writeln!(io::stdout(), "{}", p.display())?;
            }
            Ok(())
        }
    }
}

fn check_variation(v: f64) -> Result<()> {
    if !(0.0..=memxbar::harness::MAX_VARIATION).contains(&v) {
        return Err(
            Error::InvalidConfig(format!("variation must lie in [0, {}]", memxbar::harness::MAX_VARIATION)).into()
        );
    }
    Ok(())
}

fn emit(out: Option<&Path>, name: &str, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(io::stdout(), "{text}")?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

fn solve_cone(args: SolveArgs, second_order: bool) -> Result<()> {
    let c = &args.common;
    check_variation(c.variation)?;
    let (cost, g, h) = match &args.problem {
        Some(path) => match read_problem(path)? {
            ProblemFile::Lp(f) if !second_order => f.parts()?,
            ProblemFile::Socp(f) if second_order => f.parts()?,
            other => {
                let expected = if second_order { "socp" } else { "lp" };
                let message = format!("expected a {expected} problem, found {}", other.kind());
                return Err(Error::Parse { line: 0, message }.into());
            }
        },
        None => {
            let n = args.size.unwrap_or(if args.paper_scale { 100 } else { 50 });
            let mut rng = SeededRng::new(c.seed);
            let (cost, g, h) = if second_order {
                let p = generate_socp::<f64>(n, n / 2, &mut rng)?.problem;
                (p.cost, p.eq_matrix, p.eq_rhs)
            } else {
                let p = generate_lp::<f64>(n, n / 2, &mut rng)?.problem;
                (p.cost, p.eq_matrix, p.eq_rhs)
            };
            if let Some(dir) = &c.out {
                std::fs::create_dir_all(dir)?;
                let body = ConeProblemFile::from_parts(&cost, &g, &h, Some(c.seed));
                let file = if second_order { ProblemFile::Socp(body) } else { ProblemFile::Lp(body) };
                std::fs::write(dir.join("problem.json"), file.to_json()?)?;
            }
            (cost, g, h)
        }
    };
    let cfg = AdmmConfig::new(c.rho.unwrap_or(1.0), c.eps, args.max_iterations);
    let rng = SeededRng::new(c.seed ^ 0x9e37_79b9);
    let (report, objective) = if second_order {
        let p = SocpProblem::new(cost, g, h)?;
        let r = memxbar::solve_socp(&p, &cfg, c.variation, rng)?;
        let obj = p.objective(&r.x);
        (r, obj)
    } else {
        let p = LpProblem::new(cost, g, h)?;
        let r = memxbar::solve_lp(&p, &cfg, c.variation, rng)?;
        let obj = p.objective(&r.x);
        (r, obj)
    };
    emit(
        c.out.as_deref(),
        "solution.json",
        &json!({
            "kind": if second_order { "socp" } else { "lp" },
            "x": report.x,
            "objective": objective,
            "converged": report.outcome.converged,
            "termination": format!("{:?}", report.outcome.termination),
            "iterations": report.outcome.iterations_used,
            "programs": report.programs,
        }),
    )
}

fn solve_cs(args: SolveArgs) -> Result<()> {
    let c = &args.common;
    check_variation(c.variation)?;
    let (problem, truth): (CsProblem<f64>, Option<SparseSignal<f64>>) = match &args.problem {
        Some(path) => match read_problem(path)? {
            ProblemFile::Cs(f) => (f.to_problem()?, f.truth()),
            other => {
                return Err(
                    Error::Parse { line: 0, message: format!("expected a cs problem, found {}", other.kind()) }.into()
                )
            }
        },
        None => {
            let (p, q) = if args.paper_scale { (1024, 500) } else { (256, 128) };
            let s = args.size.unwrap_or(if args.paper_scale { 50 } else { 12 });
            let mut rng = SeededRng::new(c.seed);
            let (prob, z) = generate_cs::<f64>(p, q, s, DEFAULT_NOISE_STD, DEFAULT_NOISE_BOUND, &mut rng)?;
            if let Some(dir) = &c.out {
                std::fs::create_dir_all(dir)?;
                let file = ProblemFile::Cs(CsProblemFile::from_problem(&prob, Some(&z), Some(c.seed)));
                std::fs::write(dir.join("problem.json"), file.to_json()?)?;
            }
            (prob, Some(z))
        }
    };
    let cfg = AdmmConfig::new(c.rho.unwrap_or(DEFAULT_RHO), c.eps, args.max_iterations);
    let report = memxbar::solve_cs(&problem, &cfg, c.variation, SeededRng::new(c.seed ^ 0x9e37_79b9))?;
    let support: Vec<usize> =
        report.signal.iter().enumerate().filter(|(_, v)| v.abs() > DEFAULT_SUPPORT_THRESHOLD).map(|(i, _)| i).collect();
    let mut value = json!({
        "kind": "cs",
        "signal": report.signal,
        "support": support,
        "converged": report.outcome.converged,
        "termination": format!("{:?}", report.outcome.termination),
        "iterations": report.outcome.iterations_used,
        "programs": report.programs,
    });
    if let Some(z) = &truth {
        value["support_error"] = json!(support_error(&report.signal, z, DEFAULT_SUPPORT_THRESHOLD));
        value["rel_error"] = json!(memxbar::numerics::vector::relative_error(&report.signal, &z.values));
        if let Some(dir) = &c.out {
            std::fs::create_dir_all(dir)?;
            write_signal_csv(dir.join("signal.csv"), &z.values, &report.signal)?;
        }
    }
    emit(c.out.as_deref(), "solution.json", &value)
}

fn eig(args: EigArgs) -> Result<()> {
    let c = &args.common;
    check_variation(c.variation)?;
    let mut rng = SeededRng::new(c.seed);
    let a = generate_sym_with_multiplicity::<f64>(
        args.size,
        args.multiplicity,
        DEFAULT_DOMINANT_EIGENVALUE,
        DEFAULT_GAP_FRACTION * DEFAULT_DOMINANT_EIGENVALUE,
        &mut rng,
    )?;
    let cfg = PiConfig::<f64>::default();
    let result = memxbar::top_k_eigen(&a, args.k, &cfg, c.variation, rng.fork(1))?;
    let dominant = &result.spaces[0];
    emit(
        c.out.as_deref(),
        "eigen.json",
        &json!({
            "multiplicity": dominant.multiplicity,
            "dominant_eigenvalue": dominant.eigenvalue,
            "eigenvalues": result.eigenvalues(),
            "max_run_iterations": result.spaces.iter().map(|s| s.max_run_iterations).max(),
            "programs": result.programs,
        }),
    )
}

fn pca(args: PcaArgs) -> Result<()> {
    let c = &args.common;
    check_variation(c.variation)?;
    let path = args.data.clone().unwrap_or_else(bundled_iris_path);
    let data = load_iris::<f64>(&path)?;
    let options = memxbar::PcaOptions { standardize: args.standardize };
    let r = memxbar::pca(&data, args.k, &PiConfig::default(), options, c.variation, SeededRng::new(c.seed))?;
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        write_scores(dir.join("scores.csv"), &r, data.labels.as_deref())?;
    }
    emit(
        c.out.as_deref(),
        "pca.json",
        &json!({ "variances": r.variances, "components": r.components, "programs": r.programs }),
    )
}

fn bench(args: BenchArgs) -> Result<()> {
    let kind: Kind = args.kind.parse()?;
    let mut spec = if args.paper_scale { ExperimentSpec::full_scale(kind) } else { ExperimentSpec::desk(kind) };
    if let Some(v) = args.rho {
        spec.rho_values = v;
    }
    if let Some(v) = args.eps {
        spec.epsilon = v;
    }
    if let Some(v) = args.variation {
        spec.variation_levels = v;
    }
    if let Some(v) = args.seed {
        spec.base_seed = v;
    }
    if let Some(v) = args.trials {
        spec.trials = v;
    }
    if let Some(v) = args.size {
        spec.sizes = v;
    }
    spec.record_timing = args.timing;
    spec.output_dir = Some(args.out.clone());
    let result = run_experiment(&spec)?;
    writeln!(
        io::stdout(),
        "{:<5} {:>6} {:>9} {:>10} {:<20} {:>12} {:>9} {:>9}",
        "kind",
        "size",
        "variation",
        "rho",
        "metric",
        "mean",
        "iters",
        "conv"
    )?;
    for row in &result.summary {
        writeln!(
            io::stdout(),
            "{:<5} {:>6} {:>9} {:>10} {:<20} {:>12.4e} {:>9} {:>6}/{}",
            row.kind,
            row.size,
            row.variation,
            row.rho,
            row.metric,
            row.value,
            row.iters,
            row.converged,
            row.trial
        )?;
    }
    writeln!(
        io::stdout(),
        "wrote {} and {}",
        args.out.join("trials.csv").display(),
        args.out.join("summary.csv").display()
    )?;
    Ok(())
}
