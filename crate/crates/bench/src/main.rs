use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fastcaputo::{EpsilonPolicy, OdeProblem, ProblemSpec, Scheme, SolveOptions, TimeGrid};
use fastcaputo_bench::{
    compute_reference, run_convergence_study, save_reference, timing_and_memory_probe, BenchError,
    Example, ReferenceSpec, Result, StudyConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "fastcaputo",
    version,
    about = "Variable-order Caputo solvers and convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve u' + D^{α(t)} u = 1, u(0) = 1 on (0, 1].
    Ode(SolveArgs),
    /// Solve u_t + D^{α(t)} u = u_xx, u(x, 0) = sin(πx).
    Pde(SolveArgs),
    /// Grid-refinement study with error, rate, time and memory columns.
    Convergence(StudyArgs),
    /// Compute a fine RF-L1 reference and store it in cache format.
    Reference(ReferenceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    L1,
    Fl1,
    Rfl1,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::L1 => Scheme::L1,
            SchemeArg::Fl1 => Scheme::Fl1,
            SchemeArg::Rfl1 => Scheme::Rfl1,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExampleArg {
    Ode,
    Pde,
}

impl From<ExampleArg> for Example {
    fn from(e: ExampleArg) -> Self {
        match e {
            ExampleArg::Ode => Example::Ode,
            ExampleArg::Pde => Example::Pde,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepArg {
    Temporal,
    Spatial,
}

fn parse_epsilon(s: &str) -> std::result::Result<EpsilonPolicy, String> {
    if s == "dt2" {
        return Ok(EpsilonPolicy::DtSquared);
    }
    s.parse::<f64>()
        .map(EpsilonPolicy::Fixed)
        .map_err(|_| format!("expected `dt2` or a number, got {s:?}"))
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// α(0)
    #[arg(long, default_value_t = 0.05)]
    alpha0: f64,
    /// α(T)
    #[arg(long = "alphaT", default_value_t = 0.5)]
    alpha_t: f64,
    /// `dt2` for ε = (Δt/T)², or a fixed tolerance
    #[arg(long, default_value = "dt2", value_parser = parse_epsilon)]
    epsilon: EpsilonPolicy,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "rfl1")]
    scheme: SchemeArg,
    /// Number of time steps
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Number of spatial cells (PDE only)
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[command(flatten)]
    order: OrderArgs,
    /// CSV with the time trace (ODE) or the final profile (PDE)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "ode")]
    example: ExampleArg,
    #[arg(long, value_enum, default_value = "temporal")]
    sweep: SweepArg,
    #[arg(long, value_enum, default_value = "rfl1")]
    scheme: SchemeArg,
    #[command(flatten)]
    order: OrderArgs,
    /// Comma-separated swept resolutions; defaults depend on the study
    #[arg(long, value_delimiter = ',')]
    resolutions: Option<Vec<usize>>,
    /// Fixed counterpart resolution (m for temporal, n for spatial PDE studies)
    #[arg(long)]
    fixed: Option<usize>,
    /// `auto` to compute the reference, or a cache file written by `reference`
    #[arg(long = "ref", default_value = "auto")]
    reference: String,
    /// Swept resolution of a computed reference
    #[arg(long)]
    ref_resolution: Option<usize>,
    /// Directory for cached references
    #[arg(long)]
    cache: Option<PathBuf>,
    /// CSV report; a Markdown table is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReferenceArgs {
    #[arg(long, value_enum, default_value = "ode")]
    example: ExampleArg,
    #[arg(long, default_value_t = 1 << 17)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[command(flatten)]
    order: OrderArgs,
    #[arg(long)]
    out: PathBuf,
}

fn solve(example: Example, args: SolveArgs) -> Result<()> {
    let scheme = Scheme::from(args.scheme);
    let profile = fastcaputo::VoOrderProfile::sine(
        args.order.alpha0,
        args.order.alpha_t,
        1.0,
        fastcaputo_bench::study::PROFILE_SAMPLES,
    )?;
    let time = TimeGrid::new(1.0, args.n)?;
    let keep_trace = example == Example::Ode && args.out.is_some();
    let (outcome, probe) = timing_and_memory_probe(|| match example {
        Example::Ode => fastcaputo::solve_ode(
            scheme,
            &OdeProblem::unit_source(),
            &profile,
            time,
            args.order.epsilon,
            SolveOptions { keep_trace },
        ),
        Example::Pde => fastcaputo::solve_pde(
            scheme,
            &ProblemSpec::sine_decay(),
            &profile,
            time,
            args.m,
            args.order.epsilon,
            SolveOptions::default(),
        ),
    })?;
    let field = &outcome.field;
    println!("scheme      {scheme}");
    println!("n           {}", args.n);
    if example == Example::Pde {
        println!("m           {}", args.m);
        let peak = field
            .final_values()
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        println!("max |u(T)|  {peak:.12e}");
    } else {
        println!("u(T)        {:.12e}", field.final_scalar());
    }
    println!("epsilon     {:e}", outcome.epsilon);
    if let Some(q) = probe.quadrature_len {
        println!("N_eps       {q}");
    }
    println!("mem_values  {}", probe.retained_values);
    println!("cpu_s       {:.6}", probe.seconds);
    if let Some(path) = args.out {
        let mut w = csv::Writer::from_path(&path).map_err(BenchError::from)?;
        match (example, field.spatial_grid()) {
            (Example::Pde, Some(grid)) => {
                w.write_record(["x", "u"]).map_err(BenchError::from)?;
                for (j, u) in field.final_values().iter().enumerate() {
                    w.write_record([grid.node(j).to_string(), u.to_string()])
                        .map_err(BenchError::from)?;
                }
            }
            _ => {
                w.write_record(["t", "u"]).map_err(BenchError::from)?;
                for (&k, u) in field.levels().iter().zip(field.scalar_trace()) {
                    w.write_record([time.node(k).to_string(), u.to_string()])
                        .map_err(BenchError::from)?;
                }
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn study(args: StudyArgs) -> Result<()> {
    let scheme = Scheme::from(args.scheme);
    let (a0, at) = (args.order.alpha0, args.order.alpha_t);
    let mut config = match (Example::from(args.example), args.sweep) {
        (Example::Ode, SweepArg::Temporal) => StudyConfig::ode_temporal(scheme, a0, at),
        (Example::Pde, SweepArg::Temporal) => StudyConfig::pde_temporal(scheme, a0, at),
        (Example::Pde, SweepArg::Spatial) => StudyConfig::pde_spatial(scheme, a0, at),
        (Example::Ode, SweepArg::Spatial) => {
            return Err(BenchError::Config("the ODE has no spatial sweep".into()))
        }
    };
    config.epsilon = args.order.epsilon;
    if let Some(r) = args.resolutions {
        config.resolutions = r;
    }
    if args.fixed.is_some() {
        config.fixed = args.fixed;
    }
    config.reference = match args.reference.as_str() {
        "auto" => match (args.ref_resolution, &config.reference) {
            (Some(r), _) => ReferenceSpec::Compute(r),
            (None, spec) => spec.clone(),
        },
        path => ReferenceSpec::File(PathBuf::from(path)),
    };
    config.cache_dir = args.cache;
    config.output = args.out;
    let report = run_convergence_study(&config)?;
    print!("{}", report.to_markdown());
    Ok(())
}

fn reference(args: ReferenceArgs) -> Result<()> {
    let example = Example::from(args.example);
    let mut config = StudyConfig::ode_temporal(Scheme::Rfl1, args.order.alpha0, args.order.alpha_t);
    config.example = example;
    config.epsilon = args.order.epsilon;
    let cells = (example == Example::Pde).then_some(args.m);
    let key = config.key_for(args.n, cells);
    // Validates the order profile before the long solve.
    config.profile()?;
    let reference = compute_reference(&key)?;
    save_reference(&args.out, &key, &reference)?;
    println!("{} -> {}", key.describe(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ode(args) => solve(Example::Ode, args),
        Command::Pde(args) => solve(Example::Pde, args),
        Command::Convergence(args) => study(args),
        Command::Reference(args) => reference(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
