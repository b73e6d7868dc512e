use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use algebroid_lab::dynamics::{integrate, sample_reachable, ConstraintMode, ControlSchedule, SampleOptions};
use algebroid_lab::model_file::{Model, ModelFile};
use algebroid_lab::report::{analyze, check_morphisms, AnalyzeRequest};
use algebroid_lab::Error;

/// Controllability analysis and simulation of control systems on Lie algebroids.
#[derive(Parser)]
#[command(name = "algebroid-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run accessibility and controllability tests and write a JSON report.
    Analyze(Common),
    /// Integrate the mechanical system and write a CSV trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Time horizon.
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Integration step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Initial fiber velocity, comma separated (default zero).
        #[arg(long)]
        velocity: Option<String>,
        /// Constant control values, comma separated (default zero).
        #[arg(long, conflicts_with = "random_controls")]
        controls: Option<String>,
        /// Draw a random piecewise-constant schedule from the seed.
        #[arg(long)]
        random_controls: bool,
        /// Bound on random control values.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        /// Sample this many random trajectories from rest and write their endpoints.
        #[arg(long, value_name = "N")]
        sample_reachable: Option<usize>,
        /// Integrate constrained systems without projecting velocities.
        #[arg(long)]
        full_constraint: bool,
    },
    /// Check the bundle maps declared in the model and transport verdicts.
    CheckMorphism(Common),
}

#[derive(Args)]
struct Common {
    /// Model file (JSON).
    model: PathBuf,
    /// Analysis point, comma separated; repeat for several points.
    #[arg(long)]
    point: Vec<String>,
    /// Test to run; repeat for several tests.
    #[arg(long = "test")]
    tests: Vec<String>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Model(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Run(e.to_string())
    }
}

fn parse_csv(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Failure::Run(format!("bad number `{t}` in `{s}`: {e}"))))
        .collect()
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    ModelFile::from_json(&text)
        .and_then(|f| f.compile())
        .map_err(|e| Failure::Model(format!("{}: {e}", path.display())))
}

fn request(c: &Common) -> Result<AnalyzeRequest, Failure> {
    let points = if c.point.is_empty() {
        None
    } else {
        Some(c.point.iter().map(|p| parse_csv(p)).collect::<Result<Vec<_>, _>>()?)
    };
    Ok(AnalyzeRequest { points, tests: c.tests.clone(), max_degree: c.max_degree, tol: c.tol })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Run(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(c) => {
            let model = load(&c.model)?;
            let report = analyze(&model, &request(&c)?)?;
            emit(&c.out, &report.to_json()?)
        }
        Command::CheckMorphism(c) => {
            let model = load(&c.model)?;
            if model.morphisms.is_empty() {
                return Err(Failure::Run(format!("{} declares no morphisms", c.model.display())));
            }
            let report = check_morphisms(&model, &request(&c)?)?;
            emit(&c.out, &report.to_json()?)
        }
        Command::Simulate {
            common: c,
            horizon,
            step,
            velocity,
            controls,
            random_controls,
            bound,
            sample_reachable: samples,
            full_constraint,
        } => {
            let model = load(&c.model)?;
            let sys = model
                .system
                .mech
                .as_ref()
                .ok_or_else(|| Failure::Run("simulate needs a mechanical system (a metric)".into()))?;
            let (n, l, k) = (sys.algebroid.base_dim(), sys.rank(), sys.actuation.len());
            let x0 = match c.point.first() {
                Some(p) => parse_csv(p)?,
                None => model.analysis.points[0].clone(),
            };
            if let Some(count) = samples {
                let opts = SampleOptions { bound, ..SampleOptions::new(horizon, count, c.seed) };
                let s = sample_reachable(sys, &x0, &opts)?;
                let mut csv = (1..=n).map(|i| format!("x{i}")).chain((1..=l).map(|i| format!("y{i}"))).collect::<Vec<_>>().join(",");
                csv.push('\n');
                for (x, y) in &s.endpoints {
                    let row: Vec<String> = x.iter().chain(y).map(|v| v.to_string()).collect();
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
                emit(&c.out, &csv)?;
                eprintln!(
                    "samples {} dropped {} base affine rank {} of {n} full affine rank {} of {}",
                    s.endpoints.len(),
                    s.dropped,
                    s.base_rank,
                    s.full_rank,
                    n + l
                );
                if c.out.is_some() {
                    println!("base_rank {} full_rank {} dropped {}", s.base_rank, s.full_rank, s.dropped);
                }
                return Ok(());
            }
            let y0 = match velocity {
                Some(v) => parse_csv(&v)?,
                None => vec![0.0; l],
            };
            let sched = if random_controls {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed);
                ControlSchedule::random(k, horizon, 4, bound, &mut rng)?
            } else {
                let u = match controls {
                    Some(u) => parse_csv(&u)?,
                    None => vec![0.0; k],
                };
                ControlSchedule::constant(u, horizon)?
            };
            let mode = if full_constraint { ConstraintMode::Full } else { ConstraintMode::Reduced };
            let tr = integrate(sys, &x0, &y0, &sched, step, mode)?;
            if let Some(t) = tr.diverged {
                log::warn!("integration stopped at t = {t}: state no longer finite");
            }
            emit(&c.out, &tr.to_csv(n, l))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
