use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;

use quasiwave::diagnostics::RunClassification;
use quasiwave::harness::{
    cross_validate, load_scenario, run, sweep, write_report, write_sweep_csv, Axis, Prepared, ScenarioConfig,
    SolverChoice,
};
use quasiwave::Error;

const EXIT_MISMATCH: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "quasiwave", version, about = "Simulate u_tt = (c(u)^2 u_x)_x and classify how runs end")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write report.json plus CSV series
    Run {
        config: PathBuf,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid of scenarios varying dotted config fields
    Sweep {
        config: PathBuf,
        /// name=v1,v2,... (repeatable)
        #[arg(long, required = true)]
        axis: Vec<String>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the scenario hypotheses without running
    Check { config: PathBuf },
    /// Run both solvers and compare them
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Riemann,
    Flux,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Global,
    Degenerate,
    Gradient,
}

impl Expect {
    fn label(self) -> &'static str {
        match self {
            Expect::Global => "GLOBAL_WINDOW",
            Expect::Degenerate => "DEGENERATE",
            Expect::Gradient => "GRADIENT_BLOWUP",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QUASIWAVE_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 1,
                _ => EXIT_CONFIG,
            })
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Error> {
    load_scenario(path).map_err(|e| match e {
        Error::Io(m) => Error::Validation {
            field: "config".into(),
            message: m,
        },
        other => other,
    })
}

fn dispatch(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Run {
            config,
            solver,
            expect,
            out,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = solver {
                cfg.run.solver = match s {
                    SolverArg::Riemann => SolverChoice::Riemann,
                    SolverArg::Flux => SolverChoice::Flux,
                    SolverArg::Both => SolverChoice::Both,
                };
            }
            let report = run(&cfg)?;
            if let Some(dir) = out.or_else(|| cfg.output.dir.clone()) {
                write_report(&report, &dir)?;
            }
            for o in &report.outcomes {
                println!("{}: {}", o.solver.name(), describe(&o.classification));
                for v in &o.violations {
                    println!("  violation {:?} at t = {} by {:e}", v.monitor, v.t, v.magnitude);
                }
            }
            println!("classification: {}", describe(&report.classification));
            Ok(match (&report.classification, expect) {
                (RunClassification::Inconclusive { .. }, _) => EXIT_INCONCLUSIVE,
                (c, Some(e)) if c.label() != e.label() => EXIT_MISMATCH,
                _ => 0,
            })
        }
        Command::Sweep { config, axis, jobs, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Validation {
                field: "config".into(),
                message: format!("{}: {e}", config.display()),
            })?;
            let base: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
            let axes = axis.iter().map(|a| a.parse()).collect::<Result<Vec<Axis>, _>>()?;
            let rows = sweep(&base, &axes, jobs)?;
            write_sweep_csv(&rows, std::io::stdout().lock())?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_sweep_csv(&rows, std::fs::File::create(dir.join("sweep.csv"))?)?;
            }
            Ok(0)
        }
        Command::Check { config } => {
            let cfg = load(&config)?;
            let p = Prepared::new(&cfg)?;
            for w in &cfg.warnings {
                println!("warning: {w}");
            }
            for r in &p.hypotheses {
                let verdict = if r.all_satisfied() { "holds" } else { "fails" };
                println!("{:?}: {verdict}", r.theorem);
                for c in &r.conditions {
                    let mark = if c.satisfied { "ok  " } else { "FAIL" };
                    println!("  {mark} {:?} margin {:e}", c.condition, c.margin);
                }
            }
            let b = p.bounds();
            println!("theta1 floor: {}", opt(b.theta1_floor));
            println!("degeneracy time bound: {}", opt(b.degeneracy_time_bound));
            Ok(0)
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let v = cross_validate(&cfg)?;
            println!("riemann: {}", describe(&v.riemann));
            println!("flux:    {}", describe(&v.flux));
            println!("compared up to t = {}", v.t_compare);
            println!("max relative L2 distance: {:e}", v.max_relative_l2());
            println!("max Linf distance: {:e}", v.max_linf());
            if !v.classifications_agree {
                error!("classifications disagree");
                return Ok(EXIT_MISMATCH);
            }
            Ok(0)
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "not applicable".into(), |x| x.to_string())
}

fn describe(c: &RunClassification) -> String {
    match c {
        RunClassification::GlobalWindow { t_end } => format!("GLOBAL_WINDOW (t_end = {t_end})"),
        RunClassification::Degenerate { t_stop, x_min_location } => {
            format!("DEGENERATE (t_stop = {t_stop}, x = {x_min_location})")
        }
        RunClassification::GradientBlowup { t_stop, t_estimate } => {
            format!("GRADIENT_BLOWUP (t_stop = {t_stop}, T estimate = {})", opt(*t_estimate))
        }
        RunClassification::Inconclusive { reason } => format!("INCONCLUSIVE ({reason})"),
    }
}
