use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, SolverChoice};
use crate::diagnostics::{
    check_with_plan, detect_stop, record_flux, record_riemann, riccati_estimate, theta1_floor, DiagnosticsRecord,
    MonitorContext, MonitorPlan, RiccatiFit, RunClassification, RunEnd, Thresholds, Violation,
};
use crate::error::Result;
use crate::flux_solver::{flux_cfl_timestep, init_flux, step_flux, FluxState};
use crate::initial_data::{check_hypotheses, degeneracy_time_bound, Grid, HypothesisReport, Scenario, Theorem};
use crate::riemann_solver::{cfl_timestep, step, RiemannState, SolverSettings};
use crate::wavespeed::WaveSpeedModel;

/// The leapfrog step is only shortened once the CFL bound drops this far
/// below the current step.
const FLUX_DT_SLACK: f64 = 0.95;

const HORIZON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Riemann,
    Flux,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Riemann => "riemann",
            SolverKind::Flux => "flux",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOutcome {
    pub solver: SolverKind,
    pub classification: RunClassification,
    pub end: RunEnd,
    pub riccati: Option<RiccatiFit>,
    pub violations: Vec<Violation>,
    pub steps: usize,
    pub settings: SolverSettings,
    pub series: Vec<DiagnosticsRecord>,
}

impl SolverOutcome {
    /// Time of the last record: the stop time or the horizon.
    pub fn t_final(&self) -> f64 {
        self.series.last().map_or(0.0, |r| r.t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub theta1_floor: Option<f64>,
    pub degeneracy_time_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub grid: Grid,
    pub support_radius: f64,
    pub solver: SolverChoice,
    pub version: String,
    pub warnings: Vec<String>,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub classification: RunClassification,
    pub hypotheses: Vec<HypothesisReport>,
    pub bounds: Bounds,
    /// One entry per solver run, Riemann first.
    pub outcomes: Vec<SolverOutcome>,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn primary(&self) -> &SolverOutcome {
        &self.outcomes[0]
    }

    pub fn outcome(&self, solver: SolverKind) -> Option<&SolverOutcome> {
        self.outcomes.iter().find(|o| o.solver == solver)
    }

    pub fn riccati(&self) -> Option<&RiccatiFit> {
        self.primary().riccati.as_ref()
    }

    pub fn series(&self) -> &[DiagnosticsRecord] {
        &self.primary().series
    }
}

/// `u` at requested times, linearly interpolated between the steps that
/// bracket each time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Snapshots {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

enum Advance {
    Ok,
    Stop { degenerate: bool, blowup: bool },
    Fail(String),
}

trait Driver {
    fn t(&self) -> f64;
    fn u(&self) -> &[f64];
    fn advance(&mut self, t_end: f64) -> Advance;
    fn record(&self) -> DiagnosticsRecord;
}

struct RiemannDriver<'a> {
    state: RiemannState,
    model: &'a WaveSpeedModel,
    settings: SolverSettings,
}

impl Driver for RiemannDriver<'_> {
    fn t(&self) -> f64 {
        self.state.t
    }

    fn u(&self) -> &[f64] {
        self.state.u.values()
    }

    fn advance(&mut self, t_end: f64) -> Advance {
        let dt = match cfl_timestep(&self.state, self.model, &self.settings) {
            Ok(dt) => dt.min(t_end - self.state.t),
            Err(e) => return Advance::Fail(format!("time step: {e}")),
        };
        if !(dt > 1e-14 * self.state.t.max(1.0)) {
            return Advance::Fail(format!("time step underflow (dt = {dt})"));
        }
        match step(&self.state, dt, self.model, &self.settings) {
            Ok((next, _)) => {
                self.state = next;
                Advance::Ok
            }
            Err(stop) => {
                self.state = stop.state;
                Advance::Stop {
                    degenerate: stop.degenerate,
                    blowup: stop.blowup,
                }
            }
        }
    }

    fn record(&self) -> DiagnosticsRecord {
        record_riemann(&self.state, self.model)
    }
}

struct FluxDriver<'a> {
    state: FluxState,
    model: &'a WaveSpeedModel,
    settings: SolverSettings,
    dt: f64,
}

impl Driver for FluxDriver<'_> {
    fn t(&self) -> f64 {
        self.state.t
    }

    fn u(&self) -> &[f64] {
        self.state.u_curr.values()
    }

    fn advance(&mut self, t_end: f64) -> Advance {
        let bound = match flux_cfl_timestep(&self.state, self.model, &self.settings) {
            Ok(b) => b,
            Err(e) => return Advance::Fail(format!("time step: {e}")),
        };
        if bound < FLUX_DT_SLACK * self.dt {
            self.dt = bound;
        }
        let dt = self.dt.min(t_end - self.state.t);
        if !(dt > 1e-14 * self.state.t.max(1.0)) {
            return Advance::Fail(format!("time step underflow (dt = {dt})"));
        }
        match step_flux(&self.state, dt, self.model, &self.settings) {
            Ok(next) => {
                self.state = next;
                Advance::Ok
            }
            Err(stop) => {
                self.state = stop.state;
                Advance::Stop {
                    degenerate: stop.degenerate,
                    blowup: stop.blowup,
                }
            }
        }
    }

    fn record(&self) -> DiagnosticsRecord {
        record_flux(&self.state, self.model)
    }
}

struct Trace {
    series: Vec<DiagnosticsRecord>,
    end: RunEnd,
    steps: usize,
    snapshots: Snapshots,
}

fn drive(d: &mut dyn Driver, t_end: f64, stride: usize, snapshot_times: &[f64]) -> Trace {
    let mut series = vec![d.record()];
    let mut snapshots = Snapshots::default();
    let mut pending = snapshot_times.iter().copied().filter(|&t| t <= t_end).peekable();
    while let Some(&t) = pending.peek() {
        if t > d.t() {
            break;
        }
        snapshots.times.push(t);
        snapshots.values.push(d.u().to_vec());
        pending.next();
    }
    // accumulated rounding can leave t a few ulps short of the horizon
    let horizon = t_end - HORIZON_SLACK * t_end.max(1.0);
    let clock = |t: f64| if t >= horizon { t.max(t_end) } else { t };
    let mut steps = 0;
    let end = loop {
        if d.t() >= horizon {
            break RunEnd::Horizon { t_end };
        }
        let (t_before, u_before) = (d.t(), d.u().to_vec());
        let outcome = d.advance(t_end);
        if let Advance::Fail(reason) = outcome {
            warn!("run failed at t = {t_before}: {reason}");
            break RunEnd::Failed { reason };
        }
        steps += 1;
        let alive = matches!(outcome, Advance::Ok);
        if alive {
            while let Some(&t) = pending.peek() {
                if t > clock(d.t()) {
                    break;
                }
                let w = ((t - t_before) / (d.t() - t_before)).min(1.0);
                let u: Vec<f64> = u_before.iter().zip(d.u()).map(|(a, b)| a + w * (b - a)).collect();
                snapshots.times.push(t);
                snapshots.values.push(u);
                pending.next();
            }
        }
        match outcome {
            Advance::Stop { degenerate, blowup } => {
                series.push(d.record());
                info!("stop at t = {} (degenerate {degenerate}, blow-up {blowup})", d.t());
                break RunEnd::Stopped { degenerate, blowup };
            }
            _ => {
                if steps % stride == 0 || d.t() >= horizon {
                    series.push(d.record());
                }
            }
        }
        if steps % 1000 == 0 {
            debug!("step {steps}, t = {}", d.t());
        }
    };
    Trace {
        series,
        end,
        steps,
        snapshots,
    }
}

/// Prepared scenario: resolved data and everything the solvers share.
pub struct Prepared {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub hypotheses: Vec<HypothesisReport>,
    pub initial_sup: f64,
}

impl Prepared {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let scenario = config.build_scenario()?;
        let hypotheses = Theorem::ALL.iter().map(|&t| check_hypotheses(&scenario, t)).collect();
        let initial_sup = RiemannState::initial(&scenario)?.sup_norm();
        Ok(Self {
            config: config.clone(),
            scenario,
            hypotheses,
            initial_sup,
        })
    }

    pub fn settings(&self) -> SolverSettings {
        self.config.settings(&self.scenario.model, self.initial_sup)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            theta1_floor: theta1_floor(&self.scenario).ok(),
            degeneracy_time_bound: degeneracy_time_bound(&self.scenario).ok(),
        }
    }

    /// Runs one solver to the horizon or a stop, collecting `u` at
    /// `snapshot_times`.
    pub fn run_solver(&self, solver: SolverKind, snapshot_times: &[f64]) -> (SolverOutcome, Snapshots) {
        let mut settings = self.settings();
        if solver == SolverKind::Flux {
            settings.cfl = self.config.run.flux_cfl;
        }
        let model = &self.scenario.model;
        let t_end = self.config.run.t_end;
        let stride = self.config.output.record_stride;
        let trace = match solver {
            SolverKind::Riemann => match RiemannState::initial(&self.scenario) {
                Ok(state) => drive(
                    &mut RiemannDriver {
                        state,
                        model,
                        settings,
                    },
                    t_end,
                    stride,
                    snapshot_times,
                ),
                Err(e) => failed(e.to_string()),
            },
            SolverKind::Flux => match self.flux_driver(settings) {
                Ok(mut d) => drive(&mut d, t_end, stride, snapshot_times),
                Err(e) => failed(e.to_string()),
            },
        };
        let ctx = MonitorContext::for_scenario(&self.scenario, self.initial_sup);
        let plan = MonitorPlan::from_reports(&self.hypotheses);
        let plan = match solver {
            SolverKind::Riemann => plan.for_riemann(),
            SolverKind::Flux => plan.for_flux(),
        };
        let violations = check_with_plan(&trace.series, &plan, &ctx);
        let thresholds = Thresholds {
            eps_deg: settings.eps_deg,
            m_blow: settings.m_blow,
        };
        let classification = detect_stop(&trace.series, &trace.end, &thresholds, &violations);
        let riccati = match classification {
            RunClassification::GradientBlowup { .. } => {
                riccati_estimate(&trace.series, self.config.run.window_fraction).ok()
            }
            _ => None,
        };
        let classification = match classification {
            RunClassification::GradientBlowup { t_stop, .. } => RunClassification::GradientBlowup {
                t_stop,
                t_estimate: riccati.map(|f| f.t_estimate),
            },
            other => other,
        };
        info!(
            "{}: {} after {} steps",
            solver.name(),
            classification.label(),
            trace.steps
        );
        (
            SolverOutcome {
                solver,
                classification,
                end: trace.end,
                riccati,
                violations,
                steps: trace.steps,
                settings,
                series: trace.series,
            },
            trace.snapshots,
        )
    }

    fn flux_driver(&self, settings: SolverSettings) -> Result<FluxDriver<'_>> {
        let model = &self.scenario.model;
        let probe = init_flux(&self.scenario, 1.0)?;
        let dt0 = flux_cfl_timestep(&probe, model, &settings)?.min(self.config.run.t_end);
        Ok(FluxDriver {
            state: init_flux(&self.scenario, dt0)?,
            model,
            settings,
            dt: dt0,
        })
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: self.config.hash(),
            grid: self.scenario.grid,
            support_radius: self.scenario.support_radius,
            solver: self.config.run.solver,
            version: env!("CARGO_PKG_VERSION").to_string(),
            warnings: self.config.warnings.clone(),
            config: self.config.clone(),
        }
    }
}

fn failed(reason: String) -> Trace {
    Trace {
        series: Vec::new(),
        end: RunEnd::Failed { reason },
        steps: 0,
        snapshots: Snapshots::default(),
    }
}

/// Runs the configured solver(s). Solver failures surface as INCONCLUSIVE
/// classifications; only an unusable configuration is an error.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    let prepared = Prepared::new(config)?;
    for w in &config.warnings {
        warn!("{w}");
    }
    let solvers: &[SolverKind] = match config.run.solver {
        SolverChoice::Riemann => &[SolverKind::Riemann],
        SolverChoice::Flux => &[SolverKind::Flux],
        SolverChoice::Both => &[SolverKind::Riemann, SolverKind::Flux],
    };
    let outcomes: Vec<SolverOutcome> = solvers.iter().map(|&s| prepared.run_solver(s, &[]).0).collect();
    let classification = combine(&outcomes);
    Ok(RunReport {
        classification,
        hypotheses: prepared.hypotheses.clone(),
        bounds: prepared.bounds(),
        outcomes,
        provenance: prepared.provenance(),
    })
}

fn combine(outcomes: &[SolverOutcome]) -> RunClassification {
    let first = &outcomes[0].classification;
    match outcomes.iter().find(|o| !o.classification.same_kind(first)) {
        None => first.clone(),
        Some(other) => RunClassification::Inconclusive {
            reason: format!(
                "solvers disagree: {} says {}, {} says {}",
                outcomes[0].solver.name(),
                first.label(),
                other.solver.name(),
                other.classification.label()
            ),
        },
    }
}
