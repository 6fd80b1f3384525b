//! Scenario files: TOML with the tables `model`, `u0`, `u1`, `grid`, `run`
//! and `output`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::initial_data::{compact_support_radius, sample_profile, Grid, Profile, Scenario, BUMP_UNIT_INTEGRAL};
use crate::riemann_solver::{Formulation, SolverSettings, UpwindOrder};
use crate::wavespeed::WaveSpeedModel;

pub const DEFAULT_NODES: usize = 2048;
pub const DEFAULT_RECORD_STRIDE: usize = 10;
/// Extra cells between the light cone and the domain edge.
pub const DOMAIN_MARGIN_CELLS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Zabusky {
        a: f64,
    },
    Constant {
        c0: f64,
    },
    AffineShift {
        slope: f64,
        theta0: f64,
    },
    Expression {
        expr: String,
        #[serde(default = "neg_infinity")]
        theta0: f64,
        #[serde(default)]
        monotone: bool,
    },
}

fn neg_infinity() -> f64 {
    f64::NEG_INFINITY
}

impl ModelConfig {
    pub fn build(&self) -> Result<WaveSpeedModel> {
        let at = |field: &str| {
            let field = format!("model.{field}");
            move |e: Error| Error::Validation {
                field: field.clone(),
                message: e.to_string(),
            }
        };
        match self {
            ModelConfig::Zabusky { a } => WaveSpeedModel::zabusky(*a).map_err(at("a")),
            ModelConfig::Constant { c0 } => WaveSpeedModel::constant(*c0).map_err(at("c0")),
            ModelConfig::AffineShift { slope, theta0 } => WaveSpeedModel::affine_shift(*slope, *theta0).map_err(at("slope")),
            ModelConfig::Expression { expr, theta0, monotone } => {
                WaveSpeedModel::expression(expr, *theta0, *monotone).map_err(at("expr"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Riemann,
    Flux,
    Both,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: Option<f64>,
    pub n: Option<usize>,
    pub dx: Option<f64>,
    /// Declared support radius `K`; measured from the data when omitted.
    pub support_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub t_end: f64,
    /// Courant number of the upwind solver.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Courant number of the leapfrog solver, whose dispersion error scales
    /// with `1 - nu^2`.
    #[serde(default = "default_flux_cfl")]
    pub flux_cfl: f64,
    #[serde(default)]
    pub solver: SolverChoice,
    pub eps_deg: Option<f64>,
    pub m_blow: Option<f64>,
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub order: UpwindOrder,
    #[serde(default)]
    pub formulation: Formulation,
    #[serde(default = "default_window")]
    pub window_fraction: f64,
}

fn default_cfl() -> f64 {
    0.45
}

fn default_flux_cfl() -> f64 {
    0.9
}

fn default_window() -> f64 {
    crate::diagnostics::DEFAULT_WINDOW_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    DEFAULT_RECORD_STRIDE
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            record_stride: DEFAULT_RECORD_STRIDE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub u0: Profile,
    pub u1: Profile,
    #[serde(default)]
    pub grid: GridConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Notes produced while filling defaults (domain auto-sizing).
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// Reads and resolves a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ScenarioConfig::from_toml_str(&text)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(parse_message(&e, text)))?;
        Self::from_table(table).map_err(|e| match e {
            // the table has no spans; a direct parse locates the same error
            Error::Parse(msg) => match toml::from_str::<ScenarioConfig>(text) {
                Err(direct) if direct.message() == msg => Error::Parse(parse_message(&direct, text)),
                _ => Error::Parse(msg),
            },
            other => other,
        })
    }

    /// Resolves a parsed document: `mass` shorthands, defaults, validation and
    /// domain sizing.
    pub fn from_table(mut table: toml::Table) -> Result<Self> {
        for key in ["u0", "u1"] {
            if let Some(toml::Value::Table(t)) = table.get_mut(key) {
                expand_mass(t, key)?;
            }
        }
        let mut cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse(e.message().to_string()))?;
        cfg.resolve()?;
        Ok(cfg)
    }

    fn resolve(&mut self) -> Result<()> {
        let model = self.model.build()?;
        for (name, p) in [("u0", &self.u0), ("u1", &self.u1)] {
            p.validate().map_err(|e| Error::validation(name, e.to_string()))?;
        }
        let run = &self.run;
        if !(run.t_end > 0.0 && run.t_end.is_finite()) {
            return Err(Error::validation("run.t_end", format!("must be positive and finite, got {}", run.t_end)));
        }
        if !(run.window_fraction > 0.0 && run.window_fraction <= 1.0) {
            return Err(Error::validation("run.window_fraction", "must lie in (0, 1]"));
        }
        if self.output.record_stride == 0 {
            return Err(Error::validation("output.record_stride", "must be at least 1"));
        }
        self.settings(&model, 1.0).validate()?;
        if !(self.run.flux_cfl > 0.0 && self.run.flux_cfl < 1.0) {
            return Err(Error::validation(
                "run.flux_cfl",
                format!("must lie in (0, 1), got {}", self.run.flux_cfl),
            ));
        }
        let g = &mut self.grid;
        if g.n.is_some() && g.dx.is_some() {
            return Err(Error::validation("grid", "give either n or dx, not both"));
        }
        if let Some(n) = g.n {
            if n < 16 {
                return Err(Error::validation("grid.n", format!("need at least 16 nodes, got {n}")));
            }
        }
        if let Some(dx) = g.dx {
            if !(dx > 0.0 && dx.is_finite()) {
                return Err(Error::validation("grid.dx", "must be positive"));
            }
        }
        if let Some(hw) = g.half_width {
            if !(hw > 0.0 && hw.is_finite()) {
                return Err(Error::validation("grid.half_width", "must be positive"));
            }
        }
        if let Some(k) = g.support_radius {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::validation("grid.support_radius", "must be non-negative"));
            }
        }
        self.size_domain(&model)
    }

    /// Applies `half_width >= K + c_max t_end + 10 dx`, widening the domain
    /// (with a warning) when the file asks for less or says nothing.
    fn size_domain(&mut self, model: &WaveSpeedModel) -> Result<()> {
        let closed = match (self.u0.support_radius(), self.u1.support_radius()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let k = match (self.grid.support_radius, closed) {
            (Some(k), _) => k,
            (None, Some(k)) => k,
            (None, None) => {
                let Some(hw) = self.grid.half_width else {
                    return Err(Error::validation(
                        "grid.half_width",
                        "required when a profile has no closed-form support",
                    ));
                };
                let g = self.grid_with(hw)?;
                let a = compact_support_radius(&sample_profile(&self.u0, &g)?, 0.0);
                let b = compact_support_radius(&sample_profile(&self.u1, &g)?, 0.0);
                a.max(b)
            }
        };
        let probe = Grid::centered(k.max(1e-3), 4097)?;
        let u0_max = sample_profile(&self.u0, &probe)?.max().max(0.0);
        let c_max = model.eval(u0_max)?;
        let cone = k + c_max * self.run.t_end;
        let required = match (self.grid.n, self.grid.dx) {
            (_, Some(dx)) => cone + DOMAIN_MARGIN_CELLS * dx,
            (n, None) => {
                // dx = 2 hw / n, so hw (1 - 2 margin / n) >= cone
                let n = n.unwrap_or(DEFAULT_NODES) as f64;
                cone / (1.0 - 2.0 * DOMAIN_MARGIN_CELLS / n)
            }
        };
        if !(required > 0.0 && required.is_finite()) {
            return Err(Error::validation("grid", "cannot size the domain for these parameters"));
        }
        match self.grid.half_width {
            None => {
                log::info!(
                    "grid.half_width not given; using {required} (K = {k}, c_max = {c_max}, t_end = {})",
                    self.run.t_end
                );
                self.grid.half_width = Some(required);
            }
            Some(hw) if hw < required * (1.0 - 1e-12) => {
                self.warnings.push(format!(
                    "grid.half_width = {hw} is below K + c_max t_end + 10 dx; widened to {required}"
                ));
                self.grid.half_width = Some(required);
            }
            Some(_) => {}
        }
        if self.grid.n.is_none() && self.grid.dx.is_none() {
            self.grid.n = Some(DEFAULT_NODES);
        }
        if self.grid.support_radius.is_none() {
            self.grid.support_radius = Some(k);
        }
        Ok(())
    }

    fn grid_with(&self, half_width: f64) -> Result<Grid> {
        match (self.grid.n, self.grid.dx) {
            (_, Some(dx)) => {
                let n = (2.0 * half_width / dx * (1.0 - 1e-12)).ceil() as usize;
                Grid::centered(0.5 * dx * n as f64, n)
            }
            (n, None) => Grid::centered(half_width, n.unwrap_or(DEFAULT_NODES)),
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let hw = self
            .grid
            .half_width
            .ok_or_else(|| Error::validation("grid.half_width", "unresolved"))?;
        self.grid_with(hw)
    }

    pub fn build_scenario(&self) -> Result<Scenario> {
        let model = self.model.build()?;
        let grid = self.build_grid()?;
        let u0 = sample_profile(&self.u0, &grid)?;
        let u1 = sample_profile(&self.u1, &grid)?;
        let k = match self.grid.support_radius {
            Some(k) => k,
            None => compact_support_radius(&u0, 0.0).max(compact_support_radius(&u1, 0.0)),
        };
        Scenario::new(model, u0, u1, k)
    }

    /// Stop thresholds and scheme options; unset thresholds get their defaults
    /// relative to `initial_sup`.
    pub fn settings(&self, model: &WaveSpeedModel, initial_sup: f64) -> SolverSettings {
        let mut s = SolverSettings::defaults(model, initial_sup);
        s.cfl = self.run.cfl;
        s.order = self.run.order;
        s.formulation = self.run.formulation;
        if let Some(v) = self.run.eps_deg {
            s.eps_deg = v;
        }
        if let Some(v) = self.run.m_blow {
            s.m_blow = v;
        }
        if let Some(v) = self.run.dt_max {
            s.dt_max = v;
        }
        s
    }

    /// SHA-256 of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(&json))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// `mass = m` on a bump is shorthand for the amplitude giving `int u = m`.
fn expand_mass(t: &mut toml::Table, prefix: &str) -> Result<()> {
    if let Some(toml::Value::Table(inner)) = t.get_mut("of") {
        expand_mass(inner, &format!("{prefix}.of"))?;
    }
    let Some(mass) = t.remove("mass") else {
        return Ok(());
    };
    let field = format!("{prefix}.mass");
    if t.get("kind").and_then(|v| v.as_str()) != Some("bump") {
        return Err(Error::validation(&field, "only bump profiles accept a mass"));
    }
    if t.contains_key("amplitude") {
        return Err(Error::validation(&field, "give either mass or amplitude"));
    }
    let mass = number(&mass).ok_or_else(|| Error::validation(&field, "must be a number"))?;
    let radius = t
        .get("radius")
        .and_then(number)
        .ok_or_else(|| Error::validation(format!("{prefix}.radius"), "must be a number"))?;
    if !(radius > 0.0) {
        return Err(Error::validation(format!("{prefix}.radius"), "must be positive"));
    }
    t.insert("amplitude".into(), toml::Value::Float(mass / (radius * BUMP_UNIT_INTEGRAL)));
    Ok(())
}

pub(crate) fn number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn parse_message(e: &toml::de::Error, text: &str) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start].matches('\n').count() + 1;
            let col = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line}, column {col}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
kind = "constant"
c0 = 1.0

[u0]
kind = "zero"

[u1]
kind = "zero"

[run]
t_end = 1.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.grid.n, Some(DEFAULT_NODES));
        assert_eq!(c.run.cfl, 0.45);
        assert_eq!(c.run.flux_cfl, 0.9);
        assert_eq!(c.run.solver, SolverChoice::Riemann);
        assert_eq!(c.output.record_stride, 10);
        assert_eq!(c.run.formulation, Formulation::Conservative);
        assert_eq!(c.grid.support_radius, Some(0.0));
        assert!(c.warnings.is_empty());
        let g = c.build_grid().unwrap();
        // K = 0, c = 1, t_end = 1: 1 + 10 dx <= half width
        assert!(g.x_max() + 0.5 * g.dx() >= 1.0 + 10.0 * g.dx() - 1e-12);
        c.build_scenario().unwrap();
    }

    #[test]
    fn nonpositive_exponent_names_the_field() {
        let text = MINIMAL.replace("kind = \"constant\"\nc0 = 1.0", "kind = \"zabusky\"\na = 0.0");
        match ScenarioConfig::from_toml_str(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "model.a"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn narrow_domain_is_widened() {
        let text = format!("{MINIMAL}\n[grid]\nhalf_width = 0.5\nn = 200\n");
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let g = c.build_grid().unwrap();
        assert!(g.x_max() + 0.5 * g.dx() >= 1.0 + 10.0 * g.dx() - 1e-12);
        assert!(c.warnings[0].contains("widened"));
        let wide = format!("{MINIMAL}\n[grid]\nhalf_width = 5.0\nn = 200\n");
        let c = ScenarioConfig::from_toml_str(&wide).unwrap();
        assert!(c.warnings.is_empty());
        assert_eq!(c.grid.half_width, Some(5.0));
    }

    #[test]
    fn dx_grids() {
        let text = format!("{MINIMAL}\n[grid]\ndx = 0.01\n");
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let g = c.build_grid().unwrap();
        assert!((g.dx() - 0.01).abs() < 1e-12);
        assert!(g.x_max() + 0.5 * g.dx() >= 1.1 - 1e-9);
        let both = format!("{MINIMAL}\n[grid]\ndx = 0.01\nn = 100\n");
        assert!(matches!(ScenarioConfig::from_toml_str(&both), Err(Error::Validation { .. })));
    }

    #[test]
    fn mass_shorthand() {
        let text = MINIMAL.replace(
            "[u1]\nkind = \"zero\"",
            "[u1]\nkind = \"bump\"\nmass = -0.375\nradius = 1.0",
        );
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let s = c.build_scenario().unwrap();
        assert!((s.u1.integral() + 0.375).abs() < 1e-9);
        assert_eq!(s.support_radius, 1.0);
        let both = text.replace("mass = -0.375", "mass = -0.375\namplitude = 1.0");
        assert!(ScenarioConfig::from_toml_str(&both).is_err());
    }

    #[test]
    fn parse_errors_carry_a_location() {
        match ScenarioConfig::from_toml_str("[model\nkind = 1") {
            Err(Error::Parse(m)) => assert!(m.starts_with("line 1"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ScenarioConfig::from_toml_str(&MINIMAL.replace("t_end = 1.0", "t_end = 1.0\nbogus = 2")),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn invalid_run_fields() {
        for (from, to, field) in [
            ("t_end = 1.0", "t_end = -1.0", "run.t_end"),
            ("t_end = 1.0", "t_end = 1.0\ncfl = 1.5", "run.cfl"),
            ("t_end = 1.0", "t_end = 1.0\nflux_cfl = 1.0", "run.flux_cfl"),
        ] {
            match ScenarioConfig::from_toml_str(&MINIMAL.replace(from, to)) {
                Err(Error::Validation { field: f, .. }) => assert_eq!(f, field),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        let b = ScenarioConfig::from_toml_str(&MINIMAL.replace("t_end = 1.0", "t_end = 1.0\ncfl = 0.4")).unwrap();
        let c = ScenarioConfig::from_toml_str(&MINIMAL.replace("c0 = 1.0", "c0 = 1.5")).unwrap();
        assert_eq!(a.hash(), ScenarioConfig::from_toml_str(MINIMAL).unwrap().hash());
        assert_ne!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn resolved_config_round_trips() {
        let a = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        let b = ScenarioConfig::from_toml_str(&a.to_toml_string()).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert!(b.warnings.is_empty());
    }
}
