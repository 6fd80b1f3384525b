use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::run::run;
use crate::diagnostics::RunClassification;
use crate::error::{Error, Result};

pub const MAX_SWEEP_CELLS: usize = 10_000;

/// One sweep axis: a dotted path into the scenario file and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub path: String,
    pub values: Vec<toml::Value>,
}

impl FromStr for Axis {
    type Err = Error;

    /// `u1.mass=-0.1,-0.375`
    fn from_str(s: &str) -> Result<Self> {
        let (path, list) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("axis `{s}` is not of the form name=v1,v2,...")))?;
        let path = path.trim();
        if path.is_empty() || path.split('.').any(str::is_empty) {
            return Err(Error::Parse(format!("bad axis name `{path}`")));
        }
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(parse_value)
            .collect::<Vec<_>>();
        if values.is_empty() {
            return Err(Error::Parse(format!("axis `{path}` has no values")));
        }
        Ok(Self {
            path: path.to_string(),
            values,
        })
    }
}

fn parse_value(v: &str) -> toml::Value {
    if let Ok(i) = v.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = v.parse::<f64>() {
        toml::Value::Float(f)
    } else if let Ok(b) = v.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameters: Vec<(String, toml::Value)>,
    pub classification: RunClassification,
    pub t_stop: Option<f64>,
    pub theta1_floor: Option<f64>,
    pub degeneracy_time_bound: Option<f64>,
}

/// One run per cell of the Cartesian product of `axes`, on `jobs` worker
/// threads (0 = rayon default). Rows come back in axis order whatever the
/// scheduling.
pub fn sweep(base: &toml::Table, axes: &[Axis], jobs: usize) -> Result<Vec<SweepRow>> {
    let cells = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
    match cells {
        Some(c) if c <= MAX_SWEEP_CELLS => {}
        _ => return Err(Error::validation("axis", format!("sweep exceeds {MAX_SWEEP_CELLS} cells"))),
    }
    // reject unusable bases before spending any work
    ScenarioConfig::from_table(base.clone())?;
    let mut grid: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for axis in axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((axis.path.clone(), v.clone()));
                    p
                })
            })
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(|| grid.into_par_iter().map(|params| run_cell(base, params)).collect()))
}

fn run_cell(base: &toml::Table, parameters: Vec<(String, toml::Value)>) -> SweepRow {
    let mut table = base.clone();
    let outcome = parameters
        .iter()
        .try_for_each(|(path, v)| set_path(&mut table, path, v.clone()))
        .and_then(|_| ScenarioConfig::from_table(table))
        .and_then(|cfg| run(&cfg));
    match outcome {
        Ok(report) => SweepRow {
            t_stop: report.classification.t_stop(),
            classification: report.classification,
            theta1_floor: report.bounds.theta1_floor,
            degeneracy_time_bound: report.bounds.degeneracy_time_bound,
            parameters,
        },
        Err(e) => SweepRow {
            parameters,
            classification: RunClassification::Inconclusive {
                reason: format!("cell failed: {e}"),
            },
            t_stop: None,
            theta1_floor: None,
            degeneracy_time_bound: None,
        },
    }
}

/// Sets `a.b.c = value`, creating intermediate tables as needed.
pub fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(Error::validation(path, format!("`{p}` is not a table"))),
        };
    }
    // a float axis on an integer field such as grid.n
    let value = match (cur.get(last), value) {
        (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    cur.insert(last.to_string(), value);
    Ok(())
}
