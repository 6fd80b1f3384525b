use std::io::Write;
use std::path::Path;

use super::run::RunReport;
use super::sweep::SweepRow;
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "t",
    "min_u",
    "min_c",
    "max_abs_R1",
    "max_abs_R2",
    "linf_ut_ux",
    "lp1",
    "lp2",
    "lp4",
    "momentum",
    "support_radius",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes the time series with 17 significant digits per value.
pub fn write_series_csv<W: Write>(series: &[DiagnosticsRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in series {
        let row = [
            r.t,
            r.min_u,
            r.min_c,
            r.max_abs_r1,
            r.max_abs_r2,
            r.linf_ut_ux,
            r.lp1,
            r.lp2,
            r.lp4,
            r.momentum,
            r.support_radius,
        ];
        w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `report.json` plus `series_<solver>.csv` for each solver run.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join("report.json"), json)?;
    for o in &report.outcomes {
        let file = std::fs::File::create(dir.join(format!("series_{}.csv", o.solver.name())))?;
        write_series_csv(&o.series, std::io::BufWriter::new(file))?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<String> = rows
        .first()
        .map(|r| r.parameters.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut header = names.clone();
    header.extend(["classification", "t_stop", "theta1_floor", "degeneracy_time_bound", "detail"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    for r in rows {
        let mut rec: Vec<String> = r.parameters.iter().map(|(_, v)| v.to_string()).collect();
        let detail = match &r.classification {
            crate::diagnostics::RunClassification::Inconclusive { reason } => reason.clone(),
            _ => String::new(),
        };
        rec.extend([
            r.classification.label().to_string(),
            opt(r.t_stop),
            opt(r.theta1_floor),
            opt(r.degeneracy_time_bound),
            detail,
        ]);
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
