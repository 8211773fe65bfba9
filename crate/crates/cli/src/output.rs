use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kelvin_core::{CaseTable, ForceStation};
use serde::Serialize;

use crate::config::ResolvedConfig;

/// Formats a number with 15 significant digits, locale-free.
pub fn num(value: f64) -> String {
    format!("{value:.14e}")
}

fn opt_num(value: Option<f64>) -> String {
    value.map(num).unwrap_or_default()
}

/// Writes a file atomically: content lands under a temporary name first and
/// is renamed into place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating output directory {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("moving {} into place", path.display()))?;
    Ok(())
}

/// Convergence table CSV: `resolution,norm_plain,norm_rms,q,std`.
pub fn convergence_csv(table: &CaseTable) -> String {
    let mut out = String::from("resolution,norm_plain,norm_rms,q,std\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.resolution,
            num(row.norm_plain),
            num(row.norm_rms),
            opt_num(row.q),
            opt_num(row.std_dev),
        ));
    }
    out
}

/// Station dump CSV: `x,y[,z],nx,ny[,nz],Q,measure`.
pub fn stations_csv_2d(stations: &[ForceStation<2>]) -> String {
    let mut out = String::from("x,y,nx,ny,Q,measure\n");
    for s in stations {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(s.position.x),
            num(s.position.y),
            num(s.normal.x),
            num(s.normal.y),
            num(s.magnitude),
            num(s.measure),
        ));
    }
    out
}

pub fn stations_csv_3d(stations: &[ForceStation<3>]) -> String {
    let mut out = String::from("x,y,z,nx,ny,nz,Q,measure\n");
    for s in stations {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            num(s.position.x),
            num(s.position.y),
            num(s.position.z),
            num(s.normal.x),
            num(s.normal.y),
            num(s.normal.z),
            num(s.magnitude),
            num(s.measure),
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ReportCase {
    pub label: String,
    pub theory_violating: bool,
    pub min_clearance: f64,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub resolution: u64,
    pub norm_plain: f64,
    pub norm_rms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
}

/// Study report: resolved configuration, per-case tables, and run metadata.
/// `wall_time_seconds` is the only field that varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool_version: &'static str,
    pub config: &'a ResolvedConfig,
    pub wall_time_seconds: f64,
    pub cases: Vec<ReportCase>,
}

impl ReportCase {
    pub fn from_table(table: &CaseTable) -> Self {
        Self {
            label: table.label.clone(),
            theory_violating: table.theory_violating,
            min_clearance: table.min_clearance,
            rows: table
                .rows
                .iter()
                .map(|r| ReportRow {
                    resolution: r.resolution,
                    norm_plain: r.norm_plain,
                    norm_rms: r.norm_rms,
                    q: r.q,
                    std: r.std_dev,
                })
                .collect(),
        }
    }
}

pub fn write_report(dir: &Path, report: &Report<'_>) -> Result<PathBuf> {
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report).context("serializing report")?;
    write_atomic(&path, &(json + "\n"))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kelvin_core::ConvergenceRow;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(4.2100e-6), "4.21000000000000e-6");
        assert_eq!(num(0.0), "0.00000000000000e0");
        assert_eq!(num(-1.0 / 3.0), "-3.33333333333333e-1");
    }

    #[test]
    fn csv_layout() {
        let table = CaseTable {
            label: "circle".into(),
            theory_violating: false,
            min_clearance: 0.2,
            rows: vec![
                ConvergenceRow {
                    resolution: 10,
                    norm_plain: 1.0,
                    norm_rms: 0.5,
                    q: Some(2.0),
                    std_dev: Some(1e-8),
                },
                ConvergenceRow {
                    resolution: 20,
                    norm_plain: 1.1,
                    norm_rms: 0.55,
                    q: None,
                    std_dev: None,
                },
            ],
        };
        let csv = convergence_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "resolution,norm_plain,norm_rms,q,std");
        assert!(lines[1].starts_with("10,1.00000000000000e0,5.00000000000000e-1,"));
        assert!(lines[2].ends_with(",,"));
    }
}
