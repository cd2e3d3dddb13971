//! Per-point aggregation of result rows and pairwise savings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use csv::StringRecord;

use super::{ResultRow, CSV_COLUMNS};
use crate::error::{Error, Result};
use crate::model::{watts_to_dbm, SolveStatus};

/// `1 - a / b`: the fraction of `b`'s power that `a` saves.
pub fn savings(a: f64, b: f64) -> f64 {
    1.0 - a / b
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodStats {
    pub method: String,
    pub rows: usize,
    pub infeasible: usize,
    pub failures: usize,
    /// Over feasible rows only.
    pub median_power_w: Option<f64>,
    pub mean_power_w: Option<f64>,
    pub median_ee: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub point: usize,
    pub label: String,
    pub methods: Vec<MethodStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub points: Vec<PointSummary>,
    pub skipped_rows: usize,
}

/// Groups rows by sweep point, then by method in order of first appearance.
pub fn summarize(rows: &[ResultRow], skipped_rows: usize) -> Summary {
    let mut by_point: BTreeMap<usize, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        by_point.entry(row.point().unwrap_or(usize::MAX)).or_default().push(row);
    }
    let points = by_point
        .into_iter()
        .map(|(point, rows)| {
            let first = rows[0];
            let label = format!(
                "K={} N={} target={}dB alpha={} {} bits={}",
                first.num_users,
                first.units_per_user,
                round4(first.sinr_target_db),
                first.pathloss_exponent,
                first.deployment,
                first.phase_bits
            );
            let mut order: Vec<String> = Vec::new();
            for r in &rows {
                if !order.contains(&r.method) {
                    order.push(r.method.clone());
                }
            }
            let methods = order
                .into_iter()
                .map(|m| {
                    let mine: Vec<&&ResultRow> = rows.iter().filter(|r| r.method == m).collect();
                    let mut powers: Vec<f64> = mine.iter().filter(|r| r.status.is_feasible()).filter_map(|r| r.sum_power_w).collect();
                    let mut ee: Vec<f64> = mine.iter().filter(|r| r.status.is_feasible()).filter_map(|r| r.ee_bits_per_joule).collect();
                    let mean = if powers.is_empty() {
                        None
                    } else {
                        Some(powers.iter().sum::<f64>() / powers.len() as f64)
                    };
                    MethodStats {
                        rows: mine.len(),
                        infeasible: mine.iter().filter(|r| r.status == SolveStatus::Infeasible).count(),
                        failures: mine.iter().filter(|r| r.status == SolveStatus::NumericalFailure).count(),
                        median_power_w: median(&mut powers),
                        mean_power_w: mean,
                        median_ee: median(&mut ee),
                        method: m,
                    }
                })
                .collect();
            PointSummary { point, label, methods }
        })
        .collect();
    Summary { points, skipped_rows }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn dbm(w: Option<f64>) -> String {
    w.and_then(|w| watts_to_dbm(w).ok()).map(|d| format!("{d:.2}")).unwrap_or_else(|| "-".into())
}

impl Summary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let _ = writeln!(out, "point {}: {}", p.point, p.label);
            let _ = writeln!(
                out,
                "  {:<6} {:>5} {:>10} {:>9} {:>16} {:>14} {:>14}",
                "method", "rows", "infeasible", "failures", "median_dBm", "mean_dBm", "median_EE"
            );
            for m in &p.methods {
                let ee = m.median_ee.map(|e| format!("{e:.4e}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "  {:<6} {:>5} {:>10} {:>9} {:>16} {:>14} {:>14}",
                    m.method,
                    m.rows,
                    m.infeasible,
                    m.failures,
                    dbm(m.median_power_w),
                    dbm(m.mean_power_w),
                    ee
                );
            }
            for a in &p.methods {
                for b in &p.methods {
                    if a.method == b.method {
                        continue;
                    }
                    if let (Some(pa), Some(pb)) = (a.median_power_w, b.median_power_w) {
                        let _ = writeln!(out, "  savings {} over {}: {:.1}%", a.method, b.method, 100.0 * savings(pa, pb));
                    }
                }
            }
        }
        if self.skipped_rows > 0 {
            let _ = writeln!(out, "warning: {} malformed rows skipped", self.skipped_rows);
        }
        out
    }
}

fn parse_row(rec: &StringRecord) -> Option<ResultRow> {
    if rec.len() != CSV_COLUMNS.len() {
        return None;
    }
    fn opt<T: std::str::FromStr>(s: &str) -> Option<Option<T>> {
        if s.is_empty() {
            Some(None)
        } else {
            s.parse().ok().map(Some)
        }
    }
    let status = match &rec[9] {
        "optimal" => SolveStatus::Optimal,
        "feasible" => SolveStatus::Feasible,
        "infeasible" => SolveStatus::Infeasible,
        "numerical_failure" => SolveStatus::NumericalFailure,
        _ => return None,
    };
    let row = ResultRow {
        scenario_id: rec[0].to_string(),
        seed: rec[1].parse().ok()?,
        method: rec[2].to_string(),
        num_users: rec[3].parse().ok()?,
        units_per_user: rec[4].parse().ok()?,
        sinr_target_db: rec[5].parse().ok()?,
        pathloss_exponent: rec[6].parse().ok()?,
        deployment: rec[7].to_string(),
        phase_bits: rec[8].parse().ok()?,
        status,
        sum_power_w: opt(&rec[10])?,
        sum_power_dbm: opt(&rec[11])?,
        ee_bits_per_joule: opt(&rec[12])?,
        iterations: opt(&rec[13])?,
        duality_gap_rel: opt(&rec[14])?,
        max_leakage: opt(&rec[15])?,
    };
    if row.method.is_empty() || row.point().is_none() || (status.is_feasible() && row.sum_power_w.is_none()) {
        return None;
    }
    Some(row)
}

/// Reads `results.csv`; returns the well-formed rows and the count of
/// skipped malformed ones.
pub fn read_rows(path: &Path) -> Result<(Vec<ResultRow>, usize)> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Parse(format!("{}: header does not match the results schema", path.display())));
    }
    let mut rows = Vec::new();
    let mut skipped = 0;
    for rec in reader.records() {
        match rec.ok().as_ref().and_then(parse_row) {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: no result rows", path.display())));
    }
    Ok((rows, skipped))
}

/// Text table of per-point, per-method medians and pairwise savings.
pub fn compare_summary(path: &Path) -> Result<String> {
    let (rows, skipped) = read_rows(path)?;
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} malformed rows", path.display());
    }
    Ok(summarize(&rows, skipped).render())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_and_odd_medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn self_savings_are_zero() {
        assert_eq!(savings(0.3, 0.3), 0.0);
        assert!((savings(0.06, 1.0) - 0.94).abs() < 1e-12);
    }
}
