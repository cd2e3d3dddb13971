//! Configuration-driven comparison runs: every sweep point × trial × method
//! becomes one CSV row, followed by a text summary.
//!
//! Trial `t` of every sweep point uses scenario seed `seed + t`, so all
//! points of a sweep see the same channel draws wherever their dimensions
//! agree. Rows are written in the order point, trial, method (as listed in
//! the config).

mod config;
mod summary;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{
    parse_deployment, parse_quantity, parse_units, ExperimentConfig, Method, PointConfig, SweepParameter, SweepValue,
    UnitsSpec,
};
pub use summary::{compare_summary, read_rows, savings, summarize, Summary};

use crate::analysis::{energy_efficiency, quantize_phases, EnergyModel};
use crate::baselines::{solve_mrt, solve_with_phases, solve_zf, ZfOptions};
use crate::channel::{generate_scenario, ScenarioSpec};
use crate::dualmethod::{solve_dual_method, DualMethodOptions};
use crate::error::{Error, Result};
use crate::model::{self, linear_to_db, watts_to_dbm, BeamformingSolution, ChannelSet, SolveStatus, SystemConfig};
use crate::powerctl::PowerControlOptions;
use crate::sdr::{solve_sdr, SdrOptions};

/// Column order of `results.csv`.
pub const CSV_COLUMNS: [&str; 16] = [
    "scenario_id",
    "seed",
    "method",
    "K",
    "N",
    "sinr_target_db",
    "pathloss_exponent",
    "deployment",
    "phase_bits",
    "status",
    "sum_power_w",
    "sum_power_dbm",
    "ee_bits_per_joule",
    "iterations",
    "duality_gap_rel",
    "max_leakage",
];

/// Relative tolerance for the per-row constraint check.
const VALIDATION_TOL: f64 = 1e-6;

/// One row of `results.csv`. Metric fields are empty unless the solution is
/// feasible; `duality_gap_rel` is DM-only and `max_leakage` ZF-only.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub seed: u64,
    pub method: String,
    pub num_users: usize,
    pub units_per_user: usize,
    pub sinr_target_db: f64,
    pub pathloss_exponent: f64,
    pub deployment: String,
    pub phase_bits: u32,
    pub status: SolveStatus,
    pub sum_power_w: Option<f64>,
    pub sum_power_dbm: Option<f64>,
    pub ee_bits_per_joule: Option<f64>,
    pub iterations: Option<usize>,
    pub duality_gap_rel: Option<f64>,
    pub max_leakage: Option<f64>,
}

impl ResultRow {
    /// Index of the sweep point, parsed from `scenario_id` (`p<point>-t<trial>`).
    pub fn point(&self) -> Option<usize> {
        self.scenario_id.strip_prefix('p')?.split('-').next()?.parse().ok()
    }

    fn fields(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        vec![
            self.scenario_id.clone(),
            self.seed.to_string(),
            self.method.clone(),
            self.num_users.to_string(),
            self.units_per_user.to_string(),
            self.sinr_target_db.to_string(),
            self.pathloss_exponent.to_string(),
            self.deployment.clone(),
            self.phase_bits.to_string(),
            self.status.as_str().to_string(),
            opt(self.sum_power_w),
            opt(self.sum_power_dbm),
            opt(self.ee_bits_per_joule),
            opt(self.iterations),
            opt(self.duality_gap_rel),
            opt(self.max_leakage),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one method on one scenario. With `phase_bits > 0` a feasible
/// solution is quantized and power control is rerun; infeasible ones are
/// returned unchanged.
pub fn run_method(
    method: Method,
    channels: &ChannelSet,
    system: &SystemConfig,
    phase_bits: u32,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<BeamformingSolution> {
    let power = PowerControlOptions::default();
    let mut sol = match method {
        Method::Dm => solve_dual_method(channels, system, &DualMethodOptions::default())?,
        Method::Mrt => solve_mrt(channels, system, &power)?,
        Method::Zf => {
            let zf = ZfOptions {
                lambda: cfg.zf_lambda,
                ..Default::default()
            };
            solve_zf(channels, system, &zf, &power)?
        }
        Method::Sdr => {
            let opts = SdrOptions {
                num_samples: cfg.sdr_samples,
                seed,
                ..Default::default()
            };
            solve_sdr(channels, system, &opts)?
        }
    };
    if phase_bits > 0 && sol.status.is_feasible() {
        let quantized = quantize_phases(&sol.phases, phase_bits)?;
        let mut q = solve_with_phases(quantized, channels, system, &power)?;
        for (name, value) in &sol.diagnostics {
            q.diagnostics.entry(name.clone()).or_insert(*value);
        }
        q.diagnostics.remove("duality_gap_rel");
        if let (Some(dual), true) = (q.diagnostic("dual_objective_w"), q.status.is_feasible()) {
            q.diagnostics.insert("duality_gap_rel".into(), (q.sum_power_w - dual) / q.sum_power_w);
        }
        sol = q;
    }
    Ok(sol)
}

fn make_row(scenario_id: &str, seed: u64, method: Method, point: &PointConfig, sol: &BeamformingSolution, energy: &EnergyModel) -> ResultRow {
    let system = &point.system;
    let feasible = sol.status.is_feasible();
    let metric = |v: f64| if feasible { Some(v) } else { None };
    ResultRow {
        scenario_id: scenario_id.to_string(),
        seed,
        method: method.to_string(),
        num_users: system.num_users,
        units_per_user: system.units_per_user,
        sinr_target_db: linear_to_db(system.sinr_targets[0]),
        pathloss_exponent: system.pathloss_exponent,
        deployment: system.deployment.to_string(),
        phase_bits: point.phase_bits,
        status: sol.status,
        sum_power_w: metric(sol.sum_power_w),
        sum_power_dbm: if feasible { watts_to_dbm(sol.sum_power_w).ok() } else { None },
        ee_bits_per_joule: metric(energy_efficiency(sol, system, energy)),
        iterations: if feasible { sol.diagnostic("iterations").map(|v| v as usize) } else { None },
        duality_gap_rel: if feasible && method == Method::Dm { sol.diagnostic("duality_gap_rel") } else { None },
        max_leakage: if feasible && method == Method::Zf { sol.diagnostic("max_leakage") } else { None },
    }
}

/// Computes every row without touching the filesystem.
pub fn run_rows(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let energy = EnergyModel::default();
    let mut rows = Vec::new();
    for (pi, point) in cfg.points().iter().enumerate() {
        for trial in 0..cfg.trials {
            let seed = cfg.seed.wrapping_add(trial as u64);
            let id = format!("p{pi}-t{trial}");
            let mut spec = ScenarioSpec::new(point.system.clone(), seed);
            spec.fading_variance = cfg.fading_variance;
            let scenario = generate_scenario(&spec)?;
            for &method in &cfg.methods {
                let mut sol = match run_method(method, &scenario.channels, &point.system, point.phase_bits, cfg, seed) {
                    Ok(s) => s,
                    Err(e @ (Error::Domain(_) | Error::DimensionMismatch(_) | Error::Config { .. })) => return Err(e),
                    Err(e) => {
                        log::error!("{id} {method}: {e}");
                        BeamformingSolution::failed(
                            model::PhaseBeamformer::ones(point.system.num_users, point.system.units_per_user),
                            SolveStatus::NumericalFailure,
                        )
                    }
                };
                if sol.status.is_feasible() {
                    let report = model::validate(&sol, &point.system, &scenario.channels, VALIDATION_TOL);
                    if !report.passed() {
                        log::warn!("{id} {method}: solution fails validation: {report:?}");
                        sol.status = SolveStatus::NumericalFailure;
                    }
                }
                log::info!("{id} {method}: {} {:e} W", sol.status, sol.sum_power_w);
                rows.push(make_row(&id, seed, method, point, &sol, &energy));
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub numerical_failures: usize,
}

impl RunOutcome {
    /// Zero iff no row ended in a numerical failure.
    pub fn exit_code(&self) -> i32 {
        if self.numerical_failures == 0 {
            0
        } else {
            1
        }
    }
}

/// Writes `results.csv` and `summary.txt` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let rows = run_rows(cfg)?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    write_csv(&rows, fs::File::create(&csv_path)?)?;
    let summary_path = out_dir.join("summary.txt");
    fs::write(&summary_path, summarize(&rows, 0).render())?;
    let numerical_failures = rows.iter().filter(|r| r.status == SolveStatus::NumericalFailure).count();
    Ok(RunOutcome {
        rows,
        csv_path,
        summary_path,
        numerical_failures,
    })
}
