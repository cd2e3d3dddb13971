//! Domain types shared by every solver: system configuration, channels,
//! phase beamformers, power allocations and the packaged solution, plus the
//! SINR evaluation and a constraint checker.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// Tolerance on `||θ_kn| - 1|` used by [`validate`].
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Deployment {
    /// All RIS rows sit at the transmitter (area center).
    Centralized,
    /// Row `i` sits at `(cos(2πi/K), sin(2πi/K)) * radius_m`.
    Distributed { radius_m: f64 },
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deployment::Centralized => write!(f, "centralized"),
            Deployment::Distributed { radius_m } => write!(f, "distributed:{radius_m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub num_users: usize,
    pub units_per_user: usize,
    /// Noise power σ² in watts.
    pub noise_power: f64,
    /// Linear SINR targets Γ_k, one per user.
    pub sinr_targets: Vec<f64>,
    pub pathloss_exponent: f64,
    pub deployment: Deployment,
    pub area_side_m: f64,
}

impl Default for SystemConfig {
    /// K = 8 users, N = 20 units per user, -114 dBm noise, Γ = 2, α = 3,
    /// centralized RIS in a 500 m square.
    fn default() -> Self {
        Self::new(8, 20)
    }
}

impl SystemConfig {
    /// Defaults for everything except the user and unit counts.
    pub fn new(num_users: usize, units_per_user: usize) -> Self {
        Self {
            num_users,
            units_per_user,
            noise_power: dbm_to_watts(-114.0),
            sinr_targets: vec![2.0; num_users],
            pathloss_exponent: 3.0,
            deployment: Deployment::Centralized,
            area_side_m: 500.0,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.sinr_targets = vec![target; self.num_users];
        self
    }

    pub fn with_noise(mut self, noise_power: f64) -> Self {
        self.noise_power = noise_power;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 || self.units_per_user == 0 {
            return Err(Error::Domain("num_users and units_per_user must be positive".into()));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::Domain(format!("noise power must be positive, got {}", self.noise_power)));
        }
        if self.sinr_targets.len() != self.num_users {
            return Err(Error::DimensionMismatch(format!(
                "{} SINR targets for {} users",
                self.sinr_targets.len(),
                self.num_users
            )));
        }
        if let Some(bad) = self.sinr_targets.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::Domain(format!("SINR target must be positive, got {bad}")));
        }
        if !self.pathloss_exponent.is_finite() || !(self.area_side_m > 0.0) {
            return Err(Error::Domain("invalid geometry".into()));
        }
        if let Deployment::Distributed { radius_m } = self.deployment {
            if !(radius_m >= 0.0 && radius_m.is_finite()) {
                return Err(Error::Domain(format!("invalid RIS radius {radius_m}")));
            }
        }
        Ok(())
    }
}

/// Channel vectors `g_ki` (row `i` of the RIS to user `k`), each of length N.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    num_users: usize,
    units: usize,
    gains: Vec<CVector>,
}

impl ChannelSet {
    /// Builds from a `K x K` grid indexed `[k][i]`.
    pub fn new(grid: Vec<Vec<CVector>>) -> Result<Self> {
        let k = grid.len();
        if k == 0 {
            return Err(Error::DimensionMismatch("empty channel grid".into()));
        }
        let n = grid[0].first().map(|v| v.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::DimensionMismatch("channel vectors must be non-empty".into()));
        }
        let mut gains = Vec::with_capacity(k * k);
        for (row_idx, row) in grid.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {row_idx} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for v in row {
                if v.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "channel vector of length {} in row {row_idx}, expected {n}",
                        v.len()
                    )));
                }
                if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Domain("non-finite channel entry".into()));
                }
                gains.push(v);
            }
        }
        Ok(Self { num_users: k, units: n, gains })
    }

    pub fn from_fn(num_users: usize, units: usize, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Result<Self> {
        let grid = (0..num_users)
            .map(|k| {
                (0..num_users)
                    .map(|i| CVector::from_fn(units, |n, _| f(k, i, n)))
                    .collect()
            })
            .collect();
        Self::new(grid)
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn units(&self) -> usize {
        self.units
    }

    /// `g_ki`: from RIS row `i` to user `k`.
    pub fn gain(&self, k: usize, i: usize) -> &CVector {
        &self.gains[k * self.num_users + i]
    }

    /// Every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_users: self.num_users,
            units: self.units,
            gains: self.gains.iter().map(|g| g * Complex64::new(factor, 0.0)).collect(),
        }
    }

    pub(crate) fn check_dims(&self, num_users: usize, units: usize) -> Result<()> {
        if self.num_users != num_users || self.units != units {
            return Err(Error::DimensionMismatch(format!(
                "channels are {}x{} users with N={}, expected {num_users} users with N={units}",
                self.num_users, self.num_users, self.units
            )));
        }
        Ok(())
    }
}

/// Per-user phase vectors `θ_k`. Entries are unit modulus when built with
/// [`PhaseBeamformer::new`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseBeamformer {
    phases: Vec<CVector>,
}

impl PhaseBeamformer {
    pub fn new(phases: Vec<CVector>) -> Result<Self> {
        let pb = Self::new_unchecked(phases)?;
        let res = pb.max_modulus_residual();
        if res > UNIT_MODULUS_TOL {
            return Err(Error::Domain(format!("phase entry off the unit circle by {res:e}")));
        }
        Ok(pb)
    }

    /// Skips the unit-modulus check (dimensions are still checked). Used for
    /// building deliberately invalid solutions and for relaxed vectors.
    pub fn new_unchecked(phases: Vec<CVector>) -> Result<Self> {
        let n = phases.first().map(|v| v.len()).unwrap_or(0);
        if phases.is_empty() || n == 0 || phases.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("phase vectors must be non-empty and equal length".into()));
        }
        Ok(Self { phases })
    }

    pub fn from_angles(angles: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            angles
                .iter()
                .map(|row| CVector::from_iterator(row.len(), row.iter().map(|&a| Complex64::from_polar(1.0, a))))
                .collect(),
        )
    }

    pub fn ones(num_users: usize, units: usize) -> Self {
        Self {
            phases: vec![CVector::from_element(units, Complex64::new(1.0, 0.0)); num_users],
        }
    }

    pub fn num_users(&self) -> usize {
        self.phases.len()
    }

    pub fn units(&self) -> usize {
        self.phases[0].len()
    }

    pub fn phase(&self, k: usize) -> &CVector {
        &self.phases[k]
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.phases
    }

    /// `max_{k,n} ||θ_kn| - 1|`.
    pub fn max_modulus_residual(&self) -> f64 {
        self.phases
            .iter()
            .flat_map(|v| v.iter())
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Multiplies `θ_k` by `e^{jφ}`.
    pub fn rotated(&self, k: usize, phi: f64) -> Self {
        let mut out = self.clone();
        out.phases[k] *= Complex64::from_polar(1.0, phi);
        out
    }
}

/// Projects every entry of `v` onto the unit circle; zero entries map to 1.
pub fn unit_modulus(v: &CVector) -> CVector {
    v.map(|z| {
        let r = z.norm();
        if r > 0.0 && r.is_finite() {
            z / r
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerAllocation {
    powers: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if let Some(bad) = powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::Domain(format!("power must be finite and nonnegative, got {bad}")));
        }
        Ok(Self { powers })
    }

    pub fn zeros(num_users: usize) -> Self {
        Self { powers: vec![0.0; num_users] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            powers: self.powers.iter().map(|p| p * c).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn is_feasible(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical_failure",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct BeamformingSolution {
    pub phases: PhaseBeamformer,
    pub powers: PowerAllocation,
    pub sinrs: Vec<f64>,
    pub sum_power_w: f64,
    pub status: SolveStatus,
    /// Named scalars such as `iterations` and `duality_gap_rel`.
    pub diagnostics: BTreeMap<String, f64>,
}

impl BeamformingSolution {
    /// A solution carrying only phases, for methods that fail before power control.
    pub fn failed(phases: PhaseBeamformer, status: SolveStatus) -> Self {
        let k = phases.num_users();
        Self {
            phases,
            powers: PowerAllocation::zeros(k),
            sinrs: vec![0.0; k],
            sum_power_w: f64::INFINITY,
            status,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }
}

/// Per-user SINR `γ_k = p_k |g_kk^H θ_k|² / (Σ_{i≠k} p_i |g_ki^H θ_i|² + σ²)`.
pub fn sinr(channels: &ChannelSet, phases: &PhaseBeamformer, powers: &PowerAllocation, noise: f64) -> Result<Vec<f64>> {
    let k = channels.num_users();
    if phases.num_users() != k || powers.len() != k || phases.units() != channels.units() {
        return Err(Error::DimensionMismatch(format!(
            "{k} users / N={} in channels, {} phase vectors of length {}, {} powers",
            channels.units(),
            phases.num_users(),
            phases.units(),
            powers.len()
        )));
    }
    if !(noise > 0.0) {
        return Err(Error::Domain(format!("noise power must be positive, got {noise}")));
    }
    let p = powers.as_slice();
    Ok((0..k)
        .map(|user| {
            let mut interference = noise;
            let mut signal = 0.0;
            for i in 0..k {
                let gain = channels.gain(user, i).dotc(phases.phase(i)).norm_sqr();
                if i == user {
                    signal = p[i] * gain;
                } else {
                    interference += p[i] * gain;
                }
            }
            signal / interference
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, passed: bool, residual: f64) {
        self.checks.push(Check { name, passed, residual });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<20} {:<4} {:e}", c.name, if c.passed { "ok" } else { "FAIL" }, c.residual)?;
        }
        Ok(())
    }
}

/// Checks a solution against the SINR constraints and the unit-modulus
/// constraints. SINRs are recomputed from `channels`, not taken from the
/// solution. The SINR check passes when `(γ_k - Γ_k)/Γ_k >= -tol` for every
/// user; its residual is the absolute slack `min_k (γ_k - Γ_k)`.
pub fn validate(solution: &BeamformingSolution, config: &SystemConfig, channels: &ChannelSet, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = config.num_users;
    let dims_ok = channels.num_users() == k
        && channels.units() == config.units_per_user
        && solution.phases.num_users() == k
        && solution.phases.units() == config.units_per_user
        && solution.powers.len() == k
        && config.sinr_targets.len() == k;
    report.push("dimensions", dims_ok, if dims_ok { 0.0 } else { 1.0 });
    if !dims_ok {
        return report;
    }

    let modulus = solution.phases.max_modulus_residual();
    report.push("unit_modulus", modulus <= UNIT_MODULUS_TOL, modulus);

    let min_power = solution.powers.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    report.push("nonnegative_powers", min_power >= 0.0, min_power);

    let sum = solution.powers.sum();
    let sum_err = (solution.sum_power_w - sum).abs();
    report.push("sum_power", sum_err <= 1e-12 * sum.abs().max(f64::MIN_POSITIVE), sum_err);

    match sinr(channels, &solution.phases, &solution.powers, config.noise_power) {
        Ok(gammas) => {
            let mut slack = f64::INFINITY;
            let mut rel_slack = f64::INFINITY;
            for (g, t) in gammas.iter().zip(&config.sinr_targets) {
                slack = slack.min(g - t);
                rel_slack = rel_slack.min((g - t) / t);
            }
            report.push("sinr", rel_slack >= -tol, slack);
        }
        Err(_) => report.push("sinr", false, f64::NAN),
    }
    report
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts > 0.0) {
        return Err(Error::Domain(format!("cannot express {watts} W in dBm")));
    }
    Ok(10.0 * watts.log10() + 30.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_user() -> (ChannelSet, PhaseBeamformer) {
        let ch = ChannelSet::new(vec![vec![CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])]]).unwrap();
        (ch, PhaseBeamformer::ones(1, 2))
    }

    #[test]
    fn sinr_single_user_no_interference() {
        let (ch, th) = single_user();
        let g = sinr(&ch, &th, &PowerAllocation::new(vec![4.0]).unwrap(), 1.0).unwrap();
        assert_relative_eq!(g[0], 16.0);
    }

    #[test]
    fn sinr_symmetric_pair() {
        let ch = ChannelSet::from_fn(2, 1, |_, _, _| c(1.0, 0.0)).unwrap();
        let g = sinr(&ch, &PhaseBeamformer::ones(2, 1), &PowerAllocation::new(vec![2.0, 2.0]).unwrap(), 1.0).unwrap();
        assert_relative_eq!(g[0], 2.0 / 3.0);
        assert_relative_eq!(g[1], 2.0 / 3.0);
    }

    #[test]
    fn sinr_rejects_mismatch() {
        let (ch, th) = single_user();
        assert!(matches!(
            sinr(&ch, &th, &PowerAllocation::new(vec![1.0, 1.0]).unwrap(), 1.0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn dbm_conversions() {
        assert_relative_eq!(dbm_to_watts(0.0), 1e-3, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(30.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(-114.0), 3.981_071_705_534_97e-15, max_relative = 1e-12);
        assert!(watts_to_dbm(0.0).is_err());
        assert!(watts_to_dbm(-1.0).is_err());
    }

    #[test]
    fn validate_hand_built_solution() {
        let (ch, th) = single_user();
        let mut cfg = SystemConfig::new(1, 2);
        cfg.noise_power = 1.0;
        cfg.sinr_targets = vec![2.0];
        let sol = BeamformingSolution {
            phases: th,
            powers: PowerAllocation::new(vec![0.5]).unwrap(),
            sinrs: vec![2.0],
            sum_power_w: 0.5,
            status: SolveStatus::Optimal,
            diagnostics: BTreeMap::new(),
        };
        let report = validate(&sol, &cfg, &ch, 1e-9);
        assert!(report.passed(), "{report}");

        let mut bad = sol.clone();
        bad.phases = PhaseBeamformer::new_unchecked(vec![CVector::from_vec(vec![c(0.5, 0.0), c(1.0, 0.0)])]).unwrap();
        let report = validate(&bad, &cfg, &ch, 1e-9);
        let check = report.check("unit_modulus").unwrap();
        assert!(!check.passed);
        assert_relative_eq!(check.residual, 0.5);
    }

    #[test]
    fn phase_beamformer_rejects_off_circle() {
        assert!(PhaseBeamformer::new(vec![CVector::from_vec(vec![c(0.5, 0.0)])]).is_err());
        assert!(PhaseBeamformer::new_unchecked(vec![]).is_err());
    }

    #[test]
    fn config_defaults() {
        let cfg = SystemConfig::default();
        assert_eq!(cfg.num_users, 8);
        assert_eq!(cfg.units_per_user, 20);
        assert_eq!(cfg.sinr_targets, vec![2.0; 8]);
        assert_eq!(cfg.pathloss_exponent, 3.0);
        assert_eq!(cfg.area_side_m, 500.0);
        cfg.validate().unwrap();
        assert!(SystemConfig::new(2, 2).with_target(-1.0).validate().is_err());
    }
}
