//! Plain-text experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! [system]
//! num_users = 4
//! units_per_user = 3K        # a multiple of num_users, or a plain count
//! noise = -114dBm
//! sinr_target = 3dB          # linear when unsuffixed
//! pathloss_exponent = 3
//! deployment = centralized   # or distributed:100m
//! area_side = 500m
//!
//! [scenario]
//! seed = 1
//! fading_variance = 1
//!
//! [run]
//! methods = DM, MRT, ZF, SDR
//! trials = 20
//! phase_bits = 0             # 0 keeps continuous phases
//! sdr_samples = 100
//! zf_lambda = 1e3
//! output = results
//!
//! [sweep]
//! parameter = sinr_target
//! values = 1, 2, 4, 8
//! ```
//!
//! Numbers accept the suffixes `dBm` (to watts), `dB` (to linear), and an
//! optional SI prefix (`p n u µ m k M G`) on the units `W`, `Hz` and `m`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{db_to_linear, dbm_to_watts, Deployment, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Dm,
    Sdr,
    Mrt,
    Zf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dm, Method::Sdr, Method::Mrt, Method::Zf];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dm => "DM",
            Method::Sdr => "SDR",
            Method::Mrt => "MRT",
            Method::Zf => "ZF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown method '{}' (expected DM, SDR, MRT or ZF)", s.trim()))
    }
}

/// `units_per_user` either fixed or proportional to `num_users`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitsSpec {
    Fixed(usize),
    PerUser(usize),
}

impl UnitsSpec {
    pub fn resolve(self, num_users: usize) -> usize {
        match self {
            UnitsSpec::Fixed(n) => n,
            UnitsSpec::PerUser(c) => c * num_users,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    SinrTarget,
    PathlossExponent,
    UnitsPerUser,
    NumUsers,
    PhaseBits,
    Deployment,
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sinr_target" => SweepParameter::SinrTarget,
            "pathloss_exponent" => SweepParameter::PathlossExponent,
            "units_per_user" => SweepParameter::UnitsPerUser,
            "num_users" => SweepParameter::NumUsers,
            "phase_bits" => SweepParameter::PhaseBits,
            "deployment" => SweepParameter::Deployment,
            other => return Err(format!("unknown sweep parameter '{other}'")),
        })
    }
}

/// One value of a sweep, applied on top of the base configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepValue {
    SinrTarget(f64),
    PathlossExponent(f64),
    UnitsPerUser(UnitsSpec),
    NumUsers(usize),
    PhaseBits(u32),
    Deployment(Deployment),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub num_users: usize,
    pub units: UnitsSpec,
    pub noise_power: f64,
    /// Linear SINR target shared by every user.
    pub sinr_target: f64,
    pub pathloss_exponent: f64,
    pub deployment: Deployment,
    pub area_side_m: f64,
    pub fading_variance: f64,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub phase_bits: u32,
    pub sdr_samples: usize,
    pub zf_lambda: f64,
    pub sweep: Vec<SweepValue>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let base = SystemConfig::default();
        Self {
            num_users: base.num_users,
            units: UnitsSpec::Fixed(base.units_per_user),
            noise_power: base.noise_power,
            sinr_target: base.sinr_targets[0],
            pathloss_exponent: base.pathloss_exponent,
            deployment: base.deployment,
            area_side_m: base.area_side_m,
            fading_variance: 1.0,
            seed: 0,
            methods: vec![Method::Dm, Method::Mrt, Method::Zf],
            trials: 1,
            phase_bits: 0,
            sdr_samples: 100,
            zf_lambda: 1e3,
            sweep: Vec::new(),
            output: None,
        }
    }
}

/// Parameters of one sweep point after applying its override.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfig {
    pub system: SystemConfig,
    pub phase_bits: u32,
}

impl ExperimentConfig {
    /// Sweep points in order; a config without a sweep has one point.
    pub fn points(&self) -> Vec<PointConfig> {
        if self.sweep.is_empty() {
            return vec![self.point(None)];
        }
        self.sweep.iter().map(|v| self.point(Some(*v))).collect()
    }

    fn point(&self, value: Option<SweepValue>) -> PointConfig {
        let mut num_users = self.num_users;
        let mut units = self.units;
        let mut target = self.sinr_target;
        let mut exponent = self.pathloss_exponent;
        let mut deployment = self.deployment;
        let mut bits = self.phase_bits;
        match value {
            None => {}
            Some(SweepValue::SinrTarget(v)) => target = v,
            Some(SweepValue::PathlossExponent(v)) => exponent = v,
            Some(SweepValue::UnitsPerUser(u)) => units = u,
            Some(SweepValue::NumUsers(k)) => num_users = k,
            Some(SweepValue::PhaseBits(b)) => bits = b,
            Some(SweepValue::Deployment(d)) => deployment = d,
        }
        let mut system = SystemConfig::new(num_users, units.resolve(num_users))
            .with_target(target)
            .with_noise(self.noise_power);
        system.pathloss_exponent = exponent;
        system.deployment = deployment;
        system.area_side_m = self.area_side_m;
        PointConfig { system, phase_bits: bits }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Domain("at least one method is required".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if !(self.fading_variance > 0.0) || !(self.zf_lambda > 0.0) {
            return Err(Error::Domain("fading_variance and zf_lambda must be positive".into()));
        }
        for p in self.points() {
            p.system.validate()?;
            if p.phase_bits > 30 {
                return Err(Error::Domain(format!("phase_bits must be at most 30, got {}", p.phase_bits)));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut section = String::new();
        let mut sweep_param: Option<(usize, SweepParameter)> = None;
        let mut sweep_values: Option<(usize, String)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::Config { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| err(format!("malformed section header '{content}'")))?;
                if !["system", "scenario", "run", "sweep"].contains(&name.trim()) {
                    return Err(err(format!("unknown section [{}]", name.trim())));
                }
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("missing value for '{key}'")));
            }
            match (section.as_str(), key) {
                ("system", "num_users") => cfg.num_users = parse_count(value).map_err(err)?,
                ("system", "units_per_user") => cfg.units = parse_units(value).map_err(err)?,
                ("system", "noise") => cfg.noise_power = parse_quantity(value).map_err(err)?,
                ("system", "sinr_target") => cfg.sinr_target = parse_quantity(value).map_err(err)?,
                ("system", "pathloss_exponent") => cfg.pathloss_exponent = parse_quantity(value).map_err(err)?,
                ("system", "deployment") => cfg.deployment = parse_deployment(value).map_err(err)?,
                ("system", "area_side") => cfg.area_side_m = parse_quantity(value).map_err(err)?,
                ("scenario", "seed") => cfg.seed = value.parse().map_err(|_| err(format!("invalid seed '{value}'")))?,
                ("scenario", "fading_variance") => cfg.fading_variance = parse_quantity(value).map_err(err)?,
                ("run", "methods") => {
                    let mut methods = Vec::new();
                    for m in value.split(',') {
                        let m: Method = m.parse().map_err(err)?;
                        if !methods.contains(&m) {
                            methods.push(m);
                        }
                    }
                    cfg.methods = methods;
                }
                ("run", "trials") => cfg.trials = parse_count(value).map_err(err)?,
                ("run", "phase_bits") => cfg.phase_bits = parse_count(value).map_err(err)? as u32,
                ("run", "sdr_samples") => cfg.sdr_samples = parse_count(value).map_err(err)?,
                ("run", "zf_lambda") => cfg.zf_lambda = parse_quantity(value).map_err(err)?,
                ("run", "output") => cfg.output = Some(PathBuf::from(value)),
                ("sweep", "parameter") => sweep_param = Some((line, value.parse().map_err(err)?)),
                ("sweep", "values") => sweep_values = Some((line, value.to_string())),
                ("", _) => return Err(err(format!("key '{key}' appears before any section"))),
                (s, k) => return Err(err(format!("unknown key '{k}' in [{s}]"))),
            }
        }
        match (sweep_param, sweep_values) {
            (None, None) => {}
            (Some((line, _)), None) => {
                return Err(Error::Config {
                    line,
                    message: "sweep parameter given without values".into(),
                })
            }
            (None, Some((line, _))) => {
                return Err(Error::Config {
                    line,
                    message: "sweep values given without a parameter".into(),
                })
            }
            (Some((_, param)), Some((line, values))) => {
                cfg.sweep = values
                    .split(',')
                    .map(|v| parse_sweep_value(param, v.trim()))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|message| Error::Config { line, message })?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_sweep_value(param: SweepParameter, v: &str) -> std::result::Result<SweepValue, String> {
    Ok(match param {
        SweepParameter::SinrTarget => SweepValue::SinrTarget(parse_quantity(v)?),
        SweepParameter::PathlossExponent => SweepValue::PathlossExponent(parse_quantity(v)?),
        SweepParameter::UnitsPerUser => SweepValue::UnitsPerUser(parse_units(v)?),
        SweepParameter::NumUsers => SweepValue::NumUsers(parse_count(v)?),
        SweepParameter::PhaseBits => SweepValue::PhaseBits(parse_count(v)? as u32),
        SweepParameter::Deployment => SweepValue::Deployment(parse_deployment(v)?),
    })
}

fn parse_count(v: &str) -> std::result::Result<usize, String> {
    v.parse().map_err(|_| format!("expected a nonnegative integer, got '{v}'"))
}

/// `"20"` or `"3K"` (three units per user).
pub fn parse_units(v: &str) -> std::result::Result<UnitsSpec, String> {
    match v.strip_suffix('K') {
        Some(c) => Ok(UnitsSpec::PerUser(parse_count(c.trim())?)),
        None => Ok(UnitsSpec::Fixed(parse_count(v)?)),
    }
}

/// `"centralized"` or `"distributed:<radius>"`.
pub fn parse_deployment(v: &str) -> std::result::Result<Deployment, String> {
    if v.eq_ignore_ascii_case("centralized") {
        return Ok(Deployment::Centralized);
    }
    if let Some(r) = v.strip_prefix("distributed:") {
        return Ok(Deployment::Distributed {
            radius_m: parse_quantity(r.trim())?,
        });
    }
    Err(format!("unknown deployment '{v}' (expected centralized or distributed:<radius>)"))
}

/// Parses a number with an optional unit suffix into SI base units.
pub fn parse_quantity(v: &str) -> std::result::Result<f64, String> {
    let split = v
        .char_indices()
        .map(|(i, _)| i)
        .chain([v.len()])
        .rev()
        .find(|&i| i > 0 && v[..i].parse::<f64>().is_ok())
        .ok_or_else(|| format!("invalid number '{v}'"))?;
    let (num, suffix) = v.split_at(split);
    let x: f64 = num.parse().map_err(|_| format!("invalid number '{v}'"))?;
    let suffix = suffix.trim();
    let value = match suffix {
        "" => x,
        "dBm" => dbm_to_watts(x),
        "dB" => db_to_linear(x),
        "W" | "Hz" | "m" => x,
        _ => {
            let mut chars = suffix.chars();
            let prefix = chars.next().unwrap_or(' ');
            let unit = chars.as_str();
            let scale = match prefix {
                'p' => 1e-12,
                'n' => 1e-9,
                'u' | 'µ' => 1e-6,
                'm' => 1e-3,
                'k' => 1e3,
                'M' => 1e6,
                'G' => 1e9,
                _ => return Err(format!("unknown unit suffix '{suffix}' in '{v}'")),
            };
            if !["", "W", "Hz", "m"].contains(&unit) {
                return Err(format!("unknown unit suffix '{suffix}' in '{v}'"));
            }
            x * scale
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("value '{v}' is not finite"))
    }
}
