//! Seeded channel and geometry generation.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded
//! with `seed_from_u64(seed)`. User `k` owns stream `k` of that generator and
//! draws, in order: its x and y position (uniform over the square), then the
//! entries of `g_k0, g_k1, ..., g_k(K-1)`, each entry as a real part followed
//! by an imaginary part (standard normals scaled by `sqrt(ρ/2)`). Because
//! every user reads only its own stream, generating one user at a time gives
//! exactly the same numbers as generating the whole scenario.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{CVector, ChannelSet, Deployment, SystemConfig};

/// Large-scale attenuation at 1 m, `10^{-3.76}`.
pub const PATHLOSS_AT_1M: f64 = 1.737_800_828_749_376_3e-4;

/// Distances are clamped to this many meters before applying the pathloss.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub config: SystemConfig,
    pub seed: u64,
    /// Per-entry variance ρ of the small-scale fading.
    pub fading_variance: f64,
}

impl ScenarioSpec {
    pub fn new(config: SystemConfig, seed: u64) -> Self {
        Self {
            config,
            seed,
            fading_variance: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub channels: ChannelSet,
    pub user_positions: Vec<[f64; 2]>,
    /// Location of each RIS row (all at the origin when centralized).
    pub ris_positions: Vec<[f64; 2]>,
}

/// `10^{-3.76} d^{-α}` with `d` clamped to [`MIN_DISTANCE_M`].
pub fn pathloss(distance_m: f64, exponent: f64) -> f64 {
    PATHLOSS_AT_1M * distance_m.max(MIN_DISTANCE_M).powf(-exponent)
}

pub fn ris_row_position(deployment: Deployment, row: usize, num_users: usize) -> [f64; 2] {
    match deployment {
        Deployment::Centralized => [0.0, 0.0],
        Deployment::Distributed { radius_m } => {
            let angle = 2.0 * std::f64::consts::PI * row as f64 / num_users as f64;
            [angle.cos() * radius_m, angle.sin() * radius_m]
        }
    }
}

fn user_rng(seed: u64, user: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(user as u64);
    rng
}

fn complex_normal<R: Rng>(rng: &mut R, std_per_axis: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_axis, im * std_per_axis)
}

/// Position of user `k` and its channel vectors `g_k0 .. g_k(K-1)`.
pub fn generate_user(spec: &ScenarioSpec, user: usize) -> Result<([f64; 2], Vec<CVector>)> {
    let cfg = &spec.config;
    cfg.validate()?;
    if !(spec.fading_variance > 0.0) {
        return Err(Error::Domain(format!("fading variance must be positive, got {}", spec.fading_variance)));
    }
    if user >= cfg.num_users {
        return Err(Error::DimensionMismatch(format!("user {user} out of {}", cfg.num_users)));
    }
    let mut rng = user_rng(spec.seed, user);
    let half = cfg.area_side_m / 2.0;
    let x = (rng.random::<f64>() - 0.5) * 2.0 * half;
    let y = (rng.random::<f64>() - 0.5) * 2.0 * half;
    let std_per_axis = (spec.fading_variance / 2.0).sqrt();
    let rows = (0..cfg.num_users)
        .map(|i| {
            let [rx, ry] = ris_row_position(cfg.deployment, i, cfg.num_users);
            let d = ((x - rx).powi(2) + (y - ry).powi(2)).sqrt();
            let amplitude = pathloss(d, cfg.pathloss_exponent).sqrt();
            DVector::from_fn(cfg.units_per_user, |_, _| complex_normal(&mut rng, std_per_axis) * amplitude)
        })
        .collect();
    Ok(([x, y], rows))
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    let k = spec.config.num_users;
    let mut positions = Vec::with_capacity(k);
    let mut grid = Vec::with_capacity(k);
    for user in 0..k {
        let (pos, rows) = generate_user(spec, user)?;
        positions.push(pos);
        grid.push(rows);
    }
    Ok(Scenario {
        channels: ChannelSet::new(grid)?,
        user_positions: positions,
        ris_positions: (0..k).map(|i| ris_row_position(spec.config.deployment, i, k)).collect(),
    })
}

/// `n` i.i.d. `CN(0, ρ)` samples from ChaCha20 seeded with `seed` (stream 0).
pub fn raw_fading(n: usize, variance: f64, seed: u64) -> Result<CVector> {
    if n == 0 || !(variance > 0.0) {
        return Err(Error::Domain(format!("need n >= 1 and variance > 0, got n={n}, variance={variance}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let std_per_axis = (variance / 2.0).sqrt();
    Ok(DVector::from_fn(n, |_, _| complex_normal(&mut rng, std_per_axis)))
}

pub(crate) fn format_complex(z: Complex64) -> String {
    format!("{:e}{:+e}j", z.re, z.im)
}

pub(crate) fn parse_complex(token: &str) -> Result<Complex64> {
    let err = || Error::Parse(format!("bad complex token {token:?}"));
    let body = token.strip_suffix('j').ok_or_else(err)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(err)?;
    let re: f64 = body[..split].parse().map_err(|_| err())?;
    let im: f64 = body[split..].trim_start_matches('+').parse().map_err(|_| err())?;
    Ok(Complex64::new(re, im))
}

/// Plain-text channel dump.
///
/// ```text
/// # comment lines start with '#'
/// K N
/// <K*K lines, ordered (k, i) = (0,0), (0,1), ...; each holds N tokens "a+bj">
/// ```
pub fn dump_channels(channels: &ChannelSet) -> String {
    let k = channels.num_users();
    let mut out = String::from("# risbeam channel set: K N, then g_ki for k, i in row-major order\n");
    let _ = writeln!(out, "{k} {}", channels.units());
    for user in 0..k {
        for row in 0..k {
            let tokens: Vec<String> = channels.gain(user, row).iter().map(|z| format_complex(*z)).collect();
            let _ = writeln!(out, "{}", tokens.join(" "));
        }
    }
    out
}

pub fn load_channels(text: &str) -> Result<ChannelSet> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
        .collect::<Result<_>>()?;
    let [k, n] = dims[..] else {
        return Err(Error::Parse(format!("header must be 'K N', got {header:?}")));
    };
    let mut grid = vec![Vec::with_capacity(k); k];
    for (idx, line) in (0..k * k).zip(lines.by_ref()) {
        let values: Vec<Complex64> = line.split_whitespace().map(parse_complex).collect::<Result<_>>()?;
        if values.len() != n {
            return Err(Error::Parse(format!("expected {n} entries, got {}", values.len())));
        }
        grid[idx / k].push(DVector::from_vec(values));
    }
    if grid.iter().any(|row| row.len() != k) {
        return Err(Error::Parse("truncated channel dump".into()));
    }
    ChannelSet::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pathloss_at_one_meter() {
        assert_relative_eq!(pathloss(1.0, 3.0), 10f64.powf(-3.76), max_relative = 1e-14);
        assert_relative_eq!(pathloss(0.1, 3.0), 10f64.powf(-3.76), max_relative = 1e-14);
        assert_relative_eq!(pathloss(10.0, 2.0), 10f64.powf(-5.76), max_relative = 1e-12);
    }

    #[test]
    fn distributed_row_positions() {
        let p = ris_row_position(Deployment::Distributed { radius_m: 100.0 }, 1, 4);
        assert!(p[0].abs() < 1e-12);
        assert_relative_eq!(p[1], 100.0, max_relative = 1e-14);
        assert_eq!(ris_row_position(Deployment::Centralized, 3, 4), [0.0, 0.0]);
    }

    #[test]
    fn fading_moments() {
        let g = raw_fading(100_000, 2.0, 11).unwrap();
        let mean_sq = g.iter().map(|z| z.norm_sqr()).sum::<f64>() / g.len() as f64;
        assert!((mean_sq - 2.0).abs() < 0.04, "{mean_sq}");

        let g = raw_fading(100_000, 1.0, 12).unwrap();
        let n = g.len() as f64;
        let var_re = g.iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let var_im = g.iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((var_re - 0.5).abs() < 0.01, "{var_re}");
        assert!((var_im - 0.5).abs() < 0.01, "{var_im}");
    }

    #[test]
    fn fading_is_deterministic() {
        assert_eq!(raw_fading(64, 1.0, 5).unwrap(), raw_fading(64, 1.0, 5).unwrap());
        assert_ne!(raw_fading(64, 1.0, 5).unwrap(), raw_fading(64, 1.0, 6).unwrap());
        assert!(raw_fading(0, 1.0, 5).is_err());
        assert!(raw_fading(4, 0.0, 5).is_err());
    }

    #[test]
    fn unit_distance_second_moment() {
        // α = 0 and a zero-size area put every user at the 1 m floor.
        let mut cfg = SystemConfig::new(10, 1000);
        cfg.pathloss_exponent = 0.0;
        cfg.area_side_m = 1e-9;
        let sc = generate_scenario(&ScenarioSpec::new(cfg, 3)).unwrap();
        let mut acc = 0.0;
        let mut count = 0usize;
        for k in 0..10 {
            for i in 0..10 {
                for z in sc.channels.gain(k, i).iter() {
                    acc += z.norm_sqr() / PATHLOSS_AT_1M;
                    count += 1;
                }
            }
        }
        let mean = acc / count as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn per_user_generation_matches_bulk() {
        let cfg = SystemConfig::new(4, 6);
        let spec = ScenarioSpec::new(cfg, 99);
        let sc = generate_scenario(&spec).unwrap();
        for k in 0..4 {
            let (pos, rows) = generate_user(&spec, k).unwrap();
            assert_eq!(pos, sc.user_positions[k]);
            for (i, row) in rows.iter().enumerate() {
                assert_eq!(row, sc.channels.gain(k, i));
            }
        }
        let again = generate_scenario(&spec).unwrap();
        assert_eq!(again.channels, sc.channels);
    }

    #[test]
    fn users_inside_square() {
        let spec = ScenarioSpec::new(SystemConfig::new(8, 2), 1);
        let sc = generate_scenario(&spec).unwrap();
        for p in &sc.user_positions {
            assert!(p[0].abs() <= 250.0 && p[1].abs() <= 250.0);
        }
    }

    #[test]
    fn complex_tokens() {
        for z in [Complex64::new(1.5, -2.0), Complex64::new(-1e-20, 3e-7), Complex64::new(0.0, 0.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert_eq!(parse_complex("1+2j").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-1e-3-2.5E+2j").unwrap(), Complex64::new(-1e-3, -250.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("j").is_err());
    }

    #[test]
    fn dump_round_trip() {
        let sc = generate_scenario(&ScenarioSpec::new(SystemConfig::new(3, 4), 8)).unwrap();
        let text = dump_channels(&sc.channels);
        assert_eq!(load_channels(&text).unwrap(), sc.channels);
        assert!(load_channels("2 2\n1+0j 1+0j\n").is_err());
    }
}
