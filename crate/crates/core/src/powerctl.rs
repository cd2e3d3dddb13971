//! Power control for fixed phases.
//!
//! With phases fixed, SINR equality for every user is the linear system
//! `p = D(C p + σ² 1)` with `D = diag(Γ_k / a_k)`. [`fixed_point`] iterates
//! the standard interference function `f(p) = D(C p + σ² 1)` from zero;
//! [`direct_solve`] solves the system outright and serves as its oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{ChannelSet, PhaseBeamformer, PowerAllocation};

/// Direct gains at or below this are treated as zero.
pub const DEGENERATE_GAIN: f64 = 1e-30;

/// Spectral radius margin below one for [`direct_solve`].
const RADIUS_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GainTable {
    /// `a_k = |g_kk^H θ_k|²`
    pub direct: Vec<f64>,
    /// `c_ki = |g_ki^H θ_i|²` at `(k, i)`; the diagonal is zero.
    pub cross: DMatrix<f64>,
}

impl GainTable {
    pub fn num_users(&self) -> usize {
        self.direct.len()
    }

    fn check(&self, targets: &[f64], noise: f64) -> Result<()> {
        let k = self.num_users();
        if targets.len() != k || self.cross.nrows() != k || self.cross.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} direct gains, {}x{} cross gains, {} targets",
                self.cross.nrows(),
                self.cross.ncols(),
                targets.len()
            )));
        }
        if !(noise > 0.0) {
            return Err(Error::Domain(format!("noise power must be positive, got {noise}")));
        }
        if let Some(user) = self.direct.iter().position(|a| !(*a > DEGENERATE_GAIN)) {
            return Err(Error::DegenerateChannel { user });
        }
        Ok(())
    }

    /// `D C` with `D = diag(Γ_k / a_k)`.
    fn normalized_cross(&self, targets: &[f64]) -> DMatrix<f64> {
        let mut m = self.cross.clone();
        for k in 0..self.num_users() {
            m[(k, k)] = 0.0;
            m.row_mut(k).scale_mut(targets[k] / self.direct[k]);
        }
        m
    }
}

pub fn build_gain_table(channels: &ChannelSet, phases: &PhaseBeamformer) -> Result<GainTable> {
    let k = channels.num_users();
    if phases.num_users() != k || phases.units() != channels.units() {
        return Err(Error::DimensionMismatch(format!(
            "{k} users with N={} in channels, {} phase vectors of length {}",
            channels.units(),
            phases.num_users(),
            phases.units()
        )));
    }
    let mut cross = DMatrix::zeros(k, k);
    let mut direct = vec![0.0; k];
    for user in 0..k {
        for i in 0..k {
            let g = channels.gain(user, i).dotc(phases.phase(i)).norm_sqr();
            if i == user {
                direct[user] = g;
            } else {
                cross[(user, i)] = g;
            }
        }
    }
    Ok(GainTable { direct, cross })
}

/// `f_k(p) = (Γ_k / a_k)(Σ_{i≠k} c_ki p_i + σ²)`.
pub fn interference_map(p: &PowerAllocation, table: &GainTable, targets: &[f64], noise: f64) -> Result<PowerAllocation> {
    table.check(targets, noise)?;
    if p.len() != table.num_users() {
        return Err(Error::DimensionMismatch(format!("{} powers for {} users", p.len(), table.num_users())));
    }
    PowerAllocation::new(apply(p.as_slice(), table, targets, noise))
}

fn apply(p: &[f64], table: &GainTable, targets: &[f64], noise: f64) -> Vec<f64> {
    (0..p.len())
        .map(|k| {
            let interference: f64 = (0..p.len()).filter(|&i| i != k).map(|i| table.cross[(k, i)] * p[i]).sum();
            targets[k] / table.direct[k] * (interference + noise)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerControlOptions {
    /// Absolute stopping threshold on `‖p - f(p)‖₂`, watts.
    pub eps: f64,
    /// Relative stopping threshold on `max_k |p_k - f_k(p)| / f_k(p)`.
    pub rel_eps: f64,
    pub max_iter: usize,
    /// Sum power above which the iteration is declared divergent, watts.
    pub power_cap: f64,
}

impl Default for PowerControlOptions {
    fn default() -> Self {
        Self {
            eps: 1e-10,
            rel_eps: 1e-10,
            max_iter: 10_000,
            power_cap: 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub powers: PowerAllocation,
    /// Total number of map evaluations performed.
    pub iterations: usize,
    /// First iteration at which the absolute rule `‖p - f(p)‖ < eps` held.
    pub iterations_to_eps: usize,
}

/// Iterates `p ← f(p)` from `p = 0` until both the absolute and the relative
/// stopping rules hold. The iterates are componentwise nondecreasing.
pub fn fixed_point(table: &GainTable, targets: &[f64], noise: f64, opts: &PowerControlOptions) -> Result<FixedPoint> {
    fixed_point_traced(table, targets, noise, opts, |_| {})
}

/// [`fixed_point`] that reports every iterate to `observe`, starting with zero.
pub fn fixed_point_traced(
    table: &GainTable,
    targets: &[f64],
    noise: f64,
    opts: &PowerControlOptions,
    mut observe: impl FnMut(&[f64]),
) -> Result<FixedPoint> {
    table.check(targets, noise)?;
    let mut p = vec![0.0; table.num_users()];
    let mut to_eps = None;
    observe(&p);
    for iter in 1..=opts.max_iter {
        let next = apply(&p, table, targets, noise);
        let after = apply(&next, table, targets, noise);
        p = next;
        observe(&p);
        let total: f64 = p.iter().sum();
        if !(total <= opts.power_cap) {
            return Err(Error::Infeasible(format!("sum power exceeded {:e} W after {iter} iterations", opts.power_cap)));
        }
        let abs = p.iter().zip(&after).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let rel = p.iter().zip(&after).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
        if abs < opts.eps && to_eps.is_none() {
            to_eps = Some(iter);
        }
        if abs < opts.eps && rel <= opts.rel_eps {
            return Ok(FixedPoint {
                powers: PowerAllocation::new(p)?,
                iterations: iter,
                iterations_to_eps: to_eps.unwrap_or(iter),
            });
        }
    }
    Err(Error::Infeasible(format!("no fixed point within {} iterations", opts.max_iter)))
}

/// Spectral radius of `D C`.
pub fn spectral_radius(table: &GainTable, targets: &[f64]) -> f64 {
    table
        .normalized_cross(targets)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Solves `(I - D C) p = D σ² 1`.
pub fn direct_solve(table: &GainTable, targets: &[f64], noise: f64) -> Result<PowerAllocation> {
    table.check(targets, noise)?;
    let k = table.num_users();
    let dc = table.normalized_cross(targets);
    let radius = dc.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if radius >= 1.0 - RADIUS_MARGIN {
        return Err(Error::Infeasible(format!("spectral radius {radius} of the normalized cross-gain matrix is not below one")));
    }
    let rhs = DVector::from_fn(k, |i, _| targets[i] / table.direct[i] * noise);
    let system = DMatrix::identity(k, k) - dc;
    let p = system.lu().solve(&rhs).ok_or_else(|| Error::Infeasible("singular power-control system".into()))?;
    if let Some(i) = p.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Infeasible(format!("power control gives p[{i}] = {}", p[i])));
    }
    PowerAllocation::new(p.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn symmetric(a: f64, c: f64) -> GainTable {
        GainTable {
            direct: vec![a, a],
            cross: DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]),
        }
    }

    #[test]
    fn single_user_table() {
        let ch = ChannelSet::from_fn(1, 2, |_, _, _| Complex64::new(1.0, 0.0)).unwrap();
        let t = build_gain_table(&ch, &PhaseBeamformer::ones(1, 2)).unwrap();
        assert_eq!(t.direct, vec![4.0]);
    }

    #[test]
    fn noise_floor_at_zero() {
        let t = symmetric(4.0, 1.0);
        let f = interference_map(&PowerAllocation::zeros(2), &t, &[2.0, 3.0], 1.0).unwrap();
        assert_eq!(f.as_slice(), &[0.5, 0.75]);
    }

    #[test]
    fn closed_forms() {
        let one = GainTable {
            direct: vec![4.0],
            cross: DMatrix::zeros(1, 1),
        };
        let fp = fixed_point(&one, &[2.0], 1.0, &Default::default()).unwrap();
        assert!((fp.powers.as_slice()[0] - 0.5).abs() < 1e-15);
        let fp = fixed_point(&symmetric(4.0, 1.0), &[2.0, 2.0], 1.0, &Default::default()).unwrap();
        for p in fp.powers.as_slice() {
            assert!((p - 1.0).abs() < 1e-9, "{p}");
        }
        let direct = direct_solve(&symmetric(4.0, 1.0), &[2.0, 2.0], 1.0).unwrap();
        for p in direct.as_slice() {
            assert!((p - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn infeasible_symmetric() {
        let t = symmetric(1.0, 1.0);
        assert!(matches!(fixed_point(&t, &[2.0, 2.0], 1.0, &Default::default()), Err(Error::Infeasible(_))));
        assert!(matches!(direct_solve(&t, &[2.0, 2.0], 1.0), Err(Error::Infeasible(_))));
        assert!((spectral_radius(&t, &[2.0, 2.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_direct_gain() {
        let t = symmetric(0.0, 1.0);
        assert!(matches!(direct_solve(&t, &[1.0, 1.0], 1.0), Err(Error::DegenerateChannel { user: 0 })));
    }
}
