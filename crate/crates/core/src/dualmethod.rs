//! Dual method: solve the dual semidefinite program, recover phases from its
//! multipliers in closed form, then run power control.
//!
//! The SDP is solved on rescaled data so that the noise is 1 and typical
//! powers are O(1). With `s = median_k Γ_k σ² / (Σ_n |[g_kk]_n|)²` the
//! channels become `g √s / σ`; multipliers map back as `q = q̂` and
//! `α = s α̂ / σ²`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::baselines::solve_with_phases;
use crate::error::{Error, Result};
use crate::linalg::hermitian_pinv_apply;
use crate::model::{self, BeamformingSolution, CVector, ChannelSet, PhaseBeamformer, SolveStatus, SystemConfig};
use crate::powerctl::{build_gain_table, direct_solve, PowerControlOptions};
use crate::sdp::{self, SdpOptions, SdpSolution, SdpStatus};

/// Multipliers of the dual problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    /// `q_kn` at index `k·N + n`.
    pub q: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `σ² Σ_k α_k`, watts.
    pub dual_objective: f64,
    pub units: usize,
}

impl DualSolution {
    pub fn q_user(&self, k: usize) -> &[f64] {
        &self.q[k * self.units..(k + 1) * self.units]
    }

    /// `Q_k + Σ_i α_i g_ik g_ik^H`.
    pub fn recovery_matrix(&self, channels: &ChannelSet, k: usize) -> DMatrix<Complex64> {
        let n = channels.units();
        let mut m = DMatrix::from_diagonal(&CVector::from_iterator(n, self.q_user(k).iter().map(|q| Complex64::new(*q, 0.0))));
        for (i, &a) in self.alpha.iter().enumerate() {
            let g = channels.gain(i, k);
            m += g * g.adjoint() * Complex64::new(a, 0.0);
        }
        m
    }

    fn check(&self, channels: &ChannelSet) -> Result<()> {
        let (k, n) = (channels.num_users(), channels.units());
        if self.alpha.len() != k || self.q.len() != k * n || self.units != n {
            return Err(Error::DimensionMismatch(format!(
                "dual solution has {} multipliers alpha and {} q for {k} users with N={n}",
                self.alpha.len(),
                self.q.len()
            )));
        }
        Ok(())
    }
}

/// `u_k = (Q_k + Σ_i α_i g_ik g_ik^H)^† g_kk` for every user.
pub fn recovery_directions(dual: &DualSolution, channels: &ChannelSet) -> Result<Vec<CVector>> {
    dual.check(channels)?;
    (0..channels.num_users())
        .map(|k| {
            let u = hermitian_pinv_apply(&dual.recovery_matrix(channels, k), channels.gain(k, k));
            if u.iter().all(|z| z.norm() == 0.0) {
                Err(Error::DegenerateRecovery { user: k })
            } else {
                Ok(u)
            }
        })
        .collect()
}

/// Element-wise unit-modulus projection of the recovery directions. Zero
/// entries map to phase 1.
pub fn recover_phase(dual: &DualSolution, channels: &ChannelSet) -> Result<PhaseBeamformer> {
    let dirs = recovery_directions(dual, channels)?;
    PhaseBeamformer::new_unchecked(dirs.iter().map(model::unit_modulus).collect())
}

/// Recovery directions scaled to norm `√N`, without projecting entries onto
/// the unit circle.
pub fn recover_norm_scaled(dual: &DualSolution, channels: &ChannelSet) -> Result<Vec<CVector>> {
    let root_n = (channels.units() as f64).sqrt();
    Ok(recovery_directions(dual, channels)?
        .into_iter()
        .map(|u| {
            let s = root_n / u.norm();
            u * Complex64::new(s, 0.0)
        })
        .collect())
}

/// Power rescaling `s` used before the SDP solve.
fn power_scale(channels: &ChannelSet, config: &SystemConfig) -> f64 {
    let mut per_user: Vec<f64> = (0..channels.num_users())
        .map(|k| {
            let amp: f64 = channels.gain(k, k).iter().map(|z| z.norm()).sum();
            config.sinr_targets[k] * config.noise_power / (amp * amp)
        })
        .filter(|v| v.is_finite() && *v > 0.0)
        .collect();
    if per_user.is_empty() {
        return 1.0;
    }
    per_user.sort_by(f64::total_cmp);
    per_user[per_user.len() / 2]
}

/// Solves the dual SDP on rescaled data and maps the multipliers back.
pub fn solve_dual_problem(
    channels: &ChannelSet,
    config: &SystemConfig,
    opts: &SdpOptions,
) -> Result<(Option<DualSolution>, SdpSolution)> {
    config.validate()?;
    channels.check_dims(config.num_users, config.units_per_user)?;
    let s = power_scale(channels, config);
    let scaled = channels.scaled(s.sqrt() / config.noise_power.sqrt());
    let problem = sdp::assemble_dual_problem(&scaled, &config.sinr_targets, 1.0)?;
    let sol = sdp::solve(&problem, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Ok((None, sol));
    }
    let (k, n) = (config.num_users, config.units_per_user);
    let alpha: Vec<f64> = sol.values[k * n..].iter().map(|a| s * a / config.noise_power).collect();
    let dual = DualSolution {
        q: sol.values[..k * n].to_vec(),
        dual_objective: config.noise_power * alpha.iter().sum::<f64>(),
        alpha,
        units: n,
    };
    Ok((Some(dual), sol))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DualMethodOptions {
    pub sdp: SdpOptions,
    pub power: PowerControlOptions,
}

/// Relative duality gap at or below which a dual-method result is `Optimal`.
pub const OPTIMAL_GAP: f64 = 1e-6;

/// Full dual-method pipeline. Diagnostics include `duality_gap_rel`
/// (`(Σ p_k - σ² Σ α_k) / Σ p_k`), `dual_objective_w`, `sdp_iterations`,
/// `sdp_residual` and, for comparison, `norm_scaled_modulus_dev` and
/// `norm_scaled_sum_power_w` of the unprojected norm-`√N` recovery.
pub fn solve_dual_method(channels: &ChannelSet, config: &SystemConfig, opts: &DualMethodOptions) -> Result<BeamformingSolution> {
    let (dual, sdp_sol) = solve_dual_problem(channels, config, &opts.sdp)?;
    let placeholder = || PhaseBeamformer::ones(config.num_users, config.units_per_user);
    let dual = match (dual, sdp_sol.status) {
        (Some(d), _) => d,
        (None, SdpStatus::Unbounded) | (None, SdpStatus::Infeasible) => {
            let mut sol = BeamformingSolution::failed(placeholder(), SolveStatus::Infeasible);
            sol.diagnostics.insert("sdp_iterations".into(), sdp_sol.iterations as f64);
            return Ok(sol);
        }
        (None, _) => {
            log::warn!("dual SDP failed: {}", sdp_sol.message.as_deref().unwrap_or("unknown"));
            let mut sol = BeamformingSolution::failed(placeholder(), SolveStatus::NumericalFailure);
            sol.diagnostics.insert("sdp_iterations".into(), sdp_sol.iterations as f64);
            sol.diagnostics.insert("sdp_residual".into(), sdp_sol.max_residual());
            return Ok(sol);
        }
    };
    let phases = recover_phase(&dual, channels)?;
    let mut sol = solve_with_phases(phases, channels, config, &opts.power)?;
    sol.diagnostics.insert("dual_objective_w".into(), dual.dual_objective);
    sol.diagnostics.insert("sdp_iterations".into(), sdp_sol.iterations as f64);
    sol.diagnostics.insert("sdp_residual".into(), sdp_sol.max_residual());

    let verbatim = recover_norm_scaled(&dual, channels)?;
    let dev = verbatim.iter().flat_map(|v| v.iter().map(|z| (z.norm() - 1.0).abs())).fold(0.0, f64::max);
    sol.diagnostics.insert("norm_scaled_modulus_dev".into(), dev);
    let verbatim = PhaseBeamformer::new_unchecked(verbatim)?;
    let verbatim_power = build_gain_table(channels, &verbatim)
        .and_then(|t| direct_solve(&t, &config.sinr_targets, config.noise_power))
        .map(|p| p.sum())
        .unwrap_or(f64::INFINITY);
    sol.diagnostics.insert("norm_scaled_sum_power_w".into(), verbatim_power);

    if sol.status.is_feasible() {
        let gap = (sol.sum_power_w - dual.dual_objective) / sol.sum_power_w;
        sol.diagnostics.insert("duality_gap_rel".into(), gap);
        sol.status = if gap <= OPTIMAL_GAP { SolveStatus::Optimal } else { SolveStatus::Feasible };
    }
    Ok(sol)
}
