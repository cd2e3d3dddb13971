//! Semidefinite relaxation baseline with Gaussian randomization.
//!
//! The relaxation replaces `W_k = p_k θ_k θ_k^H` by any `W_k ⪰ 0` with a
//! constant diagonal, so its optimum is a lower bound on the minimum sum
//! power. Feasible phases are then drawn from `CN(0, W_k / p_k)` and
//! projected onto the unit circle.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::baselines::solve_with_phases;
use crate::error::{Error, Result};
use crate::linalg::principal_eigenvector;
use crate::model::{self, BeamformingSolution, CVector, ChannelSet, PhaseBeamformer, SolveStatus, SystemConfig};
use crate::powerctl::{build_gain_table, direct_solve, PowerControlOptions};
use crate::sdp::{self, SdpOptions, SdpStatus};

#[derive(Clone, Debug)]
pub struct Relaxation {
    pub matrices: Vec<DMatrix<Complex64>>,
    pub powers: Vec<f64>,
    /// Optimal relaxed sum power, watts.
    pub value: f64,
    pub sdp_iterations: usize,
}

impl Relaxation {
    /// `λ_max / trace` of each `W_k`; one means rank one.
    pub fn rank_one_ratios(&self) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|w| {
                let tr = w.trace().re;
                if tr > 0.0 {
                    principal_eigenvector(w).0 / tr
                } else {
                    1.0
                }
            })
            .collect()
    }
}

/// Solves the relaxation on data rescaled as in the dual method
/// (noise 1, powers in units of `s`) and maps the result back to watts.
pub fn solve_relaxation(channels: &ChannelSet, config: &SystemConfig, opts: &SdpOptions) -> Result<Relaxation> {
    config.validate()?;
    channels.check_dims(config.num_users, config.units_per_user)?;
    let mut per_user: Vec<f64> = (0..channels.num_users())
        .map(|k| {
            let amp: f64 = channels.gain(k, k).iter().map(|z| z.norm()).sum();
            config.sinr_targets[k] * config.noise_power / (amp * amp)
        })
        .filter(|v| v.is_finite() && *v > 0.0)
        .collect();
    per_user.sort_by(f64::total_cmp);
    let s = per_user.get(per_user.len() / 2).copied().unwrap_or(1.0);
    let scaled = channels.scaled(s.sqrt() / config.noise_power.sqrt());
    let (problem, layout) = sdp::assemble_sdr_problem(&scaled, &config.sinr_targets, 1.0)?;
    let sol = sdp::solve(&problem, opts)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(Error::Infeasible("relaxation has no feasible point".into())),
        SdpStatus::Unbounded => return Err(Error::NumericalFailure("relaxation reported unbounded".into())),
        SdpStatus::NumericalFailure => {
            return Err(Error::NumericalFailure(sol.message.unwrap_or_else(|| "relaxation solve failed".into())));
        }
    }
    let (mats, powers) = sdp::sdr_unpack(&layout, &sol.values);
    let factor = Complex64::new(s, 0.0);
    Ok(Relaxation {
        matrices: mats.into_iter().map(|w| w * factor).collect(),
        value: s * sol.objective,
        powers: powers.into_iter().map(|p| s * p).collect(),
        sdp_iterations: sol.iterations,
    })
}

/// `W / p` factored as `L L^H` with `L = V diag(√λ⁺)`; eigenvalues below
/// `1e-12 λ_max` count as zero.
fn covariance_factor(w: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let p = w.trace().re / w.nrows() as f64;
    let eig = SymmetricEigen::new(w.clone());
    let floor = 1e-12 * eig.eigenvalues.max();
    let mut l = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let scale = if *lambda > floor && p > 0.0 { (lambda / p).sqrt() } else { 0.0 };
        l.column_mut(j).scale_mut(scale);
    }
    l
}

/// Candidate `j` of the randomization. Candidate 0 uses principal
/// eigenvectors; candidate `j >= 1` draws from ChaCha20 seeded with `seed` on
/// stream `j`, so a larger sample count extends a smaller one.
pub fn candidate_phases(matrices: &[DMatrix<Complex64>], factors: &[DMatrix<Complex64>], seed: u64, j: usize) -> PhaseBeamformer {
    let vectors: Vec<CVector> = if j == 0 {
        matrices.iter().map(|w| model::unit_modulus(&principal_eigenvector(w).1)).collect()
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        factors
            .iter()
            .map(|l| {
                let n = l.nrows();
                let z = CVector::from_fn(n, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                });
                model::unit_modulus(&(l * z))
            })
            .collect()
    };
    PhaseBeamformer::new_unchecked(vectors).expect("relaxation matrices share one size")
}

/// Best of `num_samples` randomized candidates (candidate 0 always included),
/// ranked by the sum power of the direct power-control solve. Ties keep the
/// lower index.
pub fn extract_rank_one(
    matrices: &[DMatrix<Complex64>],
    channels: &ChannelSet,
    config: &SystemConfig,
    num_samples: usize,
    seed: u64,
    power: &PowerControlOptions,
) -> Result<BeamformingSolution> {
    channels.check_dims(config.num_users, config.units_per_user)?;
    if matrices.len() != config.num_users || matrices.iter().any(|w| w.nrows() != config.units_per_user) {
        return Err(Error::DimensionMismatch("relaxation matrices do not match the configuration".into()));
    }
    let factors: Vec<_> = matrices.iter().map(covariance_factor).collect();
    let mut best: Option<(f64, usize, PhaseBeamformer)> = None;
    let mut feasible = 0usize;
    for j in 0..num_samples.max(1) {
        let phases = candidate_phases(matrices, &factors, seed, j);
        let table = build_gain_table(channels, &phases)?;
        let Ok(p) = direct_solve(&table, &config.sinr_targets, config.noise_power) else {
            continue;
        };
        feasible += 1;
        let total = p.sum();
        if best.as_ref().is_none_or(|(b, _, _)| total < *b) {
            best = Some((total, j, phases));
        }
    }
    let Some((_, index, phases)) = best else {
        let mut sol = BeamformingSolution::failed(PhaseBeamformer::ones(config.num_users, config.units_per_user), SolveStatus::Infeasible);
        sol.diagnostics.insert("candidates_feasible".into(), 0.0);
        return Ok(sol);
    };
    let mut sol = solve_with_phases(phases, channels, config, power)?;
    sol.diagnostics.insert("candidates_feasible".into(), feasible as f64);
    sol.diagnostics.insert("best_candidate".into(), index as f64);
    Ok(sol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdrOptions {
    pub sdp: SdpOptions,
    pub power: PowerControlOptions,
    pub num_samples: usize,
    pub seed: u64,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self {
            sdp: SdpOptions::default(),
            power: PowerControlOptions::default(),
            num_samples: 1000,
            seed: 0,
        }
    }
}

/// Relaxation followed by randomized extraction. Diagnostics include
/// `relaxation_value_w` and `sdp_iterations`. A relaxation that has no
/// feasible point yields status `Infeasible`.
pub fn solve_sdr(channels: &ChannelSet, config: &SystemConfig, opts: &SdrOptions) -> Result<BeamformingSolution> {
    let relax = match solve_relaxation(channels, config, &opts.sdp) {
        Ok(r) => r,
        Err(Error::Infeasible(msg)) => {
            log::debug!("SDR: {msg}");
            return Ok(BeamformingSolution::failed(
                PhaseBeamformer::ones(config.num_users, config.units_per_user),
                SolveStatus::Infeasible,
            ));
        }
        Err(Error::NumericalFailure(msg)) => {
            log::warn!("SDR relaxation failed: {msg}");
            return Ok(BeamformingSolution::failed(
                PhaseBeamformer::ones(config.num_users, config.units_per_user),
                SolveStatus::NumericalFailure,
            ));
        }
        Err(e) => return Err(e),
    };
    let mut sol = extract_rank_one(&relax.matrices, channels, config, opts.num_samples, opts.seed, &opts.power)?;
    sol.diagnostics.insert("relaxation_value_w".into(), relax.value);
    sol.diagnostics.insert("sdp_iterations".into(), relax.sdp_iterations as f64);
    Ok(sol)
}
