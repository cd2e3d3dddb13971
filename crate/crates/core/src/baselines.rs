//! Phase beamformers that ignore (MRT) or null (ZF) cross-user interference,
//! and the shared power-control completion step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::hermitian_pinv;
use crate::model::{self, BeamformingSolution, CVector, ChannelSet, PhaseBeamformer, SolveStatus, SystemConfig};
use crate::powerctl::{build_gain_table, fixed_point, PowerControlOptions};

/// Runs power control on fixed phases. Infeasible power control is reported
/// through the status rather than as an error.
pub fn solve_with_phases(
    phases: PhaseBeamformer,
    channels: &ChannelSet,
    config: &SystemConfig,
    opts: &PowerControlOptions,
) -> Result<BeamformingSolution> {
    config.validate()?;
    channels.check_dims(config.num_users, config.units_per_user)?;
    let table = build_gain_table(channels, &phases)?;
    match fixed_point(&table, &config.sinr_targets, config.noise_power, opts) {
        Ok(fp) => {
            let sinrs = model::sinr(channels, &phases, &fp.powers, config.noise_power)?;
            let mut sol = BeamformingSolution {
                sum_power_w: fp.powers.sum(),
                phases,
                powers: fp.powers,
                sinrs,
                status: SolveStatus::Feasible,
                diagnostics: Default::default(),
            };
            sol.diagnostics.insert("iterations".into(), fp.iterations as f64);
            sol.diagnostics.insert("iterations_to_eps".into(), fp.iterations_to_eps as f64);
            Ok(sol)
        }
        Err(Error::Infeasible(msg)) => {
            log::debug!("power control infeasible: {msg}");
            Ok(BeamformingSolution::failed(phases, SolveStatus::Infeasible))
        }
        Err(Error::DegenerateChannel { user }) => {
            log::debug!("user {user} has zero direct gain under the given phases");
            Ok(BeamformingSolution::failed(phases, SolveStatus::Infeasible))
        }
        Err(e) => Err(e),
    }
}

/// `θ_kn = [g_kk]_n / |[g_kk]_n|`, so `g_kk^H θ_k = Σ_n |[g_kk]_n|`. Zero
/// entries get phase 1.
pub fn mrt_phase(channels: &ChannelSet) -> PhaseBeamformer {
    let vectors = (0..channels.num_users())
        .map(|k| {
            let g = channels.gain(k, k);
            if g.iter().any(|z| z.norm() == 0.0) {
                log::warn!("user {k} has zero direct-channel entries; their MRT phase is set to 1");
            }
            model::unit_modulus(g)
        })
        .collect();
    PhaseBeamformer::new_unchecked(vectors).expect("channel vectors share one length")
}

pub fn solve_mrt(channels: &ChannelSet, config: &SystemConfig, opts: &PowerControlOptions) -> Result<BeamformingSolution> {
    solve_with_phases(mrt_phase(channels), channels, config, opts)
}

/// Necessary condition for exact unit-modulus nulling of `g`:
/// `2 max_n |g_n| <= Σ_n |g_n|`.
pub fn nulling_possible(g: &CVector) -> bool {
    let max = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sum: f64 = g.iter().map(|z| z.norm()).sum();
    2.0 * max <= sum * (1.0 + 1e-12)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZfFeasibility {
    /// `table[k][i]` tests `g_ki`; the diagonal is `true`.
    pub table: Vec<Vec<bool>>,
    pub all_pass: bool,
}

/// A `false` entry proves exact nulling impossible; an all-`true` table
/// proves nothing.
pub fn zf_feasibility(channels: &ChannelSet) -> ZfFeasibility {
    let k = channels.num_users();
    let table: Vec<Vec<bool>> = (0..k).map(|u| (0..k).map(|i| i == u || nulling_possible(channels.gain(u, i))).collect()).collect();
    let all_pass = table.iter().flatten().all(|b| *b);
    ZfFeasibility { table, all_pass }
}

#[derive(Clone, Debug)]
pub struct ZfState {
    /// Orthogonal projector onto the complement of the span of `G_k`.
    pub projector: DMatrix<Complex64>,
    /// Columns `g_ik`, `i ≠ k`.
    pub cross: DMatrix<Complex64>,
    pub v: CVector,
    pub lambda: f64,
}

impl ZfState {
    /// `Z_k = I - G_k (G_k^H G_k)^† G_k^H` with `v` initialised to `Z_k g_kk`.
    pub fn new(channels: &ChannelSet, k: usize, lambda: f64) -> Self {
        let n = channels.units();
        let others: Vec<usize> = (0..channels.num_users()).filter(|&i| i != k).collect();
        let cross = DMatrix::from_fn(n, others.len(), |r, c| channels.gain(others[c], k)[r]);
        let projector = if others.is_empty() {
            DMatrix::identity(n, n)
        } else {
            let gram = cross.adjoint() * &cross;
            DMatrix::identity(n, n) - &cross * hermitian_pinv(&gram) * cross.adjoint()
        };
        let v = &projector * channels.gain(k, k);
        Self { projector, cross, v, lambda }
    }

    pub fn idempotency_residual(&self) -> f64 {
        (&self.projector * &self.projector - &self.projector).camax()
    }

    /// Largest `|[Z_k g_ik]_n| / ‖g_ik‖` over the cross channels.
    pub fn nulling_residual(&self) -> f64 {
        (0..self.cross.ncols())
            .map(|c| {
                let g = self.cross.column(c);
                let norm = g.norm();
                if norm == 0.0 {
                    0.0
                } else {
                    (&self.projector * g).camax() / norm
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZfOptions {
    pub lambda: f64,
    /// Stop when the objective changes by at most `tol · max(1, |objective|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Random `v` initialisation instead of `Z_k g_kk`.
    pub init_seed: Option<u64>,
}

impl Default for ZfOptions {
    fn default() -> Self {
        Self {
            lambda: 1e3,
            tol: 1e-10,
            max_iter: 1000,
            init_seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZfResult {
    pub theta: CVector,
    /// Penalized objective after every full iteration, starting with the
    /// value at the initial point.
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// `max_{i≠k} |g_ik^H θ_k|` in the units of the channels.
    pub leakage: f64,
}

/// Penalized objective `Re(g^H Z v) - λ ‖θ - Z v‖²`.
fn zf_objective(g: &CVector, z: &DMatrix<Complex64>, v: &CVector, theta: &CVector, lambda: f64) -> f64 {
    let zv = z * v;
    g.dotc(&zv).re - lambda * (theta - &zv).norm_squared()
}

/// Penalized alternating optimization for user `k`.
///
/// `g_kk` is rescaled to unit RMS entry magnitude before iterating so that
/// `λ` has the same meaning at every channel scale; `trace` is in those units.
/// The output is rotated so that `g_kk^H θ_k` is real and nonnegative.
pub fn zf_phase(channels: &ChannelSet, k: usize, opts: &ZfOptions) -> ZfResult {
    let n = channels.units();
    let mut state = ZfState::new(channels, k, opts.lambda);
    let raw = channels.gain(k, k);
    let rms = raw.norm() / (n as f64).sqrt();
    let g = if rms > 0.0 { raw / Complex64::new(rms, 0.0) } else { raw.clone() };
    let z = &state.projector;
    state.v = match opts.init_seed {
        None => z * &g,
        Some(seed) => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let r = CVector::from_fn(n, |_, _| {
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            z * r
        }
    };
    let lambda = opts.lambda;
    let mut theta = model::unit_modulus(&g);
    let theta_step = |theta: &CVector, v: &CVector| -> CVector {
        let x = z * v;
        CVector::from_fn(n, |i, _| {
            let m = x[i].norm();
            if m > 0.0 {
                x[i] / m
            } else {
                theta[i]
            }
        })
    };
    theta = theta_step(&theta, &state.v);
    let mut trace = vec![zf_objective(&g, z, &state.v, &theta, lambda)];
    let g_half = z * &g / Complex64::new(2.0 * lambda, 0.0);
    let mut iterations = 0;
    for _ in 0..opts.max_iter {
        iterations += 1;
        state.v = &g_half + z * &theta;
        theta = theta_step(&theta, &state.v);
        let obj = zf_objective(&g, z, &state.v, &theta, lambda);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if (obj - prev).abs() <= opts.tol * obj.abs().max(1.0) {
            break;
        }
    }
    let align = raw.dotc(&theta);
    if align.norm() > 0.0 {
        theta *= align.conj() / align.norm();
    }
    let leakage = (0..state.cross.ncols()).map(|c| state.cross.column(c).dotc(&theta).norm()).fold(0.0, f64::max);
    ZfResult {
        theta,
        trace,
        iterations,
        leakage,
    }
}

/// ZF phases for every user followed by power control. `max_leakage` is
/// `max_{k, i≠k} |g_ik^H θ_k| / (‖g_ik‖ √N)`, the fraction of the largest
/// possible coherent cross gain that survives.
pub fn solve_zf(
    channels: &ChannelSet,
    config: &SystemConfig,
    zf: &ZfOptions,
    power: &PowerControlOptions,
) -> Result<BeamformingSolution> {
    let feasibility = zf_feasibility(channels);
    if !feasibility.all_pass {
        log::warn!("exact unit-modulus nulling is impossible for at least one user pair; leakage will remain");
    }
    let n = channels.units();
    let mut thetas = Vec::with_capacity(channels.num_users());
    let mut leakage: f64 = 0.0;
    let mut iterations = 0usize;
    for k in 0..channels.num_users() {
        let res = zf_phase(channels, k, zf);
        for i in (0..channels.num_users()).filter(|&i| i != k) {
            let g = channels.gain(i, k);
            let norm = g.norm() * (n as f64).sqrt();
            if norm > 0.0 {
                leakage = leakage.max(g.dotc(&res.theta).norm() / norm);
            }
        }
        iterations = iterations.max(res.iterations);
        thetas.push(res.theta);
    }
    let phases = PhaseBeamformer::new_unchecked(thetas)?;
    let mut sol = solve_with_phases(phases, channels, config, power)?;
    sol.diagnostics.insert("max_leakage".into(), leakage);
    sol.diagnostics.insert("zf_iterations".into(), iterations as f64);
    sol.diagnostics.insert("zf_necessary_condition".into(), if feasibility.all_pass { 1.0 } else { 0.0 });
    Ok(sol)
}
