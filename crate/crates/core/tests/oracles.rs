//! Checks against values computed outside this crate: an external conic
//! solver run frozen here, closed forms worked by hand, and brute force.

mod common;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use risbeam::analysis::{energy_efficiency, EnergyModel};
use risbeam::baselines::{mrt_phase, solve_mrt, zf_phase, ZfOptions};
use risbeam::channel::{pathloss, raw_fading, ris_row_position};
use risbeam::dualmethod::{solve_dual_method, solve_dual_problem, DualMethodOptions};
use risbeam::model::{
    dbm_to_watts, sinr, validate, BeamformingSolution, CVector, ChannelSet, Deployment, PhaseBeamformer, PowerAllocation,
    SolveStatus, SystemConfig,
};
use risbeam::powerctl::PowerControlOptions;
use risbeam::sdp::{
    assemble_dual_problem, sdr_param_count, solve, LmiBlock, SdpOptions, SdpProblem, SdpStatus, Sense, SparseHermitian,
};
use risbeam::sdr::{solve_relaxation, solve_sdr, SdrOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fixed_config() -> SystemConfig {
    let mut cfg = SystemConfig::new(3, 4).with_noise(1.0);
    cfg.sinr_targets = common::FIXED_TARGETS.to_vec();
    cfg
}

/// Optimal value of the fixed instance from an independent conic solver
/// (two solvers agreed to 1.2e-8).
const FROZEN_OPTIMUM: f64 = 0.330_152_7;
/// Optimal per-user multipliers, which coincide with the optimal powers.
const FROZEN_POWERS: [f64; 3] = [0.078_131_57, 0.140_887_85, 0.111_133_29];

#[test]
fn dual_objective_matches_frozen_value() {
    let (dual, sol) = solve_dual_problem(&common::fixed_instance(), &fixed_config(), &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    let dual = dual.unwrap();
    assert_relative_eq!(dual.dual_objective, FROZEN_OPTIMUM, max_relative = 1e-6);
    for (a, b) in dual.alpha.iter().zip(FROZEN_POWERS) {
        assert_relative_eq!(*a, b, max_relative = 1e-5);
    }
}

#[test]
fn relaxation_matches_frozen_value() {
    let r = solve_relaxation(&common::fixed_instance(), &fixed_config(), &SdpOptions::default()).unwrap();
    assert_relative_eq!(r.value, FROZEN_OPTIMUM, max_relative = 1e-6);
    for (p, b) in r.powers.iter().zip(FROZEN_POWERS) {
        assert_relative_eq!(*p, b, max_relative = 1e-5);
    }
}

#[test]
fn dual_method_attains_frozen_bound() {
    let sol = solve_dual_method(&common::fixed_instance(), &fixed_config(), &DualMethodOptions::default()).unwrap();
    assert!(sol.status.is_feasible());
    assert!(sol.sum_power_w >= FROZEN_OPTIMUM * (1.0 - 1e-6));
    assert_relative_eq!(sol.sum_power_w, FROZEN_OPTIMUM, max_relative = 1e-4);
}

fn sym(rows: [[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |r, col| rows[r][col])
}

fn as_hermitian(m: &DMatrix<f64>) -> SparseHermitian {
    SparseHermitian::from_dense_upper(&m.map(|x| c(x, 0.0)))
}

/// `max bᵀy  s.t.  C + Σ y_i A_i ⪰ 0` built so that `y*` is optimal:
/// `C + Σ y*_i A_i = S*` is singular with null vector `u`, and
/// `b_i = -uᵀ A_i u` makes `X* = u uᵀ` a dual certificate with
/// `tr(C X*) = bᵀ y*`.
#[test]
fn certified_four_variable_sdp() {
    let a = [
        DMatrix::<f64>::identity(3, 3),
        sym([[1.0, 0.5, 0.0], [0.5, -1.0, 0.2], [0.0, 0.2, 0.0]]),
        sym([[0.0, 0.0, 1.0], [0.0, 2.0, -0.3], [1.0, -0.3, 0.5]]),
        sym([[-0.4, 1.0, 0.1], [1.0, 0.0, 0.0], [0.1, 0.0, 1.5]]),
    ];
    let v = Vector3::new(1.0, 2.0, -1.0);
    let w = Vector3::new(0.5, -1.0, 2.0);
    let s_star = DMatrix::from_column_slice(3, 3, (v * v.transpose() + w * w.transpose()).as_slice());
    let u = v.cross(&w).normalize();
    let u = DMatrix::from_column_slice(3, 1, u.as_slice());
    let y_star = [0.3, -0.2, 0.5, 0.1];
    let mut cmat = s_star;
    for (ai, yi) in a.iter().zip(y_star) {
        cmat -= ai * yi;
    }
    let b: Vec<f64> = a.iter().map(|ai| -(u.transpose() * ai * &u)[(0, 0)]).collect();
    let optimum: f64 = b.iter().zip(y_star).map(|(bi, yi)| bi * yi).sum();
    assert_relative_eq!(optimum, (u.transpose() * &cmat * &u)[(0, 0)], epsilon = 1e-12);

    let mut p = SdpProblem::new((0..4).map(|i| format!("y{i}")).collect(), Sense::Maximize);
    p.objective = b;
    let mut block = LmiBlock::new(3);
    block.constant = as_hermitian(&cmat);
    for (i, ai) in a.iter().enumerate() {
        block.add_term(i, as_hermitian(ai));
    }
    p.lmi_blocks.push(block);
    let sol = solve(&p, &SdpOptions::default()).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.objective - optimum).abs() <= 1e-6, "{} vs {optimum}", sol.objective);
}

#[test]
fn single_user_single_unit_dual_value() {
    // |g|² = 1, Γ = 2, σ² = 1: the optimal power is Γσ²/|g|² = 2.
    let ch = ChannelSet::from_fn(1, 1, |_, _, _| c(0.6, 0.8)).unwrap();
    let cfg = SystemConfig::new(1, 1).with_target(2.0).with_noise(1.0);
    let (dual, _) = solve_dual_problem(&ch, &cfg, &SdpOptions::default()).unwrap();
    assert_relative_eq!(dual.unwrap().dual_objective, 2.0, max_relative = 1e-7);
}

#[test]
fn default_size_assembly_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ch = common::random_channels(&mut rng, 8, 20);
    let p = assemble_dual_problem(&ch, &[2.0; 8], 1.0).unwrap();
    assert_eq!(p.num_vars(), 8 * 20 + 8);
    assert_eq!(p.scalar_constraints.len(), 16);
    assert_eq!(p.lmi_blocks.len(), 8);
    assert!(p.lmi_blocks.iter().all(|b| b.dim == 20));
    // K Hermitian N×N matrices (N² real parameters each) plus K powers.
    assert_eq!(sdr_param_count(8, 20), 8 * 400 + 8);
}

#[test]
fn energy_efficiency_by_hand() {
    let cfg = SystemConfig::new(2, 3).with_target(3.0);
    let mut sol = BeamformingSolution::failed(PhaseBeamformer::ones(2, 3), SolveStatus::Feasible);
    sol.sum_power_w = 0.5;
    let model = EnergyModel {
        amplifier_inverse_efficiency: 2.0,
        bs_circuit_power_w: 1.0,
        user_circuit_power_w: 0.25,
        ris_element_power_w: 0.125,
        bandwidth_hz: 10.0,
    };
    // Rate 2 · 10 · log2(4) = 40; power 2·0.5 + 1 + 2·0.25 + 6·0.125 = 3.25.
    assert_relative_eq!(energy_efficiency(&sol, &cfg, &model), 40.0 / 3.25, max_relative = 1e-14);
    sol.sum_power_w = f64::INFINITY;
    assert_eq!(energy_efficiency(&sol, &cfg, &model), 0.0);
}

#[test]
fn sinr_worked_examples() {
    // One user, N = 2, g = [1, 1], aligned phases: |g^H θ|² = 4, p = 4, σ² = 1.
    let ch = ChannelSet::from_fn(1, 2, |_, _, _| c(1.0, 0.0)).unwrap();
    let g = sinr(&ch, &PhaseBeamformer::ones(1, 2), &PowerAllocation::new(vec![4.0]).unwrap(), 1.0).unwrap();
    assert_relative_eq!(g[0], 16.0, max_relative = 1e-15);

    // Two users, unit gains everywhere, N = 1, p = 1, σ² = 0.5: 1 / 1.5.
    let ch = ChannelSet::from_fn(2, 1, |_, _, _| c(1.0, 0.0)).unwrap();
    let g = sinr(&ch, &PhaseBeamformer::ones(2, 1), &PowerAllocation::new(vec![1.0, 1.0]).unwrap(), 0.5).unwrap();
    assert_relative_eq!(g[0], 2.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(g[1], 2.0 / 3.0, max_relative = 1e-15);
}

#[test]
fn unit_conversions_and_geometry() {
    assert_relative_eq!(dbm_to_watts(30.0), 1.0, max_relative = 1e-15);
    assert_relative_eq!(dbm_to_watts(-114.0), 3.981_071_705_534_97e-15, max_relative = 1e-12);
    assert_relative_eq!(pathloss(1.0, 3.0), 10f64.powf(-3.76), max_relative = 1e-14);
    assert_relative_eq!(pathloss(0.2, 3.0), 10f64.powf(-3.76), max_relative = 1e-14);
    assert_relative_eq!(pathloss(10.0, 2.0), 10f64.powf(-5.76), max_relative = 1e-14);
    let [x, y] = ris_row_position(Deployment::Distributed { radius_m: 100.0 }, 1, 4);
    assert!(x.abs() < 1e-12 && (y - 100.0).abs() < 1e-12, "({x}, {y})");
}

#[test]
fn fading_moments_monte_carlo() {
    let n = 200_000;
    let z = raw_fading(n, 2.0, 17).unwrap();
    let power = z.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    let mean = z.iter().sum::<Complex64>() / n as f64;
    let pseudo = z.iter().map(|v| v * v).sum::<Complex64>() / n as f64;
    assert!((power - 2.0).abs() < 0.02 * 2.0, "E|z|² = {power}");
    assert!(mean.norm() < 0.02, "E z = {mean}");
    assert!(pseudo.norm() < 0.02 * 2.0, "E z² = {pseudo}");
}

/// All 64² phase pairs on a 6-bit grid (first entry fixed to 1 since a
/// common rotation changes nothing): nulling `[1, 1]` while serving
/// `[1, -1]` is best done by `θ = [1, -1]`, with gain 2.
#[test]
fn zf_matches_grid_search() {
    let ch = ChannelSet::from_fn(2, 2, |k, i, n| match (k, i) {
        (0, 0) => c(if n == 0 { 1.0 } else { -1.0 }, 0.0),
        (1, 0) => c(1.0, 0.0),
        _ => c(0.3, 0.1 * n as f64),
    })
    .unwrap();
    let levels = 64;
    let mut best = 0.0f64;
    for l in 0..levels {
        let t = CVector::from_vec(vec![c(1.0, 0.0), Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 / levels as f64)]);
        if ch.gain(1, 0).dotc(&t).norm() < 1e-9 {
            best = best.max(ch.gain(0, 0).dotc(&t).norm());
        }
    }
    assert_relative_eq!(best, 2.0, epsilon = 1e-12);
    let r = zf_phase(&ch, 0, &ZfOptions::default());
    assert!(r.leakage < 1e-3, "leakage {}", r.leakage);
    assert!(ch.gain(0, 0).dotc(&r.theta).norm() >= best * (1.0 - 1e-3));
}

#[test]
fn harder_targets_cost_more_power() {
    let ch = common::fixed_instance();
    let power = |g: f64| {
        let cfg = SystemConfig::new(3, 4).with_noise(1.0).with_target(g);
        solve_dual_method(&ch, &cfg, &DualMethodOptions::default()).unwrap().sum_power_w
    };
    assert!(power(4.0) > power(2.0));
}

#[test]
fn more_randomization_samples_never_hurt() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ch = common::random_channels(&mut rng, 3, 8);
    let cfg = SystemConfig::new(3, 8).with_noise(1.0).with_target(1.0);
    let run = |samples| {
        let opts = SdrOptions {
            num_samples: samples,
            seed: 4,
            ..Default::default()
        };
        solve_sdr(&ch, &cfg, &opts).unwrap()
    };
    let (one, many) = (run(1), run(1000));
    assert!(many.status.is_feasible());
    if one.status.is_feasible() {
        assert!(many.sum_power_w <= one.sum_power_w * (1.0 + 1e-9));
    }
}

#[test]
fn mrt_aligns_every_direct_gain() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ch = common::random_channels(&mut rng, 3, 5);
    let theta = mrt_phase(&ch);
    for k in 0..3 {
        let g = ch.gain(k, k);
        let inner = g.dotc(theta.phase(k));
        let l1: f64 = g.iter().map(|z| z.norm()).sum();
        assert_relative_eq!(inner.re, l1, max_relative = 1e-12);
        assert!(inner.im.abs() < 1e-12 * l1);
    }
    let cfg = SystemConfig::new(3, 5).with_noise(1e-3).with_target(0.5);
    let sol = solve_mrt(&ch, &cfg, &PowerControlOptions::default()).unwrap();
    if sol.status.is_feasible() {
        assert!(validate(&sol, &cfg, &ch, 1e-8).passed());
    }
}

#[test]
fn validation_flags_broken_solutions() {
    let ch = ChannelSet::from_fn(1, 2, |_, _, _| c(1.0, 0.0)).unwrap();
    let cfg = SystemConfig::new(1, 2).with_noise(1.0).with_target(1.0);
    let sol = solve_mrt(&ch, &cfg, &PowerControlOptions::default()).unwrap();
    assert!(validate(&sol, &cfg, &ch, 1e-9).passed());

    let mut half = sol.clone();
    half.phases = PhaseBeamformer::new_unchecked(vec![CVector::from_vec(vec![c(0.5, 0.0), c(1.0, 0.0)])]).unwrap();
    let report = validate(&half, &cfg, &ch, 1e-9);
    let modulus = report.check("unit_modulus").unwrap();
    assert!(!modulus.passed);
    assert_relative_eq!(modulus.residual, 0.5, epsilon = 1e-15);

    let mut weak = sol.clone();
    weak.powers = sol.powers.scaled(0.9);
    weak.sum_power_w = weak.powers.sum();
    assert!(!validate(&weak, &cfg, &ch, 1e-6).check("sinr").unwrap().passed);
}
