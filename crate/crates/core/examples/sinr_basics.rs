//! SINR evaluation and constraint checking on a hand-built two-user system.

use num_complex::Complex64;
use risbeam::model::{sinr, validate, BeamformingSolution, ChannelSet, PhaseBeamformer, PowerAllocation, SolveStatus, SystemConfig};

fn main() -> risbeam::Result<()> {
    // g[k][i]: RIS row i towards user k.
    let channels = ChannelSet::from_fn(2, 2, |k, i, n| {
        if k == i {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.5, if n == 0 { 0.5 } else { -0.5 })
        }
    })?;
    let phases = PhaseBeamformer::from_angles(&[vec![0.0, 0.0], vec![0.0, std::f64::consts::PI / 2.0]])?;
    let powers = PowerAllocation::new(vec![0.4, 0.6])?;
    let noise = 1.0;

    let gammas = sinr(&channels, &phases, &powers, noise)?;
    println!("SINR per user: {gammas:.4?}");

    let config = SystemConfig::new(2, 2).with_target(1.0).with_noise(noise);
    let solution = BeamformingSolution {
        sinrs: gammas.clone(),
        sum_power_w: powers.sum(),
        phases,
        powers,
        status: SolveStatus::Feasible,
        diagnostics: Default::default(),
    };
    for check in validate(&solution, &config, &channels, 1e-6).checks {
        println!("{:<20} passed = {:<5} residual = {:.3e}", check.name, check.passed, check.residual);
    }
    Ok(())
}
