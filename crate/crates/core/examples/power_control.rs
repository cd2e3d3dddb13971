//! Power control for fixed (MRT) phases: the fixed-point iteration from zero
//! next to the direct linear solve.

use risbeam::baselines::mrt_phase;
use risbeam::channel::{generate_scenario, ScenarioSpec};
use risbeam::model::SystemConfig;
use risbeam::powerctl::{build_gain_table, direct_solve, fixed_point_traced, spectral_radius, PowerControlOptions};

fn main() -> risbeam::Result<()> {
    let config = SystemConfig::new(4, 16);
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), 3))?;
    let table = build_gain_table(&scenario.channels, &mrt_phase(&scenario.channels))?;
    println!("spectral radius of D C: {:.4}", spectral_radius(&table, &config.sinr_targets));

    let mut sums = Vec::new();
    let fp = fixed_point_traced(&table, &config.sinr_targets, config.noise_power, &PowerControlOptions::default(), |p| {
        sums.push(p.iter().sum::<f64>())
    })?;
    for (i, s) in sums.iter().enumerate().take(8) {
        println!("iteration {i:2}: sum power {s:.6e} W");
    }
    println!(
        "converged after {} iterations (absolute rule met after {})",
        fp.iterations, fp.iterations_to_eps
    );

    let direct = direct_solve(&table, &config.sinr_targets, config.noise_power)?;
    let rel = fp
        .powers
        .as_slice()
        .iter()
        .zip(direct.as_slice())
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    println!("direct solve sum power {:.6e} W, max relative difference {rel:.1e}", direct.sum());
    Ok(())
}
