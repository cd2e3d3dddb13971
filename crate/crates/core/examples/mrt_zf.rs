//! MRT and zero-forcing baselines: the nulling feasibility test, the
//! penalized ZF iteration, and leakage against the penalty weight.

use num_complex::Complex64;
use risbeam::baselines::{solve_mrt, solve_zf, zf_feasibility, zf_phase, ZfOptions};
use risbeam::channel::{generate_scenario, ScenarioSpec};
use risbeam::model::{watts_to_dbm, ChannelSet, CVector, SystemConfig};
use risbeam::powerctl::PowerControlOptions;

fn main() -> risbeam::Result<()> {
    // A cross channel with one dominant entry cannot be nulled by unit-modulus phases.
    let c = |v: f64| Complex64::new(v, 0.0);
    let lopsided = ChannelSet::new(vec![
        vec![CVector::from_vec(vec![c(1.0), c(1.0), c(1.0)]), CVector::from_vec(vec![c(1.0), c(1.0), c(3.0)])],
        vec![CVector::from_vec(vec![c(1.0), c(1.0), c(1.0)]), CVector::from_vec(vec![c(1.0), c(1.0), c(1.0)])],
    ])?;
    println!("nulling possible on the lopsided example: {}", zf_feasibility(&lopsided).all_pass);

    let config = SystemConfig::new(3, 12);
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), 5))?;
    let ch = &scenario.channels;
    println!("nulling possible on the random scenario: {}", zf_feasibility(ch).all_pass);

    let run = zf_phase(ch, 0, &ZfOptions::default());
    println!("user 0: {} iterations, objective {:.4} -> {:.4}", run.iterations, run.trace[0], run.trace.last().unwrap());
    for lambda in [1e1, 1e3, 1e5] {
        let r = zf_phase(ch, 0, &ZfOptions { lambda, ..Default::default() });
        println!("  λ = {lambda:>6.0e}: normalized leakage {:.3e}", r.leakage);
    }

    let power = PowerControlOptions::default();
    let mrt = solve_mrt(ch, &config, &power)?;
    let zf = solve_zf(ch, &config, &ZfOptions::default(), &power)?;
    for (name, sol) in [("MRT", mrt), ("ZF", zf)] {
        let dbm = watts_to_dbm(sol.sum_power_w).map(|d| format!("{d:.2} dBm")).unwrap_or_else(|_| "-".into());
        println!("{name:>3}: {} {dbm}", sol.status);
    }
    Ok(())
}
