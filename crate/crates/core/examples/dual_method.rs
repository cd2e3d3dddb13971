//! Dual method on a default scenario (K = 8 users, N = 20 units each),
//! compared against MRT and ZF phases on the same channels.

use risbeam::baselines::{solve_mrt, solve_zf, ZfOptions};
use risbeam::channel::{generate_scenario, ScenarioSpec};
use risbeam::dualmethod::{solve_dual_method, DualMethodOptions};
use risbeam::model::{validate, watts_to_dbm, SystemConfig};

fn main() -> risbeam::Result<()> {
    env_logger::init();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let config = SystemConfig::default();
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), seed))?;
    let channels = &scenario.channels;

    let opts = DualMethodOptions::default();
    let start = std::time::Instant::now();
    let dm = solve_dual_method(channels, &config, &opts)?;
    let elapsed = start.elapsed();
    let mrt = solve_mrt(channels, &config, &opts.power)?;
    let zf = solve_zf(channels, &config, &ZfOptions::default(), &opts.power)?;

    println!("K = {}, N = {}, seed = {seed}", config.num_users, config.units_per_user);
    for (name, sol) in [("DM", &dm), ("MRT", &mrt), ("ZF", &zf)] {
        let dbm = watts_to_dbm(sol.sum_power_w).map(|d| format!("{d:8.3} dBm")).unwrap_or_else(|_| "       - dBm".into());
        println!("{name:>4}: {:<11} {dbm}  valid = {}", sol.status.as_str(), validate(sol, &config, channels, 1e-6).passed());
    }
    println!("dual objective   {:.6e} W", dm.diagnostic("dual_objective_w").unwrap_or(f64::NAN));
    println!("duality gap      {:.3e}", dm.diagnostic("duality_gap_rel").unwrap_or(f64::NAN));
    println!("SDP iterations   {} ({:.2?})", dm.diagnostic("sdp_iterations").unwrap_or(f64::NAN), elapsed);
    println!("norm-scaled recovery: max ||θ|-1| = {:.3}, sum power {:.4e} W",
        dm.diagnostic("norm_scaled_modulus_dev").unwrap_or(f64::NAN),
        dm.diagnostic("norm_scaled_sum_power_w").unwrap_or(f64::NAN));
    Ok(())
}
