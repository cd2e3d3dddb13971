//! Semidefinite relaxation lower bound, Gaussian randomization, and how the
//! extracted sum power improves with the number of candidates.

use risbeam::channel::{generate_scenario, ScenarioSpec};
use risbeam::dualmethod::{solve_dual_method, DualMethodOptions};
use risbeam::model::SystemConfig;
use risbeam::powerctl::PowerControlOptions;
use risbeam::sdp::SdpOptions;
use risbeam::sdr::{extract_rank_one, solve_relaxation};

fn main() -> risbeam::Result<()> {
    env_logger::init();
    let (k, n) = (4, 8);
    let config = SystemConfig::new(k, n);
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), 11))?;
    let channels = &scenario.channels;

    let start = std::time::Instant::now();
    let relax = solve_relaxation(channels, &config, &SdpOptions::default())?;
    println!("K = {k}, N = {n}");
    println!("relaxation value   {:.6e} W  ({} IPM iterations, {:.2?})", relax.value, relax.sdp_iterations, start.elapsed());
    let ratios: Vec<String> = relax.rank_one_ratios().iter().map(|r| format!("{r:.4}")).collect();
    println!("λ_max / trace      [{}]", ratios.join(", "));

    let power = PowerControlOptions::default();
    for samples in [1, 10, 100, 1000] {
        let sol = extract_rank_one(&relax.matrices, channels, &config, samples, 0, &power)?;
        println!(
            "{samples:>5} candidates  {:.6e} W  (status {}, best candidate {})",
            sol.sum_power_w,
            sol.status,
            sol.diagnostic("best_candidate").unwrap_or(f64::NAN)
        );
    }
    let dm = solve_dual_method(channels, &config, &DualMethodOptions::default())?;
    println!("dual method        {:.6e} W", dm.sum_power_w);
    Ok(())
}
