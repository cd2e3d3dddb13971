//! Post-hoc b-bit quantization of dual-method phases and its power cost.

use risbeam::analysis::quantize_phases;
use risbeam::baselines::solve_with_phases;
use risbeam::channel::{generate_scenario, ScenarioSpec};
use risbeam::dualmethod::{solve_dual_method, DualMethodOptions};
use risbeam::model::{watts_to_dbm, SystemConfig};

fn main() -> risbeam::Result<()> {
    let config = SystemConfig::new(4, 16);
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), 9))?;
    let ch = &scenario.channels;
    let opts = DualMethodOptions::default();
    let dm = solve_dual_method(ch, &config, &opts)?;
    println!("continuous: {:.3} dBm", watts_to_dbm(dm.sum_power_w)?);
    for bits in [1, 2, 3, 4, 6, 8] {
        let q = solve_with_phases(quantize_phases(&dm.phases, bits)?, ch, &config, &opts.power)?;
        if q.status.is_feasible() {
            println!(
                "{bits} bit(s):  {:.3} dBm  (+{:.2}%)",
                watts_to_dbm(q.sum_power_w)?,
                100.0 * (q.sum_power_w / dm.sum_power_w - 1.0)
            );
        } else {
            println!("{bits} bit(s):  {}", q.status);
        }
    }
    Ok(())
}
