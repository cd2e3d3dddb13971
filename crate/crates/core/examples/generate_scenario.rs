//! Seeded channel generation: geometry, pathloss and the text dump format.

use risbeam::channel::{dump_channels, generate_scenario, load_channels, pathloss, ScenarioSpec};
use risbeam::model::{Deployment, SystemConfig};

fn main() -> risbeam::Result<()> {
    let mut config = SystemConfig::new(3, 4);
    config.deployment = Deployment::Distributed { radius_m: 100.0 };
    let scenario = generate_scenario(&ScenarioSpec::new(config.clone(), 42))?;

    for (k, pos) in scenario.user_positions.iter().enumerate() {
        let ris = scenario.ris_positions[k];
        let d = ((pos[0] - ris[0]).powi(2) + (pos[1] - ris[1]).powi(2)).sqrt();
        println!(
            "user {k}: at ({:7.1}, {:7.1}) m, own row at ({:6.1}, {:6.1}) m, pathloss {:.3e}, |g_kk|² = {:.3e}",
            pos[0],
            pos[1],
            ris[0],
            ris[1],
            pathloss(d, config.pathloss_exponent),
            scenario.channels.gain(k, k).norm_squared()
        );
    }

    let text = dump_channels(&scenario.channels);
    println!("\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    assert_eq!(load_channels(&text)?, scenario.channels);
    println!("... ({} lines, round-trips exactly)", text.lines().count());
    Ok(())
}
