//! Single-user received power with all-ones and MRT phases as N grows:
//! Monte Carlo against the exact moments and the printed large-N constant.

use risbeam::analysis::{loglog_slope, scaling_law_exact, scaling_law_printed, scaling_law_trial, ScalingMode, PRINTED_MRT_CONSTANT};

fn main() -> risbeam::Result<()> {
    let (rho, p0, trials) = (1.0, 1.0, 100_000);
    let mut ones = Vec::new();
    let mut mrt = Vec::new();
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}", "N", "ones (MC)", "N ρ P0", "MRT (MC)", "exact", "printed");
    for (i, n) in [8usize, 32, 128].into_iter().enumerate() {
        let a = scaling_law_trial(n, rho, p0, ScalingMode::AllOnes, trials, 100 + i as u64)?;
        let m = scaling_law_trial(n, rho, p0, ScalingMode::Mrt, trials, 200 + i as u64)?;
        println!(
            "{n:>5} {:>12.2} {:>12.2} {:>12.1} {:>12.1} {:>12.1}",
            a.mean,
            scaling_law_exact(n, rho, p0, ScalingMode::AllOnes),
            m.mean,
            scaling_law_exact(n, rho, p0, ScalingMode::Mrt),
            scaling_law_printed(n, rho, p0)
        );
        ones.push((n as f64, a.mean));
        mrt.push((n as f64, m.mean));
    }
    println!("log-log slopes: all-ones {:.3}, MRT {:.3}", loglog_slope(&ones), loglog_slope(&mrt));
    println!("quadratic constant: π/4 = {:.4}, printed {:.4}", std::f64::consts::FRAC_PI_4, PRINTED_MRT_CONSTANT);
    Ok(())
}
