//! Parses an experiment configuration, runs it in memory and prints the
//! CSV and the summary. Pass a config path to run that file instead.

use risbeam::experiment::{run_rows, summarize, write_csv, ExperimentConfig};

const DEFAULT: &str = "
[system]
num_users = 2
units_per_user = 3K
noise = -114dBm
sinr_target = 3dB

[scenario]
seed = 4

[run]
methods = DM, MRT, ZF
trials = 2

[sweep]
parameter = num_users
values = 2, 3
";

fn main() -> risbeam::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let cfg = ExperimentConfig::parse(&text)?;
    let rows = run_rows(&cfg)?;
    write_csv(&rows, std::io::stdout())?;
    println!();
    print!("{}", summarize(&rows, 0).render());
    Ok(())
}
