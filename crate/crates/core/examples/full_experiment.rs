//! Runs the bundled experiment configuration end to end.
//!
//! `cargo run --example full_experiment -- [config.toml] [output dir]`

use std::path::PathBuf;

use lexmatch::experiment::{run_experiment, ExperimentConfig, TABLE_FILE};

fn main() -> lexmatch::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment/experiment.toml"));
    let output = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("lexmatch-experiment"));

    let cfg = ExperimentConfig::load(&config)?;
    run_experiment(&cfg, &output, None)?;
    print!("{}", std::fs::read_to_string(output.join(TABLE_FILE)).expect("table written"));
    println!("outputs in {}", output.display());
    Ok(())
}
