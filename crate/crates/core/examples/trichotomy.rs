//! A small trichotomy sweep. Use the CLI for the full default grid.

use polylab::experiments::{run_trichotomy, ExperimentConfig};

fn main() -> polylab::Result<()> {
    let config = ExperimentConfig {
        alphas: vec![1.0, 2.0],
        epsilons: vec![0.25, 0.125],
        elements: [8, 8],
        elements_per_period: 4,
        n_eigs: 3,
        ..ExperimentConfig::default()
    };
    let report = run_trichotomy(&config)?;
    println!("K = {:.6}", report.k_value);
    print!("{}", report.gap_table());
    Ok(())
}
