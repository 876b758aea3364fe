//! Transition and survival probability across dissipation strengths.

use nhqa::cli::{sweep, RunConfig, SweepAxis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = RunConfig::default();
    base.params.tau = 2000.0;
    base.params.log2n = 16;
    base.integrator.output_samples = 2;
    let grid = [0.0, 1e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1];
    let result = sweep(&base, SweepAxis::Delta, &grid, 4).map_err(|e| e.to_string())?;
    print!("{}", result.to_csv(false));
    Ok(())
}
