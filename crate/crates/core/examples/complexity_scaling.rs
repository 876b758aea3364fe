//! Shortest anneal time reaching P_tau = 0.9 as N grows, with and without
//! dissipation.

use nhqa::cli::{scaling, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for delta in [0.0, 0.01] {
        let mut base = RunConfig::default();
        base.params.delta = delta;
        base.integrator.output_samples = 2;
        let grid: Vec<u32> = if delta == 0.0 {
            vec![8, 10, 12, 14]
        } else {
            vec![14, 18, 22, 26]
        };
        let report = scaling(&base, &grid, 0.9, 4).map_err(|e| e.to_string())?;
        println!("delta = {delta}, regressor {:?}", report.regressor);
        for row in &report.rows {
            println!(
                "  log2n = {:>2}  tau* = {:>12.4}  reference = {:>12.4}",
                row.log2n,
                row.tau_star.unwrap_or(f64::NAN),
                row.reference_time
            );
        }
        if let Some(fit) = report.fit {
            println!("  slope = {:.4}, R^2 = {:.4}", fit.slope, fit.r_squared);
        }
    }
    Ok(())
}
