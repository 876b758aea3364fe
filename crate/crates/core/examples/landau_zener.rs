//! Hermitian sweeps across the Landau-Zener parameter nu = tau / (g N).

use nhqa::{integrate, landau_zener_probability, make_params, IntegratorConfig, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegratorConfig {
        output_samples: 2,
        ..Default::default()
    };
    for log2n in [8, 12, 16] {
        let n = 2f64.powi(log2n as i32);
        println!("N = 2^{log2n}");
        for k in 0..8 {
            let nu = 0.05 + 0.2 * k as f64;
            let g = 2.0;
            let p = make_params(g, 0.0, nu * g * n, log2n)?;
            let tr = integrate(&p, &Schedule::linear(p), &cfg)?;
            let lz = landau_zener_probability(&p)?;
            println!(
                "  nu = {nu:.2}  P_tau = {:.6}  P_marked = {:.6}  LZ = {lz:.6}",
                tr.final_transition(),
                tr.final_marked()
            );
        }
    }
    Ok(())
}
