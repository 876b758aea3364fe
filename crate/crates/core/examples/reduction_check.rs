//! Dense N-level evolution against the two-level reduction.

use nhqa::{integrate, integrate_full, AnnealParams, IntegratorConfig, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegratorConfig {
        output_samples: 201,
        ..Default::default()
    };
    for (n, delta, tau) in [
        (4usize, 0.0, 20.0),
        (8, 0.01, 50.0),
        (16, 0.05, 80.0),
        (64, 0.02, 200.0),
    ] {
        let p = AnnealParams::with_items(2.0, delta, tau, n as u64)?;
        let s = Schedule::linear(p);
        let full = integrate_full(n, n / 2, &s, &cfg)?;
        let reduced = integrate(&p, &s, &cfg)?;
        let worst = full
            .reduced
            .iter()
            .zip(&reduced.amplitudes)
            .map(|(a, b)| (a.0 - b.0).norm().max((a.1 - b.1).norm()))
            .fold(0.0, f64::max);
        println!(
            "N = {n:>3}  delta = {delta:<5} P_tau = {:.10}  max |dc| = {worst:.2e}  leakage = {:.2e}",
            full.final_transition(),
            full.max_leakage()
        );
    }
    Ok(())
}
