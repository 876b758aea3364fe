//! Integrator against the parabolic cylinder solution, its large-|z0|
//! ratio, and the Landau-Zener limit.

use nhqa::analytic::weber_transition_probability;
use nhqa::{
    asymptotic_ratio, integrate, landau_zener_probability, make_params, weber_params,
    IntegratorConfig, Schedule,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>8} {:>9} {:>22} {:>22} {:>14}",
        "log2n", "delta", "tau", "integrator", "weber", "asymptotic"
    );
    for (log2n, delta, tau) in [
        (10, 0.0, 100.0),
        (10, 0.0, 1000.0),
        (12, 0.01, 500.0),
        (40, 0.0, 1.5e4),
    ] {
        let p = make_params(2.0, delta, tau, log2n)?;
        let numeric = integrate(&p, &Schedule::linear(p), &IntegratorConfig::default())?;
        let exact = weber_transition_probability(&p)?;
        let asym = asymptotic_ratio(&weber_params(&p)?)?;
        println!(
            "{log2n:>6} {delta:>8} {tau:>9} {:>22.15e} {exact:>22.15e} {:>14.6e}{}",
            numeric.final_transition(),
            asym.transition_probability(),
            if asym.regime_warning {
                " (small |z0|)"
            } else {
                ""
            }
        );
        if delta == 0.0 {
            println!(
                "{:>40} {:.6e}",
                "Landau-Zener",
                landau_zener_probability(&p)?
            );
        }
    }
    Ok(())
}
