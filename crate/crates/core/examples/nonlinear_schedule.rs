//! The arctan profile f(t): its shape, its rate, and the anneal it drives.

use nhqa::{integrate, make_params, IntegratorConfig, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = make_params(2.0, 7.5e-5, 5.5e4, 40)?;
    let s = Schedule::nonlinear(p)?;
    println!("{:>6} {:>16} {:>16}", "t/tau", "f", "df/dt");
    for i in 0..=10 {
        let t = p.tau() * i as f64 / 10.0;
        let f = s.profile_f(t)?;
        println!(
            "{:>6.2} {f:>16.10} {:>16.6e}",
            i as f64 / 10.0,
            s.profile_rate(f)?
        );
    }
    let tr = integrate(&p, &s, &IntegratorConfig::default())?;
    println!(
        "P_tau = {:.6e}, P_s = {:.6e}",
        tr.final_transition(),
        tr.final_survival()
    );
    Ok(())
}
