//! Minimum gap of the effective Hamiltonian, with and without dissipation.

use nhqa::{make_params, min_gap_scan, spectrum, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>10} {:>14} {:>14}",
        "log2n", "delta", "gap_min", "2/sqrt(N)"
    );
    for log2n in [8, 16, 24, 40] {
        for delta in [0.0, 1e-3, 0.01] {
            let p = make_params(2.0, delta, 1.0, log2n)?;
            let s = Schedule::linear(p);
            let (t, gap) = min_gap_scan(&p, &s, 4000)?;
            let n = p.n_items() as f64;
            println!(
                "{log2n:>6} {delta:>10.1e} {gap:>14.6e} {:>14.6e}",
                2.0 / n.sqrt()
            );
            if log2n == 40 && delta == 0.0 {
                let sp = spectrum(&p, s.coupling(t));
                println!(
                    "       crossing at s = {t:.6}, eigenvalues {:.12} and {:.12}",
                    sp.e0.re, sp.e1.re
                );
            }
        }
    }
    Ok(())
}
