//! The four captioned runs: linear sweeps with and without loss, and the
//! arctan schedule at two dissipation strengths.

use nhqa::cli::{figure, FigureId, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig::default();
    for id in [
        FigureId::Fig1Left,
        FigureId::Fig1Right,
        FigureId::Fig2,
        FigureId::Fig3,
    ] {
        let out = figure(id, &base).map_err(|e| e.to_string())?;
        let s = &out.summary;
        println!(
            "{:<10} P_tau = {:.6e}  P_s = {:.6e}  P(marked) = {:.6e}  steps = {}",
            id.name(),
            s.p_tau,
            s.p_surv,
            s.p_marked,
            s.steps_accepted
        );
    }
    Ok(())
}
