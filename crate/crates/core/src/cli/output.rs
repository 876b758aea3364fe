//! CSV writers. Every float is printed with 17 significant digits so that
//! identical runs produce byte-identical files.

use std::fmt::Write;

use crate::propagate::Trajectory;

pub const TRAJECTORY_COLUMNS: [&str; 8] = [
    "s", "t", "re_c0", "im_c0", "re_c1", "im_c1", "p_tau", "p_surv",
];
pub const SPECTRUM_COLUMNS: [&str; 5] = ["re_e0", "im_e0", "re_e1", "im_e1", "gap"];

/// Round-trip representation of `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn trajectory_csv(traj: &Trajectory, emit_spectra: bool) -> String {
    let mut out = String::new();
    let mut header: Vec<&str> = TRAJECTORY_COLUMNS.to_vec();
    if emit_spectra {
        header.extend(SPECTRUM_COLUMNS);
    }
    out.push_str(&header.join(","));
    out.push('\n');
    let tau = traj.params.tau();
    for (i, &t) in traj.times.iter().enumerate() {
        let (c0, c1) = traj.amplitudes[i];
        let mut cells = vec![
            t / tau,
            t,
            c0.re,
            c0.im,
            c1.re,
            c1.im,
            traj.transition_prob[i],
            traj.survival_prob[i],
        ];
        if emit_spectra {
            let sp = &traj.spectra[i];
            cells.extend([sp.e0.re, sp.e0.im, sp.e1.re, sp.e1.im, sp.gap_magnitude]);
        }
        let line: Vec<String> = cells.into_iter().map(num).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}
