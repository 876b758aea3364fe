//! Complex Gamma function (Lanczos, g = 7, n = 9) with reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;

// GSL / Numerical Recipes coefficient set
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Gamma(z)` for `Re z >= 0.5` (principal branch of the Lanczos form).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// Analytic continuation of Gamma to the complex plane.
pub fn complex_gamma(zc: Complex64) -> Result<Complex64> {
    if is_pole(zc) {
        return Err(Error::Pole(zc.re));
    }
    if zc.re < 0.5 {
        let s = (zc * PI).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - zc).exp()))
    } else {
        Ok(ln_gamma_right(zc).exp())
    }
}

/// `1 / Gamma(z)`, zero at the poles of Gamma.
pub fn recip_gamma(zc: Complex64) -> Complex64 {
    if is_pole(zc) {
        return Complex64::new(0.0, 0.0);
    }
    if zc.re < 0.5 {
        (zc * PI).sin() * ln_gamma_right(1.0 - zc).exp() / PI
    } else {
        (-ln_gamma_right(zc)).exp()
    }
}
