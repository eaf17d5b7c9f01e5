//! Classical dilogarithm and the real functions built from it.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

const PI2_6: f64 = PI * PI / 6.0;

// B_{2k} / (2k+1)!, k = 1, 2, ...
const BERNOULLI_COEFFS: [f64; 18] = [
    2.777_777_777_777_777_6e-2,
    -2.777_777_777_777_778e-4,
    4.724_111_866_969_01e-6,
    -9.185_773_074_661_964e-8,
    1.897_886_998_897_1e-9,
    -4.064_761_645_144_225_6e-11,
    8.921_691_020_456_452e-13,
    -1.993_929_586_072_107_4e-14,
    4.518_980_029_619_918e-16,
    -1.035_651_761_218_124_7e-17,
    2.395_218_621_026_187e-19,
    -5.581_785_874_325_009e-21,
    1.309_150_755_418_321_3e-22,
    -3.087_419_802_426_740_3e-24,
    7.315_975_652_702_203e-26,
    -1.740_845_657_234_001e-27,
    4.157_635_644_613_9e-29,
    -9.962_148_488_284_622e-31,
];

/// Li₂ on the principal branch, cut along `[1, ∞)`.
///
/// Arguments outside the unit disc are mapped inside by the inversion relation, the half
/// `Re z > 1/2` is reflected through `z ↦ 1 − z`, and what is left is summed as a Bernoulli
/// series in `−Log(1 − z)`.
pub fn dilog(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Domain(format!("Li2 on its branch cut at {z}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("dilog argument"));
    }
    Ok(dilog_unchecked(z))
}

fn dilog_unchecked(z: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    if z.norm_sqr() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ½ Log(−z)²
        let l = (-z).ln();
        return -dilog_disc(z.inv()) - PI2_6 - 0.5 * l * l;
    }
    dilog_disc(z)
}

// |z| ≤ 1, z ≠ 1.
fn dilog_disc(z: C64) -> C64 {
    if z.re > 0.5 {
        let w = C64::new(1.0, 0.0) - z;
        return -bernoulli_series(w) + PI2_6 - z.ln() * w.ln();
    }
    bernoulli_series(z)
}

// Re z ≤ 1/2 with |z| ≤ 1, so |Log(1 − z)| < 2.
fn bernoulli_series(z: C64) -> C64 {
    let u = -(C64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut term = u * u2;
    let mut sum = u - 0.25 * u2;
    for &c in BERNOULLI_COEFFS.iter() {
        let next = sum + c * term;
        if next == sum {
            break;
        }
        sum = next;
        term *= u2;
    }
    sum
}

/// Bloch–Wigner function `D(z) = Im Li₂(z) + arg(1 − z) log|z|`, zero on the real line.
pub fn bloch_wigner(z: C64) -> f64 {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return 0.0;
    }
    let li = dilog_unchecked(z);
    li.im + (C64::new(1.0, 0.0) - z).arg() * z.norm().ln()
}

/// Lobachevsky function `Λ(x) = −∫₀ˣ log|2 sin t| dt`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // Λ is π-periodic and odd: reduce to r ∈ [−π/2, π/2].
    let r = x - PI * (x / PI).round();
    if r == 0.0 {
        return 0.0;
    }
    let sign = r.signum();
    let s = r.abs();
    0.5 * sign * dilog_unchecked(C64::from_polar(1.0, 2.0 * s)).im
}

/// Derivative `Λ′(x) = −log|2 sin x|`.
pub fn lobachevsky_deriv(x: f64) -> f64 {
    -(2.0 * x.sin()).abs().ln()
}
