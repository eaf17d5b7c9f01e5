//! Two-variable reduction: `V(x, y)`, its stationary points `t = eˣ` and their classification.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::specfun::dilog;
use crate::{Error, Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);

/// Coefficients (leading first) of `t³(t²−t−1)² − (1+2t)³`.
pub fn saddle_polynomial() -> [f64; 8] {
    [1.0, -2.0, -1.0, 2.0, -7.0, -12.0, -6.0, -1.0]
}

fn horner(c: &[f64], t: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c {
        dp = dp * t + p;
        p = p * t + a;
    }
    (p, dp)
}

/// All seven roots, from companion-matrix eigenvalues polished by Newton, sorted by (Re, Im).
pub fn saddle_polynomial_roots() -> Vec<C64> {
    let c = saddle_polynomial();
    let n = c.len() - 1;
    let comp = DMatrix::from_fn(n, n, |r, k| {
        if r == 0 {
            -c[k + 1] / c[0]
        } else if r == k + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<C64> = comp
        .complex_eigenvalues()
        .iter()
        .map(|&t| {
            let mut t = t;
            for _ in 0..20 {
                let (p, dp) = horner(&c, t);
                if p.norm() < 1e-15 || dp.norm() == 0.0 {
                    break;
                }
                t -= p / dp;
            }
            // clean conjugate-pair noise on real roots
            if t.im.abs() < 1e-12 {
                t.im = 0.0;
            }
            t
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// `V(x,y) = −Li₂(−eˣ) − Li₂(e^{x−y}) − 3Li₂(−e^y) − x² − y²/2`, principal branches.
pub fn reduced_potential_v(x: C64, y: C64) -> Result<C64> {
    Ok(-dilog(-x.exp())? - dilog((x - y).exp())? - 3.0 * dilog(-y.exp())? - x * x - 0.5 * y * y)
}

/// Partials of `V`, each as a sum of principal logarithms.
pub fn grad_reduced_potential_v(x: C64, y: C64) -> [C64; 2] {
    let l1 = (ONE + x.exp()).ln();
    let l2 = (ONE - (x - y).exp()).ln();
    let l3 = (ONE + y.exp()).ln();
    [l1 + l2 - 2.0 * x, -l2 + 3.0 * l3 - y]
}

fn exp_y_of_t(t: C64) -> Result<C64> {
    let den = t * t - t - 1.0;
    let ey = -(t * t + t) / den;
    if ey.norm() == 0.0 || !ey.re.is_finite() || !ey.im.is_finite() {
        return Err(Error::Domain(format!("no y with e^y = {ey} at t = {t}")));
    }
    Ok(ey)
}

/// Value of `V` at the stationary point with `eˣ = t`, written in `t`.
pub fn f_of_t(t: C64) -> Result<C64> {
    let den = -ONE - t.inv() + t;
    let lt = t.ln();
    let ly = ((-ONE - t) / den).ln();
    Ok(-lt * lt - 0.5 * ly * ly - dilog(-t)? - dilog((ONE + t - t * t) / (ONE + t))? - 3.0 * dilog((ONE + t) / den)?)
}

/// Second derivatives of `V` at a stationary value and the spectrum of their imaginary parts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SaddleClass {
    pub t: C64,
    pub exp_y: C64,
    pub exp_x_minus_y: C64,
    pub h: C64,
    pub i: C64,
    pub j: C64,
    /// Eigenvalues of `[[Im h, Im j], [Im j, Im i]]`, ascending.
    pub eigenvalues: [f64; 2],
    /// Both eigenvalues negative.
    pub admissible: bool,
    /// `Im eˣ < 0`, `Im e^y < 0` and `Im e^{x−y} > 0`.
    pub contour_condition: bool,
}

pub fn classify_saddle(t: C64) -> Result<SaddleClass> {
    let ey = exp_y_of_t(t)?;
    let exy = t / ey;
    let r = exy / (ONE - exy);
    let h = t / (ONE + t) - r - 2.0;
    let i = -r + 3.0 * ey / (ONE + ey) - 1.0;
    let j = r;
    let m = Matrix2::new(h.im, j.im, j.im, i.im);
    let ev = m.symmetric_eigen().eigenvalues;
    let (lo, hi) = if ev[0] <= ev[1] { (ev[0], ev[1]) } else { (ev[1], ev[0]) };
    Ok(SaddleClass {
        t,
        exp_y: ey,
        exp_x_minus_y: exy,
        h,
        i,
        j,
        eigenvalues: [lo, hi],
        admissible: hi < 0.0,
        contour_condition: t.im < 0.0 && ey.im < 0.0 && exy.im > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn t5() -> C64 {
        saddle_polynomial_roots().into_iter().find(|t| t.im < -1.0).unwrap()
    }

    #[test]
    fn roots_solve_the_unexpanded_equation() {
        let roots = saddle_polynomial_roots();
        assert_eq!(roots.len(), 7);
        for t in &roots {
            let lhs = t * t * t * (t * t - t - 1.0).powi(2);
            let rhs = (ONE + 2.0 * t).powi(3);
            assert!((lhs - rhs).norm() < 1e-12, "{t}");
        }
        assert!(roots.iter().any(|t| (t + 1.0).norm() < 1e-14));
        for expect in [
            c(2.712568, 0.0),
            c(-0.566231, 0.0),
            c(0.872869, 1.511780),
            c(0.872869, -1.511780),
            c(-0.446038, -0.121232),
        ] {
            assert!(roots.iter().any(|t| (t - expect).norm() < 1e-5), "{expect}");
        }
        // conjugate of the last one, not the printed −0.446083 + 0.121232i
        assert!(roots.iter().any(|t| (t - c(-0.446038, 0.121232)).norm() < 1e-5));
        assert!(roots.windows(2).all(|w| (w[0].re, w[0].im) <= (w[1].re, w[1].im)));
    }

    #[test]
    fn stationary_data_at_t5() {
        let t = t5();
        let s = classify_saddle(t).unwrap();
        assert!((s.exp_y - c(-0.537981, -1.04357)).norm() < 1e-5);
        assert!((s.exp_x_minus_y - c(0.803839, 1.25082)).norm() < 1e-5);
        assert!((s.h - c(-0.445662, -1.04125)).norm() < 1e-4);
        assert!((s.i - c(1.81348, -3.1839)).norm() < 1e-4);
        assert!((s.j - c(-0.87763, 0.780285)).norm() < 1e-4);
        assert!((s.eigenvalues[0] + 3.43793).abs() < 1e-4);
        assert!((s.eigenvalues[1] + 0.787211).abs() < 1e-4);
        assert!(s.admissible && s.contour_condition);
        let f = f_of_t(t).unwrap();
        assert!((f - c(2.884158080, -4.592125697)).norm() < 1e-8, "{f}");
        // x = Log t, y = Log e^y is a genuine stationary point of V
        let g = grad_reduced_potential_v(t.ln(), s.exp_y.ln());
        assert!(g[0].norm() < 1e-12 && g[1].norm() < 1e-12);
        let v = reduced_potential_v(t.ln(), s.exp_y.ln()).unwrap();
        assert!((v.im + crate::VOL_7_3).abs() < 1e-8);
    }

    #[test]
    fn t3_is_not_admissible() {
        let t3 = saddle_polynomial_roots()
            .into_iter()
            .find(|t| t.re < 0.0 && t.im < 0.0)
            .unwrap();
        let s = classify_saddle(t3).unwrap();
        assert!((s.h - c(-3.67157, 1.42489)).norm() < 1e-4);
        assert!((s.i - c(-3.0171, -0.961697)).norm() < 1e-4);
        assert!((s.j - c(0.948895, -1.80189)).norm() < 1e-4);
        assert!((s.eigenvalues[0] + 1.9296).abs() < 1e-4);
        assert!((s.eigenvalues[1] - 2.39278).abs() < 1e-4);
        assert!(!s.admissible);
    }

    #[test]
    fn minus_one_has_no_y() {
        assert!(classify_saddle(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn f_is_v_after_substitution() {
        let t = t5();
        for dt in [c(0.0, 0.0), c(0.05, 0.02), c(-0.03, 0.04)] {
            let tt = t + dt;
            let ey = -(tt * tt + tt) / (tt * tt - tt - 1.0);
            let v = reduced_potential_v(tt.ln(), ey.ln()).unwrap();
            assert!((f_of_t(tt).unwrap() - v).norm() < 1e-12, "{tt}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-5;
        let mut n = 0;
        while n < 20 {
            let x = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.5..-0.2));
            let y = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.5..-0.2));
            // keep the three logarithms away from their cuts
            let far = |w: C64| w.im.abs() > 0.2 || w.re < 0.5;
            if !(far(-x.exp()) && far((x - y).exp()) && far(-y.exp())) {
                continue;
            }
            n += 1;
            let g = grad_reduced_potential_v(x, y);
            let fx = (reduced_potential_v(x + h, y).unwrap() - reduced_potential_v(x - h, y).unwrap()) / (2.0 * h);
            let fy = (reduced_potential_v(x, y + h).unwrap() - reduced_potential_v(x, y - h).unwrap()) / (2.0 * h);
            assert!((fx - g[0]).norm() < 1e-6 && (fy - g[1]).norm() < 1e-6);
        }
    }
}
