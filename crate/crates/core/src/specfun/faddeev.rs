//! Faddeev's quantum dilogarithm.
//!
//! Inside the strip `|Im z| < (b + 1/b)/2` the defining contour integral is folded onto the
//! positive half-line. The odd part of the integrand cancels, and the small semicircle around
//! `w = 0` contributes its residue terms in closed form:
//!
//! ```text
//! log Φ_b(z) = iπz²/2 + iπ(b² + b⁻²)/24
//!              − (i/2) ∫₀^∞ [ sin(2zw) / (w sinh(bw) sinh(w/b)) − 2z/w² ] dw
//! ```
//!
//! The bracket is analytic at `w = 0` and decays like `exp(−(b + 1/b − 2|Im z|) w)`.
//! Points near or outside the edge of the strip are first moved inwards with the functional
//! equation in steps of `i·min(b, 1/b)`.

use std::f64::consts::PI;

use super::{dilog, CouplingConstant, PrecisionConfig};
use crate::integrator::quadrature::gauss_legendre;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Evaluator for Φ_b at fixed `b` and precision, with the quadrature rule precomputed.
#[derive(Debug, Clone)]
pub struct Faddeev {
    cc: CouplingConstant,
    prec: PrecisionConfig,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Faddeev {
    pub fn new(cc: CouplingConstant, prec: PrecisionConfig) -> Result<Self> {
        prec.validate()?;
        let (nodes, weights) = gauss_legendre(prec.quad_points);
        Ok(Self {
            cc,
            prec,
            nodes,
            weights,
        })
    }

    pub fn coupling(&self) -> CouplingConstant {
        self.cc
    }

    pub fn precision(&self) -> PrecisionConfig {
        self.prec
    }

    /// `min(b, 1/b)`: the step of the functional equation and the spacing of poles.
    fn beta(&self) -> f64 {
        self.cc.b.min(1.0 / self.cc.b)
    }

    /// Φ_b(z).
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.check_pole(z)?;
        let l = self.log_unguarded(z)?;
        let v = l.exp();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("faddeev"));
        }
        Ok(v)
    }

    /// log Φ_b(z) on the branch that tends to 0 as `Re z → −∞`.
    pub fn log(&self, z: C64) -> Result<C64> {
        self.check_pole(z)?;
        self.check_zero(z)?;
        self.log_unguarded(z)
    }

    fn log_unguarded(&self, z: C64) -> Result<C64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("faddeev argument"));
        }
        let beta = self.beta();
        let edge = 0.5 * self.cc.q() - 0.5 * beta;
        let mut w = z;
        let mut acc = C64::new(0.0, 0.0);
        // Φ(z) = Φ(z − iβ) / (1 + e^{2πβz − iπβ²})
        while w.im > edge {
            acc -= log1p_exp(2.0 * PI * beta * w - I * (PI * beta * beta));
            w -= I * beta;
        }
        // Φ(z) = (1 + e^{2πβz + iπβ²}) Φ(z + iβ)
        while w.im < -edge {
            acc += log1p_exp(2.0 * PI * beta * w + I * (PI * beta * beta));
            w += I * beta;
        }
        let v = acc + self.log_strip(w);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("log_faddeev"));
        }
        Ok(v)
    }

    fn log_strip(&self, z: C64) -> C64 {
        let (b, q) = (self.cc.b, self.cc.q());
        let beta = self.beta();
        let kappa = q - 2.0 * z.im.abs();
        let t = self.truncation(kappa, beta);
        let width = (2.0 * beta).min(1.0).min(4.0 / (2.0 * z.re.abs() + 1e-300));
        let panels = (t / width).ceil().max(1.0) as usize;
        let h = t / panels as f64;
        let mut sum = C64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            let mut part = C64::new(0.0, 0.0);
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                part += bracket(z, mid + 0.5 * h * x, b) * *wt;
            }
            sum += part * (0.5 * h);
        }
        // exact tail of the −2z/w² counterterm beyond t
        let integral = sum - 2.0 * z / t;
        I * PI * z * z * 0.5 + I * (PI * (b * b + 1.0 / (b * b)) / 24.0) - 0.5 * I * integral
    }

    // Smallest T with envelope(T)/κ below abs_tol/10.
    fn truncation(&self, kappa: f64, beta: f64) -> f64 {
        let target = 0.1 * self.prec.abs_tol;
        let env = |w: f64| {
            4.0 * (-kappa * w).exp() / (w * (-(-2.0 * beta * w).exp_m1()) * (-(-2.0 * w / beta).exp_m1()) * kappa)
        };
        let mut t = 1.0;
        while env(t) > target && t < self.prec.contour_truncation {
            t *= 1.25;
        }
        t.min(self.prec.contour_truncation)
    }

    fn check_pole(&self, z: C64) -> Result<()> {
        let d = self.lattice_distance(z - self.cc.c_b);
        if d < 1e3 * self.prec.abs_tol {
            return Err(Error::Pole {
                z: z.to_string(),
                distance: d,
            });
        }
        Ok(())
    }

    fn check_zero(&self, z: C64) -> Result<()> {
        let d = self.lattice_distance(-z - self.cc.c_b);
        if d < 1e3 * self.prec.abs_tol {
            return Err(Error::Pole {
                z: z.to_string(),
                distance: d,
            });
        }
        Ok(())
    }

    // Distance from u to {i(mb + n/b) : m, n ≥ 0}.
    fn lattice_distance(&self, u: C64) -> f64 {
        if u.im < -1.0 || u.re.abs() > 1.0 {
            return f64::INFINITY;
        }
        let (b, ib) = (self.cc.b, 1.0 / self.cc.b);
        let mut best = f64::INFINITY;
        let mmax = (u.im.max(0.0) / b).ceil() as usize + 1;
        for m in 0..=mmax {
            let base = m as f64 * b;
            if base > u.im + 1.0 {
                break;
            }
            let n = ((u.im - base) / ib).round().max(0.0);
            let im = base + n * ib;
            best = best.min(C64::new(u.re, u.im - im).norm());
        }
        best
    }
}

/// `sin(2zw) / (w sinh(bw) sinh(w/b)) − 2z/w²`, evaluated without cancellation near 0 and
/// without overflow for large w.
fn bracket(z: C64, w: f64, b: f64) -> C64 {
    if w <= 1.0 {
        let v = 2.0 * z * w;
        let am1 = sinhc_m1(b * w);
        let bm1 = sinhc_m1(w / b);
        let ab = (1.0 + am1) * (1.0 + bm1);
        let s = 1.0 / ab;
        let sm1 = -(am1 + bm1 + am1 * bm1) / ab;
        (sin_m_id(v) * s + v * sm1) / (w * w * w)
    } else {
        let q = b + 1.0 / b;
        let e_plus = (2.0 * I * z * w - q * w).exp();
        let e_minus = (-2.0 * I * z * w - q * w).exp();
        let den = -(-2.0 * b * w).exp_m1() * -(-2.0 * w / b).exp_m1();
        (e_plus - e_minus) * (4.0 / (w * den)) / (2.0 * I) - 2.0 * z / (w * w)
    }
}

// sinh(u)/u − 1
fn sinhc_m1(u: f64) -> f64 {
    if u.abs() > 0.5 {
        return u.sinh() / u - 1.0;
    }
    let u2 = u * u;
    let mut term = u2 / 6.0;
    let mut sum = 0.0f64;
    let mut k = 4.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        sum += term;
        term *= u2 / (k * (k + 1.0));
        k += 2.0;
    }
    sum
}

// sin(v) − v
fn sin_m_id(v: C64) -> C64 {
    if v.norm() > 0.5 {
        return v.sin() - v;
    }
    let v2 = v * v;
    let mut term = -v * v2 / 6.0;
    let mut sum = C64::new(0.0, 0.0);
    let mut k = 4.0;
    for _ in 0..12 {
        sum += term;
        term *= -v2 / (k * (k + 1.0));
        k += 2.0;
    }
    sum
}

/// Principal `Log(1 + e^s)`, stable for large `Re s`.
pub(crate) fn log1p_exp(s: C64) -> C64 {
    let im = s.im - 2.0 * PI * (s.im / (2.0 * PI)).round();
    let s = C64::new(s.re, im);
    if s.re > 30.0 {
        let tail = (-s).exp();
        s + tail - 0.5 * tail * tail
    } else {
        (C64::new(1.0, 0.0) + s.exp()).ln()
    }
}

/// Φ_b(z) at default precision.
pub fn faddeev(z: C64, cc: CouplingConstant) -> Result<C64> {
    Faddeev::new(cc, PrecisionConfig::default())?.eval(z)
}

/// log Φ_b(z) at default precision, on the branch vanishing as `Re z → −∞`.
pub fn log_faddeev(z: C64, cc: CouplingConstant) -> Result<C64> {
    Faddeev::new(cc, PrecisionConfig::default())?.log(z)
}

/// Leading semiclassical term `Li₂(−e^y) / (2πi b²)` of log Φ_b(y / 2πb).
pub fn semiclassical_log_faddeev(y: C64, cc: CouplingConstant) -> Result<C64> {
    if y.im.abs() == PI {
        return Err(Error::Domain(format!("Im y = ±π puts −e^y on the Li2 cut (y = {y})")));
    }
    let li = dilog(-y.exp())?;
    Ok(li / (2.0 * PI * I * cc.b * cc.b))
}
