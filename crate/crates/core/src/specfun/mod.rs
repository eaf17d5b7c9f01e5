//! Special functions: Li₂, Bloch–Wigner D, Lobachevsky Λ and Faddeev's Φ_b.

mod dilog;
mod faddeev;

pub use dilog::{bloch_wigner, dilog, lobachevsky, lobachevsky_deriv};
pub(crate) use faddeev::log1p_exp;
pub use faddeev::{faddeev, log_faddeev, semiclassical_log_faddeev, Faddeev};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// The quantisation parameter `b` together with `ħ = (b + 1/b)⁻²` and `c_b = i(b + 1/b)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstant {
    pub b: f64,
    pub hbar: f64,
    pub c_b: C64,
}

impl CouplingConstant {
    pub fn new(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Domain(format!("b must be positive, got {b}")));
        }
        let q = b + 1.0 / b;
        Ok(Self {
            b,
            hbar: 1.0 / (q * q),
            c_b: C64::new(0.0, 0.5 * q),
        })
    }

    /// `b + 1/b`, the width of the strip of analyticity of log Φ_b.
    pub fn q(&self) -> f64 {
        self.b + 1.0 / self.b
    }

    pub fn sqrt_hbar(&self) -> f64 {
        1.0 / self.q()
    }
}

/// Accuracy knobs for the Φ_b quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrecisionConfig {
    /// Target absolute error of log Φ_b.
    pub abs_tol: f64,
    /// Hard cap on the truncation point of the w-integral.
    pub contour_truncation: f64,
    /// Gauss–Legendre nodes per panel.
    pub quad_points: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            contour_truncation: 2000.0,
            quad_points: 16,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.contour_truncation > 0.0 && self.quad_points >= 4) {
            return Err(Error::Config(format!("invalid precision settings {self:?}")));
        }
        Ok(())
    }
}
