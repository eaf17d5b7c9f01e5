//! Semiclassical sweep `b ↦ 2πħ log|J|` and its extrapolation to `ħ = 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{integrate_jx_2d, integrate_jx_3d, ContourSpec, GridConfig};
use crate::specfun::{CouplingConstant, PrecisionConfig};
use crate::triangulation::ShapeStructure;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "2d")]
    TwoDim,
    #[serde(rename = "3d")]
    ThreeDim,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2d" => Ok(Method::TwoDim),
            "3d" => Ok(Method::ThreeDim),
            _ => Err(Error::Config(format!("unknown method {s:?}, expected 2d or 3d"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub b: f64,
    pub hbar: f64,
    pub log_abs_j: f64,
    /// `2πħ log|J|`.
    pub volume_estimate: f64,
    /// Relative quadrature error of `J`.
    pub err_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub method: Method,
    pub rows: Vec<SweepRow>,
    /// `v₀` of the fit `v₀ + c₁ ħ log ħ + c₂ ħ`.
    pub extrapolated_volume: f64,
    pub fit: [f64; 3],
}

/// Evaluate `J` on the contour of `alpha` for each `b` (strictly decreasing) and fit the limit.
pub fn sweep_volume_limit(
    b_list: &[f64],
    method: Method,
    alpha: &ShapeStructure,
    prec: &PrecisionConfig,
    grid: &GridConfig,
) -> Result<SweepTable> {
    if b_list.len() < 3 {
        return Err(Error::Config("the sweep needs at least three values of b".into()));
    }
    if b_list.windows(2).any(|w| !(w[1] < w[0])) || b_list.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
        return Err(Error::Config(format!(
            "b values must lie in (0, 1] and decrease: {b_list:?}"
        )));
    }
    let mut rows = Vec::with_capacity(b_list.len());
    for &b in b_list {
        let cc = CouplingConstant::new(b)?;
        let r = match method {
            Method::ThreeDim => integrate_jx_3d(cc, &ContourSpec::three_dim(alpha, cc)?, prec, grid)?,
            Method::TwoDim => integrate_jx_2d(cc, &ContourSpec::two_dim(alpha, cc)?, prec, grid)?,
        };
        rows.push(SweepRow {
            b,
            hbar: cc.hbar,
            log_abs_j: r.log_abs(),
            volume_estimate: 2.0 * PI * cc.hbar * r.log_abs(),
            err_bound: r.rel_err,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.hbar, r.volume_estimate)).collect();
    let fit = fit_volume_limit(&pts)?;
    Ok(SweepTable {
        method,
        rows,
        extrapolated_volume: fit[0],
        fit,
    })
}

/// Least-squares `(v₀, c₁, c₂)` for `v(ħ) = v₀ + c₁ ħ log ħ + c₂ ħ`.
pub fn fit_volume_limit(points: &[(f64, f64)]) -> Result<[f64; 3]> {
    if points.len() < 3 {
        return Err(Error::Domain("need at least three points to fit".into()));
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, j| {
        let h = points[i].0;
        match j {
            0 => 1.0,
            1 => h * h.ln(),
            _ => h,
        }
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let x = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Domain(format!("fit failed: {e}")))?;
    Ok([x[0], x[1], x[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_model() {
        let pts: Vec<(f64, f64)> = [0.16, 0.12, 0.09, 0.07, 0.055]
            .iter()
            .map(|&h: &f64| (h, -4.5 + 1.3 * h * h.ln() - 0.7 * h))
            .collect();
        let f = fit_volume_limit(&pts).unwrap();
        assert!((f[0] + 4.5).abs() < 1e-10 && (f[1] - 1.3).abs() < 1e-9 && (f[2] + 0.7).abs() < 1e-9);
    }

    #[test]
    fn bad_b_lists_are_refused() {
        let a = ShapeStructure::ideal_73_start();
        let (p, g) = (PrecisionConfig::default(), GridConfig::default());
        assert!(sweep_volume_limit(&[0.3, 0.4, 0.5], Method::TwoDim, &a, &p, &g).is_err());
        assert!(sweep_volume_limit(&[0.5, 0.4], Method::TwoDim, &a, &p, &g).is_err());
        assert!("4d".parse::<Method>().is_err());
    }
}
