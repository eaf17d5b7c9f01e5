//! Volume maximisation over the angle-structure polytope.
//!
//! The affine hull of the polytope is parametrised as `x = x₀ + N u` with an orthonormal
//! nullspace basis `N`. Positivity is enforced by a log barrier whose weight is annealed to
//! zero, and each barrier stage is solved by damped Newton in `u`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::specfun::{lobachevsky, lobachevsky_deriv};
use crate::triangulation::{ShapeStructure, Triangulation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Stop once the projected gradient of 𝒱 is below this.
    pub grad_tol: f64,
    /// Newton iterations allowed per barrier stage.
    pub max_iters: usize,
    /// Decreasing barrier weights.
    pub barrier: Vec<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 200,
            barrier: vec![1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12],
        }
    }
}

/// 𝒱(α) = Σ Λ(2π·angle) over all angles.
pub fn volume_functional(alpha: &ShapeStructure) -> f64 {
    alpha
        .shapes
        .iter()
        .map(|s| lobachevsky(2.0 * PI * s.a) + lobachevsky(2.0 * PI * s.b) + lobachevsky(2.0 * PI * s.c))
        .sum()
}

fn grad_v(x: &DVector<f64>) -> DVector<f64> {
    x.map(|a| 2.0 * PI * lobachevsky_deriv(2.0 * PI * a))
}

fn hess_v_diag(x: &DVector<f64>) -> DVector<f64> {
    x.map(|a| -4.0 * PI * PI / (2.0 * PI * a).tan())
}

/// Affine description of a set of angle structures: equalities `A x = rhs` plus `x > 0`.
#[derive(Debug, Clone)]
pub struct AnglePolytope {
    a: DMatrix<f64>,
    rhs: DVector<f64>,
    basis: DMatrix<f64>,
    particular: DVector<f64>,
    rank: usize,
}

impl AnglePolytope {
    /// Per-tetrahedron sums 1/2 and every edge weight equal to `target` (radians).
    pub fn new(t: &Triangulation, target: impl Fn(&str) -> f64) -> Result<Self> {
        Self::with_extra(t, target, &[])
    }

    /// As [`Self::new`] with additional rows `r · x = v`.
    pub fn with_extra(t: &Triangulation, target: impl Fn(&str) -> f64, extra: &[(Vec<f64>, f64)]) -> Result<Self> {
        let n = 3 * t.num_tetrahedra();
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for k in 0..t.num_tetrahedra() {
            let mut r = vec![0.0; n];
            r[3 * k..3 * k + 3].fill(1.0);
            rows.push((r, 0.5));
        }
        for e in t.edges() {
            rows.push((t.weight_row(&e.id)?, target(&e.id) / (2.0 * PI)));
        }
        rows.extend(extra.iter().cloned());
        let m = rows.len();
        let a = DMatrix::from_fn(m, n, |i, j| rows[i].0[j]);
        let rhs = DVector::from_fn(m, |i, _| rows[i].1);
        Self::from_system(a, rhs)
    }

    fn from_system(a: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        let n = a.ncols();
        let eig = (a.transpose() * &a).symmetric_eigen();
        let scale = eig.eigenvalues.amax().max(1.0);
        let null: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() < 1e-10 * scale).collect();
        let rank = n - null.len();
        let basis = DMatrix::from_fn(n, null.len(), |i, j| eig.eigenvectors[(i, null[j])]);
        let svd = a.clone().svd(true, true);
        let particular = svd
            .solve(&rhs, 1e-10)
            .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?;
        if (&a * &particular - &rhs).amax() > 1e-10 {
            return Err(Error::Infeasible);
        }
        Ok(Self {
            a,
            rhs,
            basis,
            particular,
            rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.ncols()
    }

    /// Rank of the equality system; redundant rows are tolerated.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Largest equality residual.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        (&self.a * x - &self.rhs).amax()
    }

    pub fn is_interior(&self, x: &[f64]) -> bool {
        self.residual(x) < 1e-9 && x.iter().all(|&v| v > 0.0 && v < 0.5)
    }

    /// Largest `t` with `x + t d` still in the closed polytope.
    pub fn ray_limit(&self, x: &[f64], d: &[f64]) -> f64 {
        x.iter()
            .zip(d)
            .filter(|(_, &di)| di < 0.0)
            .map(|(&xi, &di)| -xi / di)
            .fold(f64::INFINITY, f64::min)
    }

    /// Map reduced coordinates to a feasible-direction vector `N u`.
    pub fn direction(&self, u: &[f64]) -> Vec<f64> {
        (&self.basis * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    /// A strictly interior point, found by maximising the smallest angle.
    pub fn interior_point(&self) -> Result<Vec<f64>> {
        let nb = &self.basis;
        let (n, k) = (nb.nrows(), nb.ncols());
        let mut u = DVector::zeros(k);
        let x_of = |u: &DVector<f64>| &self.particular + nb * u;
        let mut s = x_of(&u).min() - 1.0;
        let mut weight = 1.0;
        for _ in 0..60 {
            for _ in 0..100 {
                let x = x_of(&u);
                let slack = x.map(|v| v - s);
                let mut g = DVector::zeros(k + 1);
                let mut h = DMatrix::zeros(k + 1, k + 1);
                g[k] = weight;
                for i in 0..n {
                    let mut gi = DVector::zeros(k + 1);
                    for j in 0..k {
                        gi[j] = nb[(i, j)];
                    }
                    gi[k] = -1.0;
                    g += &gi / slack[i];
                    h -= &gi * gi.transpose() / (slack[i] * slack[i]);
                }
                let step = match (-&h).cholesky() {
                    Some(c) => c.solve(&g),
                    None => g.clone(),
                };
                let du = step.rows(0, k).into_owned();
                let ds = step[k];
                let dx = nb * &du;
                let mut t = 1.0f64;
                for i in 0..n {
                    let rate = dx[i] - ds;
                    if rate < 0.0 {
                        t = t.min(-0.95 * slack[i] / rate);
                    }
                }
                u += &du * t;
                s += ds * t;
                if step.norm() * t < 1e-12 {
                    break;
                }
            }
            let x = x_of(&u);
            if x.min() > 0.0 && s > 0.0 {
                return Ok(x.as_slice().to_vec());
            }
            if weight > 1e12 {
                break;
            }
            weight *= 10.0;
        }
        Err(Error::Infeasible)
    }
}

/// Result of a volume maximisation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeMax {
    pub alpha: ShapeStructure,
    pub angles: Vec<f64>,
    pub volume: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Maximise 𝒱 over the angle structures of `t`. The ideal 7_3 triangulation starts from its
/// known interior point; other triangulations get a phase-one interior point first.
pub fn maximize_volume(t: &Triangulation, cfg: &OptimizerConfig) -> Result<ShapeStructure> {
    Ok(maximize_volume_report(t, cfg, None)?.alpha)
}

/// As [`maximize_volume`], returning the full report, optionally from a given start.
pub fn maximize_volume_report(
    t: &Triangulation,
    cfg: &OptimizerConfig,
    start: Option<&ShapeStructure>,
) -> Result<VolumeMax> {
    let poly = AnglePolytope::new(t, |e| t.default_target(e))?;
    let x0 = match start {
        Some(s) => s.to_flat(),
        None => {
            let p = ShapeStructure::ideal_73_start();
            if p.shapes.len() == t.num_tetrahedra() && poly.is_interior(&p.to_flat()) {
                p.to_flat()
            } else {
                poly.interior_point()?
            }
        }
    };
    maximize_on(&poly, &x0, cfg)
}

/// Barrier-Newton on an explicit polytope from an interior start.
pub fn maximize_on(poly: &AnglePolytope, x0: &[f64], cfg: &OptimizerConfig) -> Result<VolumeMax> {
    if cfg.grad_tol <= 0.0 {
        return Err(Error::Config("grad_tol must be positive".into()));
    }
    if !poly.is_interior(x0) {
        return Err(Error::Domain("start point is not an interior angle structure".into()));
    }
    let nb = poly.basis();
    let mut x = DVector::from_column_slice(x0);
    let mut iterations = 0;
    let objective = |x: &DVector<f64>, mu: f64| -> f64 {
        volume_functional(&ShapeStructure::from_flat(x.as_slice())) + mu * x.iter().map(|v| v.ln()).sum::<f64>()
    };
    let mut schedule = cfg.barrier.clone();
    if schedule.is_empty() {
        schedule.push(0.0);
    }
    for (stage, &mu) in schedule.iter().enumerate() {
        let last = stage + 1 == schedule.len();
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            let g = nb.transpose() * (grad_v(&x) + x.map(|v| mu / v));
            let stage_tol = if last { 0.1 * cfg.grad_tol } else { mu.max(cfg.grad_tol) };
            if g.norm() < stage_tol {
                converged = true;
                break;
            }
            let hd = hess_v_diag(&x) - x.map(|v| mu / (v * v));
            let h = nb.transpose() * DMatrix::from_diagonal(&hd) * nb;
            let du = match (-&h).cholesky() {
                Some(c) => c.solve(&g),
                None => g.clone(),
            };
            let dx = nb * &du;
            let mut step = 1.0f64;
            for i in 0..x.len() {
                if dx[i] < 0.0 {
                    step = step.min(-0.99 * x[i] / dx[i]);
                }
                if dx[i] > 0.0 {
                    step = step.min(0.99 * (0.5 - x[i]) / dx[i]);
                }
            }
            let f0 = objective(&x, mu);
            let slope = g.dot(&du);
            let mut accepted = false;
            for _ in 0..60 {
                let trial = &x + &dx * step;
                if objective(&trial, mu) >= f0 + 1e-4 * step * slope - 1e-15 * f0.abs() {
                    x = trial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            iterations += 1;
            if !accepted {
                // no further progress possible in floating point
                converged = true;
                break;
            }
        }
        if !converged && last {
            let g = nb.transpose() * grad_v(&x);
            return Err(Error::NonConvergence {
                what: "volume maximisation",
                iters: iterations,
                residual: g.norm(),
            });
        }
    }
    let grad_norm = (nb.transpose() * grad_v(&x)).norm();
    if grad_norm >= cfg.grad_tol {
        return Err(Error::NonConvergence {
            what: "volume maximisation",
            iters: iterations,
            residual: grad_norm,
        });
    }
    let alpha = ShapeStructure::from_flat(x.as_slice());
    Ok(VolumeMax {
        volume: volume_functional(&alpha),
        angles: x.as_slice().to_vec(),
        alpha,
        grad_norm,
        iterations,
    })
}
