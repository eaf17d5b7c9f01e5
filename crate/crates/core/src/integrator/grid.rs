//! Uniform-grid quadrature for the separable contour integrals.
//!
//! Every integrand handled here has the shape
//! `exp(f₁(t₁) + f₂(t₂) + f₃(t₃)) · kernel`, where the kernel depends on `t₁ − t₃` only
//! (through `t₂` in three dimensions). All axes share one step `h`, so the kernel lives on a
//! one-dimensional difference lattice and a grid sum costs `O(n²)` instead of `O(n³)`.
//! Each axis is evaluated in log form and shifted by its own maximum before exponentiating.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::KahanSum;
use crate::{Error, Result, C64};

/// Log of one axis factor as a function of the real coordinate.
pub type AxisFn<'a> = dyn Fn(f64) -> Result<C64> + Sync + 'a;

const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Initial step.
    pub h0: f64,
    /// Stop halving once consecutive values agree to this relative tolerance.
    pub rel_tol: f64,
    /// Maximum number of halvings.
    pub max_halvings: usize,
    /// Truncate where an axis factor has dropped by `e^{-cut}` from its maximum.
    pub cut: f64,
    /// Step of the coarse scan that locates the support.
    pub scan_step: f64,
    /// Give up if an axis has not decayed within this distance of the origin.
    pub scan_limit: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            h0: 1.0 / 16.0,
            rel_tol: 1e-6,
            max_halvings: 6,
            cut: 37.0,
            scan_step: 0.25,
            scan_limit: 400.0,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.h0 > 0.0
            && self.rel_tol > 0.0
            && self.cut > 0.0
            && self.scan_step > 0.0
            && self.scan_limit > self.scan_step;
        if !ok {
            return Err(Error::Config(format!("invalid grid settings {self:?}")));
        }
        Ok(())
    }
}

/// Outcome of a grid integration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridResult {
    /// Principal-branch logarithm of the integral.
    pub log_value: C64,
    /// Relative change between the last two step sizes.
    pub rel_err: f64,
    pub h: f64,
    /// Truncation window per axis.
    pub ranges: Vec<(f64, f64)>,
    pub points_per_axis: Vec<usize>,
    /// Largest ratio between the integrand on the window boundary and its peak.
    pub decay_ratio: f64,
    pub halvings: usize,
}

impl GridResult {
    pub fn value(&self) -> C64 {
        self.log_value.exp()
    }

    pub fn log_abs(&self) -> f64 {
        self.log_value.re
    }
}

/// Locate the window where `Re f` is within `cut` of its maximum.
pub fn find_window(f: &AxisFn, cfg: &GridConfig) -> Result<(f64, f64, f64)> {
    scan_window(|t| Ok(f(t)?.re), cfg)
}

/// Coarse scan on the lattice `k · scan_step` outward from 0 for a real log-envelope.
fn scan_window(mut env: impl FnMut(f64) -> Result<f64>, cfg: &GridConfig) -> Result<(f64, f64, f64)> {
    let s = cfg.scan_step;
    let mut pts: Vec<(f64, f64)> = vec![(0.0, env(0.0)?)];
    let mut max = pts[0].1;
    for dir in [-1.0, 1.0] {
        let mut k = 1.0;
        loop {
            let t = dir * k * s;
            if t.abs() > cfg.scan_limit {
                return Err(Error::Quadrature(format!(
                    "integrand has not decayed by |t| = {}",
                    cfg.scan_limit
                )));
            }
            let v = env(t)?;
            if v.is_nan() || v == f64::INFINITY {
                return Err(Error::NonFinite("axis integrand"));
            }
            pts.push((t, v));
            max = max.max(v);
            if v < max - cfg.cut - 4.0 && k > 4.0 {
                break;
            }
            k += 1.0;
        }
    }
    let inside: Vec<f64> = pts.iter().filter(|p| p.1 >= max - cfg.cut).map(|p| p.0).collect();
    let lo = inside.iter().cloned().fold(f64::INFINITY, f64::min) - s;
    let hi = inside.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + s;
    Ok((lo, hi, max))
}

/// Samples of one axis on `t_lo + i h`, `i = 0..=n`, refined by halving `h`.
struct Axis<'a> {
    f: &'a AxisFn<'a>,
    t_lo: f64,
    n0: usize,
    vals: Vec<C64>,
}

impl<'a> Axis<'a> {
    fn new(f: &'a AxisFn<'a>, t_lo: f64, n0: usize) -> Self {
        Self {
            f,
            t_lo,
            n0,
            vals: Vec::new(),
        }
    }

    fn n(&self, level: usize) -> usize {
        self.n0 << level
    }

    fn eval(&self, idx: &[usize], h: f64) -> Result<Vec<C64>> {
        idx.par_iter().map(|&i| (self.f)(self.t_lo + i as f64 * h)).collect()
    }

    fn refine_to(&mut self, level: usize, h: f64) -> Result<()> {
        let n = self.n(level);
        if self.vals.is_empty() {
            let idx: Vec<usize> = (0..=n).collect();
            self.vals = self.eval(&idx, h)?;
        } else {
            debug_assert_eq!(2 * (self.vals.len() - 1), n);
            let odd: Vec<usize> = (0..n / 2).map(|i| 2 * i + 1).collect();
            let new = self.eval(&odd, h)?;
            let mut merged = Vec::with_capacity(n + 1);
            for (k, v) in self.vals.iter().enumerate() {
                merged.push(*v);
                if k < new.len() {
                    merged.push(new[k]);
                }
            }
            self.vals = merged;
        }
        if self.vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("axis samples"));
        }
        Ok(())
    }

    /// Shifted exponentials and the shift.
    fn scaled(&self) -> (Vec<C64>, f64) {
        let m = self.vals.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        (self.vals.iter().map(|v| (v - m).exp()).collect(), m)
    }

    fn end_ratio(&self) -> f64 {
        let m = self.vals.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        let e = self.vals[0].re.max(self.vals[self.vals.len() - 1].re);
        (e - m).exp()
    }
}

fn windows_to_grid(windows: &[(f64, f64)], h0: f64) -> Vec<(f64, usize)> {
    windows
        .iter()
        .map(|&(lo, hi)| (lo, ((hi - lo) / h0).ceil().max(16.0) as usize))
        .collect()
}

/// Fixed-order parallel sum: rows are grouped in chunks, each chunk is summed serially and the
/// chunk totals are added in index order, so the result does not depend on the thread count.
fn ordered_row_sum(rows: usize, row: impl Fn(usize) -> C64 + Sync) -> C64 {
    let chunks: Vec<C64> = (0..rows.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = KahanSum::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(rows) {
                acc.add(row(i));
            }
            acc.value()
        })
        .collect();
    let mut acc = KahanSum::default();
    for v in chunks {
        acc.add(v);
    }
    acc.value()
}

/// `Σ_k w_k e^{iθ₀ + i k Δ}` with exact re-anchoring every 64 terms.
fn phased_sum(w: &[C64], theta0: f64, delta: f64) -> C64 {
    let step = C64::from_polar(1.0, delta);
    let mut acc = KahanSum::default();
    let mut ph = C64::new(0.0, 0.0);
    for (k, wk) in w.iter().enumerate() {
        if k % 64 == 0 {
            ph = C64::from_polar(1.0, theta0 + k as f64 * delta);
        }
        acc.add(wk * ph);
        ph *= step;
    }
    acc.value()
}

/// Three-dimensional integral `∫ e^{f₁(t₁)+f₂(t₂)+f₃(t₃)} e^{2πiσ t₂ (t₃ − t₁)} dt`.
pub struct Separable3<'a> {
    pub f: [&'a AxisFn<'a>; 3],
    pub sigma: f64,
}

impl<'a> Separable3<'a> {
    pub fn integrate(&self, cfg: &GridConfig) -> Result<GridResult> {
        cfg.validate()?;
        let windows = self
            .f
            .iter()
            .map(|f| find_window(*f, cfg).map(|w| (w.0, w.1)))
            .collect::<Result<Vec<_>>>()?;
        self.integrate_on(&windows, cfg)
    }

    pub fn integrate_on(&self, windows: &[(f64, f64)], cfg: &GridConfig) -> Result<GridResult> {
        let grid = windows_to_grid(windows, cfg.h0);
        let mut axes: Vec<Axis> = (0..3).map(|k| Axis::new(self.f[k], grid[k].0, grid[k].1)).collect();
        let mut prev: Option<C64> = None;
        for level in 0..=cfg.max_halvings {
            let h = cfg.h0 / (1u64 << level) as f64;
            for a in axes.iter_mut() {
                a.refine_to(level, h)?;
            }
            let v = self.grid_sum(&axes, level, h);
            if let Some(p) = prev {
                let rel = ((v - p).exp() - 1.0).norm();
                if rel < cfg.rel_tol {
                    return Ok(self.result(&axes, level, h, v, rel));
                }
            }
            prev = Some(v);
        }
        let h = cfg.h0 / (1u64 << cfg.max_halvings) as f64;
        Err(Error::Quadrature(format!(
            "no convergence down to h = {h}; last value {:?}",
            prev
        )))
    }

    fn result(&self, axes: &[Axis], level: usize, h: f64, v: C64, rel: f64) -> GridResult {
        GridResult {
            log_value: v,
            rel_err: rel,
            h,
            ranges: axes.iter().map(|a| (a.t_lo, a.t_lo + a.n(level) as f64 * h)).collect(),
            points_per_axis: axes.iter().map(|a| a.n(level) + 1).collect(),
            decay_ratio: axes.iter().map(|a| a.end_ratio()).fold(0.0, f64::max),
            halvings: level,
        }
    }

    // log of h³ Σ e^{a_i + c_k + b_j} e^{2πiσ t₂ₖ (t₃ⱼ − t₁ᵢ)}
    fn grid_sum(&self, axes: &[Axis], level: usize, h: f64) -> C64 {
        let (a, ma) = axes[0].scaled();
        let (c, mc) = axes[1].scaled();
        let (b, mb) = axes[2].scaled();
        let (n1, n3) = (axes[0].n(level), axes[2].n(level));
        let t2_lo = axes[1].t_lo;
        let s_lo = axes[2].t_lo - axes[0].t_lo;
        let tau = 2.0 * PI * self.sigma;
        // G(m) for s = s_lo + m h, m = j − i ∈ [−n1, n3]
        let g: Vec<C64> = (0..=n1 + n3)
            .into_par_iter()
            .map(|mi| {
                let s = s_lo + (mi as f64 - n1 as f64) * h;
                phased_sum(&c, tau * s * t2_lo, tau * s * h)
            })
            .collect();
        let total = ordered_row_sum(n1 + 1, |i| {
            let mut acc = KahanSum::default();
            for (j, bj) in b.iter().enumerate() {
                acc.add(bj * g[j + n1 - i]);
            }
            a[i] * acc.value()
        });
        total.ln() + ma + mb + mc + 3.0 * h.ln()
    }
}

/// Two-dimensional integral `∫ e^{f₁(t₁) + f₃(t₃) + k(t₁ − t₃)} dt₁ dt₃`.
pub struct Separable2<'a> {
    pub f: [&'a AxisFn<'a>; 2],
    pub k: &'a AxisFn<'a>,
}

impl<'a> Separable2<'a> {
    /// The second axis must decay on its own; the first may rely on the kernel, so its
    /// window is found from `Re f₁(t₁) + max_{t₃} Re[f₃(t₃) + k(t₁ − t₃)]`.
    pub fn integrate(&self, cfg: &GridConfig) -> Result<GridResult> {
        cfg.validate()?;
        let s = cfg.scan_step;
        let (lo3, hi3, _) = find_window(self.f[1], cfg)?;
        let lo3 = (lo3 / s).floor() * s;
        let m = ((hi3 - lo3) / s).ceil() as i64;
        let env3 = (0..=m)
            .map(|j| Ok(self.f[1](lo3 + j as f64 * s)?.re))
            .collect::<Result<Vec<f64>>>()?;
        let mut kmemo: std::collections::HashMap<i64, f64> = std::collections::HashMap::new();
        let w1 = scan_window(
            |t1| {
                let k1 = (t1 / s).round() as i64;
                let mut best = f64::NEG_INFINITY;
                for (j, e3) in env3.iter().enumerate() {
                    // t₁ − t₃ = (k1 − j) s − lo3
                    let key = k1 - j as i64;
                    let kv = match kmemo.get(&key) {
                        Some(v) => *v,
                        None => {
                            let v = (self.k)(key as f64 * s - lo3)?.re;
                            kmemo.insert(key, v);
                            v
                        }
                    };
                    best = best.max(e3 + kv);
                }
                Ok(self.f[0](t1)?.re + best)
            },
            cfg,
        )?;
        self.integrate_on(&[(w1.0, w1.1), (lo3, hi3)], cfg)
    }

    pub fn integrate_on(&self, windows: &[(f64, f64)], cfg: &GridConfig) -> Result<GridResult> {
        let grid = windows_to_grid(windows, cfg.h0);
        let (lo1, n1) = grid[0];
        let (lo3, n3) = grid[1];
        let mut x = Axis::new(self.f[0], lo1, n1);
        let mut y = Axis::new(self.f[1], lo3, n3);
        // t₁ − t₃ = (lo1 − lo3) + (i − j) h, i − j ∈ [−n3, n1]
        let mut k = Axis::new(self.k, lo1 - lo3 - n3 as f64 * cfg.h0, n1 + n3);
        let mut prev: Option<C64> = None;
        for level in 0..=cfg.max_halvings {
            let h = cfg.h0 / (1u64 << level) as f64;
            x.refine_to(level, h)?;
            y.refine_to(level, h)?;
            k.refine_to(level, h)?;
            let v = Self::grid_sum(&x, &y, &k, level, h);
            if let Some(p) = prev {
                let rel = ((v - p).exp() - 1.0).norm();
                if rel < cfg.rel_tol {
                    return Ok(GridResult {
                        log_value: v,
                        rel_err: rel,
                        h,
                        ranges: [&x, &y]
                            .iter()
                            .map(|a| (a.t_lo, a.t_lo + a.n(level) as f64 * h))
                            .collect(),
                        points_per_axis: vec![x.n(level) + 1, y.n(level) + 1],
                        decay_ratio: Self::boundary_ratio(&x, &y, &k, level),
                        halvings: level,
                    });
                }
            }
            prev = Some(v);
        }
        Err(Error::Quadrature(format!("no convergence; last value {:?}", prev)))
    }

    fn grid_sum(x: &Axis, y: &Axis, k: &Axis, level: usize, h: f64) -> C64 {
        let (a, ma) = x.scaled();
        let (b, mb) = y.scaled();
        let (kk, mk) = k.scaled();
        let n3 = y.n(level);
        let total = ordered_row_sum(a.len(), |i| {
            let mut acc = KahanSum::default();
            for (j, bj) in b.iter().enumerate() {
                acc.add(bj * kk[i + n3 - j]);
            }
            a[i] * acc.value()
        });
        total.ln() + ma + mb + mk + 2.0 * h.ln()
    }

    fn boundary_ratio(x: &Axis, y: &Axis, k: &Axis, level: usize) -> f64 {
        let n3 = y.n(level);
        let lm = |i: usize, j: usize| x.vals[i].re + y.vals[j].re + k.vals[i + n3 - j].re;
        let (n1, n3) = (x.vals.len(), y.vals.len());
        let mut peak = f64::NEG_INFINITY;
        let mut edge = f64::NEG_INFINITY;
        for i in 0..n1 {
            for j in 0..n3 {
                let v = lm(i, j);
                peak = peak.max(v);
                if i == 0 || j == 0 || i + 1 == n1 || j + 1 == n3 {
                    edge = edge.max(v);
                }
            }
        }
        (edge - peak).exp()
    }
}
