//! Report assembly for each subcommand. Everything here is a pure function of its inputs.

use std::f64::consts::PI;

use serde::Serialize;

use crate::angle_opt::{maximize_volume_report, AnglePolytope, OptimizerConfig, VolumeMax};
use crate::complex_geometry::{
    classify_saddle, f_of_t, psi_inv, saddle_polynomial_roots, shape_volume, solve_gluing, SaddleClass, SaddleReport,
    SIGNS_73,
};
use crate::integrator::{
    integrate_h_limit, integrate_jx_3d, limit_compatible_alpha, log_saddle_estimate, saddle_estimate_one_loop,
    sweep_volume_limit, tau_from_alpha, y_space_scale, ContourSpec, GridConfig, GridResult, Method, SweepTable,
};
use crate::specfun::{CouplingConstant, PrecisionConfig};
use crate::triangulation::{builtin_ideal_73, ShapeStructure, Triangulation};
use crate::{Error, Result, C64, VOL_7_3};

/// Reference value of `f(t₅)`.
pub const F_T5: C64 = C64::new(2.884158080, -4.592125697);

#[derive(Debug, Clone, Serialize)]
pub struct AnglesReport {
    /// `a₁, b₁, c₁, a₂, …` as turn fractions.
    pub angles: Vec<f64>,
    pub volume: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

impl From<&VolumeMax> for AnglesReport {
    fn from(v: &VolumeMax) -> Self {
        Self {
            angles: v.angles.clone(),
            volume: v.volume,
            grad_norm: v.grad_norm,
            iterations: v.iterations,
        }
    }
}

pub fn angles(t: &Triangulation, opt: &OptimizerConfig) -> Result<VolumeMax> {
    maximize_volume_report(t, opt, None)
}

/// The gluing solve only exists for the ideal triangulation of 7_3.
pub fn gluing(t: &Triangulation, opt: &OptimizerConfig) -> Result<(VolumeMax, SaddleReport)> {
    if *t != builtin_ideal_73() {
        return Err(Error::Config(
            "the gluing equations are only implemented for the ideal 7_3 triangulation".into(),
        ));
    }
    let v = angles(t, opt)?;
    let r = solve_gluing(&v.alpha)?;
    Ok((v, r))
}

#[derive(Debug, Clone, Serialize)]
pub struct RootRow {
    /// 1-based position in the `(Re, Im)` order.
    pub index: usize,
    pub t: C64,
    pub f: Option<C64>,
    pub classification: Option<SaddleClass>,
}

pub fn root_table() -> Vec<RootRow> {
    saddle_polynomial_roots()
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let class = classify_saddle(t).ok();
            RootRow {
                index: k + 1,
                t,
                f: class
                    .and_then(|_| f_of_t(t).ok())
                    .filter(|v| v.re.is_finite() && v.im.is_finite()),
                classification: class,
            }
        })
        .collect()
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn root_csv(rows: &[RootRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "index",
        "t_re",
        "t_im",
        "f_re",
        "f_im",
        "eig_lo",
        "eig_hi",
        "admissible",
    ])
    .expect("in-memory write");
    for r in rows {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let c = r.classification.as_ref();
        w.write_record([
            r.index.to_string(),
            num(r.t.re),
            num(r.t.im),
            opt(r.f.map(|f| f.re)),
            opt(r.f.map(|f| f.im)),
            opt(c.map(|c| c.eigenvalues[0])),
            opt(c.map(|c| c.eigenvalues[1])),
            c.map(|c| c.admissible.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn sweep_csv(t: &SweepTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b", "hbar", "log_abs_J", "volume_estimate", "err_bound"])
        .expect("in-memory write");
    for r in &t.rows {
        w.write_record([r.b, r.hbar, r.log_abs_j, r.volume_estimate, r.err_bound].map(num))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourValue {
    pub name: String,
    pub offsets: Vec<f64>,
    pub result: GridResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct HValue {
    pub name: String,
    pub log_abs_h: f64,
    pub rel_err: f64,
    /// `| |H| / |J| − 1 |`.
    pub modulus_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleComparison {
    pub estimate: C64,
    pub one_loop_estimate: C64,
    /// `|J − ŝ| / |J|` with the leading estimate rescaled to `J`.
    pub gap: f64,
    pub one_loop_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub b: f64,
    pub hbar: f64,
    pub contours: Vec<ContourValue>,
    /// Largest `|J_k − J_0| / |J_0|`.
    pub contour_spread: f64,
    pub h_limit: Vec<HValue>,
    pub saddle: SaddleComparison,
}

/// Three admissible contours: the volume maximiser, the known start point, and the
/// phase-one interior point of the polytope.
pub fn contour_family(alpha0: &ShapeStructure) -> Result<Vec<(String, ShapeStructure)>> {
    let t = builtin_ideal_73();
    let poly = AnglePolytope::new(&t, |e| t.default_target(e))?;
    Ok(vec![
        ("maximiser".into(), alpha0.clone()),
        ("start".into(), ShapeStructure::ideal_73_start()),
        ("phase_one".into(), ShapeStructure::from_flat(&poly.interior_point()?)),
    ])
}

pub fn crosscheck(
    b: f64,
    alpha0: &ShapeStructure,
    report: &SaddleReport,
    prec: &PrecisionConfig,
    grid: &GridConfig,
) -> Result<CrossCheck> {
    let cc = CouplingConstant::new(b)?;
    let mut contours = Vec::new();
    for (name, a) in contour_family(alpha0)? {
        let spec = ContourSpec::three_dim(&a, cc)?;
        let result = integrate_jx_3d(cc, &spec, prec, grid)?;
        contours.push(ContourValue {
            name,
            offsets: spec.offsets,
            result,
        });
    }
    let j0 = contours[0].result.value();
    let contour_spread = contours[1..]
        .iter()
        .map(|c| ((c.result.value() - j0) / j0).norm())
        .fold(0.0, f64::max);
    let log_j = contours[0].result.log_value;

    let mut h_limit = Vec::new();
    for (name, a, split) in [
        ("maximiser", alpha0.clone(), 0.25),
        ("symmetric_interior", limit_compatible_alpha()?, 0.1),
    ] {
        let h = integrate_h_limit(cc, &tau_from_alpha(&a, split)?, prec, grid)?;
        h_limit.push(HValue {
            name: name.into(),
            log_abs_h: h.log_abs(),
            rel_err: h.rel_err,
            modulus_gap: ((h.log_abs() - log_j.re).exp() - 1.0).abs(),
        });
    }

    let scale = y_space_scale(cc);
    let estimate = log_saddle_estimate(cc, report)?.exp();
    let one_loop_estimate = saddle_estimate_one_loop(cc, report)?;
    let saddle = SaddleComparison {
        estimate,
        one_loop_estimate,
        gap: ((j0 - estimate / scale) / j0).norm(),
        one_loop_gap: ((j0 - one_loop_estimate) / j0).norm(),
    };
    Ok(CrossCheck {
        b,
        hbar: cc.hbar,
        contours,
        contour_spread,
        h_limit,
        saddle,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn near(name: &str, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target,
            tol,
            pass: (value - target).abs() < tol,
        }
    }

    fn below(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: 0.0,
            tol,
            pass: value.abs() < tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub max_volume: f64,
    pub alpha0: Vec<f64>,
    pub y0: [C64; 3],
    pub re_s: f64,
    pub volume: f64,
    pub bloch_wigner_volume: f64,
    pub roots: Vec<RootRow>,
    pub f_t5: C64,
    pub sweep: SweepTable,
    /// `2πħ (log|ŝ| − log|ρ′| − (3/2) log ħ)` at the smallest swept `b`.
    pub saddle_corrected_volume: f64,
    pub crosscheck: Vec<CrossCheck>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// The whole pipeline in order, with the numerical targets checked at the end.
pub fn full(
    t: &Triangulation,
    opt: &OptimizerConfig,
    prec: &PrecisionConfig,
    grid: &GridConfig,
    b_list: &[f64],
    method: Method,
    cross_b: &[f64],
) -> Result<Summary> {
    let (vmax, rep) = gluing(t, opt)?;
    let z = psi_inv(&rep.y0, SIGNS_73)?;
    let bw = shape_volume(&z);
    let roots = root_table();
    let t5 = roots
        .get(4)
        .and_then(|r| r.f)
        .ok_or_else(|| Error::Domain("f(t₅) is undefined".into()))?;
    let sweep = sweep_volume_limit(b_list, method, &vmax.alpha, prec, grid)?;

    let b_last = *b_list.last().expect("sweep checked the list");
    let cc = CouplingConstant::new(b_last)?;
    let est = log_saddle_estimate(cc, &rep)?;
    let rho_p = rep.rho.norm() * (2.0 * PI).powf(1.5);
    let saddle_corrected_volume = 2.0 * PI * cc.hbar * (est.re - rho_p.ln() - 1.5 * cc.hbar.ln());

    let cross = cross_b
        .iter()
        .map(|&b| crosscheck(b, &vmax.alpha, &rep, prec, grid))
        .collect::<Result<Vec<_>>>()?;

    let mut checks = vec![
        Check::near("max_volume", vmax.volume, VOL_7_3, 1e-6),
        Check::near("minus_re_s", -rep.s_value.re, VOL_7_3, 1e-8),
        Check::below("grad_norm", rep.grad_norm, 1e-12),
        Check::near("bloch_wigner_volume", bw, -rep.s_value.re, 1e-8),
        Check::below("f_t5", (t5 - F_T5).norm(), 1e-8),
        Check::near("im_f_t5_vs_re_s", t5.im, rep.s_value.re, 1e-8),
        Check::near("extrapolated_volume", sweep.extrapolated_volume, -VOL_7_3, 0.05),
        Check::near("saddle_corrected_volume", saddle_corrected_volume, -VOL_7_3, 1e-3),
    ];
    let late: Vec<f64> = sweep
        .rows
        .iter()
        .filter(|r| r.b <= 0.42)
        .map(|r| r.volume_estimate)
        .collect();
    let worst_rise = late.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "sweep_monotone".into(),
        value: worst_rise,
        target: 0.0,
        tol: 0.0,
        pass: worst_rise < 0.0,
    });
    for c in &cross {
        checks.push(Check::below(
            &format!("contour_spread_b{}", c.b),
            c.contour_spread,
            10.0 * grid.rel_tol,
        ));
        for h in &c.h_limit {
            checks.push(Check::below(
                &format!("h_modulus_{}_b{}", h.name, c.b),
                h.modulus_gap,
                2.0 * grid.rel_tol,
            ));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Summary {
        max_volume: vmax.volume,
        alpha0: vmax.angles.clone(),
        y0: rep.y0,
        re_s: rep.s_value.re,
        volume: rep.volume,
        bloch_wigner_volume: bw,
        roots,
        f_t5: t5,
        sweep,
        saddle_corrected_volume,
        crosscheck: cross,
        checks,
        pass,
    })
}
