//! 2πħ log|J| for decreasing b, its extrapolation to ħ = 0, and the saddle-point estimate.
//!
//! cargo run --release --example semiclassical_sweep

use std::f64::consts::PI;

use tqft_volume::angle_opt::{maximize_volume, OptimizerConfig};
use tqft_volume::complex_geometry::solve_gluing;
use tqft_volume::integrator::{
    fourier_phase, integrate_jx_2d, log_saddle_estimate, saddle_estimate_one_loop, sweep_volume_limit, y_space_scale,
    ContourSpec, GridConfig, Method,
};
use tqft_volume::specfun::{CouplingConstant, PrecisionConfig};
use tqft_volume::triangulation::builtin_ideal_73;
use tqft_volume::{Result, VOL_7_3};

fn main() -> Result<()> {
    let alpha = maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default())?;
    let (prec, grid) = (PrecisionConfig::default(), GridConfig::default());
    let bs = [0.5, 0.42, 0.35, 0.3, 0.25];

    let table = sweep_volume_limit(&bs, Method::TwoDim, &alpha, &prec, &grid)?;
    println!(
        "{:>5} {:>10} {:>14} {:>12} {:>9}",
        "b", "hbar", "log|J|", "2πħ log|J|", "err"
    );
    for r in &table.rows {
        println!(
            "{:>5} {:>10.6} {:>14.9} {:>12.6} {:>9.1e}",
            r.b, r.hbar, r.log_abs_j, r.volume_estimate, r.err_bound
        );
    }
    println!("fit v0 + c1 ħ log ħ + c2 ħ: {:?}", table.fit);
    println!("extrapolated {:.4}   target {:.4}", table.extrapolated_volume, -VOL_7_3);

    // leading saddle term and its one-loop completion against the quadrature
    let rep = solve_gluing(&alpha)?;
    for b in [0.5, 0.35, 0.25] {
        let cc = CouplingConstant::new(b)?;
        let j = fourier_phase(cc) * integrate_jx_2d(cc, &ContourSpec::two_dim(&alpha, cc)?, &prec, &grid)?.value();
        let lead = log_saddle_estimate(cc, &rep)?.exp() / y_space_scale(cc);
        let full = saddle_estimate_one_loop(cc, &rep)?;
        println!("b = {b:<4}  leading/J = {:.4}   one-loop/J = {:.4}", lead / j, full / j);
    }
    let cc = CouplingConstant::new(0.25)?;
    let e = log_saddle_estimate(cc, &rep)?.re;
    let rho_p = rep.rho.norm() * (2.0 * PI).powf(1.5);
    println!(
        "2πħ (log|est| − log|ρ′| − 1.5 log ħ) at b = 0.25: {:.9}",
        2.0 * PI * cc.hbar * (e - rho_p.ln() - 1.5 * cc.hbar.ln())
    );
    Ok(())
}
