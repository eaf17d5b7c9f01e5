//! The state integral J at one value of b, in three and in two variables.
//!
//! cargo run --release --example state_integral -- 0.5

use std::time::Instant;

use tqft_volume::angle_opt::{maximize_volume, OptimizerConfig};
use tqft_volume::integrator::{fourier_phase, integrate_jx_2d, integrate_jx_3d, ContourSpec, GridConfig};
use tqft_volume::specfun::{CouplingConstant, PrecisionConfig};
use tqft_volume::triangulation::builtin_ideal_73;
use tqft_volume::Result;

fn main() -> Result<()> {
    let b: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let cc = CouplingConstant::new(b)?;
    let alpha = maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default())?;
    let (prec, grid) = (PrecisionConfig::default(), GridConfig::default());

    let t = Instant::now();
    let j3 = integrate_jx_3d(cc, &ContourSpec::three_dim(&alpha, cc)?, &prec, &grid)?;
    println!("b = {b}, hbar = {:.6}", cc.hbar);
    println!(
        "3d: J = {:.12e}  rel.err {:.1e}  step {}  points {:?}  ({:.2?})",
        j3.value(),
        j3.rel_err,
        j3.h,
        j3.points_per_axis,
        t.elapsed()
    );

    let t = Instant::now();
    let j2 = integrate_jx_2d(cc, &ContourSpec::two_dim(&alpha, cc)?, &prec, &grid)?;
    println!(
        "2d: J = {:.12e}  rel.err {:.1e}  step {}  points {:?}  ({:.2?})",
        j2.value(),
        j2.rel_err,
        j2.h,
        j2.points_per_axis,
        t.elapsed()
    );

    let phased = fourier_phase(cc) * j2.value();
    println!(
        "|J3 - e^(-i pi (1+1/hbar)/12) J2| / |J3| = {:.1e}",
        ((j3.value() - phased) / j3.value()).norm()
    );
    println!(
        "2 pi hbar log|J| = {:.6}",
        2.0 * std::f64::consts::PI * cc.hbar * j3.log_abs()
    );
    Ok(())
}
