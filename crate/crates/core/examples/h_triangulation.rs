//! |H-limit integral| = |J| for two different limit structures τ, and J on three contours.
//!
//! cargo run --release --example h_triangulation

use tqft_volume::angle_opt::{maximize_volume, OptimizerConfig};
use tqft_volume::cli::pipeline::contour_family;
use tqft_volume::integrator::{
    integrate_h_limit, integrate_jx_3d, limit_compatible_alpha, tau_from_alpha, ContourSpec, GridConfig,
};
use tqft_volume::specfun::{CouplingConstant, PrecisionConfig};
use tqft_volume::triangulation::builtin_ideal_73;
use tqft_volume::Result;

fn main() -> Result<()> {
    let alpha0 = maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default())?;
    let (prec, grid) = (PrecisionConfig::default(), GridConfig::default());
    for b in [0.5, 0.4] {
        let cc = CouplingConstant::new(b)?;
        println!("b = {b}");
        let mut j0 = None;
        for (name, a) in contour_family(&alpha0)? {
            let j = integrate_jx_3d(cc, &ContourSpec::three_dim(&a, cc)?, &prec, &grid)?;
            let base = *j0.get_or_insert(j.value());
            println!(
                "  J on {name:<10} {:.12e}   diff {:.1e}",
                j.value(),
                ((j.value() - base) / base).norm()
            );
        }
        let log_j = j0.expect("three contours").ln().re;
        for (name, a) in [("maximiser", alpha0.clone()), ("symmetric", limit_compatible_alpha()?)] {
            let h = integrate_h_limit(cc, &tau_from_alpha(&a, 0.2)?, &prec, &grid)?;
            println!(
                "  log|H| ({name:<9}) {:.12}   log|J| {:.12}   gap {:.1e}",
                h.log_abs(),
                log_j,
                (h.log_abs() - log_j).abs()
            );
        }
    }
    Ok(())
}
