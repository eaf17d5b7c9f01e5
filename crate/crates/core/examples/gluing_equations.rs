//! From the maximal angle structure to the critical point of the potential S.
//!
//! cargo run --example gluing_equations

use tqft_volume::angle_opt::{maximize_volume, OptimizerConfig};
use tqft_volume::complex_geometry::{gluing_residual, psi_inv, shape_volume, solve_gluing, SIGNS_73};
use tqft_volume::triangulation::builtin_ideal_73;
use tqft_volume::Result;

fn main() -> Result<()> {
    let alpha = maximize_volume(&builtin_ideal_73(), &OptimizerConfig::default())?;
    let r = solve_gluing(&alpha)?;
    println!("Newton steps      {}", r.newton_iters);
    println!("|grad S(y0)|      {:.2e}", r.grad_norm);
    for (k, y) in r.y0.iter().enumerate() {
        println!("y{}                {:.12}", k + 1, y);
    }
    println!("S(y0)             {:.12}", r.s_value);
    let z = psi_inv(&r.y0, SIGNS_73)?;
    for (k, s) in r.z0.iter().enumerate() {
        println!("z{}                {:.12}", k + 1, s);
    }
    println!(
        "gluing residual   {:.2e}",
        gluing_residual(&z).iter().map(|v| v.norm()).fold(0.0, f64::max)
    );
    println!("-Re S(y0)         {:.12}", r.volume);
    println!("D(z1)+D(z2)+3D(z3) {:.12}", shape_volume(&z));
    println!("det Hess          {:.10}", r.det);
    println!("rho               {:.10}", r.rho);
    Ok(())
}
