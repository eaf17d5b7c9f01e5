//! Li₂, Bloch–Wigner, Lobachevsky and Φ_b at a few reference points.
//!
//! cargo run --example special_functions

use std::f64::consts::PI;

use tqft_volume::specfun::{
    bloch_wigner, dilog, faddeev, lobachevsky, log_faddeev, semiclassical_log_faddeev, CouplingConstant,
};
use tqft_volume::{Result, C64};

fn main() -> Result<()> {
    println!("Li2(-1)       = {:.15}", dilog(C64::new(-1.0, 0.0))?.re);
    println!("-pi^2/12      = {:.15}", -PI * PI / 12.0);
    println!("Li2(1/2)      = {:.15}", dilog(C64::new(0.5, 0.0))?.re);

    let w = C64::from_polar(1.0, PI / 3.0);
    println!("D(e^(i pi/3)) = {:.12}  (regular ideal tetrahedron)", bloch_wigner(w));
    println!(
        "L(pi/6)       = {:.12}  (maximum of Lobachevsky)",
        lobachevsky(PI / 6.0)
    );

    for b in [0.5, 1.0] {
        let cc = CouplingConstant::new(b)?;
        let z0 = faddeev(C64::new(0.0, 0.0), cc)?;
        let want = C64::new(0.0, PI * (b * b + 1.0 / (b * b)) / 12.0).exp();
        println!("b = {b}: Phi_b(0)^2 = {:.12}, expected {:.12}", z0 * z0, want);

        // functional equation in the b-direction
        let z = C64::new(0.3, 0.1);
        let lhs = faddeev(z - C64::new(0.0, b / 2.0), cc)?;
        let rhs = (1.0 + (2.0 * PI * b * z).exp()) * faddeev(z + C64::new(0.0, b / 2.0), cc)?;
        println!("        functional equation residual {:.2e}", (lhs - rhs).norm());
    }

    // semiclassical limit of log Φ_b(y / 2πb)
    let y = C64::new(0.4, 1.2);
    for b in [0.5, 0.35, 0.25] {
        let cc = CouplingConstant::new(b)?;
        let exact = log_faddeev(y / (2.0 * PI * b), cc)?;
        let approx = semiclassical_log_faddeev(y, cc)?;
        println!(
            "b = {b:<4}  |Re(log Phi - Li2 term)| = {:.3e}",
            (exact - approx).re.abs()
        );
    }
    Ok(())
}
