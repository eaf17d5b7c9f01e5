//! Maximise the volume functional over the angle structures of the ideal triangulation.
//!
//! cargo run --example volume_maximisation

use tqft_volume::angle_opt::{maximize_volume_report, volume_functional, AnglePolytope, OptimizerConfig};
use tqft_volume::triangulation::{builtin_ideal_73, lambda_mu, ShapeStructure};
use tqft_volume::{Result, VOL_7_3};

fn main() -> Result<()> {
    let t = builtin_ideal_73();
    let poly = AnglePolytope::new(&t, |e| t.default_target(e))?;
    println!(
        "polytope: ambient {}, rank {}, dimension {}",
        poly.ambient_dim(),
        poly.rank(),
        poly.dim()
    );

    let start = ShapeStructure::ideal_73_start();
    println!("volume at the start point  {:.12}", volume_functional(&start));

    let cfg = OptimizerConfig::default();
    let v = maximize_volume_report(&t, &cfg, None)?;
    println!(
        "maximum                    {:.12}  after {} Newton steps",
        v.volume, v.iterations
    );
    println!("Vol(S^3 \\ 7_3)             {VOL_7_3:.9}");
    println!("projected gradient         {:.2e}", v.grad_norm);
    for (k, s) in v.alpha.shapes.iter().enumerate() {
        println!("  T{}: a = {:.10}  b = {:.10}  c = {:.10}", k + 1, s.a, s.b, s.c);
    }
    let (l, m) = lambda_mu(&v.alpha)?;
    println!("lambda = {l:.2e}, mu = {m:.2e} at the maximiser");

    // uniqueness: a phase-one start reaches the same point
    let x0 = poly.interior_point()?;
    let w = maximize_volume_report(&t, &cfg, Some(&ShapeStructure::from_flat(&x0)))?;
    let d = v
        .angles
        .iter()
        .zip(&w.angles)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("other start lands within {d:.1e}");
    Ok(())
}
