//! The two built-in triangulations of 7_3, their weight equations and the λ, μ invariants.
//!
//! cargo run --example triangulations

use tqft_volume::triangulation::{
    builtin_h_73, builtin_ideal_73, is_angle_structure, lambda_mu, ShapeStructure, Triangulation,
};
use tqft_volume::Result;

fn show(name: &str, t: &Triangulation) -> Result<()> {
    println!(
        "{name}: {} tetrahedra, signs {:?}, knot edge {:?}",
        t.num_tetrahedra(),
        t.signs(),
        t.knot_edge()
    );
    for e in t.edges() {
        let terms: Vec<String> = t
            .weight_form(&e.id)?
            .iter()
            .map(|(&(k, s), &m)| {
                if m == 1 {
                    format!("{s}{k}")
                } else {
                    format!("{m}{s}{k}")
                }
            })
            .collect();
        println!("  {:<3} {}", e.id, terms.join(" + "));
    }
    Ok(())
}

fn main() -> Result<()> {
    let ideal = builtin_ideal_73();
    show("ideal", &ideal)?;
    show("H", &builtin_h_73())?;

    let p = ShapeStructure::ideal_73_start();
    println!(
        "start point is an angle structure: {}",
        is_angle_structure(&ideal, &p, |e| ideal.default_target(e))
    );
    for e in ideal.edges() {
        println!(
            "  weight {} = {:.12} (2π = {:.12})",
            e.id,
            ideal.weight(&p, &e.id)?,
            2.0 * std::f64::consts::PI
        );
    }
    let (l, m) = lambda_mu(&p)?;
    println!(
        "lambda = {l:.12} (5π/8 = {:.12}), mu = {m}",
        5.0 * std::f64::consts::PI / 8.0
    );

    // the file format accepted by --triangulation
    println!("{}", ideal.to_json());
    Ok(())
}
