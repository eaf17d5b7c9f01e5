//! Stationary points of the two-variable potential V and which of them admit a descent contour.
//!
//! cargo run --example reduced_saddles

use tqft_volume::complex_geometry::{classify_saddle, f_of_t, saddle_polynomial_roots};
use tqft_volume::Result;

fn main() -> Result<()> {
    for (k, t) in saddle_polynomial_roots().into_iter().enumerate() {
        print!("t{} = {:>26.6}", k + 1, t);
        match classify_saddle(t) {
            Err(e) => println!("  ({e})"),
            Ok(c) => {
                let f = f_of_t(t).ok().filter(|f| f.re.is_finite());
                print!("  eig = ({:>9.5}, {:>9.5})", c.eigenvalues[0], c.eigenvalues[1]);
                print!("  {}", if c.admissible { "admissible" } else { "          " });
                match f {
                    Some(f) => println!("  f = {f:.9}"),
                    None => println!(),
                }
            }
        }
    }
    Ok(())
}
