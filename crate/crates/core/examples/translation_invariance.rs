//! The three translation criteria along x₁ and the axis-constant representative.
//!
//! Run with `cargo run --example translation_invariance`.

use colombeau::asymptotics::Thresholds;
use colombeau::embeddings::gallery;
use colombeau::invariance::{build_invariant_representative, default_etas, translation_tests};
use colombeau::{CompactBox, Result};

fn main() -> Result<()> {
    let g = gallery();
    let t = Thresholds::default();
    let k = CompactBox::cube(2, -1.0, 1.0)?;
    let etas = default_etas(g.grid());
    println!("{:<22} {:>6} {:>6} {:>6}", "net", "(i)", "(ii)", "(iii)");
    for name in ["coord_x2_2d", "x2_plus_eps5_sin_x1", "x2_plus_eps_sin_x1", "delta_x2_2d", "coord_x1_2d"] {
        let tv = translation_tests(&g.function(name)?, 0, &k, &etas, &t)?;
        println!("{name:<22} {:>6} {:>6} {:>6}", tv.shifted.passed, tv.derivative.passed, tv.representative.passed);
    }

    let u = g.function("x2_plus_eps5_sin_x1")?;
    let rep = build_invariant_representative(&u, 0, &k, &t)?;
    println!(
        "\nrepresentative of x2 + eps^5 sin x1: value at (0.3, 0.2) = {}, d/dx1 = {}, difference slope {:.3}",
        rep.net.eval(0.0625, &[0.3, 0.2])?,
        rep.net.partial(0.0625, &[1, 0], &[0.3, 0.2])?,
        rep.difference_slope().unwrap_or(f64::NAN)
    );
    match build_invariant_representative(&g.function("coord_x1_2d")?, 0, &k, &t) {
        Err(e) => println!("x1 has no x1-invariant representative: {e}"),
        Ok(_) => println!("unexpected representative for x1"),
    }
    Ok(())
}
