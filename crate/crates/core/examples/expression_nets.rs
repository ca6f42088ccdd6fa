//! Inline nets from closed-form expressions: exact jets vs symbolic derivatives.
//!
//! Run with `cargo run --example expression_nets`.

use colombeau::asymptotics::{classify, growth_profile, Thresholds};
use colombeau::expr::{compile, parse_expr};
use colombeau::jet::Jet;
use colombeau::net::EpsilonGrid;
use colombeau::{CompactBox, Result};

fn main() -> Result<()> {
    let e = parse_expr("eps^-2 * bump(x1/eps) * bump(x2/eps) + x1^2 * sin(x2)")?;
    println!("parsed: {e}");
    let x = [0.013, -0.021];
    let eps = 0.0625;
    let jet = e.eval_jet(eps, &Jet::seed(&x, 2));
    for alpha in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
        let symbolic = e.partial(&alpha).eval(eps, &x);
        println!("d{alpha:?}: jet {:+.12e}  symbolic {:+.12e}", jet.partial(&alpha).unwrap(), symbolic);
    }
    println!("d/dx1 = {}", e.diff(0));

    let grid = EpsilonGrid::default();
    let u = compile(&e, &grid, 2)?;
    let class = classify(&growth_profile(&u, &CompactBox::cube(2, -1.0, 1.0)?, &[0, 0])?, &Thresholds::default())?;
    println!("growth on [-1,1]^2: {}", class.verdict);

    for bad in ["gamma(x1)", "x1 + * 2", "x1^0.5"] {
        println!("{bad:<10} -> {}", parse_expr(bad).unwrap_err());
    }
    Ok(())
}
