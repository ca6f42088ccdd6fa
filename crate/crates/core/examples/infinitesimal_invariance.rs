//! Lie derivatives `ξ(u)` and the comparison of the infinitesimal criterion
//! with invariance sampled along the flow.
//!
//! Run with `cargo run --example infinitesimal_invariance`.

use colombeau::asymptotics::Thresholds;
use colombeau::embeddings::{affine_form, gallery, FLOW_INVARIANCE_PAIRS};
use colombeau::flow::affine_flow;
use colombeau::invariance::{default_etas, default_points, flow_invariance_test, infinitesimal_test, lie_derivative};
use colombeau::{CompactBox, Result};

fn main() -> Result<()> {
    let g = gallery();
    let t = Thresholds::default();
    let k = CompactBox::cube(2, -1.0, 1.0)?;

    let l = lie_derivative(&g.field("xi_12_rotation")?, &g.function("coord_x1_2d")?)?;
    println!("xi_12(x1) at (0.3, -0.7) = {}", l.eval(0.0625, &[0.3, -0.7])?);

    let etas = default_etas(g.grid());
    let points = default_points(g.grid(), &k)?;
    println!("\n{:<16} {:<26} {:>13} {:>12}", "field", "net", "infinitesimal", "flow-sampled");
    for &(xi_name, u_name) in FLOW_INVARIANCE_PAIRS {
        let xi = g.field(xi_name)?;
        let u = g.function(u_name)?;
        let (a, b) = affine_form(xi_name).expect("gallery pairs use affine fields");
        let fl = affine_flow(g.grid(), &a, &b)?;
        let inf = infinitesimal_test(&xi, &u, &k, &t)?;
        let fs = flow_invariance_test(&fl, &u, &etas, &points, &t)?;
        println!("{xi_name:<16} {u_name:<26} {:>13} {:>12}", inf.passed, fs.passed);
    }
    Ok(())
}
