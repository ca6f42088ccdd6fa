//! Rotation-invariant nets factor through `|x|`: reconstruct `v` with
//! `u(x) = v(|x|)` and certify it; restrict to circles and planar slices.
//!
//! Run with `cargo run --example radial_reduction`.

use colombeau::asymptotics::Thresholds;
use colombeau::embeddings::gallery;
use colombeau::invariance::{planar_slice, polar_reduce_2d};
use colombeau::reduction::{radial_profile, verify_reduction};
use colombeau::{CompactBox, GeneralizedNumber, GeneralizedPoint, Result};

fn main() -> Result<()> {
    let g = gallery();
    let t = Thresholds::default();
    let k = CompactBox::cube(2, -1.0, 1.0)?;
    for name in ["delta_radial_2d", "norm_quartic_2d", "radial_eps_perturbed_2d", "bump_asym_2d"] {
        let u = g.function(name)?;
        let r = verify_reduction(&u, &radial_profile(&u)?, &k, &t)?;
        println!("{name:<24} certified {:<5} residual class {}", r.certified, r.residual_class.verdict);
    }

    let d = g.function("delta_radial_2d")?;
    let res = verify_reduction(&d, &radial_profile(&d)?, &k, &t)?;
    println!("\nradial profile of the 2D delta at the largest eps (first rows):");
    for line in res.profile_csv(0, 9)?.lines().take(6) {
        println!("  {line}");
    }

    let half = GeneralizedNumber::new(g.grid(), "eps/2", |e| 0.5 * e);
    for name in ["delta_radial_2d", "bump_asym_2d"] {
        let p = polar_reduce_2d(&g.function(name)?, &half, &t)?;
        println!("{name} on the circle |x| = eps/2 is constant in theta: {}", p.constant);
    }

    let w = planar_slice(&g.function("norm_sq_3d")?, 0, 1, &GeneralizedPoint::constant(g.grid(), &[1.0]))?;
    println!("slice of |x|^2 at x3 = 1: w(2, 3) = {}", w.eval(0.0625, &[2.0, 3.0])?);
    Ok(())
}
