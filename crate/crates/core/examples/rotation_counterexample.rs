//! The shrinking asymmetric bump `φ(x/ε)`: its Lie derivative along the
//! rotation field vanishes away from the origin, yet it is not rotation
//! invariant on any box around 0.
//!
//! Run with `cargo run --example rotation_counterexample`.

use colombeau::asymptotics::Thresholds;
use colombeau::embeddings::gallery;
use colombeau::invariance::{
    all_planes, default_angle_assignments, default_angles, generalized_rotation_test, infinitesimal_test,
    standard_rotation_test,
};
use colombeau::{CompactBox, Result};

fn main() -> Result<()> {
    let g = gallery();
    let t = Thresholds::default();
    let u = g.function("bump_asym_2d")?;
    let xi = g.field("xi_12_rotation")?;
    for (label, k) in [
        ("[-1,1]^2", CompactBox::cube(2, -1.0, 1.0)?),
        ("[0.5,1]x[-1,1]", CompactBox::new(vec![(0.5, 1.0), (-1.0, 1.0)])?),
    ] {
        let inf = infinitesimal_test(&xi, &u, &k, &t)?;
        let std = standard_rotation_test(&u, &k, &default_angles(), &all_planes(2), &t)?;
        let gen = generalized_rotation_test(&u, &k, &default_angle_assignments(g.grid(), 2), &t)?;
        println!("on {label}:");
        for v in [&inf, &std, &gen] {
            let tail: Vec<String> = v.worst_profile.tail().iter().take(4).map(|e| format!("{:.3}", e.1)).collect();
            println!(
                "  {:<24} passed {:<5} worst: {} [{}…]",
                serde_json::to_string(&v.method)?.trim_matches('"'),
                v.passed,
                v.worst_profile.label,
                tail.join(", ")
            );
        }
    }
    Ok(())
}
