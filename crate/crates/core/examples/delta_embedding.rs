//! Mollifiers and the embedding of the Dirac delta as `ε^{-n} φ(x/ε)`.
//!
//! Run with `cargo run --example delta_embedding`.

use colombeau::asymptotics::{classify, growth_profile, Thresholds};
use colombeau::embeddings::{embed_delta, make_mollifier, shrinking_bump, MollifierSpec};
use colombeau::net::EpsilonGrid;
use colombeau::{CompactBox, Result};

/// Midpoint rule on `[-1, 1]^2` with `m` cells per axis.
fn mass_2d(f: impl Fn(&[f64]) -> f64, m: usize) -> f64 {
    let h = 2.0 / m as f64;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            total += f(&[-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h]);
        }
    }
    total * h * h
}

fn main() -> Result<()> {
    let spec = MollifierSpec::radial(2);
    let phi = make_mollifier(&spec)?;
    println!("radial mollifier in R^2: phi(0) = {:.6}, mass ≈ {:.6}", phi.eval(&[0.0, 0.0]), mass_2d(|x| phi.eval(x), 800));

    let grid = EpsilonGrid::geometric(2, 12, 0.5)?;
    let delta = embed_delta(&spec, &grid)?;
    for &eps in &grid.values()[..4] {
        let m = delta.member_at(eps)?;
        println!("eps = {eps:<8} mass ≈ {:.6}  peak = {:.3e}", mass_2d(|x| m.eval(x), 800), m.eval(&[0.0, 0.0]));
    }

    let k = CompactBox::cube(2, -1.0, 1.0)?;
    let class = classify(&growth_profile(&delta, &k, &[0, 0])?, &Thresholds::default())?;
    println!("sup |delta_eps| on [-1,1]^2: {} (slope {:.3})", class.verdict, class.slope.unwrap_or(f64::NAN));

    let bump = shrinking_bump(&MollifierSpec::asymmetric(2), &grid)?;
    let class = classify(&growth_profile(&bump, &k, &[0, 0])?, &Thresholds::default())?;
    println!("shrinking asymmetric bump phi(x/eps): {} (sup stays 1)", class.verdict);
    Ok(())
}
