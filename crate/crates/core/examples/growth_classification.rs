//! Classify the ε-growth of gallery nets and of an inline expression.
//!
//! Run with `cargo run --example growth_classification`.

use colombeau::asymptotics::{classify, growth_profile, is_negligible, log_type_check, Thresholds};
use colombeau::embeddings::gallery;
use colombeau::expr::{compile, parse_expr};
use colombeau::{CompactBox, Result};

fn main() -> Result<()> {
    let g = gallery();
    let t = Thresholds::default();

    for (name, dim) in [("eps5_sin_1d", 1), ("delta_radial_1d", 1), ("log_eps_1d", 1), ("delta_radial_2d", 2)] {
        let u = g.function(name)?;
        let k = CompactBox::cube(dim, -1.0, 1.0)?;
        let profile = growth_profile(&u, &k, &vec![0; dim])?;
        let class = classify(&profile, &t)?;
        let slope = class.slope.map_or("-".to_string(), |s| format!("{s:.4}"));
        println!("{name:<18} {:<12} slope {slope:<8} rule {:?}", class.verdict.to_string(), class.rule);
    }

    // first derivative of the 1D delta grows like eps^-2
    let d = g.function("delta_radial_1d")?;
    let k = CompactBox::cube(1, -1.0, 1.0)?;
    let class = classify(&growth_profile(&d, &k, &[1])?, &t)?;
    println!("d/dx delta_radial_1d {}", class.verdict);

    // negligibility checks all derivatives up to the requested order
    let u = compile(&parse_expr("eps^6 * exp(x1) * cos(x2)")?, g.grid(), 2)?;
    let report = is_negligible(&u, &CompactBox::cube(2, -1.0, 1.0)?, 2, &t)?;
    println!("eps^6 exp(x1) cos(x2) negligible up to order 2: {}", report.negligible);

    let log = log_type_check(&g.field("log_eps_dx_1d")?, &k, &t)?;
    println!("(|log eps|) field is log-type: {} (constant {:.3})", log.log_type, log.fitted_constant);

    println!("\nprofile of delta_radial_1d:");
    print!("{}", growth_profile(&d, &k, &[0])?.to_csv()?);
    Ok(())
}
