//! Integrate the rotation field ξ = (−x₂, x₁), check the flow laws and the
//! completeness of a few ε-dependent fields.
//!
//! Run with `cargo run --example rotation_flow`.

use colombeau::asymptotics::Thresholds;
use colombeau::embeddings::gallery;
use colombeau::flow::{check_completeness, flow, linear_flow, skew_generator, solve_ivp, verify_group_law, FlowOptions};
use colombeau::{CompactBox, GeneralizedPoint, Result};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

fn main() -> Result<()> {
    let g = gallery();
    let xi = g.field("xi_12_rotation")?;
    let x0 = GeneralizedPoint::constant(g.grid(), &[1.0, 0.0]);
    let traj = solve_ivp(&xi, &x0, 0.0, FRAC_PI_2, &FlowOptions::default())?;
    let end = traj.endpoint(0);
    println!("Phi(pi/2, (1, 0)) = ({:.12}, {:.12})", end[0], end[1]);

    let numeric = flow(&xi, (-2.0, 2.0), &CompactBox::cube(2, -1.0, 1.0)?, &FlowOptions::default())?;
    let law = verify_group_law(&numeric, FRAC_PI_4, FRAC_PI_4, &[vec![1.0, 0.0], vec![0.3, -0.4]])?;
    println!("group law at (pi/4, pi/4): max residual {:.2e}, passed {}", law.max_residual, law.passed);

    let exact = linear_flow(g.grid(), &skew_generator(2, 0, 1))?;
    let y = exact.map(0, FRAC_PI_2, &[1.0, 0.0])?;
    println!("matrix-exponential flow: ({:.3e}, {:.15})", y[0], y[1]);

    let t = Thresholds::default();
    let k = CompactBox::cube(1, -1.0, 1.0)?;
    let global = CompactBox::cube(1, -10.0, 10.0)?;
    for name in ["const_dx_1d", "log_eps_dx_1d", "inv_sqrt_eps_dx_1d", "inv_eps_dx_1d"] {
        let r = check_completeness(&g.field(name)?, &k, &global, &t)?;
        println!(
            "{name:<20} complete {:<5} globally bounded {:<5} (sup {}) log-type derivatives {}",
            r.complete, r.globally_bounded, r.bound_class.verdict, r.derivatives_log_type
        );
    }
    Ok(())
}
