//! Radial reduction of rotation-invariant nets: `u_ε(x) = v_ε(|x|)`.

use crate::asymptotics::{classify, sup_over_samples, AsymptoticClass, GrowthProfile, Thresholds};
use crate::error::{Error, Result};
use crate::jet::snap;
use crate::net::{norm, ClosedForm, CompactBox, NetFunction, Sampler};
use serde::Serialize;
use std::sync::Arc;

/// Name of the invariant map the reduction factors through.
pub const INVARIANT_MAP: &str = "|x|";

/// Reduced net, residual evidence and certificate.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    #[serde(skip)]
    pub v: NetFunction,
    pub invariant_map: &'static str,
    pub region: CompactBox,
    /// `v` is meaningful on `(−R, R)` with `R` the outer radius of the box.
    pub domain_radius: f64,
    /// `sup_K |u_ε(x) − v_ε(|x|)|` per ε.
    pub residual: GrowthProfile,
    pub residual_class: AsymptoticClass,
    pub certified: bool,
}

impl ReductionResult {
    /// CSV `epsilon,residual`.
    pub fn residual_csv(&self) -> Result<String> {
        crate::report::profile_csv(&self.residual.entries, "residual")
    }

    /// CSV `r,value` of `v_ε` at grid index `index`, on `samples` radii in `[0, R]`.
    pub fn profile_csv(&self, index: usize, samples: usize) -> Result<String> {
        profile_samples_csv(&self.v, index, self.domain_radius, samples)
    }
}

/// CSV `r,value` of a net on ℝ at grid index `index`, on `samples ≥ 2` radii in `[0, r_max]`.
pub fn profile_samples_csv(v: &NetFunction, index: usize, r_max: f64, samples: usize) -> Result<String> {
    if v.dim() != 1 {
        return Err(Error::Config("radial profiles are nets on R".into()));
    }
    if samples < 2 || !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Config("need at least two samples on a positive finite radius".into()));
    }
    if index >= v.grid().len() {
        return Err(Error::Config(format!("grid index {index} out of range")));
    }
    let m = v.member(index);
    let rows: Vec<(f64, f64)> = (0..samples)
        .map(|s| {
            let r = r_max * s as f64 / (samples - 1) as f64;
            (r, m.eval(&[r]))
        })
        .collect();
    crate::report::two_column_csv("r", "value", &rows)
}

/// `v_ε(r) = u_ε(|r|, 0, …, 0)`: the restriction to the positive `x₁`-axis,
/// extended evenly to `r < 0`.
pub fn radial_profile(u: &NetFunction) -> Result<NetFunction> {
    if u.dim() < 2 {
        return Err(Error::Config("radial reduction needs dimension at least 2".into()));
    }
    let n = u.dim();
    u.map_members(|_, _, m| {
        let m = Arc::clone(m);
        ClosedForm::new(1, u.max_order(), move |r| {
            let radius = if r[0].value() < 0.0 { -&r[0] } else { r[0].clone() };
            let mut x = vec![r[0].lift(0.0); n];
            x[0] = radius;
            m.eval_jet(&x)
        })
        .handle()
    })
}

/// Certify `u_ε(x) = v_ε(|x|)` modulo negligible nets on `K`.
///
/// The residual is compared at value level; differences at rounding level of
/// both sides are treated as exact zeros.
pub fn verify_reduction(u: &NetFunction, v: &NetFunction, k: &CompactBox, t: &Thresholds) -> Result<ReductionResult> {
    u.check_same_grid(v.grid())?;
    if v.dim() != 1 {
        return Err(Error::Config("reduced net must live on R".into()));
    }
    if k.dim() != u.dim() {
        return Err(Error::Config("box and net dimensions differ".into()));
    }
    let sampler = Sampler::new(k)?;
    let sups = sup_over_samples(u.grid(), &sampler, |i, _, x| {
        let r = norm(x);
        let scales: Vec<f64> = x.iter().map(|c| c.abs()).collect();
        let (a, sa) = u.member(i).eval_scaled(x, &scales);
        let (b, sb) = v.member(i).eval_scaled(&[r], &[r]);
        Ok(snap(a - b, sa + sb).abs())
    })?;
    let residual = GrowthProfile::new("u(x) - v(|x|)", vec![0; u.dim()], Some(k.clone()), u.grid(), sups);
    let residual_class = classify(&residual, t)?;
    Ok(ReductionResult {
        v: v.clone(),
        invariant_map: INVARIANT_MAP,
        region: k.clone(),
        domain_radius: k.outer_radius(),
        certified: residual_class.is_negligible(),
        residual,
        residual_class,
    })
}
