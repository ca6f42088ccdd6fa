//! Growth classification of nets on compact boxes.
//!
//! A [`GrowthProfile`] records, for every grid value ε, the sup over a sampled
//! box of `|∂^α u_ε|`. [`classify`] fits `log sup` against `log ε` on the grid
//! tail and applies one fixed decision rule:
//!
//! 1. every tail sup `≤ abs_floor` → `Negligible`;
//! 2. fitted slope `≥ m_max − slope_tol` → `Negligible`;
//! 3. non-monotone tail with fit residual above `residual_max` → `Divergent`
//!    (low confidence);
//! 4. `|slope| ≤ slope_tol` and the ratios `sup / |log ε|` agree within a factor
//!    `1 + ratio_tol` → `LogType`;
//! 5. `|slope| ≤ slope_tol` → `Bounded`;
//! 6. `Moderate(N)` for the smallest `N ≥ 0` with `slope ≥ −N − slope_tol`,
//!    as long as `N ≤ max_moderate_order`;
//! 7. otherwise `Divergent`.
//!
//! Negligibility can never be decided from finitely many ε; the rule and its
//! thresholds are embedded in every serialized verdict so a report can be
//! re-checked offline.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::net::{CompactBox, EpsilonGrid, NetFunction, NetVectorField, PointCloud, Sampler, MIN_TAIL_LEN};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Thresholds of the decision rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub m_max: i32,
    pub slope_tol: f64,
    pub abs_floor: f64,
    pub ratio_tol: f64,
    pub residual_max: f64,
    pub max_moderate_order: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            m_max: 3,
            slope_tol: 0.15,
            abs_floor: 1e-13,
            ratio_tol: 0.25,
            residual_max: 0.5,
            max_moderate_order: 30,
        }
    }
}

/// Ordinary least-squares line `y = slope·x + intercept` with RMS residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn least_squares(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    LinearFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    }
}

/// `(ε, sup_{x∈K} |…|)` for every grid value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub label: String,
    pub order: Vec<usize>,
    /// Sampled box; `None` for profiles taken at finitely many generalized points.
    pub region: Option<CompactBox>,
    pub tail_start: usize,
    pub entries: Vec<(f64, f64)>,
}

impl GrowthProfile {
    pub fn new(
        label: impl Into<String>,
        order: Vec<usize>,
        region: Option<CompactBox>,
        grid: &EpsilonGrid,
        sups: Vec<f64>,
    ) -> GrowthProfile {
        debug_assert_eq!(sups.len(), grid.len());
        GrowthProfile {
            label: label.into(),
            order,
            region,
            tail_start: grid.tail_start(),
            entries: grid.values().iter().copied().zip(sups).collect(),
        }
    }

    pub fn tail(&self) -> &[(f64, f64)] {
        &self.entries[self.tail_start..]
    }

    pub fn sups(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn max_sup(&self) -> f64 {
        self.sups().fold(0.0, f64::max)
    }

    /// Profile with every sup multiplied by `ε^m`.
    pub fn scaled_by_eps_power(&self, m: f64) -> GrowthProfile {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.1 *= e.0.powf(m);
        }
        out
    }

    /// CSV with header `epsilon,sup`.
    pub fn to_csv(&self) -> Result<String> {
        crate::report::profile_csv(&self.entries, "sup")
    }
}

/// Sup over the scale-aware samples of `K` of `f(grid index, ε, x)`, for every ε.
///
/// A NaN value is recorded as `+∞`.
pub fn sup_over_samples<F>(grid: &EpsilonGrid, sampler: &Sampler, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, f64, &[f64]) -> Result<f64> + Sync,
{
    grid.values()
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let pts = sampler.points(eps);
            sup_over_cloud(&pts, |x| f(i, eps, x))
        })
        .collect()
}

pub(crate) fn sup_over_cloud<F>(pts: &PointCloud, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let flat = pts.as_flat();
    flat.par_chunks_exact(pts.dim().max(1))
        .map(|x| f(x).map(|v| if v.is_nan() { f64::INFINITY } else { v.abs() }))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// All multi-indices of length `dim` with total order `≤ max_order`, graded,
/// in the coefficient order of [`Jet`].
pub fn multi_indices(dim: usize, max_order: usize) -> Vec<Vec<usize>> {
    Jet::constant(dim, max_order, 0.0)
        .partials_snapped()
        .into_iter()
        .map(|(alpha, _)| alpha)
        .collect()
}

/// Profile of `sup_K |∂^α u_ε|`.
pub fn growth_profile(u: &NetFunction, k: &CompactBox, alpha: &[usize]) -> Result<GrowthProfile> {
    check_alpha(u, k, alpha)?;
    let sampler = Sampler::new(k)?;
    let order: usize = alpha.iter().sum();
    let sups = sup_over_samples(u.grid(), &sampler, |i, _, x| {
        Ok(u.member(i).taylor(x, order).partial_snapped(alpha).expect("alpha within order"))
    })?;
    Ok(GrowthProfile::new(
        format!("d{alpha:?} u"),
        alpha.to_vec(),
        Some(k.clone()),
        u.grid(),
        sups,
    ))
}

/// Profiles for every multi-index up to `max_order`, from one jet per sample point.
pub fn growth_profiles(u: &NetFunction, k: &CompactBox, max_order: usize) -> Result<Vec<GrowthProfile>> {
    if k.dim() != u.dim() {
        return Err(Error::Config(format!(
            "box of dimension {} for a net on R^{}",
            k.dim(),
            u.dim()
        )));
    }
    if max_order > u.max_order() {
        return Err(Error::Capability(format!(
            "derivative order {max_order} exceeds max_order {}",
            u.max_order()
        )));
    }
    let sampler = Sampler::new(k)?;
    let alphas = multi_indices(u.dim(), max_order);
    let per_eps: Vec<Vec<f64>> = u
        .grid()
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let pts = sampler.points(eps);
            let member = u.member(i);
            pts.as_flat()
                .par_chunks_exact(u.dim())
                .map(|x| {
                    let jet = member.taylor(x, max_order);
                    jet.partials_snapped()
                        .into_iter()
                        .map(|(_, v)| if v.is_nan() { f64::INFINITY } else { v.abs() })
                        .collect::<Vec<f64>>()
                })
                .reduce(
                    || vec![0.0; alphas.len()],
                    |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
                )
        })
        .collect();
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(j, alpha)| {
            let sups = per_eps.iter().map(|row| row[j]).collect();
            GrowthProfile::new(format!("d{alpha:?} u"), alpha.clone(), Some(k.clone()), u.grid(), sups)
        })
        .collect())
}

fn check_alpha(u: &NetFunction, k: &CompactBox, alpha: &[usize]) -> Result<()> {
    if alpha.len() != u.dim() || k.dim() != u.dim() {
        return Err(Error::Config(format!(
            "net on R^{} queried with multi-index {alpha:?} on a {}-dimensional box",
            u.dim(),
            k.dim()
        )));
    }
    let order: usize = alpha.iter().sum();
    if order > u.max_order() {
        return Err(Error::Capability(format!(
            "derivative order {order} exceeds max_order {}",
            u.max_order()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Negligible,
    Moderate(u32),
    LogType,
    Bounded,
    Divergent,
}

impl Verdict {
    /// Bounded on the box uniformly in ε (including decaying nets).
    pub fn is_bounded(self) -> bool {
        matches!(self, Verdict::Negligible | Verdict::Bounded | Verdict::Moderate(0))
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Negligible => "Negligible",
            Verdict::Moderate(_) => "Moderate",
            Verdict::LogType => "LogType",
            Verdict::Bounded => "Bounded",
            Verdict::Divergent => "Divergent",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Moderate(n) => write!(f, "Moderate({n})"),
            v => f.write_str(v.name()),
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Verdict> {
        let s = s.trim();
        match s {
            "Negligible" => Ok(Verdict::Negligible),
            "LogType" => Ok(Verdict::LogType),
            "Bounded" => Ok(Verdict::Bounded),
            "Divergent" => Ok(Verdict::Divergent),
            _ => s
                .strip_prefix("Moderate(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.trim().parse().ok())
                .map(Verdict::Moderate)
                .ok_or_else(|| Error::Config(format!("unknown verdict `{s}`"))),
        }
    }
}

/// Which branch of the decision rule produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    AbsFloor,
    SlopeAboveMMax,
    Oscillating,
    RatioConstant,
    FlatSlope,
    PolynomialBound,
    SuperPolynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticClass {
    pub verdict: Verdict,
    /// Fitted `ln sup` against `ln ε`. Below the absolute floor it is fitted to
    /// the unclamped positive values and `None` if fewer than two exist.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub residual: Option<f64>,
    /// `max/min` of `sup / |log ε|` over the tail, when defined.
    pub ratio_spread: Option<f64>,
    pub rule: Rule,
    pub low_confidence: bool,
    pub thresholds: Thresholds,
}

impl AsymptoticClass {
    pub fn is_negligible(&self) -> bool {
        self.verdict == Verdict::Negligible
    }
}

#[derive(Serialize)]
struct AsymptoticClassJson<'a> {
    verdict: &'static str,
    #[serde(rename = "N")]
    n: Option<u32>,
    slope: Option<f64>,
    residual: Option<f64>,
    intercept: Option<f64>,
    ratio_spread: Option<f64>,
    rule: Rule,
    low_confidence: bool,
    thresholds: &'a Thresholds,
}

impl Serialize for AsymptoticClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AsymptoticClassJson {
            verdict: self.verdict.name(),
            n: match self.verdict {
                Verdict::Moderate(n) => Some(n),
                _ => None,
            },
            slope: self.slope,
            residual: self.residual,
            intercept: self.intercept,
            ratio_spread: self.ratio_spread,
            rule: self.rule,
            low_confidence: self.low_confidence,
            thresholds: &self.thresholds,
        }
        .serialize(s)
    }
}

/// Apply the decision rule to the tail of a profile.
pub fn classify(profile: &GrowthProfile, t: &Thresholds) -> Result<AsymptoticClass> {
    if t.m_max < 2 {
        return Err(Error::Config(format!("m_max {} must be at least 2", t.m_max)));
    }
    let tail = profile.tail();
    if tail.len() < MIN_TAIL_LEN {
        return Err(Error::InsufficientData {
            available: tail.len(),
            required: MIN_TAIL_LEN,
        });
    }
    let mut class = AsymptoticClass {
        verdict: Verdict::Negligible,
        slope: None,
        intercept: None,
        residual: None,
        ratio_spread: None,
        rule: Rule::AbsFloor,
        low_confidence: false,
        thresholds: *t,
    };
    if tail.iter().all(|&(_, s)| s <= t.abs_floor) {
        // evidence only: the decay rate of the unclamped values, when measurable
        let raw: Vec<(f64, f64)> = tail.iter().filter(|&&(_, s)| s > 0.0).map(|&(e, s)| (e.ln(), s.ln())).collect();
        if raw.len() >= 2 {
            let fit = least_squares(&raw);
            class.slope = Some(fit.slope);
            class.intercept = Some(fit.intercept);
            class.residual = Some(fit.residual);
        }
        return Ok(class);
    }
    if tail.iter().any(|&(_, s)| !s.is_finite()) {
        class.verdict = Verdict::Divergent;
        class.rule = Rule::SuperPolynomial;
        return Ok(class);
    }

    let pts: Vec<(f64, f64)> = tail.iter().map(|&(e, s)| (e.ln(), s.max(t.abs_floor).ln())).collect();
    let fit = least_squares(&pts);
    class.slope = Some(fit.slope);
    class.intercept = Some(fit.intercept);
    class.residual = Some(fit.residual);

    let ratios: Vec<f64> = tail.iter().map(|&(e, s)| s / e.ln().abs()).collect();
    let rmin = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().copied().fold(0.0, f64::max);
    if rmin > 0.0 {
        class.ratio_spread = Some(rmax / rmin);
    }

    if fit.slope >= t.m_max as f64 - t.slope_tol {
        class.rule = Rule::SlopeAboveMMax;
        return Ok(class);
    }

    let monotone = tail.windows(2).all(|w| w[1].1 >= w[0].1) || tail.windows(2).all(|w| w[1].1 <= w[0].1);
    if fit.residual > t.residual_max && !monotone {
        class.verdict = Verdict::Divergent;
        class.rule = Rule::Oscillating;
        class.low_confidence = true;
        return Ok(class);
    }

    let flat = fit.slope.abs() <= t.slope_tol;
    if flat && class.ratio_spread.is_some_and(|r| r <= 1.0 + t.ratio_tol) {
        class.verdict = Verdict::LogType;
        class.rule = Rule::RatioConstant;
        return Ok(class);
    }
    if flat {
        class.verdict = Verdict::Bounded;
        class.rule = Rule::FlatSlope;
        return Ok(class);
    }
    let n = (-fit.slope - t.slope_tol).ceil().max(0.0);
    if n <= t.max_moderate_order as f64 {
        class.verdict = Verdict::Moderate(n as u32);
        class.rule = Rule::PolynomialBound;
        return Ok(class);
    }
    class.verdict = Verdict::Divergent;
    class.rule = Rule::SuperPolynomial;
    Ok(class)
}

/// Evidence for an all-derivatives negligibility check.
#[derive(Clone, Debug, Serialize)]
pub struct NegligibilityReport {
    pub negligible: bool,
    pub max_derivative_order: usize,
    pub worst_profile: GrowthProfile,
    pub worst_class: AsymptoticClass,
    pub classes: Vec<(Vec<usize>, AsymptoticClass)>,
    /// Largest tail sup over every checked profile.
    pub max_tail_sup: f64,
}

/// `true` iff every derivative up to `max_derivative_order` classifies as negligible on `K`.
pub fn is_negligible(
    u: &NetFunction,
    k: &CompactBox,
    max_derivative_order: usize,
    t: &Thresholds,
) -> Result<NegligibilityReport> {
    let profiles = growth_profiles(u, k, max_derivative_order)?;
    negligibility_from_profiles(profiles, max_derivative_order, t)
}

pub(crate) fn negligibility_from_profiles(
    profiles: Vec<GrowthProfile>,
    max_derivative_order: usize,
    t: &Thresholds,
) -> Result<NegligibilityReport> {
    let mut classes = Vec::with_capacity(profiles.len());
    for p in &profiles {
        classes.push((p.order.clone(), classify(p, t)?));
    }
    let worst = worst_index(&classes.iter().map(|c| &c.1).collect::<Vec<_>>());
    let negligible = classes.iter().all(|(_, c)| c.is_negligible());
    Ok(NegligibilityReport {
        negligible,
        max_derivative_order,
        max_tail_sup: max_tail_sup(&profiles),
        worst_profile: profiles[worst].clone(),
        worst_class: classes[worst].1.clone(),
        classes,
    })
}

/// Largest tail sup over a set of profiles (`0` for none).
pub fn max_tail_sup(profiles: &[GrowthProfile]) -> f64 {
    profiles
        .iter()
        .flat_map(|p| p.tail().iter().map(|e| e.1))
        .fold(0.0, f64::max)
}

/// Index of the least negligible class: a non-negligible one first, then smallest slope.
pub(crate) fn worst_index(classes: &[&AsymptoticClass]) -> usize {
    let key = |c: &AsymptoticClass| -> (bool, f64) {
        (c.is_negligible(), c.slope.unwrap_or(f64::INFINITY))
    };
    let mut best = 0;
    for (i, c) in classes.iter().enumerate().skip(1) {
        let (a, b) = (key(c), key(classes[best]));
        if (!a.0 && b.0) || (a.0 == b.0 && a.1 < b.1) {
            best = i;
        }
    }
    best
}

/// Per-profile evidence of the log-type check.
#[derive(Clone, Debug, Serialize)]
pub struct LogTypeEntry {
    pub component: usize,
    pub order: Vec<usize>,
    /// `sup / |log ε|` on the tail.
    pub ratios: Vec<f64>,
    /// Largest tail ratio divided by the first one.
    pub growth: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogTypeReport {
    pub log_type: bool,
    /// Largest tail ratio `sup / |log ε|` over every component and first partial.
    pub fitted_constant: f64,
    /// Largest ratio growth over the tail.
    pub worst_growth: f64,
    pub entries: Vec<LogTypeEntry>,
    pub thresholds: Thresholds,
}

/// Log-type check for every component of `v` and every first-order partial.
///
/// A profile passes when its tail ratios `sup / |log ε|` never exceed the first
/// tail ratio by more than a factor `1 + ratio_tol` (up to `abs_floor`).
pub fn log_type_check(v: &NetVectorField, k: &CompactBox, t: &Thresholds) -> Result<LogTypeReport> {
    if v.max_order() < 1 {
        return Err(Error::Capability("log-type check needs first derivatives".into()));
    }
    let mut entries = Vec::new();
    for (ci, c) in v.components().iter().enumerate() {
        for p in growth_profiles(c, k, 1)? {
            entries.push(log_type_entry(ci, &p, t));
        }
    }
    let log_type = entries.iter().all(|e| e.passed);
    let fitted_constant = entries
        .iter()
        .flat_map(|e| e.ratios.iter().copied())
        .fold(0.0, f64::max);
    let worst_growth = entries.iter().map(|e| e.growth).fold(0.0, f64::max);
    Ok(LogTypeReport {
        log_type,
        fitted_constant,
        worst_growth,
        entries,
        thresholds: *t,
    })
}

fn log_type_entry(component: usize, p: &GrowthProfile, t: &Thresholds) -> LogTypeEntry {
    let ratios: Vec<f64> = p.tail().iter().map(|&(e, s)| s / e.ln().abs()).collect();
    let first = ratios[0];
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let passed = ratios.iter().all(|&r| r <= (1.0 + t.ratio_tol) * first + t.abs_floor);
    let growth = if first > 0.0 {
        max / first
    } else if max > t.abs_floor {
        f64::INFINITY
    } else {
        1.0
    };
    LogTypeEntry {
        component,
        order: p.order.clone(),
        ratios,
        growth,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> EpsilonGrid {
        EpsilonGrid::default()
    }

    fn interval() -> CompactBox {
        CompactBox::cube(1, -1.0, 1.0).unwrap()
    }

    fn classify_net(f: impl Fn(f64, &[Jet]) -> Jet + Send + Sync + 'static) -> AsymptoticClass {
        let u = NetFunction::closed_form(&grid(), 1, 2, f);
        let p = growth_profile(&u, &interval(), &[0]).unwrap();
        classify(&p, &Thresholds::default()).unwrap()
    }

    #[test]
    fn constant_eps_profile() {
        let u = NetFunction::closed_form(&grid(), 1, 2, |e, x| x[0].lift(e));
        let p = growth_profile(&u, &interval(), &[0]).unwrap();
        for (e, s) in &p.entries {
            assert_eq!(e, s);
        }
    }

    #[test]
    fn fixed_parabola_profile() {
        let u = NetFunction::closed_form(&grid(), 1, 2, |_, x| &x[0] * &x[0]);
        let k = CompactBox::cube(1, -2.0, 2.0).unwrap();
        let p = growth_profile(&u, &k, &[0]).unwrap();
        assert!(p.entries.iter().all(|&(_, s)| s == 4.0));
    }

    #[test]
    fn eps_is_moderate_zero_not_negligible() {
        let c = classify_net(|e, x| x[0].lift(e));
        assert_eq!(c.verdict, Verdict::Moderate(0));
        assert_relative_eq!(c.slope.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eps_fifth_is_negligible() {
        // on the default grid the whole tail is below the absolute floor
        let c = classify_net(|e, x| x[0].lift(e.powi(5)));
        assert_eq!(c.verdict, Verdict::Negligible);
        assert_eq!(c.rule, Rule::AbsFloor);
        assert_relative_eq!(c.slope.unwrap(), 5.0, epsilon = 1e-9);
        // on a coarse grid the slope itself decides
        let g = EpsilonGrid::geometric(1, 16, 0.8).unwrap();
        let u = NetFunction::closed_form(&g, 1, 2, |e, x| x[0].lift(e.powi(5)));
        let c = classify(&growth_profile(&u, &interval(), &[0]).unwrap(), &Thresholds::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Negligible);
        assert_eq!(c.rule, Rule::SlopeAboveMMax);
        assert_relative_eq!(c.slope.unwrap(), 5.0, epsilon = 1e-9);
    }

    #[test]
    fn log_eps_is_log_type() {
        let c = classify_net(|e, x| x[0].lift(e.ln().abs()));
        assert_eq!(c.verdict, Verdict::LogType);
        assert_relative_eq!(c.ratio_spread.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constants_are_bounded_and_inverse_powers_moderate() {
        assert_eq!(classify_net(|_, x| x[0].lift(2.5)).verdict, Verdict::Bounded);
        assert_eq!(classify_net(|e, x| x[0].lift(1.0 / e)).verdict, Verdict::Moderate(1));
        assert_eq!(classify_net(|e, x| x[0].lift(e.powi(-2))).verdict, Verdict::Moderate(2));
        assert_eq!(classify_net(|e, x| x[0].lift(e.powf(-40.0))).verdict, Verdict::Divergent);
    }

    #[test]
    fn zero_net_hits_absolute_floor() {
        let c = classify_net(|_, x| x[0].lift(0.0));
        assert_eq!(c.verdict, Verdict::Negligible);
        assert_eq!(c.rule, Rule::AbsFloor);
        assert!(c.slope.is_none());
    }

    #[test]
    fn oscillating_net_is_low_confidence() {
        let c = classify_net(|e, x| x[0].lift(if (e.log2().round() as i64) % 2 == 0 { 1.0 } else { 1e-3 }));
        assert_eq!(c.verdict, Verdict::Divergent);
        assert!(c.low_confidence);
    }

    #[test]
    fn short_tail_is_insufficient() {
        let g = EpsilonGrid::geometric(1, 8, 0.5).unwrap();
        let u = NetFunction::closed_form(&g, 1, 2, |e, x| x[0].lift(e));
        let mut p = growth_profile(&u, &interval(), &[0]).unwrap();
        p.tail_start = 6;
        assert!(matches!(
            classify(&p, &Thresholds::default()),
            Err(Error::InsufficientData { available: 2, .. })
        ));
    }

    #[test]
    fn negligibility_of_eps5_sin() {
        let g = EpsilonGrid::geometric(1, 16, 0.8).unwrap();
        let u = NetFunction::closed_form(&g, 1, 2, |e, x| x[0].sin().scale_by(e.powi(5)));
        let r = is_negligible(&u, &interval(), 2, &Thresholds::default()).unwrap();
        assert!(r.negligible);
        assert_eq!(r.classes.len(), 3);
        for (_, c) in &r.classes {
            assert_relative_eq!(c.slope.unwrap(), 5.0, epsilon = 1e-9);
        }
        let x = NetFunction::closed_form(&grid(), 1, 2, |_, x| x[0].clone());
        assert!(!is_negligible(&x, &interval(), 1, &Thresholds::default()).unwrap().negligible);
    }

    #[test]
    fn log_type_examples() {
        let g = grid();
        let k = interval();
        let t = Thresholds::default();
        let smooth = NetVectorField::closed_form(&g, 1, 2, |_, x| vec![x[0].sin()]);
        assert!(log_type_check(&smooth, &k, &t).unwrap().log_type);
        let log = NetVectorField::closed_form(&g, 1, 2, |e, x| vec![x[0].lift(e.ln().abs())]);
        let r = log_type_check(&log, &k, &t).unwrap();
        assert!(r.log_type);
        assert_relative_eq!(r.fitted_constant, 1.0, epsilon = 1e-12);
        let root = NetVectorField::closed_form(&g, 1, 2, |e, x| vec![x[0].lift(e.powf(-0.5))]);
        assert!(!log_type_check(&root, &k, &t).unwrap().log_type);
    }

    #[test]
    fn verdict_round_trips_through_text() {
        for v in [
            Verdict::Negligible,
            Verdict::Moderate(3),
            Verdict::LogType,
            Verdict::Bounded,
            Verdict::Divergent,
        ] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
    }
}
