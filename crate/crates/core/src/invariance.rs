//! Invariance tests for nets under flows, translations and rotations.
//!
//! Every test reduces to residual nets whose growth profiles are classified
//! with [`crate::asymptotics::classify`]; a test passes iff every residual
//! profile is `Negligible`. Derivative-based tests (infinitesimal, axis
//! partial, representative certificate) check all derivatives of the
//! residual up to [`CHECK_ORDER`]; sampled tests (flows, translations,
//! rotations) check values.

use crate::asymptotics::{
    classify, growth_profile, is_negligible, max_tail_sup, worst_index, AsymptoticClass, GrowthProfile, NegligibilityReport,
    Thresholds,
};
use crate::error::{Error, Result};
use crate::flow::{generalized_rotation, AngleAssignment, FlowNet, RotationNet};
use crate::jet::{snap, Jet};
use crate::net::{
    norm, sample_box, ClosedForm, CompactBox, EpsilonGrid, GeneralizedNumber, GeneralizedPoint, NetFunction,
    NetVectorField, Sampler, Smooth, SmoothFunctionHandle, REFERENCE_RADIUS,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{E, PI, SQRT_2};
use std::sync::Arc;

/// Highest derivative order checked by derivative-based tests.
pub const CHECK_ORDER: usize = 1;

/// Multiple of the solver error estimate subtracted from flow residuals.
pub const SOLVER_BAND_FACTOR: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "infinitesimal")]
    Infinitesimal,
    #[serde(rename = "flow_sampled")]
    FlowSampled,
    #[serde(rename = "standard_rotations")]
    StandardRotations,
    #[serde(rename = "generalized_rotations")]
    GeneralizedRotations,
    #[serde(rename = "translation_i")]
    TranslationI,
    #[serde(rename = "translation_ii")]
    TranslationII,
    #[serde(rename = "translation_iii")]
    TranslationIII,
}

/// Outcome of one invariance test with the evidence that decided it.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceVerdict {
    pub method: Method,
    pub passed: bool,
    pub region: Option<CompactBox>,
    pub thresholds: Thresholds,
    /// A non-negligible residual profile if the test failed, otherwise the one closest to failing.
    pub worst_profile: GrowthProfile,
    pub worst_class: AsymptoticClass,
    pub profiles_checked: usize,
    /// Largest tail sup over every residual profile checked.
    pub max_tail_residual: f64,
    pub note: Option<String>,
}

impl InvarianceVerdict {
    fn from_profiles(
        method: Method,
        region: Option<CompactBox>,
        profiles: Vec<GrowthProfile>,
        t: &Thresholds,
    ) -> Result<InvarianceVerdict> {
        if profiles.is_empty() {
            return Err(Error::Config("invariance test produced no residual profiles".into()));
        }
        let classes = profiles.iter().map(|p| classify(p, t)).collect::<Result<Vec<_>>>()?;
        let w = worst_index(&classes.iter().collect::<Vec<_>>());
        let max_tail_residual = max_tail_sup(&profiles);
        Ok(InvarianceVerdict {
            max_tail_residual,
            method,
            passed: classes.iter().all(AsymptoticClass::is_negligible),
            region,
            thresholds: *t,
            worst_class: classes[w].clone(),
            worst_profile: profiles.into_iter().nth(w).expect("index in range"),
            profiles_checked: classes.len(),
            note: None,
        })
    }

    fn from_report(method: Method, region: &CompactBox, r: NegligibilityReport, t: &Thresholds) -> InvarianceVerdict {
        InvarianceVerdict {
            method,
            passed: r.negligible,
            region: Some(region.clone()),
            thresholds: *t,
            profiles_checked: r.classes.len(),
            max_tail_residual: r.max_tail_sup,
            worst_profile: r.worst_profile,
            worst_class: r.worst_class,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> InvarianceVerdict {
        self.note = Some(note.into());
        self
    }

    /// CSV `epsilon,residual` of the worst profile.
    pub fn to_csv(&self) -> Result<String> {
        crate::report::profile_csv(&self.worst_profile.entries, "residual")
    }
}

/// Member of a first-order operator applied to a smooth function.
#[derive(Clone)]
enum Operator {
    /// `∂_axis u`.
    Axis(usize),
    /// `Σ ξ_i ∂_i u`.
    Field(Vec<SmoothFunctionHandle>),
}

struct OperatorMember {
    u: SmoothFunctionHandle,
    op: Operator,
    max_order: usize,
}

/// `true` when `x` are the identity jets at their base point (plain Taylor seeds).
fn is_seed(x: &[Jet]) -> bool {
    let n = x.len();
    x.iter().enumerate().all(|(i, j)| {
        j.nvars() == n
            && j.coefficients()[1..]
                .iter()
                .enumerate()
                .all(|(c, &v)| if c < n { v == if c == i { 1.0 } else { 0.0 } } else { v == 0.0 })
    })
}

impl Smooth for OperatorMember {
    fn arity(&self) -> usize {
        self.u.arity()
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn eval_jet(&self, x: &[Jet]) -> Jet {
        let k = x[0].order();
        let x0: Vec<f64> = x.iter().map(Jet::value).collect();
        let s0: Vec<f64> = x.iter().map(Jet::value_scale).collect();
        let tu = self.u.eval_jet(&Jet::seed_with_scale(&x0, &s0, k + 1));
        let local = match &self.op {
            Operator::Axis(a) => tu.derivative(*a),
            Operator::Field(xi) => {
                let base = Jet::seed_with_scale(&x0, &s0, k);
                let mut acc = Jet::constant(x0.len(), k, 0.0);
                for (i, c) in xi.iter().enumerate() {
                    acc = &acc + &(&c.eval_jet(&base) * &tu.derivative(i));
                }
                acc
            }
        };
        if k == 0 || is_seed(x) {
            local
        } else {
            local.compose(x)
        }
    }
}

/// `ξ(u)`: the net `ε ↦ Σᵢ ξ_ε,i ∂ᵢu_ε`.
pub fn lie_derivative(xi: &NetVectorField, u: &NetFunction) -> Result<NetFunction> {
    u.check_same_grid(xi.grid())?;
    if xi.dim() != u.dim() {
        return Err(Error::Config(format!(
            "field on R^{} applied to a net on R^{}",
            xi.dim(),
            u.dim()
        )));
    }
    if u.max_order() < 1 {
        return Err(Error::Capability("Lie derivative needs first derivatives of the net".into()));
    }
    let max_order = (u.max_order() - 1).min(xi.max_order());
    u.map_members(|i, _, m| {
        let coeffs = xi.components().iter().map(|c| Arc::clone(c.member(i))).collect();
        Arc::new(OperatorMember {
            u: Arc::clone(m),
            op: Operator::Field(coeffs),
            max_order,
        }) as SmoothFunctionHandle
    })
}

/// `∂_axis u` as a net (0-based axis).
pub fn derivative_net(u: &NetFunction, axis: usize) -> Result<NetFunction> {
    if axis >= u.dim() {
        return Err(Error::Config(format!("axis {axis} out of range for a net on R^{}", u.dim())));
    }
    if u.max_order() < 1 {
        return Err(Error::Capability("derivative net needs first derivatives".into()));
    }
    let max_order = u.max_order() - 1;
    u.map_members(|_, _, m| {
        Arc::new(OperatorMember {
            u: Arc::clone(m),
            op: Operator::Axis(axis),
            max_order,
        }) as SmoothFunctionHandle
    })
}

/// `a·u + b·w` on a shared grid.
pub fn linear_combination(a: f64, u: &NetFunction, b: f64, w: &NetFunction) -> Result<NetFunction> {
    u.check_same_grid(w.grid())?;
    if u.dim() != w.dim() {
        return Err(Error::Config("nets on different spaces".into()));
    }
    let max_order = u.max_order().min(w.max_order());
    let dim = u.dim();
    u.map_members(|i, _, m| {
        let (m, o) = (Arc::clone(m), Arc::clone(w.member(i)));
        ClosedForm::new(dim, max_order, move |x| {
            &m.eval_jet(x).scale_by(a) + &o.eval_jet(x).scale_by(b)
        })
        .handle()
    })
}

fn check_order(u: &NetFunction) -> usize {
    CHECK_ORDER.min(u.max_order())
}

/// Infinitesimal criterion: `ξ(u)` negligible on `K` with derivatives up to [`CHECK_ORDER`].
pub fn infinitesimal_test(
    xi: &NetVectorField,
    u: &NetFunction,
    k: &CompactBox,
    t: &Thresholds,
) -> Result<InvarianceVerdict> {
    let l = lie_derivative(xi, u)?;
    let r = is_negligible(&l, k, check_order(&l), t)?;
    Ok(InvarianceVerdict::from_report(Method::Infinitesimal, k, r, t))
}

/// Standard family of generalized numbers used as shifts and flow times:
/// constants `1/2, π/2, π`, and `ε`, `√ε`, `|log ε|`, `sin(1/ε)`.
pub fn default_etas(grid: &EpsilonGrid) -> Vec<GeneralizedNumber> {
    vec![
        GeneralizedNumber::constant(grid, 0.5),
        GeneralizedNumber::new(grid, "pi/2", |_| PI / 2.0),
        GeneralizedNumber::new(grid, "pi", |_| PI),
        GeneralizedNumber::new(grid, "eps", |e| e),
        GeneralizedNumber::new(grid, "sqrt(eps)", f64::sqrt),
        GeneralizedNumber::new(grid, "|log eps|", |e| e.ln().abs()),
        GeneralizedNumber::new(grid, "sin(1/eps)", |e| (1.0 / e).sin()),
    ]
}

/// Sample points for point-based tests: the resolution-9 tensor grid of `K`
/// as constant points, and `ε·y` for `y` on the resolution-9 grid of
/// `[−1, 1]ⁿ` whenever `ε·y ∈ K` for every grid ε.
pub fn default_points(grid: &EpsilonGrid, k: &CompactBox) -> Result<Vec<GeneralizedPoint>> {
    let mut out: Vec<GeneralizedPoint> = sample_box(&k.with_resolution(9)?)?
        .iter()
        .map(|p| GeneralizedPoint::constant(grid, p))
        .collect();
    let reference = CompactBox::cube(k.dim(), -REFERENCE_RADIUS, REFERENCE_RADIUS)?.with_resolution(9)?;
    for y in sample_box(&reference)? {
        let inside = grid
            .values()
            .iter()
            .all(|&e| k.contains(&y.iter().map(|v| e * v).collect::<Vec<_>>()));
        if inside && y.iter().any(|&v| v != 0.0) {
            let bound = grid.values()[0] * norm(&y);
            let label = format!("eps*{y:?}");
            out.push(GeneralizedPoint::new(grid, label, bound, move |e| y.iter().map(|v| e * v).collect())?);
        }
    }
    Ok(out)
}

/// `|a − b|`, or `0` when the difference is at rounding level of the operands.
fn snapped_difference(a: (f64, f64), b: (f64, f64)) -> f64 {
    snap(a.0 - b.0, a.1 + b.1).abs()
}

/// Flow-sampled criterion: `u(Φ(η, x̃)) − u(x̃)` negligible for every shift net
/// `η` and generalized point `x̃`.
///
/// For numeric flows each residual is reduced by `SOLVER_BAND_FACTOR·|∇u|·err`,
/// with `err` the step-doubling error estimate of `Φ`.
pub fn flow_invariance_test(
    flow: &FlowNet,
    u: &NetFunction,
    etas: &[GeneralizedNumber],
    points: &[GeneralizedPoint],
    t: &Thresholds,
) -> Result<InvarianceVerdict> {
    u.check_same_grid(flow.grid())?;
    if flow.dim() != u.dim() {
        return Err(Error::Config("flow and net live on different spaces".into()));
    }
    if etas.is_empty() || points.is_empty() {
        return Err(Error::Config("flow-sampled test needs shift nets and points".into()));
    }
    for p in points {
        if p.dim() != u.dim() || p.grid() != u.grid() {
            return Err(Error::Config(format!("point `{}` does not match the net", p.label())));
        }
        p.check_bound()?;
    }
    let (lo, hi) = flow.span();
    for eta in etas {
        if eta.grid() != u.grid() {
            return Err(Error::Config(format!("shift `{}` uses a different grid", eta.label())));
        }
        if eta.values().iter().any(|&v| !(v >= lo && v <= hi)) {
            return Err(Error::Precondition(format!(
                "shift `{}` leaves the flow span [{lo}, {hi}]",
                eta.label()
            )));
        }
    }
    let band = !flow.is_analytic() && u.max_order() >= 1;
    let grid = u.grid();
    // rows[ε][eta][point]
    let rows: Vec<Result<Vec<Vec<f64>>>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let m = u.member(i);
            etas.iter()
                .map(|eta| {
                    let map = flow.at_time(i, eta.at_index(i))?;
                    points
                        .iter()
                        .map(|p| {
                            let x = p.at_index(i)?;
                            let y = map.apply_with_error(x)?;
                            let before = m.eval_scaled(x, &x.iter().map(|v| v.abs()).collect::<Vec<_>>());
                            let after = m.eval_scaled(&y.x, &y.scales);
                            let mut r = snapped_difference(after, before);
                            if band && y.error > 0.0 {
                                let g = m.taylor(&y.x, 1);
                                let grad: Vec<f64> = g.coefficients()[1..].to_vec();
                                r = (r - SOLVER_BAND_FACTOR * norm(&grad) * y.error).max(0.0);
                            }
                            Ok(if r.is_nan() { f64::INFINITY } else { r })
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<Vec<f64>>>>()
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut profiles = Vec::with_capacity(etas.len() * points.len());
    for (a, eta) in etas.iter().enumerate() {
        for (b, p) in points.iter().enumerate() {
            let sups = rows.iter().map(|r| r[a][b]).collect();
            profiles.push(GrowthProfile::new(
                format!("u(Phi({}, {})) - u({})", eta.label(), p.label(), p.label()),
                vec![0; u.dim()],
                None,
                grid,
                sups,
            ));
        }
    }
    InvarianceVerdict::from_profiles(Method::FlowSampled, None, profiles, t)
}

/// One profile `sup_K |u_ε(A_ε x) − u_ε(x)|` per family of per-ε matrices.
///
/// `u_ε(x)` is evaluated once per sample and shared by every family.
fn rotation_profiles(u: &NetFunction, k: &CompactBox, families: &[(String, Vec<DMatrix<f64>>)]) -> Result<Vec<GrowthProfile>> {
    let sampler = Sampler::new(k)?;
    let n = u.dim();
    let grid = u.grid();
    let rows: Vec<Vec<f64>> = grid
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let m = u.member(i);
            let pts = sampler.points(eps);
            let mut sups = vec![0.0f64; families.len()];
            let mut y = vec![0.0; n];
            let mut ys = vec![0.0; n];
            for x in pts.iter() {
                let xs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                let before = m.eval_scaled(x, &xs);
                for (sup, (_, mats)) in sups.iter_mut().zip(families) {
                    let a = &mats[i];
                    for r in 0..n {
                        let (mut acc, mut sc) = (0.0, 0.0);
                        for c in 0..n {
                            acc += a[(r, c)] * x[c];
                            sc += a[(r, c)].abs() * xs[c];
                        }
                        y[r] = acc;
                        ys[r] = sc;
                    }
                    let d = snapped_difference(m.eval_scaled(&y, &ys), before);
                    *sup = sup.max(if d.is_nan() { f64::INFINITY } else { d });
                }
            }
            sups
        })
        .collect();
    Ok(families
        .iter()
        .enumerate()
        .map(|(j, (label, _))| {
            GrowthProfile::new(label.clone(), vec![0; n], Some(k.clone()), grid, rows.iter().map(|r| r[j]).collect())
        })
        .collect())
}

/// Net `x ↦ u_ε(x + η_ε e_axis) − u_ε(x)`.
fn shift_residual(u: &NetFunction, axis: usize, eta: &GeneralizedNumber) -> Result<NetFunction> {
    let dim = u.dim();
    u.map_members(|i, _, m| {
        let (m, h) = (Arc::clone(m), eta.at_index(i));
        ClosedForm::new(dim, u.max_order(), move |x| {
            let mut y = x.to_vec();
            y[axis] = y[axis].add_const(h);
            &m.eval_jet(&y) - &m.eval_jet(x)
        })
        .handle()
    })
}

fn order0_profile(r: &NetFunction, k: &CompactBox, label: String) -> Result<GrowthProfile> {
    let mut p = growth_profile(r, k, &vec![0; r.dim()])?;
    p.label = label;
    Ok(p)
}

/// Sixteen classical angles: quarter turns, common fractions of `π` and a few
/// angles that are irrational multiples of `π`.
pub fn default_angles() -> Vec<f64> {
    vec![
        PI / 2.0,
        PI,
        3.0 * PI / 2.0,
        PI / 4.0,
        PI / 3.0,
        PI / 6.0,
        2.0 * PI / 3.0,
        5.0 * PI / 4.0,
        7.0 * PI / 4.0,
        1.0,
        SQRT_2,
        E,
        0.1,
        2.5,
        4.0,
        5.5,
    ]
}

/// Every coordinate plane `(i, j)`, `i < j`, 0-based.
pub fn all_planes(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn plane_rotation(n: usize, (i, j): (usize, usize), theta: f64) -> DMatrix<f64> {
    let mut a = DMatrix::identity(n, n);
    let (s, c) = theta.sin_cos();
    a[(i, i)] = c;
    a[(j, j)] = c;
    a[(j, i)] = s;
    a[(i, j)] = -s;
    a
}

fn check_rotation_setup(u: &NetFunction, k: &CompactBox) -> Result<()> {
    if u.dim() < 2 {
        return Err(Error::Config("rotations need dimension at least 2".into()));
    }
    if k.dim() != u.dim() {
        return Err(Error::Config("box and net dimensions differ".into()));
    }
    Ok(())
}

/// Classical rotations: `sup_K |u_ε(Ax) − u_ε(x)|` negligible for every sampled
/// rotation `A` by `angles` in `planes` (0-based pairs).
pub fn standard_rotation_test(
    u: &NetFunction,
    k: &CompactBox,
    angles: &[f64],
    planes: &[(usize, usize)],
    t: &Thresholds,
) -> Result<InvarianceVerdict> {
    check_rotation_setup(u, k)?;
    let n = u.dim();
    let mut families = Vec::new();
    for &(i, j) in planes {
        if !(i < j && j < n) {
            return Err(Error::Config(format!("rotation plane ({i}, {j}) invalid in dimension {n}")));
        }
        for &theta in angles {
            let a = plane_rotation(n, (i, j), theta);
            families.push((
                format!("rotation by {theta} in plane ({}, {})", i + 1, j + 1),
                vec![a; u.grid().len()],
            ));
        }
    }
    let profiles = rotation_profiles(u, k, &families)?;
    InvarianceVerdict::from_profiles(Method::StandardRotations, Some(k.clone()), profiles, t)
}

/// Standard generalized-angle assignments: in every plane, `|log ε|`,
/// `sin(1/ε)`, `ε`, `√ε` and the constant `π/2`; in dimension ≥ 3 also
/// `|log ε|` in all planes at once.
pub fn default_angle_assignments(grid: &EpsilonGrid, n: usize) -> Vec<Vec<AngleAssignment>> {
    let family = [
        GeneralizedNumber::new(grid, "|log eps|", |e| e.ln().abs()),
        GeneralizedNumber::new(grid, "sin(1/eps)", |e| (1.0 / e).sin()),
        GeneralizedNumber::new(grid, "eps", |e| e),
        GeneralizedNumber::new(grid, "sqrt(eps)", f64::sqrt),
        GeneralizedNumber::new(grid, "pi/2", |_| PI / 2.0),
    ];
    let planes = all_planes(n);
    let mut out: Vec<Vec<AngleAssignment>> = planes
        .iter()
        .flat_map(|&p| family.iter().map(move |a| vec![(p, a.clone())]))
        .collect();
    if planes.len() > 1 {
        out.push(planes.iter().map(|&p| (p, family[0].clone())).collect());
    }
    out
}

/// Generalized rotations `A_ε = exp(Σ α_ij(ε) S_ij)`: `sup_K |u_ε(A_ε x) − u_ε(x)|`
/// negligible for every assignment.
pub fn generalized_rotation_test(
    u: &NetFunction,
    k: &CompactBox,
    assignments: &[Vec<AngleAssignment>],
    t: &Thresholds,
) -> Result<InvarianceVerdict> {
    check_rotation_setup(u, k)?;
    let mut families = Vec::with_capacity(assignments.len());
    for alphas in assignments {
        let rot: RotationNet = generalized_rotation(u.grid(), u.dim(), alphas)?;
        families.push((format!("generalized rotation {}", rot.label()), rot.matrices().to_vec()));
    }
    let profiles = rotation_profiles(u, k, &families)?;
    InvarianceVerdict::from_profiles(Method::GeneralizedRotations, Some(k.clone()), profiles, t)
}

/// A representative with `∂_axis u′_ε ≡ 0` and its certificate.
#[derive(Clone, Debug)]
pub struct InvariantRepresentative {
    pub net: NetFunction,
    pub axis: usize,
    /// Negligibility of `u − u′` on the box.
    pub certificate: NegligibilityReport,
}

impl InvariantRepresentative {
    /// Smallest fitted slope over the difference profiles (`None` if none is measurable).
    pub fn difference_slope(&self) -> Option<f64> {
        self.certificate
            .classes
            .iter()
            .filter_map(|(_, c)| c.slope)
            .reduce(f64::min)
    }
}

/// Slice `u′_ε(x) = u_ε(x with x_axis = 0)`, certified by negligibility of `u − u′` on `K`.
///
/// Requires `∂_axis u` to be negligible on `K`.
pub fn build_invariant_representative(
    u: &NetFunction,
    axis: usize,
    k: &CompactBox,
    t: &Thresholds,
) -> Result<InvariantRepresentative> {
    let d = derivative_net(u, axis)?;
    let pre = is_negligible(&d, k, check_order(&d), t)?;
    if !pre.negligible {
        return Err(Error::Precondition(format!(
            "the axis-{} partial is not negligible ({})",
            axis + 1,
            pre.worst_class.verdict
        )));
    }
    let dim = u.dim();
    let net = u.map_members(|_, _, m| {
        let m = Arc::clone(m);
        ClosedForm::new(dim, u.max_order(), move |x| {
            let mut y = x.to_vec();
            y[axis] = x[axis].lift(0.0);
            m.eval_jet(&y)
        })
        .handle()
    })?;
    let diff = linear_combination(1.0, u, -1.0, &net)?;
    let certificate = is_negligible(&diff, k, check_order(&diff), t)?;
    if !certificate.negligible {
        return Err(Error::ConstructionInsufficient(format!(
            "slice representative differs from the net by a non-negligible net ({})",
            certificate.worst_class.verdict
        )));
    }
    Ok(InvariantRepresentative { net, axis, certificate })
}

/// Verdicts of the three translation criteria along one axis.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationVerdicts {
    pub axis: usize,
    /// Shifted residuals over sampled shift nets and points.
    pub shifted: InvarianceVerdict,
    /// The axis partial.
    pub derivative: InvarianceVerdict,
    /// A representative with vanishing axis partial.
    pub representative: InvarianceVerdict,
    /// Fitted slope of the representative's difference, when it certified.
    pub difference_slope: Option<f64>,
}

impl TranslationVerdicts {
    pub fn agree(&self) -> bool {
        self.shifted.passed == self.derivative.passed && self.derivative.passed == self.representative.passed
    }

    pub fn all(&self) -> [&InvarianceVerdict; 3] {
        [&self.shifted, &self.derivative, &self.representative]
    }
}

/// Points `ε e_j` concentrating at the origin, one per axis, when inside `K` for every ε.
fn concentrating_points(grid: &EpsilonGrid, k: &CompactBox) -> Result<Vec<GeneralizedPoint>> {
    let n = k.dim();
    let mut out = Vec::new();
    for j in 0..n {
        let unit = |e: f64| -> Vec<f64> { (0..n).map(|c| if c == j { e } else { 0.0 }).collect() };
        if grid.values().iter().all(|&e| k.contains(&unit(e))) {
            out.push(GeneralizedPoint::new(grid, format!("eps*e{}", j + 1), grid.values()[0], unit)?);
        }
    }
    Ok(out)
}

/// The three translation criteria for `axis` (0-based) on `K`.
pub fn translation_tests(
    u: &NetFunction,
    axis: usize,
    k: &CompactBox,
    etas: &[GeneralizedNumber],
    t: &Thresholds,
) -> Result<TranslationVerdicts> {
    if axis >= u.dim() {
        return Err(Error::Config(format!("axis {} out of range for a net on R^{}", axis + 1, u.dim())));
    }
    if k.dim() != u.dim() {
        return Err(Error::Config("box and net dimensions differ".into()));
    }
    if etas.is_empty() {
        return Err(Error::Config("translation test needs shift nets".into()));
    }

    let points = concentrating_points(u.grid(), k)?;
    let mut profiles = Vec::new();
    for eta in etas {
        let r = shift_residual(u, axis, eta)?;
        profiles.push(order0_profile(&r, k, format!("shift by {} along x{}", eta.label(), axis + 1))?);
        for p in &points {
            let sups = (0..u.grid().len())
                .map(|i| Ok(r.member(i).eval(p.at_index(i)?).abs()))
                .collect::<Result<Vec<f64>>>()?;
            profiles.push(GrowthProfile::new(
                format!("shift by {} at {}", eta.label(), p.label()),
                vec![0; u.dim()],
                None,
                u.grid(),
                sups,
            ));
        }
    }
    let shifted = InvarianceVerdict::from_profiles(Method::TranslationI, Some(k.clone()), profiles, t)?;

    let d = derivative_net(u, axis)?;
    let dr = is_negligible(&d, k, check_order(&d), t)?;
    let derivative = InvarianceVerdict::from_report(Method::TranslationII, k, dr.clone(), t);

    let (representative, difference_slope) = match build_invariant_representative(u, axis, k, t) {
        Ok(rep) => {
            let slope = rep.difference_slope();
            (
                InvarianceVerdict::from_report(Method::TranslationIII, k, rep.certificate, t),
                slope,
            )
        }
        Err(Error::Precondition(msg)) => (
            InvarianceVerdict::from_report(Method::TranslationIII, k, dr, t)
                .with_note(format!("no representative built: {msg}")),
            None,
        ),
        Err(Error::ConstructionInsufficient(msg)) => {
            let rep_net = slice_difference(u, axis)?;
            let cert = is_negligible(&rep_net, k, check_order(&rep_net), t)?;
            (
                InvarianceVerdict::from_report(Method::TranslationIII, k, cert, t)
                    .with_note(format!("construction insufficient: {msg}")),
                None,
            )
        }
        Err(e) => return Err(e),
    };
    Ok(TranslationVerdicts {
        axis,
        shifted,
        derivative,
        representative,
        difference_slope,
    })
}

fn slice_difference(u: &NetFunction, axis: usize) -> Result<NetFunction> {
    let dim = u.dim();
    u.map_members(|_, _, m| {
        let m = Arc::clone(m);
        ClosedForm::new(dim, u.max_order(), move |x| {
            let mut y = x.to_vec();
            y[axis] = x[axis].lift(0.0);
            &m.eval_jet(x) - &m.eval_jet(&y)
        })
        .handle()
    })
}

/// `v_ε(θ) = u_ε(r_ε cos θ, r_ε sin θ)` and whether it is a generalized constant.
#[derive(Clone, Debug)]
pub struct PolarReduction {
    pub v: NetFunction,
    /// Negligibility of `∂_θ v` on `[0, 2π]`.
    pub constancy: NegligibilityReport,
    pub constant: bool,
}

/// Restrict a planar net to the circle of radius `r_ε`.
pub fn polar_reduce_2d(u: &NetFunction, r: &GeneralizedNumber, t: &Thresholds) -> Result<PolarReduction> {
    if u.dim() != 2 {
        return Err(Error::Config("polar reduction needs a net on R^2".into()));
    }
    if r.grid() != u.grid() {
        return Err(Error::Config("radius net uses a different grid".into()));
    }
    if r.values().iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Precondition(format!("radius `{}` must be finite and nonnegative", r.label())));
    }
    let v = u.map_members(|i, _, m| {
        let (m, rad) = (Arc::clone(m), r.at_index(i));
        ClosedForm::new(1, u.max_order(), move |th| {
            m.eval_jet(&[th[0].cos().scale_by(rad), th[0].sin().scale_by(rad)])
        })
        .handle()
    })?;
    let circle = CompactBox::new(vec![(0.0, 2.0 * PI)])?;
    let dv = derivative_net(&v, 0)?;
    let constancy = is_negligible(&dv, &circle, check_order(&dv), t)?;
    Ok(PolarReduction {
        v,
        constant: constancy.negligible,
        constancy,
    })
}

/// `w_ε(a, b) = u_ε(…, a at slot i, …, b at slot j, …)` with the remaining
/// coordinates frozen at a generalized point (0-based `i ≠ j`).
pub fn planar_slice(u: &NetFunction, i: usize, j: usize, fixed: &GeneralizedPoint) -> Result<NetFunction> {
    let n = u.dim();
    if n < 3 {
        return Err(Error::Config("planar slices need dimension at least 3".into()));
    }
    if i == j || i >= n || j >= n {
        return Err(Error::Config(format!("invalid slice slots ({i}, {j}) in dimension {n}")));
    }
    if fixed.dim() != n - 2 || fixed.grid() != u.grid() {
        return Err(Error::Config(format!("frozen point must have {} coordinates on the net's grid", n - 2)));
    }
    fixed.check_bound()?;
    u.map_members(|idx, _, m| {
        let m = Arc::clone(m);
        let frozen = fixed.at_index(idx).expect("bound checked").to_vec();
        ClosedForm::new(2, u.max_order(), move |ab| {
            let mut rest = frozen.iter();
            let x: Vec<Jet> = (0..n)
                .map(|c| {
                    if c == i {
                        ab[0].clone()
                    } else if c == j {
                        ab[1].clone()
                    } else {
                        ab[0].lift(*rest.next().expect("n - 2 frozen coordinates"))
                    }
                })
                .collect();
            m.eval_jet(&x)
        })
        .handle()
    })
}
