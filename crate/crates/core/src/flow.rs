//! Generalized flows of net vector fields.
//!
//! Each member `ξ_ε` is integrated with fixed-step classical RK4. The time mesh
//! (`N = ⌈|t|/h₀⌉` steps of size `t/N`) is shared by every ε; members whose
//! first-order size grows relative to the coarsest member split each mesh step
//! into `m_ε` equal substeps, so log-type stiffness is resolved without
//! changing the mesh. `Φ_ε(0, x) = x` holds bitwise.
//!
//! Affine ε-independent fields `ξ(x) = Ax + b` also have an analytic flow,
//! `Φ(t, x) = exp(tA)x + (∫₀ᵗ exp(sA) ds) b`, computed with an augmented
//! matrix exponential.

use crate::asymptotics::{classify, log_type_check, sup_over_samples, AsymptoticClass, GrowthProfile, Thresholds};
use crate::error::{Error, Result};
use crate::net::{norm, CompactBox, EpsilonGrid, GeneralizedNumber, GeneralizedPoint, NetVectorField, Sampler};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

/// Default base time step.
pub const DEFAULT_H0: f64 = 1e-3;
/// Half-width of the default safety box `[−10³, 10³]ⁿ`.
pub const DEFAULT_SAFETY_HALF_WIDTH: f64 = 1e3;
/// Half-width of the default global box `[−10, 10]ⁿ` standing in for `ℝⁿ`.
pub const DEFAULT_GLOBAL_HALF_WIDTH: f64 = 10.0;
/// Upper limit on the substeps per mesh step.
pub const MAX_SUBSTEPS: usize = 64;
/// Tolerance budget for group-law residuals.
pub const GROUP_LAW_BUDGET: f64 = 1e-6;

const METRIC: &str = "euclidean";
const GLOBAL_CAVEAT: &str =
    "global boundedness is checked on a finite global box only; fields unbounded outside it are not detected";

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub h0: f64,
    /// Defaults to `[−10³, 10³]ⁿ`.
    pub safety_box: Option<CompactBox>,
    /// Defaults to `[−10, 10]ⁿ`.
    pub global_box: Option<CompactBox>,
    /// Integrate even if the completeness check fails.
    pub allow_incomplete: bool,
    pub thresholds: Thresholds,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            h0: DEFAULT_H0,
            safety_box: None,
            global_box: None,
            allow_incomplete: false,
            thresholds: Thresholds::default(),
        }
    }
}

impl FlowOptions {
    pub fn with_h0(self, h0: f64) -> FlowOptions {
        FlowOptions { h0, ..self }
    }

    pub fn with_safety_box(self, b: CompactBox) -> FlowOptions {
        FlowOptions {
            safety_box: Some(b),
            ..self
        }
    }

    pub fn allowing_incomplete(self) -> FlowOptions {
        FlowOptions {
            allow_incomplete: true,
            ..self
        }
    }

    fn safety(&self, n: usize) -> Result<CompactBox> {
        match &self.safety_box {
            Some(b) => Ok(b.clone()),
            None => CompactBox::cube(n, -DEFAULT_SAFETY_HALF_WIDTH, DEFAULT_SAFETY_HALF_WIDTH),
        }
    }

    fn global(&self, n: usize) -> Result<CompactBox> {
        match &self.global_box {
            Some(b) => Ok(b.clone()),
            None => CompactBox::cube(n, -DEFAULT_GLOBAL_HALF_WIDTH, DEFAULT_GLOBAL_HALF_WIDTH),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::Config(format!("time step h0 must be positive, got {}", self.h0)));
        }
        Ok(())
    }
}

/// Evidence that a field admits a generalized flow.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    /// Both sub-checks passed.
    pub complete: bool,
    pub globally_bounded: bool,
    /// Largest sampled `|ξ_ε(x)|` on the global box over the grid.
    pub bound_estimate: f64,
    pub bound_class: AsymptoticClass,
    pub bound_profile: GrowthProfile,
    pub derivatives_log_type: bool,
    /// Largest tail ratio `sup / |log ε|` over components and first partials.
    pub worst_ratio: f64,
    /// Largest growth of that ratio over the tail.
    pub worst_growth: f64,
    pub metric: &'static str,
    pub global_box: CompactBox,
    pub caveat: &'static str,
}

/// Global boundedness on `global_box` and log-type first-order behavior on `K`.
pub fn check_completeness(
    xi: &NetVectorField,
    k: &CompactBox,
    global_box: &CompactBox,
    t: &Thresholds,
) -> Result<CompletenessReport> {
    if xi.max_order() < 1 {
        return Err(Error::Capability("completeness check needs first derivatives of the field".into()));
    }
    check_dim(xi.dim(), k)?;
    check_dim(xi.dim(), global_box)?;
    let sampler = Sampler::new(global_box)?;
    let sups = sup_over_samples(xi.grid(), &sampler, |i, _, x| Ok(norm(&xi.eval_index(i, x))))?;
    let bound_profile = GrowthProfile::new("|xi|", vec![0; xi.dim()], Some(global_box.clone()), xi.grid(), sups);
    let bound_class = classify(&bound_profile, t)?;
    let globally_bounded = bound_class.verdict.is_bounded();
    let log = log_type_check(xi, k, t)?;
    Ok(CompletenessReport {
        complete: globally_bounded && log.log_type,
        globally_bounded,
        bound_estimate: bound_profile.max_sup(),
        bound_class,
        bound_profile,
        derivatives_log_type: log.log_type,
        worst_ratio: log.fitted_constant,
        worst_growth: log.worst_growth,
        metric: METRIC,
        global_box: global_box.clone(),
        caveat: GLOBAL_CAVEAT,
    })
}

fn check_dim(n: usize, b: &CompactBox) -> Result<()> {
    if b.dim() != n {
        return Err(Error::Config(format!("box of dimension {} for a field on R^{n}", b.dim())));
    }
    Ok(())
}

fn require_complete(xi: &NetVectorField, k: &CompactBox, opts: &FlowOptions) -> Result<()> {
    if opts.allow_incomplete {
        return Ok(());
    }
    let r = check_completeness(xi, k, &opts.global(xi.dim())?, &opts.thresholds)?;
    if !r.complete {
        return Err(Error::NotComplete(format!(
            "globally bounded: {} ({}), log-type derivatives: {} (worst ratio growth {:.3})",
            r.globally_bounded, r.bound_class.verdict, r.derivatives_log_type, r.worst_growth
        )));
    }
    Ok(())
}

/// Number of mesh steps for a time `t`.
fn mesh_steps(t: f64, h0: f64) -> usize {
    if t == 0.0 {
        0
    } else {
        ((t.abs() / h0).ceil() as usize).max(1)
    }
}

/// Substeps per mesh step for every ε: the ratio of the first-order size of
/// `ξ_ε` on `region` to that of the coarsest member, rounded up, capped at
/// [`MAX_SUBSTEPS`].
pub fn substep_factors(xi: &NetVectorField, region: &CompactBox) -> Result<Vec<usize>> {
    let region = region.with_resolution(9)?;
    let sampler = Sampler::new(&region)?;
    let sizes = sup_over_samples(xi.grid(), &sampler, |i, _, x| {
        let mut m = 0.0f64;
        for c in xi.components() {
            let j = c.member(i).taylor(x, 1);
            for v in j.coefficients() {
                m = m.max(v.abs());
            }
        }
        Ok(m)
    })?;
    let base = sizes[0].max(1.0);
    Ok(sizes
        .iter()
        .map(|&s| {
            let r = (s / base).ceil().max(1.0);
            if r.is_finite() {
                (r as usize).min(MAX_SUBSTEPS)
            } else {
                MAX_SUBSTEPS
            }
        })
        .collect())
}

/// One member `ξ_ε` with RK4 work buffers.
struct Rk4<'a> {
    xi: &'a NetVectorField,
    index: usize,
    eps: f64,
    safety: &'a CompactBox,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl<'a> Rk4<'a> {
    fn new(xi: &'a NetVectorField, index: usize, safety: &'a CompactBox) -> Rk4<'a> {
        let n = xi.dim();
        Rk4 {
            xi,
            index,
            eps: xi.grid().values()[index],
            safety,
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
        }
    }

    fn field(xi: &NetVectorField, index: usize, x: &[f64], out: &mut [f64]) {
        xi.eval_index_into(index, x, out);
    }

    fn step(&mut self, x: &mut [f64], h: f64) {
        let n = x.len();
        let [k1, k2, k3, k4] = &mut self.k;
        Self::field(self.xi, self.index, x, k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        Self::field(self.xi, self.index, &self.tmp, k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        Self::field(self.xi, self.index, &self.tmp, k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * k3[i];
        }
        Self::field(self.xi, self.index, &self.tmp, k4);
        for i in 0..n {
            x[i] += h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        }
    }

    /// Integrate from `x0` over time `t` with `steps` mesh steps of `substeps`
    /// substeps each; `visit(k, x)` sees the state after every mesh step.
    /// Returns the end point and per-coordinate rounding scales.
    fn integrate(
        &mut self,
        x0: &[f64],
        t: f64,
        steps: usize,
        substeps: usize,
        mut visit: impl FnMut(usize, &[f64]),
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut x = x0.to_vec();
        let mut scales: Vec<f64> = x0.iter().map(|v| v.abs()).collect();
        if steps == 0 {
            return Ok((x, scales));
        }
        let dt = t / steps as f64;
        let h = dt / substeps as f64;
        let mut prev = x.clone();
        for s in 0..steps {
            for m in 0..substeps {
                self.step(&mut x, h);
                for i in 0..x.len() {
                    scales[i] += (x[i] - prev[i]).abs();
                    prev[i] = x[i];
                }
                if !(x.iter().all(|v| v.is_finite()) && self.safety.contains(&x)) {
                    let time = s as f64 * dt + (m + 1) as f64 * h;
                    return Err(Error::BlowUp { eps: self.eps, t: time });
                }
            }
            visit(s + 1, &x);
        }
        for (s, v) in scales.iter_mut().zip(&x) {
            *s = s.max(v.abs());
        }
        Ok((x, scales))
    }
}

/// First error in grid order, or all values.
fn collect_in_grid_order<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Per-ε sampled solutions of `ẋ = ξ_ε(x)`, `x(t₀) = x₀(ε)`, on a shared mesh.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryNet {
    #[serde(skip)]
    grid: EpsilonGrid,
    dim: usize,
    t0: f64,
    t1: f64,
    times: Vec<f64>,
    substeps: Vec<usize>,
    step_sizes: Vec<f64>,
    initial: GeneralizedPoint,
    states: Vec<Vec<Vec<f64>>>,
}

impl TrajectoryNet {
    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    /// Shared time mesh.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn initial(&self) -> &GeneralizedPoint {
        &self.initial
    }

    /// Substeps per mesh step, per ε.
    pub fn substeps(&self) -> &[usize] {
        &self.substeps
    }

    /// Actual RK4 step size, per ε.
    pub fn step_sizes(&self) -> &[f64] {
        &self.step_sizes
    }

    /// Mesh states of the member at grid index `i`.
    pub fn states(&self, i: usize) -> &[Vec<f64>] {
        &self.states[i]
    }

    pub fn states_at(&self, eps: f64) -> Result<&[Vec<f64>]> {
        Ok(&self.states[self.grid.index_of(eps)?])
    }

    /// `x_ε(t₁)`.
    pub fn endpoint(&self, i: usize) -> &[f64] {
        self.states[i].last().expect("mesh has at least one point")
    }

    /// CSV `epsilon,t,x1..xn`.
    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec!["epsilon".to_string(), "t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        let mut rows = Vec::new();
        for (i, &eps) in self.grid.values().iter().enumerate() {
            for (t, x) in self.times.iter().zip(&self.states[i]) {
                let mut r = vec![eps, *t];
                r.extend_from_slice(x);
                rows.push(r);
            }
        }
        crate::report::table_csv(&header, &rows)
    }
}

/// Solve `ẋ = ξ_ε(x)` from `x₀` on `[t₀, t₁]` for every ε.
pub fn solve_ivp(
    xi: &NetVectorField,
    x0: &GeneralizedPoint,
    t0: f64,
    t1: f64,
    opts: &FlowOptions,
) -> Result<TrajectoryNet> {
    opts.validate()?;
    let n = xi.dim();
    if x0.dim() != n {
        return Err(Error::Config(format!("initial point of dimension {} for a field on R^{n}", x0.dim())));
    }
    if x0.grid() != xi.grid() {
        return Err(Error::Config("initial point and field use different grids".into()));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::Config("time span must be finite".into()));
    }
    x0.check_bound()?;
    let r = x0.bound().max(1.0);
    let local = CompactBox::cube(n, -r, r)?;
    require_complete(xi, &local, opts)?;
    let substeps = substep_factors(xi, &local)?;
    let safety = opts.safety(n)?;

    let span = t1 - t0;
    let steps = mesh_steps(span, opts.h0);
    let dt = if steps == 0 { 0.0 } else { span / steps as f64 };
    let mut times: Vec<f64> = (0..=steps).map(|k| t0 + k as f64 * dt).collect();
    *times.last_mut().expect("nonempty mesh") = t1;

    let results: Vec<Result<Vec<Vec<f64>>>> = (0..xi.grid().len())
        .into_par_iter()
        .map(|i| {
            let start = x0.at_index(i)?.to_vec();
            let mut rk = Rk4::new(xi, i, &safety);
            let mut states = Vec::with_capacity(steps + 1);
            states.push(start.clone());
            rk.integrate(&start, span, steps, substeps[i], |_, x| states.push(x.to_vec()))?;
            Ok(states)
        })
        .collect();
    let states = collect_in_grid_order(results)?;
    let step_sizes = substeps.iter().map(|&m| if steps == 0 { 0.0 } else { dt / m as f64 }).collect();
    Ok(TrajectoryNet {
        grid: xi.grid().clone(),
        dim: n,
        t0,
        t1,
        times,
        substeps,
        step_sizes,
        initial: x0.clone(),
        states,
    })
}

/// Matrix exponential by scaling and squaring with a degree-20 Taylor polynomial.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "matrix exponential of a non-square matrix");
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=20 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Sweep of `max |Φ_ε(t, x)|` over seed points and times.
#[derive(Clone, Debug, Serialize)]
pub struct CBoundedRecord {
    pub seed_box: CompactBox,
    pub span: (f64, f64),
    pub profile: GrowthProfile,
    pub overall_max: f64,
    pub class: AsymptoticClass,
    /// The sweep stays in a bounded set uniformly in ε.
    pub c_bounded: bool,
}

#[derive(Clone, Debug)]
enum FlowKind {
    Numeric {
        field: NetVectorField,
        h0: f64,
        safety: CompactBox,
        substeps: Vec<usize>,
    },
    /// Augmented generator `[[A, b], [0, 0]]`.
    Affine { generator: DMatrix<f64> },
}

/// `Φ_ε(t, x)` for every grid value.
#[derive(Clone, Debug)]
pub struct FlowNet {
    grid: EpsilonGrid,
    dim: usize,
    span: (f64, f64),
    kind: FlowKind,
    c_bounded: Option<CBoundedRecord>,
}

/// A flow value with rounding scales and a solver error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowValue {
    pub x: Vec<f64>,
    pub scales: Vec<f64>,
    /// Estimated Euclidean solver error (step doubling); `0` for analytic flows.
    pub error: f64,
}

/// Generalized flow of `ξ` on `t_span` (which must contain 0), with a c-boundedness sweep over `seed_box`.
pub fn flow(xi: &NetVectorField, t_span: (f64, f64), seed_box: &CompactBox, opts: &FlowOptions) -> Result<FlowNet> {
    opts.validate()?;
    check_span(t_span)?;
    check_dim(xi.dim(), seed_box)?;
    require_complete(xi, seed_box, opts)?;
    let substeps = substep_factors(xi, seed_box)?;
    let mut f = FlowNet {
        grid: xi.grid().clone(),
        dim: xi.dim(),
        span: t_span,
        kind: FlowKind::Numeric {
            field: xi.clone(),
            h0: opts.h0,
            safety: opts.safety(xi.dim())?,
            substeps,
        },
        c_bounded: None,
    };
    f.record_c_bounded(seed_box, &opts.thresholds)?;
    Ok(f)
}

fn check_span((t0, t1): (f64, f64)) -> Result<()> {
    if !(t0 <= 0.0 && 0.0 <= t1) || t0.is_nan() || t1.is_nan() {
        return Err(Error::Config(format!("time span [{t0}, {t1}] must contain 0")));
    }
    Ok(())
}

/// Analytic flow `exp(tA)x` of the linear field `x ↦ Ax`, the same for every ε.
pub fn linear_flow(grid: &EpsilonGrid, a: &DMatrix<f64>) -> Result<FlowNet> {
    affine_flow(grid, a, &DVector::zeros(a.nrows()))
}

/// Analytic flow of the affine field `x ↦ Ax + b`, the same for every ε.
pub fn affine_flow(grid: &EpsilonGrid, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<FlowNet> {
    let n = a.nrows();
    if !a.is_square() || b.len() != n || n == 0 {
        return Err(Error::Config("affine field needs a square matrix and a matching offset".into()));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Config("affine field coefficients must be finite".into()));
    }
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(a);
    g.view_mut((0, n), (n, 1)).copy_from(b);
    Ok(FlowNet {
        grid: grid.clone(),
        dim: n,
        span: (f64::NEG_INFINITY, f64::INFINITY),
        kind: FlowKind::Affine { generator: g },
        c_bounded: None,
    })
}

impl FlowNet {
    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, FlowKind::Affine { .. })
    }

    pub fn c_bounded(&self) -> Option<&CBoundedRecord> {
        self.c_bounded.as_ref()
    }

    /// Restrict the admissible times (required before a c-boundedness sweep of an analytic flow).
    pub fn with_span(mut self, span: (f64, f64)) -> Result<FlowNet> {
        check_span(span)?;
        self.span = span;
        Ok(self)
    }

    /// Substeps per mesh step, per ε (all 1 for analytic flows).
    pub fn substeps(&self) -> Vec<usize> {
        match &self.kind {
            FlowKind::Numeric { substeps, .. } => substeps.clone(),
            FlowKind::Affine { .. } => vec![1; self.grid.len()],
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (a, b) = self.span;
        let slack = 1e-12 * (a.abs().max(b.abs())).min(1e300);
        if !(t.is_finite() && t >= a - slack && t <= b + slack) {
            return Err(Error::Precondition(format!("time {t} outside the flow span [{a}, {b}]")));
        }
        Ok(())
    }

    /// The map `x ↦ Φ_ε(t, x)` for the member at grid index `index`.
    pub fn at_time(&self, index: usize, t: f64) -> Result<FlowMap<'_>> {
        self.check_time(t)?;
        let affine = match &self.kind {
            FlowKind::Affine { generator } if t != 0.0 => {
                let e = expm(&(generator * t));
                let n = self.dim;
                Some((
                    e.view((0, 0), (n, n)).into_owned(),
                    e.view((0, n), (n, 1)).column(0).into_owned(),
                ))
            }
            _ => None,
        };
        Ok(FlowMap {
            flow: self,
            index,
            t,
            affine,
        })
    }

    /// `Φ_ε(t, x)` at grid index `index`.
    pub fn map(&self, index: usize, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.at_time(index, t)?.apply(x)
    }

    /// `Φ_ε(t, x)` addressed by ε.
    pub fn map_at(&self, eps: f64, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.map(self.grid.index_of(eps)?, t, x)
    }

    /// Sweep `max |Φ_ε(t, x)|` over the `3ⁿ` lattice of `seed_box` (corners,
    /// edge midpoints, center) and the flow span, and store the record.
    pub fn record_c_bounded(&mut self, seed_box: &CompactBox, t: &Thresholds) -> Result<&CBoundedRecord> {
        check_dim(self.dim, seed_box)?;
        let (t0, t1) = self.span;
        if !(t0.is_finite() && t1.is_finite()) {
            return Err(Error::Config("c-boundedness sweep needs a finite time span".into()));
        }
        let seeds = lattice3(seed_box);
        let results: Vec<Result<f64>> = (0..self.grid.len())
            .into_par_iter()
            .map(|i| self.sweep_member(i, &seeds))
            .collect();
        let maxima = collect_in_grid_order(results)?;
        let profile = GrowthProfile::new("max |Phi|", vec![0; self.dim], Some(seed_box.clone()), &self.grid, maxima);
        let class = classify(&profile, t)?;
        let record = CBoundedRecord {
            seed_box: seed_box.clone(),
            span: self.span,
            overall_max: profile.max_sup(),
            c_bounded: class.verdict.is_bounded(),
            profile,
            class,
        };
        Ok(self.c_bounded.insert(record))
    }

    fn sweep_member(&self, i: usize, seeds: &[Vec<f64>]) -> Result<f64> {
        let (t0, t1) = self.span;
        let mut best = 0.0f64;
        match &self.kind {
            FlowKind::Numeric {
                field,
                h0,
                safety,
                substeps,
            } => {
                let mut rk = Rk4::new(field, i, safety);
                for x in seeds {
                    best = best.max(norm(x));
                    for t in [t0, t1] {
                        rk.integrate(x, t, mesh_steps(t, *h0), substeps[i], |_, y| best = best.max(norm(y)))?;
                    }
                }
            }
            FlowKind::Affine { .. } => {
                for k in 0..=32 {
                    let t = t0 + (t1 - t0) * k as f64 / 32.0;
                    let m = self.at_time(i, t)?;
                    for x in seeds {
                        best = best.max(norm(&m.apply(x)?));
                    }
                }
            }
        }
        Ok(best)
    }
}

/// Every point whose coordinates are a lower bound, midpoint or upper bound of the box.
fn lattice3(b: &CompactBox) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for [lo, hi] in b.intervals() {
        out = out
            .into_iter()
            .flat_map(|p| {
                [*lo, 0.5 * (lo + hi), *hi].into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// `x ↦ Φ_ε(t, x)` for one member and one time.
pub struct FlowMap<'a> {
    flow: &'a FlowNet,
    index: usize,
    t: f64,
    affine: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl FlowMap<'_> {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(x, false)?.x)
    }

    /// Value, rounding scales and (for numeric flows) a step-doubling error estimate.
    pub fn apply_with_error(&self, x: &[f64]) -> Result<FlowValue> {
        self.evaluate(x, true)
    }

    fn evaluate(&self, x: &[f64], with_error: bool) -> Result<FlowValue> {
        if x.len() != self.flow.dim {
            return Err(Error::Config(format!(
                "point of dimension {} for a flow on R^{}",
                x.len(),
                self.flow.dim
            )));
        }
        if self.t == 0.0 {
            return Ok(FlowValue {
                x: x.to_vec(),
                scales: x.iter().map(|v| v.abs()).collect(),
                error: 0.0,
            });
        }
        match &self.flow.kind {
            FlowKind::Affine { .. } => {
                let (m, c) = self.affine.as_ref().expect("affine map prepared");
                let xs = DVector::from_column_slice(x);
                let y = m * &xs + c;
                let scales = m.abs() * xs.abs() + c.abs();
                Ok(FlowValue {
                    x: y.iter().copied().collect(),
                    scales: scales.iter().copied().collect(),
                    error: 0.0,
                })
            }
            FlowKind::Numeric {
                field,
                h0,
                safety,
                substeps,
            } => {
                let steps = mesh_steps(self.t, *h0);
                let m = substeps[self.index];
                let mut rk = Rk4::new(field, self.index, safety);
                let (y, scales) = rk.integrate(x, self.t, steps, m, |_, _| {})?;
                let error = if with_error {
                    let (fine, _) = rk.integrate(x, self.t, steps, 2 * m, |_, _| {})?;
                    let d: Vec<f64> = y.iter().zip(&fine).map(|(a, b)| a - b).collect();
                    norm(&d) * 16.0 / 15.0
                } else {
                    0.0
                };
                Ok(FlowValue { x: y, scales, error })
            }
        }
    }
}

/// Per-ε group-law residuals `max |Φ(t+s, x) − Φ(t, Φ(s, x))|` over sample points.
#[derive(Clone, Debug, Serialize)]
pub struct GroupLawReport {
    pub t: f64,
    pub s: f64,
    pub points: usize,
    pub budget: f64,
    /// `(ε, residual)` for every grid value.
    pub residuals: Vec<(f64, f64)>,
    pub max_residual: f64,
    pub passed: bool,
}

impl GroupLawReport {
    /// CSV `epsilon,residual`.
    pub fn to_csv(&self) -> Result<String> {
        crate::report::profile_csv(&self.residuals, "residual")
    }
}

/// Check `Φ(t+s, ·) = Φ(t, Φ(s, ·))` on `points` for every ε.
pub fn verify_group_law(flow: &FlowNet, t: f64, s: f64, points: &[Vec<f64>]) -> Result<GroupLawReport> {
    verify_group_law_with_budget(flow, t, s, points, GROUP_LAW_BUDGET)
}

pub fn verify_group_law_with_budget(
    flow: &FlowNet,
    t: f64,
    s: f64,
    points: &[Vec<f64>],
    budget: f64,
) -> Result<GroupLawReport> {
    for time in [t, s, t + s] {
        flow.check_time(time)?;
    }
    if points.is_empty() {
        return Err(Error::Config("group-law check needs at least one point".into()));
    }
    let results: Vec<Result<f64>> = (0..flow.grid.len())
        .into_par_iter()
        .map(|i| {
            let (ts, ms, mt) = (flow.at_time(i, t + s)?, flow.at_time(i, s)?, flow.at_time(i, t)?);
            let mut worst = 0.0f64;
            for x in points {
                let direct = ts.apply(x)?;
                let composed = mt.apply(&ms.apply(x)?)?;
                let d: Vec<f64> = direct.iter().zip(&composed).map(|(a, b)| a - b).collect();
                worst = worst.max(norm(&d));
            }
            Ok(worst)
        })
        .collect();
    let res = collect_in_grid_order(results)?;
    let residuals: Vec<(f64, f64)> = flow.grid.values().iter().copied().zip(res).collect();
    let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(GroupLawReport {
        t,
        s,
        points: points.len(),
        budget,
        residuals,
        max_residual,
        passed: max_residual <= budget,
    })
}

/// Angle net `α_ij` for the rotation plane `(i, j)`, 0-based with `i < j`.
pub type AngleAssignment = ((usize, usize), GeneralizedNumber);

/// A net of rotation matrices `A_ε = exp(Σ α_ij(ε) S_ij)`.
#[derive(Clone, Debug)]
pub struct RotationNet {
    grid: EpsilonGrid,
    dim: usize,
    label: String,
    matrices: Vec<DMatrix<f64>>,
}

impl RotationNet {
    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self, index: usize) -> &DMatrix<f64> {
        &self.matrices[index]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Largest `max(|AᵀA − I|_max, |det A − 1|)` over the grid.
    pub fn orthogonality_defect(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        self.matrices
            .iter()
            .map(|a| {
                let o = (a.transpose() * a - &id).abs().max();
                o.max((a.determinant() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Skew generator of rotations in the plane `(i, j)`: `S[j][i] = 1`, `S[i][j] = −1`.
pub fn skew_generator(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    s[(j, i)] = 1.0;
    s[(i, j)] = -1.0;
    s
}

/// Rotation net for the given angle nets; planes are 0-based pairs `i < j < n`.
pub fn generalized_rotation(grid: &EpsilonGrid, n: usize, alphas: &[AngleAssignment]) -> Result<RotationNet> {
    if n < 2 {
        return Err(Error::Config("rotations need dimension at least 2".into()));
    }
    for ((i, j), a) in alphas {
        if !(i < j && *j < n) {
            return Err(Error::Config(format!("rotation plane ({i}, {j}) invalid in dimension {n}")));
        }
        if a.grid() != grid {
            return Err(Error::Config("angle net uses a different grid".into()));
        }
    }
    let matrices = (0..grid.len())
        .map(|k| {
            let mut s = DMatrix::zeros(n, n);
            for ((i, j), a) in alphas {
                s += skew_generator(n, *i, *j) * a.at_index(k);
            }
            expm(&s)
        })
        .collect();
    let label = alphas
        .iter()
        .map(|((i, j), a)| format!("a{}{}={}", i + 1, j + 1, a.label()))
        .collect::<Vec<_>>()
        .join(",");
    Ok(RotationNet {
        grid: grid.clone(),
        dim: n,
        label,
        matrices,
    })
}
