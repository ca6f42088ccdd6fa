//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients `c_α = ∂^α f(x₀) / α!` of a quantity in
//! `nvars` variables up to total degree `order`. Arithmetic on jets is exact
//! forward-mode differentiation: every partial derivative up to `order` of a
//! closed-form expression is obtained by evaluating the expression on seeded
//! jets.
//!
//! Each jet also carries a companion `scale` polynomial with non-negative
//! coefficients bounding the magnitude of every term that was summed into the
//! matching coefficient (a running rounding-error scale). A coefficient whose
//! absolute value is below [`ROUNDING_REL`] times its scale cannot be told apart
//! from floating-point cancellation and is reported as zero by
//! [`Jet::partial_snapped`].

use smallvec::{smallvec, SmallVec};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Largest number of independent variables a jet supports.
pub const MAX_VARS: usize = 4;
/// Largest truncation order a jet supports.
pub const MAX_ORDER: usize = 8;

/// Relative cancellation threshold used when snapping coefficients to zero.
pub const ROUNDING_REL: f64 = 1e-12;

type Coeffs = SmallVec<[f64; 16]>;

/// Monomial layout for a given `(nvars, order)`: graded, lexicographic within
/// each degree, so the layout of a lower order is a prefix of a higher one.
#[derive(Debug)]
pub(crate) struct Layout {
    pub(crate) monomials: Vec<[u8; MAX_VARS]>,
    degree_start: Vec<usize>,
    mul_table: Vec<(u16, u16, u16)>,
    // per variable: (source index, target index in order-1 layout, factor)
    deriv_table: Vec<Vec<(u16, u16, f64)>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for deg in 0..=order {
            degree_start.push(monomials.len());
            let mut cur = [0u8; MAX_VARS];
            push_degree(nvars, deg, 0, &mut cur, &mut monomials);
        }
        degree_start.push(monomials.len());

        let index_of = |m: &[u8; MAX_VARS]| monomials.iter().position(|x| x == m);

        let mut mul_table = Vec::new();
        for (ia, a) in monomials.iter().enumerate() {
            for (ib, b) in monomials.iter().enumerate() {
                let deg: usize = a.iter().zip(b).map(|(x, y)| (*x + *y) as usize).sum();
                if deg > order {
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for k in 0..MAX_VARS {
                    s[k] = a[k] + b[k];
                }
                let io = index_of(&s).expect("monomial present");
                mul_table.push((ia as u16, ib as u16, io as u16));
            }
        }

        let mut deriv_table = vec![Vec::new(); nvars];
        if order > 0 {
            let lower = &monomials[..degree_start[order]];
            for (var, table) in deriv_table.iter_mut().enumerate() {
                for (src, m) in monomials.iter().enumerate() {
                    if m[var] == 0 {
                        continue;
                    }
                    let mut t = *m;
                    t[var] -= 1;
                    let dst = lower.iter().position(|x| *x == t).expect("monomial present");
                    table.push((src as u16, dst as u16, m[var] as f64));
                }
            }
        }

        Layout {
            monomials,
            degree_start,
            mul_table,
            deriv_table,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.monomials.len()
    }

    fn index(&self, alpha: &[usize]) -> Option<usize> {
        let deg: usize = alpha.iter().sum();
        if deg + 1 >= self.degree_start.len() {
            return None;
        }
        let range = self.degree_start[deg]..self.degree_start[deg + 1];
        self.monomials[range.clone()]
            .iter()
            .position(|m| m.iter().zip(alpha).all(|(a, b)| *a as usize == *b))
            .map(|p| p + range.start)
    }
}

fn push_degree(nvars: usize, remaining: usize, var: usize, cur: &mut [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
    if var + 1 == nvars || nvars == 0 {
        if nvars == 0 {
            if remaining == 0 {
                out.push(*cur);
            }
            return;
        }
        cur[var] = remaining as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        cur[var] = take as u8;
        push_degree(nvars, remaining - take, var + 1, cur, out);
    }
    cur[var] = 0;
}

pub(crate) fn layout(nvars: usize, order: usize) -> &'static Layout {
    #[allow(clippy::declare_interior_mutable_const)]
    const CELL: OnceLock<Layout> = OnceLock::new();
    #[allow(clippy::declare_interior_mutable_const)]
    const ROW: [OnceLock<Layout>; MAX_ORDER + 2] = [CELL; MAX_ORDER + 2];
    static LAYOUTS: [[OnceLock<Layout>; MAX_ORDER + 2]; MAX_VARS + 1] = [ROW; MAX_VARS + 1];
    assert!(nvars <= MAX_VARS, "jet supports at most {MAX_VARS} variables");
    assert!(order <= MAX_ORDER + 1, "jet supports order at most {}", MAX_ORDER + 1);
    LAYOUTS[nvars][order].get_or_init(|| Layout::build(nvars, order))
}

/// Truncated Taylor polynomial with a rounding-scale companion.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: u8,
    order: u8,
    val: Coeffs,
    scale: Coeffs,
}

impl Jet {
    /// Constant jet. Its scale is `|c|`.
    pub fn constant(nvars: usize, order: usize, c: f64) -> Jet {
        let n = layout(nvars, order).len();
        let mut val: Coeffs = smallvec![0.0; n];
        let mut scale: Coeffs = smallvec![0.0; n];
        val[0] = c;
        scale[0] = c.abs();
        Jet {
            nvars: nvars as u8,
            order: order as u8,
            val,
            scale,
        }
    }

    /// The coordinate function `x_var` expanded at `x0`.
    pub fn variable(nvars: usize, order: usize, var: usize, x0: f64) -> Jet {
        Jet::variable_with_scale(nvars, order, var, x0, x0.abs())
    }

    /// As [`Jet::variable`], with an explicit rounding scale for the base value
    /// (used when `x0` is itself the result of a computation).
    pub fn variable_with_scale(nvars: usize, order: usize, var: usize, x0: f64, scale0: f64) -> Jet {
        assert!(var < nvars);
        let mut j = Jet::constant(nvars, order, x0);
        j.scale[0] = scale0.max(x0.abs());
        if order > 0 {
            // degree-1 monomials are ordered x_0, x_1, ... after the constant
            j.val[1 + var] = 1.0;
            j.scale[1 + var] = 1.0;
        }
        j
    }

    /// Identity jets for every coordinate of `x0`.
    pub fn seed(x0: &[f64], order: usize) -> Vec<Jet> {
        let n = x0.len();
        x0.iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(n, order, i, v))
            .collect()
    }

    /// Identity jets with explicit rounding scales for the base point.
    pub fn seed_with_scale(x0: &[f64], scales: &[f64], order: usize) -> Vec<Jet> {
        let n = x0.len();
        x0.iter()
            .zip(scales)
            .enumerate()
            .map(|(i, (&v, &s))| Jet::variable_with_scale(n, order, i, v, s))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// Constant (value) coefficient.
    pub fn value(&self) -> f64 {
        self.val[0]
    }

    pub fn value_scale(&self) -> f64 {
        self.scale[0]
    }

    /// A constant jet with the same shape as `self`.
    pub fn lift(&self, c: f64) -> Jet {
        Jet::constant(self.nvars(), self.order(), c)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.val
    }

    pub fn scales(&self) -> &[f64] {
        &self.scale
    }

    /// Taylor coefficient for the multi-index `alpha`.
    pub fn coeff(&self, alpha: &[usize]) -> Option<f64> {
        self.coeff_and_scale(alpha).map(|(c, _)| c)
    }

    fn coeff_and_scale(&self, alpha: &[usize]) -> Option<(f64, f64)> {
        if alpha.len() != self.nvars() {
            return None;
        }
        let idx = layout(self.nvars(), self.order()).index(alpha)?;
        Some((self.val[idx], self.scale[idx]))
    }

    /// `∂^α f(x₀)`.
    pub fn partial(&self, alpha: &[usize]) -> Option<f64> {
        self.coeff(alpha).map(|c| c * multi_factorial(alpha))
    }

    /// `∂^α f(x₀)`, with values at cancellation level reported as exactly 0.
    pub fn partial_snapped(&self, alpha: &[usize]) -> Option<f64> {
        self.coeff_and_scale(alpha)
            .map(|(c, s)| snap(c, s) * multi_factorial(alpha))
    }

    /// All partials `(α, ∂^α f(x₀))` in layout order, snapped.
    pub fn partials_snapped(&self) -> Vec<(Vec<usize>, f64)> {
        let lay = layout(self.nvars(), self.order());
        lay.monomials
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let alpha: Vec<usize> = m[..self.nvars()].iter().map(|&k| k as usize).collect();
                let f = multi_factorial(&alpha);
                (alpha, snap(self.val[i], self.scale[i]) * f)
            })
            .collect()
    }

    /// Drop every coefficient of degree above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order());
        let n = layout(self.nvars(), order).len();
        Jet {
            nvars: self.nvars,
            order: order as u8,
            val: self.val[..n].into(),
            scale: self.scale[..n].into(),
        }
    }

    /// Pad with zero coefficients up to `order`.
    pub fn extend(&self, order: usize) -> Jet {
        assert!(order >= self.order());
        let mut out = Jet::constant(self.nvars(), order, 0.0);
        out.val[..self.val.len()].copy_from_slice(&self.val);
        out.scale[..self.scale.len()].copy_from_slice(&self.scale);
        out
    }

    /// Differentiate the Taylor polynomial with respect to `var`; the order drops by one.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        assert!(var < self.nvars());
        let lay = layout(self.nvars(), self.order());
        let lower = self.order() - 1;
        let mut out = Jet::constant(self.nvars(), lower, 0.0);
        for &(src, dst, f) in &lay.deriv_table[var] {
            out.val[dst as usize] += f * self.val[src as usize];
            out.scale[dst as usize] += f * self.scale[src as usize];
        }
        out
    }

    /// Substitute `inner[j] - inner[j].value()` for the variables of `self`.
    ///
    /// `self` is the Taylor polynomial of an outer function at the base point
    /// `(inner[j].value())_j`; the result is the Taylor polynomial of the
    /// composition in the variables of `inner`.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        assert_eq!(inner.len(), self.nvars(), "composition arity mismatch");
        let first = inner.first().expect("at least one inner jet");
        let (p, k) = (first.nvars(), first.order());
        assert!(k <= self.order(), "outer jet order too low for composition");
        let outer = layout(self.nvars(), self.order());

        let deltas: Vec<Jet> = inner
            .iter()
            .map(|j| {
                let mut d = j.clone();
                d.val[0] = 0.0;
                d.scale[0] = 0.0;
                d
            })
            .collect();
        // powers[j][e] = delta_j^e
        let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(deltas.len());
        for d in &deltas {
            let mut row = vec![Jet::constant(p, k, 1.0)];
            for e in 1..=k {
                let next = &row[e - 1] * d;
                row.push(next);
            }
            powers.push(row);
        }

        let mut out = Jet::constant(p, k, 0.0);
        out.scale[0] = 0.0;
        for (idx, m) in outer.monomials.iter().enumerate() {
            let deg: usize = m.iter().map(|&x| x as usize).sum();
            if deg > k {
                break;
            }
            let c = self.val[idx];
            let s = self.scale[idx];
            if c == 0.0 && s == 0.0 {
                continue;
            }
            let mut term = Jet::constant(p, k, 1.0);
            for (j, &e) in m[..self.nvars()].iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[j][e as usize];
                }
            }
            for i in 0..term.val.len() {
                out.val[i] += c * term.val[i];
                out.scale[i] += s * term.scale[i];
            }
        }
        // first-order propagation of the base-point uncertainty of the inner jets
        if self.order() > 0 {
            for (j, inn) in inner.iter().enumerate() {
                let mut alpha = vec![0usize; self.nvars()];
                alpha[j] = 1;
                if let Some(idx) = outer.index(&alpha) {
                    out.scale[0] += self.scale[idx] * inn.scale[0];
                }
            }
        }
        out
    }

    /// Apply a univariate function given its Taylor coefficients at `self.value()`.
    ///
    /// `series` must hold `b_j = f^{(j)}(a₀)/j!` for `j = 0..=order+1`; the extra
    /// coefficient feeds the rounding-scale propagation.
    pub fn apply_series(&self, series: &[f64]) -> Jet {
        let k = self.order();
        assert!(series.len() >= k + 2, "series too short for jet order");
        let a0_scale = self.scale[0];
        let bounds: SmallVec<[f64; 12]> = (0..=k)
            .map(|j| series[j].abs() + (j + 1) as f64 * series[j + 1].abs() * a0_scale)
            .collect();

        if k == 0 {
            let mut out = self.lift(series[0]);
            out.scale[0] = bounds[0];
            return out;
        }

        let mut delta = self.clone();
        delta.val[0] = 0.0;
        delta.scale[0] = 0.0;

        let mut acc = self.lift(series[k]);
        acc.scale[0] = bounds[k];
        for j in (0..k).rev() {
            acc = &acc * &delta;
            acc.val[0] += series[j];
            acc.scale[0] += bounds[j];
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let a0 = self.value();
        let n = self.order() + 2;
        let inv = 1.0 / a0;
        let mut series: SmallVec<[f64; 12]> = SmallVec::with_capacity(n);
        let mut p = inv;
        for j in 0..n {
            series.push(if j % 2 == 0 { p } else { -p });
            p *= inv;
        }
        self.apply_series(&series)
    }

    pub fn exp(&self) -> Jet {
        let e0 = self.value().exp();
        let series = factorial_series(self.order() + 2, |_| e0);
        self.apply_series(&series)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let series = factorial_series(self.order() + 2, |j| match j % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        });
        self.apply_series(&series)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let series = factorial_series(self.order() + 2, |j| match j % 4 {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        });
        self.apply_series(&series)
    }

    /// Natural logarithm; the base value must be positive.
    pub fn ln(&self) -> Jet {
        let a0 = self.value();
        let n = self.order() + 2;
        let mut series: SmallVec<[f64; 12]> = SmallVec::with_capacity(n);
        series.push(a0.ln());
        let mut p = 1.0;
        for j in 1..n {
            p /= a0;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign * p / j as f64);
        }
        self.apply_series(&series)
    }

    /// Non-negative integer power.
    pub fn powi(&self, p: u32) -> Jet {
        if p == 0 {
            return self.lift(1.0);
        }
        if self.order() == 0 {
            return self.apply_series(&[self.value().powi(p as i32), p as f64 * self.value().powi(p as i32 - 1)]);
        }
        let mut out = self.clone();
        for _ in 1..p {
            out = &out * self;
        }
        out
    }

    /// Real power; the base value must be positive.
    pub fn powf(&self, p: f64) -> Jet {
        let a0 = self.value();
        let n = self.order() + 2;
        let mut series: SmallVec<[f64; 12]> = SmallVec::with_capacity(n);
        let mut binom = 1.0;
        for j in 0..n {
            series.push(binom * a0.powf(p - j as f64));
            binom *= (p - j as f64) / (j + 1) as f64;
        }
        self.apply_series(&series)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    /// The compactly supported profile `g(s) = exp(-1/(1-s))` for `s < 1`, `0` otherwise.
    pub fn bump(&self) -> Jet {
        let series = bump_series(self.value(), self.order() + 2);
        self.apply_series(&series)
    }

    pub fn scale_by(&self, c: f64) -> Jet {
        let mut out = self.clone();
        let ac = c.abs();
        for (v, s) in out.val.iter_mut().zip(out.scale.iter_mut()) {
            *v *= c;
            *s *= ac;
        }
        out
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.val[0] += c;
        out.scale[0] += c.abs();
        out
    }

    /// Coefficient-wise absolute value of the scale companion, as a plain polynomial.
    fn check_shape(&self, other: &Jet) {
        assert!(
            self.nvars == other.nvars && self.order == other.order,
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.nvars,
            self.order,
            other.nvars,
            other.order
        );
    }
}

/// `0` if `|c|` is within cancellation distance of its rounding scale.
pub fn snap(c: f64, scale: f64) -> f64 {
    if c.abs() <= ROUNDING_REL * scale {
        0.0
    } else {
        c
    }
}

pub fn multi_factorial(alpha: &[usize]) -> f64 {
    alpha.iter().map(|&k| factorial(k)).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn factorial_series(n: usize, deriv: impl Fn(usize) -> f64) -> SmallVec<[f64; 12]> {
    let mut out = SmallVec::with_capacity(n);
    let mut fact = 1.0;
    for j in 0..n {
        if j > 0 {
            fact *= j as f64;
        }
        out.push(deriv(j) / fact);
    }
    out
}

/// Taylor coefficients of `exp(-1/(1-s))` at `s0`, `n` terms.
pub fn bump_series(s0: f64, n: usize) -> SmallVec<[f64; 12]> {
    let mut out: SmallVec<[f64; 12]> = smallvec![0.0; n];
    let t0 = 1.0 - s0;
    // beyond this the value and every derivative used here is below 1e-250
    if !(t0 > 0.0) || 1.0 / t0 > 700.0 {
        return out;
    }
    // w(s) = -1/(1-s) = -Σ h^j / t0^{j+1}
    let inv = 1.0 / t0;
    let mut w: SmallVec<[f64; 12]> = SmallVec::with_capacity(n);
    let mut p = inv;
    for _ in 0..n {
        w.push(-p);
        p *= inv;
    }
    // e = exp(w): e_0 = exp(w_0), e_m = (1/m) Σ_{k=1..m} k w_k e_{m-k}
    out[0] = w[0].exp();
    for m in 1..n {
        let mut acc = 0.0;
        for k in 1..=m {
            acc += k as f64 * w[k] * out[m - k];
        }
        out[m] = acc / m as f64;
    }
    out
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        self.check_shape(rhs);
        let mut out = self.clone();
        for i in 0..out.val.len() {
            out.val[i] += rhs.val[i];
            out.scale[i] += rhs.scale[i];
        }
        out
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        self.check_shape(rhs);
        let mut out = self.clone();
        for i in 0..out.val.len() {
            out.val[i] -= rhs.val[i];
            out.scale[i] += rhs.scale[i];
        }
        out
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.check_shape(rhs);
        let n = self.val.len();
        if n == 1 {
            let mut out = self.clone();
            out.val[0] *= rhs.val[0];
            out.scale[0] *= rhs.scale[0];
            return out;
        }
        let lay = layout(self.nvars(), self.order());
        let mut val: Coeffs = smallvec![0.0; n];
        let mut scale: Coeffs = smallvec![0.0; n];
        for &(a, b, o) in &lay.mul_table {
            let (a, b, o) = (a as usize, b as usize, o as usize);
            val[o] += self.val[a] * rhs.val[b];
            scale[o] += self.scale[a] * rhs.scale[b];
        }
        Jet {
            nvars: self.nvars,
            order: self.order,
            val,
            scale,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = self.clone();
        for v in out.val.iter_mut() {
            *v = -*v;
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &'a Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Jet> for &'a Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale_by(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale_by(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_const(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_const(rhs)
    }
}

impl Jet {
    /// Quotient `self / rhs`.
    pub fn div(&self, rhs: &Jet) -> Jet {
        self * &rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn layout_is_graded_prefix() {
        let l2 = layout(2, 2);
        let l3 = layout(2, 3);
        assert_eq!(l2.len(), 6);
        assert_eq!(l3.len(), 10);
        assert_eq!(&l3.monomials[..6], &l2.monomials[..]);
        assert_eq!(layout(3, 2).len(), 10);
        assert_eq!(layout(4, 2).len(), 15);
        assert_eq!(layout(1, 4).len(), 5);
    }

    #[test]
    fn polynomial_partials() {
        // f(x, y) = x^2 y + 3 y^3 at (1.5, -2)
        let v = Jet::seed(&[1.5, -2.0], 3);
        let f = &(&(&v[0] * &v[0]) * &v[1]) + &(&v[1].powi(3) * 3.0);
        assert_relative_eq!(f.value(), 1.5 * 1.5 * -2.0 + 3.0 * -8.0);
        assert_relative_eq!(f.partial(&[1, 0]).unwrap(), 2.0 * 1.5 * -2.0);
        assert_relative_eq!(f.partial(&[0, 1]).unwrap(), 1.5 * 1.5 + 9.0 * 4.0);
        assert_relative_eq!(f.partial(&[2, 0]).unwrap(), -4.0);
        assert_relative_eq!(f.partial(&[1, 1]).unwrap(), 3.0);
        assert_relative_eq!(f.partial(&[0, 2]).unwrap(), 18.0 * -2.0);
        assert_relative_eq!(f.partial(&[2, 1]).unwrap(), 2.0);
        assert_relative_eq!(f.partial(&[0, 3]).unwrap(), 18.0);
        assert!(f.partial(&[2, 2]).is_none());
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x0 = 0.7;
        let x = Jet::variable(1, 3, 0, x0);
        let checks: Vec<(Jet, [f64; 4])> = vec![
            (x.exp(), [x0.exp(), x0.exp(), x0.exp(), x0.exp()]),
            (x.sin(), [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()]),
            (x.cos(), [x0.cos(), -x0.sin(), -x0.cos(), x0.sin()]),
            (x.ln(), [x0.ln(), 1.0 / x0, -1.0 / (x0 * x0), 2.0 / x0.powi(3)]),
            (x.recip(), [1.0 / x0, -1.0 / (x0 * x0), 2.0 / x0.powi(3), -6.0 / x0.powi(4)]),
            (
                x.sqrt(),
                [x0.sqrt(), 0.5 / x0.sqrt(), -0.25 * x0.powf(-1.5), 0.375 * x0.powf(-2.5)],
            ),
        ];
        for (jet, expected) in checks {
            for (k, e) in expected.iter().enumerate() {
                assert_relative_eq!(jet.partial(&[k]).unwrap(), *e, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn bump_derivatives_match_hand_formulas() {
        // g(s) = exp(-1/(1-s)); g' = -g/(1-s)^2; g'' = g (1 - 2(1-s)) / (1-s)^4 ... checked as
        // g'' = g * (1/(1-s)^4 - 2/(1-s)^3)
        let s0 = 0.35;
        let t = 1.0 - s0;
        let g = (-1.0f64 / t).exp();
        let j = Jet::variable(1, 2, 0, s0).bump();
        assert_relative_eq!(j.value(), g, max_relative = 1e-14);
        assert_relative_eq!(j.partial(&[1]).unwrap(), -g / (t * t), max_relative = 1e-13);
        assert_relative_eq!(
            j.partial(&[2]).unwrap(),
            g * (1.0 / t.powi(4) - 2.0 / t.powi(3)),
            max_relative = 1e-12
        );
        let outside = Jet::variable(1, 2, 0, 1.2).bump();
        assert!(outside.coefficients().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn derivative_and_compose_round_trip() {
        // f(u, v) = sin(u) v^2 ; inner u = x y, v = x + y at (0.3, 1.1)
        let x = Jet::seed(&[0.3, 1.1], 2);
        let u = &x[0] * &x[1];
        let v = &x[0] + &x[1];
        let direct = &u.sin() * &v.powi(2);

        let base = [u.value(), v.value()];
        let outer = {
            let w = Jet::seed(&base, 2);
            &w[0].sin() * &w[1].powi(2)
        };
        let composed = outer.compose(&[u.clone(), v.clone()]);
        for (a, b) in direct.coefficients().iter().zip(composed.coefficients()) {
            assert_relative_eq!(a, b, max_relative = 1e-13, epsilon = 1e-15);
        }

        let d = Jet::seed(&[0.3, 1.1], 3);
        let f = &d[0].powi(3) * &d[1].exp();
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 2);
        assert_relative_eq!(fx.value(), 3.0 * 0.09 * 1.1f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(fx.partial(&[1, 1]).unwrap(), 6.0 * 0.3 * 1.1f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn cancellation_snaps_to_zero() {
        // x*y - y*x computed along different multiplication orders
        let x = Jet::seed(&[0.1, 0.7], 1);
        let c = 1.0 / 3.0;
        let a = &(&x[0] * c) * &x[1];
        let b = &(&x[1] * c) * &x[0];
        let d = &a - &b;
        assert_eq!(d.partial_snapped(&[0, 0]).unwrap(), 0.0);
        assert_eq!(d.partial_snapped(&[1, 0]).unwrap(), 0.0);
        // a genuine difference survives
        let e = &a - &(&x[0] * 0.2);
        assert!(e.partial_snapped(&[0, 0]).unwrap().abs() > 0.0);
    }
}
