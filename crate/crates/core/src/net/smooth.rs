use crate::error::{Error, Result};
use crate::jet::Jet;
use std::fmt;
use std::sync::Arc;

/// A smooth map `ℝⁿ → ℝ` whose derivatives are available through Taylor jets.
///
/// `eval_jet` receives one jet per coordinate (all of the same shape) and
/// returns the jet of the composition. Implementations are total: they must
/// return finite values for every finite input.
pub trait Smooth: Send + Sync {
    fn arity(&self) -> usize;

    /// Highest derivative order the handle promises to answer.
    fn max_order(&self) -> usize;

    fn eval_jet(&self, x: &[Jet]) -> Jet;

    /// `true` for handles whose derivatives are numerical approximations.
    fn is_approximate(&self) -> bool {
        false
    }
}

/// Shared handle to a single smooth representative.
pub type SmoothFunctionHandle = Arc<dyn Smooth>;

impl dyn Smooth {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let jets = Jet::seed(x, 0);
        self.eval_jet(&jets).value()
    }

    /// Value together with its rounding scale, for inputs whose coordinates
    /// carry the given scales.
    pub fn eval_scaled(&self, x: &[f64], scales: &[f64]) -> (f64, f64) {
        let jets = Jet::seed_with_scale(x, scales, 0);
        let j = self.eval_jet(&jets);
        (j.value(), j.value_scale())
    }

    /// Taylor jet at `x` up to `order`.
    pub fn taylor(&self, x: &[f64], order: usize) -> Jet {
        self.eval_jet(&Jet::seed(x, order))
    }

    /// Exact partial derivative `∂^α` at `x`.
    pub fn partial(&self, alpha: &[usize], x: &[f64]) -> Result<f64> {
        self.check_query(alpha, x)?;
        let order: usize = alpha.iter().sum();
        Ok(self.taylor(x, order).partial(alpha).expect("multi-index within jet order"))
    }

    pub(crate) fn check_query(&self, alpha: &[usize], x: &[f64]) -> Result<()> {
        if alpha.len() != self.arity() || x.len() != self.arity() {
            return Err(Error::Config(format!(
                "expected {} coordinates, got multi-index of length {} and point of length {}",
                self.arity(),
                alpha.len(),
                x.len()
            )));
        }
        let order: usize = alpha.iter().sum();
        if order > self.max_order() {
            return Err(Error::Capability(format!(
                "derivative order {order} exceeds max_order {}",
                self.max_order()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("evaluation point must be finite".into()));
        }
        Ok(())
    }
}

impl fmt::Debug for dyn Smooth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Smooth")
            .field("arity", &self.arity())
            .field("max_order", &self.max_order())
            .finish()
    }
}

type JetFn = dyn Fn(&[Jet]) -> Jet + Send + Sync;

/// Closed-form smooth function written directly in jet arithmetic.
#[derive(Clone)]
pub struct ClosedForm {
    arity: usize,
    max_order: usize,
    f: Arc<JetFn>,
}

impl ClosedForm {
    pub fn new(arity: usize, max_order: usize, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> ClosedForm {
        ClosedForm {
            arity,
            max_order,
            f: Arc::new(f),
        }
    }

    pub fn handle(self) -> SmoothFunctionHandle {
        Arc::new(self)
    }
}

impl Smooth for ClosedForm {
    fn arity(&self) -> usize {
        self.arity
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn eval_jet(&self, x: &[Jet]) -> Jet {
        debug_assert_eq!(x.len(), self.arity);
        (self.f)(x)
    }
}

type PointFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Adapter for black-box functions: derivatives up to order 2 by central differences.
///
/// Results are approximate; reports built from such handles say so.
#[derive(Clone)]
pub struct FiniteDifference {
    arity: usize,
    step: f64,
    f: Arc<PointFn>,
}

impl FiniteDifference {
    /// `step = 1e-5 · max(1, scale_hint)`; pass `ε · feature_scale` as the hint
    /// for nets with ε-scaled features.
    pub fn new(arity: usize, scale_hint: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> FiniteDifference {
        FiniteDifference {
            arity,
            step: 1e-5 * scale_hint.max(1.0),
            f: Arc::new(f),
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn handle(self) -> SmoothFunctionHandle {
        Arc::new(self)
    }

    fn shifted(&self, x: &[f64], moves: &[(usize, f64)]) -> f64 {
        let mut y = x.to_vec();
        for &(i, d) in moves {
            y[i] += d;
        }
        (self.f)(&y)
    }
}

impl Smooth for FiniteDifference {
    fn arity(&self) -> usize {
        self.arity
    }

    fn max_order(&self) -> usize {
        2
    }

    fn is_approximate(&self) -> bool {
        true
    }

    fn eval_jet(&self, x: &[Jet]) -> Jet {
        let n = self.arity;
        let k = x[0].order().min(2);
        let base: Vec<f64> = x.iter().map(Jet::value).collect();
        let f0 = (self.f)(&base);
        // Taylor polynomial at the base point in n variables, then compose
        let mut poly = Jet::constant(n, k, 0.0);
        let seeds = Jet::seed(&vec![0.0; n], k);
        poly = &poly + &poly.lift(f0);
        if k >= 1 {
            let h = self.step;
            for i in 0..n {
                let d = (self.shifted(&base, &[(i, h)]) - self.shifted(&base, &[(i, -h)])) / (2.0 * h);
                poly = &poly + &(&seeds[i] * d);
            }
        }
        if k >= 2 {
            // second differences need a larger step to stay above rounding noise
            let h = self.step * 100.0;
            for i in 0..n {
                for j in i..n {
                    let d2 = if i == j {
                        (self.shifted(&base, &[(i, h)]) - 2.0 * f0 + self.shifted(&base, &[(i, -h)])) / (h * h)
                    } else {
                        (self.shifted(&base, &[(i, h), (j, h)]) - self.shifted(&base, &[(i, h), (j, -h)])
                            - self.shifted(&base, &[(i, -h), (j, h)])
                            + self.shifted(&base, &[(i, -h), (j, -h)]))
                            / (4.0 * h * h)
                    };
                    let coeff = if i == j { 0.5 * d2 } else { d2 };
                    poly = &poly + &(&(&seeds[i] * &seeds[j]) * coeff);
                }
            }
        }
        if x[0].order() > k {
            // orders above 2 are reported as zero by this adapter
            return poly.extend(x[0].order()).compose(x);
        }
        poly.compose(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paraboloid() -> SmoothFunctionHandle {
        ClosedForm::new(2, 2, |x| &(&x[0] * &x[0]) + &(&x[1] * &x[1])).handle()
    }

    #[test]
    fn closed_form_partials() {
        let u = paraboloid();
        assert_eq!(u.partial(&[1, 0], &[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(u.partial(&[0, 2], &[-3.0, 0.5]).unwrap(), 2.0);
        assert_eq!(u.partial(&[0, 0], &[3.0, 0.0]).unwrap(), u.eval(&[3.0, 0.0]));
        assert!(matches!(u.partial(&[2, 1], &[0.0, 0.0]), Err(Error::Capability(_))));
    }

    #[test]
    fn finite_difference_adapter_is_close() {
        let fd = FiniteDifference::new(2, 1.0, |x| x[0].sin() * x[1].exp()).handle();
        assert!(fd.is_approximate());
        let p = [0.4, -0.3];
        assert_relative_eq!(fd.eval(&p), 0.4f64.sin() * (-0.3f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(
            fd.partial(&[1, 0], &p).unwrap(),
            0.4f64.cos() * (-0.3f64).exp(),
            max_relative = 1e-8
        );
        assert_relative_eq!(
            fd.partial(&[1, 1], &p).unwrap(),
            0.4f64.cos() * (-0.3f64).exp(),
            max_relative = 1e-5
        );
        assert_relative_eq!(
            fd.partial(&[0, 2], &p).unwrap(),
            0.4f64.sin() * (-0.3f64).exp(),
            max_relative = 1e-5
        );
    }
}
