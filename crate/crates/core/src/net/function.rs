use super::grid::EpsilonGrid;
use super::smooth::{ClosedForm, SmoothFunctionHandle};
use crate::error::{Error, Result};
use crate::jet::Jet;
use std::fmt;
use std::sync::Arc;

/// A net `ε ↦ u_ε` of smooth functions `ℝⁿ → ℝ`, one member per grid value.
#[derive(Clone)]
pub struct NetFunction {
    grid: EpsilonGrid,
    dim: usize,
    max_order: usize,
    members: Arc<[SmoothFunctionHandle]>,
}

impl NetFunction {
    pub fn from_members(grid: EpsilonGrid, members: Vec<SmoothFunctionHandle>) -> Result<NetFunction> {
        if members.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} members for a grid of {} values",
                members.len(),
                grid.len()
            )));
        }
        let dim = members[0].arity();
        let max_order = members[0].max_order();
        if members.iter().any(|m| m.arity() != dim || m.max_order() != max_order) {
            return Err(Error::Config("net members must share arity and max_order".into()));
        }
        Ok(NetFunction {
            grid,
            dim,
            max_order,
            members: members.into(),
        })
    }

    /// Build every member from a jet closure that receives `ε` and the coordinates.
    pub fn closed_form(
        grid: &EpsilonGrid,
        dim: usize,
        max_order: usize,
        f: impl Fn(f64, &[Jet]) -> Jet + Send + Sync + 'static,
    ) -> NetFunction {
        let f = Arc::new(f);
        let members = grid
            .values()
            .iter()
            .map(|&eps| {
                let f = Arc::clone(&f);
                ClosedForm::new(dim, max_order, move |x| f(eps, x)).handle()
            })
            .collect();
        NetFunction::from_members(grid.clone(), members).expect("closed-form members are uniform")
    }

    /// The same smooth function for every ε.
    pub fn constant_in_eps(grid: &EpsilonGrid, member: SmoothFunctionHandle) -> NetFunction {
        let members = vec![member; grid.len()];
        NetFunction::from_members(grid.clone(), members).expect("uniform members")
    }

    /// A new net whose member at index `i` is `f(i, ε_i, u_ε_i)`.
    pub fn map_members(
        &self,
        mut f: impl FnMut(usize, f64, &SmoothFunctionHandle) -> SmoothFunctionHandle,
    ) -> Result<NetFunction> {
        let members = self
            .grid
            .iter()
            .map(|(i, eps)| f(i, eps, &self.members[i]))
            .collect();
        NetFunction::from_members(self.grid.clone(), members)
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn member(&self, index: usize) -> &SmoothFunctionHandle {
        &self.members[index]
    }

    pub fn member_at(&self, eps: f64) -> Result<&SmoothFunctionHandle> {
        Ok(&self.members[self.grid.index_of(eps)?])
    }

    pub fn members(&self) -> &[SmoothFunctionHandle] {
        &self.members
    }

    pub fn is_approximate(&self) -> bool {
        self.members.iter().any(|m| m.is_approximate())
    }

    /// `u_ε(x)`.
    pub fn eval(&self, eps: f64, x: &[f64]) -> Result<f64> {
        let m = self.member_at(eps)?;
        m.check_query(&vec![0; self.dim], x)?;
        Ok(m.eval(x))
    }

    /// `∂^α u_ε(x)`.
    pub fn partial(&self, eps: f64, alpha: &[usize], x: &[f64]) -> Result<f64> {
        self.member_at(eps)?.partial(alpha, x)
    }

    pub(crate) fn check_same_grid(&self, other: &EpsilonGrid) -> Result<()> {
        if &self.grid != other {
            return Err(Error::Config("nets are sampled on different grids".into()));
        }
        Ok(())
    }
}

impl fmt::Debug for NetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NetFunction")
            .field("dim", &self.dim)
            .field("max_order", &self.max_order)
            .field("grid_len", &self.grid.len())
            .finish()
    }
}

/// Free-standing form of [`NetFunction::eval`].
pub fn eval_net(u: &NetFunction, eps: f64, x: &[f64]) -> Result<f64> {
    u.eval(eps, x)
}

/// Free-standing form of [`NetFunction::partial`].
pub fn partial(u: &NetFunction, eps: f64, alpha: &[usize], x: &[f64]) -> Result<f64> {
    u.partial(eps, alpha, x)
}

type JointFn = dyn Fn(f64, &[Jet]) -> Vec<Jet> + Send + Sync;

/// A net of smooth vector fields on `ℝⁿ`: `n` component nets on a shared grid.
#[derive(Clone)]
pub struct NetVectorField {
    grid: EpsilonGrid,
    components: Vec<NetFunction>,
    /// All components at once, when the field was written as one closure.
    joint: Option<Arc<JointFn>>,
}

impl fmt::Debug for NetVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NetVectorField")
            .field("components", &self.components)
            .finish()
    }
}

impl NetVectorField {
    pub fn new(components: Vec<NetFunction>) -> Result<NetVectorField> {
        let first = components
            .first()
            .ok_or_else(|| Error::Config("vector field needs at least one component".into()))?;
        let n = components.len();
        let grid = first.grid().clone();
        for c in &components {
            c.check_same_grid(&grid)?;
            if c.dim() != n {
                return Err(Error::Config(format!(
                    "component of arity {} in a {n}-dimensional field",
                    c.dim()
                )));
            }
        }
        Ok(NetVectorField {
            grid,
            components,
            joint: None,
        })
    }

    /// Components written as one jet closure returning all `n` entries.
    pub fn closed_form(
        grid: &EpsilonGrid,
        dim: usize,
        max_order: usize,
        f: impl Fn(f64, &[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> NetVectorField {
        let f = Arc::new(f);
        let components = (0..dim)
            .map(|i| {
                let f = Arc::clone(&f);
                NetFunction::closed_form(grid, dim, max_order, move |eps, x| f(eps, x).swap_remove(i))
            })
            .collect();
        let mut v = NetVectorField::new(components).expect("closed-form components are uniform");
        v.joint = Some(f);
        v
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[NetFunction] {
        &self.components
    }

    pub fn max_order(&self) -> usize {
        self.components.iter().map(NetFunction::max_order).min().unwrap_or(0)
    }

    /// `ξ_ε(x)` for the member at grid index `index`.
    pub fn eval_index(&self, index: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_index_into(index, x, &mut out);
        out
    }

    /// As [`NetVectorField::eval_index`], writing into `out`.
    pub fn eval_index_into(&self, index: usize, x: &[f64], out: &mut [f64]) {
        let jets = Jet::seed(x, 0);
        match &self.joint {
            Some(f) => {
                for (o, j) in out.iter_mut().zip(f(self.grid.values()[index], &jets)) {
                    *o = j.value();
                }
            }
            None => {
                for (o, c) in out.iter_mut().zip(&self.components) {
                    *o = c.member(index).eval_jet(&jets).value();
                }
            }
        }
    }

    pub fn eval(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        let i = self.grid.index_of(eps)?;
        Ok(self.eval_index(i, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> EpsilonGrid {
        EpsilonGrid::geometric(1, 8, 0.5).unwrap()
    }

    #[test]
    fn eval_net_examples() {
        let g = grid();
        let u = NetFunction::closed_form(&g, 1, 2, |eps, x| x[0].lift(eps));
        assert_eq!(eval_net(&u, 0.25, &[17.0]).unwrap(), 0.25);
        let sq = NetFunction::closed_form(&g, 1, 2, |_, x| &x[0] * &x[0]);
        for eps in g.values() {
            assert_eq!(eval_net(&sq, *eps, &[3.0]).unwrap(), 9.0);
        }
        assert!(matches!(eval_net(&u, 0.3, &[0.0]), Err(Error::NotOnGrid(_))));
    }

    #[test]
    fn partial_examples() {
        let g = grid();
        let u = NetFunction::closed_form(&g, 2, 2, |_, x| &(&x[0] * &x[0]) + &(&x[1] * &x[1]));
        assert_eq!(partial(&u, 0.5, &[1, 0], &[1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(partial(&u, 0.125, &[0, 2], &[5.0, -7.0]).unwrap(), 2.0);
        assert!(matches!(partial(&u, 0.5, &[3, 0], &[0.0, 0.0]), Err(Error::Capability(_))));
    }

    #[test]
    fn vector_field_components_share_grid() {
        let g = grid();
        let other = EpsilonGrid::geometric(2, 9, 0.5).unwrap();
        let a = NetFunction::closed_form(&g, 2, 2, |_, x| x[0].clone());
        let b = NetFunction::closed_form(&other, 2, 2, |_, x| x[1].clone());
        assert!(NetVectorField::new(vec![a.clone(), b]).is_err());
        let rot = NetVectorField::closed_form(&g, 2, 2, |_, x| vec![-&x[1], x[0].clone()]);
        assert_eq!(rot.eval(0.5, &[1.0, 0.0]).unwrap(), vec![-0.0, 1.0]);
    }
}
