use super::grid::EpsilonGrid;
use crate::error::{Error, Result};
use serde::Serialize;

/// A net of reals `ε ↦ value(ε)`, tabulated on the grid from a closed form.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralizedNumber {
    label: String,
    #[serde(skip)]
    grid: EpsilonGrid,
    values: Vec<f64>,
}

impl GeneralizedNumber {
    pub fn new(grid: &EpsilonGrid, label: impl Into<String>, f: impl Fn(f64) -> f64) -> GeneralizedNumber {
        GeneralizedNumber {
            label: label.into(),
            grid: grid.clone(),
            values: grid.values().iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn constant(grid: &EpsilonGrid, c: f64) -> GeneralizedNumber {
        GeneralizedNumber::new(grid, format!("{c}"), |_| c)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_index(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn at(&self, eps: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(eps)?])
    }

    /// Fitted `(C, N)` with `|value(ε)| ≤ C ε^{-N}` on the grid tail, `N ≥ 0`.
    pub fn moderate_bound(&self) -> (f64, f64) {
        let tail = self.grid.tail_start();
        let pts: Vec<(f64, f64)> = self.grid.values()[tail..]
            .iter()
            .zip(&self.values[tail..])
            .filter(|(_, v)| v.abs() > 0.0)
            .map(|(e, v)| (e.ln(), v.abs().ln()))
            .collect();
        if pts.len() < 2 {
            let c = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            return (c, 0.0);
        }
        let slope = crate::asymptotics::least_squares(&pts).slope;
        let n = (-slope).max(0.0);
        // smallest C covering every tail value with exponent N
        let c = self.grid.values()[tail..]
            .iter()
            .zip(&self.values[tail..])
            .map(|(e, v)| v.abs() * e.powf(n))
            .fold(0.0f64, f64::max);
        (c, n)
    }
}

/// A net of points `ε ↦ position(ε) ∈ ℝⁿ` with a declared uniform bound.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralizedPoint {
    label: String,
    #[serde(skip)]
    grid: EpsilonGrid,
    positions: Vec<Vec<f64>>,
    bound: f64,
}

impl GeneralizedPoint {
    pub fn new(
        grid: &EpsilonGrid,
        label: impl Into<String>,
        bound: f64,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<GeneralizedPoint> {
        let positions: Vec<Vec<f64>> = grid.values().iter().map(|&e| f(e)).collect();
        let dim = positions[0].len();
        if dim == 0 || positions.iter().any(|p| p.len() != dim) {
            return Err(Error::Config("generalized point positions must share a nonzero dimension".into()));
        }
        Ok(GeneralizedPoint {
            label: label.into(),
            grid: grid.clone(),
            positions,
            bound,
        })
    }

    /// The same point for every ε, with bound `|p|`.
    pub fn constant(grid: &EpsilonGrid, p: &[f64]) -> GeneralizedPoint {
        let bound = norm(p);
        let owned = p.to_vec();
        GeneralizedPoint::new(grid, format!("{p:?}"), bound, move |_| owned.clone()).expect("nonempty point")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Position at grid index `i`, checked against the declared bound.
    pub fn at_index(&self, i: usize) -> Result<&[f64]> {
        let p = &self.positions[i];
        let r = norm(p);
        if !(r <= self.bound * (1.0 + 1e-12)) {
            return Err(Error::InvariantViolation(format!(
                "generalized point `{}` has |p| = {r} > bound {} at epsilon = {:e}",
                self.label,
                self.bound,
                self.grid.values()[i]
            )));
        }
        Ok(p)
    }

    /// Sweep the whole grid for bound violations.
    pub fn check_bound(&self) -> Result<()> {
        (0..self.grid.len()).try_for_each(|i| self.at_index(i).map(|_| ()))
    }
}

/// Free-standing form of [`GeneralizedPoint::at_index`] addressed by ε.
pub fn point_at(p: &GeneralizedPoint, eps: f64) -> Result<Vec<f64>> {
    let i = p.grid.index_of(eps)?;
    p.at_index(i).map(<[f64]>::to_vec)
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> EpsilonGrid {
        EpsilonGrid::geometric(1, 8, 0.5).unwrap()
    }

    #[test]
    fn point_at_examples() {
        let g = grid();
        let p = GeneralizedPoint::new(&g, "(eps, 0)", 1.0, |e| vec![e, 0.0]).unwrap();
        assert_eq!(point_at(&p, 0.125).unwrap(), vec![0.125, 0.0]);

        let blow = GeneralizedPoint::new(&g, "(1/eps, 0)", 10.0, |e| vec![1.0 / e, 0.0]).unwrap();
        assert!(matches!(blow.check_bound(), Err(Error::InvariantViolation(_))));
        assert!(matches!(point_at(&blow, 2f64.powi(-8)), Err(Error::InvariantViolation(_))));

        let c = GeneralizedPoint::constant(&g, &[1.0, 1.0]);
        for &e in g.values() {
            assert_eq!(point_at(&c, e).unwrap(), vec![1.0, 1.0]);
        }
    }

    #[test]
    fn moderate_bound_of_inverse_powers() {
        let g = EpsilonGrid::default();
        let x = GeneralizedNumber::new(&g, "eps^-2", |e| 3.0 / (e * e));
        let (c, n) = x.moderate_bound();
        assert!((n - 2.0).abs() < 1e-9);
        assert!((c - 3.0).abs() < 1e-6);
        let log = GeneralizedNumber::new(&g, "|log eps|", |e| e.ln().abs());
        let (_, n) = log.moderate_bound();
        assert!(n < 0.15);
    }
}
