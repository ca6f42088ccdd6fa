use crate::error::{Error, Result};
use serde::Serialize;
use std::sync::Arc;

/// Minimum number of grid values.
pub const MIN_GRID_LEN: usize = 8;
/// Minimum number of tail values used by asymptotic fits.
pub const MIN_TAIL_LEN: usize = 4;

/// Finite strictly decreasing sequence of scale parameters in `(0, 1]`.
///
/// Every net in the crate is sampled on one of these. The values from
/// `tail_start` on are the ones asymptotic fits use.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonGrid {
    values: Arc<[f64]>,
    tail_start: usize,
}

impl EpsilonGrid {
    /// `base^k` for `k = k_min..=k_max`, with the tail starting at the midpoint.
    pub fn geometric(k_min: i32, k_max: i32, base: f64) -> Result<EpsilonGrid> {
        if !(base > 0.0 && base < 1.0) {
            return Err(Error::Config(format!("grid base {base} must lie in (0, 1)")));
        }
        if k_min >= k_max {
            return Err(Error::Config(format!("k_min {k_min} must be below k_max {k_max}")));
        }
        if k_min < 0 {
            return Err(Error::Config(format!("k_min {k_min} would give epsilon above 1")));
        }
        if ((k_max - k_min + 1) as usize) < MIN_GRID_LEN {
            return Err(Error::Config(format!(
                "grid k range {k_min}..={k_max} has fewer than {MIN_GRID_LEN} values"
            )));
        }
        let values: Vec<f64> = (k_min..=k_max).map(|k| base.powi(k)).collect();
        let tail_start = values.len() / 2;
        EpsilonGrid::from_values(values, tail_start)
    }

    /// Validated grid from explicit values.
    pub fn from_values(values: Vec<f64>, tail_start: usize) -> Result<EpsilonGrid> {
        if values.len() < MIN_GRID_LEN {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_GRID_LEN} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::Config("grid values must lie in (0, 1]".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("grid values must be strictly decreasing".into()));
        }
        if tail_start + MIN_TAIL_LEN > values.len() {
            return Err(Error::Config(format!(
                "tail start {tail_start} leaves fewer than {MIN_TAIL_LEN} tail points"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        Ok(EpsilonGrid {
            values: values.into(),
            tail_start,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail_start(&self) -> usize {
        self.tail_start
    }

    pub fn tail(&self) -> &[f64] {
        &self.values[self.tail_start..]
    }

    pub fn smallest(&self) -> f64 {
        *self.values.last().expect("grid is nonempty")
    }

    /// Index of `eps` in the grid (relative match to 1e-12).
    pub fn index_of(&self, eps: f64) -> Result<usize> {
        self.values
            .iter()
            .position(|&v| (v - eps).abs() <= 1e-12 * v)
            .ok_or(Error::NotOnGrid(eps))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }
}

impl Default for EpsilonGrid {
    /// `2^-4 .. 2^-24`.
    fn default() -> Self {
        EpsilonGrid::geometric(4, 24, 0.5).expect("default grid is valid")
    }
}
