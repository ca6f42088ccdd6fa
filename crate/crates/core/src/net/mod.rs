//! Core data model: ε-grids, nets of smooth functions and vector fields,
//! generalized points and numbers, and compact sampling boxes.

mod function;
mod grid;
mod point;
mod region;
mod smooth;

pub use function::{eval_net, partial, NetFunction, NetVectorField};
pub use grid::{EpsilonGrid, MIN_GRID_LEN, MIN_TAIL_LEN};
pub use point::{point_at, GeneralizedNumber, GeneralizedPoint};
#[allow(unused_imports)]
pub(crate) use point::norm;
pub use region::{
    default_resolution, sample_box, CompactBox, PointCloud, Sampler, MAX_SAMPLE_DIM, MIN_RESOLUTION,
    REFERENCE_RADIUS,
};
pub use smooth::{ClosedForm, FiniteDifference, Smooth, SmoothFunctionHandle};

/// Convenience constructor for an ε-grid `base^k`, `k = k_min..=k_max`.
pub fn make_epsilon_grid(k_min: i32, k_max: i32, base: f64) -> crate::Result<EpsilonGrid> {
    EpsilonGrid::geometric(k_min, k_max, base)
}
