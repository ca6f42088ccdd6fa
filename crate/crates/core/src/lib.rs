//! Numerical toolkit for Colombeau generalized functions on open subsets of `ℝⁿ`.
//!
//! A generalized function is represented by one of its representatives: a net
//! `ε ↦ u_ε` of smooth functions sampled on a finite [`EpsilonGrid`]. On top of
//! that representation the crate provides
//!
//! - asymptotic growth classification of nets on compact boxes
//!   ([`asymptotics`]),
//! - mollifier embeddings and a fixed gallery of model nets ([`embeddings`]),
//! - generalized flows of net vector fields and their flow laws ([`flow`]),
//! - invariance tests under flows, translations and rotations ([`invariance`]),
//! - reduction of rotation-invariant nets to radial profiles ([`reduction`]),
//! - a JSON scenario runner with CSV/JSON reports ([`scenario`]).
//!
//! Derivatives are exact: every smooth member is evaluated on truncated Taylor
//! jets ([`jet::Jet`]).

pub mod asymptotics;
pub mod embeddings;
pub mod error;
pub mod expr;
pub mod flow;
pub mod invariance;
pub mod jet;
pub mod net;
pub mod reduction;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use net::{
    CompactBox, EpsilonGrid, GeneralizedNumber, GeneralizedPoint, NetFunction, NetVectorField, Smooth,
    SmoothFunctionHandle,
};

/// Configure the global worker pool from `COLOMBEAU_THREADS`, if set.
///
/// Safe to call more than once; only the first successful call has an effect.
pub fn init_threads_from_env() {
    if let Some(n) = std::env::var("COLOMBEAU_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
