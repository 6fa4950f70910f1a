//! Generalized random graphs (GRG) with i.i.d. random vertex weights.
//!
//! The crate samples graphs where the edge `{i, j}` is present independently
//! with probability `W_i W_j / (L_n + W_i W_j)`, counts fixed-length cycles
//! exactly, and measures how close the cycle count is to its Poisson limit
//! `Pois((EW²/EW)^k / 2k)`. Supporting pieces cover the Chen–Stein
//! neighbourhood sums, the ratio statistics `T_n = ΣX²/ΣX` and
//! `R_n = T_n^p M_n² / ΣX`, log-log rate fitting, and the spectral lower bound
//! behind the epidemic threshold.
//!
//! The runnable programs under `examples/` walk through each capability;
//! the `grg` binary wraps the experiment drivers in [`experiments`].

pub mod chen_stein;
pub mod cycles;
mod error;
pub mod experiments;
pub mod graph;
pub mod poisson;
pub mod ratio;
pub mod seed;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
