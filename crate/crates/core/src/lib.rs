//! Numerical and exact tools for the 3D wave equation controlled by incoming
//! spherical waves: unobservable subspaces, Radon observation, the control
//! operator, Kirchhoff evaluation and the non-smooth counterexample.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod campaign;
pub mod config;
pub mod control;
pub mod counterexample;
pub mod dspace;
pub mod error;
pub mod exact;
pub mod fields;
pub mod harmonics;
pub mod quad;
pub mod radon;
pub mod wavesim;

pub use error::{Error, Result};
