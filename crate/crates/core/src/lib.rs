//! Simulation of extended Wigner's Friend scenarios on a statevector backend.

pub mod branch;
pub mod config;
pub mod error;
pub mod ewfs;
pub mod experiment;
pub mod infer;
pub mod lf;
pub mod qsim;
pub mod report;
pub mod validate;

pub use error::{Error, Result};
