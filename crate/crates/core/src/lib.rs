//! Exact similarity solutions of the one-dimensional Fokker-Planck equation
//! with time-dependent drift and diffusion in scaling form, together with
//! independent finite-difference and Monte-Carlo oracles that cross-check them.

pub mod cli;
pub mod config;
pub mod error;
pub mod oracle;
pub mod profiles;
pub mod qes;
pub mod quadrature;
pub mod reduction;
pub mod scaling;
pub mod solutions;

pub use error::{Error, Result};
