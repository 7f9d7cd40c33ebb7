//! Independent numerical checks of the closed forms: a conservative
//! Crank-Nicolson integrator for the full equation, an Euler-Maruyama path
//! sampler for the associated Itô process, and comparison metrics.

mod fd;
mod grid;
mod mc;
mod metrics;

pub use fd::{fd_evolve, fd_evolve_report, fd_evolve_snapshots, FdReport, PECLET_LIMIT, POSITIVITY_FLOOR};
pub use grid::{GridDensity, MIN_GRID_POINTS};
pub use mc::{mc_sample, PathEnsemble, MIN_PATHS, MIN_STEPS};
pub use metrics::{ks_statistic, l1_distance};
