use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole at z = {z}")]
    Pole { z: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("diffusion profile is identically zero")]
    DegenerateDiffusion,

    #[error("inconsistent scaling exponents: a - d = {a_minus_d} but 2a - e = {two_a_minus_e}")]
    InconsistentScaling { a_minus_d: f64, two_a_minus_e: f64 },

    #[error("degenerate time scaling: b = 0")]
    DegenerateTimeScaling,

    #[error("invalid time t = {0}; t must be > 0")]
    InvalidTime(f64),

    #[error("diffusion profile vanishes inside the domain near z = {z}")]
    InteriorDegeneracy { z: f64 },

    #[error("unnormalizable solution: {0}")]
    Unnormalizable(String),

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("statistic `{0}` is not defined for this family")]
    UnsupportedStatistic(&'static str),

    #[error("crossing time is undefined for mu1 = 1/2")]
    UndefinedCrossing,

    #[error("transform `{transform}` does not apply to the {family} family")]
    UnsupportedTransform { transform: String, family: String },

    #[error("ill-posed diffusion: D2({x}, {t}) = {value}")]
    IllPosedDiffusion { x: f64, t: f64, value: f64 },

    #[error("grid too coarse: cell Peclet number {peclet:.3} exceeds {limit} near x = {x}; refine the grid")]
    Resolution { peclet: f64, limit: f64, x: f64 },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
