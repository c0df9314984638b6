use thiserror::Error;

/// Failures of the geometric kernels and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    #[error("tangent is lightlike at t = {t}")]
    LightlikeTangent { t: f64 },
    #[error("curvature vanishes at t = {t}")]
    VanishingCurvature { t: f64 },
    #[error("caustic system is singular at t = {t}")]
    SingularSystem { t: f64 },
    #[error("normal lines at t1 = {t1} and t2 = {t2} are parallel")]
    ParallelNormals { t1: f64, t2: f64 },
    #[error("curve is not regular at t = {t}")]
    Irregular { t: f64 },
    #[error("lightcone pseudo-circles have no branches")]
    LightconeCircle,
    #[error("point is off the pseudo-circle (residual {residual:e})")]
    NotOnCircle { residual: f64 },
    #[error("contact order is ambiguous: no derivative clears the gap band")]
    Ambiguous,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("jacobian is degenerate (condition estimate {condition:e})")]
    DegenerateJacobian { condition: f64 },
    #[error("configuration is not generic: {what}")]
    NonGeneric { what: &'static str },
    #[error("invalid argument: {what}")]
    InvalidArgument { what: &'static str },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
