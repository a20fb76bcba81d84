use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{j} and {p} are not coprime")]
    NotCoprime { j: i64, p: i64 },

    #[error("involution case {case} does not apply to period {p}")]
    CaseParityMismatch { case: String, p: u32 },

    #[error("point lies outside the tongue: {0}")]
    OutsideTongue(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular jacobian (|det| = {det:e}); the orbit is parabolic")]
    SingularJacobian { det: f64 },

    #[error("orbit of period {period} fails to close (residual {residual:e})")]
    ClosureFailure { period: u32, residual: f64 },

    #[error("no interior extremum in the bracket")]
    NoInteriorExtremum,

    #[error("residual is identically flat; extremum undefined")]
    FlatResidual,

    #[error("lost tongue at k = {k}: no sign change near omega = {omega}")]
    LostTongue { k: f64, omega: f64 },

    #[error("no stable orbit found: {0}")]
    NoStableOrbit(String),

    #[error("cascade lost at level {level}; partial bifurcation values {k_values:?}")]
    CascadeLost { level: usize, k_values: Vec<f64> },
}

impl Error {
    /// True for errors caused by bad arguments rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotCoprime { .. }
                | Error::CaseParityMismatch { .. }
                | Error::OutsideTongue(_)
        )
    }
}
