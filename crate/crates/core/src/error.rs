use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a rotation: orthogonality defect {orthogonality:.3e}, det {det}")]
    NotARotation { orthogonality: f64, det: f64 },

    #[error("matrix is not skew-symmetric: symmetric part norm {0:.3e}")]
    NotSkew(f64),

    #[error("inertia tensor is not symmetric: asymmetry {0:.3e}")]
    AsymmetricInertia(f64),

    #[error("inertia tensor is singular or indefinite at t = {t}: condition number {condition:.3e}")]
    SingularInertia { t: f64, condition: f64 },

    #[error("invalid gains: {0}")]
    InvalidGains(String),

    #[error("angular velocity error is inconsistent with ω − ω_d (mismatch {0:.3e})")]
    InconsistentVelocityError(f64),

    #[error("vector field returned a non-finite value at t = {t}")]
    NonFiniteField { t: f64 },

    #[error("controller returned a non-finite input at step {step}")]
    NonFiniteControl { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
