use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("jet order {order} exceeds the configured cap {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("division by an identically zero expression")]
    DivisionByZero,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("expression is not polynomial in {0}")]
    NotPolynomial(String),

    #[error("unknown equation `{0}`")]
    UnknownEquation(String),

    #[error("f does not satisfy f_(v_t v_t) = (1 - 2 beta v_t) f_(v_x v_x): residual {0}")]
    FEquation(String),

    #[error("projection pair mismatch: {0}")]
    PairMismatch(String),

    #[error("expression is nonlocal at the pressure level (contains {0})")]
    Nonlocal(String),

    #[error("wave speed degenerates: min(1 - 2 beta p) = {margin:e} at x = {x}")]
    DegenerateWaveSpeed { margin: f64, x: f64 },

    #[error("non-finite value in solver state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("monitor denominator degenerates at x = {x} (|p_x^2 - (1-2 beta p) p_t^2| = {value:e})")]
    DegenerateDenominator { x: f64, value: f64 },

    #[error("monitor {0} requires alpha = 0")]
    UndampedOnly(String),

    #[error("exact solution evaluated outside its domain: {0}")]
    DomainViolation(String),

    #[error("Newton iteration did not converge: {0}")]
    NewtonNonConvergence(String),

    #[error("singular Jacobian in Newton iteration")]
    SingularJacobian,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateWaveSpeed { .. }
                | Error::NonFiniteState { .. }
                | Error::DegenerateDenominator { .. }
                | Error::DomainViolation(_)
                | Error::NewtonNonConvergence(_)
                | Error::SingularJacobian
        )
    }
}
