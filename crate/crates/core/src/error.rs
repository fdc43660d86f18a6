use thiserror::Error;

pub type Result<T> = std::result::Result<T, GameError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input {t} outside payoff domain [0, {max}]")]
    DomainExceeded { t: f64, max: f64 },

    /// f is nonpositive everywhere that was probed; only trivial equilibria exist.
    #[error("payoff has no positive region")]
    NoPositiveRegion,

    /// f stays positive past the expansion cap; no equilibrium exists.
    #[error("payoff stays positive beyond {bound}; no finite root")]
    NoFiniteRoot { bound: f64 },

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("net demand {0} is not positive")]
    NonPositiveNetDemand(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl GameError {
    /// True for the errors that mean the game has no (nontrivial) equilibrium.
    pub fn is_no_equilibrium(&self) -> bool {
        matches!(
            self,
            GameError::NoEquilibrium(_)
                | GameError::NoPositiveRegion
                | GameError::NoFiniteRoot { .. }
        )
    }
}
