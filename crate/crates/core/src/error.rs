use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("residue set must be nonempty")]
    EmptyResidueSet,

    #[error("residue {residue} is not below modulus {modulus}")]
    ResidueOutOfRange { residue: usize, modulus: usize },

    #[error("component order is not a partial order: {0}")]
    NotPartialOrder(&'static str),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("invalid section: point {point} is not a member of component {component}")]
    InvalidSection { component: usize, point: usize },

    #[error("cocycles are defined over different component orders")]
    PosetMismatch,

    #[error("oracle budget exceeded: {needed} > {allowed}")]
    BudgetExceeded { needed: usize, allowed: usize },

    #[error("certificate search space too large: {0} candidates")]
    SearchTooLarge(u128),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
