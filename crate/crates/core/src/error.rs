use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("substitution leaves the coefficient family: {0}")]
    SubstitutionOutOfFamily(String),
    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),
    #[error("fractional power of a negative base: {0}")]
    NegativeBaseFractionalPower(String),
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("basis not closed under the bracket: [{left}, {right}] leaves residual {residual}")]
    BasisNotClosed {
        left: String,
        right: String,
        residual: String,
    },
    #[error("antiderivative not in the coefficient family: {0}")]
    NonIntegrableInFamily(String),
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("contraction is singular: {0}")]
    SingularContraction(String),
    #[error("invalid window: t0 = {t0}, t1 = {t1}")]
    InvalidWindow { t0: String, t1: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no candidate operator annihilates the lifted solution")]
    NoOperatorMatched,
    #[error("flow hit a singularity: {0}")]
    SingularFlow(String),
    #[error("evaluation failed: {0}")]
    EvaluationFailure(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("expression is not invertible in the coefficient family: {0}")]
    NotInvertible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
