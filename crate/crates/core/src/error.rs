use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A trig-extended product would leave the span of {1, sin f, cos f, sin g, cos g}.
    #[error("extension overflow: product of two non-constant trig coefficients ({0} * {1})")]
    ExtensionOverflow(String, String),

    #[error("missing derivation: coefficient {0} is non-constant but the coframe has no phase rules")]
    MissingDerivation(String),

    #[error("unsupported symbol `{symbol}` in {operation}")]
    UnsupportedSymbol { symbol: String, operation: &'static str },

    #[error("symbolic residue: auxiliary symbol `{symbol}` survives in {tensor}")]
    SymbolicResidue { symbol: String, tensor: &'static str },

    #[error("invalid coframe: {0}")]
    InvalidCoframe(String),

    #[error("rank deficiency: expected rank {expected}, found {found}")]
    Rank { expected: usize, found: usize },

    #[error("irrational rescaling: sqrt({0}) is not rational")]
    IrrationalScale(String),

    #[error("mixed Lambda^2 type: 2-form is not homogeneous in a single U(2)-part")]
    AmbiguousType,

    #[error("not a generalized quasi-Sasaki structure: {0}")]
    NotGeneralizedQuasiSasaki(String),

    #[error("integrability constraint violated: a1*a4 = {lhs} but a2*a3 = {rhs} (the structure equations are integrable only when a1*a4 = a2*a3)")]
    IntegrabilityConstraint { lhs: String, rhs: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("Clifford relations fail: {0}")]
    Clifford(String),

    #[error("verification failed: {0}")]
    Verification(String),
}
