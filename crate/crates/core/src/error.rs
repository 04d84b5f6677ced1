use thiserror::Error;

/// Errors produced by the signcryption library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a prime >= 11")]
    InvalidModulus(u64),

    #[error("policy syntax error at byte {offset}: {message}")]
    PolicySyntax { offset: usize, message: String },

    #[error("empty policy")]
    EmptyPolicy,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("attribute `{0}` has no controller mapping")]
    UnmappedAttribute(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown attribute authority `{0}`")]
    UnknownAuthority(String),

    #[error("unknown signer `{0}`")]
    UnknownSigner(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid universe: {0}")]
    InvalidUniverse(String),

    #[error("attribute `{attribute}` is controlled by `{expected}`, not `{actual}`")]
    ControllerMismatch {
        attribute: String,
        expected: String,
        actual: String,
    },

    #[error("policy shape violation: {0}")]
    PolicyShape(String),

    #[error("missing public key for authority `{0}`")]
    MissingAuthorityKey(String),

    #[error("policy is not satisfied by the supplied keys")]
    Unsatisfied,

    #[error("authentication failed")]
    AuthenticationFailed,

    #[error("identity `{0}` already has a prime assigned")]
    AlreadyAssigned(String),

    #[error("identity `{0}` has no registered prime")]
    UnregisteredIdentity(String),

    #[error("CRT moduli are not pairwise coprime")]
    NonCoprimeModuli,

    #[error("prime registry masks {actual} bits but the group order needs {expected}")]
    MaskWidth { expected: u32, actual: u32 },

    #[error("CRT residue out of range for its modulus")]
    ResidueOutOfRange,

    #[error("secret exponent must be nonzero")]
    ZeroSecret,

    #[error("random sampling gave up after too many attempts")]
    RandomnessExhausted,

    #[error("decode error: {0}")]
    Decode(String),

    #[error("{0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
