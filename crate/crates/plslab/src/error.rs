use thiserror::Error;

/// Crate-wide error type.
///
/// Validation failures carry the offending field name so callers (and the CLI)
/// can report exactly which parameter was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation rejected a parameter value.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Transmitter and receiver positions coincide; path loss is undefined.
    #[error("degenerate geometry: transmitter and receiver positions coincide")]
    DegenerateGeometry,

    /// The eavesdropper's channel is at least as strong as the legitimate one.
    #[error("secrecy region empty beyond zero secret rate: snr_bob_db must exceed snr_eve_db")]
    RegionEmpty,

    /// Inverse Gaussian tail evaluated outside its domain.
    #[error("q_inv domain error: argument must lie in (0, 1), got {0}")]
    QInvDomain(f64),

    /// delta/(1-epsilon) left the open unit interval.
    #[error("invalid leakage ratio: delta/(1-epsilon) = {0} must lie in (0, 1)")]
    InvalidLeakageRatio(f64),

    /// Operation applied to the wrong channel kind.
    #[error("channel kind mismatch: {op} requires a {expected} channel")]
    ChannelKindMismatch {
        op: &'static str,
        expected: &'static str,
    },

    /// Bit sequence cannot be split into whole code blocks.
    #[error("bit sequence length {len} is not a multiple of the block length {n}")]
    BlockLengthMismatch { len: usize, n: usize },

    /// Two sequences that must align have different lengths.
    #[error("sequence length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    /// Every sample fell inside a guard interval.
    #[error("guard band too wide: all samples were dropped")]
    GuardBandTooWide,

    /// Privacy amplification would output more bits than the residual entropy bound allows.
    #[error(
        "insufficient residual entropy: target length {target} exceeds {len} bits minus {leaked} leaked"
    )]
    InsufficientResidualEntropy {
        target: usize,
        len: usize,
        leaked: usize,
    },

    /// A key-consuming operation ran before privacy amplification produced a key.
    #[error("no key established: the session did not complete privacy amplification")]
    KeyNotEstablished,

    /// Tag verification failed; the payload was not decrypted.
    #[error("integrity check failed: tag does not verify under the derived key")]
    IntegrityCheckFailed,

    /// Wire bytes do not parse as a protocol message.
    #[error("malformed wire message: {0}")]
    MalformedMessage(String),

    /// The two probe-direction channel vectors make Eq-style precoding singular.
    #[error("precoder singular: per-antenna channel coefficients toward both victims coincide")]
    PrecoderSingular,

    /// Every challenge-response pair has been consumed.
    #[error("CRP database exhausted: no unused challenge-response pairs remain")]
    DatabaseExhausted,

    /// Too few, duplicate, or collinear measurement positions.
    #[error("geometry insufficient: need at least 3 distinct, non-collinear measurement positions")]
    GeometryInsufficient,

    /// The ticket's validity window has passed. Distinct from replay.
    #[error("ticket expired: expiry {expiry}, current time {now}")]
    TicketExpired { expiry: u64, now: u64 },

    /// The ticket's alias was already consumed. Distinct from expiry.
    #[error("ticket replayed: alias already consumed")]
    TicketReplayed,

    /// The ticket does not match any live server-side state.
    #[error("ticket unknown: alias or resumption secret does not match server state")]
    TicketUnknown,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for parameter-validation failures.
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
