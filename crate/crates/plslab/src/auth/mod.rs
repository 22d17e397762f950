//! Key-based multi-factor authentication building blocks: hardware
//! fingerprints, radio-geometry proximity checks, and fast session
//! resumption chained through freshly generated keys.
//!
//! Three independent factors are modeled:
//!
//! * **What the device is** — a physical unclonable function ([`PufDevice`])
//!   answers random challenges with noisy device-unique responses. The
//!   verifier stores challenge-response pairs plus code-offset helper data
//!   at enrollment ([`enroll`]) and later checks a fresh measurement against
//!   a stored pair ([`authenticate`]); every pair is single-use.
//! * **Where the device is** — received-signal-strength measurements from
//!   several verifier positions feed a least-squares transmitter fit, and a
//!   chi-square residual test decides whether a claimed position is
//!   plausible ([`verify_proximity`]).
//! * **Session continuity** — resumption secrets evolve through a keyed
//!   derivation that mixes in each session's fresh key
//!   ([`TicketStore::resume_session`]), so stolen state without the key
//!   chain breaks, and one-time alias identifiers make replay visible.

mod proximity;
mod puf;
mod resume;

pub use proximity::{proximity_fit, verify_proximity, ProximityFit};
pub use puf::{authenticate, enroll, CrpDatabase, CrpRecord, PufDevice, RESPONSE_BLOCKS};
pub use resume::{DigestKdf, Kdf, SessionTicket, TicketStore};
