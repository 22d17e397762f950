//! Fast session resumption with one-time aliases and key-randomized
//! secret evolution.
//!
//! Every resumption derives the next secret from the current one **and** the
//! session's freshly generated key, so an attacker who exfiltrates a stored
//! secret but misses the key material cannot walk the chain forward. Tickets
//! are addressed by one-time alias identifiers: an alias is retired the
//! moment it is redeemed, making replays detectable, and tickets carry a
//! monotonic expiry.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Keyed derivation interface for evolving resumption secrets.
pub trait Kdf {
    /// Derive 32 bytes from a secret and a public context/info string.
    fn derive(&self, key: &[u8], info: &[u8]) -> [u8; 32];
}

/// Reference instantiation: a keyed digest with unambiguous (length-framed)
/// input encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DigestKdf;

impl Kdf for DigestKdf {
    fn derive(&self, key: &[u8], info: &[u8]) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update((key.len() as u64).to_le_bytes());
        hasher.update(key);
        hasher.update(info);
        hasher.finalize().into()
    }
}

/// Alias bytes exposed on the wire.
const ALIAS_LEN: usize = 16;

/// One resumption credential: a one-time alias, the secret it proves
/// knowledge of, the session key it was issued under, and its expiry on the
/// issuing store's monotonic clock.
#[derive(Clone, PartialEq, Eq)]
pub struct SessionTicket {
    alias_id: Vec<u8>,
    resumption_secret: Vec<u8>,
    skg_key: Vec<u8>,
    expiry: u64,
}

impl SessionTicket {
    pub fn alias_id(&self) -> &[u8] {
        &self.alias_id
    }

    pub fn resumption_secret(&self) -> &[u8] {
        &self.resumption_secret
    }

    pub fn skg_key(&self) -> &[u8] {
        &self.skg_key
    }

    pub fn expiry(&self) -> u64 {
        self.expiry
    }
}

/// Secrets never appear in logs: only the public alias and expiry print.
impl fmt::Debug for SessionTicket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SessionTicket")
            .field("alias_id", &hex(&self.alias_id))
            .field("resumption_secret", &"[redacted]")
            .field("skg_key", &"[redacted]")
            .field("expiry", &self.expiry)
            .finish()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Server-side resumption state: the set of live aliases with their expected
/// secrets, the retired aliases (for replay detection), and a monotonic
/// clock. Operations on one store are totally ordered.
pub struct TicketStore<K: Kdf = DigestKdf> {
    kdf: K,
    now: u64,
    lifetime: u64,
    active: Vec<(Vec<u8>, [u8; 32])>,
    retired: Vec<Vec<u8>>,
}

impl TicketStore<DigestKdf> {
    /// Store with the reference keyed-digest derivation.
    ///
    /// # Errors
    /// `lifetime` must be positive.
    pub fn new(lifetime: u64) -> Result<Self> {
        TicketStore::with_kdf(DigestKdf, lifetime)
    }
}

impl<K: Kdf> TicketStore<K> {
    /// # Errors
    /// `lifetime` must be positive.
    pub fn with_kdf(kdf: K, lifetime: u64) -> Result<Self> {
        if lifetime == 0 {
            return Err(Error::invalid("lifetime", "must be positive"));
        }
        Ok(TicketStore {
            kdf,
            now: 0,
            lifetime,
            active: Vec::new(),
            retired: Vec::new(),
        })
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Advance the monotonic clock.
    pub fn advance_clock(&mut self, dt: u64) {
        self.now = self.now.saturating_add(dt);
    }

    fn alias_for(&self, secret: &[u8; 32]) -> Vec<u8> {
        self.kdf.derive(secret, b"alias")[..ALIAS_LEN].to_vec()
    }

    /// Issue the first ticket of a chain from initial key material agreed
    /// out of band (for example a full handshake's session key).
    pub fn issue_root(&mut self, initial_secret: &[u8], skg_key: &[u8]) -> SessionTicket {
        let secret = self.kdf.derive(initial_secret, skg_key);
        let alias = self.alias_for(&secret);
        self.active.push((alias.clone(), secret));
        SessionTicket {
            alias_id: alias,
            resumption_secret: secret.to_vec(),
            skg_key: skg_key.to_vec(),
            expiry: self.now + self.lifetime,
        }
    }

    /// Redeem a ticket and mint its successor. The next resumption secret
    /// is derived from the current one and the *fresh* session key, the old
    /// alias is retired, and the decision is the `Result` itself.
    ///
    /// # Errors
    /// [`Error::TicketReplayed`] for an alias that was already redeemed,
    /// [`Error::TicketExpired`] past the ticket's expiry, and
    /// [`Error::TicketUnknown`] for an alias this store never issued (or a
    /// wrong secret presented under a live alias).
    pub fn resume_session(
        &mut self,
        ticket: &SessionTicket,
        fresh_skg_key: &[u8],
    ) -> Result<SessionTicket> {
        let idx = match self
            .active
            .iter()
            .position(|(alias, _)| *alias == ticket.alias_id)
        {
            Some(idx) => idx,
            None => {
                if self.retired.iter().any(|a| *a == ticket.alias_id) {
                    return Err(Error::TicketReplayed);
                }
                return Err(Error::TicketUnknown);
            }
        };
        if self.active[idx].1[..] != ticket.resumption_secret[..] {
            return Err(Error::TicketUnknown);
        }
        if ticket.expiry <= self.now {
            return Err(Error::TicketExpired {
                expiry: ticket.expiry,
                now: self.now,
            });
        }
        let (alias, secret) = self.active.swap_remove(idx);
        self.retired.push(alias);
        let next_secret = self.kdf.derive(&secret, fresh_skg_key);
        let next_alias = self.alias_for(&next_secret);
        self.active.push((next_alias.clone(), next_secret));
        Ok(SessionTicket {
            alias_id: next_alias,
            resumption_secret: next_secret.to_vec(),
            skg_key: fresh_skg_key.to_vec(),
            expiry: self.now + self.lifetime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    use crate::rng::Rng;

    fn fresh_key(rng: &mut Rng) -> Vec<u8> {
        let mut key = vec![0u8; 32];
        rng.fill_bytes(&mut key);
        key
    }

    #[test]
    fn honest_chain_accepts_with_distinct_aliases() {
        let mut store = TicketStore::new(100).unwrap();
        let mut rng = Rng::new(70, 0);
        let mut ticket = store.issue_root(b"handshake secret", &fresh_key(&mut rng));
        let mut aliases: HashSet<Vec<u8>> = HashSet::new();
        aliases.insert(ticket.alias_id().to_vec());
        for _ in 0..10 {
            store.advance_clock(1);
            ticket = store.resume_session(&ticket, &fresh_key(&mut rng)).unwrap();
            assert!(
                aliases.insert(ticket.alias_id().to_vec()),
                "alias reused within a chain"
            );
        }
        assert_eq!(aliases.len(), 11);
    }

    #[test]
    fn replayed_ticket_is_rejected_after_successor_issued() {
        let mut store = TicketStore::new(100).unwrap();
        let mut rng = Rng::new(71, 0);
        let t0 = store.issue_root(b"root", &fresh_key(&mut rng));
        let t1 = store.resume_session(&t0, &fresh_key(&mut rng)).unwrap();
        let t2 = store.resume_session(&t1, &fresh_key(&mut rng)).unwrap();
        let t3 = store.resume_session(&t2, &fresh_key(&mut rng)).unwrap();
        let _t4 = store.resume_session(&t3, &fresh_key(&mut rng)).unwrap();
        assert!(matches!(
            store.resume_session(&t3, &fresh_key(&mut rng)),
            Err(Error::TicketReplayed)
        ));
        assert!(matches!(
            store.resume_session(&t0, &fresh_key(&mut rng)),
            Err(Error::TicketReplayed)
        ));
    }

    #[test]
    fn expired_ticket_is_rejected_with_its_own_code() {
        let mut store = TicketStore::new(10).unwrap();
        let mut rng = Rng::new(72, 0);
        let ticket = store.issue_root(b"root", &fresh_key(&mut rng));
        store.advance_clock(10);
        match store.resume_session(&ticket, &fresh_key(&mut rng)) {
            Err(Error::TicketExpired { expiry, now }) => {
                assert_eq!(expiry, 10);
                assert_eq!(now, 10);
            }
            other => panic!("expected expiry rejection, got {other:?}"),
        }
    }

    #[test]
    fn foreign_or_tampered_tickets_are_unknown() {
        let mut store = TicketStore::new(100).unwrap();
        let mut other = TicketStore::new(100).unwrap();
        let mut rng = Rng::new(73, 0);
        let foreign = other.issue_root(b"other root", &fresh_key(&mut rng));
        assert!(matches!(
            store.resume_session(&foreign, &fresh_key(&mut rng)),
            Err(Error::TicketUnknown)
        ));
        let genuine = store.issue_root(b"root", &fresh_key(&mut rng));
        let mut tampered = genuine.clone();
        tampered.resumption_secret[0] ^= 1;
        assert!(matches!(
            store.resume_session(&tampered, &fresh_key(&mut rng)),
            Err(Error::TicketUnknown)
        ));
        // The genuine ticket is still live after the failed attempts.
        assert!(store.resume_session(&genuine, &fresh_key(&mut rng)).is_ok());
    }

    #[test]
    fn secrets_stay_pairwise_distinct_over_long_chains() {
        let mut store = TicketStore::new(u64::MAX / 2).unwrap();
        let mut rng = Rng::new(74, 0);
        let mut ticket = store.issue_root(b"root", &fresh_key(&mut rng));
        let mut secrets: HashSet<Vec<u8>> = HashSet::new();
        secrets.insert(ticket.resumption_secret().to_vec());
        for _ in 0..1000 {
            ticket = store.resume_session(&ticket, &fresh_key(&mut rng)).unwrap();
            secrets.insert(ticket.resumption_secret().to_vec());
        }
        assert_eq!(secrets.len(), 1001);
    }

    #[test]
    fn identical_inputs_give_identical_chains() {
        let run = || {
            let mut store = TicketStore::new(50).unwrap();
            let mut rng = Rng::new(75, 0);
            let mut ticket = store.issue_root(b"root", &fresh_key(&mut rng));
            let mut transcript = Vec::new();
            for _ in 0..5 {
                ticket = store.resume_session(&ticket, &fresh_key(&mut rng)).unwrap();
                transcript.push((
                    ticket.alias_id().to_vec(),
                    ticket.resumption_secret().to_vec(),
                    ticket.expiry(),
                ));
            }
            transcript
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn stolen_secret_without_the_session_key_stalls_the_chain() {
        // Toy 16-bit key space: exhaustively search every possible fresh
        // key. Exactly one candidate reproduces the next secret — the true
        // key — so an attacker holding only the current secret gains
        // nothing beyond brute force over the key it never saw.
        let kdf = DigestKdf;
        let mut store = TicketStore::new(100).unwrap();
        let mut rng = Rng::new(76, 0);
        let ticket = store.issue_root(b"root", &fresh_key(&mut rng));
        let true_key = (rng.next_u64() & 0xffff) as u16;
        let next = store
            .resume_session(&ticket, &true_key.to_le_bytes())
            .unwrap();
        let mut preimages = 0u32;
        for guess in 0..=u16::MAX {
            let candidate = kdf.derive(ticket.resumption_secret(), &guess.to_le_bytes());
            if candidate[..] == next.resumption_secret()[..] {
                preimages += 1;
                assert_eq!(guess, true_key);
            }
        }
        assert_eq!(preimages, 1, "secret must determine nothing without the key");
    }

    #[test]
    fn debug_output_redacts_secrets() {
        let mut store = TicketStore::new(100).unwrap();
        let ticket = store.issue_root(b"root", b"session key bytes");
        let shown = format!("{ticket:?}");
        assert!(shown.contains("[redacted]"));
        let secret_hex = hex(ticket.resumption_secret());
        assert!(!shown.contains(&secret_hex));
        assert!(!shown.contains("session key bytes"));
    }

    #[test]
    fn store_validation() {
        assert!(TicketStore::new(0).is_err());
    }
}
