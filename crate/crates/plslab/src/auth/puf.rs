//! Simulated physical-unclonable-function authentication with single-use
//! challenge-response pairs and code-offset helper data.
//!
//! A device is modeled as a static latent fingerprint vector; each challenge
//! selects a deterministic ±1 mixing of the fingerprint per response bit,
//! and every measurement adds fresh Gaussian noise before sign quantization.
//! Enrollment stores the quantized response together with a linear-code
//! syndrome; authentication corrects a fresh noisy measurement toward the
//! enrolled coset and accepts only on exact agreement, consuming the record
//! whatever the outcome.

use std::collections::HashSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::skg::BlockCode;

/// Response bits per challenge, in units of code blocks: enough material
/// that an impostor device has a negligible chance of landing within the
/// code's correction radius on every block.
pub const RESPONSE_BLOCKS: usize = 4;

/// Challenge bytes per record.
const CHALLENGE_LEN: usize = 16;

/// A device with a physically unclonable response function, simulated as a
/// fixed latent fingerprint read through challenge-dependent mixing plus
/// measurement noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PufDevice {
    fingerprint: Vec<f64>,
    response_noise_std: f64,
}

impl PufDevice {
    /// # Errors
    /// The fingerprint must be nonempty with finite entries;
    /// `response_noise_std` must be nonnegative and finite.
    pub fn new(fingerprint: Vec<f64>, response_noise_std: f64) -> Result<Self> {
        if fingerprint.is_empty() {
            return Err(Error::invalid("fingerprint", "must be nonempty"));
        }
        if fingerprint.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("fingerprint", "entries must be finite"));
        }
        if !(response_noise_std.is_finite() && response_noise_std >= 0.0) {
            return Err(Error::invalid(
                "response_noise_std",
                format!("must be nonnegative and finite, got {response_noise_std}"),
            ));
        }
        Ok(PufDevice {
            fingerprint,
            response_noise_std,
        })
    }

    /// A fresh device with `cells` standard-normal fingerprint entries —
    /// each manufactured instance gets its own independent draw.
    ///
    /// # Errors
    /// Same parameter checks as [`PufDevice::new`].
    pub fn random(cells: usize, response_noise_std: f64, rng: &mut Rng) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("cells", "must be at least 1"));
        }
        let fingerprint = (0..cells).map(|_| rng.standard_normal()).collect();
        PufDevice::new(fingerprint, response_noise_std)
    }

    pub fn fingerprint(&self) -> &[f64] {
        &self.fingerprint
    }

    pub fn response_noise_std(&self) -> f64 {
        self.response_noise_std
    }

    /// Latent (noise-free) analog response for one bit position of a
    /// challenge: a challenge-keyed ±1 mixing of the fingerprint, scaled so
    /// the result is approximately standard normal over devices.
    fn latent_bit_value(&self, challenge: &[u8], bit_index: u64) -> f64 {
        let digest = Sha256::digest(challenge);
        let seed = u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"));
        let mut mixer = Rng::new(seed, bit_index);
        let mut acc = 0.0;
        let mut word = 0u64;
        for (k, &cell) in self.fingerprint.iter().enumerate() {
            if k % 64 == 0 {
                word = mixer.next_u64();
            }
            let sign = if word & 1 == 1 { 1.0 } else { -1.0 };
            word >>= 1;
            acc += sign * cell;
        }
        acc / (self.fingerprint.len() as f64).sqrt()
    }

    /// One noisy quantized measurement of `n_bits` response bits for a
    /// challenge. Repeating the call reproduces the same latent values but
    /// fresh measurement noise.
    pub fn respond(&self, challenge: &[u8], n_bits: usize, rng: &mut Rng) -> Vec<u8> {
        (0..n_bits)
            .map(|j| {
                let v = self.latent_bit_value(challenge, j as u64) + rng.normal(self.response_noise_std);
                u8::from(v >= 0.0)
            })
            .collect()
    }
}

/// One enrolled challenge-response pair with its reconciliation helper data
/// and single-use marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrpRecord {
    challenge: Vec<u8>,
    enrolled_response: Vec<u8>,
    helper_data: Vec<u8>,
    used: bool,
}

impl CrpRecord {
    pub fn challenge(&self) -> &[u8] {
        &self.challenge
    }

    pub fn enrolled_response(&self) -> &[u8] {
        &self.enrolled_response
    }

    pub fn helper_data(&self) -> &[u8] {
        &self.helper_data
    }

    pub fn used(&self) -> bool {
        self.used
    }
}

/// Verifier-side store of enrolled records. Records are consumed in
/// enrollment order; a consumed record is never selected again.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrpDatabase {
    records: Vec<CrpRecord>,
}

impl CrpDatabase {
    pub fn records(&self) -> &[CrpRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn unused_count(&self) -> usize {
        self.records.iter().filter(|r| !r.used).count()
    }

    /// Line-delimited text encoding, one record per line:
    ///
    /// ```text
    /// <challenge hex> <response bits as 0/1> <helper bits as 0/1> <used 0/1>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            for byte in &r.challenge {
                write!(out, "{byte:02x}").expect("string write");
            }
            out.push(' ');
            out.extend(r.enrolled_response.iter().map(|&b| if b == 0 { '0' } else { '1' }));
            out.push(' ');
            out.extend(r.helper_data.iter().map(|&b| if b == 0 { '0' } else { '1' }));
            out.push(' ');
            out.push(if r.used { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    /// Parse the [`CrpDatabase::to_text`] encoding.
    ///
    /// # Errors
    /// [`Error::MalformedMessage`] on any structural defect: wrong field
    /// count, odd-length or non-hex challenge, non-binary response or helper
    /// characters, or an unrecognized used flag.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::MalformedMessage(format!(
                    "expected 4 fields per record line, got {}",
                    fields.len()
                )));
            }
            let challenge = parse_hex(fields[0])?;
            let enrolled_response = parse_bits(fields[1])?;
            let helper_data = parse_bits(fields[2])?;
            let used = match fields[3] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::MalformedMessage(format!(
                        "used flag must be 0 or 1, got {other:?}"
                    )))
                }
            };
            if challenge.is_empty() || enrolled_response.is_empty() {
                return Err(Error::MalformedMessage(
                    "challenge and response must be nonempty".into(),
                ));
            }
            records.push(CrpRecord {
                challenge,
                enrolled_response,
                helper_data,
                used,
            });
        }
        Ok(CrpDatabase { records })
    }
}

fn parse_hex(s: &str) -> Result<Vec<u8>> {
    if s.len() % 2 != 0 {
        return Err(Error::MalformedMessage("odd-length hex field".into()));
    }
    (0..s.len() / 2)
        .map(|i| {
            u8::from_str_radix(&s[2 * i..2 * i + 2], 16)
                .map_err(|_| Error::MalformedMessage(format!("bad hex field {s:?}")))
        })
        .collect()
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::MalformedMessage(format!(
                "bit fields must be 0/1, got {other:?}"
            ))),
        })
        .collect()
}

/// Offline enrollment: draw `n_crps` unique random challenges, measure and
/// quantize the device's (noisy) response to each, and store it with the
/// code syndrome as helper data, all marked unused.
///
/// # Errors
/// `n_crps` must be at least 1.
pub fn enroll(
    device: &PufDevice,
    n_crps: usize,
    code: &BlockCode,
    rng: &mut Rng,
) -> Result<CrpDatabase> {
    if n_crps == 0 {
        return Err(Error::invalid("n_crps", "must be at least 1"));
    }
    let n_bits = RESPONSE_BLOCKS * code.n();
    let mut seen: HashSet<Vec<u8>> = HashSet::with_capacity(n_crps);
    let mut records = Vec::with_capacity(n_crps);
    while records.len() < n_crps {
        let mut challenge = vec![0u8; CHALLENGE_LEN];
        rng.fill_bytes(&mut challenge);
        // Redraw on collision so challenges stay unique in the database.
        if !seen.insert(challenge.clone()) {
            continue;
        }
        let enrolled_response = device.respond(&challenge, n_bits, rng);
        let helper_data = code.syndrome(&enrolled_response)?;
        records.push(CrpRecord {
            challenge,
            enrolled_response,
            helper_data,
            used: false,
        });
    }
    Ok(CrpDatabase { records })
}

/// One authentication round: consume the first unused record, measure a
/// fresh device response to its challenge, correct it toward the enrolled
/// coset using the helper data, and accept only on exact agreement. The
/// record is marked used whether or not the attempt succeeds.
///
/// # Errors
/// [`Error::DatabaseExhausted`] when no unused record remains; code length
/// errors if the database was enrolled under an incompatible code.
pub fn authenticate(
    device: &PufDevice,
    db: &mut CrpDatabase,
    code: &BlockCode,
    rng: &mut Rng,
) -> Result<(bool, CrpRecord)> {
    let idx = db
        .records
        .iter()
        .position(|r| !r.used)
        .ok_or(Error::DatabaseExhausted)?;
    // Consume the record up front: a failed attempt burns it too.
    db.records[idx].used = true;
    let record = db.records[idx].clone();
    let fresh = device.respond(&record.challenge, record.enrolled_response.len(), rng);
    let corrected = code.decode_toward(&fresh, &record.helper_data)?;
    let accept = corrected == record.enrolled_response;
    Ok((accept, record))
}
