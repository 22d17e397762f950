//! Secret-key generation from reciprocal channel observations.
//!
//! The pipeline has three mandatory stages, run in a fixed order:
//!
//! 1. **Quantization** ([`quantize`]) — both parties turn their channel
//!    observations into bits and agree on which samples survive the guard
//!    band.
//! 2. **Information reconciliation** ([`reconcile`]) — Alice publishes a
//!    per-block syndrome; Bob shifts his bits into her coset; a short public
//!    digest verifies agreement.
//! 3. **Privacy amplification** ([`privacy_amplify`]) — the agreed bits are
//!    compressed through a seeded universal hash, discarding at least as many
//!    bits as were made public in stage 2.
//!
//! [`run_session`] drives all three stages and only exposes a key when the
//! digest verified; there is no public constructor for a key that skips
//! amplification. The key splits into an encryption half and an integrity
//! half for the hybrid messaging flow in [`hybrid`].

pub mod amplify;
pub mod code;
pub mod hybrid;
pub mod quantize;

use num_complex::Complex64;

pub use amplify::privacy_amplify;
pub use code::{reconcile, BlockCode, Reconciliation, DIGEST_BITS};
pub use hybrid::{
    hybrid_receive, hybrid_send, HybridMessage, KeyedDigestMac, MessageAuth, StreamCipher,
    XorStreamCipher,
};
pub use quantize::{quantize, select_bits, Quantizer};

use crate::error::{Error, Result};

/// Secret-key rate of the reciprocal-observation pair `z = h + n` at both
/// parties: the mutual information between two jointly Gaussian complex
/// observations sharing the channel component,
/// `log2( (σ_h² + σ_n²)² / ((σ_h² + σ_n²)² − σ_h⁴) )` bits per coherence
/// block.
///
/// The rate diverges as `noise_var → 0` (perfect correlation) and tends to 0
/// as `noise_var → ∞`.
///
/// # Errors
/// Both variances must be positive and finite.
pub fn skg_rate(channel_var: f64, noise_var: f64) -> Result<f64> {
    if !(channel_var.is_finite() && channel_var > 0.0) {
        return Err(Error::invalid(
            "channel_var",
            format!("must be positive and finite, got {channel_var}"),
        ));
    }
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::invalid(
            "noise_var",
            format!("must be positive and finite, got {noise_var}"),
        ));
    }
    let r = channel_var / (channel_var + noise_var);
    // -log2(1 - r²), computed via ln_1p for precision at small r.
    Ok(-(-r * r).ln_1p() / std::f64::consts::LN_2)
}

/// [`skg_rate`] clipped at `ceiling`; the flag reports whether clipping
/// happened (the raw rate diverges for vanishing noise).
///
/// # Errors
/// As [`skg_rate`]; `ceiling` must be positive and finite.
pub fn skg_rate_capped(channel_var: f64, noise_var: f64, ceiling: f64) -> Result<(f64, bool)> {
    if !(ceiling.is_finite() && ceiling > 0.0) {
        return Err(Error::invalid(
            "ceiling",
            format!("must be positive and finite, got {ceiling}"),
        ));
    }
    let rate = skg_rate(channel_var, noise_var)?;
    if rate > ceiling {
        Ok((ceiling, true))
    } else {
        Ok((rate, false))
    }
}

/// Pack a 0/1 bit slice into bytes, most-significant bit first, zero padding.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 8] |= (b & 1) << (7 - i % 8);
    }
    out
}

/// Unpack `bit_len` bits from MSB-first packed bytes.
pub fn unpack_bits(bytes: &[u8], bit_len: usize) -> Vec<u8> {
    (0..bit_len)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

/// Shared parameters of a key-generation session. Both parties must hold an
/// identical configuration (it is public).
#[derive(Debug, Clone, PartialEq)]
pub struct SkgConfig {
    pub quantizer: Quantizer,
    pub code: BlockCode,
    /// Final key length, bits; split evenly into encryption and integrity
    /// halves.
    pub key_len_bits: usize,
    /// Public seed of the privacy-amplification hash family.
    pub pa_seed: u64,
}

impl SkgConfig {
    /// # Errors
    /// `key_len_bits` must be even and at least 16.
    pub fn new(
        quantizer: Quantizer,
        code: BlockCode,
        key_len_bits: usize,
        pa_seed: u64,
    ) -> Result<Self> {
        if key_len_bits < 16 || key_len_bits % 2 != 0 {
            return Err(Error::invalid(
                "key_len_bits",
                format!("must be even and >= 16, got {key_len_bits}"),
            ));
        }
        Ok(SkgConfig {
            quantizer,
            code,
            key_len_bits,
            pa_seed,
        })
    }
}

/// A privacy-amplified key, split into an encryption half `k_e` and an
/// integrity half `k_i` (`k = k_e ∥ k_i`).
///
/// `Debug` prints only the length; key material never lands in logs.
#[derive(Clone, PartialEq, Eq)]
pub struct SkgKey {
    bits: Vec<u8>,
}

impl std::fmt::Debug for SkgKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SkgKey({} bits, redacted)", self.bits.len())
    }
}

impl SkgKey {
    /// Derive a key from reconciled bits: privacy amplification is the only
    /// way to obtain an [`SkgKey`].
    ///
    /// # Errors
    /// Propagates the residual-entropy check of [`privacy_amplify`].
    pub fn derive(reconciled_bits: &[u8], leaked_bits: usize, cfg: &SkgConfig) -> Result<Self> {
        let bits = privacy_amplify(reconciled_bits, leaked_bits, cfg.key_len_bits, cfg.pa_seed)?;
        Ok(SkgKey { bits })
    }

    pub fn len_bits(&self) -> usize {
        self.bits.len()
    }

    /// Full key bits (`k_e ∥ k_i`).
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Encryption half, packed to bytes.
    pub fn enc_bytes(&self) -> Vec<u8> {
        pack_bits(&self.bits[..self.bits.len() / 2])
    }

    /// Integrity half, packed to bytes.
    pub fn int_bytes(&self) -> Vec<u8> {
        pack_bits(&self.bits[self.bits.len() / 2..])
    }
}

/// Completed (or failed) key-generation session between two observation
/// sequences. A key is present if and only if reconciliation verified.
#[derive(Debug, Clone, PartialEq)]
pub struct SkgSession {
    bits_a: Vec<u8>,
    bits_b: Vec<u8>,
    syndrome: Vec<u8>,
    success: bool,
    key: Option<SkgKey>,
    leaked_bits: usize,
}

impl SkgSession {
    /// Alice's aligned quantizer output.
    pub fn bits_a(&self) -> &[u8] {
        &self.bits_a
    }

    /// Bob's aligned quantizer output (pre-reconciliation).
    pub fn bits_b(&self) -> &[u8] {
        &self.bits_b
    }

    /// Alice's published syndrome.
    pub fn syndrome(&self) -> &[u8] {
        &self.syndrome
    }

    /// Whether the verification digest matched.
    pub fn success(&self) -> bool {
        self.success
    }

    /// The derived key, present only on success.
    pub fn key(&self) -> Option<&SkgKey> {
        self.key.as_ref()
    }

    /// Public bits spent on reconciliation (syndrome + digest), subtracted
    /// during amplification.
    pub fn leaked_bits(&self) -> usize {
        self.leaked_bits
    }
}

/// Run the full three-stage pipeline between two observation sequences.
///
/// Both sequences are quantized, the kept indices are intersected (mimicking
/// the public index exchange), the aligned bits are truncated to whole code
/// blocks, reconciled, and — only when the digest verifies — compressed into
/// a key.
///
/// # Errors
/// Mismatched input lengths, quantizer failures, too few aligned samples for
/// a single code block, and the residual-entropy check all reject.
pub fn run_session(
    samples_a: &[Complex64],
    samples_b: &[Complex64],
    cfg: &SkgConfig,
) -> Result<SkgSession> {
    if samples_a.len() != samples_b.len() {
        return Err(Error::LengthMismatch {
            a: samples_a.len(),
            b: samples_b.len(),
        });
    }
    let (raw_a, kept_a) = quantize(samples_a, &cfg.quantizer)?;
    let (raw_b, kept_b) = quantize(samples_b, &cfg.quantizer)?;
    let common: Vec<usize> = kept_a
        .iter()
        .copied()
        .filter(|i| kept_b.binary_search(i).is_ok())
        .collect();
    let per = cfg.quantizer.bits_per_sample();
    let mut bits_a = select_bits(&raw_a, &kept_a, &common, per);
    let mut bits_b = select_bits(&raw_b, &kept_b, &common, per);
    let usable = bits_a.len() - bits_a.len() % cfg.code.n();
    if usable == 0 {
        return Err(Error::invalid(
            "samples",
            "too few aligned samples survive the guard band for one code block",
        ));
    }
    bits_a.truncate(usable);
    bits_b.truncate(usable);

    let rec = reconcile(&bits_a, &bits_b, &cfg.code)?;
    let leaked_bits = rec.syndrome.len() + DIGEST_BITS;
    let key = if rec.success {
        Some(SkgKey::derive(&bits_a, leaked_bits, cfg)?)
    } else {
        None
    };
    Ok(SkgSession {
        bits_a,
        bits_b,
        syndrome: rec.syndrome,
        success: rec.success,
        key,
        leaked_bits,
    })
}
