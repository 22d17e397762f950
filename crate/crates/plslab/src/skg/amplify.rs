//! Privacy amplification: compress reconciled bits through a seeded
//! universal-hash family so that the public side information released during
//! reconciliation (syndrome and verification digest) is squeezed out of the
//! final key.

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Substream id reserved for Toeplitz-seed expansion.
const TOEPLITZ_STREAM: u64 = 0x544f45_50;

/// Compress `bits` to `target_len` bits with a seeded binary Toeplitz matrix.
///
/// The matrix is generated from `seed` alone, so both parties derive the same
/// key from the same reconciled bits; the seed is public. The residual
/// entropy rule is enforced:
/// `target_len ≤ bits.len() − leaked_bits`.
///
/// # Errors
/// [`Error::InsufficientResidualEntropy`] when the rule is violated;
/// `target_len = 0` or an empty input is an invalid parameter.
pub fn privacy_amplify(
    bits: &[u8],
    leaked_bits: usize,
    target_len: usize,
    seed: u64,
) -> Result<Vec<u8>> {
    if bits.is_empty() {
        return Err(Error::invalid("bits", "must be nonempty"));
    }
    if target_len == 0 {
        return Err(Error::invalid("target_len", "must be positive"));
    }
    if target_len > bits.len().saturating_sub(leaked_bits) {
        return Err(Error::InsufficientResidualEntropy {
            target: target_len,
            len: bits.len(),
            leaked: leaked_bits,
        });
    }
    let n = bits.len();
    // A Toeplitz matrix over GF(2) is defined by its first row and first
    // column: target_len + n - 1 seed bits total.
    let diag_len = target_len + n - 1;
    let mut rng = Rng::new(seed, TOEPLITZ_STREAM);
    let diag: Vec<u8> = (0..diag_len).map(|_| (rng.next_u64() & 1) as u8).collect();

    // Pack the input once; row i of the matrix is diag[i + n - 1 - j] at
    // column j, i.e. a sliding window over `diag`.
    let mut out = Vec::with_capacity(target_len);
    for i in 0..target_len {
        let mut acc = 0u8;
        for (j, &b) in bits.iter().enumerate() {
            acc ^= b & diag[i + n - 1 - j];
        }
        out.push(acc & 1);
    }
    Ok(out)
}
