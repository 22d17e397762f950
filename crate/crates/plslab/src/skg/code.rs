//! Syndrome-based information reconciliation.
//!
//! Alice publishes the per-block syndrome of her bit sequence; Bob shifts his
//! own sequence into the coset Alice announced, picking the minimum-weight
//! correction (coset leader) for the syndrome difference. The published
//! syndrome — `n - k` bits per block — is information handed to any listener
//! and must be budgeted during privacy amplification.

use crate::error::{Error, Result};

/// Maximum supported codeword length (blocks are manipulated as `u64` words).
const MAX_N: usize = 64;
/// Maximum `n - k`, bounding the coset-leader table at `2^20` entries.
const MAX_REDUNDANCY: usize = 20;

/// A binary linear block code described by its parity-check matrix, decoded
/// by a precomputed syndrome → coset-leader lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCode {
    n: usize,
    k: usize,
    /// `n - k` parity rows, each a bit mask over the `n` codeword positions
    /// (bit `i` of the mask is column `i`).
    rows: Vec<u64>,
    /// Coset leader (minimum-weight error pattern) for every syndrome value.
    leaders: Vec<u64>,
}

impl BlockCode {
    /// Build a code from explicit parity rows.
    ///
    /// # Errors
    /// Rejects `k = 0`, `k >= n`, `n > 64`, `n - k > 20`, a row count other
    /// than `n - k`, rows touching columns `>= n`, and a parity-check matrix
    /// that is not full rank.
    pub fn new(n: usize, k: usize, rows: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::invalid("n", format!("must lie in 1..=64, got {n}")));
        }
        if k == 0 || k >= n {
            return Err(Error::invalid("k", format!("must lie in 1..n, got {k}")));
        }
        let r = n - k;
        if r > MAX_REDUNDANCY {
            return Err(Error::invalid(
                "n",
                format!("n - k = {r} exceeds the syndrome-table limit {MAX_REDUNDANCY}"),
            ));
        }
        if rows.len() != r {
            return Err(Error::invalid(
                "parity_check",
                format!("expected {r} rows, got {}", rows.len()),
            ));
        }
        let col_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if rows.iter().any(|&row| row & !col_mask != 0) {
            return Err(Error::invalid(
                "parity_check",
                "a row references a column beyond the codeword length",
            ));
        }
        if gf2_rank(&rows) != r {
            return Err(Error::invalid(
                "parity_check",
                "matrix is not full rank",
            ));
        }
        let leaders = coset_leaders(n, &rows);
        Ok(BlockCode { n, k, rows, leaders })
    }

    /// The `[7, 4]` single-error-correcting code with identity-last parity
    /// rows (columns 0..3 data, 4..6 parity).
    pub fn hamming_7_4() -> Self {
        // Rows: p0 = d0+d1+d2, p1 = d0+d1+d3, p2 = d0+d2+d3 (plus the
        // corresponding parity column).
        let rows = vec![
            0b0010111u64, // d0 d1 d2 | p0 (bit 4)
            0b0101011u64, // d0 d1 d3 | p1 (bit 5)
            0b1001101u64, // d0 d2 d3 | p2 (bit 6)
        ];
        BlockCode::new(7, 4, rows).expect("fixed construction is valid")
    }

    /// Length-`n` repetition code (`k = 1`): parity row `i` checks
    /// position `i` against position `n-1`.
    ///
    /// # Errors
    /// `n` must be odd (unambiguous majority) and lie in `3..=21`.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(
                "n",
                format!("repetition length must be odd and >= 3, got {n}"),
            ));
        }
        let rows = (0..n - 1)
            .map(|i| (1u64 << i) | (1u64 << (n - 1)))
            .collect();
        BlockCode::new(n, 1, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Syndrome bits per block.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Reconciliation overhead `κ = (n - k) / k`.
    pub fn kappa(&self) -> f64 {
        (self.n - self.k) as f64 / self.k as f64
    }

    /// Syndrome of one block (bit `j` of the result is parity row `j`).
    fn block_syndrome(&self, block: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |s, (j, &row)| {
                s | ((((row & block).count_ones() & 1) as u64) << j)
            })
    }

    /// Syndrome of a whole bit sequence, `n - k` bits per block of `n`.
    ///
    /// # Errors
    /// The length must be a positive multiple of `n`.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        let blocks = self.to_blocks(bits)?;
        let mut out = Vec::with_capacity(blocks.len() * self.redundancy());
        for block in blocks {
            let s = self.block_syndrome(block);
            for j in 0..self.redundancy() {
                out.push(((s >> j) & 1) as u8);
            }
        }
        Ok(out)
    }

    /// Shift `bits` into the coset with the given syndrome, block by block,
    /// using the minimum-weight correction per block.
    ///
    /// # Errors
    /// Length checks as in [`BlockCode::syndrome`]; the syndrome length must
    /// match the block count.
    pub fn decode_toward(&self, bits: &[u8], syndrome: &[u8]) -> Result<Vec<u8>> {
        let blocks = self.to_blocks(bits)?;
        let r = self.redundancy();
        if syndrome.len() != blocks.len() * r {
            return Err(Error::LengthMismatch {
                a: syndrome.len(),
                b: blocks.len() * r,
            });
        }
        let mut out = Vec::with_capacity(bits.len());
        for (bi, &block) in blocks.iter().enumerate() {
            let target = syndrome[bi * r..(bi + 1) * r]
                .iter()
                .enumerate()
                .fold(0u64, |s, (j, &b)| s | ((b as u64 & 1) << j));
            let diff = self.block_syndrome(block) ^ target;
            let corrected = block ^ self.leaders[diff as usize];
            for i in 0..self.n {
                out.push(((corrected >> i) & 1) as u8);
            }
        }
        Ok(out)
    }

    fn to_blocks(&self, bits: &[u8]) -> Result<Vec<u64>> {
        if bits.is_empty() || bits.len() % self.n != 0 {
            return Err(Error::BlockLengthMismatch {
                len: bits.len(),
                n: self.n,
            });
        }
        Ok(bits
            .chunks_exact(self.n)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u64, |w, (i, &b)| w | ((b as u64 & 1) << i))
            })
            .collect())
    }
}

/// Rank of a set of GF(2) row masks.
fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

/// Minimum-weight error pattern for every syndrome, by breadth-first sweep
/// over error weights.
fn coset_leaders(n: usize, rows: &[u64]) -> Vec<u64> {
    let r = rows.len();
    let table_len = 1usize << r;
    let mut leaders = vec![u64::MAX; table_len];
    leaders[0] = 0;
    let mut found = 1usize;
    let syndrome_of = |e: u64| -> usize {
        rows.iter()
            .enumerate()
            .fold(0usize, |s, (j, &row)| {
                s | ((((row & e).count_ones() & 1) as usize) << j)
            })
    };
    // Sweep patterns in nondecreasing weight; the first pattern reaching a
    // syndrome is its leader.
    let mut frontier: Vec<u64> = vec![0];
    let mut weight = 0usize;
    while found < table_len && weight < n {
        weight += 1;
        let mut next = Vec::new();
        for &e in &frontier {
            let start = 64 - e.leading_zeros() as usize; // extend above the top set bit
            let first = if e == 0 { 0 } else { start };
            for i in first..n {
                let cand = e | (1u64 << i);
                next.push(cand);
                let s = syndrome_of(cand);
                if leaders[s] == u64::MAX {
                    leaders[s] = cand;
                    found += 1;
                }
            }
        }
        frontier = next;
    }
    debug_assert!(found == table_len, "full-rank parity check fills all cosets");
    leaders
}

/// Outcome of one reconciliation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconciliation {
    /// Bob's sequence after shifting into Alice's coset.
    pub bits_reconciled: Vec<u8>,
    /// Alice's published syndrome.
    pub syndrome: Vec<u8>,
    /// Whether the verification digest of the reconciled bits matches
    /// Alice's.
    pub success: bool,
}

/// Bits of public verification digest exchanged per reconciliation (counted
/// as leakage alongside the syndrome).
pub const DIGEST_BITS: usize = 32;

/// 32-bit verification digest of a bit sequence.
pub fn verification_digest(bits: &[u8]) -> [u8; 4] {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update((bits.len() as u64).to_le_bytes());
    h.update(crate::skg::pack_bits(bits));
    let out = h.finalize();
    [out[0], out[1], out[2], out[3]]
}

/// Run syndrome reconciliation between two equal-length bit sequences.
///
/// Alice computes the syndrome of `bits_a`; Bob corrects `bits_b` toward it;
/// success is decided by comparing 32-bit verification digests (both the
/// syndrome and the digest are public and count as leaked bits).
///
/// # Errors
/// Sequences of different lengths, or a length that is not a positive
/// multiple of `code.n()`, are rejected.
pub fn reconcile(bits_a: &[u8], bits_b: &[u8], code: &BlockCode) -> Result<Reconciliation> {
    if bits_a.len() != bits_b.len() {
        return Err(Error::LengthMismatch {
            a: bits_a.len(),
            b: bits_b.len(),
        });
    }
    let syndrome = code.syndrome(bits_a)?;
    let bits_reconciled = code.decode_toward(bits_b, &syndrome)?;
    let success = verification_digest(&bits_reconciled) == verification_digest(bits_a);
    Ok(Reconciliation {
        bits_reconciled,
        syndrome,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_shape_and_overhead() {
        let code = BlockCode::hamming_7_4();
        assert_eq!((code.n(), code.k(), code.redundancy()), (7, 4, 3));
        assert!((code.kappa() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn identical_sequences_reconcile_trivially() {
        let code = BlockCode::hamming_7_4();
        let bits: Vec<u8> = (0..14).map(|i| (i % 3 == 0) as u8).collect();
        let rec = reconcile(&bits, &bits, &code).unwrap();
        assert!(rec.success);
        assert_eq!(rec.bits_reconciled, bits);
        assert_eq!(rec.syndrome.len(), 6);
    }

    #[test]
    fn every_single_flip_is_corrected() {
        // Exhaustive oracle for the single-error-correcting property.
        let code = BlockCode::hamming_7_4();
        let base: Vec<u8> = vec![1, 0, 1, 1, 0, 0, 1];
        let valid = {
            // Make `base` a valid-looking Alice sequence (any sequence works;
            // the property is about the coset shift, not codeword membership).
            base
        };
        for flip in 0..7 {
            let mut noisy = valid.clone();
            noisy[flip] ^= 1;
            let rec = reconcile(&valid, &noisy, &code).unwrap();
            assert!(rec.success, "flip at {flip} not corrected");
            assert_eq!(rec.bits_reconciled, valid);
        }
    }

    #[test]
    fn triple_flips_land_in_the_wrong_coset_member() {
        // Exhaustive over all 3-subsets of positions: a perfect single-error
        // code always mis-corrects a triple flip, and the digest catches it.
        let code = BlockCode::hamming_7_4();
        let alice: Vec<u8> = vec![0, 1, 1, 0, 1, 0, 0];
        for a in 0..7 {
            for b in (a + 1)..7 {
                for c in (b + 1)..7 {
                    let mut bob = alice.clone();
                    for f in [a, b, c] {
                        bob[f] ^= 1;
                    }
                    let rec = reconcile(&alice, &bob, &code).unwrap();
                    assert!(!rec.success, "flips {a},{b},{c} went undetected");
                    assert_ne!(rec.bits_reconciled, alice);
                }
            }
        }
    }

    #[test]
    fn repetition_code_majority_corrects() {
        let code = BlockCode::repetition(5).unwrap();
        let alice = vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
        let mut bob = alice.clone();
        bob[0] ^= 1;
        bob[3] ^= 1; // two flips in the first block: still below majority
        bob[7] ^= 1; // one flip in the second
        let rec = reconcile(&alice, &bob, &code).unwrap();
        assert!(rec.success);
        assert_eq!(rec.bits_reconciled, alice);
    }

    #[test]
    fn syndrome_length_is_redundancy_per_block() {
        let code = BlockCode::repetition(3).unwrap();
        let bits = vec![0u8; 12];
        assert_eq!(code.syndrome(&bits).unwrap().len(), 4 * 2);
    }

    #[test]
    fn length_validation() {
        let code = BlockCode::hamming_7_4();
        assert!(matches!(
            reconcile(&[0; 7], &[0; 14], &code),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            reconcile(&[0; 6], &[0; 6], &code),
            Err(Error::BlockLengthMismatch { .. })
        ));
        assert!(matches!(
            code.syndrome(&[]),
            Err(Error::BlockLengthMismatch { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_matrices() {
        // Rank-deficient: duplicated row.
        let dup = vec![0b011u64, 0b011u64];
        assert!(BlockCode::new(3, 1, dup).is_err());
        // Wrong row count.
        assert!(BlockCode::new(3, 1, vec![0b011]).is_err());
        // Column out of range.
        assert!(BlockCode::new(3, 2, vec![0b1000]).is_err());
        // Degenerate dimensions.
        assert!(BlockCode::new(4, 4, vec![]).is_err());
        assert!(BlockCode::new(4, 0, vec![0b1; 4]).is_err());
        assert!(BlockCode::repetition(4).is_err());
        assert!(BlockCode::repetition(1).is_err());
    }

    #[test]
    fn coset_leaders_have_minimum_weight_for_hamming() {
        // Perfect code: all eight leaders have weight <= 1.
        let code = BlockCode::hamming_7_4();
        for (s, &leader) in code.leaders.iter().enumerate() {
            assert!(leader.count_ones() <= 1, "syndrome {s} leader {leader:b}");
        }
    }
}
