//! Hybrid key-establishment + authenticated-encryption message flow.
//!
//! The sender finishes key generation locally, encrypts the payload under
//! the encryption half of the key, signs the ciphertext under the integrity
//! half (encrypt-then-sign), and ships `[syndrome ∥ ciphertext ∥ tag]` in one
//! message. The receiver first finishes its own key generation from the
//! embedded syndrome, then verifies the tag, and only on success decrypts.
//! A reconciliation failure surfaces as a tag-verification failure: the
//! derived key halves differ, so the signature cannot verify, and the
//! payload is never decrypted.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::skg::code::DIGEST_BITS;
use crate::skg::{pack_bits, unpack_bits, SkgConfig, SkgKey, SkgSession};

/// Symmetric cipher abstraction. The reference instantiation is a keystream
/// XOR, so `decrypt` mirrors `encrypt`; real-cipher bindings can differ.
pub trait StreamCipher {
    fn encrypt(&self, key: &[u8], plaintext: &[u8]) -> Vec<u8>;
    fn decrypt(&self, key: &[u8], ciphertext: &[u8]) -> Vec<u8>;
}

/// Message-authentication abstraction: `verify` must accept exactly the tags
/// `sign` produces.
pub trait MessageAuth {
    fn sign(&self, key: &[u8], data: &[u8]) -> Vec<u8>;
    fn verify(&self, key: &[u8], data: &[u8], tag: &[u8]) -> bool;
}

/// Reference cipher: XOR with a hash-chain keystream
/// (`block_i = H(key ∥ i)`).
#[derive(Debug, Clone, Copy, Default)]
pub struct XorStreamCipher;

impl XorStreamCipher {
    fn keystream_apply(key: &[u8], data: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(data.len());
        let mut counter = 0u64;
        let mut block = [0u8; 32];
        for (i, &byte) in data.iter().enumerate() {
            if i % 32 == 0 {
                let mut h = Sha256::new();
                h.update(key);
                h.update(counter.to_le_bytes());
                block.copy_from_slice(&h.finalize());
                counter += 1;
            }
            out.push(byte ^ block[i % 32]);
        }
        out
    }
}

impl StreamCipher for XorStreamCipher {
    fn encrypt(&self, key: &[u8], plaintext: &[u8]) -> Vec<u8> {
        Self::keystream_apply(key, plaintext)
    }

    fn decrypt(&self, key: &[u8], ciphertext: &[u8]) -> Vec<u8> {
        Self::keystream_apply(key, ciphertext)
    }
}

/// Reference MAC: truncated keyed digest `H(len(key) ∥ key ∥ data)[..16]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeyedDigestMac;

impl MessageAuth for KeyedDigestMac {
    fn sign(&self, key: &[u8], data: &[u8]) -> Vec<u8> {
        let mut h = Sha256::new();
        h.update((key.len() as u64).to_le_bytes());
        h.update(key);
        h.update(data);
        h.finalize()[..16].to_vec()
    }

    fn verify(&self, key: &[u8], data: &[u8], tag: &[u8]) -> bool {
        let expected = self.sign(key, data);
        // Fold over all bytes instead of short-circuiting on the first
        // mismatch.
        expected.len() == tag.len()
            && expected
                .iter()
                .zip(tag)
                .fold(0u8, |acc, (a, b)| acc | (a ^ b))
                == 0
    }
}

/// One hybrid message: the key-agreement side information plus the
/// authenticated ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridMessage {
    /// Alice's reconciliation syndrome, one entry per bit.
    pub syndrome: Vec<u8>,
    pub ciphertext: Vec<u8>,
    pub tag: Vec<u8>,
}

impl HybridMessage {
    /// Serialize as
    /// `[u32 syndrome_bits ∥ packed syndrome ∥ u32 ct_len ∥ ct ∥ u32 tag_len ∥ tag]`
    /// with little-endian lengths. The syndrome length counts bits; the
    /// packed bytes hold them most-significant bit first with zero padding.
    pub fn to_bytes(&self) -> Vec<u8> {
        let packed = pack_bits(&self.syndrome);
        let mut out =
            Vec::with_capacity(12 + packed.len() + self.ciphertext.len() + self.tag.len());
        out.extend_from_slice(&(self.syndrome.len() as u32).to_le_bytes());
        out.extend_from_slice(&packed);
        out.extend_from_slice(&(self.ciphertext.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.ciphertext);
        out.extend_from_slice(&(self.tag.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.tag);
        out
    }

    /// Parse the wire format back into fields, bit-exactly.
    ///
    /// # Errors
    /// [`Error::MalformedMessage`] on truncation, trailing bytes, or nonzero
    /// padding bits in the packed syndrome.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        fn take<'a>(
            bytes: &'a [u8],
            cursor: &mut usize,
            len: usize,
            what: &str,
        ) -> Result<&'a [u8]> {
            let end = cursor.checked_add(len).ok_or_else(|| {
                Error::MalformedMessage(format!("{what} length overflows"))
            })?;
            if end > bytes.len() {
                return Err(Error::MalformedMessage(format!(
                    "truncated while reading {what}"
                )));
            }
            let slice = &bytes[*cursor..end];
            *cursor = end;
            Ok(slice)
        }
        let mut cursor = 0usize;

        let syndrome_bits = u32::from_le_bytes(
            take(bytes, &mut cursor, 4, "syndrome length")?.try_into().unwrap(),
        ) as usize;
        let packed_len = syndrome_bits.div_ceil(8);
        let packed = take(bytes, &mut cursor, packed_len, "syndrome")?;
        if syndrome_bits % 8 != 0 {
            let last = packed[packed_len - 1];
            let pad = 8 - syndrome_bits % 8;
            if last & ((1u8 << pad) - 1) != 0 {
                return Err(Error::MalformedMessage(
                    "nonzero padding bits in packed syndrome".into(),
                ));
            }
        }
        let syndrome = unpack_bits(packed, syndrome_bits);
        let ct_len = u32::from_le_bytes(
            take(bytes, &mut cursor, 4, "ciphertext length")?.try_into().unwrap(),
        ) as usize;
        let ciphertext = take(bytes, &mut cursor, ct_len, "ciphertext")?.to_vec();
        let tag_len = u32::from_le_bytes(
            take(bytes, &mut cursor, 4, "tag length")?.try_into().unwrap(),
        ) as usize;
        let tag = take(bytes, &mut cursor, tag_len, "tag")?.to_vec();
        if cursor != bytes.len() {
            return Err(Error::MalformedMessage(format!(
                "{} trailing bytes after tag",
                bytes.len() - cursor
            )));
        }
        Ok(HybridMessage {
            syndrome,
            ciphertext,
            tag,
        })
    }
}

/// Encrypt-then-sign a payload under an established session key and attach
/// the session's syndrome.
///
/// # Errors
/// [`Error::KeyNotEstablished`] when the session has no verified key.
pub fn hybrid_send<C: StreamCipher, M: MessageAuth>(
    message: &[u8],
    session: &SkgSession,
    cipher: &C,
    mac: &M,
) -> Result<HybridMessage> {
    let key = session.key().ok_or(Error::KeyNotEstablished)?;
    let ciphertext = cipher.encrypt(&key.enc_bytes(), message);
    let tag = mac.sign(&key.int_bytes(), &ciphertext);
    Ok(HybridMessage {
        syndrome: session.syndrome().to_vec(),
        ciphertext,
        tag,
    })
}

/// Receive a hybrid message: finish key generation from the embedded
/// syndrome and the receiver's own quantized bits, verify the tag, then
/// decrypt. Verification strictly precedes decryption.
///
/// # Errors
/// Reconciliation/key-derivation failures propagate;
/// [`Error::IntegrityCheckFailed`] when the tag does not verify (which is
/// also how an undetected reconciliation mismatch surfaces — the derived key
/// is wrong, so the tag cannot check out).
pub fn hybrid_receive<C: StreamCipher, M: MessageAuth>(
    msg: &HybridMessage,
    bits_b: &[u8],
    cfg: &SkgConfig,
    cipher: &C,
    mac: &M,
) -> Result<Vec<u8>> {
    let reconciled = cfg.code.decode_toward(bits_b, &msg.syndrome)?;
    let leaked = msg.syndrome.len() + DIGEST_BITS;
    let key = SkgKey::derive(&reconciled, leaked, cfg)?;
    if !mac.verify(&key.int_bytes(), &msg.ciphertext, &msg.tag) {
        return Err(Error::IntegrityCheckFailed);
    }
    Ok(cipher.decrypt(&key.enc_bytes(), &msg.ciphertext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skg::code::BlockCode;
    use crate::skg::quantize::Quantizer;
    use crate::skg::run_session;
    use num_complex::Complex64;

    fn test_config() -> SkgConfig {
        SkgConfig::new(
            Quantizer::new(2, 0.2).unwrap(),
            BlockCode::hamming_7_4(),
            16,
            77,
        )
        .unwrap()
    }

    /// Deterministic nearly-identical observation pair long enough for a
    /// 16-bit key after leakage.
    fn sample_pair() -> (Vec<Complex64>, Vec<Complex64>) {
        let mut rng = crate::rng::Rng::new(2024, 0);
        let n = 600;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let shared = rng.complex_gaussian(1.0);
            let jitter = rng.complex_gaussian(1.0);
            a.push(shared);
            b.push(shared * 0.9999 + jitter * (1.0f64 - 0.9999f64 * 0.9999).sqrt());
        }
        (a, b)
    }

    #[test]
    fn round_trip_recovers_the_payload() {
        let cfg = test_config();
        let (sa, sb) = sample_pair();
        let session = run_session(&sa, &sb, &cfg).unwrap();
        assert!(session.success());
        let msg = hybrid_send(b"attack at dawn", &session, &XorStreamCipher, &KeyedDigestMac)
            .unwrap();
        let recovered = hybrid_receive(
            &msg,
            session.bits_b(),
            &cfg,
            &XorStreamCipher,
            &KeyedDigestMac,
        )
        .unwrap();
        assert_eq!(recovered, b"attack at dawn");
    }

    #[test]
    fn flipped_tag_bit_blocks_decryption() {
        let cfg = test_config();
        let (sa, sb) = sample_pair();
        let session = run_session(&sa, &sb, &cfg).unwrap();
        let mut msg =
            hybrid_send(b"payload", &session, &XorStreamCipher, &KeyedDigestMac).unwrap();
        msg.tag[0] ^= 1;
        let err = hybrid_receive(
            &msg,
            session.bits_b(),
            &cfg,
            &XorStreamCipher,
            &KeyedDigestMac,
        )
        .unwrap_err();
        assert_eq!(err, Error::IntegrityCheckFailed);
    }

    #[test]
    fn corrupted_syndrome_aborts_before_decryption() {
        let cfg = test_config();
        let (sa, sb) = sample_pair();
        let session = run_session(&sa, &sb, &cfg).unwrap();
        let mut msg =
            hybrid_send(b"payload", &session, &XorStreamCipher, &KeyedDigestMac).unwrap();
        // Corrupt a syndrome bit: the receiver reconciles toward the wrong
        // coset, derives a different key, and the tag check fails.
        msg.syndrome[0] ^= 1;
        let err = hybrid_receive(
            &msg,
            session.bits_b(),
            &cfg,
            &XorStreamCipher,
            &KeyedDigestMac,
        )
        .unwrap_err();
        assert_eq!(err, Error::IntegrityCheckFailed);
    }

    #[test]
    fn send_requires_an_established_key() {
        let cfg = test_config();
        let (sa, mut sb) = sample_pair();
        // Destroy the correlation so reconciliation fails.
        let mut rng = crate::rng::Rng::new(5, 9);
        for s in sb.iter_mut() {
            *s = rng.complex_gaussian(1.0);
        }
        let session = run_session(&sa, &sb, &cfg).unwrap();
        assert!(!session.success());
        assert!(session.key().is_none());
        let err = hybrid_send(b"m", &session, &XorStreamCipher, &KeyedDigestMac).unwrap_err();
        assert_eq!(err, Error::KeyNotEstablished);
    }

    #[test]
    fn wire_format_round_trips_bit_exactly() {
        let msg = HybridMessage {
            syndrome: vec![1, 0, 1, 1, 0, 0, 1, 0, 1],
            ciphertext: vec![0x11, 0x22],
            tag: vec![0xAA],
        };
        let bytes = msg.to_bytes();
        let parsed = HybridMessage::from_bytes(&bytes).unwrap();
        assert_eq!(parsed, msg);
        // Empty payload edge case.
        let empty = HybridMessage {
            syndrome: vec![],
            ciphertext: vec![],
            tag: vec![],
        };
        assert_eq!(
            HybridMessage::from_bytes(&empty.to_bytes()).unwrap(),
            empty
        );
    }

    #[test]
    fn malformed_wires_are_rejected() {
        let msg = HybridMessage {
            syndrome: vec![1, 0, 1],
            ciphertext: vec![0x01],
            tag: vec![0x02, 0x03],
        };
        let bytes = msg.to_bytes();
        // Truncations at every prefix length.
        for cut in 0..bytes.len() {
            assert!(
                HybridMessage::from_bytes(&bytes[..cut]).is_err(),
                "prefix of length {cut} parsed"
            );
        }
        // Trailing garbage.
        let mut long = bytes.clone();
        long.push(0);
        assert!(HybridMessage::from_bytes(&long).is_err());
        // Nonzero padding bits.
        let mut bad_pad = bytes;
        bad_pad[4] |= 0b0000_0001; // syndrome has 3 bits; bit 5 of padding set
        assert!(HybridMessage::from_bytes(&bad_pad).is_err());
    }

    #[test]
    fn cipher_and_mac_references_behave() {
        let cipher = XorStreamCipher;
        let key = [7u8; 8];
        let pt = b"a slightly longer plaintext spanning two keystream blocks!!";
        let ct = cipher.encrypt(&key, pt);
        assert_ne!(&ct[..], &pt[..]);
        assert_eq!(cipher.decrypt(&key, &ct), pt);

        let mac = KeyedDigestMac;
        let tag = mac.sign(&key, &ct);
        assert!(mac.verify(&key, &ct, &tag));
        assert!(!mac.verify(&key, &ct[..ct.len() - 1], &tag));
        assert!(!mac.verify(&[8u8; 8], &ct, &tag));
        assert!(!mac.verify(&key, &ct, &tag[..15]));
    }
}
