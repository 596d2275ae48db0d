//! Bit-exact primitives shared by all wire operations: CRC8, CRC32,
//! HMAC-SHA-256, and MSB-first bit packing.
//!
//! The CRC profiles are fixed constants, not configuration: CRC-8 with
//! polynomial 0x07 (init 0x00, unreflected, no final xor) guards packet
//! headers, and CRC-32/IEEE (polynomial 0x04C11DB7, reflected, init and
//! final xor 0xFFFFFFFF) guards payloads. Bit order is MSB-first
//! everywhere.

use hmac::{Hmac, Mac};
use sha2::Sha256;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("bit count {0} is not a multiple of 8")]
    BitCount(usize),
}

/// CRC-8, polynomial 0x07, init 0x00, no reflection, no final xor.
pub fn crc8(data: &[u8]) -> u8 {
    let mut reg: u8 = 0x00;
    for &byte in data {
        reg ^= byte;
        for _ in 0..8 {
            reg = if reg & 0x80 != 0 {
                (reg << 1) ^ 0x07
            } else {
                reg << 1
            };
        }
    }
    reg
}

/// CRC-32/IEEE: reflected polynomial 0xEDB88320, init 0xFFFFFFFF, final
/// xor 0xFFFFFFFF. Serialized big-endian on the wire.
pub fn crc32(data: &[u8]) -> u32 {
    let mut reg: u32 = 0xFFFF_FFFF;
    for &byte in data {
        reg ^= byte as u32;
        for _ in 0..8 {
            reg = if reg & 1 != 0 {
                (reg >> 1) ^ 0xEDB8_8320
            } else {
                reg >> 1
            };
        }
    }
    !reg
}

/// HMAC-SHA-256 digest of `message` under `key`.
///
/// Key length policy (>= 16 bytes) is enforced by session configuration,
/// not here; the primitive accepts any key.
pub fn hmac_sha256(key: &[u8], message: &[u8]) -> [u8; 32] {
    let mut mac =
        Hmac::<Sha256>::new_from_slice(key).expect("HMAC accepts keys of any length");
    mac.update(message);
    mac.finalize().into_bytes().into()
}

/// Expand bytes into bits, MSB-first within each byte.
pub fn bytes_to_bits(data: &[u8]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(data.len() * 8);
    for &byte in data {
        for shift in (0..8).rev() {
            bits.push((byte >> shift) & 1 != 0);
        }
    }
    bits
}

/// Pack bits back into bytes, MSB-first. The bit count must be a
/// multiple of 8.
pub fn bits_to_bytes(bits: &[bool]) -> Result<Vec<u8>, CodecError> {
    if bits.len() % 8 != 0 {
        return Err(CodecError::BitCount(bits.len()));
    }
    Ok(bits
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .fold(0u8, |acc, &bit| (acc << 1) | u8::from(bit))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Slow reference oracles, implemented as explicit polynomial long
    // division over the message bit stream so they share nothing with the
    // register-based implementations above.

    fn crc8_oracle(data: &[u8]) -> u8 {
        // Append 8 zero bits and divide by x^8 + x^2 + x + 1.
        let mut bits = bytes_to_bits(data);
        bits.extend([false; 8]);
        for i in 0..bits.len() - 8 {
            if bits[i] {
                bits[i] = false;
                for (j, poly_bit) in [false, false, false, false, false, true, true, true]
                    .iter()
                    .enumerate()
                {
                    bits[i + 1 + j] ^= poly_bit;
                }
            }
        }
        let tail: Vec<bool> = bits[bits.len() - 8..].to_vec();
        bits_to_bytes(&tail).unwrap()[0]
    }

    fn crc32_oracle(data: &[u8]) -> u32 {
        // Formal definition: reflect each input byte, divide the augmented
        // message (xored with a leading 0xFFFFFFFF) by 0x04C11DB7 MSB-first,
        // then reflect and invert the remainder.
        let reflect8 = |b: u8| b.reverse_bits();
        let reflect32 = |w: u32| w.reverse_bits();
        let mut bits: Vec<bool> = Vec::with_capacity(data.len() * 8 + 32);
        for &byte in data {
            bits.extend(bytes_to_bits(&[reflect8(byte)]));
        }
        bits.extend([false; 32]);
        for i in 0..32.min(bits.len()) {
            bits[i] ^= true;
        }
        let poly = 0x04C1_1DB7u32;
        for i in 0..bits.len() - 32 {
            if bits[i] {
                bits[i] = false;
                for j in 0..32 {
                    if (poly >> (31 - j)) & 1 != 0 {
                        bits[i + 1 + j] ^= true;
                    }
                }
            }
        }
        let mut rem = 0u32;
        for &bit in &bits[bits.len() - 32..] {
            rem = (rem << 1) | u32::from(bit);
        }
        !reflect32(rem)
    }

    #[test]
    fn crc8_check_value() {
        assert_eq!(crc8_oracle(b"123456789"), 0xF4);
        assert_eq!(crc8(b"123456789"), 0xF4);
        assert_eq!(crc8(b""), 0x00);
    }

    #[test]
    fn crc8_matches_oracle_on_random_inputs() {
        let mut state = 0x12345678u32;
        for len in 0..64 {
            let data: Vec<u8> = (0..len)
                .map(|_| {
                    state = state.wrapping_mul(1664525).wrapping_add(1013904223);
                    (state >> 24) as u8
                })
                .collect();
            assert_eq!(crc8(&data), crc8_oracle(&data));
        }
    }

    #[test]
    fn crc32_check_value() {
        assert_eq!(crc32_oracle(b"123456789"), 0xCBF43926);
        assert_eq!(crc32(b"123456789"), 0xCBF43926);
        assert_eq!(crc32(b""), 0x0000_0000);
        assert_eq!(crc32_oracle(b""), 0x0000_0000);
    }

    #[test]
    fn crc32_matches_oracle_on_random_inputs() {
        let mut state = 0xdeadbeefu32;
        for len in 0..48 {
            let data: Vec<u8> = (0..len)
                .map(|_| {
                    state = state.wrapping_mul(1664525).wrapping_add(1013904223);
                    (state >> 16) as u8
                })
                .collect();
            assert_eq!(crc32(&data), crc32_oracle(&data));
        }
    }

    #[test]
    fn crcs_detect_every_single_bit_error() {
        let base = b"\x00\x17covert-check\xffpayload";
        let c8 = crc8(base);
        let c32 = crc32(base);
        for byte_idx in 0..base.len() {
            for bit in 0..8 {
                let mut flipped = base.to_vec();
                flipped[byte_idx] ^= 1 << bit;
                assert_ne!(crc8(&flipped), c8, "crc8 missed flip at {byte_idx}:{bit}");
                assert_ne!(crc32(&flipped), c32, "crc32 missed flip at {byte_idx}:{bit}");
            }
        }
    }

    // RFC 4231 test vectors.
    #[test]
    fn hmac_rfc4231_vectors() {
        let tc1 = hmac_sha256(&[0x0b; 20], b"Hi There");
        assert_eq!(
            hex(&tc1),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"
        );
        let tc2 = hmac_sha256(b"Jefe", b"what do ya want for nothing?");
        assert_eq!(
            hex(&tc2),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"
        );
        let tc3 = hmac_sha256(&[0xaa; 20], &[0xdd; 50]);
        assert_eq!(
            hex(&tc3),
            "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"
        );
    }

    #[test]
    fn hmac_is_deterministic_and_key_sensitive() {
        let key = [0x42u8; 32];
        let msg = b"challenge bytes";
        assert_eq!(hmac_sha256(&key, msg), hmac_sha256(&key, msg));
        for bit in 0..16 {
            let mut other = key;
            other[bit / 8] ^= 1 << (bit % 8);
            assert_ne!(hmac_sha256(&key, msg), hmac_sha256(&other, msg));
        }
    }

    #[test]
    fn bit_expansion_is_msb_first() {
        assert_eq!(
            bytes_to_bits(&[0xA5]),
            vec![true, false, true, false, false, true, false, true]
        );
        assert!(bytes_to_bits(&[]).is_empty());
        assert_eq!(bits_to_bytes(&[]).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn bits_to_bytes_rejects_partial_bytes() {
        assert_eq!(
            bits_to_bytes(&[true, false, true]),
            Err(CodecError::BitCount(3))
        );
    }

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    proptest! {
        #[test]
        fn bit_round_trip_is_identity(data in proptest::collection::vec(any::<u8>(), 0..256)) {
            let bits = bytes_to_bits(&data);
            prop_assert_eq!(bits.len(), data.len() * 8);
            prop_assert_eq!(bits_to_bytes(&bits).unwrap(), data);
        }
    }
}
