//! Keyed hash-index derivation.
//!
//! Each inserted element (feature name, canonical value) is mapped to `k` bit
//! positions by HMAC-SHA256 over an injectively framed message. The key enters
//! only as the HMAC key; it is never part of the message.

use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::config::EncodingConfig;
use crate::error::{Error, Result};

type HmacSha256 = Hmac<Sha256>;

/// Serializes (name, value, i) unambiguously:
/// `be32(len(name)) ‖ name ‖ be32(len(value)) ‖ value ‖ be32(i)`.
///
/// The length prefixes make the framing injective: distinct triples can never
/// produce the same byte string, unlike plain concatenation where
/// ("f1","23") and ("f12","3") would collide.
pub(crate) fn frame_element(name: &str, value: &str, i: u32) -> Vec<u8> {
    let name = name.as_bytes();
    let value = value.as_bytes();
    let mut msg = Vec::with_capacity(12 + name.len() + value.len());
    msg.extend_from_slice(&(name.len() as u32).to_be_bytes());
    msg.extend_from_slice(name);
    msg.extend_from_slice(&(value.len() as u32).to_be_bytes());
    msg.extend_from_slice(value);
    msg.extend_from_slice(&i.to_be_bytes());
    msg
}

/// Reduces a (≥16-byte) digest to a bucket index: the first 16 bytes are read
/// as an unsigned big-endian integer and taken modulo `m`. The modulo bias of
/// a 128-bit value over any practical `m` is below 2⁻¹⁰⁰.
pub(crate) fn reduce_digest(digest: &[u8], m: u32) -> u32 {
    let prefix: [u8; 16] = digest[..16].try_into().expect("digest shorter than 16 bytes");
    (u128::from_be_bytes(prefix) % u128::from(m)) as u32
}

pub(crate) fn hmac_index(key: &[u8], name: &str, value: &str, i: u32, m: u32) -> u32 {
    let mut mac = HmacSha256::new_from_slice(key).expect("HMAC accepts any key length");
    mac.update(&frame_element(name, value, i));
    let digest = mac.finalize().into_bytes();
    reduce_digest(&digest, m)
}

/// Bit position for hash function `i` (1-based, `1 ≤ i ≤ k`) of the element
/// `(feature_name, canonical_value)` under `config`. Deterministic.
pub fn derive_bit_index(
    config: &EncodingConfig,
    feature_name: &str,
    canonical_value: &str,
    i: u16,
) -> Result<u32> {
    if i == 0 || i > config.k() {
        return Err(Error::InvalidParameter(format!(
            "hash index i must be in 1..={}, got {i}",
            config.k()
        )));
    }
    Ok(hmac_index(config.key(), feature_name, canonical_value, u32::from(i), config.m()))
}
