use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Minimum secret key length in bytes.
pub const MIN_KEY_LEN: usize = 16;
/// Smallest permitted filter width in bits.
pub const MIN_FILTER_BITS: u32 = 8;
/// Largest permitted number of hash functions.
pub const MAX_HASH_COUNT: u16 = 64;

/// Parameters that fully determine an encoding: filter width `m`, hash count
/// `k`, the secret key, and the on-disk format version.
///
/// The key is held in memory only; it is never written to any output. Encoded
/// files carry just an 8-byte fingerprint (the first 8 bytes of SHA-256 of the
/// key) so that a mismatched key can be detected without revealing anything
/// about the key itself.
#[derive(Clone)]
pub struct EncodingConfig {
    m: u32,
    k: u16,
    key: Vec<u8>,
    format_version: u16,
}

impl std::fmt::Debug for EncodingConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // The key must not leak through debug output; print the fingerprint.
        f.debug_struct("EncodingConfig")
            .field("m", &self.m)
            .field("k", &self.k)
            .field("key_fingerprint", &fingerprint_hex(&self.key_fingerprint()))
            .field("format_version", &self.format_version)
            .finish()
    }
}

impl EncodingConfig {
    /// Validates and builds a config. `m` is the filter width in bits
    /// (at least 8), `k` the number of hash functions (1..=64), and `key`
    /// a secret of at least 16 bytes.
    pub fn new(m: u32, k: u16, key: impl Into<Vec<u8>>, format_version: u16) -> Result<Self> {
        let key = key.into();
        if m < MIN_FILTER_BITS {
            return Err(Error::InvalidParameter(format!(
                "filter width m must be at least {MIN_FILTER_BITS} bits, got {m}"
            )));
        }
        if k == 0 || k > MAX_HASH_COUNT {
            return Err(Error::InvalidParameter(format!(
                "hash count k must be in 1..={MAX_HASH_COUNT}, got {k}"
            )));
        }
        if key.len() < MIN_KEY_LEN {
            return Err(Error::InvalidParameter(format!(
                "key must be at least {MIN_KEY_LEN} bytes, got {}",
                key.len()
            )));
        }
        Ok(EncodingConfig { m, k, key, format_version })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u16 {
        self.k
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn format_version(&self) -> u16 {
        self.format_version
    }

    /// Number of bytes a packed filter occupies: ceil(m / 8).
    pub fn packed_len(&self) -> usize {
        (self.m as usize + 7) / 8
    }

    /// First 8 bytes of SHA-256 of the key. Safe to store alongside encoded
    /// data; it identifies the key without exposing it.
    pub fn key_fingerprint(&self) -> [u8; 8] {
        let digest = Sha256::digest(&self.key);
        let mut fp = [0u8; 8];
        fp.copy_from_slice(&digest[..8]);
        fp
    }
}

fn fingerprint_hex(fp: &[u8; 8]) -> String {
    fp.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEY: &[u8] = b"0123456789abcdef";

    #[test]
    fn accepts_minimal_valid_config() {
        let cfg = EncodingConfig::new(8, 1, KEY, 1).unwrap();
        assert_eq!(cfg.m(), 8);
        assert_eq!(cfg.k(), 1);
        assert_eq!(cfg.packed_len(), 1);
    }

    #[test]
    fn rejects_small_m() {
        assert!(EncodingConfig::new(7, 1, KEY, 1).is_err());
        assert!(EncodingConfig::new(1, 1, KEY, 1).is_err());
        assert!(EncodingConfig::new(0, 1, KEY, 1).is_err());
    }

    #[test]
    fn rejects_bad_k() {
        assert!(EncodingConfig::new(64, 0, KEY, 1).is_err());
        assert!(EncodingConfig::new(64, 65, KEY, 1).is_err());
        assert!(EncodingConfig::new(64, 64, KEY, 1).is_ok());
    }

    #[test]
    fn rejects_short_key() {
        assert!(EncodingConfig::new(64, 4, b"tooshort".as_slice(), 1).is_err());
        assert!(EncodingConfig::new(64, 4, vec![7u8; 15], 1).is_err());
        assert!(EncodingConfig::new(64, 4, vec![7u8; 16], 1).is_ok());
    }

    #[test]
    fn packed_len_rounds_up() {
        let cfg = EncodingConfig::new(9, 1, KEY, 1).unwrap();
        assert_eq!(cfg.packed_len(), 2);
        let cfg = EncodingConfig::new(16, 1, KEY, 1).unwrap();
        assert_eq!(cfg.packed_len(), 2);
        let cfg = EncodingConfig::new(17, 1, KEY, 1).unwrap();
        assert_eq!(cfg.packed_len(), 3);
    }

    #[test]
    fn fingerprint_is_stable_and_key_free() {
        let cfg = EncodingConfig::new(64, 4, KEY, 1).unwrap();
        let fp = cfg.key_fingerprint();
        assert_eq!(fp, cfg.key_fingerprint());
        // Different key => different fingerprint (with overwhelming probability).
        let other = EncodingConfig::new(64, 4, b"fedcba9876543210".as_slice(), 1).unwrap();
        assert_ne!(fp, other.key_fingerprint());
        // Debug output must not contain the raw key.
        let dbg = format!("{cfg:?}");
        assert!(!dbg.contains("0123456789abcdef"));
    }
}
