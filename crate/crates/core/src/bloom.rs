//! Per-sample Bloom filter construction, membership testing, and packing.

use crate::config::{EncodingConfig, MIN_FILTER_BITS};
use crate::error::{Error, Result};
use crate::hashing::derive_bit_index;
use crate::record::{validate_label, FeatureRecord};

/// One sample's m-bit filter, packed 8 bits per byte, LSB-first within each
/// byte: filter bit index `8j + b` lives in byte `j`, bit `b`. Bits at or
/// beyond index `m` in the final byte are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BloomVector {
    bits: Vec<u8>,
    m: u32,
    label: Option<String>,
}

impl BloomVector {
    pub(crate) fn empty(m: u32, label: Option<String>) -> Self {
        BloomVector { bits: vec![0u8; (m as usize + 7) / 8], m, label }
    }

    /// Filter width in bits.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Packed backing bytes, length exactly `ceil(m / 8)`.
    pub fn bytes(&self) -> &[u8] {
        &self.bits
    }

    /// Rebuilds a vector from packed bytes. Trailing bits past `m − 1` must be
    /// zero, and an all-zero filter is rejected: a valid encoding always has
    /// at least one bit set.
    pub fn from_bytes(bytes: Vec<u8>, m: u32, label: Option<String>) -> Result<Self> {
        if m < MIN_FILTER_BITS {
            return Err(Error::InvalidParameter(format!(
                "filter width m must be at least {MIN_FILTER_BITS}, got {m}"
            )));
        }
        let want = (m as usize + 7) / 8;
        if bytes.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: bytes.len(), what: "packed filter bytes" });
        }
        let tail_bits = (m % 8) as u8;
        if tail_bits != 0 {
            let mask = !((1u16 << tail_bits) as u8).wrapping_sub(1);
            if bytes[want - 1] & mask != 0 {
                return Err(Error::BadFormat(format!("bits beyond index {} are set", m - 1)));
            }
        }
        if bytes.iter().all(|&b| b == 0) {
            return Err(Error::BadFormat("all-zero filter is not a valid encoding".into()));
        }
        if let Some(l) = &label {
            validate_label(l)?;
        }
        Ok(BloomVector { bits: bytes, m, label })
    }

    pub fn bit(&self, j: u32) -> bool {
        debug_assert!(j < self.m);
        self.bits[(j / 8) as usize] & (1 << (j % 8)) != 0
    }

    pub(crate) fn set(&mut self, j: u32) {
        debug_assert!(j < self.m);
        self.bits[(j / 8) as usize] |= 1 << (j % 8);
    }

    /// Number of set bits.
    pub fn popcount(&self) -> u32 {
        self.bits.iter().map(|b| b.count_ones()).sum()
    }

    /// Fraction of set bits, popcount / m.
    pub fn density(&self) -> f64 {
        f64::from(self.popcount()) / f64::from(self.m)
    }

    /// Unpacked 0/1 vector of length exactly `m`.
    pub fn to_dense(&self) -> Vec<u8> {
        (0..self.m).map(|j| u8::from(self.bit(j))).collect()
    }

    /// Unpacked vector as floats, the classifier's input form.
    pub fn to_dense_f64(&self) -> Vec<f64> {
        (0..self.m).map(|j| f64::from(u8::from(self.bit(j)))).collect()
    }

    /// Packs a dense 0/1 vector (length = m) back into a BloomVector.
    /// Inverse of [`to_dense`](Self::to_dense).
    pub fn from_dense(dense: &[u8], label: Option<String>) -> Result<Self> {
        if dense.len() < MIN_FILTER_BITS as usize {
            return Err(Error::InvalidParameter(format!(
                "dense vector must have at least {MIN_FILTER_BITS} entries, got {}",
                dense.len()
            )));
        }
        if dense.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("dense vector too long".into()));
        }
        let m = dense.len() as u32;
        let mut bv = BloomVector::empty(m, None);
        for (j, &v) in dense.iter().enumerate() {
            match v {
                0 => {}
                1 => bv.set(j as u32),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "dense entry {j} is {other}, expected 0 or 1"
                    )))
                }
            }
        }
        if bv.popcount() == 0 {
            return Err(Error::BadFormat("all-zero filter is not a valid encoding".into()));
        }
        if let Some(l) = &label {
            validate_label(l)?;
        }
        bv.label = label;
        Ok(bv)
    }
}

/// Encodes one record: a fresh all-zero filter in which, for every feature
/// `(name, value)` and every hash function `i ∈ 1..=k`, the derived bit is
/// set. The label is copied through unchanged.
pub fn encode_record(config: &EncodingConfig, record: &FeatureRecord) -> Result<BloomVector> {
    if record.features().is_empty() {
        return Err(Error::EmptyInput("cannot encode a record with no features"));
    }
    let mut bv = BloomVector::empty(config.m(), record.label().map(str::to_owned));
    for (name, value) in record.features() {
        for i in 1..=config.k() {
            bv.set(derive_bit_index(config, name, value, i)?);
        }
    }
    debug_assert!(bv.popcount() >= 1, "an encoded record always sets at least one bit");
    Ok(bv)
}

/// Encodes a dataset, preserving input order.
pub fn encode_dataset(config: &EncodingConfig, records: &[FeatureRecord]) -> Result<Vec<BloomVector>> {
    records.iter().map(|r| encode_record(config, r)).collect()
}

/// Bitwise OR of two filters of equal width. Labels are kept only when both
/// sides agree.
pub fn merge(a: &BloomVector, b: &BloomVector) -> Result<BloomVector> {
    if a.m != b.m {
        return Err(Error::DimensionMismatch {
            expected: a.m as usize,
            got: b.m as usize,
            what: "merge filter widths",
        });
    }
    let bits = a.bits.iter().zip(&b.bits).map(|(x, y)| x | y).collect();
    let label = if a.label == b.label { a.label.clone() } else { None };
    Ok(BloomVector { bits, m: a.m, label })
}

/// Membership test: true iff all `k` derived bit positions are set. Inserted
/// elements always pass; non-members pass at the filter's false-positive rate.
pub fn contains(
    config: &EncodingConfig,
    bv: &BloomVector,
    feature_name: &str,
    canonical_value: &str,
) -> Result<bool> {
    if config.m() != bv.m {
        return Err(Error::DimensionMismatch {
            expected: config.m() as usize,
            got: bv.m as usize,
            what: "contains filter width",
        });
    }
    for i in 1..=config.k() {
        if !bv.bit(derive_bit_index(config, feature_name, canonical_value, i)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
