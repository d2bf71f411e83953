use crate::error::{Error, Result};

/// One sample, canonicalized: an ordered list of (feature name, canonical
/// value) string pairs, an optional class label, and the declared raw size of
/// the sample in bits (the numerator of the compression ratio).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRecord {
    features: Vec<(String, String)>,
    label: Option<String>,
    raw_size_bits: u64,
}

impl FeatureRecord {
    /// Validates and builds a record. Features must be non-empty, with
    /// non-empty names and values; `raw_size_bits` must be positive. Labels,
    /// when present, must be non-empty, free of NUL bytes, and at most 255
    /// bytes (the binary format stores them as fixed-width NUL-padded fields).
    pub fn new(
        features: Vec<(String, String)>,
        label: Option<String>,
        raw_size_bits: u64,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyInput("feature record has no features"));
        }
        for (name, value) in &features {
            if name.is_empty() {
                return Err(Error::InvalidFeature("empty feature name".into()));
            }
            if value.is_empty() {
                return Err(Error::InvalidFeature(format!("feature {name:?} has empty value")));
            }
        }
        if raw_size_bits == 0 {
            return Err(Error::InvalidParameter("raw_size_bits must be positive".into()));
        }
        if let Some(l) = &label {
            validate_label(l)?;
        }
        Ok(FeatureRecord { features, label, raw_size_bits })
    }

    pub fn features(&self) -> &[(String, String)] {
        &self.features
    }

    /// Number of elements this record inserts (the `n` of the closed forms).
    pub fn element_count(&self) -> usize {
        self.features.len()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn raw_size_bits(&self) -> u64 {
        self.raw_size_bits
    }
}

pub(crate) fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidFeature("empty label".into()));
    }
    if label.as_bytes().contains(&0) {
        return Err(Error::InvalidFeature("label contains NUL byte".into()));
    }
    if label.len() > 255 {
        return Err(Error::InvalidFeature(format!("label longer than 255 bytes: {} bytes", label.len())));
    }
    Ok(())
}
