//! Dataset loading and canonicalization: turning raw tabular, text, series,
//! and image samples into the (name, value) element sets the encoder hashes.
//!
//! All rules are byte-level and locale-independent so the same input always
//! produces the same elements on any machine.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::record::FeatureRecord;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

/// Default bin count for quantized columns.
pub const DEFAULT_BINS: u32 = 32;
/// Default declared element size for byte-like features (categorical cells,
/// text tokens, image pixels, binned numerics).
pub const DEFAULT_ELEMENT_BITS: u32 = 8;
/// Default declared element size for series timesteps.
pub const DEFAULT_SERIES_ELEMENT_BITS: u32 = 16;
/// Separator between values inside a single series or image cell.
pub const CELL_LIST_SEPARATOR: char = ';';

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

/// Clamped equal-width binning for continuous values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationSpec {
    pub bins: u32,
    pub lower: f64,
    pub upper: f64,
}

impl QuantizationSpec {
    pub fn new(bins: u32, lower: f64, upper: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParameter("bins must be positive".into()));
        }
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(Error::NonFinite("quantization bounds".into()));
        }
        if lower >= upper {
            return Err(Error::InvalidParameter(format!(
                "quantization bounds must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(QuantizationSpec { bins, lower, upper })
    }

    /// Bin index in `[0, bins−1]`: the value is clamped into
    /// `[lower, upper]`, then `floor(bins·(v−lower)/(upper−lower))`, with the
    /// top edge folded into the last bin.
    pub fn bin(&self, value: f64) -> Result<u32> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("cannot quantize {value}")));
        }
        let v = value.clamp(self.lower, self.upper);
        let scaled = f64::from(self.bins) * (v - self.lower) / (self.upper - self.lower);
        let idx = scaled.floor() as u32;
        Ok(idx.min(self.bins - 1))
    }
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Text,
    Series,
    Image,
    /// The class column; contributes the record label, never a feature.
    Label,
}

/// One column's declared handling.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub kind: ColumnKind,
    /// Present exactly for numeric and series columns.
    pub quant: Option<QuantizationSpec>,
    /// Quantization levels for image columns (1..=256).
    pub levels: Option<u32>,
    /// Declared element size S in bits for features this column emits.
    pub element_bits: u32,
}

/// Raw JSON shape of one schema entry; exact keys are fixed.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawColumn {
    kind: String,
    bins: Option<u32>,
    lower: Option<f64>,
    upper: Option<f64>,
    element_bits: Option<u32>,
}

/// Column layout of a dataset. Columns are kept in a canonical (sorted by
/// name) order; CSV loading re-orders them to match the file header via
/// [`DatasetSchema::bind`].
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    columns: Vec<(String, ColumnSpec)>,
    label_column: Option<String>,
}

impl DatasetSchema {
    pub fn new(columns: Vec<(String, ColumnSpec)>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput("schema needs at least one column"));
        }
        let mut label = None;
        let mut text_seen = false;
        let mut series_seen = false;
        let mut image_seen = false;
        let mut names = std::collections::HashSet::new();
        for (name, spec) in &columns {
            if name.is_empty() {
                return Err(Error::SchemaMismatch("column names must be non-empty".into()));
            }
            if !names.insert(name.clone()) {
                return Err(Error::SchemaMismatch(format!("duplicate column {name:?}")));
            }
            match spec.kind {
                ColumnKind::Label => {
                    if label.is_some() {
                        return Err(Error::SchemaMismatch("multiple label columns declared".into()));
                    }
                    label = Some(name.clone());
                }
                // Text, series, and image columns emit features under fixed
                // names ("token", "t<pos>", "p<idx>"), so a second column of
                // the same kind would silently alias into the same elements.
                ColumnKind::Text => {
                    if text_seen {
                        return Err(Error::SchemaMismatch("at most one text column allowed".into()));
                    }
                    text_seen = true;
                }
                ColumnKind::Series => {
                    if series_seen {
                        return Err(Error::SchemaMismatch("at most one series column allowed".into()));
                    }
                    series_seen = true;
                }
                ColumnKind::Image => {
                    if image_seen {
                        return Err(Error::SchemaMismatch("at most one image column allowed".into()));
                    }
                    image_seen = true;
                }
                ColumnKind::Categorical | ColumnKind::Numeric => {}
            }
            match spec.kind {
                ColumnKind::Numeric | ColumnKind::Series => {
                    if spec.quant.is_none() {
                        return Err(Error::SchemaMismatch(format!(
                            "column {name:?} needs lower/upper quantization bounds"
                        )));
                    }
                }
                _ => {
                    if spec.quant.is_some() {
                        return Err(Error::SchemaMismatch(format!(
                            "column {name:?} does not take quantization bounds"
                        )));
                    }
                }
            }
            if spec.kind == ColumnKind::Image {
                match spec.levels {
                    Some(l) if (1..=256).contains(&l) => {}
                    Some(l) => {
                        return Err(Error::SchemaMismatch(format!(
                            "image levels must be in 1..=256, got {l}"
                        )))
                    }
                    None => return Err(Error::SchemaMismatch("image column needs levels".into())),
                }
            } else if spec.levels.is_some() {
                return Err(Error::SchemaMismatch(format!("column {name:?} does not take levels")));
            }
            if spec.element_bits == 0 {
                return Err(Error::SchemaMismatch(format!(
                    "column {name:?} element_bits must be positive"
                )));
            }
            if spec.kind != ColumnKind::Label && spec.element_bits > 4096 {
                return Err(Error::SchemaMismatch(format!(
                    "column {name:?} element_bits {} is implausibly large",
                    spec.element_bits
                )));
            }
        }
        if columns.iter().all(|(_, s)| s.kind == ColumnKind::Label) {
            return Err(Error::SchemaMismatch("schema has no feature columns".into()));
        }
        Ok(DatasetSchema { columns, label_column: label })
    }

    /// Parses the JSON schema document: a top-level object mapping column
    /// name to `{kind, bins?, lower?, upper?, element_bits?}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, RawColumn> = serde_json::from_str(text)?;
        let mut columns = Vec::with_capacity(raw.len());
        for (name, rc) in raw {
            let kind = match rc.kind.as_str() {
                "categorical" => ColumnKind::Categorical,
                "numeric" => ColumnKind::Numeric,
                "text" => ColumnKind::Text,
                "series" => ColumnKind::Series,
                "image" => ColumnKind::Image,
                "label" => ColumnKind::Label,
                other => {
                    return Err(Error::SchemaMismatch(format!(
                        "column {name:?} has unknown kind {other:?}"
                    )))
                }
            };
            let quant = match kind {
                ColumnKind::Numeric | ColumnKind::Series => {
                    let lower = rc.lower.ok_or_else(|| {
                        Error::SchemaMismatch(format!("column {name:?} missing lower bound"))
                    })?;
                    let upper = rc.upper.ok_or_else(|| {
                        Error::SchemaMismatch(format!("column {name:?} missing upper bound"))
                    })?;
                    Some(QuantizationSpec::new(rc.bins.unwrap_or(DEFAULT_BINS), lower, upper)?)
                }
                _ => {
                    if rc.lower.is_some() || rc.upper.is_some() {
                        return Err(Error::SchemaMismatch(format!(
                            "column {name:?} does not take lower/upper"
                        )));
                    }
                    None
                }
            };
            let levels = match kind {
                ColumnKind::Image => Some(rc.bins.unwrap_or(DEFAULT_BINS)),
                ColumnKind::Numeric | ColumnKind::Series => None,
                _ => {
                    if rc.bins.is_some() {
                        return Err(Error::SchemaMismatch(format!(
                            "column {name:?} does not take bins"
                        )));
                    }
                    None
                }
            };
            let element_bits = match kind {
                ColumnKind::Label => {
                    if rc.element_bits.is_some() {
                        return Err(Error::SchemaMismatch(
                            "label columns do not take element_bits".into(),
                        ));
                    }
                    1 // unused; labels never emit features
                }
                ColumnKind::Series => rc.element_bits.unwrap_or(DEFAULT_SERIES_ELEMENT_BITS),
                _ => rc.element_bits.unwrap_or(DEFAULT_ELEMENT_BITS),
            };
            columns.push((name, ColumnSpec { kind, quant, levels, element_bits }));
        }
        DatasetSchema::new(columns)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn columns(&self) -> &[(String, ColumnSpec)] {
        &self.columns
    }

    pub fn label_column(&self) -> Option<&str> {
        self.label_column.as_deref()
    }

    /// Mean declared element size over non-label columns, used when a raw
    /// size estimate is needed without original records.
    pub fn default_element_bits(&self) -> u32 {
        let feature_cols: Vec<u32> = self
            .columns
            .iter()
            .filter(|(_, s)| s.kind != ColumnKind::Label)
            .map(|(_, s)| s.element_bits)
            .collect();
        if feature_cols.is_empty() {
            DEFAULT_ELEMENT_BITS
        } else {
            (feature_cols.iter().map(|&b| u64::from(b)).sum::<u64>() / feature_cols.len() as u64)
                .max(1) as u32
        }
    }

    /// Aligns the schema with a CSV header: every header column must be
    /// declared and every declared column must appear.
    pub fn bind(&self, header: &[String]) -> Result<BoundSchema<'_>> {
        let mut ordered = Vec::with_capacity(header.len());
        for name in header {
            let spec = self
                .columns
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s)
                .ok_or_else(|| {
                    Error::SchemaMismatch(format!("input column {name:?} is not in the schema"))
                })?;
            ordered.push((name.clone(), spec));
        }
        if let Some(label) = &self.label_column {
            if !header.iter().any(|h| h == label) {
                return Err(Error::MissingLabelColumn(label.clone()));
            }
        }
        for (name, _) in &self.columns {
            if !header.iter().any(|h| h == name) {
                return Err(Error::SchemaMismatch(format!(
                    "schema column {name:?} is missing from the input header"
                )));
            }
        }
        if header.len() != self.columns.len() {
            return Err(Error::SchemaMismatch("input header repeats a column".into()));
        }
        Ok(BoundSchema { ordered })
    }
}

/// Schema columns re-ordered to match one concrete input header.
#[derive(Debug)]
pub struct BoundSchema<'a> {
    ordered: Vec<(String, &'a ColumnSpec)>,
}

impl BoundSchema<'_> {
    pub fn arity(&self) -> usize {
        self.ordered.len()
    }
}

// ---------------------------------------------------------------------------
// Canonicalization primitives
// ---------------------------------------------------------------------------

/// Lowercased alphanumeric tokens of `message`, deduplicated and sorted, so
/// the output is invariant to token order and repetition.
pub(crate) fn text_tokens(message: &str) -> Vec<String> {
    let mut tokens: Vec<String> = message
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    tokens.sort();
    tokens.dedup();
    tokens
}

/// Canonicalizes a free-text message: each distinct token becomes a
/// ("token", token) element of the default byte-like size.
pub fn tokenize_text(message: &str) -> Result<FeatureRecord> {
    let tokens = text_tokens(message);
    if tokens.is_empty() {
        return Err(Error::InvalidFeature("message has no tokens after filtering".into()));
    }
    let raw_bits = u64::from(DEFAULT_ELEMENT_BITS) * tokens.len() as u64;
    let features = tokens.into_iter().map(|t| ("token".to_string(), t)).collect();
    FeatureRecord::new(features, None, raw_bits)
}

/// Canonicalizes a time series: timestep `t` becomes ("t<t>", bin index).
pub fn quantize_series(values: &[f64], spec: &QuantizationSpec) -> Result<FeatureRecord> {
    let features = series_features(values, spec)?;
    let raw_bits = u64::from(DEFAULT_SERIES_ELEMENT_BITS) * features.len() as u64;
    FeatureRecord::new(features, None, raw_bits)
}

fn series_features(values: &[f64], spec: &QuantizationSpec) -> Result<Vec<(String, String)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("series must have at least one sample"));
    }
    values
        .iter()
        .enumerate()
        .map(|(t, &v)| Ok((format!("t{t}"), spec.bin(v)?.to_string())))
        .collect()
}

/// Canonicalizes an image: non-zero pixel `p` becomes
/// ("p<p>", floor(intensity·levels/256)); zero pixels are skipped so sparse
/// images stay sparse after encoding.
pub fn quantize_image(pixels: &[u32], levels: u32) -> Result<FeatureRecord> {
    let features = image_features(pixels, levels)?;
    let raw_bits = u64::from(DEFAULT_ELEMENT_BITS) * features.len() as u64;
    FeatureRecord::new(features, None, raw_bits)
}

fn image_features(pixels: &[u32], levels: u32) -> Result<Vec<(String, String)>> {
    if pixels.is_empty() {
        return Err(Error::EmptyInput("image must have at least one pixel"));
    }
    if levels == 0 || levels > 256 {
        return Err(Error::InvalidParameter(format!("levels must be in 1..=256, got {levels}")));
    }
    let mut features = Vec::new();
    for (idx, &intensity) in pixels.iter().enumerate() {
        if intensity > 255 {
            return Err(Error::InvalidFeature(format!(
                "pixel {idx} intensity {intensity} exceeds 255"
            )));
        }
        if intensity == 0 {
            continue;
        }
        features.push((format!("p{idx}"), ((intensity * levels) / 256).to_string()));
    }
    if features.is_empty() {
        return Err(Error::InvalidFeature("image has no non-zero pixels".into()));
    }
    Ok(features)
}

fn parse_cell_list<T: std::str::FromStr>(cell: &str, what: &str) -> Result<Vec<T>> {
    cell.split(CELL_LIST_SEPARATOR)
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| Error::InvalidFeature(format!("cannot parse {what} entry {p:?}")))
        })
        .collect()
}

/// Canonicalizes one data row against a header-bound schema.
pub fn canonicalize_tabular(row: &[String], schema: &BoundSchema<'_>) -> Result<FeatureRecord> {
    if row.len() != schema.ordered.len() {
        return Err(Error::DimensionMismatch {
            expected: schema.ordered.len(),
            got: row.len(),
            what: "row cells for schema columns",
        });
    }
    let mut features: Vec<(String, String)> = Vec::new();
    let mut raw_bits = 0u64;
    let mut label = None;
    for ((name, spec), cell) in schema.ordered.iter().zip(row) {
        let cell = cell.trim();
        match spec.kind {
            ColumnKind::Label => {
                if cell.is_empty() {
                    return Err(Error::InvalidFeature(format!("empty label in column {name:?}")));
                }
                label = Some(cell.to_string());
            }
            ColumnKind::Categorical => {
                if cell.is_empty() {
                    return Err(Error::InvalidFeature(format!("empty cell in column {name:?}")));
                }
                features.push(((*name).to_string(), cell.to_string()));
                raw_bits += u64::from(spec.element_bits);
            }
            ColumnKind::Numeric => {
                let value: f64 = cell.parse().map_err(|_| {
                    Error::InvalidFeature(format!("column {name:?}: cannot parse number {cell:?}"))
                })?;
                let quant = spec.quant.as_ref().expect("validated numeric column");
                features.push(((*name).to_string(), quant.bin(value)?.to_string()));
                raw_bits += u64::from(spec.element_bits);
            }
            ColumnKind::Text => {
                let tokens = text_tokens(cell);
                if tokens.is_empty() {
                    return Err(Error::InvalidFeature(format!(
                        "column {name:?}: message has no tokens after filtering"
                    )));
                }
                raw_bits += u64::from(spec.element_bits) * tokens.len() as u64;
                features.extend(tokens.into_iter().map(|t| ("token".to_string(), t)));
            }
            ColumnKind::Series => {
                let values: Vec<f64> = parse_cell_list(cell, "series")?;
                let quant = spec.quant.as_ref().expect("validated series column");
                let fs = series_features(&values, quant)?;
                raw_bits += u64::from(spec.element_bits) * fs.len() as u64;
                features.extend(fs);
            }
            ColumnKind::Image => {
                let pixels: Vec<u32> = parse_cell_list(cell, "image")?;
                let levels = spec.levels.expect("validated image column");
                let fs = image_features(&pixels, levels)?;
                raw_bits += u64::from(spec.element_bits) * fs.len() as u64;
                features.extend(fs);
            }
        }
    }
    FeatureRecord::new(features, label, raw_bits)
}

// ---------------------------------------------------------------------------
// CSV loading
// ---------------------------------------------------------------------------

/// Loads a UTF-8, comma-separated, header-first CSV into records, one per
/// data row in file order. Labels come from the schema's label column.
pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<Vec<FeatureRecord>> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(file, schema)
}

/// [`load_csv`] over any reader; used directly by tests and in-memory paths.
pub fn load_csv_reader<R: Read>(reader: R, schema: &DatasetSchema) -> Result<Vec<FeatureRecord>> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header: Vec<String> =
        csv_reader.headers()?.iter().map(str::to_owned).collect();
    let bound = schema.bind(&header)?;
    let mut records = Vec::new();
    for (i, row) in csv_reader.records().enumerate() {
        let row_number = i + 1; // 1-based data row
        let row = row?;
        let cells: Vec<String> = row.iter().map(str::to_owned).collect();
        if cells.len() != bound.arity() {
            return Err(Error::ArityMismatch {
                row: row_number,
                expected: bound.arity(),
                got: cells.len(),
            });
        }
        let record = canonicalize_tabular(&cells, &bound)
            .map_err(|e| Error::Malformed { row: row_number, detail: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quant(bins: u32, lower: f64, upper: f64) -> QuantizationSpec {
        QuantizationSpec::new(bins, lower, upper).unwrap()
    }

    #[test]
    fn binning_oracle_cases() {
        let q = quant(4, 0.0, 1.0);
        assert_eq!(q.bin(0.0).unwrap(), 0);
        assert_eq!(q.bin(0.5).unwrap(), 2);
        assert_eq!(q.bin(1.0).unwrap(), 3);
        assert_eq!(q.bin(-5.0).unwrap(), 0);
        assert_eq!(q.bin(5.0).unwrap(), 3);
        assert!(q.bin(f64::NAN).is_err());
        assert!(q.bin(f64::INFINITY).is_err());
    }

    #[test]
    fn binning_is_monotone() {
        let q = quant(32, -2.0, 7.0);
        let mut prev = 0;
        for i in 0..=1000 {
            let v = -3.0 + f64::from(i) * 0.011;
            let b = q.bin(v).unwrap();
            assert!(b >= prev, "bin decreased at {v}");
            assert!(b < 32);
            prev = b;
        }
    }

    #[test]
    fn quantization_spec_validation() {
        assert!(QuantizationSpec::new(0, 0.0, 1.0).is_err());
        assert!(QuantizationSpec::new(4, 1.0, 1.0).is_err());
        assert!(QuantizationSpec::new(4, 2.0, 1.0).is_err());
        assert!(QuantizationSpec::new(4, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn tokenizer_examples() {
        let r = tokenize_text("Hi hi HI").unwrap();
        assert_eq!(r.features(), &[("token".to_string(), "hi".to_string())]);
        assert_eq!(r.raw_size_bits(), 8);

        let r = tokenize_text("win £1000 now!").unwrap();
        let values: Vec<&str> = r.features().iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(values, vec!["1000", "now", "win"]);
        assert_eq!(r.raw_size_bits(), 24);

        assert!(tokenize_text("").is_err());
        assert!(tokenize_text("!!! ---").is_err());
    }

    #[test]
    fn tokenizer_invariant_to_order_and_repetition() {
        let a = tokenize_text("free cash now now").unwrap();
        let b = tokenize_text("now CASH free free cash").unwrap();
        assert_eq!(a.features(), b.features());
    }

    #[test]
    fn series_examples() {
        let q = quant(2, -1.0, 1.0);
        let r = quantize_series(&[-1.0, 0.0, 1.0], &q).unwrap();
        let expect = vec![
            ("t0".to_string(), "0".to_string()),
            ("t1".to_string(), "1".to_string()),
            ("t2".to_string(), "1".to_string()),
        ];
        assert_eq!(r.features(), &expect[..]);
        assert_eq!(r.raw_size_bits(), 3 * 16);

        let constant = quantize_series(&[0.3; 5], &quant(8, 0.0, 1.0)).unwrap();
        let values: std::collections::HashSet<&str> =
            constant.features().iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(values.len(), 1);
        assert_eq!(constant.element_count(), 5);

        assert!(quantize_series(&[], &q).is_err());
        assert!(quantize_series(&[0.0, f64::NAN], &q).is_err());
    }

    #[test]
    fn image_examples() {
        let r = quantize_image(&[0, 255, 128, 0, 7], 16).unwrap();
        let expect = vec![
            ("p1".to_string(), "15".to_string()),
            ("p2".to_string(), "8".to_string()),
            ("p4".to_string(), "0".to_string()),
        ];
        assert_eq!(r.features(), &expect[..]);
        assert_eq!(r.raw_size_bits(), 3 * 8);

        assert!(quantize_image(&[0, 0, 0], 16).is_err());
        assert!(quantize_image(&[300], 16).is_err());
        assert!(quantize_image(&[], 16).is_err());
        assert!(quantize_image(&[5], 0).is_err());
        assert!(quantize_image(&[5], 257).is_err());
        // levels = 256 is the identity map.
        let identity = quantize_image(&[200], 256).unwrap();
        assert_eq!(identity.features()[0].1, "200");
    }

    const TABULAR_SCHEMA: &str = r#"{
        "age": {"kind": "numeric", "bins": 32, "lower": 0, "upper": 100},
        "workclass": {"kind": "categorical"},
        "income": {"kind": "label"}
    }"#;

    #[test]
    fn schema_json_round_trip_and_defaults() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        assert_eq!(schema.columns().len(), 3);
        assert_eq!(schema.label_column(), Some("income"));
        let age = &schema.columns().iter().find(|(n, _)| n == "age").unwrap().1;
        assert_eq!(age.element_bits, DEFAULT_ELEMENT_BITS);
        assert_eq!(age.quant.unwrap().bins, 32);

        let with_defaults = DatasetSchema::from_json(
            r#"{"v": {"kind": "numeric", "lower": 0, "upper": 1}}"#,
        )
        .unwrap();
        assert_eq!(with_defaults.columns()[0].1.quant.unwrap().bins, DEFAULT_BINS);

        let series = DatasetSchema::from_json(
            r#"{"ecg": {"kind": "series", "lower": -1, "upper": 1}}"#,
        )
        .unwrap();
        assert_eq!(series.columns()[0].1.element_bits, DEFAULT_SERIES_ELEMENT_BITS);
    }

    #[test]
    fn schema_rejects_bad_declarations() {
        for bad in [
            r#"{"v": {"kind": "mystery"}}"#,
            r#"{"v": {"kind": "numeric"}}"#,
            r#"{"v": {"kind": "numeric", "lower": 1, "upper": 0}}"#,
            r#"{"v": {"kind": "categorical", "lower": 0, "upper": 1}}"#,
            r#"{"v": {"kind": "categorical", "bins": 4}}"#,
            r#"{"v": {"kind": "label", "element_bits": 8}}"#,
            r#"{"a": {"kind": "label"}, "b": {"kind": "label"}}"#,
            r#"{"a": {"kind": "text"}, "b": {"kind": "text"}}"#,
            r#"{"a": {"kind": "label"}}"#,
            r#"{"v": {"kind": "numeric", "lower": 0, "upper": 1, "extra": 3}}"#,
            r#"{"v": {"kind": "image", "bins": 300}}"#,
        ] {
            assert!(DatasetSchema::from_json(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn canonicalize_tabular_example() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        let header = vec!["age".to_string(), "workclass".to_string(), "income".to_string()];
        let bound = schema.bind(&header).unwrap();
        let row = vec!["37".to_string(), " Private ".to_string(), ">50K".to_string()];
        let record = canonicalize_tabular(&row, &bound).unwrap();
        // age 37 with bins=32 over [0,100]: floor(32·0.37) = 11.
        let expect = vec![
            ("age".to_string(), "11".to_string()),
            ("workclass".to_string(), "Private".to_string()),
        ];
        assert_eq!(record.features(), &expect[..]);
        assert_eq!(record.label(), Some(">50K"));
        assert_eq!(record.raw_size_bits(), 16);

        let bad = vec!["not-a-number".to_string(), "Private".to_string(), "y".to_string()];
        assert!(canonicalize_tabular(&bad, &bound).is_err());
    }

    #[test]
    fn bind_respects_header_order_and_coverage() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        let reordered =
            vec!["income".to_string(), "age".to_string(), "workclass".to_string()];
        let bound = schema.bind(&reordered).unwrap();
        let row = vec!["<=50K".to_string(), "50".to_string(), "Gov".to_string()];
        let record = canonicalize_tabular(&row, &bound).unwrap();
        assert_eq!(record.label(), Some("<=50K"));
        assert_eq!(record.features()[0].1, "16");

        assert!(matches!(
            schema.bind(&["age".to_string(), "workclass".to_string()]),
            Err(Error::MissingLabelColumn(_))
        ));
        assert!(schema
            .bind(&["age".to_string(), "workclass".to_string(), "income".to_string(), "zzz".to_string()])
            .is_err());
        assert!(schema
            .bind(&["age".to_string(), "income".to_string()])
            .is_err());
    }

    #[test]
    fn load_csv_happy_path_and_order() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        let data = "age,workclass,income\n37,Private,>50K\n50,Gov,<=50K\n23,Self,<=50K\n";
        let records = load_csv_reader(data.as_bytes(), &schema).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].features()[0].1, "11");
        assert_eq!(records[1].label(), Some("<=50K"));
        assert_eq!(records[2].features()[0].1, "7");
    }

    #[test]
    fn load_csv_empty_data_section() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        let records = load_csv_reader("age,workclass,income\n".as_bytes(), &schema).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn load_csv_distinct_error_kinds() {
        let schema = DatasetSchema::from_json(TABULAR_SCHEMA).unwrap();
        let arity = "age,workclass,income\n37,Private\n";
        assert!(matches!(
            load_csv_reader(arity.as_bytes(), &schema),
            Err(Error::ArityMismatch { row: 1, expected: 3, got: 2 })
        ));
        let malformed = "age,workclass,income\n37,Private,>50K\nxx,Gov,<=50K\n";
        match load_csv_reader(malformed.as_bytes(), &schema) {
            Err(Error::Malformed { row, detail }) => {
                assert_eq!(row, 2);
                assert!(detail.contains("age"));
            }
            other => panic!("expected malformed-row error, got {other:?}"),
        }
        let no_label = "age,workclass\n37,Private\n";
        assert!(matches!(
            load_csv_reader(no_label.as_bytes(), &schema),
            Err(Error::MissingLabelColumn(_))
        ));
    }

    #[test]
    fn load_csv_text_schema() {
        let schema = DatasetSchema::from_json(
            r#"{"message": {"kind": "text"}, "class": {"kind": "label"}}"#,
        )
        .unwrap();
        let data = "message,class\n\"WIN cash now, now!\",spam\nsee you at lunch,ham\n";
        let records = load_csv_reader(data.as_bytes(), &schema).unwrap();
        assert_eq!(records.len(), 2);
        let toks: Vec<&str> = records[0].features().iter().map(|(_, v)| v.as_str()).collect();
        assert_eq!(toks, vec!["cash", "now", "win"]);
        assert_eq!(records[0].label(), Some("spam"));
        assert_eq!(records[0].raw_size_bits(), 3 * 8);
    }

    #[test]
    fn load_csv_series_schema() {
        let schema = DatasetSchema::from_json(
            r#"{"ecg": {"kind": "series", "bins": 4, "lower": 0, "upper": 1, "element_bits": 24},
                "rhythm": {"kind": "label"}}"#,
        )
        .unwrap();
        let data = "ecg,rhythm\n0.0;0.5;1.0,normal\n";
        let records = load_csv_reader(data.as_bytes(), &schema).unwrap();
        let expect = vec![
            ("t0".to_string(), "0".to_string()),
            ("t1".to_string(), "2".to_string()),
            ("t2".to_string(), "3".to_string()),
        ];
        assert_eq!(records[0].features(), &expect[..]);
        assert_eq!(records[0].raw_size_bits(), 3 * 24);
        assert_eq!(records[0].label(), Some("normal"));
    }

    #[test]
    fn load_csv_image_schema() {
        let schema = DatasetSchema::from_json(
            r#"{"pixels": {"kind": "image", "bins": 16}, "digit": {"kind": "label"}}"#,
        )
        .unwrap();
        let data = "pixels,digit\n0;255;128,7\n";
        let records = load_csv_reader(data.as_bytes(), &schema).unwrap();
        let expect = vec![
            ("p1".to_string(), "15".to_string()),
            ("p2".to_string(), "8".to_string()),
        ];
        assert_eq!(records[0].features(), &expect[..]);
        assert_eq!(records[0].label(), Some("7"));
    }

    #[test]
    fn raw_size_is_element_count_times_declared_bits() {
        let schema = DatasetSchema::from_json(
            r#"{"msg": {"kind": "text", "element_bits": 8}, "y": {"kind": "label"}}"#,
        )
        .unwrap();
        let data = "msg,y\nalpha beta gamma delta,x\n";
        let records = load_csv_reader(data.as_bytes(), &schema).unwrap();
        let n = records[0].element_count() as u64;
        assert_eq!(records[0].raw_size_bits(), n * 8);
    }
}
