//! Raw (non-encoded) feature vectors for side-by-side baseline runs: the
//! same input files, schema-driven, turned into dense numeric matrices
//! instead of filters.
//!
//! Continuous inputs (numeric cells, series timesteps, pixel intensities)
//! are standardized with statistics fitted on the training fold only;
//! categorical cells become one-hot blocks and text becomes a 0/1
//! bag-of-words over the training-fold vocabulary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{text_tokens, ColumnKind, DatasetSchema};
use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

/// One parsed cell, before any fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum RawCell {
    Categorical(String),
    Number(f64),
    Tokens(Vec<String>),
    Series(Vec<f64>),
    Image(Vec<u32>),
}

/// A dataset parsed for raw-representation use: cells keep their original
/// values (no quantization), aligned with the input header order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    /// Column names in input order, label column excluded.
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<RawCell>>,
    pub labels: Vec<Option<String>>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Labels for training; errors if any record is unlabeled.
    pub fn labels_required(&self) -> Result<Vec<String>> {
        self.labels
            .iter()
            .map(|l| {
                l.clone().ok_or(Error::InvalidParameter(
                    "every record needs a label for training".into(),
                ))
            })
            .collect()
    }
}

/// Parses a CSV for raw-representation use under the same schema as the
/// encoder path, keeping original values instead of canonicalizing them.
pub fn load_raw_csv_reader<R: Read>(reader: R, schema: &DatasetSchema) -> Result<RawDataset> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header: Vec<String> = csv_reader.headers()?.iter().map(str::to_owned).collect();
    let bound = schema.bind(&header)?;
    let specs: Vec<(&str, &crate::ingest::ColumnSpec)> = header
        .iter()
        .map(|name| {
            let spec = schema
                .columns()
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s)
                .expect("bind verified coverage");
            (name.as_str(), spec)
        })
        .collect();
    let _ = &bound;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut column_names: Vec<String> = Vec::new();
    for (name, spec) in &specs {
        if spec.kind != ColumnKind::Label {
            column_names.push((*name).to_string());
        }
    }
    for (i, row) in csv_reader.records().enumerate() {
        let row_number = i + 1;
        let row = row?;
        if row.len() != specs.len() {
            return Err(Error::ArityMismatch { row: row_number, expected: specs.len(), got: row.len() });
        }
        let mut cells = Vec::with_capacity(column_names.len());
        let mut label = None;
        for ((name, spec), cell) in specs.iter().zip(row.iter()) {
            let cell = cell.trim();
            let parsed = match spec.kind {
                ColumnKind::Label => {
                    if cell.is_empty() {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("empty label in column {name:?}"),
                        });
                    }
                    label = Some(cell.to_string());
                    continue;
                }
                ColumnKind::Categorical => {
                    if cell.is_empty() {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("empty cell in column {name:?}"),
                        });
                    }
                    RawCell::Categorical(cell.to_string())
                }
                ColumnKind::Numeric => {
                    let v: f64 = cell.parse().map_err(|_| Error::Malformed {
                        row: row_number,
                        detail: format!("column {name:?}: cannot parse number {cell:?}"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("column {name:?}: non-finite value"),
                        });
                    }
                    RawCell::Number(v)
                }
                ColumnKind::Text => {
                    let tokens = text_tokens(cell);
                    if tokens.is_empty() {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("column {name:?}: no tokens after filtering"),
                        });
                    }
                    RawCell::Tokens(tokens)
                }
                ColumnKind::Series => {
                    let values: Vec<f64> = parse_list(cell, row_number, name)?;
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("column {name:?}: non-finite series value"),
                        });
                    }
                    RawCell::Series(values)
                }
                ColumnKind::Image => {
                    let pixels: Vec<u32> = parse_list(cell, row_number, name)?;
                    if pixels.iter().any(|&p| p > 255) {
                        return Err(Error::Malformed {
                            row: row_number,
                            detail: format!("column {name:?}: intensity exceeds 255"),
                        });
                    }
                    RawCell::Image(pixels)
                }
            };
            cells.push(parsed);
        }
        rows.push(cells);
        labels.push(label);
    }
    Ok(RawDataset { column_names, rows, labels })
}

pub fn load_raw_csv(path: &Path, schema: &DatasetSchema) -> Result<RawDataset> {
    let file = std::fs::File::open(path)?;
    load_raw_csv_reader(file, schema)
}

fn parse_list<T: std::str::FromStr>(cell: &str, row: usize, name: &str) -> Result<Vec<T>> {
    cell.split(crate::ingest::CELL_LIST_SEPARATOR)
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>().map_err(|_| Error::Malformed {
                row,
                detail: format!("column {name:?}: cannot parse entry {p:?}"),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Featurizer
// ---------------------------------------------------------------------------

/// Per-dimension standardization parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    /// Fits column-wise mean and standard deviation (population) over the
    /// given vectors. Constant dimensions get std 0 and later map to 0.
    fn fit(values: &[Vec<f64>]) -> Scaler {
        let dims = values.first().map_or(0, Vec::len);
        let n = values.len() as f64;
        let mut means = vec![0.0; dims];
        for v in values {
            for (m, x) in means.iter_mut().zip(v) {
                *m += x / n;
            }
        }
        let mut stds = vec![0.0; dims];
        for v in values {
            for ((s, m), x) in stds.iter_mut().zip(&means).zip(v) {
                *s += (x - m) * (x - m) / n;
            }
        }
        for s in &mut stds {
            *s = s.sqrt();
        }
        Scaler { means, stds }
    }

    fn apply(&self, values: &[f64], out: &mut Vec<f64>) {
        for ((x, m), s) in values.iter().zip(&self.means).zip(&self.stds) {
            out.push(if *s > 0.0 { (x - m) / s } else { 0.0 });
        }
    }
}

/// How one column maps into the dense raw vector. Fitted state (category
/// lists, vocabularies, scalers) comes from the training fold only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnFeaturizer {
    /// One standardized dimension.
    Continuous { name: String, mean: f64, std: f64 },
    /// One 0/1 dimension per training-fold category, in sorted order;
    /// unseen categories map to all zeros.
    OneHot { name: String, categories: Vec<String> },
    /// One 0/1 dimension per training-fold token, in sorted order; unseen
    /// tokens are dropped.
    BagOfWords { name: String, vocab: Vec<String> },
    /// Fixed-length series standardized per timestep.
    SeriesDims { name: String, scaler: Scaler },
    /// Fixed-length pixel list standardized per position.
    ImageDims { name: String, scaler: Scaler },
}

impl ColumnFeaturizer {
    fn dimension(&self) -> usize {
        match self {
            ColumnFeaturizer::Continuous { .. } => 1,
            ColumnFeaturizer::OneHot { categories, .. } => categories.len(),
            ColumnFeaturizer::BagOfWords { vocab, .. } => vocab.len(),
            ColumnFeaturizer::SeriesDims { scaler, .. }
            | ColumnFeaturizer::ImageDims { scaler, .. } => scaler.means.len(),
        }
    }
}

/// A fitted raw-representation transform, persisted alongside models so that
/// evaluation applies exactly the training-time mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Featurizer {
    pub columns: Vec<ColumnFeaturizer>,
}

impl Featurizer {
    /// Fits on the rows selected by `indices` (the training fold).
    pub fn fit(dataset: &RawDataset, indices: &[usize]) -> Result<Featurizer> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("featurizer needs at least one training row"));
        }
        for &i in indices {
            if i >= dataset.len() {
                return Err(Error::InvalidParameter(format!(
                    "training index {i} out of range for {} rows",
                    dataset.len()
                )));
            }
        }
        let cols = dataset.column_names.len();
        let mut columns = Vec::with_capacity(cols);
        for c in 0..cols {
            let name = dataset.column_names[c].clone();
            let featurizer = match &dataset.rows[indices[0]][c] {
                RawCell::Number(_) => {
                    let values: Vec<Vec<f64>> = indices
                        .iter()
                        .map(|&i| match &dataset.rows[i][c] {
                            RawCell::Number(v) => Ok(vec![*v]),
                            _ => Err(cell_kind_error(&name)),
                        })
                        .collect::<Result<_>>()?;
                    let scaler = Scaler::fit(&values);
                    ColumnFeaturizer::Continuous {
                        name,
                        mean: scaler.means[0],
                        std: scaler.stds[0],
                    }
                }
                RawCell::Categorical(_) => {
                    let mut categories = BTreeSet::new();
                    for &i in indices {
                        match &dataset.rows[i][c] {
                            RawCell::Categorical(v) => {
                                categories.insert(v.clone());
                            }
                            _ => return Err(cell_kind_error(&name)),
                        }
                    }
                    ColumnFeaturizer::OneHot { name, categories: categories.into_iter().collect() }
                }
                RawCell::Tokens(_) => {
                    let mut vocab = BTreeSet::new();
                    for &i in indices {
                        match &dataset.rows[i][c] {
                            RawCell::Tokens(ts) => vocab.extend(ts.iter().cloned()),
                            _ => return Err(cell_kind_error(&name)),
                        }
                    }
                    ColumnFeaturizer::BagOfWords { name, vocab: vocab.into_iter().collect() }
                }
                RawCell::Series(first) => {
                    let len = first.len();
                    let values: Vec<Vec<f64>> = indices
                        .iter()
                        .map(|&i| match &dataset.rows[i][c] {
                            RawCell::Series(v) if v.len() == len => Ok(v.clone()),
                            RawCell::Series(v) => Err(Error::DimensionMismatch {
                                expected: len,
                                got: v.len(),
                                what: "series lengths",
                            }),
                            _ => Err(cell_kind_error(&name)),
                        })
                        .collect::<Result<_>>()?;
                    ColumnFeaturizer::SeriesDims { name, scaler: Scaler::fit(&values) }
                }
                RawCell::Image(first) => {
                    let len = first.len();
                    let values: Vec<Vec<f64>> = indices
                        .iter()
                        .map(|&i| match &dataset.rows[i][c] {
                            RawCell::Image(v) if v.len() == len => {
                                Ok(v.iter().map(|&p| f64::from(p) / 255.0).collect())
                            }
                            RawCell::Image(v) => Err(Error::DimensionMismatch {
                                expected: len,
                                got: v.len(),
                                what: "image lengths",
                            }),
                            _ => Err(cell_kind_error(&name)),
                        })
                        .collect::<Result<_>>()?;
                    ColumnFeaturizer::ImageDims { name, scaler: Scaler::fit(&values) }
                }
            };
            columns.push(featurizer);
        }
        Ok(Featurizer { columns })
    }

    /// Total dense dimension.
    pub fn dimension(&self) -> usize {
        self.columns.iter().map(ColumnFeaturizer::dimension).sum()
    }

    /// Transforms one row into the fitted dense space.
    pub fn transform(&self, dataset: &RawDataset, index: usize) -> Result<Vec<f64>> {
        let row = dataset
            .rows
            .get(index)
            .ok_or_else(|| Error::InvalidParameter(format!("row index {index} out of range")))?;
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: row.len(),
                what: "featurizer columns",
            });
        }
        let mut out = Vec::with_capacity(self.dimension());
        for (featurizer, cell) in self.columns.iter().zip(row) {
            match (featurizer, cell) {
                (ColumnFeaturizer::Continuous { mean, std, .. }, RawCell::Number(v)) => {
                    out.push(if *std > 0.0 { (v - mean) / std } else { 0.0 });
                }
                (ColumnFeaturizer::OneHot { categories, .. }, RawCell::Categorical(v)) => {
                    for cat in categories {
                        out.push(if cat == v { 1.0 } else { 0.0 });
                    }
                }
                (ColumnFeaturizer::BagOfWords { vocab, .. }, RawCell::Tokens(ts)) => {
                    for word in vocab {
                        out.push(if ts.binary_search(word).is_ok() { 1.0 } else { 0.0 });
                    }
                }
                (ColumnFeaturizer::SeriesDims { scaler, .. }, RawCell::Series(v)) => {
                    if v.len() != scaler.means.len() {
                        return Err(Error::DimensionMismatch {
                            expected: scaler.means.len(),
                            got: v.len(),
                            what: "series lengths",
                        });
                    }
                    scaler.apply(v, &mut out);
                }
                (ColumnFeaturizer::ImageDims { scaler, .. }, RawCell::Image(v)) => {
                    if v.len() != scaler.means.len() {
                        return Err(Error::DimensionMismatch {
                            expected: scaler.means.len(),
                            got: v.len(),
                            what: "image lengths",
                        });
                    }
                    let scaled: Vec<f64> = v.iter().map(|&p| f64::from(p) / 255.0).collect();
                    scaler.apply(&scaled, &mut out);
                }
                (f, _) => {
                    let name = match f {
                        ColumnFeaturizer::Continuous { name, .. }
                        | ColumnFeaturizer::OneHot { name, .. }
                        | ColumnFeaturizer::BagOfWords { name, .. }
                        | ColumnFeaturizer::SeriesDims { name, .. }
                        | ColumnFeaturizer::ImageDims { name, .. } => name,
                    };
                    return Err(cell_kind_error(name));
                }
            }
        }
        Ok(out)
    }

    /// Transforms many rows; a convenience over [`transform`](Self::transform).
    pub fn transform_all(&self, dataset: &RawDataset, indices: &[usize]) -> Result<Vec<Vec<f64>>> {
        indices.iter().map(|&i| self.transform(dataset, i)).collect()
    }
}

fn cell_kind_error(name: &str) -> Error {
    Error::SchemaMismatch(format!("column {name:?} has inconsistent cell kinds"))
}

/// Fit-free numeric embedding of the whole dataset, for distance checks:
/// numeric/series cells keep raw values, image cells scale to [0,1],
/// categorical cells one-hot over the full dataset, text cells 0/1
/// bag-of-words over the full vocabulary. No standardization.
pub fn plain_vectors(dataset: &RawDataset) -> Result<Vec<Vec<f64>>> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("plain embedding needs at least one row"));
    }
    let cols = dataset.column_names.len();
    let mut category_maps: Vec<Option<Vec<String>>> = vec![None; cols];
    for c in 0..cols {
        match &dataset.rows[0][c] {
            RawCell::Categorical(_) => {
                let mut set = BTreeSet::new();
                for row in &dataset.rows {
                    if let RawCell::Categorical(v) = &row[c] {
                        set.insert(v.clone());
                    }
                }
                category_maps[c] = Some(set.into_iter().collect());
            }
            RawCell::Tokens(_) => {
                let mut set = BTreeSet::new();
                for row in &dataset.rows {
                    if let RawCell::Tokens(ts) = &row[c] {
                        set.extend(ts.iter().cloned());
                    }
                }
                category_maps[c] = Some(set.into_iter().collect());
            }
            _ => {}
        }
    }
    let mut out = Vec::with_capacity(dataset.len());
    for row in &dataset.rows {
        let mut v = Vec::new();
        for (c, cell) in row.iter().enumerate() {
            match cell {
                RawCell::Number(x) => v.push(*x),
                RawCell::Series(xs) => v.extend_from_slice(xs),
                RawCell::Image(ps) => v.extend(ps.iter().map(|&p| f64::from(p) / 255.0)),
                RawCell::Categorical(x) => {
                    let cats = category_maps[c].as_ref().expect("categorical map built");
                    for cat in cats {
                        v.push(if cat == x { 1.0 } else { 0.0 });
                    }
                }
                RawCell::Tokens(ts) => {
                    let vocab = category_maps[c].as_ref().expect("vocab built");
                    for word in vocab {
                        v.push(if ts.binary_search(word).is_ok() { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        out.push(v);
    }
    let dim = out[0].len();
    for v in &out {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
                what: "plain embedding dims (ragged series/image rows)",
            });
        }
    }
    Ok(out)
}
