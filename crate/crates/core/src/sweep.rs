//! Grid sweeps over (m, k): encode, cross-validate a classifier, and collect
//! the accuracy/compression/privacy trade-off per cell.
//!
//! Cells run concurrently up to a job limit, but every cell is internally
//! deterministic and rows are emitted in grid order (m-major, then k), so the
//! output is byte-identical regardless of scheduling.

use serde::{Deserialize, Serialize};

use crate::bloom::encode_dataset;
use crate::classifier::{evaluate, kfold_split, train, TrainConfig};
use crate::config::EncodingConfig;
use crate::error::{Error, Result};
use crate::metrics::{empirical_entropy, empirical_occupancy, mean, mean_raw_bits};
use crate::record::FeatureRecord;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Fixed column order of the sweep CSV.
pub const SWEEP_CSV_HEADER: [&str; 8] =
    ["m", "k", "accuracy", "f1", "compression_ratio", "entropy_bit", "occupancy", "fold_std"];

/// One (m, k) grid point's results. `accuracy` and `f1` are means over
/// cross-validation folds; `fold_std` is the sample standard deviation of the
/// per-fold accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResultRow {
    pub m: u32,
    pub k: u16,
    pub accuracy: f64,
    pub f1: f64,
    pub compression_ratio: f64,
    pub entropy_bit: f64,
    pub occupancy: f64,
    pub fold_std: f64,
}

/// The (m, k) grid to sweep, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub m_values: Vec<u32>,
    pub k_values: Vec<u16>,
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(u32, u16)> {
        let mut out = Vec::with_capacity(self.m_values.len() * self.k_values.len());
        for &m in &self.m_values {
            for &k in &self.k_values {
                out.push((m, k));
            }
        }
        out
    }
}

/// Sample standard deviation (n − 1 denominator); 0 for a single value.
pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

fn run_cell(
    records: &[FeatureRecord],
    labels: &[String],
    key: &[u8],
    format_version: u16,
    m: u32,
    k: u16,
    splits: &[(Vec<usize>, Vec<usize>)],
    train_cfg: &TrainConfig,
) -> Result<SweepResultRow> {
    let config = EncodingConfig::new(m, k, key, format_version)?;
    let encoded = encode_dataset(&config, records)?;
    let occupancy = empirical_occupancy(&encoded)?;
    let entropy_bit = empirical_entropy(&encoded)?;
    let compression_ratio = mean_raw_bits(records)? / f64::from(m);
    let dense: Vec<Vec<f64>> = encoded.iter().map(|v| v.to_dense_f64()).collect();

    let mut fold_accuracies = Vec::with_capacity(splits.len());
    let mut fold_f1 = Vec::with_capacity(splits.len());
    for (fold_idx, (train_idx, test_idx)) in splits.iter().enumerate() {
        let train_inputs: Vec<Vec<f64>> = train_idx.iter().map(|&i| dense[i].clone()).collect();
        let train_labels: Vec<String> = train_idx.iter().map(|&i| labels[i].clone()).collect();
        let test_inputs: Vec<Vec<f64>> = test_idx.iter().map(|&i| dense[i].clone()).collect();
        let test_labels: Vec<String> = test_idx.iter().map(|&i| labels[i].clone()).collect();
        let fold_cfg = TrainConfig { seed: train_cfg.seed + fold_idx as u64, ..*train_cfg };
        let model = train(&train_inputs, &train_labels, &fold_cfg)?;
        let report = evaluate(&model, &test_inputs, &test_labels)?;
        fold_accuracies.push(report.accuracy);
        fold_f1.push(report.f1_positive);
    }
    let row = SweepResultRow {
        m,
        k,
        accuracy: mean(&fold_accuracies),
        f1: mean(&fold_f1),
        compression_ratio,
        entropy_bit,
        occupancy,
        fold_std: sample_std(&fold_accuracies),
    };
    for (name, value) in [
        ("accuracy", row.accuracy),
        ("f1", row.f1),
        ("compression_ratio", row.compression_ratio),
        ("entropy_bit", row.entropy_bit),
        ("occupancy", row.occupancy),
        ("fold_std", row.fold_std),
    ] {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("sweep metric {name}")));
        }
    }
    Ok(row)
}

/// Runs the full grid. The fold split is computed once from `seed` and shared
/// by every cell, so cells differ only in (m, k); per-fold training seeds are
/// `train_cfg.seed + fold_index`. The first failing cell (in grid order)
/// aborts the sweep, identified in the error.
pub fn run_sweep(
    records: &[FeatureRecord],
    key: &[u8],
    format_version: u16,
    grid: &SweepGrid,
    folds: usize,
    seed: u64,
    train_cfg: &TrainConfig,
    jobs: usize,
) -> Result<Vec<SweepResultRow>> {
    if grid.m_values.is_empty() || grid.k_values.is_empty() {
        return Err(Error::EmptyInput("sweep grid must be non-empty"));
    }
    if jobs == 0 {
        return Err(Error::InvalidParameter("jobs must be at least 1".into()));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("sweep needs at least one record"));
    }
    let labels: Vec<String> = records
        .iter()
        .map(|r| {
            r.label().map(str::to_owned).ok_or(Error::InvalidParameter(
                "sweep requires every record to carry a label".into(),
            ))
        })
        .collect::<Result<_>>()?;
    let splits = kfold_split(records.len(), folds, seed)?;
    let cells = grid.cells();

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SweepResultRow>>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = jobs.min(cells.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let (m, k) = cells[idx];
                let outcome =
                    run_cell(records, &labels, key, format_version, m, k, &splits, train_cfg);
                results.lock().expect("no panics hold this lock")[idx] = Some(outcome);
            });
        }
    });

    let collected = results.into_inner().expect("all workers joined");
    let mut rows = Vec::with_capacity(cells.len());
    for ((m, k), slot) in cells.into_iter().zip(collected) {
        match slot.expect("every cell was scheduled") {
            Ok(row) => rows.push(row),
            Err(e) => return Err(Error::SweepCell { m, k, source: Box::new(e) }),
        }
    }
    Ok(rows)
}

/// Writes rows as CSV under the fixed header, in the given order.
pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepResultRow]) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        csv_writer.write_record(&[
            row.m.to_string(),
            row.k.to_string(),
            row.accuracy.to_string(),
            row.f1.to_string(),
            row.compression_ratio.to_string(),
            row.entropy_bit.to_string(),
            row.occupancy.to_string(),
            row.fold_std.to_string(),
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const KEY: &[u8] = b"0123456789abcdef";

    /// Two noisy clusters over categorical features: learnable but not
    /// trivial, cheap to encode.
    fn toy_records(count: usize, seed: u64) -> Vec<FeatureRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let class = i % 2;
                let feats: Vec<(String, String)> = (0..6)
                    .map(|j| {
                        let biased = rng.gen_bool(0.8);
                        let v = if biased { class } else { 1 - class };
                        (format!("f{j}"), format!("v{}", v * 3 + j % 3))
                    })
                    .collect();
                let label = if class == 0 { "a" } else { "b" };
                FeatureRecord::new(feats, Some(label.into()), 6 * 8).unwrap()
            })
            .collect()
    }

    fn quick_train() -> TrainConfig {
        TrainConfig { epochs: 40, ..TrainConfig::default() }
    }

    #[test]
    fn single_cell_grid_gives_single_row() {
        let records = toy_records(60, 1);
        let grid = SweepGrid { m_values: vec![128], k_values: vec![2] };
        let rows =
            run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].m, rows[0].k), (128, 2));
        assert!(rows[0].accuracy > 0.6, "toy data should be learnable");
        assert_eq!(rows[0].compression_ratio, 48.0 / 128.0);
    }

    #[test]
    fn rows_are_in_grid_order_and_deterministic_across_job_counts() {
        let records = toy_records(50, 2);
        let grid = SweepGrid { m_values: vec![64, 128], k_values: vec![1, 2, 4] };
        let sequential = run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 1).unwrap();
        let parallel = run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 4).unwrap();
        assert_eq!(sequential, parallel);
        let order: Vec<(u32, u16)> = sequential.iter().map(|r| (r.m, r.k)).collect();
        assert_eq!(order, vec![(64, 1), (64, 2), (64, 4), (128, 1), (128, 2), (128, 4)]);
    }

    #[test]
    fn failing_cell_is_identified() {
        let records = toy_records(30, 3);
        // m = 4 is below the minimum filter width, so that cell must fail.
        let grid = SweepGrid { m_values: vec![64, 4], k_values: vec![2] };
        match run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 2) {
            Err(Error::SweepCell { m: 4, k: 2, .. }) => {}
            other => panic!("expected identified cell failure, got {other:?}"),
        }
    }

    #[test]
    fn unlabeled_records_are_rejected() {
        let mut records = toy_records(20, 4);
        let unlabeled =
            FeatureRecord::new(vec![("f0".into(), "v0".into())], None, 8).unwrap();
        records.push(unlabeled);
        let grid = SweepGrid { m_values: vec![64], k_values: vec![1] };
        assert!(run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 1).is_err());
    }

    #[test]
    fn csv_output_has_fixed_header_and_row_order() {
        let rows = vec![
            SweepResultRow {
                m: 64,
                k: 1,
                accuracy: 0.75,
                f1: 0.7,
                compression_ratio: 1.5,
                entropy_bit: 0.6,
                occupancy: 0.2,
                fold_std: 0.01,
            },
            SweepResultRow {
                m: 128,
                k: 2,
                accuracy: 0.875,
                f1: 0.85,
                compression_ratio: 0.75,
                entropy_bit: 0.55,
                occupancy: 0.15,
                fold_std: 0.02,
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines[0], "m,k,accuracy,f1,compression_ratio,entropy_bit,occupancy,fold_std");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("64,1,0.75,"));
        assert!(lines[2].starts_with("128,2,0.875,"));
    }

    #[test]
    fn sample_std_basics() {
        assert_eq!(sample_std(&[0.5]), 0.0);
        let s = sample_std(&[1.0, 2.0, 3.0]);
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let records = toy_records(20, 5);
        let empty = SweepGrid { m_values: vec![], k_values: vec![2] };
        assert!(run_sweep(&records, KEY, 1, &empty, 3, 7, &quick_train(), 1).is_err());
        let grid = SweepGrid { m_values: vec![64], k_values: vec![2] };
        assert!(run_sweep(&records, KEY, 1, &grid, 3, 7, &quick_train(), 0).is_err());
        assert!(run_sweep(&[], KEY, 1, &grid, 3, 7, &quick_train(), 1).is_err());
    }
}
