//! Hamming distance over packed filters and statistical verification that
//! encoding preserves the ordering of original-space distances.

use serde::{Deserialize, Serialize};

use crate::bloom::BloomVector;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum sampled pairs for a preservation report.
pub const MIN_PAIRS: usize = 100;

/// Count of differing bit positions between two equal-width filters,
/// computed on 64-bit words of the packed form. Trailing bits beyond `m − 1`
/// are zero by construction on both sides, so they never contribute.
pub fn hamming(a: &BloomVector, b: &BloomVector) -> Result<u32> {
    if a.m() != b.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m() as usize,
            got: b.m() as usize,
            what: "hamming filter widths",
        });
    }
    let (xa, xb) = (a.bytes(), b.bytes());
    let mut chunks_a = xa.chunks_exact(8);
    let mut chunks_b = xb.chunks_exact(8);
    let mut total = 0u32;
    for (ca, cb) in chunks_a.by_ref().zip(chunks_b.by_ref()) {
        let wa = u64::from_le_bytes(ca.try_into().unwrap());
        let wb = u64::from_le_bytes(cb.try_into().unwrap());
        total += (wa ^ wb).count_ones();
    }
    for (ba, bb) in chunks_a.remainder().iter().zip(chunks_b.remainder()) {
        total += (ba ^ bb).count_ones();
    }
    Ok(total)
}

/// Distance function applied to the original (pre-encoding) vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginalMetric {
    Euclidean,
    /// Jaccard distance over supports: coordinates with non-zero values are
    /// treated as set members.
    Jaccard,
}

fn original_distance(metric: OriginalMetric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        OriginalMetric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        OriginalMetric::Jaccard => {
            let mut inter = 0usize;
            let mut union = 0usize;
            for (x, y) in a.iter().zip(b) {
                let (xa, ya) = (*x != 0.0, *y != 0.0);
                if xa && ya {
                    inter += 1;
                }
                if xa || ya {
                    union += 1;
                }
            }
            if union == 0 {
                0.0
            } else {
                1.0 - inter as f64 / union as f64
            }
        }
    }
}

/// Outcome of the distance-preservation check on one dataset.
///
/// `spearman_rho` and `triple_agreement_rate` are `None` (JSON `null`) when
/// the sampled distances carry no usable signal — all Hamming or all original
/// distances tied — in which case `degenerate` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub spearman_rho: Option<f64>,
    pub triple_agreement_rate: Option<f64>,
    pub pairs_evaluated: u64,
    pub triples_evaluated: u64,
    pub seed: u64,
    pub degenerate: bool,
}

/// Ranks with ties assigned the average of the positions they cover.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite distances"));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end share the same value; 1-based average rank.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; None when either side has zero variance.
fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}

/// Spearman rank correlation with average-rank tie handling.
pub(crate) fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Samples random pairs and triples under `seed` and measures how well
/// Hamming distances between encodings track distances between the original
/// vectors: Spearman rank correlation over pairs, and the fraction of triples
/// `(x, y, z)` where "y closer to x than z is" agrees between the two spaces.
/// Triples tied in either space are excluded.
pub fn preservation_report(
    originals: &[Vec<f64>],
    encoded: &[BloomVector],
    metric: OriginalMetric,
    pairs: usize,
    seed: u64,
) -> Result<PreservationReport> {
    if originals.len() != encoded.len() {
        return Err(Error::DimensionMismatch {
            expected: originals.len(),
            got: encoded.len(),
            what: "originals aligned with encodings",
        });
    }
    if originals.len() < 3 {
        return Err(Error::EmptyInput("preservation check needs at least 3 samples"));
    }
    if pairs < MIN_PAIRS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_PAIRS} pairs required, got {pairs}"
        )));
    }
    let dim = originals[0].len();
    for (i, v) in originals.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len(), what: "original vector dims" });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("original vector {i} has a non-finite entry")));
        }
    }
    let width = encoded[0].m();
    for bv in encoded {
        if bv.m() != width {
            return Err(Error::DimensionMismatch {
                expected: width as usize,
                got: bv.m() as usize,
                what: "filter widths in dataset",
            });
        }
    }

    let len = originals.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d_orig = Vec::with_capacity(pairs);
    let mut d_ham = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let i = rng.gen_range(0..len);
        let mut j = rng.gen_range(0..len);
        while j == i {
            j = rng.gen_range(0..len);
        }
        d_orig.push(original_distance(metric, &originals[i], &originals[j]));
        d_ham.push(f64::from(hamming(&encoded[i], &encoded[j])?));
    }
    let rho = spearman(&d_orig, &d_ham);

    let mut agreements = 0u64;
    let mut decided = 0u64;
    for _ in 0..pairs {
        let x = rng.gen_range(0..len);
        let mut y = rng.gen_range(0..len);
        while y == x {
            y = rng.gen_range(0..len);
        }
        let mut z = rng.gen_range(0..len);
        while z == x || z == y {
            z = rng.gen_range(0..len);
        }
        let o = original_distance(metric, &originals[x], &originals[y])
            - original_distance(metric, &originals[x], &originals[z]);
        let h = f64::from(hamming(&encoded[x], &encoded[y])?)
            - f64::from(hamming(&encoded[x], &encoded[z])?);
        if o == 0.0 || h == 0.0 {
            continue; // tie in either space: ordering is undefined
        }
        decided += 1;
        if (o > 0.0) == (h > 0.0) {
            agreements += 1;
        }
    }
    let agreement = if decided > 0 { Some(agreements as f64 / decided as f64) } else { None };

    Ok(PreservationReport {
        degenerate: rho.is_none() || agreement.is_none(),
        spearman_rho: rho,
        triple_agreement_rate: agreement,
        pairs_evaluated: pairs as u64,
        triples_evaluated: decided,
        seed,
    })
}
