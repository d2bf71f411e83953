//! Closed-form filter statistics and their empirical counterparts.
//!
//! The closed forms treat `n` (elements per filter) as a real number so that
//! dataset-level means can be plugged in directly. All empirical estimators
//! reduce in a fixed order (pairwise summation) so results are bit-stable
//! regardless of how the scan is scheduled.

use serde::{Deserialize, Serialize};

use crate::bloom::{contains, BloomVector};
use crate::config::EncodingConfig;
use crate::error::{Error, Result};
use crate::record::FeatureRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

/// z-score for a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// Minimum probe count accepted by [`empirical_fpr`].
pub const MIN_PROBES: usize = 100;

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn check_params(n: f64, k: u16, m: u32) -> Result<()> {
    if !n.is_finite() || n < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "element count n must be finite and non-negative, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("hash count k must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("filter width m must be at least 1".into()));
    }
    Ok(())
}

/// Expected fraction of set bits after inserting `n` elements with `k` hash
/// functions into an `m`-bit filter: `1 − e^(−kn/m)`.
pub fn theoretical_occupancy(n: f64, k: u16, m: u32) -> Result<f64> {
    check_params(n, k, m)?;
    Ok(1.0 - (-(f64::from(k) * n) / f64::from(m)).exp())
}

/// Expected fraction of hash writes that land on an already-set bit:
/// `1 − (m/(kn))·p1`. Undefined when no writes happen (`kn = 0`).
pub fn collision_rate(n: f64, k: u16, m: u32) -> Result<f64> {
    check_params(n, k, m)?;
    let kn = f64::from(k) * n;
    if kn == 0.0 {
        return Err(Error::Undefined("collision rate requires kn > 0".into()));
    }
    let p1 = theoretical_occupancy(n, k, m)?;
    Ok(1.0 - (f64::from(m) / kn) * p1)
}

/// Probability a random non-member passes the membership test: `p1^k`.
pub fn theoretical_fpr(n: f64, k: u16, m: u32) -> Result<f64> {
    let p1 = theoretical_occupancy(n, k, m)?;
    Ok(p1.powi(i32::from(k)))
}

/// Raw bits over encoded bits: `n·S/m` for `n` elements of `s_bits` each.
pub fn compression_ratio(n: f64, s_bits: u32, m: u32) -> Result<f64> {
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "element count n must be positive, got {n}"
        )));
    }
    if s_bits == 0 {
        return Err(Error::InvalidParameter("element size must be positive".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("filter width m must be at least 1".into()));
    }
    Ok(n * f64::from(s_bits) / f64::from(m))
}

/// Shannon entropy of a Bernoulli(p1) bit, in bits:
/// `−[p1·log₂p1 + (1−p1)·log₂(1−p1)]`, with `0·log₂0 := 0`.
pub fn entropy_per_bit(p1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("p1 must lie in [0,1], got {p1}")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { p * p.log2() };
    Ok(-(term(p1) + term(1.0 - p1)))
}

/// Probability that a single inserted element can be recovered from the
/// filter: `(1 − p1)^k`.
pub fn invertibility_prob(p1: f64, k: u16) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("p1 must lie in [0,1], got {p1}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("hash count k must be at least 1".into()));
    }
    Ok((1.0 - p1).powi(i32::from(k)))
}

// ---------------------------------------------------------------------------
// Deterministic reduction
// ---------------------------------------------------------------------------

/// Fixed-order pairwise summation. Splitting at the midpoint gives the same
/// result no matter how the scan that produced `xs` was scheduled, and keeps
/// rounding error at O(log n) depth.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1..=8 => xs.iter().sum(),
        len => {
            let (lo, hi) = xs.split_at(len / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

// ---------------------------------------------------------------------------
// Empirical estimators
// ---------------------------------------------------------------------------

fn uniform_width(encoded: &[BloomVector]) -> Result<u32> {
    let first = encoded.first().ok_or(Error::EmptyInput("empirical metrics need at least one filter"))?;
    for bv in encoded {
        if bv.m() != first.m() {
            return Err(Error::DimensionMismatch {
                expected: first.m() as usize,
                got: bv.m() as usize,
                what: "filter widths in dataset",
            });
        }
    }
    Ok(first.m())
}

/// Mean fraction of set bits across the dataset.
pub fn empirical_occupancy(encoded: &[BloomVector]) -> Result<f64> {
    uniform_width(encoded)?;
    let densities: Vec<f64> = encoded.iter().map(BloomVector::density).collect();
    Ok(mean(&densities))
}

/// Mean over samples of the Bernoulli entropy of each sample's bit density.
pub fn empirical_entropy(encoded: &[BloomVector]) -> Result<f64> {
    uniform_width(encoded)?;
    let entropies: Vec<f64> = encoded
        .iter()
        .map(|bv| entropy_per_bit(bv.density()))
        .collect::<Result<_>>()?;
    Ok(mean(&entropies))
}

/// A measured false-positive rate with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FprEstimate {
    pub rate: f64,
    pub ci_halfwidth: f64,
    pub probes: u64,
    pub hits: u64,
}

/// Probes filters with synthetic non-member elements and reports the fraction
/// that pass the membership test.
///
/// Probe elements use feature names prefixed `probe_` with seeded random
/// values, which keeps them out of any reasonable member universe; the
/// explicit overlap check below turns a violation of that assumption into an
/// error instead of a silently inflated rate. Probe `t` is tested against
/// filter `t mod len`, so every filter contributes. `member_sets` may be
/// empty when the original records are unavailable (disjointness is then the
/// caller's responsibility via the naming convention).
pub fn empirical_fpr(
    config: &EncodingConfig,
    encoded: &[BloomVector],
    member_sets: &[FeatureRecord],
    probes: usize,
    seed: u64,
) -> Result<FprEstimate> {
    uniform_width(encoded)?;
    if probes < MIN_PROBES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_PROBES} probes required, got {probes}"
        )));
    }
    let members: HashSet<(&str, &str)> = member_sets
        .iter()
        .flat_map(|r| r.features().iter().map(|(n, v)| (n.as_str(), v.as_str())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for t in 0..probes {
        let name = "probe_q";
        let value = format!("{:016x}", rng.gen::<u64>());
        if members.contains(&(name, value.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "probe element ({name}, {value}) overlaps a member element"
            )));
        }
        let target = &encoded[t % encoded.len()];
        if contains(config, target, name, &value)? {
            hits += 1;
        }
    }
    let rate = hits as f64 / probes as f64;
    let ci_halfwidth = Z_95 * (rate * (1.0 - rate) / probes as f64).sqrt();
    Ok(FprEstimate { rate, ci_halfwidth, probes: probes as u64, hits })
}

/// One Monte-Carlo measurement of the idealized uniform-placement model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McUniform {
    pub mean_occupancy: f64,
    pub fpr: f64,
    pub trials: u32,
}

/// Simulates the placement model the closed forms describe: each of `n`
/// elements sets `k` bit positions drawn uniformly at random (with
/// replacement, matching how digest values reduce mod `m`), then one
/// non-member probe of `k` fresh uniform positions tests membership.
///
/// Returns the mean fraction of set bits across trials and the fraction of
/// probes that passed. Exact binomial placement differs from the `e^(-kn/m)`
/// approximation by O(1/m), so comparisons against the closed forms need
/// tolerances that absorb both that gap and sampling noise.
pub fn monte_carlo_uniform(m: u32, k: u16, n: u32, trials: u32, seed: u64) -> Result<McUniform> {
    check_params(f64::from(n), k, m)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trial count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = m as usize;
    let mut bits = vec![false; width];
    let mut occupancies = Vec::with_capacity(trials as usize);
    let mut hits = 0u64;
    for _ in 0..trials {
        bits.iter_mut().for_each(|b| *b = false);
        let mut set = 0usize;
        for _ in 0..u64::from(n) * u64::from(k) {
            let pos = rng.gen_range(0..width);
            if !bits[pos] {
                bits[pos] = true;
                set += 1;
            }
        }
        occupancies.push(set as f64 / width as f64);
        // Draw all k probe positions unconditionally so the random stream
        // consumed per trial is fixed.
        let mut pass = true;
        for _ in 0..k {
            if !bits[rng.gen_range(0..width)] {
                pass = false;
            }
        }
        if pass {
            hits += 1;
        }
    }
    Ok(McUniform {
        mean_occupancy: mean(&occupancies),
        fpr: hits as f64 / f64::from(trials),
        trials,
    })
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

/// Empirical measurements over one encoded dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMetrics {
    pub mean_occupancy: f64,
    pub mean_entropy: f64,
    pub empirical_fpr: f64,
    pub fpr_ci_halfwidth: f64,
    pub samples_measured: u64,
}

/// Closed-form statistics for a dataset's (n, k, m) operating point, paired
/// with the measurements backing them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub p1: f64,
    pub collision_rate: f64,
    pub fpr: f64,
    pub compression_ratio: f64,
    pub entropy_bit: f64,
    pub invertibility: f64,
    pub empirical: EmpiricalMetrics,
}

/// Mean number of elements per record.
pub fn mean_element_count(records: &[FeatureRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput("mean element count needs at least one record"));
    }
    let counts: Vec<f64> = records.iter().map(|r| r.element_count() as f64).collect();
    Ok(mean(&counts))
}

/// Mean raw (pre-encoding) size in bits per record.
pub fn mean_raw_bits(records: &[FeatureRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput("mean raw size needs at least one record"));
    }
    let bits: Vec<f64> = records.iter().map(|r| r.raw_size_bits() as f64).collect();
    Ok(mean(&bits))
}

fn report_from_parts(
    config: &EncodingConfig,
    encoded: &[BloomVector],
    member_sets: &[FeatureRecord],
    n: f64,
    raw_bits_per_sample: f64,
    probes: usize,
    seed: u64,
) -> Result<MetricsReport> {
    let m = config.m();
    let k = config.k();
    let p1 = theoretical_occupancy(n, k, m)?;
    let fpr_est = empirical_fpr(config, encoded, member_sets, probes, seed)?;
    Ok(MetricsReport {
        p1,
        collision_rate: collision_rate(n, k, m)?,
        fpr: theoretical_fpr(n, k, m)?,
        compression_ratio: raw_bits_per_sample / f64::from(m),
        entropy_bit: entropy_per_bit(p1)?,
        invertibility: invertibility_prob(p1, k)?,
        empirical: EmpiricalMetrics {
            mean_occupancy: empirical_occupancy(encoded)?,
            mean_entropy: empirical_entropy(encoded)?,
            empirical_fpr: fpr_est.rate,
            fpr_ci_halfwidth: fpr_est.ci_halfwidth,
            samples_measured: encoded.len() as u64,
        },
    })
}

/// Full report using the original records for exact per-sample element counts
/// and raw sizes. `encoded` must be the encoding of `records` in order.
pub fn compute_report(
    config: &EncodingConfig,
    encoded: &[BloomVector],
    records: &[FeatureRecord],
    probes: usize,
    seed: u64,
) -> Result<MetricsReport> {
    if encoded.len() != records.len() {
        return Err(Error::DimensionMismatch {
            expected: records.len(),
            got: encoded.len(),
            what: "encoded filters for records",
        });
    }
    let n = mean_element_count(records)?;
    let raw = mean_raw_bits(records)?;
    report_from_parts(config, encoded, records, n, raw, probes, seed)
}

/// Report from encoded filters alone. The element count is inverted from the
/// observed occupancy (`n̂ = −(m/k)·ln(1−occupancy)`), and raw size is
/// approximated as `n̂·s_bits`; both are estimates, flagged as such by this
/// entry point's name.
pub fn compute_report_estimated(
    config: &EncodingConfig,
    encoded: &[BloomVector],
    s_bits: u32,
    probes: usize,
    seed: u64,
) -> Result<MetricsReport> {
    let occ = empirical_occupancy(encoded)?;
    if occ >= 1.0 {
        return Err(Error::Undefined(
            "cannot invert element count from a fully saturated filter".into(),
        ));
    }
    let m = config.m();
    let k = config.k();
    let n_hat = -(f64::from(m) / f64::from(k)) * (1.0 - occ).ln();
    let n_hat = n_hat.max(f64::MIN_POSITIVE);
    let raw = n_hat * f64::from(s_bits);
    report_from_parts(config, encoded, &[], n_hat, raw, probes, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloom::{encode_dataset, encode_record};
    use rand::RngCore;

    const KEY: &[u8] = b"0123456789abcdef";

    fn cfg(m: u32, k: u16) -> EncodingConfig {
        EncodingConfig::new(m, k, KEY, 1).unwrap()
    }

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn occupancy_closed_form() {
        approx(theoretical_occupancy(0.0, 4, 100).unwrap(), 0.0, 0.0);
        approx(theoretical_occupancy(10.0, 4, 100).unwrap(), 0.329_679_953_964_361, 1e-12);
        // Saturation limit.
        assert!(theoretical_occupancy(1e9, 8, 64).unwrap() > 0.999_999);
        assert!(theoretical_occupancy(-1.0, 4, 100).is_err());
        assert!(theoretical_occupancy(f64::NAN, 4, 100).is_err());
        assert!(theoretical_occupancy(1.0, 0, 100).is_err());
        assert!(theoretical_occupancy(1.0, 4, 0).is_err());
    }

    #[test]
    fn collision_rate_closed_form() {
        approx(collision_rate(10.0, 4, 100).unwrap(), 0.175_800_115_089_098, 1e-12);
        // First write can essentially never collide.
        assert!(collision_rate(1.0, 1, 1_000_000).unwrap() < 1e-6);
        assert!(matches!(collision_rate(0.0, 4, 100), Err(Error::Undefined(_))));
    }

    #[test]
    fn fpr_closed_form() {
        approx(theoretical_fpr(0.0, 4, 100).unwrap(), 0.0, 0.0);
        approx(theoretical_fpr(10.0, 4, 100).unwrap(), 0.329_679_953_964_361f64.powi(4), 1e-15);
        // n chosen so occupancy is exactly 1/2: fpr = 0.5^k.
        let n = f64::from(64u32) * std::f64::consts::LN_2 / 3.0;
        approx(theoretical_fpr(n, 3, 64).unwrap(), 0.125, 1e-12);
    }

    #[test]
    fn compression_ratio_closed_form() {
        approx(compression_ratio(100.0, 8, 200).unwrap(), 4.0, 0.0);
        approx(compression_ratio(25.0, 8, 200).unwrap(), 1.0, 0.0);
        // The series benchmark operating point is exactly 4x.
        assert_eq!(compression_ratio(96.0, 24, 576).unwrap(), 4.0);
        assert!(compression_ratio(0.0, 8, 200).is_err());
        assert!(compression_ratio(10.0, 0, 200).is_err());
    }

    #[test]
    fn entropy_closed_form() {
        assert_eq!(entropy_per_bit(0.5).unwrap(), 1.0);
        assert_eq!(entropy_per_bit(0.0).unwrap(), 0.0);
        assert_eq!(entropy_per_bit(1.0).unwrap(), 0.0);
        approx(entropy_per_bit(0.13).unwrap(), 0.557, 5e-4);
        assert!(entropy_per_bit(-0.01).is_err());
        assert!(entropy_per_bit(1.01).is_err());
    }

    #[test]
    fn entropy_symmetry_and_maximum() {
        for i in 0..=100 {
            let p = f64::from(i) / 100.0;
            let h = entropy_per_bit(p).unwrap();
            let h_mirror = entropy_per_bit(1.0 - p).unwrap();
            approx(h, h_mirror, 1e-12);
            if (p - 0.5).abs() > 1e-9 {
                assert!(h < 1.0, "entropy must be maximal only at 1/2");
            }
        }
    }

    #[test]
    fn invertibility_closed_form() {
        assert_eq!(invertibility_prob(0.0, 3).unwrap(), 1.0);
        assert_eq!(invertibility_prob(1.0, 3).unwrap(), 0.0);
        approx(invertibility_prob(0.5, 4).unwrap(), 0.0625, 1e-15);
        assert!(invertibility_prob(0.5, 0).is_err());
    }

    #[test]
    fn invertibility_strictly_decreasing() {
        let mut prev = invertibility_prob(0.05, 2).unwrap();
        for i in 2..20 {
            let p = f64::from(i) * 0.05;
            let cur = invertibility_prob(p, 2).unwrap();
            assert!(cur < prev);
            prev = cur;
        }
        for k in 1u16..8 {
            assert!(
                invertibility_prob(0.3, k + 1).unwrap() < invertibility_prob(0.3, k).unwrap()
            );
        }
    }

    #[test]
    fn proportionality_chain_in_n() {
        for &k in &[1u16, 2, 4, 8] {
            for &m in &[64u32, 256, 1024] {
                let mut prev_occ = f64::NEG_INFINITY;
                let mut prev_col = f64::NEG_INFINITY;
                let mut prev_fpr = f64::NEG_INFINITY;
                for &n in &[1.0f64, 10.0, 100.0] {
                    let occ = theoretical_occupancy(n, k, m).unwrap();
                    let col = collision_rate(n, k, m).unwrap();
                    let fpr = theoretical_fpr(n, k, m).unwrap();
                    assert!(occ >= prev_occ && col >= prev_col && fpr >= prev_fpr);
                    prev_occ = occ;
                    prev_col = col;
                    prev_fpr = fpr;
                }
            }
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_benign_data() {
        let xs: Vec<f64> = (0..1000).map(|i| f64::from(i) * 0.25).collect();
        let naive: f64 = xs.iter().sum();
        approx(pairwise_sum(&xs), naive, 1e-6);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
    }

    #[test]
    fn empirical_occupancy_basics() {
        let zeros = vec![BloomVector::empty(64, None); 3];
        assert_eq!(empirical_occupancy(&zeros).unwrap(), 0.0);

        let mut half = BloomVector::empty(64, None);
        for j in 0..32 {
            half.set(j);
        }
        assert_eq!(empirical_occupancy(&[half]).unwrap(), 0.5);

        assert!(empirical_occupancy(&[]).is_err());
        let mixed = vec![BloomVector::empty(64, None), BloomVector::empty(128, None)];
        assert!(matches!(empirical_occupancy(&mixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn empirical_entropy_of_half_full_filter_is_one() {
        let mut half = BloomVector::empty(64, None);
        for j in 0..32 {
            half.set(j);
        }
        assert_eq!(empirical_entropy(&[half]).unwrap(), 1.0);
        let zeros = vec![BloomVector::empty(64, None)];
        assert_eq!(empirical_entropy(&zeros).unwrap(), 0.0);
    }

    fn random_records(count: usize, n: usize, seed: u64) -> Vec<FeatureRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let feats = (0..n)
                    .map(|j| (format!("f{j}"), format!("{:016x}", rng.next_u64())))
                    .collect();
                FeatureRecord::new(feats, None, 8 * n as u64).unwrap()
            })
            .collect()
    }

    #[test]
    fn empirical_occupancy_converges_to_closed_form() {
        let config = cfg(100, 4);
        let records = random_records(2000, 10, 11);
        let encoded = encode_dataset(&config, &records).unwrap();
        let occ = empirical_occupancy(&encoded).unwrap();
        approx(occ, theoretical_occupancy(10.0, 4, 100).unwrap(), 0.01);
    }

    #[test]
    fn empirical_fpr_agrees_with_closed_form_on_random_data() {
        let config = cfg(256, 4);
        let records = random_records(500, 10, 17);
        let encoded = encode_dataset(&config, &records).unwrap();
        let est = empirical_fpr(&config, &encoded, &records, 10_000, 23).unwrap();
        let theory = theoretical_fpr(10.0, 4, 256).unwrap();
        let halfwidth = Z_95 * (theory * (1.0 - theory) / 10_000.0).sqrt();
        assert!(
            (est.rate - theory).abs() <= halfwidth + 0.003,
            "empirical {} vs theoretical {theory} (ci {halfwidth})",
            est.rate
        );
        assert_eq!(est.probes, 10_000);
    }

    #[test]
    fn empirical_fpr_reproducible_and_validated() {
        let config = cfg(128, 2);
        let records = random_records(50, 5, 3);
        let encoded = encode_dataset(&config, &records).unwrap();
        let a = empirical_fpr(&config, &encoded, &records, 500, 7).unwrap();
        let b = empirical_fpr(&config, &encoded, &records, 500, 7).unwrap();
        assert_eq!(a, b);
        assert!(empirical_fpr(&config, &encoded, &records, 99, 7).is_err());

        // Zero filters can never produce a false positive.
        let zeros = vec![BloomVector::empty(128, None); 4];
        let z = empirical_fpr(&config, &zeros, &[], 500, 7).unwrap();
        assert_eq!(z.rate, 0.0);
        assert_eq!(z.ci_halfwidth, 0.0);
    }

    #[test]
    fn empirical_fpr_detects_member_overlap() {
        let config = cfg(128, 2);
        // Plant a member that matches the first probe the seeded stream emits.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let planted = format!("{:016x}", rng.gen::<u64>());
        let record = FeatureRecord::new(
            vec![("probe_q".into(), planted)],
            None,
            8,
        )
        .unwrap();
        let encoded = vec![encode_record(&config, &record).unwrap()];
        let err = empirical_fpr(&config, &encoded, &[record], 200, 99);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn inserted_elements_always_pass_membership_control() {
        let config = cfg(256, 8);
        let records = random_records(100, 6, 41);
        let encoded = encode_dataset(&config, &records).unwrap();
        for (record, bv) in records.iter().zip(&encoded) {
            for (name, value) in record.features() {
                assert!(contains(&config, bv, name, value).unwrap());
            }
        }
    }

    #[test]
    fn report_exact_path_fields() {
        let config = cfg(576, 1);
        // 96 elements of 24 bits each: the 4x compression operating point.
        let records: Vec<FeatureRecord> = (0..50)
            .map(|s| {
                let feats = (0..96).map(|t| (format!("t{t}"), format!("{}", (s * 7 + t * 13) % 32))).collect();
                FeatureRecord::new(feats, None, 96 * 24).unwrap()
            })
            .collect();
        let encoded = encode_dataset(&config, &records).unwrap();
        let report = compute_report(&config, &encoded, &records, 1000, 5).unwrap();
        assert_eq!(report.compression_ratio, 4.0);
        approx(report.p1, theoretical_occupancy(96.0, 1, 576).unwrap(), 1e-15);
        assert_eq!(report.empirical.samples_measured, 50);
        assert!(report.empirical.mean_occupancy > 0.0 && report.empirical.mean_occupancy < 1.0);
    }

    #[test]
    fn report_estimated_path_inverts_occupancy() {
        let config = cfg(1024, 4);
        let records = random_records(400, 20, 29);
        let encoded = encode_dataset(&config, &records).unwrap();
        let report = compute_report_estimated(&config, &encoded, 8, 1000, 5).unwrap();
        // The inverted element count should sit near the true n = 20, so the
        // derived theoretical occupancy must track the empirical one closely.
        approx(report.p1, report.empirical.mean_occupancy, 0.01);
        let n_hat = -(1024.0 / 4.0) * (1.0 - report.empirical.mean_occupancy).ln();
        approx(report.compression_ratio, n_hat * 8.0 / 1024.0, 1e-12);
    }

    #[test]
    fn report_serializes_with_fixed_field_names() {
        let config = cfg(128, 2);
        let records = random_records(20, 5, 13);
        let encoded = encode_dataset(&config, &records).unwrap();
        let report = compute_report(&config, &encoded, &records, 200, 3).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        let obj = json.as_object().unwrap();
        for key in [
            "p1",
            "collision_rate",
            "fpr",
            "compression_ratio",
            "entropy_bit",
            "invertibility",
            "empirical",
        ] {
            assert!(obj.contains_key(key), "missing field {key}");
        }
        let emp = obj["empirical"].as_object().unwrap();
        for key in [
            "mean_occupancy",
            "mean_entropy",
            "empirical_fpr",
            "fpr_ci_halfwidth",
            "samples_measured",
        ] {
            assert!(emp.contains_key(key), "missing empirical field {key}");
        }
        let back: MetricsReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn report_rejects_mismatched_lengths() {
        let config = cfg(128, 2);
        let records = random_records(5, 4, 1);
        let encoded = encode_dataset(&config, &records).unwrap();
        assert!(compute_report(&config, &encoded[..4], &records, 200, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_and_tracks_theory() {
        let a = monte_carlo_uniform(1024, 2, 100, 2000, 9).unwrap();
        let b = monte_carlo_uniform(1024, 2, 100, 2000, 9).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_uniform(1024, 2, 100, 2000, 10).unwrap();
        assert_ne!(a, c);

        let p1 = theoretical_occupancy(100.0, 2, 1024).unwrap();
        let fpr = theoretical_fpr(100.0, 2, 1024).unwrap();
        assert!((a.mean_occupancy - p1).abs() < 0.005, "occ {} vs {p1}", a.mean_occupancy);
        // Generous 4-sigma bound: this test checks the simulator wiring, not
        // the tolerance policy.
        let sigma = (fpr * (1.0 - fpr) / 2000.0).sqrt();
        assert!((a.fpr - fpr).abs() < 4.0 * sigma, "fpr {} vs {fpr}", a.fpr);
    }

    #[test]
    fn monte_carlo_extremes() {
        // Saturated filter: every bit set, every probe passes.
        let full = monte_carlo_uniform(8, 8, 100, 200, 3).unwrap();
        assert!(full.mean_occupancy > 0.999);
        assert_eq!(full.fpr, 1.0);
        // Nearly empty filter: probes almost never pass.
        let sparse = monte_carlo_uniform(4096, 1, 1, 200, 3).unwrap();
        assert!(sparse.mean_occupancy < 0.001);
        assert_eq!(sparse.fpr, 0.0);
        assert!(monte_carlo_uniform(64, 1, 1, 0, 0).is_err());
    }
}
