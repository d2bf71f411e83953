//! EBF1: the bit-exact encoded-dataset file format, plus CSV and dense-binary
//! exports for external tools.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic "EBF1"            4 bytes
//! format_version          u16
//! m                       u32
//! k                       u16
//! sample_count            u64
//! label_width             u8      (0 when the dataset is unlabeled)
//! per-sample records      sample_count × (label_width + ceil(m/8)) bytes
//!                         each: label bytes NUL-padded to label_width,
//!                         then the packed filter
//! key fingerprint         8 bytes (first 8 of SHA-256(key); never the key)
//! ```

use serde::{Deserialize, Serialize};

use crate::bloom::BloomVector;
use crate::config::EncodingConfig;
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

pub const EBF_MAGIC: [u8; 4] = *b"EBF1";
/// Fixed bytes before the sample records.
pub const EBF_HEADER_LEN: usize = 21;
/// Fixed trailer: the key fingerprint.
pub const EBF_FINGERPRINT_LEN: usize = 8;

/// Parsed fixed-size header of an EBF1 file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EbfHeader {
    pub format_version: u16,
    pub m: u32,
    pub k: u16,
    pub sample_count: u64,
    pub label_width: u8,
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::BadFormat("file is truncated".into())
    } else {
        Error::Io(e)
    }
}

/// Writes the dataset. Either every vector carries a label or none does;
/// mixing would make rows ambiguous on read.
pub fn write_ebf<W: Write>(
    writer: &mut W,
    config: &EncodingConfig,
    vectors: &[BloomVector],
) -> Result<()> {
    let labeled = vectors.iter().filter(|v| v.label().is_some()).count();
    if labeled != 0 && labeled != vectors.len() {
        return Err(Error::InvalidParameter(format!(
            "{labeled} of {} vectors are labeled; a file must be fully labeled or fully unlabeled",
            vectors.len()
        )));
    }
    let mut label_width = 0u8;
    for v in vectors {
        if v.m() != config.m() {
            return Err(Error::DimensionMismatch {
                expected: config.m() as usize,
                got: v.m() as usize,
                what: "filter width vs config",
            });
        }
        if v.popcount() == 0 {
            return Err(Error::BadFormat("all-zero filter is not a valid encoding".into()));
        }
        if let Some(l) = v.label() {
            label_width = label_width.max(l.len() as u8);
        }
    }
    writer.write_all(&EBF_MAGIC)?;
    writer.write_all(&config.format_version().to_le_bytes())?;
    writer.write_all(&config.m().to_le_bytes())?;
    writer.write_all(&config.k().to_le_bytes())?;
    writer.write_all(&(vectors.len() as u64).to_le_bytes())?;
    writer.write_all(&[label_width])?;
    let mut label_buf = vec![0u8; label_width as usize];
    for v in vectors {
        if label_width > 0 {
            label_buf.fill(0);
            let l = v.label().expect("checked fully labeled");
            label_buf[..l.len()].copy_from_slice(l.as_bytes());
            writer.write_all(&label_buf)?;
        }
        writer.write_all(v.bytes())?;
    }
    writer.write_all(&config.key_fingerprint())?;
    writer.flush()?;
    Ok(())
}

pub fn write_ebf_file(
    path: &Path,
    config: &EncodingConfig,
    vectors: &[BloomVector],
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_ebf(&mut file, config, vectors)
}

/// Reads a dataset, verifying structure and that `key` matches the stored
/// fingerprint.
pub fn read_ebf<R: Read>(reader: &mut R, key: &[u8]) -> Result<(EbfHeader, Vec<BloomVector>)> {
    let mut header_bytes = [0u8; EBF_HEADER_LEN];
    reader.read_exact(&mut header_bytes).map_err(truncated)?;
    if header_bytes[0..4] != EBF_MAGIC {
        return Err(Error::BadFormat("missing EBF1 magic".into()));
    }
    let header = EbfHeader {
        format_version: u16::from_le_bytes(header_bytes[4..6].try_into().unwrap()),
        m: u32::from_le_bytes(header_bytes[6..10].try_into().unwrap()),
        k: u16::from_le_bytes(header_bytes[10..12].try_into().unwrap()),
        sample_count: u64::from_le_bytes(header_bytes[12..20].try_into().unwrap()),
        label_width: header_bytes[20],
    };
    // Validates m and k ranges; also recomputes the expected fingerprint.
    let config = EncodingConfig::new(header.m, header.k, key, header.format_version)?;

    let packed = config.packed_len();
    let mut vectors = Vec::new();
    let mut label_buf = vec![0u8; header.label_width as usize];
    for _ in 0..header.sample_count {
        let label = if header.label_width > 0 {
            reader.read_exact(&mut label_buf).map_err(truncated)?;
            let end = label_buf.iter().position(|&b| b == 0).unwrap_or(label_buf.len());
            if end == 0 {
                return Err(Error::BadFormat("empty label in a labeled file".into()));
            }
            if label_buf[end..].iter().any(|&b| b != 0) {
                return Err(Error::BadFormat("label padding contains non-zero bytes".into()));
            }
            let text = std::str::from_utf8(&label_buf[..end])
                .map_err(|_| Error::BadFormat("label is not valid UTF-8".into()))?;
            Some(text.to_string())
        } else {
            None
        };
        let mut bits = vec![0u8; packed];
        reader.read_exact(&mut bits).map_err(truncated)?;
        vectors.push(BloomVector::from_bytes(bits, header.m, label)?);
    }
    let mut fingerprint = [0u8; EBF_FINGERPRINT_LEN];
    reader.read_exact(&mut fingerprint).map_err(truncated)?;
    let expected = config.key_fingerprint();
    if fingerprint != expected {
        return Err(Error::KeyMismatch { expected: fingerprint, got: expected });
    }
    let mut extra = [0u8; 1];
    match reader.read(&mut extra)? {
        0 => Ok((header, vectors)),
        _ => Err(Error::BadFormat("trailing bytes after fingerprint".into())),
    }
}

pub fn read_ebf_file(path: &Path, key: &[u8]) -> Result<(EbfHeader, Vec<BloomVector>)> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    read_ebf(&mut file, key)
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

/// Writes `b0..b{m-1},label` rows, one per sample; the label cell is empty
/// for unlabeled datasets.
pub fn export_csv<W: Write>(writer: W, vectors: &[BloomVector]) -> Result<()> {
    let m = match vectors.first() {
        Some(v) => v.m(),
        None => return Err(Error::EmptyInput("csv export needs at least one filter")),
    };
    let mut csv_writer = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..m).map(|j| format!("b{j}")).collect();
    header.push("label".to_string());
    csv_writer.write_record(&header)?;
    for v in vectors {
        if v.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m as usize,
                got: v.m() as usize,
                what: "filter widths in export",
            });
        }
        let mut row: Vec<String> =
            v.to_dense().into_iter().map(|b| b.to_string()).collect();
        row.push(v.label().unwrap_or("").to_string());
        csv_writer.write_record(&row)?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Reads a file produced by [`export_csv`] back into filters.
pub fn import_csv<R: Read>(reader: R) -> Result<Vec<BloomVector>> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = csv_reader.headers()?.clone();
    let cols = header.len();
    if cols < 2 || header.iter().last() != Some("label") {
        return Err(Error::BadFormat("expected b0..b{m-1},label header".into()));
    }
    let m = cols - 1;
    for (j, name) in header.iter().take(m).enumerate() {
        if name != format!("b{j}") {
            return Err(Error::BadFormat(format!("bit column {j} is named {name:?}")));
        }
    }
    let mut vectors = Vec::new();
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        if row.len() != cols {
            return Err(Error::ArityMismatch { row: i + 1, expected: cols, got: row.len() });
        }
        let mut dense = Vec::with_capacity(m);
        for cell in row.iter().take(m) {
            match cell {
                "0" => dense.push(0u8),
                "1" => dense.push(1u8),
                other => {
                    return Err(Error::Malformed {
                        row: i + 1,
                        detail: format!("bit cell {other:?} is not 0/1"),
                    })
                }
            }
        }
        let label_cell = row.get(m).unwrap_or("");
        let label = if label_cell.is_empty() { None } else { Some(label_cell.to_string()) };
        vectors.push(
            BloomVector::from_dense(&dense, label)
                .map_err(|e| Error::Malformed { row: i + 1, detail: e.to_string() })?,
        );
    }
    Ok(vectors)
}

// ---------------------------------------------------------------------------
// Dense-binary export
// ---------------------------------------------------------------------------

/// Sidecar header describing a dense-binary export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSidecar {
    pub m: u32,
    pub sample_count: u64,
    /// Per-sample labels, omitted for unlabeled datasets.
    pub labels: Option<Vec<String>>,
}

/// Writes the filters as row-major bytes, one byte per bit (0 or 1), and
/// returns the sidecar that a reader needs to interpret the bytes.
pub fn export_dense<W: Write>(writer: &mut W, vectors: &[BloomVector]) -> Result<DenseSidecar> {
    let m = match vectors.first() {
        Some(v) => v.m(),
        None => return Err(Error::EmptyInput("dense export needs at least one filter")),
    };
    let labeled = vectors.iter().filter(|v| v.label().is_some()).count();
    if labeled != 0 && labeled != vectors.len() {
        return Err(Error::InvalidParameter(
            "a dense export must be fully labeled or fully unlabeled".into(),
        ));
    }
    for v in vectors {
        if v.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m as usize,
                got: v.m() as usize,
                what: "filter widths in export",
            });
        }
        writer.write_all(&v.to_dense())?;
    }
    writer.flush()?;
    let labels = if labeled > 0 {
        Some(vectors.iter().map(|v| v.label().unwrap().to_string()).collect())
    } else {
        None
    };
    Ok(DenseSidecar { m, sample_count: vectors.len() as u64, labels })
}

/// Reads a dense-binary export back using its sidecar.
pub fn read_dense<R: Read>(reader: &mut R, sidecar: &DenseSidecar) -> Result<Vec<BloomVector>> {
    if let Some(labels) = &sidecar.labels {
        if labels.len() as u64 != sidecar.sample_count {
            return Err(Error::DimensionMismatch {
                expected: sidecar.sample_count as usize,
                got: labels.len(),
                what: "sidecar labels",
            });
        }
    }
    let mut vectors = Vec::new();
    let mut dense = vec![0u8; sidecar.m as usize];
    for i in 0..sidecar.sample_count {
        reader.read_exact(&mut dense).map_err(truncated)?;
        let label = sidecar.labels.as_ref().map(|ls| ls[i as usize].clone());
        vectors.push(BloomVector::from_dense(&dense, label)?);
    }
    let mut extra = [0u8; 1];
    match reader.read(&mut extra)? {
        0 => Ok(vectors),
        _ => Err(Error::BadFormat("trailing bytes after last sample".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloom::encode_dataset;
    use crate::record::FeatureRecord;
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const KEY: &[u8] = b"0123456789abcdef";

    fn cfg(m: u32, k: u16) -> EncodingConfig {
        EncodingConfig::new(m, k, KEY, 1).unwrap()
    }

    fn random_dataset(
        rng: &mut ChaCha8Rng,
        count: usize,
        labeled: bool,
    ) -> (EncodingConfig, Vec<BloomVector>) {
        let m = *[24u32, 64, 200, 576].iter().nth(rng.gen_range(0..4)).unwrap();
        let k = *[1u16, 2, 4, 8].iter().nth(rng.gen_range(0..4)).unwrap();
        let config = cfg(m, k);
        let records: Vec<FeatureRecord> = (0..count)
            .map(|i| {
                let n = rng.gen_range(1..=12);
                let feats =
                    (0..n).map(|j| (format!("f{j}"), format!("{:x}", rng.next_u64()))).collect();
                let label = labeled.then(|| format!("class{}", i % 3));
                FeatureRecord::new(feats, label, 8 * n as u64).unwrap()
            })
            .collect();
        let vectors = encode_dataset(&config, &records).unwrap();
        (config, vectors)
    }

    #[test]
    fn header_layout_is_bit_exact() {
        let config = cfg(200, 4);
        let record =
            FeatureRecord::new(vec![("a".into(), "1".into())], Some("x".into()), 8).unwrap();
        let vectors = encode_dataset(&config, &[record]).unwrap();
        let mut buf = Vec::new();
        write_ebf(&mut buf, &config, &vectors).unwrap();
        assert_eq!(&buf[0..4], b"EBF1");
        assert_eq!(u16::from_le_bytes(buf[4..6].try_into().unwrap()), 1); // version
        assert_eq!(u32::from_le_bytes(buf[6..10].try_into().unwrap()), 200); // m
        assert_eq!(u16::from_le_bytes(buf[10..12].try_into().unwrap()), 4); // k
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 1); // count
        assert_eq!(buf[20], 1); // label width
        let expected_len =
            EBF_HEADER_LEN + 1 * (1 + 25) + EBF_FINGERPRINT_LEN;
        assert_eq!(buf.len(), expected_len);
        assert_eq!(&buf[buf.len() - 8..], &config.key_fingerprint());
    }

    #[test]
    fn round_trip_over_random_datasets() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..60 {
            let labeled = trial % 2 == 0;
            let (config, vectors) = random_dataset(&mut rng, 1 + trial % 17, labeled);
            let mut buf = Vec::new();
            write_ebf(&mut buf, &config, &vectors).unwrap();
            let (header, back) = read_ebf(&mut buf.as_slice(), KEY).unwrap();
            assert_eq!(header.m, config.m());
            assert_eq!(header.k, config.k());
            assert_eq!(header.sample_count, vectors.len() as u64);
            assert_eq!(back, vectors);
        }
    }

    #[test]
    fn writes_are_byte_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let (config, vectors) = random_dataset(&mut rng, 20, true);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_ebf(&mut a, &config, &vectors).unwrap();
        write_ebf(&mut b, &config, &vectors).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_key_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let (config, vectors) = random_dataset(&mut rng, 5, false);
        let mut buf = Vec::new();
        write_ebf(&mut buf, &config, &vectors).unwrap();
        assert!(matches!(
            read_ebf(&mut buf.as_slice(), b"fedcba9876543210"),
            Err(Error::KeyMismatch { .. })
        ));
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let (config, vectors) = random_dataset(&mut rng, 5, true);
        let mut buf = Vec::new();
        write_ebf(&mut buf, &config, &vectors).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(matches!(read_ebf(&mut bad_magic.as_slice(), KEY), Err(Error::BadFormat(_))));

        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(read_ebf(&mut &truncated[..], KEY), Err(Error::BadFormat(_))));

        let mut trailing = buf.clone();
        trailing.push(0);
        assert!(matches!(read_ebf(&mut trailing.as_slice(), KEY), Err(Error::BadFormat(_))));
    }

    #[test]
    fn mixed_labels_are_rejected_on_write() {
        let config = cfg(64, 2);
        let a = FeatureRecord::new(vec![("a".into(), "1".into())], Some("x".into()), 8).unwrap();
        let b = FeatureRecord::new(vec![("b".into(), "2".into())], None, 8).unwrap();
        let vectors = encode_dataset(&config, &[a, b]).unwrap();
        let mut buf = Vec::new();
        assert!(write_ebf(&mut buf, &config, &vectors).is_err());
    }

    #[test]
    fn empty_dataset_round_trips() {
        let config = cfg(64, 2);
        let mut buf = Vec::new();
        write_ebf(&mut buf, &config, &[]).unwrap();
        assert_eq!(buf.len(), EBF_HEADER_LEN + EBF_FINGERPRINT_LEN);
        let (header, back) = read_ebf(&mut buf.as_slice(), KEY).unwrap();
        assert_eq!(header.sample_count, 0);
        assert!(back.is_empty());
    }

    #[test]
    fn csv_export_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for trial in 0..20 {
            let (_, vectors) = random_dataset(&mut rng, 1 + trial % 9, trial % 2 == 0);
            let mut buf = Vec::new();
            export_csv(&mut buf, &vectors).unwrap();
            let back = import_csv(buf.as_slice()).unwrap();
            assert_eq!(back, vectors);
        }
    }

    #[test]
    fn csv_export_shape() {
        let config = cfg(24, 2);
        let record =
            FeatureRecord::new(vec![("a".into(), "1".into())], Some("pos".into()), 8).unwrap();
        let vectors = encode_dataset(&config, &[record]).unwrap();
        let mut buf = Vec::new();
        export_csv(&mut buf, &vectors).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines.len(), 2); // header + one sample
        assert!(lines[0].starts_with("b0,b1,"));
        assert!(lines[0].ends_with(",label"));
        assert_eq!(lines[0].split(',').count(), 25);
        assert!(lines[1].ends_with(",pos"));
    }

    #[test]
    fn dense_export_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for trial in 0..20 {
            let (_, vectors) = random_dataset(&mut rng, 1 + trial % 7, trial % 2 == 1);
            let mut buf = Vec::new();
            let sidecar = export_dense(&mut buf, &vectors).unwrap();
            assert_eq!(buf.len(), vectors.len() * vectors[0].m() as usize);
            let back = read_dense(&mut buf.as_slice(), &sidecar).unwrap();
            assert_eq!(back, vectors);
            let json = serde_json::to_string(&sidecar).unwrap();
            let sidecar_back: DenseSidecar = serde_json::from_str(&json).unwrap();
            assert_eq!(sidecar_back, sidecar);
        }
    }

    #[test]
    fn dense_reader_validates_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let (_, vectors) = random_dataset(&mut rng, 4, false);
        let mut buf = Vec::new();
        let sidecar = export_dense(&mut buf, &vectors).unwrap();
        let short = &buf[..buf.len() - 1];
        assert!(read_dense(&mut &short[..], &sidecar).is_err());
        let mut long = buf.clone();
        long.push(1);
        assert!(read_dense(&mut long.as_slice(), &sidecar).is_err());
    }
}
