//! Deterministic synthetic datasets for tests, benchmarks, and examples.
//!
//! Every generator emits a CSV plus a matching schema, and downstream code
//! (library tests and the CLI alike) re-parses that CSV through the normal
//! ingestion path. That keeps a single source of truth for how a dataset
//! turns into records, so in-process runs and file-based runs cannot drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Zipf};
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;

use crate::error::Result;
use crate::features::{load_raw_csv_reader, RawDataset};
use crate::ingest::{load_csv_reader, DatasetSchema};
use crate::record::FeatureRecord;

/// A generated dataset: CSV text plus the schema that describes it.
#[derive(Debug, Clone)]
pub struct SynthCsv {
    pub csv: String,
    pub schema_json: String,
}

impl SynthCsv {
    pub fn schema(&self) -> Result<DatasetSchema> {
        DatasetSchema::from_json(&self.schema_json)
    }

    /// Canonicalized records, exactly as the encoder consumes them.
    pub fn records(&self) -> Result<Vec<FeatureRecord>> {
        load_csv_reader(self.csv.as_bytes(), &self.schema()?)
    }

    /// Raw parse for baseline featurization and distance originals.
    pub fn raw(&self) -> Result<RawDataset> {
        load_raw_csv_reader(self.csv.as_bytes(), &self.schema()?)
    }
}

// ---------------------------------------------------------------------------
// Short-message corpus
// ---------------------------------------------------------------------------

pub const SMS_COUNT: usize = 2400;
/// Probability that a generated message is truly promotional.
const SMS_SPAM_FRACTION: f64 = 0.45;
/// Probability that a message's recorded label contradicts its content.
const SMS_LABEL_NOISE: f64 = 0.07;
/// Distinct-token count per message: a rounded normal resampled into range.
const SMS_TOKEN_MEAN: f64 = 8.3;
const SMS_TOKEN_STD: f64 = 2.4;
const SMS_TOKEN_MIN: i64 = 4;
const SMS_TOKEN_MAX: i64 = 13;

/// Hand-written frequent words head each pool; a long generated tail of
/// pseudo-words fills the ranks behind them, so each pool has the
/// heavy-headed rank-frequency profile and large rare-word tail of a real
/// message corpus.
const SPAM_HEAD: &[&str] = &[
    "win", "winner", "free", "prize", "cash", "claim", "urgent", "txt", "reply", "stop",
    "mobile", "offer", "bonus", "credit", "loan", "guaranteed", "award", "selected",
    "congratulations", "voucher", "discount", "cheap", "subscribe", "ringtone", "click",
    "link", "chat", "dating", "entry", "jackpot",
];

const HAM_HEAD: &[&str] = &[
    "hi", "hello", "hey", "good", "morning", "night", "today", "tomorrow", "meet", "meeting",
    "lunch", "dinner", "coffee", "home", "work", "office", "school", "class", "exam", "study",
    "movie", "watch", "game", "play", "train", "bus", "car", "drive", "pick", "leave",
    "arrive", "late", "soon", "wait", "love", "miss", "friend", "family", "mom", "dad",
    "baby", "sleep", "tired", "sick", "happy", "sorry", "thanks", "please", "know", "think",
    "remember", "tell", "talk", "weekend", "party", "birthday",
];

const SHARED_HEAD: &[&str] = &[
    "you", "me", "we", "they", "the", "and", "but", "if", "when", "what", "how", "will",
    "can", "could", "would", "do", "get", "got", "go", "going", "come", "back", "now",
    "then", "here", "there", "time", "day", "week", "new", "call", "text", "send", "number",
    "phone",
];

/// Generated rare words appended behind each head.
const SPAM_TAIL: usize = 250;
const HAM_TAIL: usize = 350;
const SHARED_TAIL: usize = 50;
/// Probability that a pool draw comes from the head rather than the tail.
const SPAM_HEAD_MASS: f64 = 0.62;
const HAM_HEAD_MASS: f64 = 0.62;
const SHARED_HEAD_MASS: f64 = 0.75;
/// Zipf exponent for the rank-frequency law inside each head.
const ZIPF_S: f64 = 1.2;

/// Token-source mixture for truly promotional messages:
/// (own pool, shared pool); the remainder leaks from the other pool.
const SPAM_MIX: (f64, f64) = (0.63, 0.33);
/// Same mixture for ordinary messages.
const HAM_MIX: (f64, f64) = (0.66, 0.32);

/// Deterministic pronounceable pseudo-word; distinct indices give distinct
/// words (two syllables below 6400, three above).
fn syllable_word(idx: usize) -> String {
    const ONSETS: [&str; 16] =
        ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "br"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let syl = |v: usize| format!("{}{}", ONSETS[v % 16], VOWELS[(v / 16) % 5]);
    let mut word = format!("{}{}", syl(idx % 80), syl((idx / 80) % 80));
    if idx >= 80 * 80 {
        word.push_str(&syl(idx / (80 * 80)));
    }
    word
}

#[derive(Clone, Copy)]
enum Pool {
    Spam,
    Ham,
    Shared,
}

/// One vocabulary pool: frequent head words under a Zipf rank-frequency law
/// plus a uniform tail of rare generated words. The split mirrors real
/// corpora, where a few hundred words carry most of the mass and thousands
/// more appear only a handful of times each.
struct WordPool {
    words: Vec<String>,
    head_len: usize,
    head_mass: f64,
    head_ranks: Zipf<f64>,
}

impl WordPool {
    /// `offset` selects a disjoint pseudo-word range per pool so tails never
    /// overlap each other or any head.
    fn new(head: &[&str], tail: usize, offset: usize, head_mass: f64) -> WordPool {
        let mut words: Vec<String> = head.iter().map(|s| (*s).to_string()).collect();
        let mut idx = offset;
        while words.len() < head.len() + tail {
            let word = syllable_word(idx);
            idx += 1;
            if head.iter().all(|h| *h != word) {
                words.push(word);
            }
        }
        WordPool {
            words,
            head_len: head.len(),
            head_mass,
            head_ranks: Zipf::new(head.len() as u64, ZIPF_S).expect("valid zipf"),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &str {
        if rng.gen::<f64>() < self.head_mass {
            let rank = self.head_ranks.sample(rng) as usize - 1;
            &self.words[rank]
        } else {
            let tail_idx = rng.gen_range(self.head_len..self.words.len());
            &self.words[tail_idx]
        }
    }
}

struct WordPools {
    spam: WordPool,
    ham: WordPool,
    shared: WordPool,
}

impl WordPools {
    fn new() -> WordPools {
        WordPools {
            spam: WordPool::new(SPAM_HEAD, SPAM_TAIL, 0, SPAM_HEAD_MASS),
            ham: WordPool::new(HAM_HEAD, HAM_TAIL, 2000, HAM_HEAD_MASS),
            shared: WordPool::new(SHARED_HEAD, SHARED_TAIL, 4000, SHARED_HEAD_MASS),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, which: Pool) -> &str {
        match which {
            Pool::Spam => self.spam.draw(rng),
            Pool::Ham => self.ham.draw(rng),
            Pool::Shared => self.shared.draw(rng),
        }
    }
}

fn draw_token_count(rng: &mut ChaCha8Rng) -> usize {
    let dist = Normal::new(SMS_TOKEN_MEAN, SMS_TOKEN_STD).expect("valid normal");
    loop {
        let n = dist.sample(rng).round() as i64;
        if (SMS_TOKEN_MIN..=SMS_TOKEN_MAX).contains(&n) {
            return n as usize;
        }
    }
}

fn draw_message(rng: &mut ChaCha8Rng, spam: bool, pools: &WordPools) -> String {
    let n = draw_token_count(rng);
    let (own, off) = if spam { (Pool::Spam, Pool::Ham) } else { (Pool::Ham, Pool::Spam) };
    let (own_p, shared_p) = if spam { SPAM_MIX } else { HAM_MIX };
    let mut tokens: BTreeSet<&str> = BTreeSet::new();
    let mut ordered = Vec::with_capacity(n);
    while ordered.len() < n {
        let u: f64 = rng.gen();
        let which = if u < own_p {
            own
        } else if u < own_p + shared_p {
            Pool::Shared
        } else {
            off
        };
        let word = pools.draw(rng, which);
        if tokens.insert(word) {
            ordered.push(word);
        }
    }
    ordered.join(" ")
}

pub fn sms_schema_json() -> String {
    r#"{
  "text": {"kind": "text"},
  "category": {"kind": "label"}
}"#
    .to_string()
}

/// Generates the short-message corpus: `SMS_COUNT` single-column text rows
/// labeled spam/ham, with a small rate of deliberately contradictory labels
/// so that no classifier can reach perfect accuracy.
pub fn sms_csv(seed: u64) -> SynthCsv {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools = WordPools::new();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["text", "category"]).expect("in-memory write");
    for _ in 0..SMS_COUNT {
        let truly_spam = rng.gen_bool(SMS_SPAM_FRACTION);
        let message = draw_message(&mut rng, truly_spam, &pools);
        let flipped = rng.gen_bool(SMS_LABEL_NOISE);
        let label = if truly_spam != flipped { "spam" } else { "ham" };
        writer.write_record([message.as_str(), label]).expect("in-memory write");
    }
    let csv = String::from_utf8(writer.into_inner().expect("flush")).expect("utf8");
    SynthCsv { csv, schema_json: sms_schema_json() }
}

// ---------------------------------------------------------------------------
// Heartbeat series
// ---------------------------------------------------------------------------

pub const EKG_COUNT: usize = 200;
pub const EKG_LEN: usize = 96;
/// Fixed-point width used when sizing the raw series representation.
pub const EKG_ELEMENT_BITS: u32 = 24;
const EKG_NORMAL_PERIOD: (f64, f64) = (11.0, 13.5);
const EKG_FAST_PERIOD: (f64, f64) = (6.0, 8.0);
const EKG_NOISE_STD: f64 = 0.05;

fn gaussian_bump(x: f64, center: f64, sigma: f64) -> f64 {
    let z = (x - center) / sigma;
    (-0.5 * z * z).exp()
}

/// One heartbeat cycle sampled at offset `cycle_pos` (in samples from the
/// start of the cycle): sharp R spike, small S dip, broad T bump, and a
/// low P bump late in the cycle.
fn heartbeat_value(cycle_pos: f64, period: f64, amp: f64) -> f64 {
    let r = amp * gaussian_bump(cycle_pos, 1.2, 0.9);
    let s = -0.30 * gaussian_bump(cycle_pos, 2.4, 0.7);
    let t_wave = 0.32 * gaussian_bump(cycle_pos, 0.38 * period, 2.0);
    let p_wave = 0.18 * gaussian_bump(cycle_pos, period - 2.0, 1.3);
    r + s + t_wave + p_wave
}

pub fn ekg_schema_json() -> String {
    format!(
        r#"{{
  "ecg": {{"kind": "series", "bins": 32, "lower": -1.5, "upper": 1.5, "element_bits": {EKG_ELEMENT_BITS}}},
  "rhythm": {{"kind": "label"}}
}}"#
    )
}

/// Generates the heartbeat dataset: `EKG_COUNT` windows of `EKG_LEN`
/// samples, alternating between ordinary rhythm (period around 12 samples)
/// and a fast rhythm (period around 7), each with random phase, amplitude
/// jitter, and additive noise.
pub fn ekg_csv(seed: u64) -> SynthCsv {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, EKG_NOISE_STD).expect("valid normal");
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["ecg", "rhythm"]).expect("in-memory write");
    for i in 0..EKG_COUNT {
        let fast = i % 2 == 1;
        let (lo, hi) = if fast { EKG_FAST_PERIOD } else { EKG_NORMAL_PERIOD };
        let period = rng.gen_range(lo..hi);
        let phase = rng.gen_range(0.0..period);
        let amp = (1.0 + 0.12 * noise.sample(&mut rng) / EKG_NOISE_STD).max(0.7);
        let mut cells = Vec::with_capacity(EKG_LEN);
        for t in 0..EKG_LEN {
            let cycle_pos = (t as f64 + phase).rem_euclid(period);
            let v = heartbeat_value(cycle_pos, period, amp) + noise.sample(&mut rng);
            cells.push(format!("{:.4}", v.clamp(-1.45, 1.45)));
        }
        let label = if fast { "tachy" } else { "normal" };
        writer
            .write_record([cells.join(";").as_str(), label])
            .expect("in-memory write");
    }
    let csv = String::from_utf8(writer.into_inner().expect("flush")).expect("utf8");
    SynthCsv { csv, schema_json: ekg_schema_json() }
}

// ---------------------------------------------------------------------------
// Two Gaussian blobs
// ---------------------------------------------------------------------------

/// Generates `count` points split between two spherical Gaussian clusters
/// (unit variance per coordinate) whose centers sit `separation` apart in
/// Euclidean distance. Used for distance-preservation checks.
pub fn blobs_csv(count: usize, dims: usize, separation: f64, seed: u64) -> SynthCsv {
    assert!(dims >= 1 && count >= 2, "blobs need at least 2 points and 1 dim");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let offset = separation / (dims as f64).sqrt();

    let mut header: Vec<String> = (0..dims).map(|d| format!("x{d:02}")).collect();
    header.push("blob".to_string());
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).expect("in-memory write");
    for i in 0..count {
        let second = i % 2 == 1;
        let center = if second { offset } else { 0.0 };
        let mut row: Vec<String> = (0..dims)
            .map(|_| format!("{:.6}", center + normal.sample(&mut rng)))
            .collect();
        row.push(if second { "b" } else { "a" }.to_string());
        writer.write_record(&row).expect("in-memory write");
    }
    let csv = String::from_utf8(writer.into_inner().expect("flush")).expect("utf8");

    // Coarse bins on purpose: with fine bins nearly every pair differs in
    // every coordinate and Hamming distance saturates, telling pairs apart
    // no better than a coin flip. A bin width comparable to the typical
    // within-cluster coordinate gap keeps bit differences proportional to
    // distance.
    let mut columns = Map::new();
    for d in 0..dims {
        columns.insert(
            format!("x{d:02}"),
            json!({"kind": "numeric", "bins": 4, "lower": -4.0, "upper": 6.0}),
        );
    }
    columns.insert("blob".to_string(), json!({"kind": "label"}));
    let schema_json =
        serde_json::to_string_pretty(&Value::Object(columns)).expect("schema serializes");
    SynthCsv { csv, schema_json }
}
