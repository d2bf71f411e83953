//! Benchmark-only crate; see `benches/encoding.rs`.
