//! Benchmarks for the combination rules; see `benches/`.
