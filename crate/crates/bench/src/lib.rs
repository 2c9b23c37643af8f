//! Criterion benchmarks for the entropy engines live in `benches/`.
