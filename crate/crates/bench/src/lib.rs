//! Criterion benchmarks for the posr-core hot paths; see `benches/`.
