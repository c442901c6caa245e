//! Criterion benchmarks for the peakdist workspace live under `benches/`.
