//! Criterion benchmarks for the reflectron kernels; see `benches/kernels.rs`.
