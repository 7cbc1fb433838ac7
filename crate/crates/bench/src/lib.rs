//! Criterion benchmarks for the `latvar` enumeration cores; see `benches/`.
