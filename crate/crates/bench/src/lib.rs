//! Criterion benchmarks for the simulator, estimator and optimizer hot paths; see `benches/`.
