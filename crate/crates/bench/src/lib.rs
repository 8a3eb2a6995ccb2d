//! Criterion benchmarks for the vertex engine and the verification suites;
//! run with `cargo bench -p vltau-bench`.
