//! Benchmark harness for the heat-trace workbench; see benches/.
