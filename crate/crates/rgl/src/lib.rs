//! Std companion to `rgl-core`: file formats, configuration, an HTTP
//! generation client, multi-threaded batch drivers, the naive reference
//! kernels and benchmark harness, and the `rgl` command line.

pub mod bench;
pub mod cli;
pub mod config;
pub mod datasets;
pub mod http;
pub mod io;
pub mod naive;
pub mod parallel;
pub mod report;

pub use rgl_core;
