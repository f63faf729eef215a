//! Command-line driver: configuration, the certification pipeline and report
//! serialization.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{ConfigError, Format, RunArgs, RunConfig};
pub use pipeline::{run_certify, Output};
pub use report::{CertificateReport, Verdict};
