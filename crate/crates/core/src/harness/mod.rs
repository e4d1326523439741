//! Named experiments, norm series and the verification suite.

pub mod config;
pub mod experiments;
pub mod series;
pub mod suite;

pub use config::{parse_real, ExperimentConfig, ExperimentKind, InitialSpec, RawConfig, WindowSpec};
pub use experiments::{run_case, Artifact, CaseResult, Check, Metric};
pub use series::{
    growth_exponent, line_fit, log_envelope, rotation_check, run_norm_series, Envelope, NormRow, NormSeries,
    RotationReport, RotationRow,
};
pub use suite::{
    config_files, configure_threads, parse_golden, run_config, verify_all, ExperimentReport, GoldenValue, Summary,
    SummaryRow,
};
