//! End-to-end localization pipeline around `qloc-core`: CSV ingestion,
//! synthetic testbed generation, error-CDF evaluation, shots sweeps, and
//! scaling reports. The `qloc` binary wires these into subcommands.

pub mod error;
pub mod eval;
pub mod io;
pub mod scaling;
pub mod seeds;
pub mod synth;

pub use error::HarnessError;
pub use eval::{evaluate, shots_sweep, CdfPoint, EvalReport, SampleRecord, Summary, SweepRow};
pub use io::{
    fingerprint_from_raw, load_fingerprint, load_tests, tests_from_raw, write_fingerprint_csv,
    write_tests_csv, PreprocessConfig, RawFingerprintRow, RawTestRow, TestSample,
};
pub use scaling::{linear_fit_r2, scaling_report, ScalingConfig, ScalingRow, SIMULATOR_TIME_NOTE};
pub use seeds::derive_seed;
pub use synth::{generate_synthetic_testbed, SyntheticTestbed, TestbedSpec};
