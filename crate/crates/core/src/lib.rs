//! Quantum Euclidean-similarity fingerprint localization.
//!
//! The crate matches an online received-signal-strength (RSS) vector against
//! a fingerprint database by loading all vectors as quantum amplitudes,
//! interfering them through an ancilla Hadamard, and reading the location
//! register conditioned on the ancilla outcome. An exact statevector
//! simulator backs the whole path, so the quantum matcher can be checked
//! amplitude-by-amplitude against closed-form probabilities and against the
//! classical Euclidean nearest-neighbor baseline.
//!
//! The crate is `no_std` + `alloc`; everything here is pure computation.
//! File formats, synthetic testbeds, and the CLI live in the companion
//! `qloc-cli` crate.
//!
//! Bit convention used throughout: qubit index 0 is the least-significant
//! bit of the basis-state integer.

#![no_std]

extern crate alloc;

pub mod circuit;
pub mod encoding;
pub mod error;
pub mod fingerprint;
pub mod localize;
pub mod qasm;
pub mod state;

pub use circuit::{
    build_localization_circuit, build_plus_plus_block, count_kind, qubit_count, Circuit,
    RegisterLayout, Step,
};
pub use encoding::{
    build_encoding_plan, normalize, preprocess_rss, rotation_angle, EncodingPlan, PreprocessPolicy,
    RotationNode, RssVector, Stage,
};
pub use error::{Error, Result};
pub use fingerprint::{Fingerprint, FingerprintRow, LocationId};
pub use localize::{
    analytic_distribution, classical_localize_euclidean, mode_duality_check, quantum_localize,
    quantum_localize_prepared, DualityOutcome, LocalizationConfig, LocationDistribution, Mode,
};
pub use qasm::{export_gates_qasm, export_qasm, parse_qasm, MeasureSpec, ParsedProgram};
pub use state::{BitString, Control, GateKind, GateOp, ShotCounts, StateVector, MAX_QUBITS};
