//! Error type shared by the simulation and localization modules.

use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("requested {requested} qubits exceeds the simulator cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },
    #[error("qubit index {qubit} is out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("invalid gate controls: {reason}")]
    InvalidControls { reason: &'static str },
    #[error("circuit spans {circuit_qubits} qubits but the state has {state_qubits}")]
    WidthMismatch {
        circuit_qubits: usize,
        state_qubits: usize,
    },
    #[error("qubit subset is empty")]
    EmptySubset,
    #[error("amplitude vector length {len} is not a nonzero power of two")]
    BadStateLength { len: usize },
    #[error("state norm^2 is {norm_sqr}, expected 1")]
    StateNotNormalized { norm_sqr: f64 },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("conditioning outcome has zero probability")]
    DegenerateCondition,
    #[error(
        "no shots matched the conditioning outcome (ancilla counts: {zeros} zeros, {ones} ones)"
    )]
    InsufficientShots { zeros: u64, ones: u64 },
    #[error("all RSS entries are missing")]
    EmptyMeasurement,
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
    #[error("RSS values must be finite and nonnegative at this stage")]
    InvalidRssValue,
    #[error("expected an RSS vector at the {expected} stage, found {found}")]
    WrongStage {
        expected: &'static str,
        found: &'static str,
    },
    #[error("vector is not normalized (norm^2 = {norm_sqr})")]
    NotUnit { norm_sqr: f64 },
    #[error("expected a vector of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} must be at least 2, got {value}")]
    DimensionTooSmall { what: &'static str, value: usize },
    #[error("fingerprint has no rows")]
    EmptyFingerprint,
    #[error("fingerprint row count {rows} is not a power of two; the circuit's uniform index superposition requires one")]
    RowCountNotPowerOfTwo { rows: usize },
    #[error("location label {label} does not fit in {bits} location bits")]
    LabelTooWide { label: u32, bits: usize },
    #[error("fingerprint index {value} does not fit in {bits} index bits")]
    IndexTooWide { value: usize, bits: usize },
    #[error("QASM parse error at line {line}: {message}")]
    QasmParse { line: usize, message: String },
    #[error("a gate with {controls} controls needs an idle borrow qubit for QASM export")]
    NoBorrowQubit { controls: usize },
}
