//! Construction of the localization circuit over the ancilla/index/data/
//! location register layout.
//!
//! Step A puts the ancilla and index registers into uniform superposition;
//! Step B loads the test vector against the ancilla ground state; Step C
//! entangles each fingerprint vector and its location label with its index
//! value through per-index X-sandwich selection; Step D interferes the two
//! ancilla branches with a final Hadamard. Measurement is not part of the
//! circuit: the simulator reads amplitudes, and the QASM exporter appends
//! ancilla and location measurements.

use alloc::vec::Vec;
use core::ops::Range;

use crate::encoding::{build_encoding_plan, RssVector, Stage};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, LocationId};
use crate::state::{Control, GateKind, GateOp, StateVector};

/// Qubit assignment for N = 2^n locations and M = 2^m reference points:
/// ancilla on qubit 0, index on 1..=n, data next, location last, for a
/// total of q = 2n + m + 1 qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    index_bits: usize,
    data_bits: usize,
}

impl RegisterLayout {
    pub fn new(index_bits: usize, data_bits: usize) -> Self {
        RegisterLayout {
            index_bits,
            data_bits,
        }
    }

    /// Layout sized for `num_locations` fingerprint rows and `num_rps`
    /// reference points, rounding each up to the next power of two.
    pub fn for_problem(num_locations: usize, num_rps: usize) -> Result<Self> {
        if num_locations < 2 {
            return Err(Error::DimensionTooSmall {
                what: "fingerprint location count",
                value: num_locations,
            });
        }
        if num_rps < 2 {
            return Err(Error::DimensionTooSmall {
                what: "reference point count",
                value: num_rps,
            });
        }
        Ok(RegisterLayout {
            index_bits: ceil_log2(num_locations),
            data_bits: ceil_log2(num_rps),
        })
    }

    pub fn index_bits(&self) -> usize {
        self.index_bits
    }

    pub fn data_bits(&self) -> usize {
        self.data_bits
    }

    pub fn ancilla(&self) -> usize {
        0
    }

    pub fn index(&self) -> Range<usize> {
        1..1 + self.index_bits
    }

    pub fn data(&self) -> Range<usize> {
        1 + self.index_bits..1 + self.index_bits + self.data_bits
    }

    pub fn location(&self) -> Range<usize> {
        1 + self.index_bits + self.data_bits..self.total_qubits()
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.index_bits + self.data_bits + 1
    }

    fn index_qubits(&self) -> Vec<usize> {
        self.index().collect()
    }

    fn data_qubits(&self) -> Vec<usize> {
        self.data().collect()
    }

    fn location_qubits(&self) -> Vec<usize> {
        self.location().collect()
    }
}

/// Total qubit requirement q = 2*log2(N) + log2(M) + 1, with N and M
/// rounded up to powers of two.
pub fn qubit_count(num_locations: usize, num_rps: usize) -> Result<usize> {
    Ok(RegisterLayout::for_problem(num_locations, num_rps)?.total_qubits())
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Circuit phases, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    A,
    B,
    C,
    D,
}

/// An ordered gate list over a register layout, with step annotations
/// partitioning the gates into phases A through D.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<GateOp>,
    steps: [Range<usize>; 4],
}

impl Circuit {
    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn step_gates(&self, step: Step) -> &[GateOp] {
        &self.gates[self.steps[step as usize].clone()]
    }

    /// All gates up to and including the given step.
    pub fn gates_through(&self, step: Step) -> &[GateOp] {
        &self.gates[..self.steps[step as usize].end]
    }

    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.layout.total_qubits() {
            return Err(Error::WidthMismatch {
                circuit_qubits: self.layout.total_qubits(),
                state_qubits: state.num_qubits(),
            });
        }
        state.apply_gates(&self.gates)
    }

    /// Run the full circuit from |0...0>.
    pub fn simulate(&self) -> Result<StateVector> {
        self.simulate_through(Step::D)
    }

    /// Run the circuit from |0...0> up to and including the given step.
    pub fn simulate_through(&self, step: Step) -> Result<StateVector> {
        let mut state = StateVector::new(self.layout.total_qubits())?;
        state.apply_gates(self.gates_through(step))?;
        Ok(state)
    }
}

/// Gate block entangling fingerprint row `index_value` with its data vector
/// and location label. The index register is selected on `index_value` by
/// an X-sandwich; inside it the data rotations fire only on the excited
/// ancilla branch, while the label is written on both ancilla branches so
/// the location register factors out of the interference.
pub fn build_plus_plus_block(
    index_value: usize,
    phi: &RssVector,
    label: LocationId,
    layout: &RegisterLayout,
) -> Result<Vec<GateOp>> {
    let n = layout.index_bits();
    if index_value >= 1usize << n {
        return Err(Error::IndexTooWide {
            value: index_value,
            bits: n,
        });
    }
    if (label.0 as u64) >= 1u64 << n {
        return Err(Error::LabelTooWide {
            label: label.0,
            bits: n,
        });
    }

    let index_qubits = layout.index_qubits();
    let location_qubits = layout.location_qubits();
    let mut gates = Vec::new();

    let sandwich: Vec<usize> = (0..n)
        .filter(|k| (index_value >> k) & 1 == 0)
        .map(|k| index_qubits[k])
        .collect();
    for &q in &sandwich {
        gates.push(GateOp::x(q));
    }

    // Data first, then location; the two commute under the shared selection.
    let mut rotation_controls = Vec::with_capacity(n + 1);
    rotation_controls.push(Control::positive(layout.ancilla()));
    rotation_controls.extend(index_qubits.iter().map(|&q| Control::positive(q)));
    let plan = build_encoding_plan(phi, &layout.data_qubits(), &rotation_controls)?;
    gates.extend(plan.gates());

    let label_controls: Vec<Control> = index_qubits.iter().map(|&q| Control::positive(q)).collect();
    for (k, &loc_qubit) in location_qubits.iter().enumerate() {
        if (label.0 >> k) & 1 == 1 {
            gates.push(GateOp::x(loc_qubit).with_controls(label_controls.clone()));
        }
    }

    for &q in sandwich.iter().rev() {
        gates.push(GateOp::x(q));
    }
    Ok(gates)
}

/// Build the full localization circuit for a normalized test vector against
/// a fingerprint. The row count must be a power of two: the index register's
/// uniform superposition admits no distortion-free padding rows.
pub fn build_localization_circuit(test: &RssVector, fp: &Fingerprint) -> Result<Circuit> {
    if test.stage() != Stage::Normalized {
        return Err(Error::WrongStage {
            expected: Stage::Normalized.name(),
            found: test.stage().name(),
        });
    }
    if test.len() != fp.rp_count() {
        return Err(Error::DimensionMismatch {
            expected: fp.rp_count(),
            found: test.len(),
        });
    }
    let num_rows = fp.num_rows();
    let layout = RegisterLayout::for_problem(num_rows, fp.rp_count())?;
    if !num_rows.is_power_of_two() {
        return Err(Error::RowCountNotPowerOfTwo { rows: num_rows });
    }
    let n = layout.index_bits();
    for row in fp.rows() {
        if (row.location.0 as u64) >= 1u64 << n {
            return Err(Error::LabelTooWide {
                label: row.location.0,
                bits: n,
            });
        }
    }

    let mut gates = Vec::new();

    // Step A: uniform superposition over the ancilla and index registers.
    gates.push(GateOp::h(layout.ancilla()));
    for q in layout.index() {
        gates.push(GateOp::h(q));
    }
    let step_a = 0..gates.len();

    // Step B: load the test vector on the excited ancilla branch, then flip
    // the ancilla so the test vector ends up on the ground-state branch.
    let psi_plan = build_encoding_plan(
        test,
        &layout.data_qubits(),
        &[Control::positive(layout.ancilla())],
    )?;
    gates.extend(psi_plan.gates());
    gates.push(GateOp::x(layout.ancilla()));
    let step_b = step_a.end..gates.len();

    // Step C: one selection block per fingerprint row.
    for (i, row) in fp.rows().iter().enumerate() {
        gates.extend(build_plus_plus_block(i, &row.rss, row.location, &layout)?);
    }
    let step_c = step_b.end..gates.len();

    // Step D: interfere the two ancilla branches.
    gates.push(GateOp::h(layout.ancilla()));
    let step_d = step_c.end..gates.len();

    Ok(Circuit {
        layout,
        gates,
        steps: [step_a, step_b, step_c, step_d],
    })
}

/// Convenience for tests and tools: count gates of a given kind.
pub fn count_kind(gates: &[GateOp], pred: impl Fn(&GateKind) -> bool) -> usize {
    gates.iter().filter(|g| pred(&g.kind)).count()
}
