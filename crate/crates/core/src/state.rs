//! Exact complex-amplitude statevector simulation.
//!
//! Qubit index 0 is the least-significant bit of the basis-state integer, so
//! basis state `k` assigns qubit `j` the bit `(k >> j) & 1`. Multi-controlled
//! gates are applied directly by basis-state masking, which keeps control
//! no-ops bit-exact; decomposition into a hardware gate set happens only in
//! the QASM exporter.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Hard cap on register width: 2^28 amplitudes (4 GiB) is the most a desk
/// machine will tolerate.
pub const MAX_QUBITS: usize = 28;

/// Conditioning outcomes below this probability are treated as impossible.
pub(crate) const DEGENERATE_PROBABILITY_FLOOR: f64 = 1e-12;

/// A control terminal: the gate fires only on basis states where `qubit`
/// carries `value`. `value = false` is a negative-polarity control,
/// equivalent to an X-sandwich around a positive control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn positive(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn negative(qubit: usize) -> Self {
        Control {
            qubit,
            value: false,
        }
    }
}

/// Single-qubit unitaries the circuits are made of. `RotationY(theta)` is the
/// real rotation [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]];
/// with theta = 0 it is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    RotationY(f64),
}

/// One gate application: a single-qubit unitary on `target`, gated on an
/// arbitrary list of control terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp {
            kind: GateKind::Hadamard,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Self {
        GateOp {
            kind: GateKind::PauliX,
            target,
            controls: Vec::new(),
        }
    }

    pub fn ry(theta: f64, target: usize) -> Self {
        GateOp {
            kind: GateKind::RotationY(theta),
            target,
            controls: Vec::new(),
        }
    }

    pub fn with_controls(mut self, controls: Vec<Control>) -> Self {
        self.controls = controls;
        self
    }

    pub fn controlled_on(mut self, qubit: usize, value: bool) -> Self {
        self.controls.push(Control { qubit, value });
        self
    }

    /// Largest qubit index the gate touches.
    pub fn max_qubit(&self) -> usize {
        self.controls
            .iter()
            .map(|c| c.qubit)
            .fold(self.target, usize::max)
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: self.target,
                num_qubits,
            });
        }
        for (i, c) in self.controls.iter().enumerate() {
            if c.qubit >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: c.qubit,
                    num_qubits,
                });
            }
            if c.qubit == self.target {
                return Err(Error::InvalidControls {
                    reason: "target qubit appears in the control list",
                });
            }
            if self.controls[..i].iter().any(|d| d.qubit == c.qubit) {
                return Err(Error::InvalidControls {
                    reason: "duplicate control qubit",
                });
            }
        }
        Ok(())
    }

    /// (mask, pattern): the gate fires on basis states where
    /// `state & mask == pattern`.
    fn control_masks(&self) -> (usize, usize) {
        let mut mask = 0usize;
        let mut pattern = 0usize;
        for c in &self.controls {
            mask |= 1 << c.qubit;
            if c.value {
                pattern |= 1 << c.qubit;
            }
        }
        (mask, pattern)
    }

    /// Real 2x2 matrix ((a, b), (c, d)) of the uncontrolled unitary.
    fn matrix(&self) -> (f64, f64, f64, f64) {
        match self.kind {
            GateKind::Hadamard => (FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            GateKind::PauliX => (0.0, 1.0, 1.0, 0.0),
            GateKind::RotationY(theta) => {
                let c = libm::cos(theta / 2.0);
                let s = libm::sin(theta / 2.0);
                (c, -s, s, c)
            }
        }
    }
}

/// Measured-bitstring key over an ordered qubit subset: bit `k` of `value`
/// is the outcome of the k-th qubit in the subset. Displays most-significant
/// bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitString {
    width: usize,
    value: u64,
}

impl BitString {
    pub fn new(value: u64, width: usize) -> Self {
        let masked = if width >= 64 {
            value
        } else {
            value & ((1u64 << width) - 1)
        };
        BitString {
            width,
            value: masked,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bit(&self, k: usize) -> bool {
        (self.value >> k) & 1 == 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (0..self.width).rev() {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Histogram of K measurement shots over a qubit subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    counts: BTreeMap<BitString, u64>,
    total: u64,
}

impl ShotCounts {
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<BitString, u64> {
        &self.counts
    }

    pub fn count_of(&self, value: u64, width: usize) -> u64 {
        self.counts
            .get(&BitString::new(value, width))
            .copied()
            .unwrap_or(0)
    }

    pub fn frequency_of(&self, value: u64, width: usize) -> f64 {
        self.count_of(value, width) as f64 / self.total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &u64)> {
        self.counts.iter()
    }
}

/// The full quantum state: 2^q complex amplitudes over q qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// All-zeros ket |0...0>.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: num_qubits,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wrap a caller-supplied amplitude vector. Length must be a power of
    /// two and the norm must be 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadStateLength { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: num_qubits,
                cap: MAX_QUBITS,
            });
        }
        let state = StateVector { num_qubits, amps };
        let n = state.norm_sqr();
        if libm::fabs(n - 1.0) > 1e-9 {
            return Err(Error::StateNotNormalized { norm_sqr: n });
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply one (possibly multi-controlled) gate in place.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let (a, b, c, d) = gate.matrix();
        let t_mask = 1usize << gate.target;
        let (c_mask, c_pattern) = gate.control_masks();
        for base in 0..self.amps.len() {
            if base & t_mask != 0 || base & c_mask != c_pattern {
                continue;
            }
            let pair = base | t_mask;
            let lo = self.amps[base];
            let hi = self.amps[pair];
            self.amps[base] = lo * a + hi * b;
            self.amps[pair] = lo * c + hi * d;
        }
        Ok(())
    }

    pub fn apply_gates(&mut self, gates: &[GateOp]) -> Result<()> {
        for gate in gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    fn validate_subset(&self, qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::EmptySubset);
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::InvalidControls {
                    reason: "duplicate qubit in subset",
                });
            }
        }
        Ok(())
    }

    /// Exact outcome probabilities for measuring the given qubit subset.
    /// Entry `o` of the table is the probability of the outcome whose bit
    /// `k` is qubit `qubits[k]`.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.validate_subset(qubits)?;
        let mut table = vec![0.0f64; 1usize << qubits.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut outcome = 0usize;
            for (k, &q) in qubits.iter().enumerate() {
                outcome |= ((idx >> q) & 1) << k;
            }
            table[outcome] += p;
        }
        Ok(table)
    }

    /// Probability that `qubit` measures to `value`.
    pub fn probability_of(&self, qubit: usize, value: bool) -> Result<f64> {
        let table = self.marginal_probabilities(&[qubit])?;
        Ok(if value { table[1] } else { table[0] })
    }

    /// Renormalized outcome distribution over `targets` given that
    /// `condition.0` measured to `condition.1`.
    pub fn conditional_distribution(
        &self,
        condition: (usize, bool),
        targets: &[usize],
    ) -> Result<Vec<f64>> {
        let (cond_qubit, cond_value) = condition;
        self.validate_subset(targets)?;
        if cond_qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: cond_qubit,
                num_qubits: self.num_qubits,
            });
        }
        if targets.contains(&cond_qubit) {
            return Err(Error::InvalidControls {
                reason: "conditioning qubit appears in the target subset",
            });
        }
        let want = if cond_value { 1usize } else { 0usize };
        let mut table = vec![0.0f64; 1usize << targets.len()];
        let mut cond_prob = 0.0f64;
        for (idx, amp) in self.amps.iter().enumerate() {
            if (idx >> cond_qubit) & 1 != want {
                continue;
            }
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            cond_prob += p;
            let mut outcome = 0usize;
            for (k, &q) in targets.iter().enumerate() {
                outcome |= ((idx >> q) & 1) << k;
            }
            table[outcome] += p;
        }
        if cond_prob < DEGENERATE_PROBABILITY_FLOOR {
            return Err(Error::DegenerateCondition);
        }
        for entry in &mut table {
            *entry /= cond_prob;
        }
        Ok(table)
    }

    /// Draw `shots` independent measurement outcomes of the qubit subset.
    /// Deterministic for a fixed seed.
    pub fn sample_shots(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<ShotCounts> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.marginal_probabilities(qubits)?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut running = 0.0f64;
        for &p in &probs {
            running += p;
            cumulative.push(running);
        }
        // Guard the tail against rounding so the last bucket always catches.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
        let width = qubits.len();
        for _ in 0..shots {
            let u = uniform_f64(&mut rng);
            let outcome = cumulative.partition_point(|&c| c <= u);
            let outcome = outcome.min(probs.len() - 1);
            *counts
                .entry(BitString::new(outcome as u64, width))
                .or_insert(0) += 1;
        }
        Ok(ShotCounts {
            counts,
            total: shots,
        })
    }
}

/// Uniform draw in [0, 1) from the top 53 bits of a u64.
pub(crate) fn uniform_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn init_single_qubit_is_ground_state() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.amplitudes().len(), 2);
        assert_close(s.amplitudes()[0].re, 1.0, 0.0);
        assert_close(s.amplitudes()[1].norm_sqr(), 0.0, 0.0);
    }

    #[test]
    fn init_three_qubits() {
        let s = StateVector::new(3).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_close(s.amplitudes()[0].re, 1.0, 0.0);
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn init_five_qubits_normalized() {
        let s = StateVector::new(5).unwrap();
        assert_eq!(s.amplitudes().len(), 32);
        assert_close(s.norm_sqr(), 1.0, 1e-12);
    }

    #[test]
    fn init_past_cap_is_a_resource_error() {
        match StateVector::new(MAX_QUBITS + 1) {
            Err(Error::QubitCapExceeded { requested, cap }) => {
                assert_eq!(requested, MAX_QUBITS + 1);
                assert_eq!(cap, MAX_QUBITS);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn hadamard_makes_equal_superposition() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        assert_close(s.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(s.amplitudes()[1].re, FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn rotation_loads_the_worked_example_amplitudes() {
        // The worked example's first fingerprint gate: theta = 2*arctan(0.14/0.99)
        // loads (0.99, 0.14) normalized.
        let theta = 2.0 * libm::atan2(0.14, 0.99);
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&GateOp::ry(theta, 0)).unwrap();
        let norm = libm::sqrt(0.99f64 * 0.99 + 0.14 * 0.14);
        assert_close(s.amplitudes()[0].re, 0.99 / norm, 1e-6);
        assert_close(s.amplitudes()[1].re, 0.14 / norm, 1e-6);
    }

    #[test]
    fn unmet_control_leaves_state_bit_exact() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::h(1)).unwrap();
        let before = s.clone();
        // Control on qubit 0 = 1 never fires: qubit 0 is |0>.
        s.apply_gate(&GateOp::ry(1.234, 1).controlled_on(0, true))
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn negative_control_fires_on_zero() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::x(1).controlled_on(0, false)).unwrap();
        // Qubit 0 is 0, so the X on qubit 1 fires: state |10> (index 2).
        assert_close(s.amplitudes()[2].re, 1.0, 0.0);
    }

    #[test]
    fn gate_validation_rejects_bad_indices() {
        let mut s = StateVector::new(2).unwrap();
        assert!(matches!(
            s.apply_gate(&GateOp::h(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply_gate(&GateOp::x(0).controlled_on(0, true)),
            Err(Error::InvalidControls { .. })
        ));
        assert!(matches!(
            s.apply_gate(&GateOp::x(0).controlled_on(1, true).controlled_on(1, false)),
            Err(Error::InvalidControls { .. })
        ));
    }

    #[test]
    fn marginal_of_plus_state_is_half_half() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        let table = s.marginal_probabilities(&[0]).unwrap();
        assert_close(table[0], 0.5, 1e-12);
        assert_close(table[1], 0.5, 1e-12);
    }

    #[test]
    fn marginal_rejects_empty_subset() {
        let s = StateVector::new(2).unwrap();
        assert!(matches!(
            s.marginal_probabilities(&[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn bell_state_conditional_is_deterministic() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::x(1).controlled_on(0, true)).unwrap();
        let table = s.conditional_distribution((0, true), &[1]).unwrap();
        assert_close(table[0], 0.0, 1e-12);
        assert_close(table[1], 1.0, 1e-12);
    }

    #[test]
    fn conditioning_on_impossible_outcome_is_degenerate() {
        let s = StateVector::new(2).unwrap();
        assert!(matches!(
            s.conditional_distribution((0, true), &[1]),
            Err(Error::DegenerateCondition)
        ));
    }

    #[test]
    fn deterministic_state_sends_all_shots_to_zero() {
        let s = StateVector::new(3).unwrap();
        let counts = s.sample_shots(&[0, 1, 2], 257, 7).unwrap();
        assert_eq!(counts.total(), 257);
        assert_eq!(counts.count_of(0, 3), 257);
    }

    #[test]
    fn same_seed_reproduces_shot_counts() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::h(1)).unwrap();
        let a = s.sample_shots(&[0, 1], 1000, 42).unwrap();
        let b = s.sample_shots(&[0, 1], 1000, 42).unwrap();
        assert_eq!(a, b);
        let c = s.sample_shots(&[0, 1], 1000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shot_frequencies_concentrate_for_almost_all_seeds() {
        // Plus state, K = 32768: each outcome frequency inside [0.49, 0.51]
        // is a 3.6-sigma event, so at most a seed or two in 100 may fall out.
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        let mut ok = 0;
        for seed in 0..100u64 {
            let counts = s.sample_shots(&[0], 32768, seed).unwrap();
            let f0 = counts.frequency_of(0, 1);
            let f1 = counts.frequency_of(1, 1);
            if (0.49..=0.51).contains(&f0) && (0.49..=0.51).contains(&f1) {
                ok += 1;
            }
        }
        assert!(ok >= 99, "only {ok}/100 seeds concentrated");
    }

    #[test]
    fn zero_shots_is_an_error() {
        let s = StateVector::new(1).unwrap();
        assert!(matches!(s.sample_shots(&[0], 0, 0), Err(Error::ZeroShots)));
    }

    #[test]
    fn bitstring_displays_msb_first() {
        let b = BitString::new(0b011, 4);
        assert_eq!(alloc::format!("{b}"), "0011");
    }

    #[test]
    fn from_amplitudes_validates_norm_and_length() {
        let bad_len = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(
            StateVector::from_amplitudes(bad_len),
            Err(Error::BadStateLength { len: 3 })
        ));
        let bad_norm = vec![Complex64::new(0.5, 0.0); 2];
        assert!(matches!(
            StateVector::from_amplitudes(bad_norm),
            Err(Error::StateNotNormalized { .. })
        ));
        let ok = vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ];
        assert!(StateVector::from_amplitudes(ok).is_ok());
    }
}
