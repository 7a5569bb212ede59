//! RSS vectors and amplitude encoding.
//!
//! Raw dBm measurements are shifted into nonnegative values, normalized to
//! unit Euclidean norm, and loaded into a data register through a binary
//! tree of controlled rotations: one rotation per tree node, M-1 nodes for
//! an M-entry vector, angles taken from conditional subtree masses. The
//! loaded amplitudes equal the vector entries exactly because every entry
//! is nonnegative.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::{Control, GateOp};

/// Processing stage of an RSS vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Raw dBm readings; missing entries are stored as NaN.
    Raw,
    /// Nonnegative, dimensionless values.
    Preprocessed,
    /// Unit Euclidean norm, all entries nonnegative.
    Normalized,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Preprocessed => "preprocessed",
            Stage::Normalized => "normalized",
        }
    }
}

/// An RSS measurement vector tagged with its processing stage.
#[derive(Debug, Clone, PartialEq)]
pub struct RssVector {
    values: Vec<f64>,
    stage: Stage,
}

impl RssVector {
    /// Raw dBm readings; use NaN for reference points that were not heard.
    pub fn raw(values: Vec<f64>) -> Self {
        RssVector {
            values,
            stage: Stage::Raw,
        }
    }

    pub fn raw_with_missing(values: Vec<Option<f64>>) -> Self {
        RssVector {
            values: values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
            stage: Stage::Raw,
        }
    }

    /// Wrap already-preprocessed (finite, nonnegative) values.
    pub fn preprocessed(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidRssValue);
        }
        Ok(RssVector {
            values,
            stage: Stage::Preprocessed,
        })
    }

    /// Wrap an already-unit vector; the norm must be 1 within 1e-9.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidRssValue);
        }
        let norm_sqr: f64 = values.iter().map(|v| v * v).sum();
        if libm::fabs(norm_sqr - 1.0) > 1e-9 {
            return Err(Error::NotUnit { norm_sqr });
        }
        Ok(RssVector {
            values,
            stage: Stage::Normalized,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How raw dBm readings map to nonnegative encoder inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreprocessPolicy {
    /// value - floor, in dB above the floor.
    #[default]
    MinShift,
    /// 10^(value/10) scaled by 10^(-floor/10): linear power relative to the
    /// floor power.
    LinearPower,
}

/// Replace missing readings by the floor, clip below-floor readings, and map
/// to nonnegative values under the chosen policy.
pub fn preprocess_rss(
    raw: &RssVector,
    policy: PreprocessPolicy,
    floor_dbm: f64,
) -> Result<RssVector> {
    if raw.stage() != Stage::Raw {
        return Err(Error::WrongStage {
            expected: Stage::Raw.name(),
            found: raw.stage().name(),
        });
    }
    if raw.values().iter().all(|v| v.is_nan()) {
        return Err(Error::EmptyMeasurement);
    }
    let mut out = Vec::with_capacity(raw.len());
    for &v in raw.values() {
        if v.is_infinite() {
            return Err(Error::InvalidRssValue);
        }
        let clipped = if v.is_nan() {
            floor_dbm
        } else {
            v.max(floor_dbm)
        };
        let mapped = match policy {
            PreprocessPolicy::MinShift => clipped - floor_dbm,
            PreprocessPolicy::LinearPower => libm::pow(10.0, (clipped - floor_dbm) / 10.0),
        };
        out.push(mapped);
    }
    Ok(RssVector {
        values: out,
        stage: Stage::Preprocessed,
    })
}

/// Scale to unit Euclidean norm. Direction is preserved exactly.
pub fn normalize(v: &RssVector) -> Result<RssVector> {
    if v.values().iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidRssValue);
    }
    let norm = libm::sqrt(v.values().iter().map(|x| x * x).sum());
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(RssVector {
        values: v.values().iter().map(|x| x / norm).collect(),
        stage: Stage::Normalized,
    })
}

/// Rotation angle loading a two-entry unit vector (a, b) from |0>:
/// theta = 2*arctan(b/a), with a = 0 mapping to theta = pi.
pub fn rotation_angle(v: &RssVector) -> Result<f64> {
    if v.stage() != Stage::Normalized {
        return Err(Error::WrongStage {
            expected: Stage::Normalized.name(),
            found: v.stage().name(),
        });
    }
    if v.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: v.len(),
        });
    }
    let norm_sqr: f64 = v.values().iter().map(|x| x * x).sum();
    if libm::fabs(norm_sqr - 1.0) > 1e-9 {
        return Err(Error::NotUnit { norm_sqr });
    }
    Ok(2.0 * libm::atan2(v.values()[1], v.values()[0]))
}

/// One node of the rotation tree: at `level` t the plan has 2^t branches,
/// each fixing the t most-significant data bits; `branch` is that prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationNode {
    pub level: usize,
    pub branch: usize,
    pub theta: f64,
}

/// A materializable amplitude-loading plan over a data register.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan {
    data_qubits: Vec<usize>,
    extra_controls: Vec<Control>,
    nodes: Vec<RotationNode>,
}

impl EncodingPlan {
    pub fn nodes(&self) -> &[RotationNode] {
        &self.nodes
    }

    pub fn data_qubits(&self) -> &[usize] {
        &self.data_qubits
    }

    /// Gate list realizing the plan; zero-angle nodes are pruned as no-ops.
    pub fn gates(&self) -> Vec<GateOp> {
        let m = self.data_qubits.len();
        let mut gates = Vec::new();
        for node in &self.nodes {
            if node.theta == 0.0 {
                continue;
            }
            let mut controls = self.extra_controls.clone();
            for u in 0..node.level {
                controls.push(Control {
                    qubit: self.data_qubits[m - node.level + u],
                    value: (node.branch >> u) & 1 == 1,
                });
            }
            gates.push(
                GateOp::ry(node.theta, self.data_qubits[m - 1 - node.level])
                    .with_controls(controls),
            );
        }
        gates
    }
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Build the rotation tree loading the unit vector `v` onto `data_qubits`
/// (bit k of the data index lives on `data_qubits[k]`). Vectors shorter
/// than the register's 2^m span are zero-padded; padded leaves produce
/// zero-angle nodes. Every rotation is additionally gated on
/// `extra_controls`.
pub fn build_encoding_plan(
    v: &RssVector,
    data_qubits: &[usize],
    extra_controls: &[Control],
) -> Result<EncodingPlan> {
    if v.stage() != Stage::Normalized {
        return Err(Error::WrongStage {
            expected: Stage::Normalized.name(),
            found: v.stage().name(),
        });
    }
    if v.is_empty() {
        return Err(Error::ZeroNorm);
    }
    let m = if v.len() == 1 { 0 } else { ceil_log2(v.len()) };
    if data_qubits.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: data_qubits.len(),
        });
    }
    let padded = 1usize << m;

    // Subtree masses per level; level t has 2^t entries.
    let mut masses: Vec<Vec<f64>> = vec![Vec::new(); m + 1];
    masses[m] = (0..padded)
        .map(|j| v.values().get(j).map_or(0.0, |x| x * x))
        .collect();
    for t in (0..m).rev() {
        let child = &masses[t + 1];
        masses[t] = (0..1usize << t)
            .map(|b| child[2 * b] + child[2 * b + 1])
            .collect();
    }

    let mut nodes = Vec::with_capacity(padded.saturating_sub(1));
    for t in 0..m {
        for b in 0..1usize << t {
            let total = masses[t][b];
            let theta = if total == 0.0 {
                0.0
            } else {
                2.0 * libm::atan2(
                    libm::sqrt(masses[t + 1][2 * b + 1]),
                    libm::sqrt(masses[t + 1][2 * b]),
                )
            };
            nodes.push(RotationNode {
                level: t,
                branch: b,
                theta,
            });
        }
    }

    Ok(EncodingPlan {
        data_qubits: data_qubits.to_vec(),
        extra_controls: extra_controls.to_vec(),
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;
    use alloc::vec;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn min_shift_maps_dbm_above_floor() {
        let raw = RssVector::raw(vec![-60.0, -80.0]);
        let out = preprocess_rss(&raw, PreprocessPolicy::MinShift, -100.0).unwrap();
        assert_eq!(out.values(), &[40.0, 20.0]);
        assert_eq!(out.stage(), Stage::Preprocessed);
    }

    #[test]
    fn min_shift_sends_floor_to_zero() {
        let raw = RssVector::raw(vec![-100.0, -50.0]);
        let out = preprocess_rss(&raw, PreprocessPolicy::MinShift, -100.0).unwrap();
        assert_eq!(out.values(), &[0.0, 50.0]);
    }

    #[test]
    fn equal_readings_stay_equal_under_both_policies() {
        let raw = RssVector::raw(vec![-30.0, -30.0]);
        for policy in [PreprocessPolicy::MinShift, PreprocessPolicy::LinearPower] {
            let out = preprocess_rss(&raw, policy, -100.0).unwrap();
            assert_eq!(out.values()[0], out.values()[1]);
            assert!(out.values()[0] > 0.0);
        }
    }

    #[test]
    fn linear_power_is_relative_to_floor() {
        let raw = RssVector::raw(vec![-60.0, -80.0]);
        let out = preprocess_rss(&raw, PreprocessPolicy::LinearPower, -100.0).unwrap();
        assert_close(out.values()[0], 1.0e4, 1e-6);
        assert_close(out.values()[1], 1.0e2, 1e-9);
    }

    #[test]
    fn missing_entries_fall_to_the_floor_and_below_floor_clips() {
        let raw = RssVector::raw_with_missing(vec![None, Some(-120.0), Some(-90.0)]);
        let out = preprocess_rss(&raw, PreprocessPolicy::MinShift, -110.0).unwrap();
        assert_eq!(out.values(), &[0.0, 0.0, 20.0]);
    }

    #[test]
    fn all_missing_is_an_empty_measurement() {
        let raw = RssVector::raw(vec![f64::NAN, f64::NAN]);
        assert!(matches!(
            preprocess_rss(&raw, PreprocessPolicy::MinShift, -110.0),
            Err(Error::EmptyMeasurement)
        ));
    }

    #[test]
    fn normalize_three_four() {
        let v = RssVector::preprocessed(vec![3.0, 4.0]).unwrap();
        let n = normalize(&v).unwrap();
        assert_close(n.values()[0], 0.6, 1e-12);
        assert_close(n.values()[1], 0.8, 1e-12);
        assert_eq!(n.stage(), Stage::Normalized);
    }

    #[test]
    fn normalize_keeps_a_nearly_unit_vector() {
        // The worked example's test vector is almost unit already: its norm
        // is 0.99745, so entries move by at most 2.4e-3.
        let v = RssVector::preprocessed(vec![0.43, 0.9]).unwrap();
        let n = normalize(&v).unwrap();
        assert_close(n.values()[0], 0.43, 2.5e-3);
        assert_close(n.values()[1], 0.9, 2.5e-3);
        let norm_sqr: f64 = n.values().iter().map(|x| x * x).sum();
        assert_close(norm_sqr, 1.0, 1e-9);
    }

    #[test]
    fn normalize_rejects_zero_vector() {
        let v = RssVector::preprocessed(vec![0.0, 0.0]).unwrap();
        assert!(matches!(normalize(&v), Err(Error::ZeroNorm)));
    }

    #[test]
    fn golden_rotation_angles_for_the_worked_example() {
        let phi0 = normalize(&RssVector::preprocessed(vec![0.99, 0.14]).unwrap()).unwrap();
        let phi1 = normalize(&RssVector::preprocessed(vec![0.24, 0.97]).unwrap()).unwrap();
        let psi = normalize(&RssVector::preprocessed(vec![0.43, 0.9]).unwrap()).unwrap();
        assert_close(rotation_angle(&phi0).unwrap(), 0.28, 0.01);
        assert_close(rotation_angle(&phi1).unwrap(), 2.66, 0.01);
        // 2*arctan(0.9/0.43); swapping the components would give 0.89 instead.
        assert_close(rotation_angle(&psi).unwrap(), 2.25, 0.01);
    }

    #[test]
    fn zero_first_component_gives_pi() {
        let v = RssVector::unit(vec![0.0, 1.0]).unwrap();
        assert_close(rotation_angle(&v).unwrap(), core::f64::consts::PI, 1e-12);
    }

    #[test]
    fn rotation_angle_rejects_unnormalized_input() {
        let v = RssVector::preprocessed(vec![3.0, 4.0]).unwrap();
        assert!(matches!(rotation_angle(&v), Err(Error::WrongStage { .. })));
    }

    #[test]
    fn two_entry_plan_is_a_single_rotation() {
        let v = normalize(&RssVector::preprocessed(vec![0.99, 0.14]).unwrap()).unwrap();
        let plan = build_encoding_plan(&v, &[0], &[]).unwrap();
        assert_eq!(plan.nodes().len(), 1);
        assert_close(plan.nodes()[0].theta, 0.28, 0.01);
    }

    #[test]
    fn basis_vector_needs_no_rotations() {
        let v = RssVector::unit(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let plan = build_encoding_plan(&v, &[0, 1], &[]).unwrap();
        assert_eq!(plan.nodes().len(), 3);
        assert!(plan.nodes().iter().all(|n| n.theta == 0.0));
        assert!(plan.gates().is_empty());
    }

    #[test]
    fn simulated_plan_reproduces_an_eight_entry_vector() {
        let v = normalize(
            &RssVector::preprocessed(vec![0.3, 1.1, 0.0, 2.4, 0.7, 0.2, 1.9, 0.5]).unwrap(),
        )
        .unwrap();
        let plan = build_encoding_plan(&v, &[0, 1, 2], &[]).unwrap();
        assert_eq!(plan.nodes().len(), 7);
        let mut state = StateVector::new(3).unwrap();
        state.apply_gates(&plan.gates()).unwrap();
        for (j, expected) in v.values().iter().enumerate() {
            assert_close(state.amplitudes()[j].re, *expected, 1e-8);
            assert_close(state.amplitudes()[j].im, 0.0, 1e-12);
        }
    }

    #[test]
    fn zero_padding_contributes_nothing() {
        let v = normalize(&RssVector::preprocessed(vec![1.0, 2.0, 3.0]).unwrap()).unwrap();
        let plan = build_encoding_plan(&v, &[0, 1], &[]).unwrap();
        let mut state = StateVector::new(2).unwrap();
        state.apply_gates(&plan.gates()).unwrap();
        assert!(state.amplitudes()[3].norm_sqr() < 1e-20);
        for (j, expected) in v.values().iter().enumerate() {
            assert_close(state.amplitudes()[j].re, *expected, 1e-8);
        }
    }

    #[test]
    fn extra_controls_gate_the_whole_plan() {
        let v = normalize(&RssVector::preprocessed(vec![1.0, 1.0]).unwrap()).unwrap();
        let plan = build_encoding_plan(&v, &[0], &[Control::positive(1)]).unwrap();
        let mut state = StateVector::new(2).unwrap();
        state.apply_gates(&plan.gates()).unwrap();
        // Control qubit 1 is |0>: nothing happens.
        assert_close(state.amplitudes()[0].re, 1.0, 1e-12);
    }
}
