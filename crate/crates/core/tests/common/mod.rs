//! Shared helpers for the integration tests: seeded random instances and
//! the closed-form state oracles the circuit is checked against.

#![allow(dead_code)]

use num_complex::Complex64;
use qloc_core::{Fingerprint, FingerprintRow, LocationId, RegisterLayout, RssVector, StateVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Strictly positive unit vector, bounded away from zero so random
/// instances stay tie-free.
pub fn random_unit_rss(rng: &mut ChaCha8Rng, len: usize) -> RssVector {
    let values: Vec<f64> = (0..len).map(|_| 0.05 + uniform(rng)).collect();
    qloc_core::normalize(&RssVector::preprocessed(values).unwrap()).unwrap()
}

/// Random normalized complex state over `num_qubits` qubits.
pub fn random_state(rng: &mut ChaCha8Rng, num_qubits: usize) -> StateVector {
    let dim = 1usize << num_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(uniform(rng) - 0.5, uniform(rng) - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

/// One row per location on a line, ids 0..rows.
pub fn random_fingerprint(rng: &mut ChaCha8Rng, rows: usize, rps: usize) -> Fingerprint {
    let rows: Vec<FingerprintRow> = (0..rows)
        .map(|i| FingerprintRow {
            location: LocationId(i as u32),
            x_m: 10.0 * i as f64,
            y_m: uniform(rng),
            rss: random_unit_rss(rng, rps),
        })
        .collect();
    Fingerprint::new(rows).unwrap()
}

fn basis_index(
    layout: &RegisterLayout,
    ancilla: usize,
    index: usize,
    data: usize,
    label: u32,
) -> usize {
    let n = layout.index_bits();
    let m = layout.data_bits();
    ancilla | (index << 1) | (data << (1 + n)) | ((label as usize) << (1 + n + m))
}

fn padded(values: &[f64], len: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    out.resize(len, 0.0);
    out
}

/// State after the preparation phase, assembled directly from the definition:
/// amplitude psi_j / sqrt(2N) on (a=0, i, j, l_i) and phi_ij / sqrt(2N) on
/// (a=1, i, j, l_i), zero elsewhere.
pub fn prepared_state_oracle(test: &RssVector, fp: &Fingerprint) -> Vec<Complex64> {
    let layout = RegisterLayout::for_problem(fp.num_rows(), fp.rp_count()).unwrap();
    let m_dim = 1usize << layout.data_bits();
    let n_rows = fp.num_rows();
    let psi = padded(test.values(), m_dim);
    let scale = 1.0 / (2.0 * n_rows as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.total_qubits()];
    for (i, row) in fp.rows().iter().enumerate() {
        let phi = padded(row.rss.values(), m_dim);
        for j in 0..m_dim {
            amps[basis_index(&layout, 0, i, j, row.location.0)] =
                Complex64::new(scale * psi[j], 0.0);
            amps[basis_index(&layout, 1, i, j, row.location.0)] =
                Complex64::new(scale * phi[j], 0.0);
        }
    }
    amps
}

/// State after the interfering Hadamard: (psi_j + phi_ij) / (2 sqrt(N)) on
/// the ancilla-0 branch and (psi_j - phi_ij) / (2 sqrt(N)) on the ancilla-1
/// branch.
pub fn interfered_state_oracle(test: &RssVector, fp: &Fingerprint) -> Vec<Complex64> {
    let layout = RegisterLayout::for_problem(fp.num_rows(), fp.rp_count()).unwrap();
    let m_dim = 1usize << layout.data_bits();
    let n_rows = fp.num_rows();
    let psi = padded(test.values(), m_dim);
    let scale = 1.0 / (2.0 * (n_rows as f64).sqrt());
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.total_qubits()];
    for (i, row) in fp.rows().iter().enumerate() {
        let phi = padded(row.rss.values(), m_dim);
        for j in 0..m_dim {
            amps[basis_index(&layout, 0, i, j, row.location.0)] =
                Complex64::new(scale * (psi[j] + phi[j]), 0.0);
            amps[basis_index(&layout, 1, i, j, row.location.0)] =
                Complex64::new(scale * (psi[j] - phi[j]), 0.0);
        }
    }
    amps
}

pub fn max_amplitude_error(state: &StateVector, oracle: &[Complex64]) -> f64 {
    assert_eq!(state.amplitudes().len(), oracle.len());
    state
        .amplitudes()
        .iter()
        .zip(oracle)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// The worked two-location, two-reference-point instance.
pub fn worked_example() -> (Fingerprint, RssVector) {
    let unit =
        |values: Vec<f64>| qloc_core::normalize(&RssVector::preprocessed(values).unwrap()).unwrap();
    let fp = Fingerprint::new(vec![
        FingerprintRow {
            location: LocationId(0),
            x_m: 0.0,
            y_m: 0.0,
            rss: unit(vec![0.99, 0.14]),
        },
        FingerprintRow {
            location: LocationId(1),
            x_m: 10.0,
            y_m: 0.0,
            rss: unit(vec![0.24, 0.97]),
        },
    ])
    .unwrap();
    (fp, unit(vec![0.43, 0.9]))
}
