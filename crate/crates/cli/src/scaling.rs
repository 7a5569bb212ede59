//! Scaling and resource report: classical matcher wall time, qubit and gate
//! counts, and statevector simulation time per fingerprint size.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use qloc_core::{
    build_localization_circuit, classical_localize_euclidean, qubit_count, MAX_QUBITS,
};

use crate::error::HarnessError;
use crate::io::{fingerprint_from_raw, tests_from_raw, PreprocessConfig};
use crate::seeds::derive_seed;
use crate::synth::{generate_synthetic_testbed, TestbedSpec};

/// Fixed label attached to every scaling report: statevector simulation is
/// exponential in qubits, so its wall time says nothing about quantum
/// hardware.
pub const SIMULATOR_TIME_NOTE: &str = "simulator wall time measures classical statevector \
simulation and is not representative of quantum hardware running time";

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub seed: u64,
    /// Rows needing more qubits than this skip the simulation timing and
    /// report resources only.
    pub sim_qubit_cap: usize,
    /// Minimum aggregate duration per timing measurement.
    pub min_time_s: f64,
    /// Timing repetitions; the minimum is reported.
    pub repeats: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            seed: 1,
            sim_qubit_cap: 26,
            min_time_s: 0.02,
            repeats: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub locations: usize,
    pub rps: usize,
    pub fingerprint_size: usize,
    pub qubits: usize,
    pub gate_count: usize,
    pub classical_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulator_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Least-squares fit y = slope * x + intercept; returns (slope, intercept,
/// r_squared).
pub fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r2)
}

/// Time `f` with enough iterations to exceed `min_time_s`, repeated, taking
/// the minimum per-call estimate.
fn time_per_call(min_time_s: f64, repeats: usize, mut f: impl FnMut()) -> f64 {
    let mut iters = 1u64;
    loop {
        let start = Instant::now();
        for _ in 0..iters {
            f();
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= min_time_s {
            let mut best = elapsed / iters as f64;
            for _ in 1..repeats {
                let start = Instant::now();
                for _ in 0..iters {
                    f();
                }
                best = best.min(start.elapsed().as_secs_f64() / iters as f64);
            }
            return best;
        }
        iters = iters.saturating_mul(4);
    }
}

/// Per-size resource and timing rows for the given (locations, rps) ladder.
pub fn scaling_report(
    sizes: &[(usize, usize)],
    config: &ScalingConfig,
) -> Result<Vec<ScalingRow>, HarnessError> {
    let prep = PreprocessConfig::default();
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &(locations, rps)) in sizes.iter().enumerate() {
        if !locations.is_power_of_two() || !rps.is_power_of_two() {
            return Err(HarnessError::InvalidArgument(format!(
                "scaling sizes must be powers of two, got {locations}x{rps}"
            )));
        }
        let qubits = qubit_count(locations, rps)?;

        let spec = TestbedSpec {
            num_locations: locations,
            num_rps: rps,
            num_test_samples: 1,
            seed: derive_seed(config.seed, i as u64),
            ..TestbedSpec::default()
        };
        let testbed = generate_synthetic_testbed(&spec)?;
        let fp = fingerprint_from_raw(&testbed.fingerprint_rows, &prep)?;
        let tests = tests_from_raw(&testbed.test_rows, &prep)?;
        let test = &tests[0].rss;

        let classical_time_s = time_per_call(config.min_time_s, config.repeats, || {
            black_box(classical_localize_euclidean(black_box(&fp), black_box(test)).unwrap());
        });

        let circuit = build_localization_circuit(test, &fp)?;
        let gate_count = circuit.gate_count();
        let (simulator_time_s, skipped) = if qubits > MAX_QUBITS {
            (
                None,
                Some(format!(
                    "requires {qubits} qubits, above the simulator cap of {MAX_QUBITS}"
                )),
            )
        } else if qubits > config.sim_qubit_cap {
            (
                None,
                Some(format!(
                    "requires {qubits} qubits, above the configured timing cap of {}",
                    config.sim_qubit_cap
                )),
            )
        } else {
            let start = Instant::now();
            let state = circuit.simulate()?;
            black_box(state);
            (Some(start.elapsed().as_secs_f64()), None)
        };

        rows.push(ScalingRow {
            locations,
            rps,
            fingerprint_size: locations * rps,
            qubits,
            gate_count,
            classical_time_s,
            simulator_time_s,
            skipped,
        });
    }
    Ok(rows)
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut text = String::from(
        "locations,rps,fingerprint_size,qubits,gate_count,classical_time_s,simulator_time_s,skipped\n",
    );
    for r in rows {
        let sim = r
            .simulator_time_s
            .map(|t| t.to_string())
            .unwrap_or_default();
        let skipped = r.skipped.clone().unwrap_or_default();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            r.locations,
            r.rps,
            r.fingerprint_size,
            r.qubits,
            r.gate_count,
            r.classical_time_s,
            sim,
            skipped
        );
    }
    text
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReportJson<'a> {
    pub note: &'static str,
    pub rows: &'a [ScalingRow],
}
