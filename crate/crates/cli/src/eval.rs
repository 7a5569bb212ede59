//! Error-CDF evaluation and the shots sweep.
//!
//! Every test sample is matched by both the classical Euclidean baseline and
//! the quantum matcher; localization error is the Euclidean distance in
//! meters between the estimated location's coordinates and the sample's true
//! coordinates. Reports are deterministic for fixed datasets, configuration,
//! and seeds, and are emitted as plot-ready CSV plus a JSON summary.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use qloc_core::{
    build_localization_circuit, classical_localize_euclidean, quantum_localize_prepared,
    Fingerprint, LocalizationConfig, LocationId, RegisterLayout, StateVector,
};

use crate::error::HarnessError;
use crate::io::TestSample;
use crate::seeds::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub true_x_m: f64,
    pub true_y_m: f64,
    pub classical_estimate: u32,
    pub classical_error_m: f64,
    pub quantum_estimate: u32,
    pub quantum_error_m: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfPoint {
    pub error_m: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub classical_median_error_m: f64,
    pub classical_mean_error_m: f64,
    pub quantum_median_error_m: f64,
    pub quantum_mean_error_m: f64,
    pub agreement_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub shots: u64,
    pub median_error_m: f64,
    pub agreement_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: String,
    pub shots: u64,
    pub seed: u64,
    pub samples: Vec<SampleRecord>,
    pub classical_cdf: Vec<CdfPoint>,
    pub quantum_cdf: Vec<CdfPoint>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Vec<crate::scaling::ScalingRow>>,
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

fn cdf_points(errors: &[f64]) -> Vec<CdfPoint> {
    let mut sorted = errors.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &error_m)| CdfPoint {
            error_m,
            fraction: (i + 1) as f64 / n,
        })
        .collect()
}

fn distance_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn coords_of(fp: &Fingerprint, id: LocationId) -> (f64, f64) {
    fp.coords_of(id)
        .expect("estimate names a fingerprint location")
}

/// Simulated circuit output for one test sample, reusable across readout
/// configurations.
struct PreparedSample {
    state: StateVector,
    layout: RegisterLayout,
}

fn prepare(
    fp: &Fingerprint,
    sample: &TestSample,
    index: usize,
) -> Result<PreparedSample, HarnessError> {
    let circuit = build_localization_circuit(&sample.rss, fp)
        .map_err(|e| HarnessError::Sample { index, source: e })?;
    let state = circuit
        .simulate()
        .map_err(|e| HarnessError::Sample { index, source: e })?;
    Ok(PreparedSample {
        state,
        layout: *circuit.layout(),
    })
}

/// Run classical and quantum matchers over every sample and assemble the
/// error CDFs.
pub fn evaluate(
    fp: &Fingerprint,
    tests: &[TestSample],
    config: &LocalizationConfig,
) -> Result<EvalReport, HarnessError> {
    if tests.is_empty() {
        return Err(HarnessError::Schema("empty test set".to_string()));
    }
    if tests[0].rss.len() != fp.rp_count() {
        return Err(HarnessError::Schema(format!(
            "fingerprint has {} reference points but tests have {}",
            fp.rp_count(),
            tests[0].rss.len()
        )));
    }

    let mut samples = Vec::with_capacity(tests.len());
    let mut classical_errors = Vec::with_capacity(tests.len());
    let mut quantum_errors = Vec::with_capacity(tests.len());
    let mut agreements = 0usize;

    for (index, sample) in tests.iter().enumerate() {
        let (classical_estimate, _) = classical_localize_euclidean(fp, &sample.rss)
            .map_err(|e| HarnessError::Sample { index, source: e })?;
        let prepared = prepare(fp, sample, index)?;
        let sample_config = LocalizationConfig {
            seed: derive_seed(config.seed, index as u64),
            ..config.clone()
        };
        let quantum =
            quantum_localize_prepared(&prepared.state, &prepared.layout, fp, &sample_config)
                .map_err(|e| HarnessError::Sample { index, source: e })?;

        let truth = (sample.x_m, sample.y_m);
        let classical_error_m = distance_m(coords_of(fp, classical_estimate), truth);
        let quantum_error_m = distance_m(coords_of(fp, quantum.estimate), truth);
        let agree = classical_estimate == quantum.estimate;
        if agree {
            agreements += 1;
        }
        classical_errors.push(classical_error_m);
        quantum_errors.push(quantum_error_m);
        samples.push(SampleRecord {
            index,
            true_x_m: sample.x_m,
            true_y_m: sample.y_m,
            classical_estimate: classical_estimate.0,
            classical_error_m,
            quantum_estimate: quantum.estimate.0,
            quantum_error_m,
            agree,
        });
    }

    let summary = Summary {
        samples: samples.len(),
        classical_median_error_m: median(&classical_errors),
        classical_mean_error_m: classical_errors.iter().sum::<f64>()
            / classical_errors.len() as f64,
        quantum_median_error_m: median(&quantum_errors),
        quantum_mean_error_m: quantum_errors.iter().sum::<f64>() / quantum_errors.len() as f64,
        agreement_rate: agreements as f64 / samples.len() as f64,
    };

    Ok(EvalReport {
        mode: format!("{:?}", config.mode).to_lowercase(),
        shots: config.shots,
        seed: config.seed,
        samples,
        classical_cdf: cdf_points(&classical_errors),
        quantum_cdf: cdf_points(&quantum_errors),
        summary,
        sweep: None,
        scaling: None,
    })
}

/// Shot-budget sweep: for each K, the median localization error (median
/// across seeds of each seed's median over samples) and the rate at which
/// the sampled argmax agrees with the exact one, pooled over seeds and
/// samples. `shots = 0` rows run the exact readout.
///
/// A sample whose shots all miss the conditioning ancilla outcome (possible
/// at tiny K) yields no estimate: it counts as a disagreement and is left
/// out of that seed's error median.
pub fn shots_sweep(
    fp: &Fingerprint,
    tests: &[TestSample],
    shot_counts: &[u64],
    seeds: &[u64],
    config: &LocalizationConfig,
) -> Result<Vec<SweepRow>, HarnessError> {
    if tests.is_empty() {
        return Err(HarnessError::Schema("empty test set".to_string()));
    }
    if seeds.is_empty() {
        return Err(HarnessError::Schema(
            "sweep needs at least one seed".to_string(),
        ));
    }
    let nonzero: Vec<u64> = shot_counts.iter().copied().filter(|k| *k > 0).collect();
    if nonzero.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidArgument(
            "shot counts must be strictly ascending".to_string(),
        ));
    }

    // One simulation per sample, reused across every (K, seed) cell.
    let mut prepared = Vec::with_capacity(tests.len());
    let mut exact_estimates = Vec::with_capacity(tests.len());
    let mut exact_errors = Vec::with_capacity(tests.len());
    let exact_config = LocalizationConfig {
        shots: 0,
        ..config.clone()
    };
    for (index, sample) in tests.iter().enumerate() {
        let p = prepare(fp, sample, index)?;
        let exact = quantum_localize_prepared(&p.state, &p.layout, fp, &exact_config)
            .map_err(|e| HarnessError::Sample { index, source: e })?;
        exact_errors.push(distance_m(
            coords_of(fp, exact.estimate),
            (sample.x_m, sample.y_m),
        ));
        exact_estimates.push(exact.estimate);
        prepared.push(p);
    }

    let mut rows = Vec::with_capacity(shot_counts.len());
    for &shots in shot_counts {
        if shots == 0 {
            rows.push(SweepRow {
                shots: 0,
                median_error_m: median(&exact_errors),
                agreement_rate: 1.0,
            });
            continue;
        }
        let mut seed_medians = Vec::with_capacity(seeds.len());
        let mut agreements = 0usize;
        for &seed in seeds {
            let mut errors = Vec::with_capacity(tests.len());
            for (index, sample) in tests.iter().enumerate() {
                let sample_config = LocalizationConfig {
                    shots,
                    seed: derive_seed(seed, index as u64),
                    ..config.clone()
                };
                let dist = match quantum_localize_prepared(
                    &prepared[index].state,
                    &prepared[index].layout,
                    fp,
                    &sample_config,
                ) {
                    Ok(dist) => dist,
                    Err(qloc_core::Error::InsufficientShots { .. }) => continue,
                    Err(e) => return Err(HarnessError::Sample { index, source: e }),
                };
                errors.push(distance_m(
                    coords_of(fp, dist.estimate),
                    (sample.x_m, sample.y_m),
                ));
                if dist.estimate == exact_estimates[index] {
                    agreements += 1;
                }
            }
            if errors.is_empty() {
                return Err(HarnessError::Schema(format!(
                    "no sample post-selected any of {shots} shot(s); cannot form a sweep row"
                )));
            }
            seed_medians.push(median(&errors));
        }
        rows.push(SweepRow {
            shots,
            median_error_m: median(&seed_medians),
            agreement_rate: agreements as f64 / (seeds.len() * tests.len()) as f64,
        });
    }
    Ok(rows)
}

pub fn samples_csv(samples: &[SampleRecord]) -> String {
    let mut text = String::from(
        "index,true_x_m,true_y_m,classical_estimate,classical_error_m,quantum_estimate,quantum_error_m,agree\n",
    );
    for s in samples {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            s.index,
            s.true_x_m,
            s.true_y_m,
            s.classical_estimate,
            s.classical_error_m,
            s.quantum_estimate,
            s.quantum_error_m,
            s.agree
        );
    }
    text
}

pub fn cdf_csv(points: &[CdfPoint]) -> String {
    let mut text = String::from("error_m,fraction\n");
    for p in points {
        let _ = writeln!(text, "{},{}", p.error_m, p.fraction);
    }
    text
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut text = String::from("shots,median_error_m,agreement_rate\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{}",
            r.shots, r.median_error_m, r.agreement_rate
        );
    }
    text
}

/// Write the report's tables and summary into a directory.
pub fn write_report(report: &EvalReport, out_dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let write = |name: &str, data: String| -> Result<(), HarnessError> {
        let path = out_dir.join(name);
        std::fs::write(&path, data).map_err(|e| HarnessError::io(&path, e))
    };
    write("samples.csv", samples_csv(&report.samples))?;
    write("cdf_classical.csv", cdf_csv(&report.classical_cdf))?;
    write("cdf_quantum.csv", cdf_csv(&report.quantum_cdf))?;
    if let Some(sweep) = &report.sweep {
        write("sweep.csv", sweep_csv(sweep))?;
    }
    if let Some(scaling) = &report.scaling {
        write("scale.csv", crate::scaling::scaling_csv(scaling))?;
    }
    let summary = serde_json::to_string_pretty(report).expect("serializable report");
    write("report.json", summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[5.0]), 5.0);
    }

    #[test]
    fn cdf_is_nondecreasing_and_ends_at_one() {
        let points = cdf_points(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(points.len(), 4);
        for pair in points.windows(2) {
            assert!(pair[1].error_m >= pair[0].error_m);
            assert!(pair[1].fraction >= pair[0].fraction);
        }
        assert!((points.last().unwrap().fraction - 1.0).abs() < 1e-12);
    }
}
