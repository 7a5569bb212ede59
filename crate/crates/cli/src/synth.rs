//! Synthetic testbed generation: grid fingerprint locations, random
//! reference-point placement, and log-distance path-loss RSS with Gaussian
//! shadowing. A stand-in for survey data; every draw is seeded.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::HarnessError;
use crate::io::{RawFingerprintRow, RawTestRow};
use crate::seeds::{normal, uniform};

/// Parameters of the generated area. Readings follow
/// `RSS(d) = tx_power - 10 * gamma * log10(max(d, d0) / d0) + N(0, sigma^2)`,
/// clipped at the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct TestbedSpec {
    pub width_m: f64,
    pub height_m: f64,
    pub num_locations: usize,
    pub num_rps: usize,
    pub path_loss_exponent: f64,
    pub shadowing_sigma_db: f64,
    pub rss_floor_dbm: f64,
    pub tx_power_dbm: f64,
    pub reference_distance_m: f64,
    pub num_test_samples: usize,
    pub seed: u64,
}

impl Default for TestbedSpec {
    fn default() -> Self {
        // Roughly 0.2 km^2 with 16 grid locations and 8 towers. The transmit
        // power keeps the farthest corner (~636 m, about -104 dBm at gamma 3)
        // above the -110 dBm floor, so no location hears nothing at all.
        TestbedSpec {
            width_m: 450.0,
            height_m: 450.0,
            num_locations: 16,
            num_rps: 8,
            path_loss_exponent: 3.0,
            shadowing_sigma_db: 4.0,
            rss_floor_dbm: -110.0,
            tx_power_dbm: -20.0,
            reference_distance_m: 1.0,
            num_test_samples: 100,
            seed: 1,
        }
    }
}

/// Raw generated data, ready for CSV emission or in-memory preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTestbed {
    pub fingerprint_rows: Vec<RawFingerprintRow>,
    pub test_rows: Vec<RawTestRow>,
    pub rp_positions: Vec<(f64, f64)>,
}

/// Grid dimensioning: square-ish, with power-of-two counts split into
/// power-of-two sides.
fn grid_shape(n: usize) -> (usize, usize) {
    if n.is_power_of_two() {
        let bits = n.trailing_zeros() as usize;
        let cols = 1usize << bits.div_ceil(2);
        (cols, n / cols)
    } else {
        let cols = (n as f64).sqrt().ceil() as usize;
        (cols, n.div_ceil(cols))
    }
}

pub fn generate_synthetic_testbed(spec: &TestbedSpec) -> Result<SyntheticTestbed, HarnessError> {
    if spec.num_locations < 2 || spec.num_rps < 2 {
        return Err(HarnessError::InvalidArgument(
            "testbed needs at least 2 locations and 2 reference points".to_string(),
        ));
    }
    if spec.width_m <= 0.0 || spec.height_m <= 0.0 {
        return Err(HarnessError::InvalidArgument(
            "testbed extent must be positive".to_string(),
        ));
    }
    if spec.shadowing_sigma_db < 0.0 {
        return Err(HarnessError::InvalidArgument(
            "shadowing sigma must be nonnegative".to_string(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let rp_positions: Vec<(f64, f64)> = (0..spec.num_rps)
        .map(|_| {
            (
                uniform(&mut rng) * spec.width_m,
                uniform(&mut rng) * spec.height_m,
            )
        })
        .collect();

    let rss_at = |pos: (f64, f64), rng: &mut ChaCha8Rng| -> Vec<Option<f64>> {
        rp_positions
            .iter()
            .map(|rp| {
                let d = ((pos.0 - rp.0).powi(2) + (pos.1 - rp.1).powi(2))
                    .sqrt()
                    .max(spec.reference_distance_m);
                let mean = spec.tx_power_dbm
                    - 10.0 * spec.path_loss_exponent * (d / spec.reference_distance_m).log10();
                let shadowed = if spec.shadowing_sigma_db > 0.0 {
                    mean + spec.shadowing_sigma_db * normal(rng)
                } else {
                    mean
                };
                Some(shadowed.max(spec.rss_floor_dbm))
            })
            .collect()
    };

    let (cols, rows) = grid_shape(spec.num_locations);
    let mut fingerprint_rows = Vec::with_capacity(spec.num_locations);
    for loc in 0..spec.num_locations {
        let cx = (loc % cols) as f64;
        let cy = (loc / cols) as f64;
        let pos = (
            (cx + 0.5) * spec.width_m / cols as f64,
            (cy + 0.5) * spec.height_m / rows as f64,
        );
        fingerprint_rows.push(RawFingerprintRow {
            loc_id: loc as u32,
            x_m: pos.0,
            y_m: pos.1,
            rss_dbm: rss_at(pos, &mut rng),
        });
    }

    let test_rows: Vec<RawTestRow> = (0..spec.num_test_samples)
        .map(|_| {
            let pos = (
                uniform(&mut rng) * spec.width_m,
                uniform(&mut rng) * spec.height_m,
            );
            RawTestRow {
                x_m: pos.0,
                y_m: pos.1,
                rss_dbm: rss_at(pos, &mut rng),
            }
        })
        .collect();

    Ok(SyntheticTestbed {
        fingerprint_rows,
        test_rows,
        rp_positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{fingerprint_from_raw, tests_from_raw, PreprocessConfig};
    use qloc_core::classical_localize_euclidean;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = TestbedSpec::default();
        let a = generate_synthetic_testbed(&spec).unwrap();
        let b = generate_synthetic_testbed(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_testbed(&TestbedSpec { seed: 2, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn grid_shapes_are_balanced() {
        assert_eq!(grid_shape(16), (4, 4));
        assert_eq!(grid_shape(8), (4, 2));
        assert_eq!(grid_shape(2), (2, 1));
        assert_eq!(grid_shape(64), (8, 8));
    }

    #[test]
    fn noiseless_grid_point_is_its_own_nearest_neighbor() {
        let spec = TestbedSpec {
            shadowing_sigma_db: 0.0,
            num_test_samples: 0,
            ..TestbedSpec::default()
        };
        let testbed = generate_synthetic_testbed(&spec).unwrap();
        let cfg = PreprocessConfig::default();
        let fp = fingerprint_from_raw(&testbed.fingerprint_rows, &cfg).unwrap();
        // Re-read each grid point's own RSS as a test sample.
        for row in &testbed.fingerprint_rows {
            let sample = tests_from_raw(
                &[RawTestRow {
                    x_m: row.x_m,
                    y_m: row.y_m,
                    rss_dbm: row.rss_dbm.clone(),
                }],
                &cfg,
            )
            .unwrap();
            let (estimate, distances) = classical_localize_euclidean(&fp, &sample[0].rss).unwrap();
            assert_eq!(estimate.0, row.loc_id);
            let own = distances
                .iter()
                .find(|(id, _)| id.0 == row.loc_id)
                .unwrap()
                .1;
            assert!(own < 1e-12);
        }
    }

    #[test]
    fn readings_respect_the_floor() {
        let spec = TestbedSpec {
            rss_floor_dbm: -90.0,
            ..TestbedSpec::default()
        };
        let testbed = generate_synthetic_testbed(&spec).unwrap();
        for row in &testbed.fingerprint_rows {
            for v in row.rss_dbm.iter().flatten() {
                assert!(*v >= -90.0);
            }
        }
    }

    #[test]
    fn degenerate_specs_are_rejected() {
        let bad = TestbedSpec {
            num_locations: 1,
            ..TestbedSpec::default()
        };
        assert!(generate_synthetic_testbed(&bad).is_err());
        let bad = TestbedSpec {
            width_m: 0.0,
            ..TestbedSpec::default()
        };
        assert!(generate_synthetic_testbed(&bad).is_err());
    }
}
