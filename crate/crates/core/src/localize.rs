//! The matching engine: quantum localization by exact conditional readout
//! or shot sampling, the closed-form probability oracle computed straight
//! from the interference arithmetic, and the classical Euclidean baseline.
//!
//! Two readout modes exist because the interfering Hadamard splits the state
//! into a (test + fingerprint) branch on ancilla 0 and a (test - fingerprint)
//! branch on ancilla 1. Conditioning on ancilla 0 weights each location by
//! |psi + phi_i|^2 and its argmax is the Euclidean-nearest location;
//! conditioning on ancilla 1 weights by the squared distances |psi - phi_i|^2,
//! whose argmax is the farthest location, so in that mode the estimate is the
//! minimum-probability location. For unit vectors the two weights sum to 4,
//! making the orderings exact reverses of each other.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::circuit::{build_localization_circuit, RegisterLayout};
use crate::encoding::{RssVector, Stage};
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, LocationId};
use crate::state::StateVector;

/// Probabilities below this are treated as zero when conditioning.
const DEGENERATE_TOTAL: f64 = 1e-12;

/// Which ancilla outcome conditions the location readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Condition on ancilla 0; probabilities scale with |psi + phi_i|^2 and
    /// the estimate is the argmax.
    #[default]
    Similarity,
    /// Condition on ancilla 1; probabilities scale with |psi - phi_i|^2 and
    /// the estimate is the minimum-probability location.
    Distance,
}

impl Mode {
    /// The ancilla value this mode post-selects on.
    pub fn ancilla_value(self) -> bool {
        matches!(self, Mode::Distance)
    }
}

/// Matching configuration. `shots = 0` reads exact probabilities from the
/// statevector; `shots = K > 0` estimates them from K seeded measurement
/// shots with post-selection on the ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationConfig {
    pub mode: Mode,
    pub shots: u64,
    pub seed: u64,
    pub tie_tolerance: f64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            mode: Mode::Similarity,
            shots: 0,
            seed: 0,
            tie_tolerance: 1e-9,
        }
    }
}

/// Per-location probabilities conditioned on the ancilla outcome, plus the
/// selected estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationDistribution {
    pub mode: Mode,
    /// Probability of the conditioning ancilla outcome (exact mode) or the
    /// post-selection rate (shots mode).
    pub ancilla_prob: f64,
    pub probs: BTreeMap<LocationId, f64>,
    pub estimate: LocationId,
}

impl LocationDistribution {
    pub fn prob_of(&self, id: LocationId) -> f64 {
        self.probs.get(&id).copied().unwrap_or(0.0)
    }
}

/// Estimate selection: argmax in similarity mode, argmin in distance mode,
/// ties within `tie_tolerance` broken by the lowest location id.
fn select_estimate(
    mode: Mode,
    probs: &BTreeMap<LocationId, f64>,
    tie_tolerance: f64,
) -> LocationId {
    let mut best: Option<(LocationId, f64)> = None;
    for (&id, &p) in probs {
        let better = match best {
            None => true,
            Some((_, best_p)) => match mode {
                Mode::Similarity => p > best_p + tie_tolerance,
                Mode::Distance => p < best_p - tie_tolerance,
            },
        };
        if better {
            best = Some((id, p));
        }
    }
    best.expect("nonempty probability table").0
}

fn check_dimensions(fp: &Fingerprint, test: &RssVector) -> Result<()> {
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
    Ok(())
}

fn squared_sum_dist(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut dist = 0.0;
    for (x, y) in a.iter().zip(b) {
        let s = x + y;
        let d = x - y;
        sum += s * s;
        dist += d * d;
    }
    (sum, dist)
}

/// Closed-form location distribution from direct vector arithmetic, no
/// simulation: p(a=1) is the mean squared distance over 4, and each
/// location's conditional probability aggregates the rows sharing its id.
pub fn analytic_distribution(
    fp: &Fingerprint,
    test: &RssVector,
    mode: Mode,
) -> Result<LocationDistribution> {
    analytic_with_tolerance(fp, test, mode, LocalizationConfig::default().tie_tolerance)
}

fn analytic_with_tolerance(
    fp: &Fingerprint,
    test: &RssVector,
    mode: Mode,
    tie_tolerance: f64,
) -> Result<LocationDistribution> {
    check_dimensions(fp, test)?;
    let n = fp.num_rows() as f64;
    let mut weights: BTreeMap<LocationId, f64> = BTreeMap::new();
    let mut sum_dist_sqr = 0.0;
    for row in fp.rows() {
        let (sum_sqr, dist_sqr) = squared_sum_dist(test.values(), row.rss.values());
        sum_dist_sqr += dist_sqr;
        let w = match mode {
            Mode::Similarity => sum_sqr,
            Mode::Distance => dist_sqr,
        };
        *weights.entry(row.location).or_insert(0.0) += w;
    }
    let p_excited = sum_dist_sqr / (4.0 * n);
    let ancilla_prob = match mode {
        Mode::Similarity => 1.0 - p_excited,
        Mode::Distance => p_excited,
    };
    let total: f64 = weights.values().sum();
    if total < DEGENERATE_TOTAL {
        // Only reachable in distance mode: the test vector matches every row.
        return Err(Error::DegenerateCondition);
    }
    let probs: BTreeMap<LocationId, f64> =
        weights.into_iter().map(|(id, w)| (id, w / total)).collect();
    let estimate = select_estimate(mode, &probs, tie_tolerance);
    Ok(LocationDistribution {
        mode,
        ancilla_prob,
        probs,
        estimate,
    })
}

/// Quantum localization from an already-simulated circuit output. Exposed so
/// sweeps over shot counts can reuse one simulation per test vector.
pub fn quantum_localize_prepared(
    state: &StateVector,
    layout: &RegisterLayout,
    fp: &Fingerprint,
    config: &LocalizationConfig,
) -> Result<LocationDistribution> {
    let ancilla = layout.ancilla();
    let want = config.mode.ancilla_value();
    let location_qubits: Vec<usize> = layout.location().collect();
    let ids = fp.location_ids();

    let mut probs: BTreeMap<LocationId, f64> = ids.iter().map(|&id| (id, 0.0)).collect();
    let ancilla_prob;

    if config.shots == 0 {
        ancilla_prob = state.probability_of(ancilla, want)?;
        let table = state.conditional_distribution((ancilla, want), &location_qubits)?;
        for (outcome, &p) in table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // Location amplitudes exist only at written label patterns.
            let id = LocationId(outcome as u32);
            *probs.get_mut(&id).ok_or(Error::LabelTooWide {
                label: outcome as u32,
                bits: location_qubits.len(),
            })? += p;
        }
    } else {
        // One circuit execution per shot: measure ancilla and location
        // jointly, then discard shots whose ancilla missed the mode.
        let mut subset = Vec::with_capacity(1 + location_qubits.len());
        subset.push(ancilla);
        subset.extend_from_slice(&location_qubits);
        let counts = state.sample_shots(&subset, config.shots, config.seed)?;
        let mut matched = 0u64;
        let mut per_outcome: BTreeMap<u32, u64> = BTreeMap::new();
        for (bits, &count) in counts.iter() {
            if bits.bit(0) != want {
                continue;
            }
            matched += count;
            *per_outcome.entry((bits.value() >> 1) as u32).or_insert(0) += count;
        }
        if matched == 0 {
            let ones: u64 = counts
                .iter()
                .filter(|(b, _)| b.bit(0))
                .map(|(_, &c)| c)
                .sum();
            return Err(Error::InsufficientShots {
                zeros: config.shots - ones,
                ones,
            });
        }
        ancilla_prob = matched as f64 / config.shots as f64;
        for (outcome, count) in per_outcome {
            let id = LocationId(outcome);
            *probs.get_mut(&id).ok_or(Error::LabelTooWide {
                label: outcome,
                bits: location_qubits.len(),
            })? += count as f64 / matched as f64;
        }
    }

    let estimate = select_estimate(config.mode, &probs, config.tie_tolerance);
    Ok(LocationDistribution {
        mode: config.mode,
        ancilla_prob,
        probs,
        estimate,
    })
}

/// Build the localization circuit for the test vector, simulate it exactly,
/// and read the location distribution per the configuration.
pub fn quantum_localize(
    fp: &Fingerprint,
    test: &RssVector,
    config: &LocalizationConfig,
) -> Result<LocationDistribution> {
    check_dimensions(fp, test)?;
    let circuit = build_localization_circuit(test, fp)?;
    let state = circuit.simulate()?;
    quantum_localize_prepared(&state, circuit.layout(), fp, config)
}

/// Classical Euclidean nearest neighbor over the same normalized vectors the
/// quantum path encodes. Returns the estimate and the per-location distances
/// (minimum over rows sharing an id), in ascending id order.
pub fn classical_localize_euclidean(
    fp: &Fingerprint,
    test: &RssVector,
) -> Result<(LocationId, Vec<(LocationId, f64)>)> {
    check_dimensions(fp, test)?;
    let mut per_location: BTreeMap<LocationId, f64> = BTreeMap::new();
    for row in fp.rows() {
        let (_, dist_sqr) = squared_sum_dist(test.values(), row.rss.values());
        let dist = libm::sqrt(dist_sqr);
        per_location
            .entry(row.location)
            .and_modify(|d| *d = d.min(dist))
            .or_insert(dist);
    }
    let estimate = per_location
        .iter()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite distances"))
        .map(|(&id, _)| id)
        .expect("nonempty fingerprint");
    Ok((estimate, per_location.into_iter().collect()))
}

/// Outcome of cross-checking the two quantum readout modes against the
/// classical baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum DualityOutcome {
    /// Similarity argmax, distance argmin, and classical nearest neighbor
    /// all name the same location.
    Consistent(LocationId),
    /// The three selectors disagree (should not happen without ties).
    Inconsistent {
        similarity: LocationId,
        distance: LocationId,
        classical: LocationId,
    },
    /// Two candidate locations sit within the tie tolerance; no verdict.
    Tie { near_tied: Vec<LocationId> },
}

impl DualityOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, DualityOutcome::Consistent(_))
    }
}

fn near_ties(
    probs: &BTreeMap<LocationId, f64>,
    pick: LocationId,
    tie_tolerance: f64,
) -> Vec<LocationId> {
    let picked = probs[&pick];
    probs
        .iter()
        .filter(|(&id, &p)| id != pick && libm::fabs(p - picked) <= tie_tolerance)
        .map(|(&id, _)| id)
        .collect()
}

/// Consistency guard across the two readout conventions: true only when the
/// similarity-mode argmax, the distance-mode minimum-probability location,
/// and the classical Euclidean argmin coincide. Near-ties are reported
/// instead of judged.
pub fn mode_duality_check(
    fp: &Fingerprint,
    test: &RssVector,
    tie_tolerance: f64,
) -> Result<DualityOutcome> {
    let similarity = analytic_with_tolerance(fp, test, Mode::Similarity, tie_tolerance)?;
    let mut tied = near_ties(&similarity.probs, similarity.estimate, tie_tolerance);
    let distance = match analytic_with_tolerance(fp, test, Mode::Distance, tie_tolerance) {
        Ok(d) => Some(d),
        // Test identical to every row: every location ties at zero distance.
        Err(Error::DegenerateCondition) => None,
        Err(e) => return Err(e),
    };
    if let Some(ref d) = distance {
        tied.extend(near_ties(&d.probs, d.estimate, tie_tolerance));
    } else {
        tied.extend(fp.location_ids());
    }
    if !tied.is_empty() {
        tied.sort_unstable();
        tied.dedup();
        return Ok(DualityOutcome::Tie { near_tied: tied });
    }
    let distance = distance.expect("non-degenerate");
    let (classical, _) = classical_localize_euclidean(fp, test)?;
    if similarity.estimate == distance.estimate && distance.estimate == classical {
        Ok(DualityOutcome::Consistent(classical))
    } else {
        Ok(DualityOutcome::Inconsistent {
            similarity: similarity.estimate,
            distance: distance.estimate,
            classical,
        })
    }
}
