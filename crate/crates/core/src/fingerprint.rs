//! The offline fingerprint database: RSS vectors tagged with ground-truth
//! locations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::encoding::{RssVector, Stage};
use crate::error::{Error, Result};

/// Identifier of a fingerprint location; written to the location register
/// as its binary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub u32);

impl core::fmt::Display for LocationId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One stored survey row: where it was taken and what was heard there.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintRow {
    pub location: LocationId,
    pub x_m: f64,
    pub y_m: f64,
    pub rss: RssVector,
}

/// N rows of M normalized RSS values plus coordinates and labels. Several
/// rows may share a location id; their probabilities aggregate at readout.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    rp_count: usize,
    rows: Vec<FingerprintRow>,
}

impl Fingerprint {
    pub fn new(rows: Vec<FingerprintRow>) -> Result<Self> {
        let first_len = match rows.first() {
            Some(row) => row.rss.len(),
            None => return Err(Error::EmptyFingerprint),
        };
        for row in &rows {
            if row.rss.len() != first_len {
                return Err(Error::DimensionMismatch {
                    expected: first_len,
                    found: row.rss.len(),
                });
            }
            if row.rss.stage() != Stage::Normalized {
                return Err(Error::WrongStage {
                    expected: Stage::Normalized.name(),
                    found: row.rss.stage().name(),
                });
            }
            let norm_sqr: f64 = row.rss.values().iter().map(|v| v * v).sum();
            if libm::fabs(norm_sqr - 1.0) > 1e-9 {
                return Err(Error::NotUnit { norm_sqr });
            }
        }
        Ok(Fingerprint {
            rp_count: first_len,
            rows,
        })
    }

    pub fn rp_count(&self) -> usize {
        self.rp_count
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[FingerprintRow] {
        &self.rows
    }

    /// Distinct location ids in ascending order.
    pub fn location_ids(&self) -> Vec<LocationId> {
        let set: BTreeSet<LocationId> = self.rows.iter().map(|r| r.location).collect();
        set.into_iter().collect()
    }

    /// Coordinates of the first row carrying the given id.
    pub fn coords_of(&self, id: LocationId) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .find(|r| r.location == id)
            .map(|r| (r.x_m, r.y_m))
    }
}
