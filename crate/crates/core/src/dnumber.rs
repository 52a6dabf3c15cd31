//! D numbers: mass assignments over a frame that may fall short of 1.
//!
//! A classical basic probability assignment is the special case whose total
//! mass is 1, see [`DNumber::is_complete`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};

/// Construction tolerance on the total mass.
pub const EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DNumber {
    frame: Arc<Frame>,
    masses: BTreeMap<Subset, f64>,
}

/// Belief and plausibility of one subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefSummary {
    pub subset: Subset,
    pub bel: f64,
    pub pl: f64,
    /// Set when the source D number is incomplete. The two measures are then
    /// raw sums and no longer satisfy the classical duality.
    pub incomplete_source: bool,
}

impl DNumber {
    /// Validates and builds a D number. Entries on the same subset are summed
    /// and zero weights are dropped.
    pub fn new<I>(frame: Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut masses = BTreeMap::new();
        for (subset, weight) in entries {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::NegativeWeight(weight));
            }
            if weight > 1.0 + EPSILON {
                return Err(Error::WeightAboveOne(weight));
            }
            frame.check(subset)?;
            if subset.is_empty() {
                if weight > 0.0 {
                    return Err(Error::EmptySetAssignment(weight));
                }
                continue;
            }
            if weight > 0.0 {
                *masses.entry(subset).or_insert(0.0) += weight;
            }
        }
        let total: f64 = masses.values().sum();
        if total > 1.0 + EPSILON {
            return Err(Error::MassOverflow { total });
        }
        Ok(DNumber { frame, masses })
    }

    /// Convenience constructor taking label lists.
    pub fn from_labels<S: AsRef<str>>(frame: Arc<Frame>, entries: &[(&[S], f64)]) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|(labels, w)| Ok((frame.subset(labels.iter())?, *w)))
            .collect::<Result<Vec<_>>>()?;
        DNumber::new(frame, entries)
    }

    /// All mass on the whole frame.
    pub fn vacuous(frame: Arc<Frame>) -> Self {
        let full = frame.full();
        DNumber { frame, masses: BTreeMap::from([(full, 1.0)]) }
    }

    /// Builds from computed masses without the overflow check. Callers
    /// guarantee non-empty keys inside the frame.
    pub(crate) fn from_computed(frame: Arc<Frame>, masses: BTreeMap<Subset, f64>) -> Self {
        let masses = masses.into_iter().filter(|&(s, w)| !s.is_empty() && w > 0.0).collect();
        DNumber { frame, masses }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn same_frame(&self, other: &DNumber) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame
    }

    /// Mass on exactly `subset`; zero for non-focal subsets.
    pub fn mass(&self, subset: Subset) -> f64 {
        self.masses.get(&subset).copied().unwrap_or(0.0)
    }

    /// Focal elements and their masses, in bit order.
    pub fn focal(&self) -> impl ExactSizeIterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(&s, &w)| (s, w))
    }

    /// Focal elements sorted by cardinality, then lexicographically.
    pub fn focal_canonical(&self) -> Vec<(Subset, f64)> {
        let mut focal: Vec<_> = self.focal().collect();
        focal.sort_by(|x, y| x.0.canonical_cmp(&y.0));
        focal
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Degree of information completeness: the total assigned mass.
    pub fn q_value(&self) -> f64 {
        self.masses.values().fold(0.0, |a, w| a + w)
    }

    pub fn is_complete(&self) -> bool {
        (self.q_value() - 1.0).abs() <= EPSILON
    }

    pub fn belief(&self, subset: Subset) -> Result<f64> {
        self.frame.check(subset)?;
        Ok(self.focal().filter(|(b, _)| b.is_subset_of(subset)).map(|(_, w)| w).fold(0.0, |a, w| a + w))
    }

    pub fn plausibility(&self, subset: Subset) -> Result<f64> {
        self.frame.check(subset)?;
        Ok(self.focal().filter(|(b, _)| b.intersects(subset)).map(|(_, w)| w).fold(0.0, |a, w| a + w))
    }

    pub fn summary(&self, subset: Subset) -> Result<BeliefSummary> {
        Ok(BeliefSummary {
            subset,
            bel: self.belief(subset)?,
            pl: self.plausibility(subset)?,
            incomplete_source: !self.is_complete(),
        })
    }
}
