//! Fuzzy non-exclusivity between the elements (and subsets) of a frame.
//!
//! Two subsets that share an element are never exclusive, so their degree is
//! pinned to 1. For disjoint subsets the degree is looked up in this order:
//! an explicit subset-pair override, then the largest degree among the
//! element pairs drawn from the two subsets, with unlisted element pairs at 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};

/// Largest frame for which the full subset-pair matrix is materialized.
pub const MAX_MATRIX_FRAME_SIZE: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct NonExclusivityModel {
    frame: Arc<Frame>,
    /// Row-major `n x n`, symmetric.
    element_degrees: Vec<f64>,
    /// Keyed by `(min, max)` so lookups are symmetric.
    overrides: BTreeMap<(Subset, Subset), f64>,
}

fn check_degree(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidDegree(p))
    }
}

fn ordered(b1: Subset, b2: Subset) -> (Subset, Subset) {
    if b1 <= b2 {
        (b1, b2)
    } else {
        (b2, b1)
    }
}

impl NonExclusivityModel {
    /// The classical model: every pair of distinct elements fully exclusive.
    pub fn exclusive(frame: Arc<Frame>) -> Self {
        let n = frame.len();
        NonExclusivityModel { frame, element_degrees: vec![0.0; n * n], overrides: BTreeMap::new() }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn set_element_degree(&mut self, i: usize, j: usize, degree: f64) -> Result<()> {
        let n = self.frame.len();
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidElementPair(i, j));
        }
        check_degree(degree)?;
        self.element_degrees[i * n + j] = degree;
        self.element_degrees[j * n + i] = degree;
        Ok(())
    }

    pub fn set_label_degree(&mut self, x: &str, y: &str, degree: f64) -> Result<()> {
        let i = self.frame.index_of(x).ok_or_else(|| Error::UnknownLabel(x.into()))?;
        let j = self.frame.index_of(y).ok_or_else(|| Error::UnknownLabel(y.into()))?;
        self.set_element_degree(i, j, degree)
    }

    /// Builder form of [`set_label_degree`](Self::set_label_degree).
    pub fn with_degree(mut self, x: &str, y: &str, degree: f64) -> Result<Self> {
        self.set_label_degree(x, y, degree)?;
        Ok(self)
    }

    /// Pins the degree of one disjoint subset pair, bypassing max-expansion.
    pub fn set_override(&mut self, b1: Subset, b2: Subset, degree: f64) -> Result<()> {
        self.frame.check(b1)?;
        self.frame.check(b2)?;
        if b1.is_empty() || b2.is_empty() {
            return Err(Error::EmptySubset);
        }
        if b1.intersects(b2) {
            return Err(Error::OverrideOnIntersectingPair);
        }
        check_degree(degree)?;
        self.overrides.insert(ordered(b1, b2), degree);
        Ok(())
    }

    pub fn element_degree(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            self.element_degrees[i * self.frame.len() + j]
        }
    }

    /// Element pairs `i < j` with a non-zero degree.
    pub fn element_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.frame.len();
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.element_degree(i, j)))
            .filter(|&(_, _, p)| p > 0.0)
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Subset, Subset, f64)> + '_ {
        self.overrides.iter().map(|(&(a, b), &p)| (a, b, p))
    }

    /// True when every disjoint pair has degree 0.
    pub fn is_exclusive(&self) -> bool {
        self.element_pairs().next().is_none() && self.overrides.values().all(|&p| p == 0.0)
    }

    /// Non-exclusive degree between two non-empty subsets.
    pub fn degree(&self, b1: Subset, b2: Subset) -> Result<f64> {
        self.frame.check(b1)?;
        self.frame.check(b2)?;
        if b1.is_empty() || b2.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.degree_unchecked(b1, b2))
    }

    pub(crate) fn degree_unchecked(&self, b1: Subset, b2: Subset) -> f64 {
        if b1.intersects(b2) {
            return 1.0;
        }
        if let Some(&p) = self.overrides.get(&ordered(b1, b2)) {
            return p;
        }
        let n = self.frame.len();
        b1.elements()
            .flat_map(|i| b2.elements().map(move |j| i * n + j))
            .map(|k| self.element_degrees[k])
            .fold(0.0, f64::max)
    }

    /// Materializes the degree between every pair of non-empty subsets.
    pub fn expand_matrix(&self) -> Result<DegreeMatrix> {
        let n = self.frame.len();
        if n > MAX_MATRIX_FRAME_SIZE {
            return Err(Error::FrameTooLargeForMatrix { size: n, max: MAX_MATRIX_FRAME_SIZE });
        }
        let subsets = self.frame.nonempty_subsets();
        let values = subsets
            .iter()
            .flat_map(|&r| subsets.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.degree_unchecked(r, c))
            .collect();
        Ok(DegreeMatrix { subsets, values })
    }
}

/// Square matrix over the non-empty subsets of a frame, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMatrix {
    subsets: Vec<Subset>,
    values: Vec<f64>,
}

impl DegreeMatrix {
    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dim() + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.dim())
    }

    /// Exclusive degrees, `1 - u` entry-wise.
    pub fn complement(&self) -> DegreeMatrix {
        DegreeMatrix { subsets: self.subsets.clone(), values: self.values.iter().map(|v| 1.0 - v).collect() }
    }
}
