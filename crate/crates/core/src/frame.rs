//! Frames and the subset algebra over them.
//!
//! A [`Frame`] is an ordered list of distinct labels. The label at position
//! `i` owns bit `i` of every [`Subset`] drawn from the frame, so a subset of a
//! frame of size `N` is a `u32` whose bits above `N` are clear.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported frame.
pub const MAX_FRAME_SIZE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::FrameTooLarge { size: labels.len(), max: MAX_FRAME_SIZE });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; frames hold at least one label.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The whole frame as a subset.
    pub fn full(&self) -> Subset {
        Subset((1u32 << self.len()) - 1)
    }

    pub fn singleton(&self, label: &str) -> Result<Subset> {
        self.index_of(label)
            .map(Subset::singleton)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Builds a subset from labels. Repeated labels are harmless.
    pub fn subset<I, S>(&self, labels: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        labels.into_iter().try_fold(Subset::EMPTY, |acc, label| {
            Ok(acc.union(self.singleton(label.as_ref())?))
        })
    }

    pub fn contains(&self, subset: Subset) -> bool {
        subset.0 & !self.full().0 == 0
    }

    pub(crate) fn check(&self, subset: Subset) -> Result<()> {
        if self.contains(subset) {
            Ok(())
        } else {
            Err(Error::ForeignSubset { bits: subset.0, size: self.len() })
        }
    }

    pub fn complement(&self, subset: Subset) -> Subset {
        Subset(!subset.0 & self.full().0)
    }

    /// Labels of `subset` in frame order.
    pub fn labels_of(&self, subset: Subset) -> Vec<&str> {
        subset.elements().filter_map(|i| self.label(i)).collect()
    }

    /// Labels of `subset` sorted lexicographically, the form used in files.
    pub fn sorted_labels_of(&self, subset: Subset) -> Vec<String> {
        let mut labels: Vec<String> = self.labels_of(subset).into_iter().map(str::to_string).collect();
        labels.sort();
        labels
    }

    /// Renders a subset as `{a,b}`.
    pub fn display(&self, subset: Subset) -> String {
        format!("{{{}}}", self.labels_of(subset).join(","))
    }

    /// All non-empty subsets, ordered by cardinality and then
    /// lexicographically by element index: `{a} {b} {c} {a,b} {a,c} {b,c} {a,b,c}`.
    pub fn nonempty_subsets(&self) -> Vec<Subset> {
        let mut all: Vec<Subset> = (1..=self.full().0).map(Subset).collect();
        all.sort_by(|x, y| x.canonical_cmp(y));
        all
    }
}

/// A set of element indices, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn singleton(index: usize) -> Self {
        Subset(1 << index)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub const fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    /// Element indices in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    /// Cardinality first, then lexicographic on the sorted index lists.
    pub fn canonical_cmp(&self, other: &Subset) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements().cmp(other.elements()))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.elements().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
