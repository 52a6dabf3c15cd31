//! Classical combination rules for basic probability assignments.
//!
//! Every rule here requires complete inputs on a shared frame. The empty set
//! only ever appears in [`ConjunctiveResult`], where its mass is the global
//! conflict `K`.

use std::collections::BTreeMap;

use crate::dnumber::DNumber;
use crate::error::{Error, Result};
use crate::frame::Subset;

/// Normalizers below this are treated as total conflict.
pub const CONFLICT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConjunctiveResult {
    /// Unnormalized masses, the empty set included when `K > 0`.
    pub masses: BTreeMap<Subset, f64>,
    pub global_conflict: f64,
}

impl ConjunctiveResult {
    pub fn mass(&self, subset: Subset) -> f64 {
        self.masses.get(&subset).copied().unwrap_or(0.0)
    }
}

pub(crate) fn check_pair(m1: &DNumber, m2: &DNumber) -> Result<()> {
    if !m1.same_frame(m2) {
        return Err(Error::FrameMismatch);
    }
    Ok(())
}

pub(crate) fn check_complete(m: &DNumber) -> Result<()> {
    if m.is_complete() {
        Ok(())
    } else {
        Err(Error::IncompleteInput { q: m.q_value() })
    }
}

fn check_bpas(m1: &DNumber, m2: &DNumber) -> Result<()> {
    check_pair(m1, m2)?;
    check_complete(m1)?;
    check_complete(m2)
}

fn pairwise<F>(m1: &DNumber, m2: &DNumber, target: F) -> BTreeMap<Subset, f64>
where
    F: Fn(Subset, Subset) -> Subset,
{
    let mut out = BTreeMap::new();
    for (b, wb) in m1.focal() {
        for (c, wc) in m2.focal() {
            *out.entry(target(b, c)).or_insert(0.0) += wb * wc;
        }
    }
    out
}

/// Unnormalized conjunctive combination and the global conflict.
pub fn conjunctive(m1: &DNumber, m2: &DNumber) -> Result<ConjunctiveResult> {
    check_bpas(m1, m2)?;
    let masses = pairwise(m1, m2, Subset::intersection);
    let global_conflict = masses.get(&Subset::EMPTY).copied().unwrap_or(0.0);
    Ok(ConjunctiveResult { masses, global_conflict })
}

pub fn disjunctive(m1: &DNumber, m2: &DNumber) -> Result<DNumber> {
    check_bpas(m1, m2)?;
    Ok(DNumber::from_computed(m1.frame().clone(), pairwise(m1, m2, Subset::union)))
}

/// Dempster's rule: the conflict is spread proportionally over the
/// non-empty focal elements.
pub fn dempster(m1: &DNumber, m2: &DNumber) -> Result<DNumber> {
    let conj = conjunctive(m1, m2)?;
    let k = conj.global_conflict;
    if k >= 1.0 - CONFLICT_TOLERANCE {
        return Err(Error::TotalConflict { conflict: k });
    }
    let norm = 1.0 - k;
    let masses = conj
        .masses
        .into_iter()
        .filter(|(s, _)| !s.is_empty())
        .map(|(s, w)| (s, w / norm))
        .collect();
    Ok(DNumber::from_computed(m1.frame().clone(), masses))
}

/// Yager's rule: the conflict goes to the whole frame.
pub fn yager(m1: &DNumber, m2: &DNumber) -> Result<DNumber> {
    let conj = conjunctive(m1, m2)?;
    let mut masses = conj.masses;
    masses.remove(&Subset::EMPTY);
    *masses.entry(m1.frame().full()).or_insert(0.0) += conj.global_conflict;
    Ok(DNumber::from_computed(m1.frame().clone(), masses))
}

/// Dubois and Prade's rule: each partial conflict goes to the union of the
/// two focal elements that produced it.
pub fn dubois_prade(m1: &DNumber, m2: &DNumber) -> Result<DNumber> {
    check_bpas(m1, m2)?;
    let masses = pairwise(m1, m2, |b, c| {
        let meet = b.intersection(c);
        if meet.is_empty() {
            b.union(c)
        } else {
            meet
        }
    });
    Ok(DNumber::from_computed(m1.frame().clone(), masses))
}
