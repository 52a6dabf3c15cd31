//! Dense brute-force oracles. Masses live in arrays indexed by every subset
//! bit pattern and every rule loops over all `2^N x 2^N` subset pairs, so
//! nothing here shares the sparse focal-element path of the library.

#![allow(dead_code)]

use std::sync::Arc;

use dnumbers::{DNumber, Frame, NonExclusivityModel, Subset};
use rand::Rng;

pub struct Dense {
    pub n: usize,
    pub mass: Vec<f64>,
}

impl Dense {
    pub fn of(d: &DNumber) -> Dense {
        let n = d.frame().len();
        let mass = (0..1u32 << n).map(|b| d.mass(Subset::from_bits(b))).collect();
        Dense { n, mass }
    }

    fn size(&self) -> usize {
        1 << self.n
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Pairwise element degrees as a plain table, `table[i][j]`.
pub type DegreeTable = Vec<Vec<f64>>;

pub fn oracle_degree(table: &DegreeTable, b: usize, c: usize) -> f64 {
    if b & c != 0 {
        return 1.0;
    }
    let n = table.len();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if b >> i & 1 == 1 && c >> j & 1 == 1 {
                best = best.max(table[i][j]);
            }
        }
    }
    best
}

/// Conjunctive masses, index 0 holding the conflict.
pub fn oracle_conjunctive(m1: &Dense, m2: &Dense) -> Vec<f64> {
    let mut out = vec![0.0; m1.size()];
    for b in 0..m1.size() {
        for c in 0..m2.size() {
            out[b & c] += m1.mass[b] * m2.mass[c];
        }
    }
    out
}

pub fn oracle_dempster(m1: &Dense, m2: &Dense) -> Option<Vec<f64>> {
    let mut conj = oracle_conjunctive(m1, m2);
    let k = conj[0];
    if k >= 1.0 - 1e-12 {
        return None;
    }
    conj[0] = 0.0;
    Some(conj.into_iter().map(|w| w / (1.0 - k)).collect())
}

/// `(D_t by subset, K_D)`.
pub fn oracle_redistribute(d1: &Dense, d2: &Dense, table: &DegreeTable) -> (Vec<f64>, f64) {
    let mut dt = vec![0.0; d1.size()];
    let mut kd = 0.0;
    for b in 1..d1.size() {
        for c in 1..d2.size() {
            let p = d1.mass[b] * d2.mass[c];
            let u = oracle_degree(table, b, c);
            if b & c != 0 {
                dt[b & c] += p;
            } else {
                dt[b | c] += u * p;
                kd += (1.0 - u) * p;
            }
        }
    }
    (dt, kd)
}

pub fn oracle_dcr1(d1: &Dense, d2: &Dense, table: &DegreeTable) -> Option<Vec<f64>> {
    let (dt, kd) = oracle_redistribute(d1, d2, table);
    if kd >= 1.0 - 1e-12 {
        return None;
    }
    Some(dt.into_iter().map(|w| w / (1.0 - kd)).collect())
}

pub fn oracle_dcr2(d1: &Dense, d2: &Dense, table: &DegreeTable, f: f64) -> Option<Vec<f64>> {
    let (dt, _) = oracle_redistribute(d1, d2, table);
    let total: f64 = dt.iter().sum();
    if total <= 1e-12 {
        return None;
    }
    Some(dt.into_iter().map(|w| f * w / total).collect())
}

pub fn frame(n: usize) -> Arc<Frame> {
    Arc::new(Frame::new((0..n).map(|i| format!("e{i}"))).unwrap())
}

/// Random D number with up to `max_focal` focal elements and total `q`.
pub fn random_dnumber<R: Rng>(rng: &mut R, frame: &Arc<Frame>, max_focal: usize, q: f64) -> DNumber {
    let full = frame.full().bits();
    let k = rng.random_range(1..=max_focal);
    let raw: Vec<(u32, f64)> = (0..k).map(|_| (rng.random_range(1..=full), rng.random_range(0.01..1.0))).collect();
    let sum: f64 = raw.iter().map(|(_, w)| w).sum();
    DNumber::new(frame.clone(), raw.into_iter().map(|(b, w)| (Subset::from_bits(b), w * q / sum))).unwrap()
}

pub fn random_complete<R: Rng>(rng: &mut R, frame: &Arc<Frame>) -> DNumber {
    random_dnumber(rng, frame, 5, 1.0)
}

/// Random model with every element pair drawn; some pairs left at 0.
pub fn random_model<R: Rng>(rng: &mut R, frame: &Arc<Frame>) -> (NonExclusivityModel, DegreeTable) {
    let n = frame.len();
    let mut model = NonExclusivityModel::exclusive(frame.clone());
    let mut table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let p = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..=1.0) };
            model.set_element_degree(i, j, p).unwrap();
            table[i][j] = p;
            table[j][i] = p;
        }
    }
    (model, table)
}

pub fn zero_table(n: usize) -> DegreeTable {
    vec![vec![0.0; n]; n]
}

pub fn max_diff(d: &DNumber, dense: &[f64]) -> f64 {
    (1..dense.len()).map(|b| (d.mass(Subset::from_bits(b as u32)) - dense[b]).abs()).fold(0.0, f64::max)
}

pub fn max_diff_dn(a: &DNumber, b: &DNumber) -> f64 {
    max_diff(a, &Dense::of(b).mass)
}
