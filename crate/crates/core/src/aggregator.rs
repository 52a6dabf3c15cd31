//! Completeness functions `f(Q1, Q2)` that fix the total mass of a DCR2
//! result.
//!
//! An admissible function satisfies `0 <= f(Q1, Q2) <= max(Q1, Q2)` and
//! `f(1, 1) = 1`. User functions are checked on a 101 x 101 grid over the unit
//! square when they are built.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Points per axis of the validation grid.
pub const GRID_POINTS: usize = 101;
const GRID_TOLERANCE: f64 = 1e-12;

type AggregatorFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum CompletenessAggregator {
    Product,
    Minimum,
    Maximum,
    Average,
    /// Always 1, as if both sources were complete. This does not respect the
    /// `max(Q1, Q2)` bound once either input is incomplete.
    ConstantOne,
    Custom(CustomAggregator),
}

#[derive(Clone)]
pub struct CustomAggregator {
    name: String,
    func: Arc<AggregatorFn>,
}

impl CompletenessAggregator {
    pub const BUILT_IN: [CompletenessAggregator; 5] = [
        CompletenessAggregator::Product,
        CompletenessAggregator::Minimum,
        CompletenessAggregator::Maximum,
        CompletenessAggregator::Average,
        CompletenessAggregator::ConstantOne,
    ];

    /// Wraps a user function after checking it on the validation grid.
    pub fn custom<F>(name: impl Into<String>, func: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let custom = CustomAggregator { name: name.into(), func: Arc::new(func) };
        validate_on_grid(&custom.name, &*custom.func)?;
        Ok(CompletenessAggregator::Custom(custom))
    }

    /// Builds a function from a table of samples at `Q = k / 100`, row index
    /// for `Q1` and column index for `Q2`.
    ///
    /// The samples themselves are validated. Values between nodes are
    /// bilinearly interpolated and then clamped into `[0, max(Q1, Q2)]`, since
    /// interpolation of a valid table can overshoot the bound inside a cell.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        let shape_ok = table.len() == GRID_POINTS && table.iter().all(|row| row.len() == GRID_POINTS);
        if !shape_ok {
            return Err(Error::InvalidAggregator {
                name,
                reason: format!("table must be {GRID_POINTS} x {GRID_POINTS}"),
            });
        }
        let nodes = |q: f64| (q * (GRID_POINTS - 1) as f64).clamp(0.0, (GRID_POINTS - 1) as f64);
        validate_on_grid(&name, &|q1, q2| table[nodes(q1).round() as usize][nodes(q2).round() as usize])?;
        let func = move |q1: f64, q2: f64| {
            let (x, y) = (nodes(q1), nodes(q2));
            let (i, j) = (x.floor() as usize, y.floor() as usize);
            let (i1, j1) = ((i + 1).min(GRID_POINTS - 1), (j + 1).min(GRID_POINTS - 1));
            let (tx, ty) = (x - i as f64, y - j as f64);
            let top = table[i][j] * (1.0 - ty) + table[i][j1] * ty;
            let bottom = table[i1][j] * (1.0 - ty) + table[i1][j1] * ty;
            let v = top * (1.0 - tx) + bottom * tx;
            v.clamp(0.0, q1.max(q2))
        };
        Ok(CompletenessAggregator::Custom(CustomAggregator { name, func: Arc::new(func) }))
    }

    pub fn name(&self) -> &str {
        match self {
            CompletenessAggregator::Product => "product",
            CompletenessAggregator::Minimum => "min",
            CompletenessAggregator::Maximum => "max",
            CompletenessAggregator::Average => "avg",
            CompletenessAggregator::ConstantOne => "one",
            CompletenessAggregator::Custom(c) => &c.name,
        }
    }

    pub fn evaluate(&self, q1: f64, q2: f64) -> f64 {
        match self {
            CompletenessAggregator::Product => q1 * q2,
            CompletenessAggregator::Minimum => q1.min(q2),
            CompletenessAggregator::Maximum => q1.max(q2),
            CompletenessAggregator::Average => 0.5 * (q1 + q2),
            CompletenessAggregator::ConstantOne => 1.0,
            CompletenessAggregator::Custom(c) => (c.func)(q1, q2),
        }
    }

    /// Whether `f(Q1, Q2) <= max(Q1, Q2)` holds everywhere.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, CompletenessAggregator::ConstantOne)
    }

    /// Checks both constraints on the validation grid.
    pub fn validate(&self) -> Result<()> {
        validate_on_grid(self.name(), &|q1, q2| self.evaluate(q1, q2))
    }
}

fn validate_on_grid(name: &str, func: &dyn Fn(f64, f64) -> f64) -> Result<()> {
    let invalid = |reason: String| Error::InvalidAggregator { name: name.to_string(), reason };
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    for i in 0..GRID_POINTS {
        for j in 0..GRID_POINTS {
            let (q1, q2) = (i as f64 * step, j as f64 * step);
            let v = func(q1, q2);
            if !v.is_finite() || v < -GRID_TOLERANCE || v > q1.max(q2) + GRID_TOLERANCE {
                return Err(invalid(format!("f({q1}, {q2}) = {v} outside [0, {}]", q1.max(q2))));
            }
        }
    }
    let top = func(1.0, 1.0);
    if (top - 1.0).abs() > GRID_TOLERANCE {
        return Err(invalid(format!("f(1, 1) = {top}, expected 1")));
    }
    Ok(())
}

impl PartialEq for CompletenessAggregator {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CompletenessAggregator::Custom(a), CompletenessAggregator::Custom(b)) => Arc::ptr_eq(&a.func, &b.func),
            (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}

impl fmt::Debug for CompletenessAggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompletenessAggregator::Custom(c) => write!(f, "Custom({:?})", c.name),
            other => write!(f, "{}", other.name()),
        }
    }
}

impl fmt::Display for CompletenessAggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompletenessAggregator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "product" => Ok(CompletenessAggregator::Product),
            "min" | "minimum" => Ok(CompletenessAggregator::Minimum),
            "max" | "maximum" => Ok(CompletenessAggregator::Maximum),
            "avg" | "average" => Ok(CompletenessAggregator::Average),
            "one" | "constant-one" => Ok(CompletenessAggregator::ConstantOne),
            other => Err(format!("unknown completeness function `{other}` (product, min, max, avg, one)")),
        }
    }
}
