//! Evidence combination for Dempster-Shafer belief functions and D numbers.
//!
//! D numbers relax two assumptions of classical evidence theory: the
//! elements of a frame may overlap to a fuzzy degree, and the total mass may
//! fall short of 1. This crate provides
//!
//! - [`Frame`] and [`Subset`]: labelled frames and bit-mask subsets,
//! - [`DNumber`]: validated mass assignments with belief and plausibility,
//! - [`dst`]: the conjunctive, disjunctive, Dempster, Yager and
//!   Dubois-Prade rules,
//! - [`NonExclusivityModel`]: pairwise non-exclusive degrees expanded to
//!   subset pairs,
//! - [`fusion`]: the DCR1 and DCR2 rules and multi-source strategies,
//! - [`scenario`]: the TOML scenario format and report rendering.
//!
//! ```
//! use std::sync::Arc;
//! use dnumbers::{dcr2, CompletenessAggregator, DNumber, Frame, NonExclusivityModel};
//!
//! let frame = Arc::new(Frame::new(["a", "b", "c"])?);
//! let d1 = DNumber::from_labels(frame.clone(), &[(&["a"][..], 0.7), (&["b", "c"][..], 0.1), (&["a", "b", "c"][..], 0.1)])?;
//! let d2 = DNumber::from_labels(frame.clone(), &[(&["a"][..], 0.5), (&["c"][..], 0.3)])?;
//! let model = NonExclusivityModel::exclusive(frame.clone())
//!     .with_degree("a", "b", 0.1)?
//!     .with_degree("b", "c", 0.2)?;
//! let report = dcr2(&d1, &d2, &model, &CompletenessAggregator::Product)?;
//! assert!((report.result.mass(frame.singleton("a")?) - 0.6194).abs() < 5e-5);
//! # Ok::<(), dnumbers::Error>(())
//! ```

pub mod aggregator;
pub mod dnumber;
pub mod dst;
mod error;
pub mod frame;
pub mod fusion;
pub mod nonexclusive;
pub mod scenario;

pub use aggregator::CompletenessAggregator;
pub use dnumber::{BeliefSummary, DNumber, EPSILON};
pub use dst::ConjunctiveResult;
pub use error::{Error, Result};
pub use frame::{Frame, Subset, MAX_FRAME_SIZE};
pub use fusion::{combine, combine_many, dcr1, dcr2, FusionReport, Rule, Strategy};
pub use nonexclusive::{DegreeMatrix, NonExclusivityModel};
