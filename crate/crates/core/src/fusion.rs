//! Combination of D numbers over a non-exclusive frame.
//!
//! Both rules start from the same redistribution of the pairwise products
//! `D1(B) * D2(C)`. Intersecting pairs land on `B ∩ C` in full. A disjoint
//! pair sends the fraction `u(B, C)` of its product to `B ∪ C` and leaves the
//! rest as residual conflict `K_D`. DCR1 then normalizes by `1 - K_D`; DCR2
//! rescales the redistributed masses so they sum to `f(Q1, Q2)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::aggregator::CompletenessAggregator;
use crate::dnumber::DNumber;
use crate::dst::{self, check_complete, check_pair, CONFLICT_TOLERANCE};
use crate::error::{Error, Result};
use crate::frame::Subset;
use crate::nonexclusive::NonExclusivityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Conjunctive,
    Disjunctive,
    Dempster,
    Yager,
    DuboisPrade,
    Dcr1,
    Dcr2,
}

impl Rule {
    pub const ALL: [Rule; 7] =
        [Rule::Conjunctive, Rule::Disjunctive, Rule::Dempster, Rule::Yager, Rule::DuboisPrade, Rule::Dcr1, Rule::Dcr2];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Conjunctive => "conjunctive",
            Rule::Disjunctive => "disjunctive",
            Rule::Dempster => "dempster",
            Rule::Yager => "yager",
            Rule::DuboisPrade => "dubois-prade",
            Rule::Dcr1 => "dcr1",
            Rule::Dcr2 => "dcr2",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// How more than two D numbers are fused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Left-to-right binary combination in list order.
    #[default]
    Fold,
    /// Combine the pointwise mean with itself `n - 1` times.
    AverageIterate,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fold" => Ok(Strategy::Fold),
            "average" | "average-iterate" => Ok(Strategy::AverageIterate),
            other => Err(format!("unknown strategy `{other}` (fold, average-iterate)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Fold => "fold",
            Strategy::AverageIterate => "average-iterate",
        })
    }
}

/// A combined D number together with the quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionReport {
    pub rule: Rule,
    pub result: DNumber,
    /// Classical global conflict, for the classical rules.
    pub k: Option<f64>,
    /// Residual conflict after non-exclusive redistribution (DCR1).
    pub k_d: Option<f64>,
    /// Sum of the redistributed masses before rescaling (DCR2).
    pub d_t_total: Option<f64>,
    pub q1: f64,
    pub q2: f64,
    /// `f(Q1, Q2)`, the total mass of a DCR2 result.
    pub f_value: Option<f64>,
    pub aggregator: Option<String>,
    /// Number of binary combinations performed.
    pub steps: usize,
}

impl FusionReport {
    fn new(rule: Rule, result: DNumber, d1: &DNumber, d2: &DNumber) -> Self {
        FusionReport {
            rule,
            result,
            k: None,
            k_d: None,
            d_t_total: None,
            q1: d1.q_value(),
            q2: d2.q_value(),
            f_value: None,
            aggregator: None,
            steps: 1,
        }
    }
}

/// Redistributed masses before any normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Redistribution {
    /// `D_t(A)` for every non-empty `A` that received mass.
    pub masses: BTreeMap<Subset, f64>,
    /// Residual conflict `K_D`.
    pub residual_conflict: f64,
}

impl Redistribution {
    pub fn total(&self) -> f64 {
        self.masses.values().fold(0.0, |a, w| a + w)
    }
}

/// Splits every pairwise product between its target subset and the residual
/// conflict. No completeness requirement.
pub fn redistribute(d1: &DNumber, d2: &DNumber, model: &NonExclusivityModel) -> Result<Redistribution> {
    check_pair(d1, d2)?;
    if !(std::sync::Arc::ptr_eq(d1.frame(), model.frame()) || **d1.frame() == **model.frame()) {
        return Err(Error::FrameMismatch);
    }
    let mut masses = BTreeMap::new();
    let mut residual_conflict = 0.0;
    for (b, wb) in d1.focal() {
        for (c, wc) in d2.focal() {
            let product = wb * wc;
            let meet = b.intersection(c);
            if !meet.is_empty() {
                *masses.entry(meet).or_insert(0.0) += product;
                continue;
            }
            let u = model.degree_unchecked(b, c);
            if u > 0.0 {
                *masses.entry(b.union(c)).or_insert(0.0) += u * product;
            }
            residual_conflict += (1.0 - u) * product;
        }
    }
    Ok(Redistribution { masses, residual_conflict })
}

/// Residual conflict `K_D` of two D numbers under `model`.
pub fn residual_conflict(d1: &DNumber, d2: &DNumber, model: &NonExclusivityModel) -> Result<f64> {
    Ok(redistribute(d1, d2, model)?.residual_conflict)
}

/// DCR1: combination of two complete D numbers.
pub fn dcr1(d1: &DNumber, d2: &DNumber, model: &NonExclusivityModel) -> Result<FusionReport> {
    check_pair(d1, d2)?;
    check_complete(d1)?;
    check_complete(d2)?;
    let r = redistribute(d1, d2, model)?;
    let k_d = r.residual_conflict;
    if k_d >= 1.0 - CONFLICT_TOLERANCE {
        return Err(Error::TotalConflict { conflict: k_d });
    }
    // Equals 1 - K_D for complete inputs.
    let norm = r.total();
    let masses = r.masses.into_iter().map(|(s, w)| (s, w / norm)).collect();
    let mut report = FusionReport::new(Rule::Dcr1, DNumber::from_computed(d1.frame().clone(), masses), d1, d2);
    report.k_d = Some(k_d);
    Ok(report)
}

/// DCR2: combination of two possibly incomplete D numbers. The result sums
/// to `f(Q1, Q2)`.
pub fn dcr2(
    d1: &DNumber,
    d2: &DNumber,
    model: &NonExclusivityModel,
    f: &CompletenessAggregator,
) -> Result<FusionReport> {
    let r = redistribute(d1, d2, model)?;
    let total = r.total();
    if total <= CONFLICT_TOLERANCE {
        return Err(Error::TotalConflict { conflict: r.residual_conflict });
    }
    let (q1, q2) = (d1.q_value(), d2.q_value());
    let f_value = f.evaluate(q1, q2);
    if !f_value.is_finite() || f_value < 0.0 {
        return Err(Error::InvalidAggregator { name: f.name().to_string(), reason: format!("f({q1}, {q2}) = {f_value}") });
    }
    let scale = f_value / total;
    let masses = r.masses.into_iter().map(|(s, w)| (s, w * scale)).collect();
    let mut report = FusionReport::new(Rule::Dcr2, DNumber::from_computed(d1.frame().clone(), masses), d1, d2);
    report.d_t_total = Some(total);
    report.f_value = Some(f_value);
    report.aggregator = Some(f.name().to_string());
    Ok(report)
}

/// Applies any rule to a pair. The model is ignored by the classical rules
/// and `f` is used by DCR2 only.
pub fn combine(
    rule: Rule,
    d1: &DNumber,
    d2: &DNumber,
    model: &NonExclusivityModel,
    f: &CompletenessAggregator,
) -> Result<FusionReport> {
    let classical = |result: DNumber| -> Result<FusionReport> {
        let k = dst::conjunctive(d1, d2)?.global_conflict;
        let mut report = FusionReport::new(rule, result, d1, d2);
        report.k = Some(k);
        Ok(report)
    };
    match rule {
        Rule::Conjunctive => {
            let conj = dst::conjunctive(d1, d2)?;
            let mut report =
                FusionReport::new(rule, DNumber::from_computed(d1.frame().clone(), conj.masses), d1, d2);
            report.k = Some(conj.global_conflict);
            Ok(report)
        }
        Rule::Disjunctive => classical(dst::disjunctive(d1, d2)?),
        Rule::Dempster => classical(dst::dempster(d1, d2)?),
        Rule::Yager => classical(dst::yager(d1, d2)?),
        Rule::DuboisPrade => classical(dst::dubois_prade(d1, d2)?),
        Rule::Dcr1 => dcr1(d1, d2, model),
        Rule::Dcr2 => dcr2(d1, d2, model, f),
    }
}

fn check_inputs(ds: &[DNumber]) -> Result<()> {
    if ds.len() < 2 {
        return Err(Error::TooFewInputs(ds.len()));
    }
    ds[1..].iter().try_for_each(|d| check_pair(&ds[0], d))
}

fn at_step(step: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::Step { step, source: Box::new(e) }
}

/// Left-to-right binary combination with any rule. Step `i` (from 1)
/// combines the running result with `ds[i]`; errors carry the step unless
/// there are only two inputs.
pub fn fold(
    rule: Rule,
    ds: &[DNumber],
    model: &NonExclusivityModel,
    f: &CompletenessAggregator,
) -> Result<FusionReport> {
    check_inputs(ds)?;
    if ds.len() == 2 {
        return combine(rule, &ds[0], &ds[1], model, f);
    }
    let mut report = combine(rule, &ds[0], &ds[1], model, f).map_err(at_step(1))?;
    for (step, d) in ds.iter().enumerate().skip(2) {
        report = combine(rule, &report.result, d, model, f).map_err(at_step(step))?;
    }
    report.steps = ds.len() - 1;
    Ok(report)
}

/// Pointwise arithmetic mean of D numbers on a common frame.
pub fn mean(ds: &[DNumber]) -> Result<DNumber> {
    let first = ds.first().ok_or(Error::TooFewInputs(0))?;
    let mut masses = BTreeMap::new();
    for d in ds {
        check_pair(first, d)?;
        for (s, w) in d.focal() {
            *masses.entry(s).or_insert(0.0) += w;
        }
    }
    let n = ds.len() as f64;
    masses.values_mut().for_each(|w| *w /= n);
    Ok(DNumber::from_computed(first.frame().clone(), masses))
}

/// Fuses two or more D numbers with DCR2.
pub fn combine_many(
    ds: &[DNumber],
    model: &NonExclusivityModel,
    f: &CompletenessAggregator,
    strategy: Strategy,
) -> Result<FusionReport> {
    check_inputs(ds)?;
    match strategy {
        Strategy::Fold => fold(Rule::Dcr2, ds, model, f),
        Strategy::AverageIterate => {
            let avg = mean(ds)?;
            let mut report = dcr2(&avg, &avg, model, f).map_err(at_step(1))?;
            for step in 2..ds.len() {
                report = dcr2(&report.result, &avg, model, f).map_err(at_step(step))?;
            }
            report.steps = ds.len() - 1;
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use std::sync::Arc;

    fn abc() -> Arc<Frame> {
        Arc::new(Frame::new(["a", "b", "c"]).unwrap())
    }

    fn example_model(frame: Arc<Frame>) -> NonExclusivityModel {
        NonExclusivityModel::exclusive(frame)
            .with_degree("a", "b", 0.1)
            .unwrap()
            .with_degree("b", "c", 0.2)
            .unwrap()
    }

    fn example_inputs(frame: &Arc<Frame>) -> (DNumber, DNumber) {
        let d1 = DNumber::from_labels(frame.clone(), &[(&["a"][..], 0.7), (&["b", "c"][..], 0.1), (&["a", "b", "c"][..], 0.1)])
            .unwrap();
        let d2 = DNumber::from_labels(frame.clone(), &[(&["a"][..], 0.5), (&["c"][..], 0.3)]).unwrap();
        (d1, d2)
    }

    #[test]
    fn dcr2_worked_example() {
        let frame = abc();
        let (d1, d2) = example_inputs(&frame);
        let model = example_model(frame.clone());
        let r = redistribute(&d1, &d2, &model).unwrap();
        let s = |l: &[&str]| frame.subset(l.iter()).unwrap();
        assert!((r.total() - 0.465).abs() < 1e-12);
        assert!((r.masses[&s(&["a"])] - 0.40).abs() < 1e-12);
        assert!((r.masses[&s(&["c"])] - 0.06).abs() < 1e-12);
        assert!((r.masses[&s(&["a", "b", "c"])] - 0.005).abs() < 1e-12);
        assert!(!r.masses.contains_key(&s(&["a", "c"])));

        let rep = dcr2(&d1, &d2, &model, &CompletenessAggregator::Product).unwrap();
        assert!((rep.f_value.unwrap() - 0.72).abs() < 1e-12);
        assert!((rep.result.mass(s(&["a"])) - 0.6194).abs() < 5e-5);
        assert!((rep.result.mass(s(&["c"])) - 0.0929).abs() < 5e-5);
        assert!((rep.result.mass(s(&["a", "b", "c"])) - 0.0077).abs() < 5e-5);
        assert_eq!(rep.result.len(), 3);
        assert!((rep.result.q_value() - 0.72).abs() < 1e-12);
        assert_eq!(rep.k_d, None);
    }

    #[test]
    fn dcr1_high_medium() {
        let frame = Arc::new(Frame::new(["High", "Medium", "Low"]).unwrap());
        let d1 = DNumber::from_labels(frame.clone(), &[(&["High"], 1.0)]).unwrap();
        let d2 = DNumber::from_labels(frame.clone(), &[(&["Medium"], 1.0)]).unwrap();
        let hm = frame.subset(["High", "Medium"]).unwrap();
        for p in [0.01, 0.1, 0.5, 1.0] {
            let model = NonExclusivityModel::exclusive(frame.clone()).with_degree("High", "Medium", p).unwrap();
            let rep = dcr1(&d1, &d2, &model).unwrap();
            assert_eq!(rep.result.mass(hm), 1.0, "p = {p}");
            assert!((rep.k_d.unwrap() - (1.0 - p)).abs() < 1e-12);
        }
        let model = NonExclusivityModel::exclusive(frame.clone());
        assert_eq!(dcr1(&d1, &d2, &model), Err(Error::TotalConflict { conflict: 1.0 }));
    }

    #[test]
    fn dcr1_rejects_incomplete_and_foreign() {
        let frame = abc();
        let (d1, d2) = example_inputs(&frame);
        let model = example_model(frame.clone());
        assert!(matches!(dcr1(&d1, &d2, &model), Err(Error::IncompleteInput { .. })));
        let other = NonExclusivityModel::exclusive(Arc::new(Frame::new(["x"]).unwrap()));
        let v = DNumber::vacuous(frame);
        assert_eq!(dcr1(&v, &v, &other), Err(Error::FrameMismatch));
    }

    #[test]
    fn dcr2_single_cell() {
        let frame = abc();
        let d = DNumber::from_labels(frame.clone(), &[(&["a"], 0.5)]).unwrap();
        let model = NonExclusivityModel::exclusive(frame.clone());
        let rep = dcr2(&d, &d, &model, &CompletenessAggregator::Product).unwrap();
        assert_eq!(rep.result.mass(frame.singleton("a").unwrap()), 0.25);
        assert_eq!(rep.d_t_total, Some(0.25));
    }

    #[test]
    fn dcr2_disjoint_exclusive_is_total_conflict() {
        let frame = abc();
        let d1 = DNumber::from_labels(frame.clone(), &[(&["a"], 0.5)]).unwrap();
        let d2 = DNumber::from_labels(frame.clone(), &[(&["b"], 0.5)]).unwrap();
        let model = NonExclusivityModel::exclusive(frame);
        assert_eq!(
            dcr2(&d1, &d2, &model, &CompletenessAggregator::Product),
            Err(Error::TotalConflict { conflict: 0.25 })
        );
    }

    #[test]
    fn fold_reports_failing_step() {
        let frame = abc();
        let a = DNumber::from_labels(frame.clone(), &[(&["a"], 1.0)]).unwrap();
        let b = DNumber::from_labels(frame.clone(), &[(&["b"], 1.0)]).unwrap();
        let v = DNumber::vacuous(frame.clone());
        let model = NonExclusivityModel::exclusive(frame);
        let err = combine_many(&[v, a, b], &model, &CompletenessAggregator::Product, Strategy::Fold).unwrap_err();
        assert!(matches!(err, Error::Step { step: 2, .. }));
        assert_eq!(*err.root(), Error::TotalConflict { conflict: 1.0 });
    }

    #[test]
    fn combine_many_edge_cases() {
        let frame = abc();
        let (d1, _) = example_inputs(&frame);
        let model = NonExclusivityModel::exclusive(frame.clone());
        let f = CompletenessAggregator::Product;
        assert_eq!(combine_many(std::slice::from_ref(&d1), &model, &f, Strategy::Fold), Err(Error::TooFewInputs(1)));
        let foreign = DNumber::vacuous(Arc::new(Frame::new(["x"]).unwrap()));
        assert_eq!(combine_many(&[d1, foreign], &model, &f, Strategy::Fold), Err(Error::FrameMismatch));
    }

    #[test]
    fn mean_of_identical_inputs() {
        let frame = abc();
        let (d1, _) = example_inputs(&frame);
        let m = mean(&[d1.clone(), d1.clone(), d1.clone()]).unwrap();
        for (s, w) in d1.focal() {
            assert!((m.mass(s) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn classical_dispatch_reports_conflict() {
        let frame = abc();
        let m1 = DNumber::from_labels(frame.clone(), &[(&["a"][..], 0.6), (&["a", "b"][..], 0.4)]).unwrap();
        let m2 = DNumber::from_labels(frame.clone(), &[(&["b"][..], 0.5), (&["a", "b", "c"][..], 0.5)]).unwrap();
        let model = NonExclusivityModel::exclusive(frame);
        for rule in [Rule::Conjunctive, Rule::Disjunctive, Rule::Dempster, Rule::Yager, Rule::DuboisPrade] {
            let rep = combine(rule, &m1, &m2, &model, &CompletenessAggregator::Product).unwrap();
            assert!((rep.k.unwrap() - 0.3).abs() < 1e-15, "{rule}");
        }
        let conj = combine(Rule::Conjunctive, &m1, &m2, &model, &CompletenessAggregator::Product).unwrap();
        assert!((conj.result.q_value() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in Rule::ALL {
            assert_eq!(rule.as_str().parse::<Rule>().unwrap(), rule);
        }
        assert!("pcr5".parse::<Rule>().is_err());
        assert_eq!("average-iterate".parse::<Strategy>().unwrap(), Strategy::AverageIterate);
    }
}
