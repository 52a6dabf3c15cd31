//! Scenario files and combination reports.
//!
//! A scenario is a TOML document holding a frame, any number of named D
//! numbers and a non-exclusivity model:
//!
//! ```toml
//! frame = ["a", "b", "c"]
//!
//! [[dnumbers]]
//! name = "D1"
//! masses = [
//!     { subset = ["a"], weight = 0.7 },
//!     { subset = ["b", "c"], weight = 0.1 },
//! ]
//!
//! [nonexclusivity]
//! pairs = [
//!     { elements = ["a", "b"], degree = 0.1 },
//! ]
//! overrides = [
//!     { subsets = [["a"], ["b", "c"]], degree = 0.3 },
//! ]
//! ```
//!
//! Subsets are always written as label lists, so a file does not depend on
//! the order of `frame`. Element pairs left out of `pairs` have degree 0.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dnumber::DNumber;
use crate::error::Error;
use crate::frame::{Frame, Subset};
use crate::fusion::{FusionReport, Strategy};
use crate::nonexclusive::{DegreeMatrix, NonExclusivityModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub frame: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dnumbers: Vec<DNumberSpec>,
    #[serde(default, skip_serializing_if = "NonExclusivitySpec::is_empty")]
    pub nonexclusivity: NonExclusivitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DNumberSpec {
    pub name: String,
    #[serde(default)]
    pub masses: Vec<MassEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    pub subset: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonExclusivitySpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairDegree>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideDegree>,
}

impl NonExclusivitySpec {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.overrides.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDegree {
    pub elements: [String; 2],
    pub degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideDegree {
    pub subsets: [Vec<String>; 2],
    pub degree: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown label `{label}` in {context}")]
    UnknownLabel { label: String, context: String },
    #[error("{context}: value {value} outside [0, 1]")]
    OutOfRange { context: String, value: f64 },
    #[error("duplicate pair {0}")]
    DuplicatePair(String),
    #[error("duplicate D number name `{0}`")]
    DuplicateName(String),
    #[error("no D number named `{0}`")]
    UnknownDNumber(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, ScenarioError> {
    let doc: ScenarioDocument = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    doc.validate()?;
    Ok(doc)
}

fn syntax_error(text: &str, e: &toml::de::Error) -> ScenarioError {
    let offset = e.span().map(|s| s.start).unwrap_or(0).min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    ScenarioError::Syntax { line, column, message: e.message().trim().to_string() }
}

/// Canonical TOML rendering; `parse_scenario(&print_scenario(doc))` returns `doc`.
pub fn print_scenario(doc: &ScenarioDocument) -> String {
    let mut out = String::new();
    let list = |labels: &[String]| {
        let quoted: Vec<String> = labels.iter().map(|l| toml_string(l)).collect();
        format!("[{}]", quoted.join(", "))
    };
    writeln!(out, "frame = {}", list(&doc.frame)).unwrap();
    for d in &doc.dnumbers {
        writeln!(out, "\n[[dnumbers]]\nname = {}\nmasses = [", toml_string(&d.name)).unwrap();
        for m in &d.masses {
            writeln!(out, "    {{ subset = {}, weight = {} }},", list(&m.subset), toml_float(m.weight)).unwrap();
        }
        writeln!(out, "]").unwrap();
    }
    let ne = &doc.nonexclusivity;
    if !ne.is_empty() {
        writeln!(out, "\n[nonexclusivity]").unwrap();
        if !ne.pairs.is_empty() {
            writeln!(out, "pairs = [").unwrap();
            for p in &ne.pairs {
                writeln!(out, "    {{ elements = {}, degree = {} }},", list(&p.elements), toml_float(p.degree)).unwrap();
            }
            writeln!(out, "]").unwrap();
        }
        if !ne.overrides.is_empty() {
            writeln!(out, "overrides = [").unwrap();
            for o in &ne.overrides {
                let (x, y) = (list(&o.subsets[0]), list(&o.subsets[1]));
                writeln!(out, "    {{ subsets = [{x}, {y}], degree = {} }},", toml_float(o.degree)).unwrap();
            }
            writeln!(out, "]").unwrap();
        }
    }
    out
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn toml_float(v: f64) -> String {
    toml::Value::Float(v).to_string()
}

fn check_unit(context: impl FnOnce() -> String, value: f64) -> Result<(), ScenarioError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ScenarioError::OutOfRange { context: context(), value })
    }
}

fn unordered<T: Ord + Clone>(x: &T, y: &T) -> (T, T) {
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

impl ScenarioDocument {
    /// Checks labels, value ranges and duplicate pairs without building the
    /// domain objects.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let frame = Frame::new(self.frame.iter().cloned())?;
        let known = |label: &String, context: &dyn Fn() -> String| {
            if frame.index_of(label).is_some() {
                Ok(())
            } else {
                Err(ScenarioError::UnknownLabel { label: label.clone(), context: context() })
            }
        };
        let mut names = HashSet::new();
        for d in &self.dnumbers {
            if !names.insert(d.name.as_str()) {
                return Err(ScenarioError::DuplicateName(d.name.clone()));
            }
            for m in &d.masses {
                let context = || format!("D number `{}`", d.name);
                m.subset.iter().try_for_each(|l| known(l, &context))?;
                check_unit(context, m.weight)?;
            }
        }
        let mut seen = HashSet::new();
        for p in &self.nonexclusivity.pairs {
            let context = || format!("pair ({}, {})", p.elements[0], p.elements[1]);
            p.elements.iter().try_for_each(|l| known(l, &context))?;
            check_unit(context, p.degree)?;
            if !seen.insert(unordered(&p.elements[0], &p.elements[1])) {
                return Err(ScenarioError::DuplicatePair(context()));
            }
        }
        let mut seen = HashSet::new();
        for o in &self.nonexclusivity.overrides {
            let context = || format!("override ({:?}, {:?})", o.subsets[0], o.subsets[1]);
            o.subsets.iter().flatten().try_for_each(|l| known(l, &context))?;
            check_unit(context, o.degree)?;
            let key = |s: &Vec<String>| {
                let mut s = s.clone();
                s.sort();
                s.dedup();
                s
            };
            if !seen.insert(unordered(&key(&o.subsets[0]), &key(&o.subsets[1]))) {
                return Err(ScenarioError::DuplicatePair(context()));
            }
        }
        Ok(())
    }

    /// Builds the frame, D numbers and model.
    pub fn resolve(&self) -> Result<Scenario, ScenarioError> {
        self.validate()?;
        let frame = Arc::new(Frame::new(self.frame.iter().cloned())?);
        let dnumbers = self
            .dnumbers
            .iter()
            .map(|d| {
                let entries = d
                    .masses
                    .iter()
                    .map(|m| Ok((frame.subset(m.subset.iter())?, m.weight)))
                    .collect::<Result<Vec<_>, Error>>()?;
                Ok((d.name.clone(), DNumber::new(frame.clone(), entries)?))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let mut model = NonExclusivityModel::exclusive(frame.clone());
        for p in &self.nonexclusivity.pairs {
            model.set_label_degree(&p.elements[0], &p.elements[1], p.degree)?;
        }
        for o in &self.nonexclusivity.overrides {
            model.set_override(frame.subset(o.subsets[0].iter())?, frame.subset(o.subsets[1].iter())?, o.degree)?;
        }
        Ok(Scenario { frame, dnumbers, model })
    }
}

/// A resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub frame: Arc<Frame>,
    pub dnumbers: Vec<(String, DNumber)>,
    pub model: NonExclusivityModel,
}

impl Scenario {
    pub fn get(&self, name: &str) -> Result<&DNumber, ScenarioError> {
        self.dnumbers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
            .ok_or_else(|| ScenarioError::UnknownDNumber(name.to_string()))
    }

    /// Named D numbers in the order given, or all of them for an empty selection.
    pub fn select(&self, names: &[String]) -> Result<Vec<(String, DNumber)>, ScenarioError> {
        if names.is_empty() {
            return Ok(self.dnumbers.clone());
        }
        names.iter().map(|n| Ok((n.clone(), self.get(n)?.clone()))).collect()
    }
}

/// SHA-256 over a frame-order independent rendering of a D number.
pub fn dnumber_digest(d: &DNumber) -> String {
    let frame = d.frame();
    let mut lines: Vec<String> = d
        .focal()
        .map(|(s, w)| format!("{}={}", frame.sorted_labels_of(s).join(","), w))
        .collect();
    lines.sort();
    sha256_hex(lines.join("\n").as_bytes())
}

/// SHA-256 over a frame-order independent rendering of a model.
pub fn model_digest(model: &NonExclusivityModel) -> String {
    let frame = model.frame();
    let name = |i: usize| frame.label(i).unwrap_or_default().to_string();
    let mut lines: Vec<String> = model
        .element_pairs()
        .map(|(i, j, p)| {
            let (x, y) = unordered(&name(i), &name(j));
            format!("pair {x},{y}={p}")
        })
        .collect();
    lines.extend(model.overrides().map(|(x, y, p)| {
        let (x, y) = unordered(&frame.sorted_labels_of(x), &frame.sorted_labels_of(y));
        format!("override {}|{}={p}", x.join(","), y.join(","))
    }));
    lines.sort();
    sha256_hex(lines.join("\n").as_bytes())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    pub inputs: Vec<InputDigest>,
    pub model_sha256: String,
    pub result: Vec<WeightEntry>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub q: f64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightEntry {
    pub subset: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_t_total: Option<f64>,
    pub q1: f64,
    pub q2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_value: Option<f64>,
    pub total: f64,
    pub steps: usize,
}

impl ReportDocument {
    pub fn new(
        report: &FusionReport,
        inputs: &[(String, DNumber)],
        model: &NonExclusivityModel,
        strategy: Option<Strategy>,
    ) -> Self {
        let frame = report.result.frame();
        let result = report
            .result
            .focal_canonical()
            .into_iter()
            .map(|(s, weight)| WeightEntry { subset: frame.sorted_labels_of(s), weight })
            .collect();
        ReportDocument {
            rule: report.rule.to_string(),
            aggregator: report.aggregator.clone(),
            strategy: strategy.map(|s| s.to_string()),
            inputs: inputs
                .iter()
                .map(|(name, d)| InputDigest { name: name.clone(), q: d.q_value(), sha256: dnumber_digest(d) })
                .collect(),
            model_sha256: model_digest(model),
            result,
            diagnostics: Diagnostics {
                k: report.k,
                k_d: report.k_d,
                d_t_total: report.d_t_total,
                q1: report.q1,
                q2: report.q2,
                f_value: report.f_value,
                total: report.result.q_value(),
                steps: report.steps,
            },
        }
    }

    /// Pretty JSON with full-precision numbers.
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned text with values rounded to 4 decimals.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        write!(out, "rule: {}", self.rule).unwrap();
        if let Some(f) = &self.aggregator {
            write!(out, " (f = {f})").unwrap();
        }
        if let Some(s) = &self.strategy {
            write!(out, " [{s}]").unwrap();
        }
        out.push('\n');
        let inputs: Vec<String> = self.inputs.iter().map(|i| format!("{} (Q = {:.4})", i.name, i.q)).collect();
        writeln!(out, "inputs: {}", inputs.join(", ")).unwrap();
        writeln!(out, "result:").unwrap();
        let rendered: Vec<String> = self.result.iter().map(|w| format!("{{{}}}", w.subset.join(","))).collect();
        let width = rendered.iter().map(String::len).max().unwrap_or(0);
        for (label, w) in rendered.iter().zip(&self.result) {
            writeln!(out, "  {label:<width$}  {:.4}", w.weight).unwrap();
        }
        let d = &self.diagnostics;
        let mut line = |name: &str, v: Option<f64>| {
            if let Some(v) = v {
                writeln!(out, "{name:<10} {v:.4}").unwrap();
            }
        };
        line("K", d.k);
        line("K_D", d.k_d);
        line("sum D_t", d.d_t_total);
        line("Q1", Some(d.q1));
        line("Q2", Some(d.q2));
        line("f(Q1,Q2)", d.f_value);
        line("total", Some(d.total));
        if d.steps > 1 {
            writeln!(out, "steps      {}", d.steps).unwrap();
        }
        out
    }
}

/// Renders a degree matrix with subset headers, 4 decimals per entry.
pub fn render_matrix(frame: &Frame, matrix: &DegreeMatrix) -> String {
    let names: Vec<String> = matrix.subsets().iter().map(|&s| frame.display(s)).collect();
    let width = names.iter().map(String::len).max().unwrap_or(0).max(6);
    let mut out = format!("{:width$}", "");
    for n in &names {
        write!(out, " {n:>width$}").unwrap();
    }
    out.push('\n');
    for (name, row) in names.iter().zip(matrix.rows()) {
        write!(out, "{name:<width$}").unwrap();
        for v in row {
            write!(out, " {v:>width$.4}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct MatrixDocument<'a> {
    subsets: Vec<Vec<String>>,
    values: Vec<&'a [f64]>,
}

/// JSON form of a degree matrix: subsets as sorted label lists plus rows.
pub fn matrix_to_machine(frame: &Frame, matrix: &DegreeMatrix) -> String {
    let doc = MatrixDocument {
        subsets: matrix.subsets().iter().map(|&s| frame.sorted_labels_of(s)).collect(),
        values: matrix.rows().collect(),
    };
    serde_json::to_string_pretty(&doc).expect("matrix serializes") + "\n"
}

/// Labels joined as `a,b`, parsed back into a subset.
pub fn parse_subset(frame: &Frame, text: &str) -> Result<Subset, Error> {
    frame.subset(text.split(',').map(str::trim).filter(|l| !l.is_empty()))
}
