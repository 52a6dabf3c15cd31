//! The `dnumbers` command-line driver.
//!
//! [`run`] parses arguments, executes one subcommand against a scenario file
//! and returns the exit status together with everything that would be
//! written to stdout and stderr. Exit status 1 means the command line, a
//! scenario or an f-table could not be read or is invalid; 2 means the inputs
//! are valid but the requested computation is undefined for them.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dnumbers::aggregator::GRID_POINTS;
use dnumbers::fusion::{self, Rule, Strategy};
use dnumbers::scenario::{self, ReportDocument, Scenario, ScenarioError};
use dnumbers::{CompletenessAggregator, DNumber, Error, NonExclusivityModel, Subset};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dnumbers", version, about = "Combine evidence with Dempster-Shafer and D-number rules")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Human, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Combine the scenario's D numbers with one rule.
    Combine(CombineArgs),
    /// Belief of a subset under each D number.
    Bel(MeasureArgs),
    /// Plausibility of a subset under each D number.
    Pl(MeasureArgs),
    /// Total mass (Q value) of each D number.
    Qvalue(Input),
    /// Classical conflict K and residual conflict K_D of two D numbers.
    Conflict(Input),
    /// Print the subset-pair degree matrix.
    Matrix {
        #[arg(value_enum)]
        kind: MatrixKind,
        #[command(flatten)]
        input: Input,
    },
    /// Check a scenario and, optionally, an f-table.
    Validate {
        /// 101 x 101 table of f(Q1, Q2) samples.
        #[arg(long)]
        f_table: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    /// Non-exclusive degrees.
    Expand,
    /// Exclusive degrees, one minus the non-exclusive ones.
    Exclusive,
}

#[derive(Debug, Args)]
struct Input {
    /// Scenario file; standard input when omitted or `-`.
    scenario: Option<PathBuf>,
    /// Comma-separated D number names, in order. Defaults to all.
    #[arg(long = "use", value_delimiter = ',')]
    names: Vec<String>,
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// conjunctive, disjunctive, dempster, yager, dubois-prade, dcr1 or dcr2
    #[arg(long)]
    rule: Rule,
    /// Completeness function for dcr2: product, min, max, avg or one.
    #[arg(long = "f", default_value = "product")]
    f: CompletenessAggregator,
    /// 101 x 101 table of f(Q1, Q2) samples; overrides --f.
    #[arg(long)]
    f_table: Option<PathBuf>,
    /// Multi-source strategy for dcr2: fold or average-iterate.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[command(flatten)]
    input: Input,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Subset as comma-separated labels. Every non-empty subset when omitted.
    #[arg(long)]
    subset: Option<String>,
    #[command(flatten)]
    input: Input,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Scenario(ScenarioError),
    Domain(Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Usage(_) | CliError::Io(_) | CliError::Scenario(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Scenario(e) => e.to_string(),
            CliError::Domain(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Scenario(e)
    }
}

/// Runs with the process's standard input.
pub fn run_cli<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run(args, &mut std::io::stdin())
}

pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli, stdin) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {}\n", e.message()) },
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<String, CliError> {
    let machine = cli.output == Output::Machine;
    match &cli.command {
        Command::Combine(args) => combine(args, machine, stdin),
        Command::Bel(args) => measure(args, Measure::Belief, machine, stdin),
        Command::Pl(args) => measure(args, Measure::Plausibility, machine, stdin),
        Command::Qvalue(input) => qvalue(input, machine, stdin),
        Command::Conflict(input) => conflict(input, machine, stdin),
        Command::Matrix { kind, input } => matrix(*kind, input, machine, stdin),
        Command::Validate { f_table, input } => validate(f_table.as_deref(), input, machine, stdin),
    }
}

fn load(input: &Input, stdin: &mut dyn Read) -> Result<Scenario, CliError> {
    let text = match input.scenario.as_deref() {
        Some(path) if path != Path::new("-") => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(|e| CliError::Io(format!("cannot read stdin: {e}")))?;
            text
        }
    };
    Ok(scenario::parse_scenario(&text)?.resolve()?)
}

/// Reads an f-table: 101 rows of 101 numbers separated by commas or
/// whitespace. Blank lines and `#` comments are ignored.
fn load_f_table(path: &Path) -> Result<CompletenessAggregator, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Io(format!("{}:{}: {e}", path.display(), n + 1)))?;
        if row.len() != GRID_POINTS {
            return Err(CliError::Io(format!(
                "{}:{}: expected {GRID_POINTS} values, found {}",
                path.display(),
                n + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != GRID_POINTS {
        return Err(CliError::Io(format!("{}: expected {GRID_POINTS} rows, found {}", path.display(), rows.len())));
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "f-table".into());
    Ok(CompletenessAggregator::from_table(name, rows)?)
}

fn combine(args: &CombineArgs, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let f = match &args.f_table {
        Some(path) => load_f_table(path)?,
        None => args.f.clone(),
    };
    if args.strategy.is_some() && args.rule != Rule::Dcr2 {
        return Err(CliError::Usage(format!("--strategy applies to dcr2 only, not {}", args.rule)));
    }
    let sc = load(&args.input, stdin)?;
    let inputs = sc.select(&args.input.names)?;
    let ds: Vec<DNumber> = inputs.iter().map(|(_, d)| d.clone()).collect();
    let report = match (args.rule, args.strategy) {
        (Rule::Dcr2, Some(strategy)) => fusion::combine_many(&ds, &sc.model, &f, strategy)?,
        (rule, _) => fusion::fold(rule, &ds, &sc.model, &f)?,
    };
    let doc = ReportDocument::new(&report, &inputs, &sc.model, args.strategy);
    Ok(if machine { doc.to_machine() } else { doc.to_human() })
}

#[derive(Clone, Copy)]
enum Measure {
    Belief,
    Plausibility,
}

#[derive(Serialize)]
struct MeasureDocument {
    name: String,
    measure: &'static str,
    incomplete_source: bool,
    values: Vec<MeasureValue>,
}

#[derive(Serialize)]
struct MeasureValue {
    subset: Vec<String>,
    value: f64,
}

fn measure(args: &MeasureArgs, which: Measure, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let sc = load(&args.input, stdin)?;
    let subsets: Vec<Subset> = match &args.subset {
        Some(text) => vec![scenario::parse_subset(&sc.frame, text).map_err(|e| CliError::Usage(format!("--subset: {e}")))?],
        None => sc.frame.nonempty_subsets(),
    };
    let docs = sc
        .select(&args.input.names)?
        .into_iter()
        .map(|(name, d)| {
            let values = subsets
                .iter()
                .map(|&s| {
                    let value = match which {
                        Measure::Belief => d.belief(s)?,
                        Measure::Plausibility => d.plausibility(s)?,
                    };
                    Ok(MeasureValue { subset: sc.frame.sorted_labels_of(s), value })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let measure = match which {
                Measure::Belief => "bel",
                Measure::Plausibility => "pl",
            };
            Ok(MeasureDocument { name, measure, incomplete_source: !d.is_complete(), values })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if machine {
        return Ok(to_json(&docs));
    }
    let mut out = String::new();
    for doc in &docs {
        let note = if doc.incomplete_source { "  (incomplete source: raw sums)" } else { "" };
        writeln!(out, "{}{note}", doc.name).unwrap();
        let labels: Vec<String> =
            doc.values.iter().map(|v| format!("{}({{{}}})", doc.measure, v.subset.join(","))).collect();
        let width = labels.iter().map(String::len).max().unwrap_or(0);
        for (label, v) in labels.iter().zip(&doc.values) {
            writeln!(out, "  {label:<width$} = {:.4}", v.value).unwrap();
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct QDocument {
    name: String,
    q: f64,
    complete: bool,
}

fn qvalue(input: &Input, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let sc = load(input, stdin)?;
    let docs: Vec<QDocument> = sc
        .select(&input.names)?
        .into_iter()
        .map(|(name, d)| QDocument { name, q: d.q_value(), complete: d.is_complete() })
        .collect();
    if machine {
        return Ok(to_json(&docs));
    }
    let width = docs.iter().map(|d| d.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for d in &docs {
        let tag = if d.complete { "complete" } else { "incomplete" };
        writeln!(out, "{:<width$}  Q = {:.4}  {tag}", d.name, d.q).unwrap();
    }
    Ok(out)
}

#[derive(Serialize)]
struct ConflictDocument {
    first: String,
    second: String,
    k: f64,
    k_d: f64,
}

fn conflict(input: &Input, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let sc = load(input, stdin)?;
    let inputs = sc.select(&input.names)?;
    if inputs.len() < 2 {
        return Err(Error::TooFewInputs(inputs.len()).into());
    }
    let ((n1, d1), (n2, d2)) = (&inputs[0], &inputs[1]);
    let exclusive = NonExclusivityModel::exclusive(sc.frame.clone());
    let doc = ConflictDocument {
        first: n1.clone(),
        second: n2.clone(),
        k: fusion::residual_conflict(d1, d2, &exclusive)?,
        k_d: fusion::residual_conflict(d1, d2, &sc.model)?,
    };
    if machine {
        return Ok(to_json(&doc));
    }
    Ok(format!("{} x {}\nK    {:.4}\nK_D  {:.4}\n", doc.first, doc.second, doc.k, doc.k_d))
}

fn matrix(kind: MatrixKind, input: &Input, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let sc = load(input, stdin)?;
    let mut m = sc.model.expand_matrix()?;
    if kind == MatrixKind::Exclusive {
        m = m.complement();
    }
    Ok(if machine { scenario::matrix_to_machine(&sc.frame, &m) } else { scenario::render_matrix(&sc.frame, &m) })
}

#[derive(Serialize)]
struct ValidateDocument {
    labels: usize,
    dnumbers: Vec<QDocument>,
    pairs: usize,
    overrides: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_table: Option<String>,
}

fn validate(f_table: Option<&Path>, input: &Input, machine: bool, stdin: &mut dyn Read) -> Result<String, CliError> {
    let sc = load(input, stdin)?;
    let table = f_table.map(load_f_table).transpose()?;
    let doc = ValidateDocument {
        labels: sc.frame.len(),
        dnumbers: sc
            .dnumbers
            .iter()
            .map(|(name, d)| QDocument { name: name.clone(), q: d.q_value(), complete: d.is_complete() })
            .collect(),
        pairs: sc.model.element_pairs().count(),
        overrides: sc.model.overrides().count(),
        f_table: table.map(|t| t.name().to_string()),
    };
    if machine {
        return Ok(to_json(&doc));
    }
    let complete = doc.dnumbers.iter().filter(|d| d.complete).count();
    let mut out = format!(
        "scenario ok: {} labels, {} D numbers ({complete} complete), {} non-zero pairs, {} overrides\n",
        doc.labels,
        doc.dnumbers.len(),
        doc.pairs,
        doc.overrides
    );
    if let Some(name) = &doc.f_table {
        writeln!(out, "f-table ok: {name} satisfies 0 <= f <= max(Q1, Q2) and f(1, 1) = 1").unwrap();
    }
    Ok(out)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}
