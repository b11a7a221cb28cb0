//! Command-line front end: flag parsing, run dispatch, report rendering and
//! circuit dumps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::grover::{self, GroverPlan, Iterations, RunResult, TuneResult};
use crate::perceptron::{Assignment, InputMode, Predicate};
use crate::qarith::ProblemSpec;
use crate::statevector::Histogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Search weights for fixed inputs.
    Weights,
    /// Search inputs and weights together.
    Joint,
    /// Scan iteration counts without using the solution count.
    Tune,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Weights => "weights",
            Mode::Joint => "joint",
            Mode::Tune => "tune",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "grover-perceptron",
    version,
    about = "Train a threshold perceptron by Grover search on an exact simulator"
)]
struct Args {
    /// Activation threshold Ac.
    #[arg(long)]
    ac: u64,
    #[arg(long, default_value_t = 2)]
    n_inputs: usize,
    #[arg(long, default_value_t = 2)]
    weight_bits: usize,
    /// equal or geq
    #[arg(long, default_value = "equal", value_parser = parse_predicate)]
    predicate: Predicate,
    #[arg(long, value_enum, default_value_t = Mode::Weights)]
    mode: Mode,
    /// Comma-separated input bits, I1 first (required in weights mode).
    #[arg(long, value_parser = parse_bits)]
    inputs: Option<Bits>,
    /// `auto` or an explicit count.
    #[arg(long, default_value = "auto", value_parser = parse_iterations)]
    iterations: Iterations,
    /// Largest iteration count scanned in tune mode.
    #[arg(long)]
    max_k: Option<usize>,
    /// Sampled measurements; 0 reports the exact distribution only.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print the gate list instead of running it.
    #[arg(long)]
    dump_circuit: bool,
}

fn parse_predicate(s: &str) -> Result<Predicate, String> {
    s.parse()
        .map_err(|_| "expected `equal` or `geq`".to_string())
}

#[derive(Debug, Clone)]
struct Bits(Vec<bool>);

fn parse_bits(s: &str) -> Result<Bits, String> {
    s.split(',')
        .map(|t| match t.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(format!("input bits must be 0 or 1, got `{other}`")),
        })
        .collect::<Result<_, _>>()
        .map(Bits)
}

fn parse_iterations(s: &str) -> Result<Iterations, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Iterations::Auto);
    }
    s.parse()
        .map(Iterations::Fixed)
        .map_err(|_| "expected `auto` or a non-negative integer".to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub ac: u64,
    pub n_inputs: usize,
    pub weight_bits: usize,
    pub predicate: Predicate,
    pub mode: Mode,
    #[serde(serialize_with = "serialize_bits")]
    pub inputs: Option<Vec<bool>>,
    #[serde(serialize_with = "serialize_iterations")]
    pub iterations: Iterations,
    pub max_k: Option<usize>,
    pub shots: usize,
    pub seed: u64,
    pub format: Format,
    pub dump_circuit: bool,
}

fn serialize_bits<S: serde::Serializer>(bits: &Option<Vec<bool>>, s: S) -> Result<S::Ok, S::Error> {
    bits.as_ref()
        .map(|b| b.iter().map(|&x| x as u8).collect::<Vec<_>>())
        .serialize(s)
}

fn serialize_iterations<S: serde::Serializer>(it: &Iterations, s: S) -> Result<S::Ok, S::Error> {
    match it {
        Iterations::Auto => s.serialize_str("auto"),
        Iterations::Fixed(k) => s.serialize_u64(*k as u64),
    }
}

impl Config {
    pub fn spec(&self) -> Result<ProblemSpec, Error> {
        ProblemSpec::new(self.n_inputs, self.weight_bits, self.ac, self.predicate)
    }

    fn input_mode(&self) -> InputMode {
        match (&self.inputs, self.mode) {
            (_, Mode::Joint) | (None, _) => InputMode::Joint,
            (Some(bits), _) => InputMode::Fixed(bits.clone()),
        }
    }
}

/// Why the command line could not be turned into a run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    /// `--help` or `--version`: print and exit successfully.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Parses flags (the first item is the program name) into a validated
/// config.
pub fn parse_config<I, T>(args: I) -> Result<Config, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let config = Config {
        ac: args.ac,
        n_inputs: args.n_inputs,
        weight_bits: args.weight_bits,
        predicate: args.predicate,
        mode: args.mode,
        inputs: args.inputs.map(|b| b.0),
        iterations: args.iterations,
        max_k: args.max_k,
        shots: args.shots,
        seed: args.seed,
        format: args.format,
        dump_circuit: args.dump_circuit,
    };
    let usage = |flag: &str, msg: String| CliError::Usage(format!("error: {flag}: {msg}"));
    if let Err(e) = config.spec() {
        let flag = match e.to_string() {
            m if m.contains("n_inputs") => "--n-inputs",
            m if m.contains("weight_bits") => "--weight-bits",
            _ => "--ac",
        };
        return Err(usage(flag, e.to_string()));
    }
    match &config.inputs {
        None if config.mode == Mode::Weights => {
            return Err(usage("--inputs", "required in weights mode".into()));
        }
        Some(bits) if bits.len() != config.n_inputs => {
            return Err(usage(
                "--inputs",
                format!("expected {} bits, got {}", config.n_inputs, bits.len()),
            ));
        }
        _ => {}
    }
    if config.max_k == Some(0) {
        return Err(usage("--max-k", "must be at least 1".into()));
    }
    Ok(config)
}

/// One outcome of the search register.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub bits: String,
    pub values: Vec<u64>,
    pub prob: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalEntry {
    pub bits: String,
    pub values: Vec<u64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRow {
    pub inputs: Vec<u8>,
    pub weights: Vec<u64>,
    pub bits: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: Config,
    pub plan: GroverPlan,
    /// Search register names, in the order of each entry's `bits` fields.
    pub registers: Vec<String>,
    pub distribution: Vec<Entry>,
    pub solutions: Vec<SolutionRow>,
    pub no_solutions_detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_marginal: Option<Vec<MarginalEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneResult>,
}

fn resolve(
    config: &Config,
) -> Result<(ProblemSpec, InputMode, Iterations, Option<TuneResult>), Error> {
    let spec = config.spec()?;
    let mode = config.input_mode();
    if config.mode != Mode::Tune {
        return Ok((spec, mode, config.iterations, None));
    }
    let max_k = match config.max_k {
        Some(k) => k,
        None => grover::grover_iterations(spec.search_qubits(mode == InputMode::Joint), 1)?,
    };
    let tune = grover::tune_iterations(&spec, &mode, max_k)?;
    Ok((spec, mode, Iterations::Fixed(tune.best_k), Some(tune)))
}

/// Runs the configured search and assembles its report.
pub fn execute(config: &Config) -> Result<Report, Error> {
    let (spec, mode, iterations, tune) = resolve(config)?;
    let result = match &mode {
        InputMode::Fixed(bits) => grover::run_weight_search(&spec, bits, iterations)?,
        InputMode::Joint => grover::run_joint_search(&spec, iterations)?,
    };
    let mut plan = result.plan;
    if tune.is_some() {
        plan.l = 0;
    }
    let weight_marginal = match mode {
        InputMode::Joint => Some(marginal_entries(&grover::weight_marginal(&result)?)),
        InputMode::Fixed(_) => None,
    };
    let counts = match config.shots {
        0 => None,
        shots => Some(result.search_marginal.sample(shots, config.seed)?),
    };
    let no_solutions_detected = tune
        .as_ref()
        .map_or(result.no_solutions_detected, |t| t.no_solutions_detected);
    Ok(Report {
        config: config.clone(),
        plan,
        registers: spec.search_registers(matches!(mode, InputMode::Joint)),
        distribution: distribution_entries(&result)?,
        solutions: result
            .verified_solutions
            .iter()
            .map(|a| solution_row(a, spec.weight_bits()))
            .collect(),
        no_solutions_detected,
        weight_marginal,
        counts,
        tune,
    })
}

fn distribution_entries(result: &RunResult) -> Result<Vec<Entry>, Error> {
    let h = &result.search_marginal;
    h.iter()
        .map(|(index, prob)| {
            let values = h.layout().values(index);
            let (inputs, weights) = match &result.mode {
                InputMode::Fixed(bits) => (bits.clone(), values.clone()),
                InputMode::Joint => (
                    (0..result.spec.n_inputs())
                        .map(|k| values[0] >> k & 1 == 1)
                        .collect(),
                    values[1..].to_vec(),
                ),
            };
            let eval = crate::perceptron::evaluate(&result.spec, &inputs, &weights)?;
            Ok(Entry {
                bits: h.key(index),
                values,
                prob,
                verified: eval.h_output,
            })
        })
        .collect()
}

fn marginal_entries(h: &Histogram) -> Vec<MarginalEntry> {
    h.iter()
        .map(|(index, prob)| MarginalEntry {
            bits: h.key(index),
            values: h.layout().values(index),
            prob,
        })
        .collect()
}

fn solution_row(a: &Assignment, weight_bits: usize) -> SolutionRow {
    SolutionRow {
        inputs: a.inputs.iter().map(|&b| b as u8).collect(),
        weights: a.weights.clone(),
        bits: a.weight_bits(weight_bits),
    }
}

/// Renders a report as a text table, CSV or JSON.
pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Text => emit_text(report),
        Format::Csv => emit_csv(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Input bits of an entry, I1 first.
fn entry_inputs(report: &Report, entry: &Entry) -> Vec<bool> {
    match report.config.input_mode() {
        InputMode::Fixed(bits) => bits,
        InputMode::Joint => (0..report.config.n_inputs)
            .map(|k| entry.values[0] >> k & 1 == 1)
            .collect(),
    }
}

fn emit_text(report: &Report) -> String {
    let c = &report.config;
    let sum_bits = c.spec().map(|s| s.sum_bits()).unwrap_or(1);
    let ac_bits = format!("{:0sum_bits$b}", c.ac);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Ac = {ac_bits} ({}), predicate {}, mode {}",
        c.ac,
        c.predicate,
        c.mode.as_str()
    );
    let _ = writeln!(
        out,
        "plan: n = {}, l = {}, iterations = {}",
        report.plan.n, report.plan.l, report.plan.iterations
    );
    if let Some(t) = &report.tune {
        let masses: Vec<String> = t.masses.iter().map(|m| format!("{m:.6}")).collect();
        let _ = writeln!(
            out,
            "tune: best k = {}, hit rate = {:.6}, mass by k = [{}]",
            t.best_k,
            t.hit_rate,
            masses.join(", ")
        );
    }
    out.push('\n');

    let mut header: Vec<String> = (1..=c.n_inputs).map(|k| format!("w{k}")).collect();
    header.extend((1..=c.n_inputs).map(|k| format!("I{k}")));
    header.extend(["Ac", "probability", "verified"].map(String::from));
    let mut rows = vec![header];
    for (i, e) in report.distribution.iter().enumerate() {
        let weights = &e.values[e.values.len() - c.n_inputs..];
        let mut row: Vec<String> = weights
            .iter()
            .map(|w| format!("{w:0width$b}", width = c.weight_bits))
            .collect();
        row.extend(
            entry_inputs(report, e)
                .into_iter()
                .map(|b| bit(b).to_string()),
        );
        row.push(if i == 0 {
            ac_bits.clone()
        } else {
            String::new()
        });
        row.push(format!("{:.6}", e.prob));
        row.push(if e.verified { "yes" } else { "no" }.to_string());
        rows.push(row);
    }
    out.push_str(&align(&rows));

    out.push('\n');
    if report.no_solutions_detected {
        out.push_str("no solutions detected\n");
    } else {
        let _ = writeln!(out, "solutions ({}):", report.solutions.len());
        for s in &report.solutions {
            let inputs: Vec<&str> = s.inputs.iter().map(|&b| bit(b == 1)).collect();
            let _ = writeln!(out, "  w = {}  I = {}", s.bits, inputs.join(" "));
        }
    }

    if let Some(m) = &report.weight_marginal {
        out.push_str("\nweight distribution:\n");
        for e in m {
            let bar = "#".repeat((e.prob * 200.0).round() as usize);
            let line = format!("  {}  {:.6}  {bar}", e.bits, e.prob);
            let _ = writeln!(out, "{}", line.trim_end());
        }
    }
    if let Some(counts) = &report.counts {
        let _ = writeln!(
            out,
            "\nsampled counts ({} shots, seed {}):",
            c.shots, c.seed
        );
        for (k, n) in counts {
            let _ = writeln!(out, "  {k}  {n}");
        }
    }
    out
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn emit_csv(report: &Report) -> String {
    let mut out = report.registers.join(",");
    out.push_str(",value,probability,verified\n");
    for e in &report.distribution {
        let fields: Vec<&str> = e.bits.split(' ').collect();
        let values: Vec<String> = e.values.iter().map(u64::to_string).collect();
        let _ = writeln!(
            out,
            "{},{},{:.6},{}",
            fields.join(","),
            values.join(" "),
            e.prob,
            e.verified
        );
    }
    out
}

/// The complete circuit the config would run, in the gate-list format.
pub fn dump_circuit(config: &Config) -> Result<String, Error> {
    let (spec, mode, iterations, _) = resolve(config)?;
    let k = match iterations {
        Iterations::Fixed(k) => k,
        Iterations::Auto => grover::plan(&spec, &mode, Iterations::Auto)?.iterations,
    };
    Ok(grover::build_search_circuit(&spec, &mode, k)?.to_string())
}

/// Full command: parse, run, print. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(args).and_then(|config| {
        let text = if config.dump_circuit {
            dump_circuit(&config)?
        } else {
            emit(&execute(&config)?, config.format)
        };
        Ok(text)
    });
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(CliError::Info(text)) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let msg = e.to_string();
            let _ = writeln!(err, "{}", msg.trim_end());
            e.exit_code()
        }
    }
}
