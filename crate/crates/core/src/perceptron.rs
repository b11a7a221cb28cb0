//! Classical semantics of the single-hidden-neuron perceptron and the
//! brute-force solver used as ground truth for every quantum run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::ProblemSpec;
use crate::statevector::MAX_QUBITS;

/// Activation rule comparing the hidden neuron's input with the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    /// Fires only when the weighted sum hits the threshold exactly.
    Equal,
    /// Fires when the weighted sum reaches or exceeds the threshold.
    Geq,
}

impl Predicate {
    pub fn holds(self, h_input: u64, ac: u64) -> bool {
        match self {
            Predicate::Equal => h_input == ac,
            Predicate::Geq => h_input >= ac,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::Equal => "equal",
            Predicate::Geq => "geq",
        })
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "equal" | "eq" => Ok(Predicate::Equal),
            "geq" | "ge" => Ok(Predicate::Geq),
            _ => Err(Error::Argument(format!("unknown predicate `{s}`"))),
        }
    }
}

/// Hidden neuron input and output for one assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerceptronEval {
    pub h_input: u64,
    pub h_output: bool,
}

/// Weighted sum of binary inputs: Σ Iₖ·wₖ.
pub fn neuron_input(inputs: &[bool], weights: &[u64]) -> Result<u64> {
    if inputs.len() != weights.len() {
        return Err(Error::Argument(format!(
            "{} inputs but {} weights",
            inputs.len(),
            weights.len()
        )));
    }
    Ok(inputs
        .iter()
        .zip(weights)
        .filter(|(&on, _)| on)
        .map(|(_, &w)| w)
        .sum())
}

pub fn activate(h_input: u64, ac: u64, predicate: Predicate) -> bool {
    predicate.holds(h_input, ac)
}

/// Evaluates the hidden neuron for `spec`. Weights must fit in
/// `spec.weight_bits`.
pub fn evaluate(spec: &ProblemSpec, inputs: &[bool], weights: &[u64]) -> Result<PerceptronEval> {
    if inputs.len() != spec.n_inputs() {
        return Err(Error::Argument(format!(
            "expected {} inputs, got {}",
            spec.n_inputs(),
            inputs.len()
        )));
    }
    if let Some(w) = weights.iter().find(|&&w| w > spec.max_weight()) {
        return Err(Error::Argument(format!(
            "weight {w} does not fit in {} bits",
            spec.weight_bits()
        )));
    }
    let h_input = neuron_input(inputs, weights)?;
    Ok(PerceptronEval {
        h_input,
        h_output: activate(h_input, spec.ac(), spec.predicate()),
    })
}

/// Which inputs a search ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputMode {
    /// Inputs are classically fixed; only weights are searched.
    Fixed(Vec<bool>),
    /// Inputs are searched together with the weights.
    Joint,
}

/// One satisfying assignment of inputs and weights.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub inputs: Vec<bool>,
    pub weights: Vec<u64>,
}

impl Assignment {
    /// Weights as space-separated binary numerals of `weight_bits` digits.
    pub fn weight_bits(&self, weight_bits: usize) -> String {
        self.weights
            .iter()
            .map(|w| format!("{w:0weight_bits$b}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Inputs as space-separated bits, I₁ first.
    pub fn input_bits(&self) -> String {
        self.inputs
            .iter()
            .map(|&b| if b { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Classically enumerated satisfying assignments, sorted inputs-major then
/// by weights, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolutionSet {
    assignments: Vec<Assignment>,
}

impl SolutionSet {
    /// Sorts and deduplicates.
    pub fn new(mut assignments: Vec<Assignment>) -> Self {
        assignments.sort();
        assignments.dedup();
        SolutionSet { assignments }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assignment> {
        self.assignments.iter()
    }

    /// Weight tuples only, in set order.
    pub fn weights(&self) -> Vec<Vec<u64>> {
        self.assignments.iter().map(|a| a.weights.clone()).collect()
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.assignments.binary_search(a).is_ok()
    }
}

/// Every input pattern of `n` bits, in ascending tuple order (I₁ most
/// significant).
pub fn input_patterns(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << n).map(move |v| (0..n).map(|k| v >> (n - 1 - k) & 1 == 1).collect())
}

fn weight_tuples(n: usize, max: u64) -> impl Iterator<Item = Vec<u64>> {
    let base = max + 1;
    (0..base.pow(n as u32)).map(move |mut v| {
        let mut ws = vec![0; n];
        for slot in ws.iter_mut().rev() {
            *slot = v % base;
            v /= base;
        }
        ws
    })
}

/// Exhaustively tests every weight assignment (and every input pattern in
/// joint mode) against the spec's predicate.
pub fn enumerate_solutions(spec: &ProblemSpec, mode: &InputMode) -> Result<SolutionSet> {
    let weight_space = spec.n_inputs() * spec.weight_bits();
    let patterns: Vec<Vec<bool>> = match mode {
        InputMode::Fixed(inputs) => {
            if inputs.len() != spec.n_inputs() {
                return Err(Error::Argument(format!(
                    "expected {} inputs, got {}",
                    spec.n_inputs(),
                    inputs.len()
                )));
            }
            vec![inputs.clone()]
        }
        InputMode::Joint => {
            if weight_space + spec.n_inputs() > MAX_QUBITS {
                return Err(Error::Size(format!(
                    "joint search space of {} bits is too large to enumerate",
                    weight_space + spec.n_inputs()
                )));
            }
            input_patterns(spec.n_inputs()).collect()
        }
    };
    if weight_space > MAX_QUBITS {
        return Err(Error::Size(format!(
            "weight space of {weight_space} bits is too large to enumerate"
        )));
    }
    let mut found = Vec::new();
    for inputs in patterns {
        for weights in weight_tuples(spec.n_inputs(), spec.max_weight()) {
            if evaluate(spec, &inputs, &weights)?.h_output {
                found.push(Assignment {
                    inputs: inputs.clone(),
                    weights,
                });
            }
        }
    }
    Ok(SolutionSet::new(found))
}
