//! Amplitude amplification over the perceptron oracle.
//!
//! Two search modes are supported: weights only, with the inputs prepared
//! classically, and joint search over inputs and weights together. The
//! iteration count comes from the solution count when it is known, or from
//! a scan over candidate counts when it is not.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perceptron::{self, Assignment, InputMode, SolutionSet};
use crate::qarith::{self, GateSequence, ProblemSpec, INPUT_REGISTER};
use crate::statevector::{Gate, Histogram, QubitLayout, StateVector, MAX_QUBITS};

/// How many Grover iterations to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    /// Planned from the classical solution count.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroverPlan {
    /// Search-register width.
    pub n: usize,
    /// Expected solution count; 0 when none is known.
    pub l: u64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub spec: ProblemSpec,
    pub mode: InputMode,
    pub plan: GroverPlan,
    pub full_distribution: Histogram,
    pub search_marginal: Histogram,
    /// Outcomes above the uniform level that pass the classical check.
    pub verified_solutions: SolutionSet,
    /// Total probability on outcomes that pass the classical check.
    pub solution_mass: f64,
    pub no_solutions_detected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub best_k: usize,
    pub hit_rate: f64,
    pub no_solutions_detected: bool,
    /// Verified solution mass after k iterations, at index k - 1.
    pub masses: Vec<f64>,
}

/// ⌊(π/4)·√(2ⁿ/l)⌋, clamped below at 1.
pub fn grover_iterations(n: usize, l: u64) -> Result<usize> {
    if l == 0 {
        return Err(Error::Argument(
            "solution count must be at least 1; tune the iteration count instead".into(),
        ));
    }
    if n > 63 || l > 1 << n {
        return Err(Error::Argument(format!(
            "{l} solutions cannot exist in a {n}-qubit search space"
        )));
    }
    let ratio = (1u64 << n) as f64 / l as f64;
    Ok(((FRAC_PI_4 * ratio.sqrt()).floor() as usize).max(1))
}

/// The reflection about the uniform superposition of `search` (up to a
/// global phase of -1): H, X, MCZ, X, H over the search qubits.
pub fn build_diffusion(layout: &QubitLayout, search: &[&str]) -> Result<GateSequence> {
    if search.is_empty() {
        return Err(Error::Argument(
            "diffusion needs at least one search register".into(),
        ));
    }
    let mut qubits = Vec::new();
    for name in search {
        qubits.extend(layout.qubits(name)?);
    }
    let mut seq = GateSequence::new(layout.clone());
    for &q in &qubits {
        seq.push(Gate::H(q))?;
    }
    for &q in &qubits {
        seq.push(Gate::X(q))?;
    }
    seq.push(Gate::Mcz(qubits.clone()))?;
    for &q in &qubits {
        seq.push(Gate::X(q))?;
    }
    for &q in &qubits {
        seq.push(Gate::H(q))?;
    }
    Ok(seq)
}

/// Prepared circuit pieces for one spec and mode.
struct SearchCircuit {
    spec: ProblemSpec,
    mode: InputMode,
    layout: QubitLayout,
    search: Vec<String>,
    prep: GateSequence,
    step: GateSequence,
}

impl SearchCircuit {
    fn new(spec: &ProblemSpec, mode: &InputMode) -> Result<SearchCircuit> {
        let joint = matches!(mode, InputMode::Joint);
        if let InputMode::Fixed(inputs) = mode {
            if inputs.len() != spec.n_inputs() {
                return Err(Error::Argument(format!(
                    "expected {} input bits, got {}",
                    spec.n_inputs(),
                    inputs.len()
                )));
            }
        }
        if spec.total_qubits() > MAX_QUBITS {
            return Err(Error::Size(format!(
                "the circuit needs {} qubits but the simulator is capped at {MAX_QUBITS}; \
                 use fewer inputs or narrower weights",
                spec.total_qubits()
            )));
        }
        let layout = qarith::allocate_layout(spec, joint);
        let search = spec.search_registers(joint);
        let search_refs: Vec<&str> = search.iter().map(String::as_str).collect();

        let mut prep = GateSequence::new(layout.clone());
        let inputs = layout.register(INPUT_REGISTER)?.clone();
        match mode {
            InputMode::Fixed(bits) => {
                for (k, _) in bits.iter().enumerate().filter(|(_, &on)| on) {
                    prep.push(Gate::X(inputs.start + k))?;
                }
            }
            InputMode::Joint => {}
        }
        for name in &search {
            for q in layout.qubits(name)? {
                prep.push(Gate::H(q))?;
            }
        }

        let mut step = qarith::build_perceptron_oracle(spec, &layout)?;
        step.append(&build_diffusion(&layout, &search_refs)?)?;
        Ok(SearchCircuit {
            spec: *spec,
            mode: mode.clone(),
            layout,
            search,
            prep,
            step,
        })
    }

    fn n(&self) -> usize {
        self.spec
            .search_qubits(matches!(self.mode, InputMode::Joint))
    }

    fn search_refs(&self) -> Vec<&str> {
        self.search.iter().map(String::as_str).collect()
    }

    fn full_sequence(&self, iterations: usize) -> Result<GateSequence> {
        let mut seq = self.prep.clone();
        for _ in 0..iterations {
            seq.append(&self.step)?;
        }
        Ok(seq)
    }

    /// Simulates 0..=max_k iterations, handing each intermediate state to
    /// `visit` together with its iteration count.
    fn sweep(
        &self,
        max_k: usize,
        mut visit: impl FnMut(usize, &StateVector) -> Result<()>,
    ) -> Result<()> {
        let mut state = self.prep.simulate()?;
        visit(0, &state)?;
        for k in 1..=max_k {
            self.step.apply_to(&mut state)?;
            visit(k, &state)?;
        }
        Ok(())
    }

    /// Inputs and weights encoded by an outcome of the search marginal.
    fn decode(&self, marginal: &Histogram, index: usize) -> Assignment {
        let values = marginal.layout().values(index);
        match &self.mode {
            InputMode::Fixed(inputs) => Assignment {
                inputs: inputs.clone(),
                weights: values,
            },
            InputMode::Joint => Assignment {
                inputs: (0..self.spec.n_inputs())
                    .map(|k| values[0] >> k & 1 == 1)
                    .collect(),
                weights: values[1..].to_vec(),
            },
        }
    }

    fn is_solution(&self, a: &Assignment) -> Result<bool> {
        Ok(perceptron::evaluate(&self.spec, &a.inputs, &a.weights)?.h_output)
    }

    /// Probability on outcomes that pass the classical check.
    fn verified_mass(&self, marginal: &Histogram) -> Result<f64> {
        let mut mass = 0.0;
        for (index, p) in marginal.iter() {
            if self.is_solution(&self.decode(marginal, index))? {
                mass += p;
            }
        }
        Ok(mass)
    }

    fn search_marginal(&self, state: &StateVector) -> Result<Histogram> {
        state
            .probabilities_in(&self.layout)?
            .marginal(&self.search_refs())
    }
}

fn no_better_than_uniform(mass: f64, n: usize) -> bool {
    mass < 2.0 / (1u64 << n) as f64
}

/// Builds the complete circuit a run executes: state preparation followed by
/// `iterations` rounds of oracle and diffusion.
pub fn build_search_circuit(
    spec: &ProblemSpec,
    mode: &InputMode,
    iterations: usize,
) -> Result<GateSequence> {
    SearchCircuit::new(spec, mode)?.full_sequence(iterations)
}

/// Resolves an iteration request into a plan.
pub fn plan(spec: &ProblemSpec, mode: &InputMode, iterations: Iterations) -> Result<GroverPlan> {
    let circuit = SearchCircuit::new(spec, mode)?;
    plan_for(&circuit, iterations)
}

fn plan_for(circuit: &SearchCircuit, iterations: Iterations) -> Result<GroverPlan> {
    let n = circuit.n();
    let l = perceptron::enumerate_solutions(&circuit.spec, &circuit.mode)?.len() as u64;
    let iterations = match iterations {
        Iterations::Fixed(k) => k,
        Iterations::Auto if l > 0 => grover_iterations(n, l)?,
        Iterations::Auto => tune_circuit(circuit, grover_iterations(n, 1)?)?.best_k,
    };
    Ok(GroverPlan { n, l, iterations })
}

fn run(spec: &ProblemSpec, mode: InputMode, iterations: Iterations) -> Result<RunResult> {
    let circuit = SearchCircuit::new(spec, &mode)?;
    let plan = plan_for(&circuit, iterations)?;
    let mut final_state = None;
    circuit.sweep(plan.iterations, |k, state| {
        if k == plan.iterations {
            final_state = Some(state.clone());
        }
        Ok(())
    })?;
    let state = final_state.expect("sweep visits the final iteration");

    let full_distribution = state.probabilities_in(&circuit.layout)?;
    let search_marginal = full_distribution.marginal(&circuit.search_refs())?;
    let uniform = 1.0 / (1u64 << plan.n) as f64;
    let mut verified = Vec::new();
    let mut solution_mass = 0.0;
    for (index, p) in search_marginal.iter() {
        let candidate = circuit.decode(&search_marginal, index);
        if circuit.is_solution(&candidate)? {
            solution_mass += p;
            if p > uniform + 1e-9 {
                verified.push(candidate);
            }
        }
    }
    Ok(RunResult {
        spec: *spec,
        mode,
        plan,
        full_distribution,
        search_marginal,
        verified_solutions: SolutionSet::new(verified),
        solution_mass,
        no_solutions_detected: no_better_than_uniform(solution_mass, plan.n),
    })
}

/// Searches weights for classically fixed inputs.
pub fn run_weight_search(
    spec: &ProblemSpec,
    inputs: &[bool],
    iterations: Iterations,
) -> Result<RunResult> {
    run(spec, InputMode::Fixed(inputs.to_vec()), iterations)
}

/// Searches inputs and weights together.
pub fn run_joint_search(spec: &ProblemSpec, iterations: Iterations) -> Result<RunResult> {
    run(spec, InputMode::Joint, iterations)
}

/// Distribution of the weight registers alone.
pub fn weight_marginal(result: &RunResult) -> Result<Histogram> {
    let names = result.spec.weight_registers();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    result.full_distribution.marginal(&refs)
}

/// Picks the iteration count in `1..=max_k` with the most probability on
/// classically verified outcomes, preferring fewer iterations on ties.
pub fn tune_iterations(spec: &ProblemSpec, mode: &InputMode, max_k: usize) -> Result<TuneResult> {
    tune_circuit(&SearchCircuit::new(spec, mode)?, max_k)
}

fn tune_circuit(circuit: &SearchCircuit, max_k: usize) -> Result<TuneResult> {
    if max_k == 0 {
        return Err(Error::Argument("max_k must be at least 1".into()));
    }
    let mut masses = Vec::with_capacity(max_k);
    circuit.sweep(max_k, |k, state| {
        if k > 0 {
            masses.push(circuit.verified_mass(&circuit.search_marginal(state)?)?);
        }
        Ok(())
    })?;
    let mut best_k = 1;
    for (i, &m) in masses.iter().enumerate() {
        if m > masses[best_k - 1] + 1e-12 {
            best_k = i + 1;
        }
    }
    let hit_rate = masses[best_k - 1];
    Ok(TuneResult {
        best_k,
        hit_rate,
        no_solutions_detected: no_better_than_uniform(hit_rate, circuit.n()),
        masses,
    })
}
