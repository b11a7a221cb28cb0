//! Reversible arithmetic and the perceptron oracle compiler.
//!
//! The oracle accumulates Σ Iₖwₖ into a `sum` register with Iₖ-controlled
//! ripple-carry adders, flips the phase of states whose sum satisfies the
//! activation predicate, then runs the adders backwards so that `sum` and
//! `carry` return to zero.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perceptron::Predicate;
use crate::statevector::{Gate, QubitLayout, StateVector};

pub const INPUT_REGISTER: &str = "I";
pub const SUM_REGISTER: &str = "sum";
pub const CARRY_REGISTER: &str = "carry";

/// Upper bound on `n_inputs` and `weight_bits`, keeping all sums in `u64`.
pub const MAX_WIDTH: usize = 16;

/// Name of the k-th weight register, counting from 1.
pub fn weight_register(k: usize) -> String {
    format!("w{k}")
}

/// Register widths and the activation threshold of one training problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProblemSpec {
    n_inputs: usize,
    weight_bits: usize,
    ac: u64,
    predicate: Predicate,
}

impl ProblemSpec {
    pub fn new(n_inputs: usize, weight_bits: usize, ac: u64, predicate: Predicate) -> Result<Self> {
        if !(1..=MAX_WIDTH).contains(&n_inputs) {
            return Err(Error::Argument(format!(
                "n_inputs must be in 1..={MAX_WIDTH}, got {n_inputs}"
            )));
        }
        if !(1..=MAX_WIDTH).contains(&weight_bits) {
            return Err(Error::Argument(format!(
                "weight_bits must be in 1..={MAX_WIDTH}, got {weight_bits}"
            )));
        }
        let spec = ProblemSpec {
            n_inputs,
            weight_bits,
            ac,
            predicate,
        };
        if ac >= 1 << spec.sum_bits() {
            return Err(Error::Argument(format!(
                "threshold {ac} does not fit in the {}-bit sum register",
                spec.sum_bits()
            )));
        }
        Ok(spec)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn weight_bits(&self) -> usize {
        self.weight_bits
    }

    pub fn ac(&self) -> u64 {
        self.ac
    }

    pub fn predicate(&self) -> Predicate {
        self.predicate
    }

    pub fn max_weight(&self) -> u64 {
        (1 << self.weight_bits) - 1
    }

    /// Largest reachable weighted sum.
    pub fn max_sum(&self) -> u64 {
        self.n_inputs as u64 * self.max_weight()
    }

    /// Bits needed to hold any weighted sum: ⌈log₂(max_sum + 1)⌉.
    pub fn sum_bits(&self) -> usize {
        (u64::BITS - self.max_sum().leading_zeros()) as usize
    }

    /// Qubits used by the carry ancillas of the ripple-carry adder.
    pub fn carry_bits(&self) -> usize {
        self.sum_bits() - 1
    }

    /// Qubits allocated by [`allocate_layout`].
    pub fn total_qubits(&self) -> usize {
        self.n_inputs * (1 + self.weight_bits) + self.sum_bits() + self.carry_bits()
    }

    /// Search-register width: the weights, plus the inputs in joint mode.
    pub fn search_qubits(&self, joint: bool) -> usize {
        self.n_inputs * self.weight_bits + if joint { self.n_inputs } else { 0 }
    }

    pub fn weight_registers(&self) -> Vec<String> {
        (1..=self.n_inputs).map(weight_register).collect()
    }

    /// Registers amplitude amplification acts on.
    pub fn search_registers(&self, joint: bool) -> Vec<String> {
        let mut regs = Vec::with_capacity(self.n_inputs + 1);
        if joint {
            regs.push(INPUT_REGISTER.to_string());
        }
        regs.extend(self.weight_registers());
        regs
    }
}

/// Lays out `I`, `w1..wn`, `sum` and `carry` in that order.
///
/// The layout is the same for both search modes; `joint` only decides
/// whether `I` belongs to the search register, which
/// [`ProblemSpec::search_registers`] reports.
pub fn allocate_layout(spec: &ProblemSpec, _joint: bool) -> QubitLayout {
    let mut layout = QubitLayout::new();
    let mut push = |name: &str, len: usize| {
        layout
            .push(name, len)
            .expect("register names are distinct and widths non-zero");
    };
    push(INPUT_REGISTER, spec.n_inputs);
    for name in spec.weight_registers() {
        push(&name, spec.weight_bits);
    }
    push(SUM_REGISTER, spec.sum_bits());
    if spec.carry_bits() > 0 {
        push(CARRY_REGISTER, spec.carry_bits());
    }
    layout
}

/// An ordered gate list over a fixed register layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSequence {
    layout: QubitLayout,
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(layout: QubitLayout) -> Self {
        GateSequence {
            layout,
            gates: Vec::new(),
        }
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.layout.n_qubits())?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends another sequence built over the same layout.
    pub fn append(&mut self, other: &GateSequence) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::Layout(
                "cannot concatenate sequences over different layouts".into(),
            ));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// The inverse circuit. Every primitive gate is self-inverse, so this is
    /// the reversed list.
    pub fn inverse(&self) -> GateSequence {
        GateSequence {
            layout: self.layout.clone(),
            gates: self.gates.iter().rev().cloned().collect(),
        }
    }

    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.layout.n_qubits() {
            return Err(Error::Layout(format!(
                "sequence spans {} qubits but the state has {}",
                self.layout.n_qubits(),
                state.n_qubits()
            )));
        }
        state.apply_all(&self.gates)
    }

    /// Runs the sequence on |0…0⟩.
    pub fn simulate(&self) -> Result<StateVector> {
        let mut state = StateVector::new(self.layout.n_qubits())?;
        state.apply_all(&self.gates)?;
        Ok(state)
    }

    /// Tracks a basis state through a classical (H-free) sequence, returning
    /// the final index and whether the overall phase is -1.
    pub fn apply_to_basis(&self, index: usize) -> Option<(usize, bool)> {
        self.gates.iter().try_fold((index, false), |(i, neg), g| {
            g.apply_to_basis(i).map(|(j, flip)| (j, neg ^ flip))
        })
    }

    /// Parses the gate-list text format: a `# layout:` header line, then one
    /// gate per line. Blank lines and further `#` comments are ignored.
    pub fn parse(text: &str) -> Result<GateSequence> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty gate list".into(),
        })?;
        let mut seq = GateSequence::new(QubitLayout::parse_header(header)?);
        for (line, text) in lines {
            if text.starts_with('#') {
                continue;
            }
            let gate: Gate = text.parse().map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse { line, message },
                other => other,
            })?;
            seq.push(gate).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(seq)
    }
}

impl fmt::Display for GateSequence {
    /// Renders the gate-list text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.layout)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Builds `acc ← acc + src (mod 2^|acc|)` when `control` is 1, identity
/// otherwise.
///
/// Ripple-carry construction over the `carry` register, which must hold at
/// least `|acc| - 1` qubits in state 0; the carries are restored to 0. Every
/// gate carries `control` as an extra control. `src` may be narrower than
/// `acc`, in which case its missing high bits read as 0.
pub fn build_controlled_adder(
    layout: &QubitLayout,
    control: usize,
    src: &str,
    acc: &str,
) -> Result<GateSequence> {
    if src == acc {
        return Err(Error::Layout(format!(
            "adder source and accumulator are both `{src}`"
        )));
    }
    if src == CARRY_REGISTER || acc == CARRY_REGISTER {
        return Err(Error::Layout(
            "carry register cannot be an adder operand".into(),
        ));
    }
    let src_q = layout.qubits(src)?;
    let acc_q = layout.qubits(acc)?;
    let width = acc_q.len();
    if src_q.len() > width {
        return Err(Error::Layout(format!(
            "source `{src}` ({} bits) is wider than accumulator `{acc}` ({width} bits)",
            src_q.len()
        )));
    }
    let carry_q = if width > 1 {
        let c = layout.qubits(CARRY_REGISTER)?;
        if c.len() < width - 1 {
            return Err(Error::Layout(format!(
                "carry register has {} qubits, adder needs {}",
                c.len(),
                width - 1
            )));
        }
        c
    } else {
        0..0
    };
    if control >= layout.n_qubits() {
        return Err(Error::Index(format!(
            "control qubit {control} out of range"
        )));
    }
    if src_q.contains(&control) || acc_q.contains(&control) || carry_q.contains(&control) {
        return Err(Error::Layout(format!(
            "control qubit {control} overlaps an adder register"
        )));
    }

    let a = |i: usize| (i < src_q.len()).then(|| src_q.start + i);
    let b = |i: usize| acc_q.start + i;
    let c = |i: usize| (i > 0).then(|| carry_q.start + i - 1);
    // Absent operands are constant 0, which disables any gate they control.
    let mcx = |ctrls: &[Option<usize>], target: usize| -> Option<Gate> {
        let mut controls = vec![control];
        for q in ctrls {
            controls.push((*q)?);
        }
        Some(Gate::Mcx { controls, target })
    };
    let carry_block = |i: usize| -> Vec<Gate> {
        let next = c(i + 1).expect("carry above bit 0 exists");
        [
            mcx(&[a(i), Some(b(i))], next),
            a(i).and_then(|ai| mcx(&[Some(ai)], b(i))),
            mcx(&[c(i), Some(b(i))], next),
        ]
        .into_iter()
        .flatten()
        .collect()
    };
    let sum_block = |i: usize| -> Vec<Gate> {
        [mcx(&[a(i)], b(i)), mcx(&[c(i)], b(i))]
            .into_iter()
            .flatten()
            .collect()
    };

    let mut seq = GateSequence::new(layout.clone());
    let mut gates = Vec::new();
    for i in 0..width - 1 {
        gates.extend(carry_block(i));
    }
    gates.extend(sum_block(width - 1));
    for i in (0..width - 1).rev() {
        gates.extend(carry_block(i).into_iter().rev());
        gates.extend(sum_block(i));
    }
    for g in gates {
        seq.push(g)?;
    }
    Ok(seq)
}

/// Phase -1 on basis states whose `acc` register equals `ac`.
///
/// X-conjugates each qubit where `ac` has a 0 bit around one MCZ over the
/// whole register. The sequence is its own inverse.
pub fn build_equality_comparator(layout: &QubitLayout, acc: &str, ac: u64) -> Result<GateSequence> {
    let qubits = layout.qubits(acc)?;
    check_threshold(qubits.len(), ac)?;
    let mut seq = GateSequence::new(layout.clone());
    push_equality_flip(&mut seq, qubits, ac)?;
    Ok(seq)
}

/// Phase -1 on basis states whose `acc` register is at least `ac`, built as
/// one equality flip per value in `ac..2^|acc|`.
pub fn build_geq_comparator(layout: &QubitLayout, acc: &str, ac: u64) -> Result<GateSequence> {
    let qubits = layout.qubits(acc)?;
    check_threshold(qubits.len(), ac)?;
    let mut seq = GateSequence::new(layout.clone());
    for v in ac..1 << qubits.len() {
        push_equality_flip(&mut seq, qubits.clone(), v)?;
    }
    Ok(seq)
}

fn check_threshold(width: usize, ac: u64) -> Result<()> {
    if width < 64 && ac >= 1 << width {
        return Err(Error::Argument(format!(
            "threshold {ac} does not fit in a {width}-bit register"
        )));
    }
    Ok(())
}

fn push_equality_flip(
    seq: &mut GateSequence,
    qubits: std::ops::Range<usize>,
    value: u64,
) -> Result<()> {
    let zeros: Vec<usize> = qubits
        .clone()
        .filter(|q| value >> (q - qubits.start) & 1 == 0)
        .collect();
    for &q in &zeros {
        seq.push(Gate::X(q))?;
    }
    seq.push(Gate::Mcz(qubits.collect()))?;
    for &q in &zeros {
        seq.push(Gate::X(q))?;
    }
    Ok(())
}

/// Compiles the perceptron oracle: controlled adders for each (Iₖ, wₖ), the
/// comparator selected by the predicate, then the adders undone in reverse.
pub fn build_perceptron_oracle(spec: &ProblemSpec, layout: &QubitLayout) -> Result<GateSequence> {
    let inputs = layout.register(INPUT_REGISTER)?;
    let sum = layout.register(SUM_REGISTER)?;
    if inputs.len != spec.n_inputs() || sum.len != spec.sum_bits() {
        return Err(Error::Layout(format!(
            "layout does not match a {}-input problem with a {}-bit sum",
            spec.n_inputs(),
            spec.sum_bits()
        )));
    }
    let mut adders = GateSequence::new(layout.clone());
    for (k, name) in spec.weight_registers().iter().enumerate() {
        if layout.register(name)?.len != spec.weight_bits() {
            return Err(Error::Layout(format!(
                "register `{name}` must hold {} bits",
                spec.weight_bits()
            )));
        }
        adders.append(&build_controlled_adder(
            layout,
            inputs.start + k,
            name,
            SUM_REGISTER,
        )?)?;
    }
    let comparator = match spec.predicate() {
        Predicate::Equal => build_equality_comparator(layout, SUM_REGISTER, spec.ac())?,
        Predicate::Geq => build_geq_comparator(layout, SUM_REGISTER, spec.ac())?,
    };
    let mut oracle = adders.clone();
    oracle.append(&comparator)?;
    oracle.append(&adders.inverse())?;
    Ok(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perceptron::{activate, neuron_input};
    use num_complex::Complex64;

    fn spec(ac: u64, predicate: Predicate) -> ProblemSpec {
        ProblemSpec::new(2, 2, ac, predicate).unwrap()
    }

    /// Basis index for inputs I, weights w, everything else 0.
    fn basis(layout: &QubitLayout, inputs: &[bool], weights: &[u64]) -> usize {
        let mut index = 0;
        for (k, &on) in inputs.iter().enumerate() {
            index |= (on as usize) << k;
        }
        for (k, &w) in weights.iter().enumerate() {
            let r = layout.register(&weight_register(k + 1)).unwrap();
            index |= (w as usize) << r.start;
        }
        index
    }

    #[test]
    fn problem_spec_widths() {
        let s = spec(3, Predicate::Equal);
        assert_eq!(s.sum_bits(), 3);
        assert_eq!(s.carry_bits(), 2);
        assert_eq!(s.total_qubits(), 11);
        assert_eq!(
            ProblemSpec::new(1, 1, 1, Predicate::Equal)
                .unwrap()
                .sum_bits(),
            1
        );
        assert_eq!(
            ProblemSpec::new(3, 2, 0, Predicate::Equal)
                .unwrap()
                .sum_bits(),
            4
        );
        assert!(ProblemSpec::new(2, 2, 8, Predicate::Equal).is_err());
        assert!(ProblemSpec::new(0, 2, 0, Predicate::Equal).is_err());
        assert!(ProblemSpec::new(2, 0, 0, Predicate::Equal).is_err());
    }

    #[test]
    fn layouts() {
        let s = spec(3, Predicate::Equal);
        let l = allocate_layout(&s, false);
        assert_eq!(
            l.to_string(),
            "# layout: I=[0,1] w1=[2,3] w2=[4,5] sum=[6,7,8] carry=[9,10]"
        );
        assert_eq!(s.search_qubits(false), 4);
        assert_eq!(s.search_qubits(true), 6);
        assert_eq!(s.search_registers(true), ["I", "w1", "w2"]);

        let tiny = ProblemSpec::new(1, 1, 1, Predicate::Equal).unwrap();
        assert_eq!(
            allocate_layout(&tiny, false).to_string(),
            "# layout: I=[0] w1=[1] sum=[2]"
        );
    }

    fn adder_layout(src_bits: usize, acc_bits: usize) -> QubitLayout {
        let mut l = QubitLayout::new();
        l.push("ctl", 1).unwrap();
        l.push("src", src_bits).unwrap();
        l.push("acc", acc_bits).unwrap();
        if acc_bits > 1 {
            l.push(CARRY_REGISTER, acc_bits - 1).unwrap();
        }
        l
    }

    fn run_adder(
        src_bits: usize,
        acc_bits: usize,
        ctl: u64,
        src: u64,
        acc: u64,
    ) -> (u64, u64, u64, u64) {
        let l = adder_layout(src_bits, acc_bits);
        let seq = build_controlled_adder(&l, 0, "src", "acc").unwrap();
        let index = (ctl | src << 1 | acc << (1 + src_bits)) as usize;
        let (out, neg) = seq.apply_to_basis(index).unwrap();
        assert!(!neg);
        let v = l.values(out);
        (v[0], v[1], v[2], v.get(3).copied().unwrap_or(0))
    }

    #[test]
    fn adder_examples() {
        assert_eq!(run_adder(2, 3, 1, 0b01, 0b010), (1, 0b01, 0b011, 0));
        assert_eq!(run_adder(2, 3, 0, 0b11, 0b010), (0, 0b11, 0b010, 0));
        assert_eq!(run_adder(2, 3, 1, 0b11, 0b011), (1, 0b11, 0b110, 0));
    }

    #[test]
    fn adder_exhaustive_against_classical_addition() {
        for src_bits in 1..=3 {
            for acc_bits in src_bits..=src_bits + 2 {
                let modulus = 1u64 << acc_bits;
                for ctl in 0..2 {
                    for src in 0..1u64 << src_bits {
                        for acc in 0..modulus {
                            let expected = if ctl == 1 { (acc + src) % modulus } else { acc };
                            assert_eq!(
                                run_adder(src_bits, acc_bits, ctl, src, acc),
                                (ctl, src, expected, 0),
                                "src_bits={src_bits} acc_bits={acc_bits} ctl={ctl} src={src} acc={acc}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn adder_rejects_bad_registers() {
        let l = adder_layout(2, 3);
        assert!(matches!(
            build_controlled_adder(&l, 0, "acc", "acc"),
            Err(Error::Layout(_))
        ));
        assert!(matches!(
            build_controlled_adder(&l, 1, "src", "acc"),
            Err(Error::Layout(_))
        ));
        assert!(matches!(
            build_controlled_adder(&l, 0, "acc", "src"),
            Err(Error::Layout(_))
        ));
        assert!(matches!(
            build_controlled_adder(&l, 0, "src", "carry"),
            Err(Error::Layout(_))
        ));
        assert!(matches!(
            build_controlled_adder(&l, 0, "nope", "acc"),
            Err(Error::Layout(_))
        ));
        assert!(matches!(
            build_controlled_adder(&l, 99, "src", "acc"),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn equality_comparator_marks_only_threshold() {
        let s = spec(3, Predicate::Equal);
        let l = allocate_layout(&s, false);
        let cmp = build_equality_comparator(&l, SUM_REGISTER, 3).unwrap();
        let sum = l.register(SUM_REGISTER).unwrap().clone();
        for v in 0..8usize {
            let (out, neg) = cmp.apply_to_basis(v << sum.start).unwrap();
            assert_eq!(out, v << sum.start);
            assert_eq!(neg, v == 3, "sum={v:03b}");
        }
        assert!(matches!(
            build_equality_comparator(&l, SUM_REGISTER, 8),
            Err(Error::Argument(_))
        ));
        assert_eq!(cmp.inverse(), cmp);
    }

    #[test]
    fn geq_comparator_marks_upper_range() {
        let l = allocate_layout(&spec(0, Predicate::Geq), false);
        let sum = l.register(SUM_REGISTER).unwrap().clone();
        for ac in 0..8u64 {
            let cmp = build_geq_comparator(&l, SUM_REGISTER, ac).unwrap();
            for v in 0..8usize {
                let (_, neg) = cmp.apply_to_basis(v << sum.start).unwrap();
                assert_eq!(neg, v as u64 >= ac, "ac={ac} sum={v}");
            }
        }
        assert!(matches!(
            build_geq_comparator(&l, SUM_REGISTER, 8),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        let s = spec(3, Predicate::Equal);
        let l = allocate_layout(&s, false);
        let oracle = build_perceptron_oracle(&s, &l).unwrap();

        let hit = basis(&l, &[true, true], &[1, 2]);
        assert_eq!(oracle.apply_to_basis(hit), Some((hit, true)));
        let miss = basis(&l, &[true, true], &[1, 1]);
        assert_eq!(oracle.apply_to_basis(miss), Some((miss, false)));

        let mut state = StateVector::basis(l.n_qubits(), hit).unwrap();
        oracle.apply_to(&mut state).unwrap();
        assert_eq!(state.amplitude(hit), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn oracle_phase_matches_classical_predicate_on_every_basis_state() {
        for predicate in [Predicate::Equal, Predicate::Geq] {
            for n_inputs in 1..=3 {
                for weight_bits in 1..=2 {
                    let probe = ProblemSpec::new(n_inputs, weight_bits, 0, predicate).unwrap();
                    for ac in 0..1u64 << probe.sum_bits() {
                        let s = ProblemSpec::new(n_inputs, weight_bits, ac, predicate).unwrap();
                        let l = allocate_layout(&s, true);
                        let oracle = build_perceptron_oracle(&s, &l).unwrap();
                        for index in 0..1usize << s.search_qubits(true) {
                            let v = l.values(index);
                            let inputs: Vec<bool> =
                                (0..n_inputs).map(|k| v[0] >> k & 1 == 1).collect();
                            let weights = &v[1..=n_inputs];
                            let fire =
                                activate(neuron_input(&inputs, weights).unwrap(), ac, predicate);
                            assert_eq!(oracle.apply_to_basis(index), Some((index, fire)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gate_list_round_trip() {
        let s = spec(5, Predicate::Geq);
        let l = allocate_layout(&s, true);
        let oracle = build_perceptron_oracle(&s, &l).unwrap();
        let text = oracle.to_string();
        assert!(text.starts_with("# layout: I=[0,1] w1=[2,3] w2=[4,5] sum=[6,7,8] carry=[9,10]\n"));
        assert_eq!(GateSequence::parse(&text).unwrap(), oracle);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# layout: a=[0,1]\nH 0\n\nX 5\n";
        assert_eq!(
            GateSequence::parse(text).unwrap_err(),
            Error::Parse {
                line: 4,
                message: "index error: qubit 5 out of range for 2 qubits in `X 5`".into()
            }
        );
        assert!(matches!(
            GateSequence::parse("# layout: a=[0]\nFOO 0"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(GateSequence::parse("").is_err());
    }
}
