//! Dense state-vector simulator over the gate set {H, X, Z, MCX, MCZ}.
//!
//! Qubit 0 is the least significant bit of a basis index. Amplitudes are
//! stored densely in double precision, so the simulator is capped at
//! [`MAX_QUBITS`].

mod gate;
mod histogram;
mod layout;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

pub use gate::Gate;
pub use histogram::{Histogram, OMIT_BELOW};
pub use layout::{QubitLayout, Register};

use crate::error::{Error, Result};
use gate::bit_mask;

/// Largest register the simulator will allocate (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<StateVector> {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<StateVector> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis state {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// vector must be normalized within 1e-9.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Size(format!(
                "{len} amplitudes is not a power of two of at least 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_size(n_qubits)?;
        let state = StateVector {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!("state has squared norm {norm}")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::H(q) => self.hadamard(*q),
            Gate::X(q) => self.controlled_x(0, 1 << q),
            Gate::Z(q) => self.controlled_phase(1 << q),
            Gate::Mcx { controls, target } => self.controlled_x(bit_mask(controls), 1 << target),
            Gate::Mcz(qubits) => self.controlled_phase(bit_mask(qubits)),
        }
        Ok(())
    }

    /// Applies gates in order, stopping at the first invalid one.
    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    fn hadamard(&mut self, q: usize) {
        let half = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }
        }
    }

    fn controlled_x(&mut self, controls: usize, target: usize) {
        for i in 0..self.amplitudes.len() {
            if i & target == 0 && i & controls == controls {
                self.amplitudes.swap(i, i | target);
            }
        }
    }

    fn controlled_phase(&mut self, mask: usize) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }

    /// Outcome distribution over a single register `q` spanning every qubit.
    pub fn probabilities(&self) -> Histogram {
        let mut layout = QubitLayout::new();
        layout
            .push("q", self.n_qubits)
            .expect("a state always has at least one qubit");
        self.collect(layout)
    }

    /// Outcome distribution keyed by the registers of `layout`.
    pub fn probabilities_in(&self, layout: &QubitLayout) -> Result<Histogram> {
        if layout.n_qubits() != self.n_qubits {
            return Err(Error::Layout(format!(
                "layout covers {} qubits but the state has {}",
                layout.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(self.collect(layout.clone()))
    }

    fn collect(&self, layout: QubitLayout) -> Histogram {
        let entries: BTreeMap<usize, f64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .filter(|&(_, p)| p >= OMIT_BELOW)
            .collect();
        Histogram::from_map(layout, entries)
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::Size(format!(
            "{n_qubits} qubits requested; the simulator supports 1 to {MAX_QUBITS}"
        )))
    }
}
