use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A primitive gate of the simulator's gate set.
///
/// Every gate in the set is self-inverse, so reversing a gate list inverts it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    /// X on `target` iff every control qubit is 1. No controls behaves as X.
    Mcx {
        controls: Vec<usize>,
        target: usize,
    },
    /// Phase -1 iff every listed qubit is 1. The last qubit is the nominal target.
    Mcz(Vec<usize>),
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Mcx {
            controls: vec![control],
            target,
        }
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Gate {
        Gate::Mcx {
            controls: vec![c0, c1],
            target,
        }
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => vec![*q],
            Gate::Mcx { controls, target } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
            Gate::Mcz(qs) => qs.clone(),
        }
    }

    /// Checks that indices are distinct and below `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if qubits.is_empty() {
            return Err(Error::Index("MCZ needs at least one qubit".into()));
        }
        let mut seen = 0u64;
        for &q in &qubits {
            if q >= n_qubits {
                return Err(Error::Index(format!(
                    "qubit {q} out of range for {n_qubits} qubits in `{self}`"
                )));
            }
            if seen & (1 << q) != 0 {
                return Err(Error::Index(format!("qubit {q} repeated in `{self}`")));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Action on a computational basis state: the image index and whether the
    /// phase was flipped. `None` for H, which does not map basis states to
    /// basis states.
    pub fn apply_to_basis(&self, index: usize) -> Option<(usize, bool)> {
        match self {
            Gate::H(_) => None,
            Gate::X(q) => Some((index ^ (1 << q), false)),
            Gate::Z(q) => Some((index, index & (1 << q) != 0)),
            Gate::Mcx { controls, target } => {
                let mask = bit_mask(controls);
                if index & mask == mask {
                    Some((index ^ (1 << target), false))
                } else {
                    Some((index, false))
                }
            }
            Gate::Mcz(qs) => {
                let mask = bit_mask(qs);
                Some((index, index & mask == mask))
            }
        }
    }
}

pub(crate) fn bit_mask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Mcx { controls, target } => {
                write!(f, "MCX")?;
                for c in controls {
                    write!(f, " {c}")?;
                }
                write!(f, " -> {target}")
            }
            Gate::Mcz(qs) => {
                write!(f, "MCZ")?;
                for q in qs {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses one line of the gate-list format. Errors carry line 0; callers
/// that know the line number replace it.
impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Gate> {
        let err = |message: String| Error::Parse { line: 0, message };
        let mut tokens = line.split_whitespace();
        let op = tokens.next().ok_or_else(|| err("empty gate line".into()))?;
        let rest: Vec<&str> = tokens.collect();
        let index = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| err(format!("bad qubit index `{t}`")))
        };
        let single = |rest: &[&str]| match rest {
            [q] => index(q),
            _ => Err(err(format!("`{op}` takes exactly one qubit"))),
        };
        match op {
            "H" => single(&rest).map(Gate::H),
            "X" => single(&rest).map(Gate::X),
            "Z" => single(&rest).map(Gate::Z),
            "MCX" => {
                let arrow = rest
                    .iter()
                    .position(|t| *t == "->")
                    .ok_or_else(|| err("MCX needs `-> <target>`".into()))?;
                let controls = rest[..arrow]
                    .iter()
                    .map(|t| index(t))
                    .collect::<Result<Vec<_>>>()?;
                let target = match &rest[arrow + 1..] {
                    [t] => index(t)?,
                    _ => return Err(err("MCX needs exactly one target".into())),
                };
                Ok(Gate::Mcx { controls, target })
            }
            "MCZ" => {
                if rest.is_empty() {
                    return Err(err("MCZ needs at least one qubit".into()));
                }
                rest.iter()
                    .map(|t| index(t))
                    .collect::<Result<Vec<_>>>()
                    .map(Gate::Mcz)
            }
            other => Err(err(format!("unknown gate `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        let gates = [
            Gate::H(3),
            Gate::X(0),
            Gate::Z(7),
            Gate::toffoli(1, 2, 0),
            Gate::Mcx {
                controls: vec![],
                target: 4,
            },
            Gate::Mcz(vec![6, 7, 8]),
        ];
        for g in gates {
            let line = g.to_string();
            assert_eq!(line.parse::<Gate>().unwrap(), g, "{line}");
        }
        assert_eq!(Gate::toffoli(1, 2, 0).to_string(), "MCX 1 2 -> 0");
    }

    #[test]
    fn rejects_malformed_lines() {
        for line in [
            "",
            "Y 1",
            "H",
            "H 1 2",
            "MCX 1 2",
            "MCX 1 -> 2 3",
            "MCZ",
            "X -1",
        ] {
            assert!(line.parse::<Gate>().is_err(), "{line:?}");
        }
    }

    #[test]
    fn validation() {
        assert!(Gate::toffoli(0, 1, 2).validate(3).is_ok());
        assert!(matches!(
            Gate::toffoli(0, 1, 3).validate(3),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            Gate::toffoli(0, 0, 2).validate(3),
            Err(Error::Index(_))
        ));
        assert!(matches!(
            Gate::Mcz(vec![]).validate(3),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn toffoli_truth_table_on_basis() {
        let g = Gate::toffoli(1, 2, 0);
        for i in 0..8usize {
            let expected = if i & 0b110 == 0b110 { i ^ 1 } else { i };
            assert_eq!(g.apply_to_basis(i), Some((expected, false)));
        }
        assert_eq!(Gate::H(0).apply_to_basis(0), None);
    }
}
