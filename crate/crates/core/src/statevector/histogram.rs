use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::QubitLayout;
use crate::error::{Error, Result};

/// Probabilities below this are treated as floating-point dust and dropped.
pub const OMIT_BELOW: f64 = 1e-12;

/// Outcome probabilities keyed by basis index over a register layout.
///
/// Keys render as each register's bits, most significant first, with
/// registers space-separated in layout order (`"11 00"`).
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    layout: QubitLayout,
    entries: BTreeMap<usize, f64>,
}

impl Histogram {
    /// Builds a histogram from `(index, probability)` pairs. Repeated indices
    /// accumulate.
    pub fn from_entries(
        layout: QubitLayout,
        entries: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Histogram> {
        let dim = 1usize << layout.n_qubits();
        let mut map = BTreeMap::new();
        for (index, p) in entries {
            if index >= dim {
                return Err(Error::Index(format!(
                    "outcome {index} out of range for {} qubits",
                    layout.n_qubits()
                )));
            }
            if !(0.0..=1.0 + 1e-9).contains(&p) {
                return Err(Error::Argument(format!("probability {p} outside [0, 1]")));
            }
            *map.entry(index).or_insert(0.0) += p;
        }
        Ok(Histogram {
            layout,
            entries: map,
        })
    }

    pub(crate) fn from_map(layout: QubitLayout, entries: BTreeMap<usize, f64>) -> Histogram {
        Histogram { layout, entries }
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of basis index `index`; omitted outcomes read as 0.
    pub fn probability(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    /// Probability looked up by rendered key; `None` if the key is malformed.
    pub fn get(&self, key: &str) -> Option<f64> {
        self.layout.parse_key(key).map(|i| self.probability(i))
    }

    pub fn key(&self, index: usize) -> String {
        self.layout.render(index)
    }

    /// `(index, probability)` in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&i, &p)| (i, p))
    }

    /// `(key, probability)` in ascending index order.
    pub fn keyed(&self) -> Vec<(String, f64)> {
        self.iter().map(|(i, p)| (self.key(i), p)).collect()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Sums out every register not named in `registers`. The result keeps
    /// the retained registers in their original layout order.
    pub fn marginal(&self, registers: &[&str]) -> Result<Histogram> {
        for name in registers {
            self.layout.register(name)?;
        }
        let kept: Vec<_> = self
            .layout
            .registers()
            .iter()
            .filter(|r| registers.contains(&r.name.as_str()))
            .collect();
        let mut layout = QubitLayout::new();
        for r in &kept {
            layout.push(r.name.clone(), r.len)?;
        }
        let mut entries = BTreeMap::new();
        for (&index, &p) in &self.entries {
            let mut reduced = 0usize;
            for (old, new) in kept.iter().zip(layout.registers()) {
                reduced |= (old.value_of(index) as usize) << new.start;
            }
            *entries.entry(reduced).or_insert(0.0) += p;
        }
        Ok(Histogram { layout, entries })
    }

    /// Draws `shots` outcomes with a ChaCha8 generator seeded by `seed`.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        if shots == 0 {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        let outcomes: Vec<(usize, f64)> = self.iter().collect();
        let dist = WeightedIndex::new(outcomes.iter().map(|&(_, p)| p))
            .map_err(|e| Error::Argument(format!("cannot sample histogram: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tally = vec![0usize; outcomes.len()];
        for _ in 0..shots {
            tally[rng.sample(&dist)] += 1;
        }
        Ok(outcomes
            .iter()
            .zip(tally)
            .filter(|&(_, n)| n > 0)
            .map(|(&(i, _), n)| (self.key(i), n))
            .collect())
    }
}
