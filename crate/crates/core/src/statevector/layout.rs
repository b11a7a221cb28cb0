use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// A named, contiguous block of qubits. The first qubit is the least
/// significant bit of the register's value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubits(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    /// Value held by this register in the basis state `index`.
    pub fn value_of(&self, index: usize) -> u64 {
        ((index >> self.start) & ((1usize << self.len) - 1)) as u64
    }

    /// Bits of `value`, most significant first.
    pub fn render(&self, value: u64) -> String {
        format!("{:0width$b}", value, width = self.len)
    }
}

/// Disjoint named registers tiling qubits `0..n_qubits` in allocation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QubitLayout {
    registers: Vec<Register>,
}

impl QubitLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register after the last one and returns its qubit range.
    pub fn push(&mut self, name: impl Into<String>, len: usize) -> Result<Range<usize>> {
        let name = name.into();
        if len == 0 {
            return Err(Error::Layout(format!("register `{name}` is empty")));
        }
        if !is_valid_name(&name) {
            return Err(Error::Layout(format!("invalid register name `{name}`")));
        }
        if self.find(&name).is_some() {
            return Err(Error::Layout(format!("register `{name}` already exists")));
        }
        let reg = Register {
            name,
            start: self.n_qubits(),
            len,
        };
        let range = reg.qubits();
        self.registers.push(reg);
        Ok(range)
    }

    pub fn n_qubits(&self) -> usize {
        self.registers.last().map_or(0, |r| r.start + r.len)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn find(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.find(name)
            .ok_or_else(|| Error::Layout(format!("unknown register `{name}`")))
    }

    pub fn qubits(&self, name: &str) -> Result<Range<usize>> {
        self.register(name).map(Register::qubits)
    }

    /// Renders a basis state as each register's bits (MSB first), separated
    /// by spaces in layout order.
    pub fn render(&self, index: usize) -> String {
        self.registers
            .iter()
            .map(|r| r.render(r.value_of(index)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Register values of a basis state in layout order.
    pub fn values(&self, index: usize) -> Vec<u64> {
        self.registers.iter().map(|r| r.value_of(index)).collect()
    }

    /// Inverse of [`QubitLayout::render`].
    pub fn parse_key(&self, key: &str) -> Option<usize> {
        let fields: Vec<&str> = key.split_whitespace().collect();
        if fields.len() != self.registers.len() {
            return None;
        }
        let mut index = 0usize;
        for (reg, field) in self.registers.iter().zip(fields) {
            if field.len() != reg.len || !field.bytes().all(|b| b == b'0' || b == b'1') {
                return None;
            }
            index |= (usize::from_str_radix(field, 2).ok()?) << reg.start;
        }
        Some(index)
    }

    /// Parses the `# layout: name=[i,j,...] ...` header line.
    pub fn parse_header(line: &str) -> Result<QubitLayout> {
        let err = |message: String| Error::Parse { line: 1, message };
        let body = line
            .trim()
            .strip_prefix('#')
            .map(str::trim_start)
            .and_then(|s| s.strip_prefix("layout:"))
            .ok_or_else(|| err("expected `# layout:` header".into()))?;
        let mut layout = QubitLayout::new();
        for item in body.split_whitespace() {
            let (name, list) = item
                .split_once('=')
                .ok_or_else(|| err(format!("bad register entry `{item}`")))?;
            let list = list
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| err(format!("bad qubit list in `{item}`")))?;
            let qubits = list
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err(format!("bad qubit index in `{item}`")))?;
            let start = layout.n_qubits();
            if qubits.iter().enumerate().any(|(k, &q)| q != start + k) {
                return Err(err(format!(
                    "register `{name}` must occupy qubits starting at {start} contiguously"
                )));
            }
            layout
                .push(name, qubits.len())
                .map_err(|e| err(e.to_string()))?;
        }
        if layout.registers.is_empty() {
            return Err(err("layout header lists no registers".into()));
        }
        Ok(layout)
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for QubitLayout {
    /// The gate-list header line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "# layout:")?;
        for r in &self.registers {
            let qs: Vec<String> = r.qubits().map(|q| q.to_string()).collect();
            write!(f, " {}=[{}]", r.name, qs.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> QubitLayout {
        let mut l = QubitLayout::new();
        for (name, len) in [("I", 2), ("w1", 2), ("w2", 2), ("sum", 3), ("carry", 2)] {
            l.push(name, len).unwrap();
        }
        l
    }

    #[test]
    fn header_format() {
        assert_eq!(
            example().to_string(),
            "# layout: I=[0,1] w1=[2,3] w2=[4,5] sum=[6,7,8] carry=[9,10]"
        );
        assert_eq!(
            QubitLayout::parse_header(&example().to_string()).unwrap(),
            example()
        );
    }

    #[test]
    fn rejects_bad_headers() {
        for h in [
            "layout: a=[0]",
            "# layout:",
            "# layout: a=[1]",
            "# layout: a=[0] b=[2]",
            "# layout: a=[0,2]",
            "# layout: a=[0] a=[1]",
            "# layout: a=0",
        ] {
            assert!(QubitLayout::parse_header(h).is_err(), "{h}");
        }
    }

    #[test]
    fn push_rejects_duplicates_and_empty() {
        let mut l = example();
        assert!(matches!(l.push("w1", 1), Err(Error::Layout(_))));
        assert!(matches!(l.push("x", 0), Err(Error::Layout(_))));
        assert_eq!(l.push("extra", 1).unwrap(), 11..12);
    }

    #[test]
    fn render_is_msb_first_per_register() {
        let l = example();
        // I=11, w1=01, w2=10
        let index = 0b11 | (0b01 << 2) | (0b10 << 4);
        assert_eq!(l.render(index), "11 01 10 000 00");
        assert_eq!(l.values(index), vec![3, 1, 2, 0, 0]);
        assert_eq!(l.parse_key("11 01 10 000 00"), Some(index));
        assert_eq!(l.parse_key("11 01 10 000"), None);
    }

    #[test]
    fn unknown_register() {
        assert!(matches!(example().register("w3"), Err(Error::Layout(_))));
    }
}
