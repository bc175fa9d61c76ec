//! Gate lists with an explicit evaluation order.

use std::fmt;
use std::str::FromStr;

use crate::bits::check_width;
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::perm::Permutation;

/// How a gate listing is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Order {
    /// The first listed gate is applied to the input first.
    #[default]
    InputToOutput,
    /// The listing produced by output-side synthesis. The function is
    /// realized by applying the gates last-to-first.
    Discovery,
}

impl Order {
    pub fn as_str(self) -> &'static str {
        match self {
            Order::InputToOutput => "input-to-output",
            Order::Discovery => "discovery",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input-to-output" => Ok(Order::InputToOutput),
            "discovery" => Ok(Order::Discovery),
            other => Err(Error::parse(
                1,
                1,
                format!("unknown order '{other}' (expected input-to-output or discovery)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    width: u8,
    order: Order,
    gates: Vec<ToffoliGate>,
}

impl Circuit {
    pub fn new(width: usize, order: Order) -> Result<Self> {
        check_width(width)?;
        Ok(Circuit {
            width: width as u8,
            order,
            gates: Vec::new(),
        })
    }

    pub fn with_gates(width: usize, order: Order, gates: Vec<ToffoliGate>) -> Result<Self> {
        check_width(width)?;
        if let Some(g) = gates.iter().find(|g| g.width() != width) {
            return Err(Error::WidthMismatch {
                left: width,
                right: g.width(),
            });
        }
        Ok(Circuit {
            width: width as u8,
            order,
            gates,
        })
    }

    pub(crate) fn from_parts(width: usize, order: Order, gates: Vec<ToffoliGate>) -> Self {
        debug_assert!(gates.iter().all(|g| g.width() == width));
        Circuit {
            width: width as u8,
            order,
            gates,
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn gates(&self) -> &[ToffoliGate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<ToffoliGate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: ToffoliGate) -> Result<()> {
        if g.width() != self.width() {
            return Err(Error::WidthMismatch {
                left: self.width(),
                right: g.width(),
            });
        }
        self.gates.push(g);
        Ok(())
    }

    /// Total number of control connections over all gates.
    pub fn control_count(&self) -> usize {
        self.gates.iter().map(ToffoliGate::control_count).sum()
    }

    /// Gates in the order they act on an input vector.
    pub fn evaluation_order(&self) -> Box<dyn Iterator<Item = &ToffoliGate> + '_> {
        match self.order {
            Order::InputToOutput => Box::new(self.gates.iter()),
            Order::Discovery => Box::new(self.gates.iter().rev()),
        }
    }

    /// The gate list reversed, keeping the order tag. Realizes the inverse
    /// function since every gate is self-inverse.
    pub fn reversed(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.reverse();
        Circuit { gates, ..*self }
    }

    /// The same function, listed in `order`.
    pub fn to_order(&self, order: Order) -> Circuit {
        if order == self.order {
            return self.clone();
        }
        let mut c = self.reversed();
        c.order = order;
        c
    }

    /// Run one codeword through the circuit.
    pub fn eval(&self, v: u32) -> u32 {
        let gates = &self.gates;
        match self.order {
            Order::InputToOutput => gates.iter().fold(v, |v, g| g.apply_value(v)),
            Order::Discovery => gates.iter().rev().fold(v, |v, g| g.apply_value(v)),
        }
    }

    /// The permutation this circuit computes.
    pub fn simulate(&self) -> Permutation {
        let table = (0..1u32 << self.width).map(|v| self.eval(v)).collect();
        Permutation::from_table_unchecked(self.width(), table)
    }

    /// Whether the circuit computes `spec`, without materializing the table.
    pub fn realizes(&self, spec: &Permutation) -> bool {
        spec.width() == self.width()
            && spec
                .table()
                .iter()
                .enumerate()
                .all(|(i, &out)| self.eval(i as u32) == out)
    }
}

impl fmt::Display for Circuit {
    /// Gates separated by single spaces, in listing order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// The permutation computed by a circuit.
pub fn simulate(c: &Circuit) -> Permutation {
    c.simulate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gates(text: &str, n: usize) -> Vec<ToffoliGate> {
        text.split_whitespace()
            .map(|t| ToffoliGate::parse(t, n).unwrap())
            .collect()
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(3, Order::InputToOutput).unwrap();
        assert!(c.simulate().is_identity());
    }

    #[test]
    fn discovery_sequence_realizes_table() {
        let c = Circuit::with_gates(
            3,
            Order::Discovery,
            gates(
                "TOF(b',c';a) TOF(b,c';a) TOF(a,c;b) TOF(b,c;a) TOF(a',c;b)",
                3,
            ),
        )
        .unwrap();
        assert_eq!(c.simulate().table(), &[1, 0, 3, 2, 5, 7, 4, 6]);
        let forward = c.to_order(Order::InputToOutput);
        assert_eq!(forward.simulate(), c.simulate());
        assert_eq!(forward.gates()[0].to_string(), "TOF(a',c;b)");
    }

    #[test]
    fn single_gate_swaps_five_and_seven() {
        let c = Circuit::with_gates(3, Order::InputToOutput, gates("TOF(a,c;b)", 3)).unwrap();
        // a=1 and c=1 holds for 101 and 111 only.
        let expected: Vec<u32> = (0..8u32)
            .map(|v| if v & 0b101 == 0b101 { v ^ 0b010 } else { v })
            .collect();
        assert_eq!(c.simulate().table(), expected.as_slice());
        assert_eq!(c.simulate().table(), &[0, 1, 2, 3, 4, 7, 6, 5]);
    }

    #[test]
    fn rejects_mixed_widths() {
        let g = ToffoliGate::not(4, 0).unwrap();
        assert!(Circuit::with_gates(3, Order::InputToOutput, vec![g]).is_err());
        let mut c = Circuit::new(3, Order::InputToOutput).unwrap();
        assert!(c.push(g).is_err());
    }
}
