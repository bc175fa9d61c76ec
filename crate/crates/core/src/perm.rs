//! Reversible specifications as permutation tables.

use std::fmt;

use crate::bits::{check_width, hamming_raw};
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;

/// A bijection on `0..2^width`, stored as `table[i] = f(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    width: u8,
    table: Vec<u32>,
}

impl Permutation {
    /// Validate and wrap a table. Fails unless every value in `0..2^width`
    /// appears exactly once.
    pub fn from_table(width: usize, table: Vec<u32>) -> Result<Self> {
        check_width(width)?;
        let size = 1usize << width;
        if table.len() != size {
            return Err(Error::NotReversible(format!(
                "expected {size} entries for {width} lines, found {}",
                table.len()
            )));
        }
        let mut seen = vec![false; size];
        for (i, &v) in table.iter().enumerate() {
            let slot = seen.get_mut(v as usize).ok_or_else(|| {
                Error::NotReversible(format!("output {v} at input {i} is out of range"))
            })?;
            if *slot {
                return Err(Error::NotReversible(format!(
                    "output {v} appears more than once"
                )));
            }
            *slot = true;
        }
        Ok(Permutation {
            width: width as u8,
            table,
        })
    }

    pub(crate) fn from_table_unchecked(width: usize, table: Vec<u32>) -> Self {
        debug_assert!(Self::from_table(width, table.clone()).is_ok());
        Permutation {
            width: width as u8,
            table,
        }
    }

    pub fn identity(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Permutation {
            width: width as u8,
            table: (0..1u32 << width).collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Number of rows, `2^width`.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u32> {
        self.table
    }

    pub fn get(&self, input: u32) -> u32 {
        self.table[input as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// Compose `g` onto the output column: every entry `v` becomes `g(v)`.
    pub fn apply_gate_output_side(&self, g: &ToffoliGate) -> Permutation {
        let mut out = self.clone();
        out.apply_gate_in_place(g);
        out
    }

    pub(crate) fn apply_gate_in_place(&mut self, g: &ToffoliGate) {
        assert_eq!(g.width(), self.width(), "gate/permutation width mismatch");
        for v in &mut self.table {
            *v = g.apply_value(*v);
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.table.len()];
        for (i, &v) in self.table.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation {
            width: self.width,
            table: inv,
        }
    }

    /// Sum of Hamming distances between every input and its output.
    pub fn complexity(&self) -> u64 {
        self.table
            .iter()
            .enumerate()
            .map(|(i, &v)| u64::from(hamming_raw(i as u32, v)))
            .sum()
    }
}

impl fmt::Display for Permutation {
    /// `{1, 0, 3, 2}` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Inverse of a reversible specification.
pub fn invert(p: &Permutation) -> Permutation {
    p.inverse()
}

/// Sum of input/output Hamming distances over all rows.
pub fn complexity(p: &Permutation) -> u64 {
    p.complexity()
}

/// Output-side composition of a gate onto a specification.
pub fn apply_gate_output_side(g: &ToffoliGate, p: &Permutation) -> Permutation {
    p.apply_gate_output_side(g)
}
