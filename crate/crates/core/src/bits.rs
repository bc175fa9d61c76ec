//! Bit strings: n-bit codewords that double as integers in `0..2^n`.
//!
//! Line 0 (written `a`) is the least-significant bit, line 1 (`b`) the next,
//! and so on. The truth-table row `c=0 b=0 a=1` is therefore the integer 1.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported line count. Permutation tables hold `2^width` entries.
pub const MAX_WIDTH: usize = 16;

pub(crate) fn check_width(width: usize) -> Result<()> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::InvalidWidth(width))
    }
}

/// Name of a line in gate notation: `a`, `b`, `c`, ...
pub fn line_name(line: usize) -> char {
    debug_assert!(line < 26);
    (b'a' + line as u8) as char
}

/// An n-bit codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    width: u8,
    value: u32,
}

impl BitString {
    pub fn new(width: usize, value: u32) -> Result<Self> {
        check_width(width)?;
        if u64::from(value) >= 1u64 << width {
            return Err(Error::ValueOutOfRange { value, width });
        }
        Ok(BitString {
            width: width as u8,
            value,
        })
    }

    /// Construct without validation. The caller guarantees `value < 2^width`.
    pub(crate) fn new_unchecked(width: usize, value: u32) -> Self {
        debug_assert!((1..=MAX_WIDTH).contains(&width) && u64::from(value) < 1u64 << width);
        BitString {
            width: width as u8,
            value,
        }
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn value(self) -> u32 {
        self.value
    }

    /// State of line `line`.
    pub fn bit(self, line: usize) -> bool {
        (self.value >> line) & 1 == 1
    }

    /// Flip a single line.
    pub fn flip(self, line: usize) -> Self {
        assert!(line < self.width(), "line {line} out of range");
        BitString {
            width: self.width,
            value: self.value ^ (1 << line),
        }
    }
}

impl fmt::Display for BitString {
    /// Binary, most-significant line first (the truth-table column order).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width())
    }
}

/// Number of positions at which two codewords differ.
pub fn hamming(x: BitString, y: BitString) -> Result<u32> {
    if x.width != y.width {
        return Err(Error::WidthMismatch {
            left: x.width(),
            right: y.width(),
        });
    }
    Ok(hamming_raw(x.value, y.value))
}

#[inline]
pub(crate) fn hamming_raw(x: u32, y: u32) -> u32 {
    (x ^ y).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(w: usize, v: u32) -> BitString {
        BitString::new(w, v).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(bs(3, 0b111), bs(3, 0b110)).unwrap(), 1);
        assert_eq!(hamming(bs(3, 0b000), bs(3, 0b111)).unwrap(), 3);
        for v in 0..8 {
            assert_eq!(hamming(bs(3, v), bs(3, v)).unwrap(), 0);
        }
    }

    #[test]
    fn hamming_width_mismatch() {
        assert!(matches!(
            hamming(bs(3, 1), bs(4, 1)),
            Err(Error::WidthMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn distinct_strings_are_within_bounds() {
        for n in 1..=5 {
            for x in 0..(1u32 << n) {
                for y in 0..(1u32 << n) {
                    if x != y {
                        let d = hamming(bs(n, x), bs(n, y)).unwrap() as usize;
                        assert!((1..=n).contains(&d));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_values() {
        assert!(BitString::new(3, 8).is_err());
        assert!(BitString::new(0, 0).is_err());
        assert!(BitString::new(17, 0).is_err());
        assert!(BitString::new(16, 0xffff).is_ok());
    }

    #[test]
    fn display_is_msb_first() {
        assert_eq!(bs(3, 1).to_string(), "001");
        assert_eq!(bs(3, 6).to_string(), "110");
    }
}
