//! Mixed-polarity generalized Toffoli gates.

use std::fmt;

use crate::bits::{check_width, hamming, line_name, BitString};
use crate::error::{Error, Result};

/// A generalized Toffoli gate: flips `target` iff every positive control is
/// 1 and every negative control is 0. No controls gives a plain NOT.
///
/// Control sets are stored as bit masks over line indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToffoliGate {
    width: u8,
    target: u8,
    pos: u32,
    neg: u32,
}

impl ToffoliGate {
    pub fn new(width: usize, target: usize, pos: &[usize], neg: &[usize]) -> Result<Self> {
        let mask = |lines: &[usize]| -> Result<u32> {
            let mut m = 0u32;
            for &l in lines {
                if l >= width {
                    return Err(Error::LineOutOfRange { line: l, width });
                }
                if m & (1 << l) != 0 {
                    return Err(Error::InvalidGate(format!(
                        "line {} listed twice",
                        line_name(l)
                    )));
                }
                m |= 1 << l;
            }
            Ok(m)
        };
        check_width(width)?;
        Self::from_masks(width, target, mask(pos)?, mask(neg)?)
    }

    pub fn from_masks(width: usize, target: usize, pos: u32, neg: u32) -> Result<Self> {
        check_width(width)?;
        if target >= width {
            return Err(Error::LineOutOfRange {
                line: target,
                width,
            });
        }
        let all = (pos | neg) as u64;
        if all >> width != 0 {
            let line = (63 - all.leading_zeros()) as usize;
            return Err(Error::LineOutOfRange { line, width });
        }
        if pos & neg != 0 {
            return Err(Error::InvalidGate(
                "a line cannot be both a positive and a negative control".into(),
            ));
        }
        if (pos | neg) & (1 << target) != 0 {
            return Err(Error::InvalidGate(format!(
                "target {} is also a control",
                line_name(target)
            )));
        }
        Ok(ToffoliGate {
            width: width as u8,
            target: target as u8,
            pos,
            neg,
        })
    }

    /// Unconditional NOT on `target`.
    pub fn not(width: usize, target: usize) -> Result<Self> {
        Self::from_masks(width, target, 0, 0)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn target(&self) -> usize {
        self.target as usize
    }

    pub fn pos_mask(&self) -> u32 {
        self.pos
    }

    pub fn neg_mask(&self) -> u32 {
        self.neg
    }

    /// Lines used as controls, regardless of polarity.
    pub fn control_mask(&self) -> u32 {
        self.pos | self.neg
    }

    pub fn control_count(&self) -> usize {
        self.control_mask().count_ones() as usize
    }

    pub fn pos_controls(&self) -> impl Iterator<Item = usize> {
        lines_of(self.pos)
    }

    pub fn neg_controls(&self) -> impl Iterator<Item = usize> {
        lines_of(self.neg)
    }

    pub fn is_control(&self, line: usize) -> bool {
        self.control_mask() & (1 << line) != 0
    }

    /// The same gate with `line` removed from its controls.
    pub fn without_control(&self, line: usize) -> Self {
        let bit = !(1u32 << line);
        ToffoliGate {
            pos: self.pos & bit,
            neg: self.neg & bit,
            ..*self
        }
    }

    #[inline]
    pub fn fires(&self, v: u32) -> bool {
        v & self.pos == self.pos && v & self.neg == 0
    }

    /// Apply the gate to a raw codeword.
    #[inline]
    pub fn apply_value(&self, v: u32) -> u32 {
        if self.fires(v) {
            v ^ (1 << self.target)
        } else {
            v
        }
    }

    /// Apply the gate to a codeword of the same width.
    pub fn apply(&self, v: BitString) -> BitString {
        assert_eq!(v.width(), self.width(), "gate/bit string width mismatch");
        BitString::new_unchecked(self.width(), self.apply_value(v.value()))
    }

    /// Parse a gate in `TOF(b',c;a)` notation.
    pub fn parse(text: &str, width: usize) -> Result<Self> {
        check_width(width)?;
        GateParser::new(text, width).gate()
    }
}

fn lines_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Apply a gate to a codeword (free-function form).
pub fn apply_gate(g: &ToffoliGate, v: BitString) -> BitString {
    g.apply(v)
}

/// The fully-controlled gate that exchanges `x` and `y` and fixes every other
/// codeword. Only exists when the two differ in exactly one line.
pub fn swap_gate(x: BitString, y: BitString) -> Result<ToffoliGate> {
    let d = hamming(x, y)?;
    if d != 1 {
        return Err(Error::Contract(format!(
            "swap gate needs Hamming distance 1, got {d} between {x} and {y}"
        )));
    }
    Ok(swap_gate_raw(x.width(), x.value(), y.value()))
}

pub(crate) fn swap_gate_raw(width: usize, x: u32, y: u32) -> ToffoliGate {
    let diff = x ^ y;
    debug_assert_eq!(diff.count_ones(), 1);
    let target = diff.trailing_zeros() as u8;
    let full = ((1u64 << width) - 1) as u32;
    let others = full & !diff;
    ToffoliGate {
        width: width as u8,
        target,
        pos: x & others,
        neg: !x & others,
    }
}

impl fmt::Display for ToffoliGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TOF(")?;
        let mut first = true;
        for line in lines_of(self.control_mask()) {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}", line_name(line))?;
            if self.neg & (1 << line) != 0 {
                f.write_str("'")?;
            }
        }
        write!(f, ";{})", line_name(self.target()))
    }
}

/// Format a gate in `TOF(b',c;a)` notation.
pub fn format_gate(g: &ToffoliGate) -> String {
    g.to_string()
}

/// Parse a gate in `TOF(b',c;a)` notation over `width` lines.
pub fn parse_gate(text: &str, width: usize) -> Result<ToffoliGate> {
    ToffoliGate::parse(text, width)
}

struct GateParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    width: usize,
}

impl GateParser {
    fn new(src: &str, width: usize) -> Self {
        GateParser {
            chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
            width,
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(c, _)| c)
            .unwrap_or(self.chars.len() + 1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(1, self.column(), msg))
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected '{want}', found '{c}'")),
            None => self.err(format!("expected '{want}', found end of input")),
        }
    }

    fn line(&mut self) -> Result<usize> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {
                let line = (c as u8 - b'a') as usize;
                if line >= self.width {
                    return self.err(format!(
                        "unknown line '{c}' for a {}-line circuit",
                        self.width
                    ));
                }
                self.pos += 1;
                Ok(line)
            }
            Some(c) => self.err(format!("expected a line letter, found '{c}'")),
            None => self.err("expected a line letter, found end of input"),
        }
    }

    fn gate(mut self) -> Result<ToffoliGate> {
        self.skip_ws();
        for want in "TOF".chars() {
            match self.chars.get(self.pos) {
                Some(&(_, c)) if c == want => self.pos += 1,
                _ => return self.err("expected 'TOF('"),
            }
        }
        self.expect('(')?;
        let (mut pos, mut neg) = (0u32, 0u32);
        if self.peek() != Some(';') {
            loop {
                let col = self.column();
                let line = self.line()?;
                let negative = if self.peek() == Some('\'') {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                if (pos | neg) & (1 << line) != 0 {
                    return Err(Error::parse(
                        1,
                        col,
                        format!("control '{}' repeated", line_name(line)),
                    ));
                }
                if negative {
                    neg |= 1 << line;
                } else {
                    pos |= 1 << line;
                }
                match self.peek() {
                    Some(',') => self.pos += 1,
                    _ => break,
                }
            }
        }
        self.expect(';')?;
        let col = self.column();
        let target = self.line()?;
        if (pos | neg) & (1 << target) != 0 {
            return Err(Error::parse(
                1,
                col,
                format!("target '{}' is also a control", line_name(target)),
            ));
        }
        self.expect(')')?;
        if let Some(c) = self.peek() {
            return self.err(format!("unexpected trailing '{c}'"));
        }
        ToffoliGate::from_masks(self.width, target, pos, neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(v: u32) -> BitString {
        BitString::new(3, v).unwrap()
    }

    fn g(text: &str) -> ToffoliGate {
        ToffoliGate::parse(text, 3).unwrap()
    }

    #[test]
    fn format_examples() {
        let gate = ToffoliGate::new(3, 0, &[1, 2], &[]).unwrap();
        assert_eq!(gate.to_string(), "TOF(b,c;a)");
        assert_eq!(ToffoliGate::not(3, 0).unwrap().to_string(), "TOF(;a)");
        let gate = ToffoliGate::new(3, 1, &[2], &[0]).unwrap();
        assert_eq!(gate.to_string(), "TOF(a',c;b)");
    }

    #[test]
    fn parse_examples() {
        let not = g("TOF(;a)");
        assert_eq!((not.target(), not.control_count()), (0, 0));
        let neg = g("TOF(b',c';a)");
        assert_eq!(neg.target(), 0);
        assert_eq!(neg.neg_mask(), 0b110);
        assert_eq!(neg.pos_mask(), 0);
        assert_eq!(g(" TOF( a, c ; b ) "), g("TOF(a,c;b)"));
    }

    #[test]
    fn parse_errors() {
        let col = |text: &str| match ToffoliGate::parse(text, 3) {
            Err(Error::Parse { column, .. }) => column,
            other => panic!("expected parse error for {text}, got {other:?}"),
        };
        assert_eq!(col("TOF(d;a)"), 5);
        assert_eq!(col("TOF(a;a)"), 7);
        assert_eq!(col("TOF(a,a;b)"), 7);
        assert_eq!(col("TOF(a;b"), 8);
        assert_eq!(col("TOX(a;b)"), 3);
        assert_eq!(col("TOF(a;b) x"), 10);
        assert_eq!(col("TOF(A;b)"), 5);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(g("TOF(b,c;a)").apply(bs(0b111)), bs(0b110));
        assert_eq!(g("TOF(;a)").apply(bs(0b000)), bs(0b001));
        assert_eq!(g("TOF(b',c';a)").apply(bs(0b010)), bs(0b010));
    }

    #[test]
    fn swap_gate_examples() {
        assert_eq!(swap_gate(bs(0b111), bs(0b110)).unwrap(), g("TOF(b,c;a)"));
        assert_eq!(swap_gate(bs(0b000), bs(0b001)).unwrap(), g("TOF(b',c';a)"));
        assert_eq!(swap_gate(bs(0b101), bs(0b111)).unwrap(), g("TOF(a,c;b)"));
        assert!(matches!(
            swap_gate(bs(0b000), bs(0b011)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(swap_gate(bs(5), bs(5)), Err(Error::Contract(_))));
    }

    #[test]
    fn swap_gate_moves_exactly_two_codewords() {
        for n in 1..=5usize {
            for x in 0..(1u32 << n) {
                for line in 0..n {
                    let y = x ^ (1 << line);
                    let gate =
                        swap_gate(BitString::new(n, x).unwrap(), BitString::new(n, y).unwrap())
                            .unwrap();
                    assert_eq!(gate.control_count(), n - 1);
                    let moved: Vec<u32> = (0..(1u32 << n))
                        .filter(|&v| gate.apply_value(v) != v)
                        .collect();
                    let mut expect = vec![x, y];
                    expect.sort();
                    assert_eq!(moved, expect);
                }
            }
        }
    }

    #[test]
    fn invalid_gates() {
        assert!(ToffoliGate::new(3, 0, &[0], &[]).is_err());
        assert!(ToffoliGate::new(3, 0, &[1], &[1]).is_err());
        assert!(ToffoliGate::new(3, 3, &[], &[]).is_err());
        assert!(ToffoliGate::new(3, 0, &[3], &[]).is_err());
        assert!(ToffoliGate::from_masks(3, 0, 0b1000, 0).is_err());
    }
}
