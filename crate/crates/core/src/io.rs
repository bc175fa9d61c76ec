//! Text formats for specifications and circuits.
//!
//! Specification file (`#` starts a comment):
//!
//! ```text
//! n=3
//! perm: 1 0 3 2 5 7 4 6
//! ```
//!
//! or, equivalently, a truth table with the highest line first:
//!
//! ```text
//! n=3
//! table:
//! 000 -> 001
//! 001 -> 000
//! ...
//! ```
//!
//! Circuit file:
//!
//! ```text
//! n=3
//! order=input-to-output
//! TOF(a',c;b)
//! TOF(b,c;a)
//! ```

use std::fmt::Write as _;

use crate::bits::check_width;
use crate::circuit::{Circuit, Order};
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::perm::Permutation;

/// Non-empty lines with comments stripped, tagged with 1-based line numbers
/// and the column where the content starts.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            None
        } else {
            let col = body.len() - body.trim_start().len() + 1;
            Some((i + 1, col, trimmed))
        }
    })
}

fn header_value<'a>(line: usize, col: usize, text: &'a str, key: &str) -> Result<&'a str> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::parse(line, col, format!("expected '{key}=<value>'")))?;
    if k.trim() != key {
        return Err(Error::parse(line, col, format!("expected '{key}=<value>'")));
    }
    Ok(v.trim())
}

fn parse_width(line: usize, col: usize, text: &str) -> Result<usize> {
    let v = header_value(line, col, text, "n")?;
    let width: usize = v
        .parse()
        .map_err(|_| Error::parse(line, col, format!("invalid width '{v}'")))?;
    check_width(width).map_err(|e| Error::parse(line, col, e.to_string()))?;
    Ok(width)
}

/// Parse a specification file into a validated permutation.
///
/// Syntax problems are reported as [`Error::Parse`]; a well-formed table that
/// is not a bijection is reported as [`Error::NotReversible`].
pub fn parse_spec(text: &str) -> Result<Permutation> {
    let mut lines = content_lines(text);
    let (l, c, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "empty specification"))?;
    let width = parse_width(l, c, first)?;
    let size = 1usize << width;

    let (l, c, body) = lines
        .next()
        .ok_or_else(|| Error::parse(l + 1, 1, "expected 'perm:' or 'table:'"))?;
    if let Some(rest) = body.strip_prefix("perm:") {
        let mut table = Vec::with_capacity(size);
        let mut push_numbers = |line: usize, text: &str| -> Result<()> {
            for tok in text.split_whitespace() {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| Error::parse(line, 1, format!("invalid value '{tok}'")))?;
                table.push(v);
            }
            Ok(())
        };
        push_numbers(l, rest)?;
        for (line, _, more) in lines {
            push_numbers(line, more)?;
        }
        Permutation::from_table(width, table)
    } else if body.trim_end() == "table:" {
        let mut table: Vec<Option<u32>> = vec![None; size];
        let mut rows = 0usize;
        for (line, col, row) in lines {
            let (lhs, rhs) = row
                .split_once("->")
                .ok_or_else(|| Error::parse(line, col, "expected '<input> -> <output>'"))?;
            let bits = |s: &str| -> Result<u32> {
                let s = s.trim();
                if s.len() != width || !s.chars().all(|ch| ch == '0' || ch == '1') {
                    return Err(Error::parse(
                        line,
                        col,
                        format!("expected {width} binary digits, found '{s}'"),
                    ));
                }
                Ok(u32::from_str_radix(s, 2).expect("validated binary"))
            };
            let (input, output) = (bits(lhs)?, bits(rhs)?);
            if table[input as usize].replace(output).is_some() {
                return Err(Error::parse(
                    line,
                    col,
                    format!("input row {lhs} listed twice", lhs = lhs.trim()),
                ));
            }
            rows += 1;
        }
        if rows != size {
            return Err(Error::NotReversible(format!(
                "table has {rows} rows, expected {size}"
            )));
        }
        Permutation::from_table(width, table.into_iter().map(Option::unwrap).collect())
    } else {
        Err(Error::parse(l, c, "expected 'perm:' or 'table:'"))
    }
}

/// Serialize a specification in `perm:` form.
pub fn write_spec(p: &Permutation) -> String {
    let mut out = format!("n={}\nperm:", p.width());
    for v in p.table() {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    out
}

/// Serialize a specification as a binary truth table.
pub fn write_spec_table(p: &Permutation) -> String {
    let w = p.width();
    let mut out = format!("n={w}\ntable:\n");
    for (i, v) in p.table().iter().enumerate() {
        writeln!(out, "{i:0w$b} -> {v:0w$b}").unwrap();
    }
    out
}

/// Parse a circuit file. The `order=` header is optional and defaults to
/// input-to-output.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = content_lines(text).peekable();
    let (l, c, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "empty circuit file"))?;
    let width = parse_width(l, c, first)?;
    let mut order = Order::InputToOutput;
    if let Some(&(l, c, text)) = lines.peek() {
        if text.starts_with("order") {
            let v = header_value(l, c, text, "order")?;
            order = v.parse().map_err(|e: Error| e.at_line(l))?;
            lines.next();
        }
    }
    let mut gates = Vec::new();
    for (line, col, text) in lines {
        let g = ToffoliGate::parse(text, width).map_err(|e| match e {
            Error::Parse {
                column, message, ..
            } => Error::parse(line, column + col - 1, message),
            other => other,
        })?;
        gates.push(g);
    }
    Ok(Circuit::from_parts(width, order, gates))
}

/// Serialize a circuit with its width and order headers, one gate per line.
pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("n={}\norder={}\n", c.width(), c.order());
    for g in c.gates() {
        writeln!(out, "{g}").unwrap();
    }
    out
}
