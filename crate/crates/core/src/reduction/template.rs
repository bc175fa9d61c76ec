//! Symbolic rewrite templates.
//!
//! A template is written as `pattern => replacement`, each side a sequence
//! of gates over line variables `v0`..`v9`:
//!
//! ```text
//! TOF(*,v1;v0) TOF(*,v1';v0) => TOF(*;v0)
//! ```
//!
//! Inside a gate, a control is `vK` (positive), `vK'` (negative), `vK^p`
//! (polarity variable `p`) or `vK^!p` (the opposite of `p`). The token `*`
//! stands for a context: a control set on lines not bound to any variable,
//! shared by every gate that mentions it. An empty side is written as
//! nothing, or `()`.
//!
//! Every template is checked by exhaustive simulation under every binding on
//! up to four lines before it is accepted.

use std::fmt;

use crate::circuit::{Circuit, Order};
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;

/// Largest line count used when checking a template.
const VERIFY_WIDTH: usize = 4;
const MAX_LINE_VARS: usize = 10;
const MAX_POLARITY_VARS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    /// Bound to a polarity variable.
    Var(u8),
    /// Opposite of a polarity variable.
    NotVar(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymControl {
    pub line: u8,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymGate {
    pub target: u8,
    pub controls: Vec<SymControl>,
    /// Whether the shared context control set is included.
    pub context: bool,
}

impl SymGate {
    /// Rough width used to pick the matching anchor.
    pub(crate) fn weight(&self) -> usize {
        self.controls.len() * 2 + usize::from(self.context)
    }
}

/// A concrete assignment of a template's variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Binding {
    pub lines: [Option<u8>; MAX_LINE_VARS],
    pub polarities: [Option<bool>; MAX_POLARITY_VARS],
    /// `(positive, negative)` masks.
    pub context: Option<(u32, u32)>,
}

impl Binding {
    pub(crate) fn new() -> Self {
        Binding {
            lines: [None; MAX_LINE_VARS],
            polarities: [None; MAX_POLARITY_VARS],
            context: None,
        }
    }

    fn bound_mask(&self) -> u32 {
        self.lines.iter().flatten().fold(0, |m, &l| m | (1u32 << l))
    }

    fn bind_line(&mut self, var: u8, line: u8) -> bool {
        match self.lines[var as usize] {
            Some(l) => l == line,
            None => {
                if self.bound_mask() & (1 << line) != 0 {
                    return false;
                }
                if let Some((p, n)) = self.context {
                    if (p | n) & (1 << line) != 0 {
                        return false;
                    }
                }
                self.lines[var as usize] = Some(line);
                true
            }
        }
    }

    fn bind_polarity(&mut self, polarity: Polarity, positive: bool) -> bool {
        let (var, want) = match polarity {
            Polarity::Positive => return positive,
            Polarity::Negative => return !positive,
            Polarity::Var(v) => (v, positive),
            Polarity::NotVar(v) => (v, !positive),
        };
        match self.polarities[var as usize] {
            Some(b) => b == want,
            None => {
                self.polarities[var as usize] = Some(want);
                true
            }
        }
    }

    /// Every extension of this binding under which `sym` matches `gate`.
    pub(crate) fn extensions(&self, sym: &SymGate, gate: &ToffoliGate) -> Vec<Binding> {
        let mut b = *self;
        let mut out = Vec::new();
        if b.bind_line(sym.target, gate.target() as u8) {
            b.extend_controls(sym, gate, 0, 0, &mut out);
        }
        out
    }

    fn extend_controls(
        &self,
        sym: &SymGate,
        gate: &ToffoliGate,
        idx: usize,
        explicit: u32,
        out: &mut Vec<Binding>,
    ) {
        let Some(c) = sym.controls.get(idx) else {
            let rest = (gate.pos_mask() & !explicit, gate.neg_mask() & !explicit);
            if !sym.context {
                if rest == (0, 0) {
                    out.push(*self);
                }
                return;
            }
            match self.context {
                Some(ctx) if ctx == rest => out.push(*self),
                Some(_) => {}
                None if (rest.0 | rest.1) & self.bound_mask() == 0 => {
                    let mut b = *self;
                    b.context = Some(rest);
                    out.push(b);
                }
                None => {}
            }
            return;
        };
        let candidates = match self.lines[c.line as usize] {
            Some(l) => 1u32 << l,
            None => gate.control_mask() & !explicit & !self.bound_mask(),
        };
        for l in (0..32u8).filter(|l| candidates & (1 << l) != 0) {
            if !gate.is_control(l as usize) {
                continue;
            }
            let mut b = *self;
            let positive = gate.pos_mask() & (1 << l) != 0;
            if b.bind_line(c.line, l) && b.bind_polarity(c.polarity, positive) {
                b.extend_controls(sym, gate, idx + 1, explicit | (1 << l), out);
            }
        }
    }

    pub(crate) fn instantiate(&self, sym: &SymGate, width: usize) -> ToffoliGate {
        let line = |v: u8| self.lines[v as usize].expect("line variable bound") as usize;
        let (mut pos, mut neg) = if sym.context {
            self.context.unwrap_or((0, 0))
        } else {
            (0, 0)
        };
        for c in &sym.controls {
            let positive = match c.polarity {
                Polarity::Positive => true,
                Polarity::Negative => false,
                Polarity::Var(v) => self.polarities[v as usize].expect("polarity bound"),
                Polarity::NotVar(v) => !self.polarities[v as usize].expect("polarity bound"),
            };
            if positive {
                pos |= 1 << line(c.line);
            } else {
                neg |= 1 << line(c.line);
            }
        }
        ToffoliGate::from_masks(width, line(sym.target), pos, neg)
            .expect("binding produces a well-formed gate")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    name: String,
    pattern: Vec<SymGate>,
    replacement: Vec<SymGate>,
    polarity_names: Vec<String>,
    line_vars: usize,
    uses_context: bool,
}

impl Template {
    /// Build and verify a template. Rejects templates whose two sides differ
    /// as functions under any binding, whose replacement is longer than the
    /// pattern, or whose replacement mentions a variable the pattern does not
    /// bind.
    pub fn new(
        name: impl Into<String>,
        pattern: Vec<SymGate>,
        replacement: Vec<SymGate>,
        polarity_names: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        let reject = |msg: String| Err(Error::InvalidTemplate(format!("{name}: {msg}")));
        if pattern.is_empty() {
            return reject("empty pattern".into());
        }
        if replacement.len() > pattern.len() {
            return reject("replacement is longer than the pattern".into());
        }
        for g in pattern.iter().chain(&replacement) {
            let mut seen = 1u32 << g.target;
            for c in &g.controls {
                if c.line as usize >= MAX_LINE_VARS || seen & (1 << c.line) != 0 {
                    return reject(format!("line variable v{} reused within a gate", c.line));
                }
                seen |= 1 << c.line;
                if let Polarity::Var(v) | Polarity::NotVar(v) = c.polarity {
                    if v as usize >= polarity_names.len().min(MAX_POLARITY_VARS) {
                        return reject(format!("unknown polarity variable #{v}"));
                    }
                }
            }
        }
        let lines_of = |gates: &[SymGate]| {
            gates.iter().fold(0u32, |m, g| {
                g.controls
                    .iter()
                    .fold(m | (1 << g.target), |m, c| m | (1 << c.line))
            })
        };
        let pols_of = |gates: &[SymGate]| {
            gates
                .iter()
                .flat_map(|g| &g.controls)
                .fold(0u32, |m, c| match c.polarity {
                    Polarity::Var(v) | Polarity::NotVar(v) => m | (1 << v),
                    _ => m,
                })
        };
        let pat_lines = lines_of(&pattern);
        if lines_of(&replacement) & !pat_lines != 0
            || pols_of(&replacement) & !pols_of(&pattern) != 0
        {
            return reject("replacement uses a variable the pattern does not bind".into());
        }
        if replacement.iter().any(|g| g.context) && !pattern.iter().any(|g| g.context) {
            return reject("replacement uses a context the pattern does not bind".into());
        }
        if pat_lines != (1u32 << pat_lines.count_ones()) - 1 {
            return reject("line variables must be numbered v0, v1, ... without gaps".into());
        }
        let line_vars = pat_lines.count_ones() as usize;
        if line_vars > VERIFY_WIDTH {
            return reject(format!("more than {VERIFY_WIDTH} line variables"));
        }
        let t = Template {
            uses_context: pattern.iter().any(|g| g.context),
            name,
            pattern,
            replacement,
            polarity_names,
            line_vars,
        };
        t.verify()?;
        Ok(t)
    }

    /// Parse a template from `pattern => replacement` text.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let (lhs, rhs) = text
            .split_once("=>")
            .ok_or_else(|| Error::InvalidTemplate("expected 'pattern => replacement'".into()))?;
        let mut names = Vec::new();
        let pattern = parse_side(lhs, &mut names)?;
        let replacement = parse_side(rhs, &mut names)?;
        Template::new(name, pattern, replacement, names)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &[SymGate] {
        &self.pattern
    }

    pub fn replacement(&self) -> &[SymGate] {
        &self.replacement
    }

    /// Same-length templates only reorder gates.
    pub fn is_move(&self) -> bool {
        self.replacement.len() == self.pattern.len()
    }

    pub(crate) fn polarity_vars(&self) -> usize {
        self.polarity_names.len()
    }

    fn verify(&self) -> Result<()> {
        for width in self.line_vars.max(1)..=VERIFY_WIDTH {
            let mut ok = Ok(());
            self.for_each_binding(width, &mut |b| {
                if ok.is_err() {
                    return;
                }
                let side = |gates: &[SymGate]| {
                    let gates = gates.iter().map(|g| b.instantiate(g, width)).collect();
                    Circuit::from_parts(width, Order::InputToOutput, gates)
                };
                let (lhs, rhs) = (side(&self.pattern), side(&self.replacement));
                if lhs.simulate() != rhs.simulate() {
                    ok = Err(Error::InvalidTemplate(format!(
                        "{}: {lhs} and {rhs} differ on {width} lines",
                        self.name
                    )));
                }
            });
            ok?;
        }
        Ok(())
    }

    fn for_each_binding(&self, width: usize, f: &mut dyn FnMut(&Binding)) {
        let mut lines = vec![0u8; self.line_vars];
        let mut used = vec![false; width];
        self.assign_lines(width, 0, &mut lines, &mut used, f);
    }

    fn assign_lines(
        &self,
        width: usize,
        var: usize,
        lines: &mut [u8],
        used: &mut [bool],
        f: &mut dyn FnMut(&Binding),
    ) {
        if var == lines.len() {
            let free: Vec<u8> = (0..width as u8).filter(|&l| !used[l as usize]).collect();
            let contexts = if self.uses_context {
                3usize.pow(free.len() as u32)
            } else {
                1
            };
            for pols in 0..1u32 << self.polarity_vars() {
                for ctx in 0..contexts {
                    let mut b = Binding::new();
                    for (i, &l) in lines.iter().enumerate() {
                        b.lines[i] = Some(l);
                    }
                    for (i, p) in b.polarities[..self.polarity_vars()].iter_mut().enumerate() {
                        *p = Some(pols & (1 << i) != 0);
                    }
                    let (mut pos, mut neg, mut code) = (0u32, 0u32, ctx);
                    for &l in &free {
                        match code % 3 {
                            1 => pos |= 1 << l,
                            2 => neg |= 1 << l,
                            _ => {}
                        }
                        code /= 3;
                    }
                    b.context = Some((pos, neg));
                    f(&b);
                }
            }
            return;
        }
        for l in 0..width {
            if !used[l] {
                used[l] = true;
                lines[var] = l as u8;
                self.assign_lines(width, var + 1, lines, used, f);
                used[l] = false;
            }
        }
    }

    fn fmt_side(&self, f: &mut fmt::Formatter<'_>, gates: &[SymGate]) -> fmt::Result {
        if gates.is_empty() {
            return f.write_str("()");
        }
        for (i, g) in gates.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str("TOF(")?;
            let mut items = Vec::new();
            if g.context {
                items.push("*".to_string());
            }
            for c in &g.controls {
                items.push(match c.polarity {
                    Polarity::Positive => format!("v{}", c.line),
                    Polarity::Negative => format!("v{}'", c.line),
                    Polarity::Var(p) => format!("v{}^{}", c.line, self.polarity_names[p as usize]),
                    Polarity::NotVar(p) => {
                        format!("v{}^!{}", c.line, self.polarity_names[p as usize])
                    }
                });
            }
            write!(f, "{};v{})", items.join(","), g.target)?;
        }
        Ok(())
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_side(f, &self.pattern)?;
        f.write_str(" => ")?;
        self.fmt_side(f, &self.replacement)
    }
}

fn parse_side(text: &str, names: &mut Vec<String>) -> Result<Vec<SymGate>> {
    let text = text.trim();
    if text.is_empty() || text == "()" {
        return Ok(Vec::new());
    }
    let err = |msg: String| Error::InvalidTemplate(msg);
    let mut gates = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let body = rest
            .strip_prefix("TOF(")
            .ok_or_else(|| err(format!("expected 'TOF(' at '{rest}'")))?;
        let close = body
            .find(')')
            .ok_or_else(|| err(format!("unterminated gate at '{rest}'")))?;
        let (controls, target) = body[..close]
            .split_once(';')
            .ok_or_else(|| err(format!("missing ';' in '{}'", &body[..close])))?;
        let mut gate = SymGate {
            target: parse_var(target.trim())?,
            controls: Vec::new(),
            context: false,
        };
        for item in controls.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "*" {
                gate.context = true;
                continue;
            }
            let (var, polarity) = if let Some(v) = item.strip_suffix('\'') {
                (v, Polarity::Negative)
            } else if let Some((v, p)) = item.split_once('^') {
                let (negated, p) = match p.strip_prefix('!') {
                    Some(p) => (true, p),
                    None => (false, p),
                };
                if p.is_empty() || !p.chars().all(|c| c.is_ascii_alphanumeric()) {
                    return Err(err(format!("bad polarity variable in '{item}'")));
                }
                let idx = match names.iter().position(|n| n == p) {
                    Some(i) => i,
                    None if names.len() < MAX_POLARITY_VARS => {
                        names.push(p.to_string());
                        names.len() - 1
                    }
                    None => {
                        return Err(err(format!(
                            "more than {MAX_POLARITY_VARS} polarity variables"
                        )))
                    }
                } as u8;
                (
                    v,
                    if negated {
                        Polarity::NotVar(idx)
                    } else {
                        Polarity::Var(idx)
                    },
                )
            } else {
                (item, Polarity::Positive)
            };
            gate.controls.push(SymControl {
                line: parse_var(var)?,
                polarity,
            });
        }
        gates.push(gate);
        rest = body[close + 1..].trim_start();
    }
    Ok(gates)
}

fn parse_var(text: &str) -> Result<u8> {
    text.strip_prefix('v')
        .and_then(|d| d.parse::<u8>().ok())
        .filter(|&d| (d as usize) < MAX_LINE_VARS)
        .ok_or_else(|| {
            Error::InvalidTemplate(format!("expected a line variable v0..v9, found '{text}'"))
        })
}

/// Load templates from text: one per line as `[name:] pattern => replacement`,
/// `#` comments allowed. Unnamed templates are called `line-N`.
pub fn parse_templates(text: &str) -> Result<Vec<Template>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let body = l.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i + 1, body))
        })
        .map(|(line, body)| {
            let (name, body) = match body.split_once(':') {
                Some((name, rest)) => (name.trim().to_string(), rest.trim()),
                None => (format!("line-{line}"), body),
            };
            Template::parse(name, body).map_err(|e| match e {
                Error::InvalidTemplate(m) => Error::InvalidTemplate(format!("line {line}: {m}")),
                other => other,
            })
        })
        .collect()
}

const BUILTIN: &[(&str, &str)] = &[
    ("T0-duplicate", "TOF(*;v0) TOF(*;v0) => ()"),
    (
        "T1-polarity-merge",
        "TOF(*,v1;v0) TOF(*,v1';v0) => TOF(*;v0)",
    ),
    (
        "T2-not-propagation",
        "TOF(;v1) TOF(*,v1^p;v0) => TOF(*,v1^!p;v0) TOF(;v1)",
    ),
    (
        "T3-control-absorb",
        "TOF(*,v1^p;v0) TOF(*;v0) => TOF(*,v1^!p;v0)",
    ),
    (
        "T4-not-pair",
        "TOF(v1^p;v0) TOF(;v1) TOF(;v0) => TOF(;v1) TOF(v1^p;v0)",
    ),
];

/// The built-in template set, each verified on construction.
pub fn builtin_templates() -> Vec<Template> {
    BUILTIN
        .iter()
        .map(|(name, text)| Template::parse(*name, text).expect("built-in template is sound"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_register() {
        let ts = builtin_templates();
        assert_eq!(ts.len(), 5);
        assert!(ts[2].is_move());
        assert!(!ts[1].is_move());
        for t in &ts {
            let again = Template::parse(t.name(), &t.to_string()).unwrap();
            assert_eq!(&again, t);
        }
    }

    #[test]
    fn rejects_unsound() {
        // Dropping the control changes the function.
        let err = Template::parse("bad", "TOF(v1;v0) TOF(v1;v0) => TOF(;v0)").unwrap_err();
        assert!(matches!(err, Error::InvalidTemplate(_)), "{err}");
        // Sound without a context, unsound with one.
        assert!(
            Template::parse("ok", "TOF(v1;v0) TOF(;v1) TOF(;v0) => TOF(;v1) TOF(v1;v0)").is_ok()
        );
        assert!(Template::parse(
            "ctx",
            "TOF(*,v1;v0) TOF(;v1) TOF(;v0) => TOF(;v1) TOF(*,v1;v0)"
        )
        .is_err());
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            "TOF(v1;v0)",
            "TOF(v1;v0) => TOF(v1;v0) TOF(;v0) TOF(;v0)",
            "TOF(;v0) TOF(;v0) => TOF(;v1)",
            "TOF(v0;v0) TOF(v0;v0) => ()",
            "TOF(;v0) TOF(;v0) => TOF(*;v0)",
            "TOF(;v2) TOF(;v2) => ()",
            "TOF(;x) => ()",
            "TOF(;v0 => ()",
        ] {
            assert!(Template::parse("t", text).is_err(), "{text}");
        }
    }

    #[test]
    fn template_file() {
        let ts = parse_templates("# merge\nTOF(*,v1;v0) TOF(*,v1';v0) => TOF(*;v0)\n\n").unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].name(), "line-2");
        let ts = parse_templates("merge: TOF(*,v1;v0) TOF(*,v1';v0) => TOF(*;v0)").unwrap();
        assert_eq!(ts[0].name(), "merge");
        let err = parse_templates("TOF(;v0) => ()\nTOF(v1;v0) => TOF(;v0)\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn unify_binds_consistently() {
        let t = &builtin_templates()[1];
        let g1 = ToffoliGate::parse("TOF(b,c;a)", 3).unwrap();
        let g2 = ToffoliGate::parse("TOF(b',c;a)", 3).unwrap();
        let first = Binding::new().extensions(&t.pattern()[0], &g1);
        // v1 may be b (context {c}) or c (context {b}).
        assert_eq!(first.len(), 2);
        let both: Vec<Binding> = first
            .iter()
            .flat_map(|b| b.extensions(&t.pattern()[1], &g2))
            .collect();
        assert_eq!(both.len(), 1);
        assert_eq!(
            both[0].instantiate(&t.replacement()[0], 3).to_string(),
            "TOF(c;a)"
        );

        let g3 = ToffoliGate::parse("TOF(b,c';a)", 3).unwrap();
        let both: Vec<Binding> = first
            .iter()
            .flat_map(|b| b.extensions(&t.pattern()[1], &g3))
            .collect();
        assert_eq!(both.len(), 1);
        assert_eq!(
            both[0].instantiate(&t.replacement()[0], 3).to_string(),
            "TOF(b;a)"
        );
    }
}
