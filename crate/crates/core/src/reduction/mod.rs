//! Post-synthesis circuit minimization.
//!
//! All passes preserve the function a circuit computes. They operate on the
//! gate list as given and keep the circuit's order tag; the rewrites are
//! symmetric under reversal, so either order works.

mod template;

use std::collections::BTreeMap;

use template::Binding;
pub use template::{builtin_templates, parse_templates, Polarity, SymControl, SymGate, Template};

use crate::circuit::{Circuit, Order};
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::perm::Permutation;

/// Default bound on template passes and on pipeline rounds.
pub const DEFAULT_PASS_CAP: usize = 32;

pub const RULE_USELESS_PAIR: &str = "useless-pair";
pub const RULE_CONTROL_DROP: &str = "control-drop";
pub const RULE_PAIRED_CONTROL_DROP: &str = "paired-control-drop";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    pub passes: usize,
    pub gates_before: usize,
    pub gates_after: usize,
    pub controls_before: usize,
    pub controls_after: usize,
    /// Applications per rule name.
    pub hits: BTreeMap<String, usize>,
    /// Set when a pass bound stopped rewriting before a fixpoint.
    pub pass_cap_hit: bool,
}

impl ReductionReport {
    fn start(c: &Circuit) -> Self {
        ReductionReport {
            gates_before: c.len(),
            gates_after: c.len(),
            controls_before: c.control_count(),
            controls_after: c.control_count(),
            ..Default::default()
        }
    }

    fn hit(&mut self, rule: &str, n: usize) {
        if n > 0 {
            *self.hits.entry(rule.to_string()).or_default() += n;
        }
    }

    fn absorb(&mut self, other: ReductionReport) {
        for (rule, n) in other.hits {
            self.hit(&rule, n);
        }
        self.pass_cap_hit |= other.pass_cap_hit;
    }

    fn finish(&mut self, c: &Circuit) {
        self.gates_after = c.len();
        self.controls_after = c.control_count();
    }
}

/// Adjacent gates may be swapped iff neither gate's target is a control line
/// of the other. Polarity is ignored.
pub fn can_interchange(g1: &ToffoliGate, g2: &ToffoliGate) -> bool {
    !g2.is_control(g1.target()) && !g1.is_control(g2.target())
}

/// Delete pairs of identical gates whose intervening gates all commute with
/// them, until none remain.
pub fn remove_useless(c: &Circuit) -> Circuit {
    remove_useless_counted(c).0
}

fn remove_useless_counted(c: &Circuit) -> (Circuit, usize) {
    let mut gates = c.gates().to_vec();
    let mut removed = 0;
    'scan: loop {
        for i in 0..gates.len() {
            for j in i + 1..gates.len() {
                if gates[j] == gates[i] {
                    gates.remove(j);
                    gates.remove(i);
                    removed += 1;
                    continue 'scan;
                }
                if !can_interchange(&gates[i], &gates[j]) {
                    break;
                }
            }
        }
        break;
    }
    (Circuit::from_parts(c.width(), c.order(), gates), removed)
}

/// A located template occurrence: matched positions (ascending) and the
/// rearranged window `[left movers] [matched] [right movers]`.
struct Occurrence {
    positions: Vec<usize>,
    binding: Binding,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Split the unmatched gates between the first and last matched position into
/// those that can slide left past the matched gates and those that can slide
/// right. `None` if some gate can go neither way.
fn gather(gates: &[ToffoliGate], positions: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let (first, last) = (positions[0], *positions.last().unwrap());
    let mut left = Vec::new();
    let mut right: Vec<usize> = Vec::new();
    for m in first + 1..last {
        if positions.contains(&m) {
            continue;
        }
        let g = &gates[m];
        let goes_left = positions
            .iter()
            .filter(|&&p| p < m)
            .all(|&p| can_interchange(g, &gates[p]))
            && right.iter().all(|&r| can_interchange(g, &gates[r]));
        if goes_left {
            left.push(m);
            continue;
        }
        let goes_right = positions
            .iter()
            .filter(|&&p| p > m)
            .all(|&p| can_interchange(g, &gates[p]));
        if goes_right {
            right.push(m);
        } else {
            return None;
        }
    }
    Some((left, right))
}

fn find_occurrence(gates: &[ToffoliGate], pattern: &[&SymGate]) -> Option<Occurrence> {
    let k = pattern.len();
    let anchor = (0..k)
        .rev()
        .max_by_key(|&i| pattern[i].weight())
        .unwrap_or(0);
    // Assignment order: anchor, then leftwards, then rightwards.
    let order: Vec<usize> = std::iter::once(anchor)
        .chain((0..anchor).rev())
        .chain(anchor + 1..k)
        .collect();

    struct Search<'a> {
        gates: &'a [ToffoliGate],
        pattern: &'a [&'a SymGate],
        order: Vec<usize>,
        positions: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, step: usize, binding: &Binding) -> Option<Occurrence> {
            if step == self.order.len() {
                let (left, right) = gather(self.gates, &self.positions)?;
                return Some(Occurrence {
                    positions: self.positions.clone(),
                    binding: *binding,
                    left,
                    right,
                });
            }
            let j = self.order[step];
            let candidates: Box<dyn Iterator<Item = usize>> = if step == 0 {
                Box::new(0..self.gates.len())
            } else if j < self.order[0] {
                Box::new((0..self.positions[j + 1]).rev())
            } else {
                Box::new(self.positions[j - 1] + 1..self.gates.len())
            };
            for pos in candidates {
                for b in binding.extensions(self.pattern[j], &self.gates[pos]) {
                    self.positions[j] = pos;
                    if let Some(occ) = self.run(step + 1, &b) {
                        return Some(occ);
                    }
                }
            }
            None
        }
    }

    let mut search = Search {
        gates,
        pattern,
        order,
        positions: vec![0; k],
    };
    search.run(0, &Binding::new())
}

/// Find and apply one occurrence of `t`. Shrinking templates are tried in
/// both directions; move templates only forwards.
fn apply_once(gates: &mut Vec<ToffoliGate>, width: usize, t: &Template) -> bool {
    let forward: Vec<&SymGate> = t.pattern().iter().collect();
    let mut attempts = vec![(forward, false)];
    if !t.is_move() {
        attempts.push((t.pattern().iter().rev().collect(), true));
    }
    for (pattern, reversed) in attempts {
        let Some(occ) = find_occurrence(gates, &pattern) else {
            continue;
        };
        let mut replacement: Vec<ToffoliGate> = t
            .replacement()
            .iter()
            .map(|s| occ.binding.instantiate(s, width))
            .collect();
        if reversed {
            replacement.reverse();
        }
        let (first, last) = (occ.positions[0], *occ.positions.last().unwrap());
        let mut window: Vec<ToffoliGate> = occ.left.iter().map(|&i| gates[i]).collect();
        window.extend(replacement);
        window.extend(occ.right.iter().map(|&i| gates[i]));
        gates.splice(first..=last, window);
        return true;
    }
    false
}

/// Rewrite with `templates` until no template applies or `pass_cap` passes
/// have run.
pub fn apply_templates(c: &Circuit, templates: &[Template]) -> (Circuit, ReductionReport) {
    apply_templates_capped(c, templates, DEFAULT_PASS_CAP)
}

pub fn apply_templates_capped(
    c: &Circuit,
    templates: &[Template],
    pass_cap: usize,
) -> (Circuit, ReductionReport) {
    let mut report = ReductionReport::start(c);
    let mut gates = c.gates().to_vec();
    let mut settled = false;
    while report.passes < pass_cap {
        report.passes += 1;
        let mut changed = false;
        for t in templates {
            // Move rules get a bounded number of applications per pass.
            let budget = if t.is_move() {
                gates.len().max(1)
            } else {
                usize::MAX
            };
            let mut n = 0;
            while n < budget && apply_once(&mut gates, c.width(), t) {
                n += 1;
            }
            report.hit(t.name(), n);
            changed |= n > 0;
        }
        if !changed {
            settled = true;
            break;
        }
    }
    report.pass_cap_hit = !settled;
    let out = Circuit::from_parts(c.width(), c.order(), gates);
    report.finish(&out);
    (out, report)
}

fn check_realizes(c: &Circuit, spec: &Permutation) -> Result<()> {
    if c.realizes(spec) {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "circuit computes {} but the specification is {spec}",
            c.simulate()
        )))
    }
}

/// Greedily remove control lines while the circuit still computes `spec`:
/// first single controls gate by gate, then the same control from both gates
/// of every identical pair.
pub fn reduce_controls(c: &Circuit, spec: &Permutation) -> Result<Circuit> {
    let mut report = ReductionReport::start(c);
    reduce_controls_counted(c, spec, &mut report)
}

fn reduce_controls_counted(
    c: &Circuit,
    spec: &Permutation,
    report: &mut ReductionReport,
) -> Result<Circuit> {
    check_realizes(c, spec)?;
    let mut cur = c.clone();
    loop {
        let mut changed = false;
        let mut gates = cur.gates().to_vec();
        let order = c.order();
        let ok = |gates: &[ToffoliGate]| realizes(gates, order, spec);

        for i in 0..gates.len() {
            for line in lines(gates[i].control_mask()) {
                let saved = gates[i];
                gates[i] = saved.without_control(line);
                if ok(&gates) {
                    report.hit(RULE_CONTROL_DROP, 1);
                    changed = true;
                } else {
                    gates[i] = saved;
                }
            }
        }

        for i in 0..gates.len() {
            for j in i + 1..gates.len() {
                if gates[i] != gates[j] {
                    continue;
                }
                for line in lines(gates[i].control_mask()) {
                    let saved = gates[i];
                    let dropped = saved.without_control(line);
                    gates[i] = dropped;
                    gates[j] = dropped;
                    if ok(&gates) {
                        report.hit(RULE_PAIRED_CONTROL_DROP, 1);
                        changed = true;
                    } else {
                        gates[i] = saved;
                        gates[j] = saved;
                    }
                }
            }
        }

        cur = Circuit::from_parts(c.width(), c.order(), gates);
        if !changed {
            return Ok(cur);
        }
    }
}

fn realizes(gates: &[ToffoliGate], order: Order, spec: &Permutation) -> bool {
    spec.table().iter().enumerate().all(|(i, &out)| {
        let v = i as u32;
        let got = match order {
            Order::InputToOutput => gates.iter().fold(v, |v, g| g.apply_value(v)),
            Order::Discovery => gates.iter().rev().fold(v, |v, g| g.apply_value(v)),
        };
        got == out
    })
}

fn lines(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |l| mask & (1 << l) != 0)
}

/// Full pipeline: useless-pair removal, the built-in templates and control
/// reduction, repeated until nothing changes.
pub fn reduce(c: &Circuit, spec: &Permutation) -> Result<(Circuit, ReductionReport)> {
    reduce_with(c, spec, &builtin_templates())
}

pub fn reduce_with(
    c: &Circuit,
    spec: &Permutation,
    templates: &[Template],
) -> Result<(Circuit, ReductionReport)> {
    check_realizes(c, spec)?;
    let mut report = ReductionReport::start(c);
    let mut cur = c.clone();
    let mut settled = false;
    while report.passes < DEFAULT_PASS_CAP {
        report.passes += 1;
        let before = cur.clone();

        let (next, removed) = remove_useless_counted(&cur);
        report.hit(RULE_USELESS_PAIR, removed);
        let (next, t_report) = apply_templates(&next, templates);
        report.absorb(t_report);
        cur = reduce_controls_counted(&next, spec, &mut report)?;

        if cur == before {
            settled = true;
            break;
        }
    }
    report.pass_cap_hit |= !settled;
    if !cur.realizes(spec) {
        return Err(Error::Verification(
            "reduction changed the computed function".into(),
        ));
    }
    // Never hand back something longer than we were given.
    if cur.len() > c.len() {
        cur = c.clone();
    }
    report.finish(&cur);
    Ok((cur, report))
}
