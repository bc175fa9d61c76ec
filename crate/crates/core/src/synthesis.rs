//! Output-side synthesis by swapping bit strings.
//!
//! The specification is sorted into the identity by composing fully
//! controlled swap gates onto its output column. Each round picks a value
//! `a` that is not at its own row, looks at the value `b` currently sitting
//! in row `a`, and either swaps `a` and `b` directly (they differ in one
//! line) or swaps `b` with a neighbour one step closer to `a`. The gates are
//! recorded in the order they are found; because every gate is
//! self-inverse, that list read backwards realizes the specification.

use rayon::prelude::*;

use crate::bits::{hamming_raw, BitString};
use crate::circuit::{Circuit, Order};
use crate::error::{Error, Result};
use crate::gate::{swap_gate_raw, ToffoliGate};
use crate::perm::Permutation;
use crate::rng::XorShift64Star;

/// How the next value to place is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Algorithm {
    /// Scan rows from the top; place the value found in the first wrong row.
    #[default]
    FirstRow,
    /// Place the smallest value that is not yet in its own row.
    LowestValue,
    /// Place a uniformly random misplaced value; keep the best of several
    /// seeded restarts.
    Random,
}

/// Which side of the specification gates are collected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    /// Sort the specification itself.
    #[default]
    Output,
    /// Sort the inverse specification; the found gates then read forwards.
    Input,
}

/// Tie-break used when every closest neighbour is already in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Fallback {
    #[default]
    Lowest,
    Highest,
    /// Closest integer to the value being placed; ties go to the lower one.
    Nearest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOptions {
    pub algorithm: Algorithm,
    pub direction: Direction,
    pub fallback: Fallback,
    /// Independent runs for [`Algorithm::Random`]. Must be at least 1.
    pub restarts: u32,
    pub seed: u64,
    /// Abort once this many gates have been emitted. `None` means
    /// `4 * n * 2^n`.
    pub gate_cap: Option<usize>,
    /// Record the permutation after every emitted gate.
    pub trace: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            algorithm: Algorithm::FirstRow,
            direction: Direction::Output,
            fallback: Fallback::Lowest,
            restarts: 1,
            seed: 0,
            gate_cap: None,
            trace: false,
        }
    }
}

impl SynthOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        SynthOptions {
            algorithm,
            ..Default::default()
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn with_restarts(mut self, restarts: u32, seed: u64) -> Self {
        self.restarts = restarts;
        self.seed = seed;
        self
    }

    fn cap_for(&self, width: usize) -> usize {
        self.gate_cap.unwrap_or(4 * width * (1usize << width))
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Contract("restarts must be at least 1".into()));
        }
        if self.gate_cap == Some(0) {
            return Err(Error::Contract("gate cap must be positive".into()));
        }
        Ok(())
    }
}

/// A gate together with the specification it left behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub gate: ToffoliGate,
    pub after: Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthResult {
    /// Gates in the order they were found.
    pub discovery_gates: Vec<ToffoliGate>,
    /// The realizing circuit, listed input-to-output.
    pub circuit: Circuit,
    pub trace: Option<Vec<TraceStep>>,
}

impl SynthResult {
    pub fn gate_count(&self) -> usize {
        self.discovery_gates.len()
    }

    /// The discovery list as a circuit tagged with discovery order. Only
    /// meaningful for output-direction runs, where it realizes the function
    /// read last-to-first.
    pub fn discovery_circuit(&self) -> Circuit {
        Circuit::from_parts(
            self.circuit.width(),
            Order::Discovery,
            self.discovery_gates.clone(),
        )
    }
}

/// The value sitting in the first row that does not hold its own index.
pub fn select_first_row(p: &Permutation) -> Option<BitString> {
    first_misplaced(p).map(|i| BitString::new_unchecked(p.width(), p.get(i)))
}

/// The smallest value not sitting in its own row.
pub fn select_lowest_value(p: &Permutation) -> Option<BitString> {
    // Value v is in place exactly when row v holds v, so this is the first
    // misplaced row index.
    first_misplaced(p).map(|i| BitString::new_unchecked(p.width(), i))
}

fn first_misplaced(p: &Permutation) -> Option<u32> {
    p.table()
        .iter()
        .enumerate()
        .find(|&(i, &v)| i as u32 != v)
        .map(|(i, _)| i as u32)
}

/// Pick the neighbour `c` of `b` to swap with when `a` and `b` are two or
/// more lines apart.
///
/// Candidates flip one line where `b` disagrees with `a`, so each is one step
/// closer to `a`. Among them the lowest value not in its own row wins; when
/// every candidate is in place, `fallback` decides.
pub fn choose_neighbor(
    a: BitString,
    b: BitString,
    p: &Permutation,
    fallback: Fallback,
) -> Result<BitString> {
    let width = p.width();
    if a.width() != width || b.width() != width {
        return Err(Error::WidthMismatch {
            left: width,
            right: if a.width() != width {
                a.width()
            } else {
                b.width()
            },
        });
    }
    if hamming_raw(a.value(), b.value()) < 2 {
        return Err(Error::Contract(format!(
            "neighbour search needs {a} and {b} at distance 2 or more"
        )));
    }
    Ok(BitString::new_unchecked(
        width,
        choose_neighbor_raw(a.value(), b.value(), p, fallback),
    ))
}

fn choose_neighbor_raw(a: u32, b: u32, p: &Permutation, fallback: Fallback) -> u32 {
    let diff = a ^ b;
    // Flipping a differing line of b; ascending line order does not give
    // ascending values, so pick by value explicitly.
    let candidates = (0..p.width())
        .filter(|&l| diff & (1 << l) != 0)
        .map(|l| b ^ (1 << l));
    if let Some(c) = candidates.clone().filter(|&c| p.get(c) != c).min() {
        return c;
    }
    match fallback {
        Fallback::Lowest => candidates.min(),
        Fallback::Highest => candidates.max(),
        Fallback::Nearest => candidates.min_by_key(|&c| ((i64::from(c) - i64::from(a)).abs(), c)),
    }
    .expect("distance >= 2 gives at least two candidates")
}

/// Bring value `a` into row `a`, returning the gates used and the resulting
/// specification.
pub fn place_element(
    p: &Permutation,
    a: BitString,
    fallback: Fallback,
) -> Result<(Vec<ToffoliGate>, Permutation)> {
    if a.width() != p.width() {
        return Err(Error::WidthMismatch {
            left: p.width(),
            right: a.width(),
        });
    }
    if p.get(a.value()) == a.value() {
        return Err(Error::Contract(format!("{a} is already in place")));
    }
    let mut run = Run::new(p.clone(), usize::MAX, false);
    run.place(a.value(), fallback)?;
    Ok((run.gates, run.perm))
}

struct Run {
    perm: Permutation,
    gates: Vec<ToffoliGate>,
    trace: Option<Vec<TraceStep>>,
    cap: usize,
}

impl Run {
    fn new(perm: Permutation, cap: usize, trace: bool) -> Self {
        Run {
            perm,
            gates: Vec::new(),
            trace: trace.then(Vec::new),
            cap,
        }
    }

    fn emit(&mut self, x: u32, y: u32) -> Result<()> {
        if self.gates.len() >= self.cap {
            return Err(Error::GateCapExceeded { cap: self.cap });
        }
        let g = swap_gate_raw(self.perm.width(), x, y);
        self.perm.apply_gate_in_place(&g);
        self.gates.push(g);
        if let Some(trace) = &mut self.trace {
            trace.push(TraceStep {
                gate: g,
                after: self.perm.clone(),
            });
        }
        Ok(())
    }

    fn place(&mut self, a: u32, fallback: Fallback) -> Result<()> {
        loop {
            let b = self.perm.get(a);
            if b == a {
                return Ok(());
            }
            if hamming_raw(a, b) == 1 {
                debug_assert!(self.perm.get(b) != b, "direct swap would displace {b}");
                self.emit(a, b)?;
            } else {
                let c = choose_neighbor_raw(a, b, &self.perm, fallback);
                self.emit(b, c)?;
            }
        }
    }
}

/// Synthesize a circuit for `p`.
///
/// [`Algorithm::Random`] is forwarded to [`synthesize_random`]. The returned
/// circuit is checked against `p` by simulation.
pub fn synthesize(p: &Permutation, opts: &SynthOptions) -> Result<SynthResult> {
    opts.validate()?;
    match opts.algorithm {
        Algorithm::Random => synthesize_random(p, opts),
        Algorithm::FirstRow | Algorithm::LowestValue => {
            let work = working_spec(p, opts.direction);
            let mut run = Run::new(work, opts.cap_for(p.width()), opts.trace);
            loop {
                let next = match opts.algorithm {
                    Algorithm::FirstRow => select_first_row(&run.perm),
                    _ => select_lowest_value(&run.perm),
                };
                match next {
                    Some(a) => run.place(a.value(), opts.fallback)?,
                    None => break,
                }
            }
            finish(p, opts.direction, run)
        }
    }
}

/// Randomized selection: `opts.restarts` independent runs, the run with
/// index `r` seeded with `opts.seed + r` (wrapping). The shortest result
/// wins; ties go to the lowest restart index.
///
/// Restarts that hit the gate cap are discarded; the call fails only if all
/// of them do.
pub fn synthesize_random(p: &Permutation, opts: &SynthOptions) -> Result<SynthResult> {
    opts.validate()?;
    let runs: Vec<Result<SynthResult>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| random_run(p, opts, opts.seed.wrapping_add(u64::from(r))))
        .collect();
    let mut best: Option<SynthResult> = None;
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(res) => {
                if best
                    .as_ref()
                    .is_none_or(|b| res.gate_count() < b.gate_count())
                {
                    best = Some(res);
                }
            }
            Err(e @ Error::Verification(_)) => return Err(e),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one restart"))
}

fn random_run(p: &Permutation, opts: &SynthOptions, seed: u64) -> Result<SynthResult> {
    let mut rng = XorShift64Star::new(seed);
    let work = working_spec(p, opts.direction);
    let mut run = Run::new(work, opts.cap_for(p.width()), opts.trace);
    let mut misplaced = Vec::new();
    loop {
        misplaced.clear();
        misplaced.extend(
            run.perm
                .table()
                .iter()
                .enumerate()
                .filter(|&(i, &v)| i as u32 != v)
                .map(|(i, _)| i as u32),
        );
        if misplaced.is_empty() {
            break;
        }
        let a = misplaced[rng.below(misplaced.len())];
        run.place(a, opts.fallback)?;
    }
    finish(p, opts.direction, run)
}

fn working_spec(p: &Permutation, direction: Direction) -> Permutation {
    match direction {
        Direction::Output => p.clone(),
        Direction::Input => p.inverse(),
    }
}

fn finish(spec: &Permutation, direction: Direction, run: Run) -> Result<SynthResult> {
    let Run { gates, trace, .. } = run;
    let forward: Vec<ToffoliGate> = match direction {
        Direction::Output => gates.iter().rev().copied().collect(),
        Direction::Input => gates.clone(),
    };
    let circuit = Circuit::from_parts(spec.width(), Order::InputToOutput, forward);
    if !circuit.realizes(spec) {
        return Err(Error::Verification(format!(
            "synthesized circuit does not realize {spec}"
        )));
    }
    Ok(SynthResult {
        discovery_gates: gates,
        circuit,
        trace,
    })
}
