//! Exhaustive ground truth for small widths.
//!
//! Every reversible function on up to three lines is reached by breadth-first
//! search from the identity over the full mixed-polarity gate library, giving
//! its exact minimal gate count. Permutations are indexed by lexicographic
//! rank (Lehmer code) into a dense table: 40320 slots for three lines.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::bits::check_width;
use crate::circuit::{Circuit, Order};
use crate::error::{Error, Result};
use crate::gate::ToffoliGate;
use crate::perm::Permutation;
use crate::reduction::reduce;
use crate::synthesis::{synthesize, Algorithm, SynthOptions};

/// Widest circuit the exhaustive tools accept.
pub const MAX_ORACLE_WIDTH: usize = 3;

const UNREACHED: u8 = u8::MAX;

fn check_oracle_width(width: usize) -> Result<()> {
    check_width(width)?;
    if width > MAX_ORACLE_WIDTH {
        return Err(Error::UnsupportedWidth(width));
    }
    Ok(())
}

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

/// Lexicographic rank of a permutation of `0..table.len()`.
pub fn rank(table: &[u32]) -> usize {
    let m = table.len();
    let mut r = 0;
    for i in 0..m {
        let smaller_later = table[i + 1..].iter().filter(|&&v| v < table[i]).count();
        r = r * (m - i) + smaller_later;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(m: usize, mut r: usize) -> Vec<u32> {
    let mut digits = vec![0usize; m];
    for i in (0..m).rev() {
        let base = m - i;
        digits[i] = r % base;
        r /= base;
    }
    let mut pool: Vec<u32> = (0..m as u32).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

/// Every mixed-polarity Toffoli gate on `width` lines: each target with each
/// other line absent, positive or negative. `width * 3^(width-1)` gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateLibrary {
    width: usize,
    gates: Vec<ToffoliGate>,
}

impl GateLibrary {
    pub fn new(width: usize) -> Result<Self> {
        check_width(width)?;
        let mut gates = Vec::new();
        for target in 0..width {
            let others: Vec<usize> = (0..width).filter(|&l| l != target).collect();
            for code in 0..3usize.pow(others.len() as u32) {
                let (mut pos, mut neg, mut c) = (0u32, 0u32, code);
                for &l in &others {
                    match c % 3 {
                        1 => pos |= 1 << l,
                        2 => neg |= 1 << l,
                        _ => {}
                    }
                    c /= 3;
                }
                gates.push(ToffoliGate::from_masks(width, target, pos, neg)?);
            }
        }
        Ok(GateLibrary { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[ToffoliGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Minimal gate count for every reversible function of a given width.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    width: usize,
    library: GateLibrary,
    dist: Vec<u8>,
}

impl DistanceTable {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn library(&self) -> &GateLibrary {
        &self.library
    }

    /// Number of functions covered, `(2^width)!`.
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Distance by permutation rank.
    pub fn by_rank(&self, r: usize) -> usize {
        self.dist[r] as usize
    }

    pub fn distance(&self, p: &Permutation) -> Result<usize> {
        self.check(p)?;
        Ok(self.by_rank(rank(p.table())))
    }

    /// Number of functions at each distance.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let max = self.dist.iter().copied().max().unwrap_or(0) as usize;
        let mut layers = vec![0; max + 1];
        for &d in &self.dist {
            layers[d as usize] += 1;
        }
        layers
    }

    pub fn mean_distance(&self) -> f64 {
        self.dist.iter().map(|&d| f64::from(d)).sum::<f64>() / self.dist.len() as f64
    }

    fn check(&self, p: &Permutation) -> Result<()> {
        if p.width() != self.width {
            return Err(Error::WidthMismatch {
                left: self.width,
                right: p.width(),
            });
        }
        Ok(())
    }

    /// A minimum-length circuit for `p`, listed input-to-output, found by
    /// descending through the table. Ties go to the first gate in library
    /// order.
    pub fn optimal_circuit(&self, p: &Permutation) -> Result<Circuit> {
        self.check(p)?;
        let mut cur = p.clone();
        let mut found = Vec::new();
        let mut d = self.distance(&cur)?;
        while d > 0 {
            let (g, next) = self
                .library
                .gates()
                .iter()
                .map(|g| (g, cur.apply_gate_output_side(g)))
                .find(|(_, next)| self.by_rank(rank(next.table())) == d - 1)
                .expect("a closer neighbour exists at every positive distance");
            found.push(*g);
            cur = next;
            d -= 1;
        }
        found.reverse();
        let c = Circuit::from_parts(self.width, Order::InputToOutput, found);
        if !c.realizes(p) {
            return Err(Error::Verification(format!(
                "reconstructed optimal circuit does not realize {p}"
            )));
        }
        Ok(c)
    }
}

/// Breadth-first search from the identity over the full gate library.
pub fn build_distances(width: usize) -> Result<DistanceTable> {
    check_oracle_width(width)?;
    let library = GateLibrary::new(width)?;
    let m = 1usize << width;
    let mut dist = vec![UNREACHED; factorial(m)];
    let id: Vec<u32> = (0..m as u32).collect();
    dist[rank(&id)] = 0;
    let mut frontier = vec![rank(&id)];
    let mut depth = 0u8;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &r in &frontier {
            let table = unrank(m, r);
            for g in library.gates() {
                let moved: Vec<u32> = table.iter().map(|&v| g.apply_value(v)).collect();
                let s = rank(&moved);
                if dist[s] == UNREACHED {
                    dist[s] = depth + 1;
                    next.push(s);
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    debug_assert!(dist.iter().all(|&d| d != UNREACHED));
    Ok(DistanceTable {
        width,
        library,
        dist,
    })
}

/// Shared, lazily built distance table.
pub fn distance_table(width: usize) -> Result<&'static DistanceTable> {
    static TABLES: [OnceLock<DistanceTable>; MAX_ORACLE_WIDTH] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    check_oracle_width(width)?;
    Ok(TABLES[width - 1].get_or_init(|| build_distances(width).expect("width checked")))
}

/// Minimum-length circuit for `p` (at most three lines).
pub fn optimal_circuit(p: &Permutation) -> Result<Circuit> {
    distance_table(p.width())?.optimal_circuit(p)
}

/// One benchmark row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRow {
    pub perm_rank: usize,
    pub raw_gates_alg1: usize,
    pub raw_gates_alg2: usize,
    pub reduced_gates: Option<usize>,
    pub optimal_gates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub mean: f64,
    pub max: usize,
    /// `histogram[k]` counts rows with exactly `k` gates.
    pub histogram: Vec<usize>,
}

impl ColumnStats {
    fn of(values: impl Iterator<Item = usize>) -> Option<Self> {
        let mut histogram = Vec::new();
        let (mut sum, mut n) = (0usize, 0usize);
        for v in values {
            if histogram.len() <= v {
                histogram.resize(v + 1, 0);
            }
            histogram[v] += 1;
            sum += v;
            n += 1;
        }
        (n > 0).then(|| ColumnStats {
            mean: sum as f64 / n as f64,
            max: histogram.len() - 1,
            histogram,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub width: usize,
    pub rows: Vec<BenchRow>,
    pub alg1: ColumnStats,
    pub alg2: ColumnStats,
    pub reduced: Option<ColumnStats>,
    pub optimal: ColumnStats,
}

impl Benchmark {
    pub const CSV_HEADER: &'static str =
        "perm_rank,raw_gates_alg1,raw_gates_alg2,reduced_gates,optimal_gates";

    /// Rows in rank order. `reduced_gates` is empty when reduction was not
    /// requested.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 16);
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let reduced = r.reduced_gates.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                r.perm_rank, r.raw_gates_alg1, r.raw_gates_alg2, reduced, r.optimal_gates
            )
            .unwrap();
        }
        out
    }

    /// Human-readable aggregate.
    pub fn summary(&self) -> String {
        let mut out = format!("functions: {}\n", self.rows.len());
        let mut line = |name: &str, s: &ColumnStats| {
            writeln!(
                out,
                "{name:<8} mean {:.3}  max {:>2}  gap-to-optimal {:.3}  histogram {:?}",
                s.mean,
                s.max,
                s.mean - self.optimal.mean,
                s.histogram
            )
            .unwrap();
        };
        line("alg1", &self.alg1);
        line("alg2", &self.alg2);
        if let Some(r) = &self.reduced {
            line("reduced", r);
        }
        line("optimal", &self.optimal);
        out
    }
}

/// Synthesize every reversible function of `width` lines with both
/// deterministic selection rules (direction, fallback and cap taken from
/// `opts`), verify each circuit, and compare with the optimum.
///
/// With `with_reduction`, the circuit produced by `opts.algorithm` is also
/// run through the reduction pipeline. Rows are computed in parallel and
/// reported in rank order.
pub fn exhaustive_benchmark(
    width: usize,
    opts: &SynthOptions,
    with_reduction: bool,
) -> Result<Benchmark> {
    let table = distance_table(width)?;
    let m = 1usize << width;
    let opts1 = SynthOptions {
        algorithm: Algorithm::FirstRow,
        trace: false,
        ..opts.clone()
    };
    let opts2 = SynthOptions {
        algorithm: Algorithm::LowestValue,
        ..opts1.clone()
    };
    let rows = (0..table.len())
        .into_par_iter()
        .map(|r| -> Result<BenchRow> {
            let p = Permutation::from_table_unchecked(width, unrank(m, r));
            let fail = |e: Error| Error::Verification(format!("{p}: {e}"));
            let one = synthesize(&p, &opts1).map_err(fail)?;
            let two = synthesize(&p, &opts2).map_err(fail)?;
            let reduced_gates = if with_reduction {
                let raw = match opts.algorithm {
                    Algorithm::FirstRow => one.circuit.clone(),
                    Algorithm::LowestValue => two.circuit.clone(),
                    Algorithm::Random => synthesize(&p, opts).map_err(fail)?.circuit,
                };
                let (c, _) = reduce(&raw, &p).map_err(fail)?;
                Some(c.len())
            } else {
                None
            };
            Ok(BenchRow {
                perm_rank: r,
                raw_gates_alg1: one.gate_count(),
                raw_gates_alg2: two.gate_count(),
                reduced_gates,
                optimal_gates: table.by_rank(r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&BenchRow) -> usize| ColumnStats::of(rows.iter().map(f)).expect("non-empty");
    Ok(Benchmark {
        width,
        alg1: col(|r| r.raw_gates_alg1),
        alg2: col(|r| r.raw_gates_alg2),
        reduced: ColumnStats::of(rows.iter().filter_map(|r| r.reduced_gates)),
        optimal: col(|r| r.optimal_gates),
        rows,
    })
}
