//! `revsynth`: synthesize, reduce and check reversible circuits from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage/parse/input error (including a failed
//! `verify`), 2 internal verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use revsynth::io::{parse_circuit, parse_spec, write_circuit, write_spec, write_spec_table};
use revsynth::oracle::{distance_table, exhaustive_benchmark, MAX_ORACLE_WIDTH};
use revsynth::reduction::{parse_templates, reduce_with, ReductionReport};
use revsynth::{
    builtin_templates, synthesize, Algorithm, Circuit, Direction, Fallback, Order, Permutation,
    SynthOptions,
};

#[derive(Parser)]
#[command(
    name = "revsynth",
    version,
    about = "Reversible logic synthesis with Toffoli gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit for a specification file
    Synth {
        spec: PathBuf,
        #[command(flatten)]
        synth: SynthArgs,
        /// Run the reduction pipeline on the result
        #[arg(long)]
        reduce: bool,
        #[arg(long, value_enum, default_value_t = OrderArg::InputToOutput)]
        order: OrderArg,
        /// Write the circuit here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimize a circuit that realizes a specification
    Reduce {
        circuit: PathBuf,
        spec: PathBuf,
        /// Extra templates, one `pattern => replacement` per line
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the permutation a circuit computes
    Simulate {
        circuit: PathBuf,
        /// Print a binary truth table instead of a `perm:` line
        #[arg(long)]
        table: bool,
    },
    /// Print the inverse of a specification
    Invert {
        spec: PathBuf,
        #[arg(long)]
        table: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that a circuit realizes a specification
    Verify { circuit: PathBuf, spec: PathBuf },
    /// Minimum-gate circuit for a specification of at most three lines
    Oracle {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderArg::InputToOutput)]
        order: OrderArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesize every function on two or three lines and write CSV
    Bench {
        #[arg(long = "n", value_parser = clap::value_parser!(u8).range(2..=3))]
        width: u8,
        #[command(flatten)]
        synth: SynthArgs,
        /// Also reduce the circuit from --algorithm
        #[arg(long)]
        reduce: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(short, long, value_enum, default_value_t = AlgorithmArg::One)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Output)]
    direction: DirectionArg,
    /// Neighbour tie-break when every candidate is already in place
    #[arg(long, value_enum, default_value_t = FallbackArg::Lowest)]
    fallback: FallbackArg,
    /// Restarts for --algorithm random
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    restarts: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl SynthArgs {
    fn options(&self) -> SynthOptions {
        SynthOptions {
            algorithm: match self.algorithm {
                AlgorithmArg::One => Algorithm::FirstRow,
                AlgorithmArg::Two => Algorithm::LowestValue,
                AlgorithmArg::Random => Algorithm::Random,
            },
            direction: match self.direction {
                DirectionArg::Output => Direction::Output,
                DirectionArg::Input => Direction::Input,
            },
            fallback: match self.fallback {
                FallbackArg::Lowest => Fallback::Lowest,
                FallbackArg::Highest => Fallback::Highest,
                FallbackArg::Nearest => Fallback::Nearest,
            },
            restarts: self.restarts,
            seed: self.seed,
            ..SynthOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Output,
    Input,
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    Lowest,
    Highest,
    Nearest,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    InputToOutput,
    Discovery,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::InputToOutput => Order::InputToOutput,
            OrderArg::Discovery => Order::Discovery,
        }
    }
}

/// A circuit we produced did not realize its specification.
#[derive(Debug)]
struct InternalFailure(String);

impl std::fmt::Display for InternalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal verification failure: {}", self.0)
    }
}

impl std::error::Error for InternalFailure {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_spec(path: &Path) -> Result<Permutation> {
    parse_spec(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_emitted(c: &Circuit, spec: &Permutation) -> Result<()> {
    if c.realizes(spec) {
        Ok(())
    } else {
        Err(InternalFailure(format!("emitted circuit does not compute {spec}")).into())
    }
}

fn lib_error(e: revsynth::Error) -> anyhow::Error {
    match e {
        revsynth::Error::Verification(msg) => InternalFailure(msg).into(),
        other => other.into(),
    }
}

fn print_report(report: &ReductionReport) {
    eprintln!(
        "reduced: {} -> {} gates, {} -> {} controls in {} passes{}",
        report.gates_before,
        report.gates_after,
        report.controls_before,
        report.controls_after,
        report.passes,
        if report.pass_cap_hit {
            " (pass cap reached)"
        } else {
            ""
        }
    );
    for (rule, n) in &report.hits {
        eprintln!("  {rule}: {n}");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            spec,
            synth,
            reduce,
            order,
            output,
        } => {
            let p = load_spec(&spec)?;
            let result = synthesize(&p, &synth.options()).map_err(lib_error)?;
            eprintln!("gates: {}", result.gate_count());
            let mut circuit = result.circuit;
            if reduce {
                let (c, report) =
                    reduce_with(&circuit, &p, &builtin_templates()).map_err(lib_error)?;
                print_report(&report);
                circuit = c;
            }
            let circuit = circuit.to_order(order.into());
            check_emitted(&circuit, &p)?;
            eprintln!("complexity: {}", p.complexity());
            eprintln!("verified: ok");
            emit(output.as_deref(), &write_circuit(&circuit))
        }
        Command::Reduce {
            circuit,
            spec,
            templates,
            output,
        } => {
            let c = load_circuit(&circuit)?;
            let p = load_spec(&spec)?;
            if c.width() != p.width() || !c.realizes(&p) {
                bail!(
                    "{} does not realize {}; nothing was rewritten",
                    circuit.display(),
                    spec.display()
                );
            }
            let mut ts = builtin_templates();
            if let Some(path) = templates {
                ts.extend(
                    parse_templates(&read(&path)?)
                        .with_context(|| format!("{}", path.display()))?,
                );
            }
            let (out, report) = reduce_with(&c, &p, &ts).map_err(lib_error)?;
            check_emitted(&out, &p)?;
            print_report(&report);
            eprintln!("verified: ok");
            emit(output.as_deref(), &write_circuit(&out))
        }
        Command::Simulate { circuit, table } => {
            let p = load_circuit(&circuit)?.simulate();
            emit(
                None,
                &if table {
                    write_spec_table(&p)
                } else {
                    write_spec(&p)
                },
            )
        }
        Command::Invert {
            spec,
            table,
            output,
        } => {
            let inv = load_spec(&spec)?.inverse();
            let text = if table {
                write_spec_table(&inv)
            } else {
                write_spec(&inv)
            };
            emit(output.as_deref(), &text)
        }
        Command::Verify { circuit, spec } => {
            let c = load_circuit(&circuit)?;
            let p = load_spec(&spec)?;
            if c.width() != p.width() {
                bail!(
                    "fail: circuit has {} lines, specification has {}",
                    c.width(),
                    p.width()
                );
            }
            if c.realizes(&p) {
                println!("pass");
                Ok(())
            } else {
                let got = c.simulate();
                let row = (0..p.len() as u32)
                    .find(|&i| got.get(i) != p.get(i))
                    .expect("some row differs");
                bail!(
                    "fail: input {row} gives {} but the specification expects {}",
                    got.get(row),
                    p.get(row)
                )
            }
        }
        Command::Oracle {
            spec,
            order,
            output,
        } => {
            let p = load_spec(&spec)?;
            if p.width() > MAX_ORACLE_WIDTH {
                bail!(
                    "unsupported width {} (the oracle handles at most {MAX_ORACLE_WIDTH} lines)",
                    p.width()
                );
            }
            let c = distance_table(p.width())
                .and_then(|t| t.optimal_circuit(&p))
                .map_err(lib_error)?
                .to_order(order.into());
            check_emitted(&c, &p)?;
            eprintln!("optimal gates: {}", c.len());
            emit(output.as_deref(), &write_circuit(&c))
        }
        Command::Bench {
            width,
            synth,
            reduce,
            output,
        } => {
            let bench = exhaustive_benchmark(width as usize, &synth.options(), reduce)
                .map_err(lib_error)?;
            eprint!("{}", bench.summary());
            emit(output.as_deref(), &bench.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InternalFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flags_are_errors() {
        assert!(Cli::try_parse_from(["revsynth", "synth", "x.spec", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["revsynth", "bench", "--n", "4"]).is_err());
        assert!(Cli::try_parse_from(["revsynth", "synth", "x", "--restarts", "0"]).is_err());
    }
}
