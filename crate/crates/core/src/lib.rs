//! Reversible logic synthesis into networks of mixed-polarity generalized
//! Toffoli gates.
//!
//! A reversible specification is a permutation of `0..2^n`. The synthesis
//! routines sort it into the identity one fully controlled swap gate at a
//! time; the resulting gate list is then shortened by commutation-aware
//! useless-pair removal, verified template rewriting and simulation-checked
//! control removal. For up to three lines an exhaustive breadth-first oracle
//! gives exact minimal gate counts to compare against.
//!
//! ```
//! use revsynth::{synthesize, Algorithm, Permutation, SynthOptions};
//!
//! let spec = Permutation::from_table(3, vec![1, 0, 3, 2, 5, 7, 4, 6]).unwrap();
//! let result = synthesize(&spec, &SynthOptions::new(Algorithm::FirstRow)).unwrap();
//! assert_eq!(result.gate_count(), 5);
//! assert_eq!(result.circuit.simulate(), spec);
//! ```

pub mod bits;
pub mod circuit;
pub mod error;
pub mod gate;
pub mod io;
pub mod oracle;
pub mod perm;
pub mod reduction;
pub mod rng;
pub mod synthesis;

pub use bits::{hamming, BitString, MAX_WIDTH};
pub use circuit::{simulate, Circuit, Order};
pub use error::{Error, Result};
pub use gate::{apply_gate, format_gate, parse_gate, swap_gate, ToffoliGate};
pub use perm::{apply_gate_output_side, complexity, invert, Permutation};
pub use reduction::{
    apply_templates, builtin_templates, can_interchange, reduce, reduce_controls, remove_useless,
    ReductionReport, Template,
};
pub use synthesis::{
    synthesize, synthesize_random, Algorithm, Direction, Fallback, SynthOptions, SynthResult,
};
