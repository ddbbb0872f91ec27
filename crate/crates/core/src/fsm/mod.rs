//! Symbolic finite state machines and their expansion into truth tables.
//!
//! The combinational function realised by the synthesized circuit maps
//! (primary inputs, current-state bits) to (next-state bits, primary outputs).
//! Row `r` of a [`TruthTable`] is the assignment `r = (pi << n_s) | code`,
//! where `pi` reads the input cube left to right as most significant bit
//! first and `code` is the current state's code. Program input `v` is bit `v`
//! of `r`: the first `n_s` variables are state bits `s0..`, least significant
//! first, followed by primary inputs from the last declared to the first.
//! Output columns are next-state bits `ns0..` then primary outputs `out0..`.

mod builtin;
mod encoding;
mod kiss2;
mod pla;
mod table;

use std::fmt;

use thiserror::Error;

pub use builtin::{builtin_names, bundled_kiss2, detector_kiss2, load_benchmark, load_builtin};
pub use encoding::{encode_states, parse_encoding_map, EncodingScheme, StateEncoding};
pub use kiss2::parse_kiss2;
pub use pla::{export_pla, parse_pla};
pub use table::{build_truth_table, TruthTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FsmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {kind} cube has length {found}, expected {expected}")]
    CubeLength {
        line: usize,
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("state {state}: transitions on lines {first} and {second} overlap with conflicting behavior")]
    Nondeterministic {
        state: String,
        first: usize,
        second: usize,
    },
    #[error("{directive} declares {declared} but the body has {found}")]
    CountMismatch {
        directive: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("no transitions")]
    Empty,
    #[error("reset state {0} never appears in a transition")]
    UnknownReset(String),
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("encoding: {0}")]
    Encoding(String),
    #[error("PLA line {line}: {msg}")]
    Pla { line: usize, msg: String },
}

/// A cube over `{0, 1, -}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube(Vec<Option<bool>>);

impl Cube {
    pub fn parse(text: &str) -> Option<Cube> {
        text.chars()
            .map(|c| match c {
                '0' => Some(Some(false)),
                '1' => Some(Some(true)),
                '-' | '2' | '~' => Some(None),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Cube)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn literals(&self) -> &[Option<bool>] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0[i]
    }

    /// Whether the cube contains the assignment `value`, read with position 0
    /// as the most significant of `len()` bits.
    pub fn contains(&self, value: u32) -> bool {
        let n = self.0.len();
        self.0.iter().enumerate().all(|(k, lit)| match lit {
            None => true,
            Some(b) => ((value >> (n - 1 - k)) & 1 == 1) == *b,
        })
    }

    pub fn intersects(&self, other: &Cube) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| !matches!((a, b), (Some(x), Some(y)) if x != y))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lit in &self.0 {
            let c = match lit {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub input: Cube,
    pub current: usize,
    pub next: usize,
    pub output: Cube,
    /// Source line in the KISS2 text, 1-based.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsm {
    pub name: String,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub states: Vec<String>,
    pub reset_state: Option<usize>,
    pub transitions: Vec<Transition>,
}

/// What the machine specifies for one (state, input) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub next: Option<usize>,
    pub outputs: Vec<Option<bool>>,
}

impl Fsm {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Merged behavior of every transition leaving `state` whose input cube
    /// contains `input`. `None` when no transition matches.
    pub fn step(&self, state: usize, input: u32) -> Option<Step> {
        let mut step: Option<Step> = None;
        for t in self
            .transitions
            .iter()
            .filter(|t| t.current == state && t.input.contains(input))
        {
            let s = step.get_or_insert_with(|| Step {
                next: Some(t.next),
                outputs: vec![None; self.num_outputs],
            });
            for (slot, lit) in s.outputs.iter_mut().zip(t.output.literals()) {
                if lit.is_some() {
                    *slot = *lit;
                }
            }
        }
        step
    }
}
