//! Fitness of a genotype against a truth table.
//!
//! [`evaluate`] packs 64 rows per machine word and runs every active node once
//! per word. [`evaluate_scalar`] interprets the phenotype one row at a time
//! and serves as the reference for the packed path; the two share no
//! evaluation code.
//!
//! Fitness is the number of cared-about output bits that differ from the
//! specification. The reported root-mean-square error is
//! `sqrt(mismatches / total_care)`; for a fixed table it orders genotypes
//! exactly as the mismatch count does, so selection works on the integer.

use thiserror::Error;

use crate::cgp::{node_eval, Function, Genotype};
use crate::fsm::TruthTable;

/// Largest table the packer accepts.
pub const MAX_VARS: usize = 24;
pub const WORD_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("table has {0} variables, at most {MAX_VARS} supported")]
    TooManyVars(usize),
    #[error("genotype shape {gen_in}x{gen_out} does not match table {tt_in}x{tt_out}")]
    Shape {
        gen_in: usize,
        gen_out: usize,
        tt_in: usize,
        tt_out: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub mismatches: u64,
    pub total_care: u64,
}

impl Fitness {
    pub fn new(mismatches: u64, total_care: u64) -> Self {
        Fitness {
            mismatches,
            total_care,
        }
    }

    pub fn rmse(&self) -> f64 {
        if self.total_care == 0 {
            0.0
        } else {
            (self.mismatches as f64 / self.total_care as f64).sqrt()
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.mismatches == 0
    }
}

/// Column-major bit-packed truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedTable {
    num_vars: usize,
    num_outs: usize,
    words: usize,
    inputs: Vec<u64>,
    desired: Vec<u64>,
    care: Vec<u64>,
    total_care: u64,
}

impl PackedTable {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_outs(&self) -> usize {
        self.num_outs
    }

    pub fn words_per_col(&self) -> usize {
        self.words
    }

    pub fn total_care(&self) -> u64 {
        self.total_care
    }

    pub fn input_col(&self, v: usize) -> &[u64] {
        &self.inputs[v * self.words..(v + 1) * self.words]
    }

    pub fn desired_col(&self, c: usize) -> &[u64] {
        &self.desired[c * self.words..(c + 1) * self.words]
    }

    pub fn care_col(&self, c: usize) -> &[u64] {
        &self.care[c * self.words..(c + 1) * self.words]
    }

    fn check(&self, g: &Genotype) -> Result<(), EvalError> {
        let p = g.params();
        if p.num_inputs != self.num_vars || p.num_outputs != self.num_outs {
            return Err(EvalError::Shape {
                gen_in: p.num_inputs,
                gen_out: p.num_outputs,
                tt_in: self.num_vars,
                tt_out: self.num_outs,
            });
        }
        Ok(())
    }

    /// Mismatch count of `g`, reusing `scratch`. Shapes must already agree.
    pub fn mismatches(&self, g: &Genotype, scratch: &mut Scratch) -> u64 {
        let n_i = self.num_vars;
        let w = self.words;
        let nodes = g.nodes();
        g.active_mask_into(&mut scratch.mask);
        scratch.values.resize(nodes.len() * w, 0);

        for (j, node) in nodes.iter().enumerate() {
            if !scratch.mask[j] {
                continue;
            }
            let (done, rest) = scratch.values.split_at_mut(j * w);
            let out = &mut rest[..w];
            let src = |a: u32| -> &[u64] {
                let a = a as usize;
                if a < n_i {
                    &self.inputs[a * w..(a + 1) * w]
                } else {
                    &done[(a - n_i) * w..(a - n_i + 1) * w]
                }
            };
            let (x, y) = (src(node.inputs[0]), src(node.inputs[1]));
            if node.function == Function::Nand.gene() {
                for k in 0..w {
                    out[k] = !(x[k] & y[k]);
                }
            } else {
                for k in 0..w {
                    out[k] = !(x[k] | y[k]);
                }
            }
        }

        let mut total = 0u64;
        for (c, &o) in g.outputs().iter().enumerate() {
            let o = o as usize;
            let got = if o < n_i {
                &self.inputs[o * w..(o + 1) * w]
            } else {
                &scratch.values[(o - n_i) * w..(o - n_i + 1) * w]
            };
            let want = self.desired_col(c);
            let care = self.care_col(c);
            for k in 0..w {
                total += ((got[k] ^ want[k]) & care[k]).count_ones() as u64;
            }
        }
        total
    }
}

/// Reusable buffers for [`PackedTable::mismatches`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    mask: Vec<bool>,
    values: Vec<u64>,
}

pub fn pack_table(tt: &TruthTable) -> Result<PackedTable, EvalError> {
    let num_vars = tt.num_vars();
    if num_vars > MAX_VARS {
        return Err(EvalError::TooManyVars(num_vars));
    }
    let rows = tt.rows();
    let words = rows.div_ceil(WORD_BITS);
    let num_outs = tt.num_outs();
    let mut inputs = vec![0u64; num_vars * words];
    let mut desired = vec![0u64; num_outs * words];
    let mut care = vec![0u64; num_outs * words];
    for r in 0..rows {
        let (word, bit) = (r / WORD_BITS, r % WORD_BITS);
        for v in 0..num_vars {
            if (r >> v) & 1 == 1 {
                inputs[v * words + word] |= 1 << bit;
            }
        }
        for c in 0..num_outs {
            if tt.care(r, c) {
                care[c * words + word] |= 1 << bit;
                if tt.desired(r, c) {
                    desired[c * words + word] |= 1 << bit;
                }
            }
        }
    }
    Ok(PackedTable {
        num_vars,
        num_outs,
        words,
        inputs,
        desired,
        care,
        total_care: tt.care_count() as u64,
    })
}

pub fn evaluate(g: &Genotype, pt: &PackedTable) -> Result<Fitness, EvalError> {
    pt.check(g)?;
    let mismatches = pt.mismatches(g, &mut Scratch::default());
    Ok(Fitness::new(mismatches, pt.total_care))
}

pub fn evaluate_scalar(g: &Genotype, tt: &TruthTable) -> Result<Fitness, EvalError> {
    let p = g.params();
    if p.num_inputs != tt.num_vars() || p.num_outputs != tt.num_outs() {
        return Err(EvalError::Shape {
            gen_in: p.num_inputs,
            gen_out: p.num_outputs,
            tt_in: tt.num_vars(),
            tt_out: tt.num_outs(),
        });
    }
    let ph = g.decode();
    let n_i = p.num_inputs;
    let mut values = vec![false; n_i + g.nodes().len()];
    let mut mismatches = 0u64;
    for row in 0..tt.rows() {
        for (v, slot) in values.iter_mut().enumerate().take(n_i) {
            *slot = (row >> v) & 1 == 1;
        }
        for &j in &ph.active {
            let node = g.nodes()[j];
            let f = Function::from_gene(node.function).expect("valid genotype");
            values[n_i + j] = node_eval(
                f,
                values[node.inputs[0] as usize],
                values[node.inputs[1] as usize],
            );
        }
        for (c, &src) in ph.output_sources.iter().enumerate() {
            if tt.care(row, c) && values[src as usize] != tt.desired(row, c) {
                mismatches += 1;
            }
        }
    }
    Ok(Fitness::new(mismatches, tt.care_count() as u64))
}
