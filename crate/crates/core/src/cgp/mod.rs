//! Single-row Cartesian Genetic Programming over the NAND/NOR table.
//!
//! A genotype of `m` nodes with arity 2 is the flat gene list
//! `f0 c0a c0b  f1 c1a c1b  ...  o0 o1 ...`, `3m + n_o` genes in total.
//! Addresses `0..n_i` are program inputs and `n_i + j` is the output of the
//! node in column `j`. With one row and levels-back equal to the number of
//! columns, the general connection constraint
//!
//! ```text
//! n_i + (j - l) n_r <= C_j <= n_i + j n_r    (j >= l)
//! 0 <= C_j <= n_i + j n_r                    (j <  l)
//! ```
//!
//! only ever takes its second form; with the upper bound made exclusive (a
//! node cannot read itself) node `j` may read any address in `0..n_i + j`.
//! Function genes index the function table, `0..n_f`.

mod text;

use std::ops::Range;

use rand_core::RngCore;
use thiserror::Error;

use crate::rng::below;

pub use text::ParseGenotypeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Nand,
    Nor,
}

/// Function table; a function gene is an index into it.
pub const FUNCTIONS: [Function; 2] = [Function::Nand, Function::Nor];

impl Function {
    pub fn from_gene(gene: u32) -> Option<Function> {
        FUNCTIONS.get(gene as usize).copied()
    }

    pub fn gene(self) -> u32 {
        match self {
            Function::Nand => 0,
            Function::Nor => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Nand => "NAND",
            Function::Nor => "NOR",
        }
    }
}

pub fn node_eval(f: Function, x: bool, y: bool) -> bool {
    match f {
        Function::Nand => !(x && y),
        Function::Nor => !(x || y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MutationMode {
    /// Replacement drawn from the full legal range; may equal the old value.
    #[default]
    Redraw,
    /// Replacement drawn from the legal range minus the old value.
    Strict,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CgpError {
    #[error("mutation rate {0}% outside (0, 100]")]
    MutationRate(f64),
    #[error("a genotype needs at least one program input and one output")]
    Shape,
    #[error("expected {expected} {what}, got {found}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgpParams {
    pub num_inputs: usize,
    pub num_outputs: usize,
    /// Node budget `m`; also the levels-back value.
    pub columns: usize,
    /// Percent of the gene count mutated per offspring.
    pub mutation_rate: f64,
    pub mutation_mode: MutationMode,
}

impl CgpParams {
    pub const ROWS: usize = 1;
    pub const ARITY: usize = 2;

    pub fn new(
        num_inputs: usize,
        num_outputs: usize,
        columns: usize,
        mutation_rate: f64,
    ) -> Result<Self, CgpError> {
        if num_inputs == 0 || num_outputs == 0 {
            return Err(CgpError::Shape);
        }
        if !(mutation_rate > 0.0 && mutation_rate <= 100.0) {
            return Err(CgpError::MutationRate(mutation_rate));
        }
        Ok(CgpParams {
            num_inputs,
            num_outputs,
            columns,
            mutation_rate,
            mutation_mode: MutationMode::Redraw,
        })
    }

    pub fn with_mode(mut self, mode: MutationMode) -> Self {
        self.mutation_mode = mode;
        self
    }

    pub fn levels_back(&self) -> usize {
        self.columns
    }

    pub fn num_functions(&self) -> usize {
        FUNCTIONS.len()
    }

    pub fn gene_count(&self) -> usize {
        (Self::ARITY + 1) * self.columns + self.num_outputs
    }

    /// Point mutations per offspring: the rate applied to the gene count,
    /// rounded half away from zero, at least one.
    pub fn mutation_count(&self) -> usize {
        let k = (self.mutation_rate / 100.0 * self.gene_count() as f64).round() as usize;
        k.max(1)
    }

    /// Legal values of gene `index`, upper bound exclusive.
    pub fn gene_range(&self, index: usize) -> Range<u32> {
        let node_genes = 3 * self.columns;
        if index < node_genes {
            let col = index / 3;
            if index.is_multiple_of(3) {
                0..self.num_functions() as u32
            } else {
                0..(self.num_inputs + col) as u32
            }
        } else {
            0..(self.num_inputs + self.columns) as u32
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub function: u32,
    pub inputs: [u32; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    params: CgpParams,
    nodes: Vec<Node>,
    outputs: Vec<u32>,
}

/// First gene outside its legal range.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("gene {index} = {value} outside legal range {}..{}", range.start, range.end)]
pub struct GeneViolation {
    pub index: usize,
    pub value: u32,
    pub range: Range<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phenotype {
    /// Active node columns, ascending and therefore topologically ordered.
    pub active: Vec<usize>,
    pub output_sources: Vec<u32>,
}

impl Phenotype {
    pub fn gate_count(&self) -> usize {
        self.active.len()
    }
}

impl Genotype {
    /// Build from raw genes without range checks; see [`Genotype::validate`].
    pub fn from_parts(
        params: CgpParams,
        nodes: Vec<Node>,
        outputs: Vec<u32>,
    ) -> Result<Self, CgpError> {
        if nodes.len() != params.columns {
            return Err(CgpError::Length {
                what: "nodes",
                expected: params.columns,
                found: nodes.len(),
            });
        }
        if outputs.len() != params.num_outputs {
            return Err(CgpError::Length {
                what: "output genes",
                expected: params.num_outputs,
                found: outputs.len(),
            });
        }
        Ok(Genotype {
            params,
            nodes,
            outputs,
        })
    }

    /// Every gene drawn uniformly from its legal range, in gene order.
    pub fn random<R: RngCore + ?Sized>(params: CgpParams, rng: &mut R) -> Self {
        let mut genes = Vec::with_capacity(params.gene_count());
        for i in 0..params.gene_count() {
            let r = params.gene_range(i);
            genes.push(below(rng, r.end));
        }
        let nodes = genes[..3 * params.columns]
            .chunks_exact(3)
            .map(|c| Node {
                function: c[0],
                inputs: [c[1], c[2]],
            })
            .collect();
        let outputs = genes[3 * params.columns..].to_vec();
        Genotype {
            params,
            nodes,
            outputs,
        }
    }

    pub fn params(&self) -> &CgpParams {
        &self.params
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn gene_count(&self) -> usize {
        self.params.gene_count()
    }

    pub fn gene(&self, index: usize) -> u32 {
        let node_genes = 3 * self.nodes.len();
        if index < node_genes {
            let n = &self.nodes[index / 3];
            match index % 3 {
                0 => n.function,
                k => n.inputs[k - 1],
            }
        } else {
            self.outputs[index - node_genes]
        }
    }

    pub fn set_gene(&mut self, index: usize, value: u32) {
        let node_genes = 3 * self.nodes.len();
        if index < node_genes {
            let n = &mut self.nodes[index / 3];
            match index % 3 {
                0 => n.function = value,
                k => n.inputs[k - 1] = value,
            }
        } else {
            self.outputs[index - node_genes] = value;
        }
    }

    pub fn validate(&self) -> Result<(), GeneViolation> {
        for index in 0..self.gene_count() {
            let value = self.gene(index);
            let range = self.params.gene_range(index);
            if !range.contains(&value) {
                return Err(GeneViolation {
                    index,
                    value,
                    range,
                });
            }
        }
        Ok(())
    }

    /// Apply `mutation_count()` point mutations in place. Each consumes one
    /// draw for the gene position and one for the new value.
    pub fn mutate_in_place<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        let n = self.gene_count() as u32;
        for _ in 0..self.params.mutation_count() {
            let pos = below(rng, n) as usize;
            let range = self.params.gene_range(pos);
            let value = match self.params.mutation_mode {
                MutationMode::Redraw => below(rng, range.end),
                MutationMode::Strict => {
                    if range.end <= 1 {
                        continue;
                    }
                    let old = self.gene(pos);
                    let v = below(rng, range.end - 1);
                    if v >= old {
                        v + 1
                    } else {
                        v
                    }
                }
            };
            self.set_gene(pos, value);
        }
    }

    pub fn mutate<R: RngCore + ?Sized>(&self, rng: &mut R) -> Genotype {
        let mut child = self.clone();
        child.mutate_in_place(rng);
        child
    }

    /// Mark the nodes reachable from the outputs into `mask` (one flag per
    /// column). Connections only point backwards, so a single sweep from the
    /// last column suffices.
    pub fn active_mask_into(&self, mask: &mut Vec<bool>) {
        let n_i = self.params.num_inputs;
        mask.clear();
        mask.resize(self.nodes.len(), false);
        for &o in &self.outputs {
            if o as usize >= n_i {
                mask[o as usize - n_i] = true;
            }
        }
        for j in (0..self.nodes.len()).rev() {
            if mask[j] {
                for &c in &self.nodes[j].inputs {
                    if c as usize >= n_i {
                        mask[c as usize - n_i] = true;
                    }
                }
            }
        }
    }

    pub fn decode(&self) -> Phenotype {
        let mut mask = Vec::new();
        self.active_mask_into(&mut mask);
        Phenotype {
            active: (0..mask.len()).filter(|&j| mask[j]).collect(),
            output_sources: self.outputs.clone(),
        }
    }
}
