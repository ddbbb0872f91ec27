use super::{Fsm, StateEncoding};

/// Fully expanded combinational specification with a per-bit care mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    primary_inputs: usize,
    state_bits: usize,
    primary_outputs: usize,
    desired: Vec<bool>,
    care: Vec<bool>,
}

impl TruthTable {
    /// All-don't-care table. State bits form the low variables and the first
    /// output columns.
    pub fn new(primary_inputs: usize, state_bits: usize, primary_outputs: usize) -> Self {
        let rows = 1usize << (primary_inputs + state_bits);
        let outs = state_bits + primary_outputs;
        TruthTable {
            primary_inputs,
            state_bits,
            primary_outputs,
            desired: vec![false; rows * outs],
            care: vec![false; rows * outs],
        }
    }

    /// Plain combinational table with every bit cared about.
    pub fn from_fn(
        num_vars: usize,
        num_outs: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut tt = TruthTable::new(num_vars, 0, num_outs);
        for r in 0..tt.rows() {
            for c in 0..num_outs {
                tt.set(r, c, Some(f(r, c)));
            }
        }
        tt
    }

    pub fn num_vars(&self) -> usize {
        self.primary_inputs + self.state_bits
    }

    pub fn num_outs(&self) -> usize {
        self.state_bits + self.primary_outputs
    }

    pub fn primary_inputs(&self) -> usize {
        self.primary_inputs
    }

    pub fn state_bits(&self) -> usize {
        self.state_bits
    }

    pub fn primary_outputs(&self) -> usize {
        self.primary_outputs
    }

    pub fn rows(&self) -> usize {
        1 << self.num_vars()
    }

    pub fn desired(&self, row: usize, col: usize) -> bool {
        self.desired[row * self.num_outs() + col]
    }

    pub fn care(&self, row: usize, col: usize) -> bool {
        self.care[row * self.num_outs() + col]
    }

    /// `Some(bit)` constrains the entry, `None` makes it a don't-care.
    pub fn set(&mut self, row: usize, col: usize, value: Option<bool>) {
        let i = row * self.num_outs() + col;
        self.care[i] = value.is_some();
        self.desired[i] = value.unwrap_or(false);
    }

    pub fn get(&self, row: usize, col: usize) -> Option<bool> {
        self.care(row, col).then(|| self.desired(row, col))
    }

    pub fn care_count(&self) -> usize {
        self.care.iter().filter(|c| **c).count()
    }

    pub fn row_has_care(&self, row: usize) -> bool {
        (0..self.num_outs()).any(|c| self.care(row, c))
    }

    /// Name of program input `v`: `s<k>` for state bits, `in<k>` for primary
    /// inputs in declaration order.
    pub fn var_name(&self, v: usize) -> String {
        if v < self.state_bits {
            format!("s{v}")
        } else {
            format!("in{}", self.primary_inputs - 1 - (v - self.state_bits))
        }
    }

    /// Name of output column `c`: `ns<k>` then `out<k>`.
    pub fn output_name(&self, c: usize) -> String {
        if c < self.state_bits {
            format!("ns{c}")
        } else {
            format!("out{}", c - self.state_bits)
        }
    }
}

pub fn build_truth_table(fsm: &Fsm, enc: &StateEncoding) -> TruthTable {
    let n_s = enc.width();
    let mut tt = TruthTable::new(fsm.num_inputs, n_s, fsm.num_outputs);
    for state in 0..fsm.states.len() {
        let code = enc.code(state) as usize;
        for pi in 0..(1u32 << fsm.num_inputs) {
            let Some(step) = fsm.step(state, pi) else {
                continue;
            };
            let row = ((pi as usize) << n_s) | code;
            if let Some(next) = step.next {
                for b in 0..n_s {
                    tt.set(row, b, Some(enc.bit(next, b)));
                }
            }
            for (k, out) in step.outputs.iter().enumerate() {
                tt.set(row, n_s + k, *out);
            }
        }
    }
    tt
}
