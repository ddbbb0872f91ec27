//! Cycle-by-cycle co-simulation of a gate-level machine against its
//! symbolic description.
//!
//! Each cycle applies one input vector (an integer whose most significant of
//! `n_pi` bits is `in0`, the same reading as a KISS2 input cube), samples the
//! outputs, then clocks every latch. Outputs are compared wherever the
//! symbolic machine specifies them, and the latched code is compared with the
//! code of the specified next state. A cycle whose (state, input) pair has no
//! transition is unconstrained; after it the symbolic state is unknown and
//! the remaining cycles are unconstrained as well.

use std::fmt;

use super::{FsmNetlist, NetlistError};
use crate::fsm::{Fsm, StateEncoding};
use crate::rng::{below, seeded};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    InitialState {
        expected: u32,
        got: u32,
    },
    Output {
        cycle: usize,
        output: usize,
        expected: bool,
        got: bool,
    },
    NextState {
        cycle: usize,
        expected: u32,
        got: u32,
    },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::InitialState { expected, got } => {
                write!(f, "initial state code {got:b}, expected {expected:b}")
            }
            Divergence::Output {
                cycle,
                output,
                expected,
                got,
            } => write!(
                f,
                "cycle {cycle}: out{output} is {}, expected {}",
                *got as u8, *expected as u8
            ),
            Divergence::NextState {
                cycle,
                expected,
                got,
            } => {
                write!(
                    f,
                    "cycle {cycle}: next state code {got:b}, expected {expected:b}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimReport {
    pub cycles: usize,
    /// Output bits actually compared.
    pub compared: usize,
    /// Cycles with no specified behavior.
    pub unconstrained: Vec<usize>,
    pub divergence: Option<Divergence>,
    /// Gate-level primary outputs per simulated cycle.
    pub outputs: Vec<Vec<bool>>,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

fn slot(names: &[String], name: &str) -> Result<usize, NetlistError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| NetlistError::MissingSignal {
            kind: "signal",
            name: name.to_string(),
        })
}

pub fn simulate_fsm(
    machine: &FsmNetlist,
    fsm: &Fsm,
    enc: &StateEncoding,
    stimulus: &[u32],
) -> Result<SimReport, NetlistError> {
    let core = &machine.core;
    let out_names: Vec<String> = core.outputs.iter().map(|(n, _)| n.clone()).collect();
    let n_pi = fsm.num_inputs;
    let pi_slots = (0..n_pi)
        .map(|k| slot(&core.inputs, &format!("in{k}")))
        .collect::<Result<Vec<_>, _>>()?;
    let po_slots = (0..fsm.num_outputs)
        .map(|k| slot(&out_names, &format!("out{k}")))
        .collect::<Result<Vec<_>, _>>()?;
    // latch k holds state bit k
    let mut latch_in = Vec::new();
    let mut latch_out = Vec::new();
    for k in 0..enc.width() {
        let l = machine
            .latches
            .iter()
            .find(|l| l.output == format!("s{k}"))
            .ok_or_else(|| NetlistError::MissingSignal {
                kind: "latch",
                name: format!("s{k}"),
            })?;
        latch_out.push(slot(&core.inputs, &l.output)?);
        latch_in.push(slot(&out_names, &l.input)?);
    }
    let reset = fsm.reset_state.ok_or(NetlistError::NoReset)?;

    let mut report = SimReport::default();
    let mut state: Vec<bool> = (0..enc.width())
        .map(|k| {
            machine
                .latches
                .iter()
                .find(|l| l.output == format!("s{k}"))
                .map(|l| l.init)
                .unwrap_or(false)
        })
        .collect();
    let code = |bits: &[bool]| {
        bits.iter()
            .enumerate()
            .map(|(k, &b)| (b as u32) << k)
            .sum::<u32>()
    };
    if code(&state) != enc.code(reset) {
        report.divergence = Some(Divergence::InitialState {
            expected: enc.code(reset),
            got: code(&state),
        });
        return Ok(report);
    }

    let mut symbolic = Some(reset);
    let mut inputs = vec![false; core.inputs.len()];
    for (cycle, &value) in stimulus.iter().enumerate() {
        if n_pi < 32 && value >> n_pi != 0 {
            return Err(NetlistError::Stimulus {
                cycle,
                value,
                bits: n_pi,
            });
        }
        for (k, &s) in pi_slots.iter().enumerate() {
            inputs[s] = (value >> (n_pi - 1 - k)) & 1 == 1;
        }
        for (k, &s) in latch_out.iter().enumerate() {
            inputs[s] = state[k];
        }
        let outs = core.eval(&inputs);
        let next_bits: Vec<bool> = latch_in.iter().map(|&s| outs[s]).collect();
        report.cycles += 1;
        report
            .outputs
            .push(po_slots.iter().map(|&s| outs[s]).collect());

        match symbolic.and_then(|s| fsm.step(s, value)) {
            None => {
                report.unconstrained.push(cycle);
                symbolic = None;
            }
            Some(step) => {
                for (k, want) in step.outputs.iter().enumerate() {
                    let Some(want) = *want else { continue };
                    report.compared += 1;
                    let got = outs[po_slots[k]];
                    if got != want {
                        report.divergence = Some(Divergence::Output {
                            cycle,
                            output: k,
                            expected: want,
                            got,
                        });
                        return Ok(report);
                    }
                }
                if let Some(next) = step.next {
                    let got = code(&next_bits);
                    if got != enc.code(next) {
                        report.divergence = Some(Divergence::NextState {
                            cycle,
                            expected: enc.code(next),
                            got,
                        });
                        return Ok(report);
                    }
                }
                symbolic = step.next;
            }
        }
        state = next_bits;
    }
    Ok(report)
}

/// `count` random input sequences of `cycles` vectors each.
pub fn random_stimuli(num_inputs: usize, count: usize, cycles: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = seeded(seed);
    let span = 1u32 << num_inputs;
    (0..count)
        .map(|_| (0..cycles).map(|_| below(&mut rng, span)).collect())
        .collect()
}
