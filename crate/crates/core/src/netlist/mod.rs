//! Gate-level netlists decoded from genotypes.
//!
//! Signal names are fixed: primary inputs `in<k>`, current-state bits `s<k>`,
//! next-state bits `ns<k>`, primary outputs `out<k>`, gates `g<k>` numbered in
//! topological order. Netlists are bound to truth tables by these names, so a
//! netlist read back from BLIF can be checked without any side information.

mod blif;
mod dot;
mod sim;

use std::fmt;

use thiserror::Error;

use crate::cgp::{Function, Genotype, Phenotype};
use crate::fsm::{Fsm, StateEncoding, TruthTable};

pub use blif::{export_blif, parse_blif, Circuit, ParsedBlif};
pub use dot::export_dot;
pub use sim::{random_stimuli, simulate_fsm, Divergence, SimReport};

/// Static CMOS transistors per two-input NAND or NOR.
pub const TRANSISTORS_PER_GATE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("netlist has no {kind} named {name}")]
    MissingSignal { kind: &'static str, name: String },
    #[error("machine has no reset state")]
    NoReset,
    #[error("stimulus value {value} at cycle {cycle} exceeds {bits} input bits")]
    Stimulus {
        cycle: usize,
        value: u32,
        bits: usize,
    },
    #[error("BLIF line {line}: {msg}")]
    Blif { line: usize, msg: String },
    #[error("baseline gate count must be positive")]
    ZeroBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Net {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub kind: Function,
    pub inputs: [Net; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateNetlist {
    pub inputs: Vec<String>,
    /// Topological: a gate only reads inputs and earlier gates.
    pub gates: Vec<Gate>,
    pub outputs: Vec<(String, Net)>,
}

impl GateNetlist {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn net_name(&self, net: Net) -> &str {
        match net {
            Net::Input(i) => &self.inputs[i],
            Net::Gate(g) => &self.gates[g].name,
        }
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }

    pub fn output_net(&self, name: &str) -> Option<Net> {
        self.outputs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, net)| *net)
    }

    /// Gate-by-gate interpretation. `inputs` follows `self.inputs`; the result
    /// follows `self.outputs`.
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        let mut gates = Vec::with_capacity(self.gates.len());
        let value = |gates: &Vec<bool>, net: Net| match net {
            Net::Input(i) => inputs[i],
            Net::Gate(g) => gates[g],
        };
        for g in &self.gates {
            let a = value(&gates, g.inputs[0]);
            let b = value(&gates, g.inputs[1]);
            let out = match g.kind {
                Function::Nand => !(a && b),
                Function::Nor => !(a || b),
            };
            gates.push(out);
        }
        self.outputs
            .iter()
            .map(|(_, n)| value(&gates, *n))
            .collect()
    }

    pub fn transistor_estimate(&self) -> usize {
        TRANSISTORS_PER_GATE * self.gates.len()
    }
}

/// Signal names for every program input address and output column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalNames {
    /// Name of program input address `v`.
    pub by_address: Vec<String>,
    /// Addresses in netlist input order.
    pub input_order: Vec<usize>,
    pub outputs: Vec<String>,
}

impl SignalNames {
    /// Names implied by the table's bit-order convention, with primary inputs
    /// listed before state bits.
    pub fn for_table(tt: &TruthTable) -> Self {
        let n_s = tt.state_bits();
        let n_pi = tt.primary_inputs();
        let mut input_order: Vec<usize> = (0..n_pi).map(|k| n_s + n_pi - 1 - k).collect();
        input_order.extend(0..n_s);
        SignalNames {
            by_address: (0..tt.num_vars()).map(|v| tt.var_name(v)).collect(),
            input_order,
            outputs: (0..tt.num_outs()).map(|c| tt.output_name(c)).collect(),
        }
    }
}

pub fn to_netlist(p: &Phenotype, g: &Genotype, names: &SignalNames) -> GateNetlist {
    let n_i = g.params().num_inputs;
    let mut input_slot = vec![0; n_i];
    for (slot, &addr) in names.input_order.iter().enumerate() {
        input_slot[addr] = slot;
    }
    let mut gate_of_column = vec![usize::MAX; g.nodes().len()];
    for (k, &j) in p.active.iter().enumerate() {
        gate_of_column[j] = k;
    }
    let net = |addr: u32| {
        let a = addr as usize;
        if a < n_i {
            Net::Input(input_slot[a])
        } else {
            Net::Gate(gate_of_column[a - n_i])
        }
    };
    let gates = p
        .active
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let node = g.nodes()[j];
            Gate {
                name: format!("g{k}"),
                kind: Function::from_gene(node.function).expect("valid genotype"),
                inputs: [net(node.inputs[0]), net(node.inputs[1])],
            }
        })
        .collect();
    GateNetlist {
        inputs: names
            .input_order
            .iter()
            .map(|&a| names.by_address[a].clone())
            .collect(),
        gates,
        outputs: p
            .output_sources
            .iter()
            .zip(&names.outputs)
            .map(|(&src, name)| (name.clone(), net(src)))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub rows: usize,
    pub care_bits: u64,
    /// `(row, output name)` for every cared bit the netlist gets wrong.
    pub failures: Vec<(usize, String)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn mismatches(&self) -> u64 {
        self.failures.len() as u64
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS");
        }
        for (row, out) in &self.failures {
            writeln!(f, "FAIL {row} {out}")?;
        }
        Ok(())
    }
}

/// Check the netlist against every row of the table.
pub fn verify_netlist(
    n: &GateNetlist,
    tt: &TruthTable,
) -> Result<VerificationReport, NetlistError> {
    let var_slots = (0..tt.num_vars())
        .map(|v| {
            let name = tt.var_name(v);
            n.input_index(&name).ok_or(NetlistError::MissingSignal {
                kind: "input",
                name,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out_slots = (0..tt.num_outs())
        .map(|c| {
            let name = tt.output_name(c);
            n.outputs
                .iter()
                .position(|(o, _)| *o == name)
                .ok_or(NetlistError::MissingSignal {
                    kind: "output",
                    name,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut failures = Vec::new();
    let mut inputs = vec![false; n.inputs.len()];
    for row in 0..tt.rows() {
        for (v, &slot) in var_slots.iter().enumerate() {
            inputs[slot] = (row >> v) & 1 == 1;
        }
        let outs = n.eval(&inputs);
        for (c, &slot) in out_slots.iter().enumerate() {
            if tt.care(row, c) && outs[slot] != tt.desired(row, c) {
                failures.push((row, tt.output_name(c)));
            }
        }
    }
    Ok(VerificationReport {
        rows: tt.rows(),
        care_bits: tt.care_count() as u64,
        failures,
    })
}

/// D flip-flop closing the loop from `input` (`ns<k>`) to `output` (`s<k>`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Latch {
    pub input: String,
    pub output: String,
    pub init: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmNetlist {
    pub name: String,
    pub core: GateNetlist,
    pub latches: Vec<Latch>,
    pub primary_inputs: Vec<String>,
    pub primary_outputs: Vec<String>,
}

impl FsmNetlist {
    pub fn gate_count(&self) -> usize {
        self.core.gate_count()
    }
}

/// Insert one rising-edge D flip-flop per state bit, initialised to the reset
/// state's code.
pub fn assemble_fsm(
    n: &GateNetlist,
    enc: &StateEncoding,
    fsm: &Fsm,
) -> Result<FsmNetlist, NetlistError> {
    let reset = fsm.reset_state.ok_or(NetlistError::NoReset)?;
    let mut latches = Vec::with_capacity(enc.width());
    for k in 0..enc.width() {
        let (input, output) = (format!("ns{k}"), format!("s{k}"));
        if n.output_net(&input).is_none() {
            return Err(NetlistError::MissingSignal {
                kind: "output",
                name: input,
            });
        }
        if n.input_index(&output).is_none() {
            return Err(NetlistError::MissingSignal {
                kind: "input",
                name: output,
            });
        }
        latches.push(Latch {
            input,
            output,
            init: enc.bit(reset, k),
        });
    }
    Ok(FsmNetlist {
        name: fsm.name.clone(),
        core: n.clone(),
        latches,
        primary_inputs: (0..fsm.num_inputs).map(|k| format!("in{k}")).collect(),
        primary_outputs: (0..fsm.num_outputs).map(|k| format!("out{k}")).collect(),
    })
}

/// Percentage of baseline gates saved, truncated (not rounded) to two
/// decimals: `(23, 18)` gives 21.73.
pub fn reduction_percent(baseline_gates: usize, cgp_gates: usize) -> Result<f64, NetlistError> {
    if baseline_gates == 0 {
        return Err(NetlistError::ZeroBaseline);
    }
    let saved = baseline_gates as i64 - cgp_gates as i64;
    let hundredths = saved * 10_000 / baseline_gates as i64;
    Ok(hundredths as f64 / 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgp::{CgpParams, Node};
    use crate::eval::{evaluate, evaluate_scalar, pack_table};
    use crate::fsm::{
        build_truth_table, encode_states, load_benchmark, parse_kiss2, EncodingScheme,
    };
    use crate::rng::seeded;

    #[test]
    fn reduction_values() {
        assert_eq!(reduction_percent(23, 18).unwrap(), 21.73);
        assert_eq!(reduction_percent(42, 20).unwrap(), 52.38);
        assert_eq!(reduction_percent(7, 7).unwrap(), 0.0);
        assert_eq!(reduction_percent(0, 3), Err(NetlistError::ZeroBaseline));
        assert_eq!(reduction_percent(10, 12).unwrap(), -20.0);
    }

    #[test]
    fn empty_phenotype_netlist() {
        let tt = TruthTable::from_fn(2, 2, |r, c| (r >> c) & 1 == 1);
        let p = CgpParams::new(2, 2, 3, 10.0).unwrap();
        let g = Genotype::from_parts(
            p,
            vec![
                Node {
                    function: 0,
                    inputs: [0, 1]
                };
                3
            ],
            vec![0, 1],
        )
        .unwrap();
        let n = to_netlist(&g.decode(), &g, &SignalNames::for_table(&tt));
        assert_eq!(n.gate_count(), 0);
        // generic tables name every variable as a primary input
        assert_eq!(n.inputs, ["in0", "in1"]);
        assert_eq!(n.output_net("out0"), Some(Net::Input(1)));
        assert!(verify_netlist(&n, &tt).unwrap().passed());
        assert_eq!(verify_netlist(&n, &tt).unwrap().to_string(), "PASS\n");
    }

    #[test]
    fn rewired_output_fails_on_exact_rows() {
        // out0 = in1 AND in0 built from two NANDs; rewire it to input var 0
        let tt = TruthTable::from_fn(2, 1, |r, _| r == 3);
        let p = CgpParams::new(2, 1, 2, 10.0).unwrap();
        let g = Genotype::from_parts(
            p,
            vec![
                Node {
                    function: 0,
                    inputs: [0, 1],
                },
                Node {
                    function: 0,
                    inputs: [2, 2],
                },
            ],
            vec![3],
        )
        .unwrap();
        let names = SignalNames::for_table(&tt);
        let mut n = to_netlist(&g.decode(), &g, &names);
        assert_eq!(n.gate_count(), 2);
        assert!(verify_netlist(&n, &tt).unwrap().passed());
        n.outputs[0].1 = Net::Input(n.input_index(&tt.var_name(0)).unwrap());
        let rep = verify_netlist(&n, &tt).unwrap();
        // var0 is 1 on rows 1 and 3; AND is 1 only on row 3
        assert_eq!(rep.failures, vec![(1, "out0".to_string())]);
        assert_eq!(rep.to_string(), "FAIL 1 out0\n");
    }

    #[test]
    fn missing_signals_are_reported() {
        let tt = TruthTable::from_fn(2, 1, |r, _| r == 3);
        let n = GateNetlist {
            inputs: vec!["in0".into()],
            gates: vec![],
            outputs: vec![("out0".into(), Net::Input(0))],
        };
        assert!(matches!(
            verify_netlist(&n, &tt),
            Err(NetlistError::MissingSignal { kind: "input", .. })
        ));
    }

    #[test]
    fn three_oracles_agree_on_random_genotypes() {
        let mut rng = seeded(77);
        for i in 0..300usize {
            let nv = 1 + i % 8;
            let tt = TruthTable::from_fn(nv, 2, |r, c| (r * 7 + c * 3 + i) % 5 < 2);
            let p = CgpParams::new(nv, 2, i % 20, 10.0).unwrap();
            let g = Genotype::random(p, &mut rng);
            let n = to_netlist(&g.decode(), &g, &SignalNames::for_table(&tt));
            assert_eq!(n.gate_count(), g.decode().gate_count());
            let a = evaluate(&g, &pack_table(&tt).unwrap()).unwrap().mismatches;
            let b = evaluate_scalar(&g, &tt).unwrap().mismatches;
            let c = verify_netlist(&n, &tt).unwrap().mismatches();
            assert_eq!((a, b), (c, c));
        }
    }

    #[test]
    fn fsm_netlist_names_and_latches() {
        let fsm = load_benchmark("dk27").unwrap();
        let enc = encode_states(&fsm, &EncodingScheme::Natural).unwrap();
        let tt = build_truth_table(&fsm, &enc);
        let g = Genotype::random(CgpParams::new(4, 5, 25, 10.0).unwrap(), &mut seeded(2));
        let n = to_netlist(&g.decode(), &g, &SignalNames::for_table(&tt));
        assert_eq!(n.inputs, ["in0", "s0", "s1", "s2"]);
        let names: Vec<&str> = n.outputs.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["ns0", "ns1", "ns2", "out0", "out1"]);
        let f = assemble_fsm(&n, &enc, &fsm).unwrap();
        assert_eq!(f.latches.len(), 3);
        assert!(f.latches.iter().all(|l| !l.init)); // START has code 000

        let lion = load_benchmark("lion9").unwrap();
        let enc9 = encode_states(&lion, &EncodingScheme::Natural).unwrap();
        let tt9 = build_truth_table(&lion, &enc9);
        let g9 = Genotype::random(CgpParams::new(6, 5, 10, 10.0).unwrap(), &mut seeded(2));
        let n9 = to_netlist(&g9.decode(), &g9, &SignalNames::for_table(&tt9));
        assert_eq!(assemble_fsm(&n9, &enc9, &lion).unwrap().latches.len(), 4);
    }

    #[test]
    fn single_state_machine_has_one_latch() {
        let fsm = parse_kiss2(".r A\n0 A A 1\n1 A A 0\n", "one").unwrap();
        let enc = encode_states(&fsm, &EncodingScheme::Natural).unwrap();
        let tt = build_truth_table(&fsm, &enc);
        let g = Genotype::random(CgpParams::new(2, 2, 4, 10.0).unwrap(), &mut seeded(0));
        let n = to_netlist(&g.decode(), &g, &SignalNames::for_table(&tt));
        let f = assemble_fsm(&n, &enc, &fsm).unwrap();
        assert_eq!(
            f.latches,
            vec![Latch {
                input: "ns0".into(),
                output: "s0".into(),
                init: false
            }]
        );
        let mut no_reset = fsm.clone();
        no_reset.reset_state = None;
        assert_eq!(
            assemble_fsm(&n, &enc, &no_reset),
            Err(NetlistError::NoReset)
        );
    }
}
