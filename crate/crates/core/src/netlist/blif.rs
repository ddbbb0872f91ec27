//! BLIF export and a reader for the subset it writes.
//!
//! ```text
//! .model <name>
//! .inputs [clk] <primary inputs> [<state bits> when combinational]
//! .outputs <outputs>
//! .latch ns<k> s<k> re clk <init>        one per state bit
//! .names a b g<k>                       NAND: "0- 1" and "-0 1"
//! .names a b g<k>                       NOR:  "00 1"
//! .names src out                        buffer: "1 1"
//! .end
//! ```
//!
//! Every output and latch input is driven by a buffer from its source net, so
//! gate names stay `g<k>` and outputs may alias inputs or share a gate.

use std::collections::HashMap;
use std::fmt::Write;

use super::{FsmNetlist, Gate, GateNetlist, Latch, Net, NetlistError};
use crate::cgp::Function;

#[derive(Debug, Clone, Copy)]
pub enum Circuit<'a> {
    Combinational(&'a GateNetlist),
    Sequential(&'a FsmNetlist),
}

impl<'a> From<&'a GateNetlist> for Circuit<'a> {
    fn from(n: &'a GateNetlist) -> Self {
        Circuit::Combinational(n)
    }
}

impl<'a> From<&'a FsmNetlist> for Circuit<'a> {
    fn from(n: &'a FsmNetlist) -> Self {
        Circuit::Sequential(n)
    }
}

const CLOCK: &str = "clk";

pub fn export_blif<'a>(circuit: impl Into<Circuit<'a>>, model: &str) -> String {
    let (core, latches, inputs, outputs): (&GateNetlist, &[Latch], Vec<&str>, Vec<&str>) =
        match circuit.into() {
            Circuit::Combinational(n) => (
                n,
                &[],
                n.inputs.iter().map(String::as_str).collect(),
                n.outputs.iter().map(|(o, _)| o.as_str()).collect(),
            ),
            Circuit::Sequential(f) => {
                let mut ins = vec![CLOCK];
                ins.extend(f.primary_inputs.iter().map(String::as_str));
                (
                    &f.core,
                    &f.latches,
                    ins,
                    f.primary_outputs.iter().map(String::as_str).collect(),
                )
            }
        };
    let mut s = String::new();
    writeln!(s, ".model {model}").unwrap();
    writeln!(s, ".inputs {}", inputs.join(" ")).unwrap();
    writeln!(s, ".outputs {}", outputs.join(" ")).unwrap();
    for l in latches {
        writeln!(
            s,
            ".latch {} {} re {CLOCK} {}",
            l.input, l.output, l.init as u8
        )
        .unwrap();
    }
    for g in &core.gates {
        writeln!(
            s,
            ".names {} {} {}",
            core.net_name(g.inputs[0]),
            core.net_name(g.inputs[1]),
            g.name
        )
        .unwrap();
        match g.kind {
            Function::Nand => s.push_str("0- 1\n-0 1\n"),
            Function::Nor => s.push_str("00 1\n"),
        }
    }
    for (name, net) in &core.outputs {
        writeln!(s, ".names {} {name}\n1 1", core.net_name(*net)).unwrap();
    }
    s.push_str(".end\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedBlif {
    pub model: String,
    /// Combinational core: primary inputs then latch outputs as inputs;
    /// latch inputs then primary outputs as outputs.
    pub netlist: GateNetlist,
    pub latches: Vec<Latch>,
    pub primary_inputs: Vec<String>,
    pub primary_outputs: Vec<String>,
}

impl ParsedBlif {
    pub fn into_fsm_netlist(self) -> FsmNetlist {
        FsmNetlist {
            name: self.model,
            core: self.netlist,
            latches: self.latches,
            primary_inputs: self.primary_inputs,
            primary_outputs: self.primary_outputs,
        }
    }
}

enum Cover {
    Nand,
    Nor,
    Buffer,
    Inverter,
}

/// A `.names` block still collecting rows: line, signals, cover rows.
type OpenNames = (usize, Vec<String>, Vec<(String, String)>);

struct Block {
    line: usize,
    inputs: Vec<String>,
    output: String,
    cover: Cover,
}

fn classify(line: usize, arity: usize, rows: &[(String, String)]) -> Result<Cover, NetlistError> {
    let mut cubes: Vec<&str> = rows
        .iter()
        .map(|(i, o)| {
            if o == "1" {
                Ok(i.as_str())
            } else {
                Err(NetlistError::Blif {
                    line,
                    msg: "only on-set covers are supported".into(),
                })
            }
        })
        .collect::<Result<_, _>>()?;
    cubes.sort_unstable();
    match (arity, cubes.as_slice()) {
        (2, ["-0", "0-"]) => Ok(Cover::Nand),
        (2, ["00"]) => Ok(Cover::Nor),
        (1, ["1"]) => Ok(Cover::Buffer),
        (1, ["0"]) => Ok(Cover::Inverter),
        _ => Err(NetlistError::Blif {
            line,
            msg: format!("unsupported cover {cubes:?} for {arity} inputs"),
        }),
    }
}

/// Logical lines with `\` continuations joined and comments removed, tagged
/// with their starting line number.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let (body, cont) = match content.trim_end().strip_suffix('\\') {
            Some(b) => (b, true),
            None => (content, false),
        };
        let entry = pending.get_or_insert_with(|| (i + 1, String::new()));
        entry.1.push(' ');
        entry.1.push_str(body);
        if !cont {
            let (n, s) = pending.take().unwrap();
            if !s.trim().is_empty() {
                out.push((n, s.trim().to_string()));
            }
        }
    }
    out
}

pub fn parse_blif(text: &str) -> Result<ParsedBlif, NetlistError> {
    let err = |line: usize, msg: &str| NetlistError::Blif {
        line,
        msg: msg.to_string(),
    };
    let mut model = String::from("top");
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut latches: Vec<Latch> = Vec::new();
    let mut clocks: Vec<String> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut open: Option<OpenNames> = None;

    let close = |open: &mut Option<OpenNames>,
                 blocks: &mut Vec<Block>|
     -> Result<(), NetlistError> {
        if let Some((line, mut sigs, rows)) = open.take() {
            let output = sigs
                .pop()
                .ok_or_else(|| err(line, ".names needs an output"))?;
            let cover = classify(line, sigs.len(), &rows)?;
            blocks.push(Block {
                line,
                inputs: sigs,
                output,
                cover,
            });
        }
        Ok(())
    };

    for (line, content) in logical_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields[0].starts_with('.') {
            close(&mut open, &mut blocks)?;
        }
        match fields[0] {
            ".model" => model = fields.get(1).unwrap_or(&"top").to_string(),
            ".inputs" => inputs.extend(fields[1..].iter().map(|s| s.to_string())),
            ".outputs" => outputs.extend(fields[1..].iter().map(|s| s.to_string())),
            ".latch" => {
                let (input, output, init, clock) = match fields.len() {
                    // .latch in out type control init
                    6 => (fields[1], fields[2], fields[5], Some(fields[4])),
                    // .latch in out init
                    4 => (fields[1], fields[2], fields[3], None),
                    3 => (fields[1], fields[2], "3", None),
                    _ => return Err(err(line, "malformed .latch")),
                };
                let init = match init {
                    "0" | "2" | "3" => false,
                    "1" => true,
                    _ => return Err(err(line, "bad latch initial value")),
                };
                if let Some(c) = clock {
                    clocks.push(c.to_string());
                }
                latches.push(Latch {
                    input: input.to_string(),
                    output: output.to_string(),
                    init,
                });
            }
            ".names" => {
                open = Some((
                    line,
                    fields[1..].iter().map(|s| s.to_string()).collect(),
                    Vec::new(),
                ))
            }
            ".end" => break,
            d if d.starts_with('.') => {
                return Err(err(line, &format!("unsupported directive {d}")))
            }
            _ => {
                let Some((_, _, rows)) = open.as_mut() else {
                    return Err(err(line, "cover row outside .names"));
                };
                match fields.as_slice() {
                    [i, o] => rows.push((i.to_string(), o.to_string())),
                    _ => return Err(err(line, "bad cover row")),
                }
            }
        }
    }
    close(&mut open, &mut blocks)?;

    let primary_inputs: Vec<String> = inputs
        .iter()
        .filter(|i| !clocks.contains(i))
        .cloned()
        .collect();
    let mut core_inputs = primary_inputs.clone();
    core_inputs.extend(latches.iter().map(|l| l.output.clone()));

    let mut nets: HashMap<String, Net> = core_inputs
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), Net::Input(i)))
        .collect();
    let mut gates: Vec<Gate> = Vec::new();
    let mut pending: Vec<Block> = blocks;
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for b in pending {
            let srcs: Option<Vec<Net>> = b.inputs.iter().map(|i| nets.get(i).copied()).collect();
            let Some(srcs) = srcs else {
                rest.push(b);
                continue;
            };
            if nets.contains_key(&b.output) {
                return Err(err(b.line, &format!("{} driven twice", b.output)));
            }
            let net = match b.cover {
                Cover::Buffer => srcs[0],
                Cover::Inverter | Cover::Nand | Cover::Nor => {
                    let kind = if matches!(b.cover, Cover::Nor) {
                        Function::Nor
                    } else {
                        Function::Nand
                    };
                    let b_in = if matches!(b.cover, Cover::Inverter) {
                        srcs[0]
                    } else {
                        srcs[1]
                    };
                    gates.push(Gate {
                        name: b.output.clone(),
                        kind,
                        inputs: [srcs[0], b_in],
                    });
                    Net::Gate(gates.len() - 1)
                }
            };
            nets.insert(b.output, net);
        }
        if rest.len() == before {
            return Err(err(rest[0].line, "undriven signal or combinational cycle"));
        }
        pending = rest;
    }

    let mut core_outputs: Vec<(String, Net)> = Vec::new();
    for name in latches.iter().map(|l| &l.input).chain(&outputs) {
        let net = *nets
            .get(name)
            .ok_or_else(|| err(0, &format!("output {name} is never driven")))?;
        core_outputs.push((name.clone(), net));
    }

    Ok(ParsedBlif {
        model,
        netlist: GateNetlist {
            inputs: core_inputs,
            gates,
            outputs: core_outputs,
        },
        latches,
        primary_inputs,
        primary_outputs: outputs,
    })
}
