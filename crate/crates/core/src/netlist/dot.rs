//! Graphviz rendering. Output is a pure function of the netlist.

use std::fmt::Write;

use super::{Circuit, GateNetlist, Latch, Net};
use crate::cgp::Function;

fn node_id(n: &GateNetlist, net: Net) -> String {
    match net {
        Net::Input(i) => format!("\"{}\"", n.inputs[i]),
        Net::Gate(g) => format!("\"{}\"", n.gates[g].name),
    }
}

pub fn export_dot<'a>(circuit: impl Into<Circuit<'a>>, name: &str) -> String {
    let (core, latches): (&GateNetlist, &[Latch]) = match circuit.into() {
        Circuit::Combinational(n) => (n, &[]),
        Circuit::Sequential(f) => (&f.core, &f.latches),
    };
    let mut s = String::new();
    writeln!(s, "digraph \"{name}\" {{").unwrap();
    s.push_str("  rankdir=LR;\n");
    for i in &core.inputs {
        if latches.iter().any(|l| &l.output == i) {
            continue;
        }
        writeln!(s, "  \"{i}\" [shape=invhouse];").unwrap();
    }
    for l in latches {
        writeln!(
            s,
            "  \"{}\" [shape=box,label=\"DFF {}\\ninit={}\"];",
            l.output, l.output, l.init as u8
        )
        .unwrap();
    }
    for g in &core.gates {
        let (shape, label) = match g.kind {
            Function::Nand => ("invtriangle", "NAND"),
            Function::Nor => ("invtrapezium", "NOR"),
        };
        writeln!(
            s,
            "  \"{}\" [shape={shape},label=\"{label}\\n{}\"];",
            g.name, g.name
        )
        .unwrap();
    }
    for (o, _) in &core.outputs {
        if latches.iter().any(|l| &l.input == o) {
            continue;
        }
        writeln!(s, "  \"{o}\" [shape=house];").unwrap();
    }
    for g in &core.gates {
        for &src in &g.inputs {
            writeln!(s, "  {} -> \"{}\";", node_id(core, src), g.name).unwrap();
        }
    }
    for (o, net) in &core.outputs {
        match latches.iter().find(|l| &l.input == o) {
            Some(l) => writeln!(
                s,
                "  {} -> \"{}\" [label=\"{o}\"];",
                node_id(core, *net),
                l.output
            ),
            None => writeln!(s, "  {} -> \"{o}\";", node_id(core, *net)),
        }
        .unwrap();
    }
    s.push_str("}\n");
    s
}
