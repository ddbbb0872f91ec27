//! Plain-text genotype archive.
//!
//! ```text
//! cgp n_i=4 n_o=2 m=3 mu=10 mode=redraw
//! 0 0 3 | 1 4 4 | 0 5 0 || 6 0
//! ```
//!
//! The first line carries the parameters; the second lists each node as
//! `function in1 in2` separated by `|`, then `||` and the output genes. A
//! genotype with no nodes writes `|| o1 o2 ...`. Blank lines and `#` comments
//! are ignored.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{CgpParams, Genotype, MutationMode, Node};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("genotype text: {0}")]
pub struct ParseGenotypeError(pub String);

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let mode = match p.mutation_mode {
            MutationMode::Redraw => "redraw",
            MutationMode::Strict => "strict",
        };
        writeln!(
            f,
            "cgp n_i={} n_o={} m={} mu={} mode={mode}",
            p.num_inputs, p.num_outputs, p.columns, p.mutation_rate
        )?;
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(|n| format!("{} {} {}", n.function, n.inputs[0], n.inputs[1]))
            .collect();
        let outs: Vec<String> = self.outputs.iter().map(u32::to_string).collect();
        if nodes.is_empty() {
            writeln!(f, "|| {}", outs.join(" "))
        } else {
            writeln!(f, "{} || {}", nodes.join(" | "), outs.join(" "))
        }
    }
}

fn err(msg: impl Into<String>) -> ParseGenotypeError {
    ParseGenotypeError(msg.into())
}

fn numbers(text: &str) -> Result<Vec<u32>, ParseGenotypeError> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| err(format!("bad gene {t:?}"))))
        .collect()
}

impl FromStr for Genotype {
    type Err = ParseGenotypeError;

    /// Parses the archive; gene ranges are not checked here.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| err("empty input"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("cgp") {
            return Err(err("header must start with `cgp`"));
        }
        let (mut n_i, mut n_o, mut m, mut mu, mut mode) =
            (None, None, None, None, MutationMode::Redraw);
        for kv in fields {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| err(format!("bad header field {kv:?}")))?;
            let bad = || err(format!("bad value in {kv:?}"));
            match k {
                "n_i" => n_i = Some(v.parse::<usize>().map_err(|_| bad())?),
                "n_o" => n_o = Some(v.parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(v.parse::<usize>().map_err(|_| bad())?),
                "mu" => mu = Some(v.parse::<f64>().map_err(|_| bad())?),
                "mode" => {
                    mode = match v {
                        "redraw" => MutationMode::Redraw,
                        "strict" => MutationMode::Strict,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(err(format!("unknown header field {k:?}"))),
            }
        }
        let (Some(n_i), Some(n_o), Some(m)) = (n_i, n_o, m) else {
            return Err(err("header needs n_i, n_o and m"));
        };
        let params = CgpParams::new(n_i, n_o, m, mu.unwrap_or(10.0))
            .map_err(|e| err(e.to_string()))?
            .with_mode(mode);

        let body = lines.next().ok_or_else(|| err("missing gene line"))?;
        if lines.next().is_some() {
            return Err(err("trailing content after gene line"));
        }
        let (node_part, out_part) = body
            .split_once("||")
            .ok_or_else(|| err("gene line needs `||` before the outputs"))?;
        let mut nodes = Vec::new();
        if !node_part.trim().is_empty() {
            for chunk in node_part.split('|') {
                match numbers(chunk)?.as_slice() {
                    [f, a, b] => nodes.push(Node {
                        function: *f,
                        inputs: [*a, *b],
                    }),
                    _ => return Err(err(format!("node {chunk:?} needs three genes"))),
                }
            }
        }
        let outputs = numbers(out_part)?;
        Genotype::from_parts(params, nodes, outputs).map_err(|e| err(e.to_string()))
    }
}
