use super::{Cube, Fsm, FsmError, Transition};

#[derive(Default)]
struct Header {
    inputs: Option<usize>,
    outputs: Option<usize>,
    states: Option<usize>,
    products: Option<usize>,
    reset: Option<(String, usize)>,
}

fn count(line: usize, directive: &str, arg: Option<&str>) -> Result<usize, FsmError> {
    arg.and_then(|a| a.parse().ok())
        .ok_or_else(|| FsmError::Syntax {
            line,
            msg: format!("{directive} expects a count"),
        })
}

/// Parse a KISS2 state table.
///
/// Directives `.i .o .s .p .r` are optional; `.e`/`.end` stops parsing and
/// other directives (`.ilb`, `.ob`, `.type`, ...) are ignored. States are
/// numbered in order of first appearance. The reset state is `.r` when given,
/// otherwise the first state seen.
pub fn parse_kiss2(text: &str, name: &str) -> Result<Fsm, FsmError> {
    let mut header = Header::default();
    let mut states: Vec<String> = Vec::new();
    let mut transitions = Vec::new();
    let intern = |states: &mut Vec<String>, s: &str| -> usize {
        match states.iter().position(|x| x == s) {
            Some(i) => i,
            None => {
                states.push(s.to_string());
                states.len() - 1
            }
        }
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let first = tokens.next().unwrap();
        if let Some(directive) = first.strip_prefix('.') {
            let arg = tokens.next();
            match directive {
                "i" => header.inputs = Some(count(line, ".i", arg)?),
                "o" => header.outputs = Some(count(line, ".o", arg)?),
                "s" => header.states = Some(count(line, ".s", arg)?),
                "p" => header.products = Some(count(line, ".p", arg)?),
                "r" => {
                    let s = arg.ok_or_else(|| FsmError::Syntax {
                        line,
                        msg: ".r expects a state name".into(),
                    })?;
                    header.reset = Some((s.to_string(), line));
                }
                "e" | "end" => break,
                _ => log::debug!("line {line}: ignoring directive .{directive}"),
            }
            continue;
        }

        let fields: Vec<&str> = content.split_whitespace().collect();
        // A zero-width cube is written as nothing, so .i 0 / .o 0 bodies have
        // fewer columns.
        let (inp, cur, nxt, out) = match fields.len() {
            4 => (fields[0], fields[1], fields[2], fields[3]),
            3 if header.inputs == Some(0) => ("", fields[0], fields[1], fields[2]),
            3 if header.outputs == Some(0) => (fields[0], fields[1], fields[2], ""),
            n => {
                return Err(FsmError::Syntax {
                    line,
                    msg: format!("expected `input current next output`, found {n} fields"),
                })
            }
        };
        let input = Cube::parse(inp).ok_or_else(|| FsmError::Syntax {
            line,
            msg: format!("bad input cube {inp:?}"),
        })?;
        let output = Cube::parse(out).ok_or_else(|| FsmError::Syntax {
            line,
            msg: format!("bad output cube {out:?}"),
        })?;
        let n_in = *header.inputs.get_or_insert(input.len());
        if input.len() != n_in {
            return Err(FsmError::CubeLength {
                line,
                kind: "input",
                expected: n_in,
                found: input.len(),
            });
        }
        let n_out = *header.outputs.get_or_insert(output.len());
        if output.len() != n_out {
            return Err(FsmError::CubeLength {
                line,
                kind: "output",
                expected: n_out,
                found: output.len(),
            });
        }
        let current = intern(&mut states, cur);
        let next = intern(&mut states, nxt);
        transitions.push(Transition {
            input,
            current,
            next,
            output,
            line,
        });
    }

    if transitions.is_empty() {
        return Err(FsmError::Empty);
    }
    if let Some(declared) = header.states {
        if declared != states.len() {
            return Err(FsmError::CountMismatch {
                directive: ".s",
                declared,
                found: states.len(),
            });
        }
    }
    if let Some(declared) = header.products {
        if declared != transitions.len() {
            log::warn!(
                "{name}: .p declares {declared} products but the body has {}",
                transitions.len()
            );
        }
    }
    let reset_state = match &header.reset {
        Some((s, _)) => Some(
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| FsmError::UnknownReset(s.clone()))?,
        ),
        None => Some(0),
    };

    let fsm = Fsm {
        name: name.to_string(),
        num_inputs: header.inputs.unwrap_or(0),
        num_outputs: header.outputs.unwrap_or(0),
        states,
        reset_state,
        transitions,
    };
    check_determinism(&fsm)?;
    Ok(fsm)
}

fn check_determinism(fsm: &Fsm) -> Result<(), FsmError> {
    let ts = &fsm.transitions;
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            if a.current != b.current || !a.input.intersects(&b.input) {
                continue;
            }
            if a.next != b.next || !a.output.intersects(&b.output) {
                return Err(FsmError::Nondeterministic {
                    state: fsm.states[a.current].clone(),
                    first: a.line,
                    second: b.line,
                });
            }
        }
    }
    Ok(())
}
