use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{Fsm, FsmError};

/// How symbolic states are mapped onto flip-flop codes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EncodingScheme {
    /// State `i` (first-appearance order) gets the binary value of `i`.
    #[default]
    Natural,
    /// State `i` gets `i ^ (i >> 1)`.
    Gray,
    /// Explicit `(state name, code bits written MSB first)` pairs.
    Explicit(Vec<(String, String)>),
}

impl FromStr for EncodingScheme {
    type Err = FsmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" | "binary" => Ok(EncodingScheme::Natural),
            "gray" => Ok(EncodingScheme::Gray),
            _ => Err(FsmError::Encoding(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Parse an explicit encoding file: one `STATE BITS` pair per line, `#`
/// comments allowed.
pub fn parse_encoding_map(text: &str) -> Result<EncodingScheme, FsmError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [state, bits] if bits.chars().all(|c| c == '0' || c == '1') => {
                pairs.push((state.to_string(), bits.to_string()))
            }
            _ => {
                return Err(FsmError::Encoding(format!(
                    "line {}: expected `STATE BITS`",
                    i + 1
                )))
            }
        }
    }
    Ok(EncodingScheme::Explicit(pairs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEncoding {
    width: usize,
    codes: Vec<u32>,
}

/// Smallest width holding `n` distinct codes, never below one bit.
fn code_width(n: usize) -> usize {
    let mut w = 1;
    while (1usize << w) < n {
        w += 1;
    }
    w
}

impl StateEncoding {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn code(&self, state: usize) -> u32 {
        self.codes[state]
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn state_of(&self, code: u32) -> Option<usize> {
        self.codes.iter().position(|&c| c == code)
    }

    pub fn bit(&self, state: usize, bit: usize) -> bool {
        (self.codes[state] >> bit) & 1 == 1
    }
}

impl fmt::Display for StateEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.codes.iter().enumerate() {
            writeln!(f, "{i} {:0w$b}", c, w = self.width)?;
        }
        Ok(())
    }
}

pub fn encode_states(fsm: &Fsm, scheme: &EncodingScheme) -> Result<StateEncoding, FsmError> {
    let n = fsm.states.len();
    let width = code_width(n);
    let codes: Vec<u32> = match scheme {
        EncodingScheme::Natural => (0..n as u32).collect(),
        EncodingScheme::Gray => (0..n as u32).map(|i| i ^ (i >> 1)).collect(),
        EncodingScheme::Explicit(pairs) => {
            let mut codes = vec![None; n];
            for (state, bits) in pairs {
                let idx = fsm
                    .state_index(state)
                    .ok_or_else(|| FsmError::Encoding(format!("unknown state {state}")))?;
                if bits.len() != width {
                    return Err(FsmError::Encoding(format!(
                        "code {bits} for {state} has width {}, expected {width}",
                        bits.len()
                    )));
                }
                let code = u32::from_str_radix(bits, 2)
                    .map_err(|_| FsmError::Encoding(format!("bad code {bits}")))?;
                codes[idx] = Some(code);
            }
            codes
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    c.ok_or_else(|| {
                        FsmError::Encoding(format!("no code for state {}", fsm.states[i]))
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut seen = HashSet::new();
    for (i, c) in codes.iter().enumerate() {
        if !seen.insert(*c) {
            return Err(FsmError::Encoding(format!(
                "code {c:0width$b} assigned twice (state {})",
                fsm.states[i]
            )));
        }
    }
    Ok(StateEncoding { width, codes })
}
