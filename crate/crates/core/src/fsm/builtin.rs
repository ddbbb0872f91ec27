//! Bundled benchmark machines.
//!
//! Two families ship with the crate: MCNC91 state tables (`dk27`, `lion9`,
//! `s8`, `beecount`, `bbara`, `dk14`) compiled in from `fixtures/`, and
//! single-input Moore sequence detectors generated from their pattern.

use super::{parse_kiss2, Fsm, FsmError};

const MCNC: &[(&str, &str)] = &[
    ("dk27", include_str!("../../fixtures/dk27.kiss2")),
    ("lion9", include_str!("../../fixtures/lion9.kiss2")),
    ("s8", include_str!("../../fixtures/s8.kiss2")),
    ("beecount", include_str!("../../fixtures/beecount.kiss2")),
    ("bbara", include_str!("../../fixtures/bbara.kiss2")),
    ("dk14", include_str!("../../fixtures/dk14.kiss2")),
];

/// Detector name and the bit pattern it recognises.
const DETECTORS: &[(&str, &str)] = &[
    ("10101", "10101"),
    ("0001000", "0001000"),
    ("01100110", "01100110"),
    ("12-0s-then-1", "0000000000001"),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    MCNC.iter().chain(DETECTORS).map(|(n, _)| *n)
}

pub fn bundled_kiss2(name: &str) -> Option<String> {
    MCNC.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .or_else(|| {
            DETECTORS
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, p)| detector_kiss2(p))
        })
}

/// KISS2 for an overlapping Moore detector of `pattern`.
///
/// State `Pk` means the last `k` symbols equal the first `k` pattern symbols
/// (longest such `k`). The output is 1 exactly in the final state, so a
/// pattern of length `L` needs `L + 1` states.
pub fn detector_kiss2(pattern: &str) -> String {
    let p = pattern.as_bytes();
    let len = p.len();
    let advance = |k: usize, b: u8| -> usize {
        let mut seen: Vec<u8> = p[..k].to_vec();
        seen.push(b);
        (0..=len.min(seen.len()))
            .rev()
            .find(|&j| seen.ends_with(&p[..j]))
            .unwrap_or(0)
    };
    let mut out = format!(".i 1\n.o 1\n.p {}\n.s {}\n.r P0\n", 2 * (len + 1), len + 1);
    for k in 0..=len {
        let moore = if k == len { '1' } else { '0' };
        for b in *b"01" {
            out.push_str(&format!("{} P{k} P{} {moore}\n", b as char, advance(k, b)));
        }
    }
    out.push_str(".e\n");
    out
}

/// One of the four bundled sequence detectors.
pub fn load_builtin(name: &str) -> Result<Fsm, FsmError> {
    let (_, pattern) = DETECTORS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| FsmError::UnknownBuiltin(name.to_string()))?;
    parse_kiss2(&detector_kiss2(pattern), name)
}

/// Any bundled machine: MCNC table or sequence detector.
pub fn load_benchmark(name: &str) -> Result<Fsm, FsmError> {
    let text = bundled_kiss2(name).ok_or_else(|| FsmError::UnknownBuiltin(name.to_string()))?;
    parse_kiss2(&text, name)
}
