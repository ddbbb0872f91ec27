//! Espresso PLA interchange.
//!
//! Layout, one item per line:
//!
//! ```text
//! .i <num_vars>
//! .o <num_outs>
//! .type fr
//! .p <rows>
//! <input bits> <output chars>
//! .e
//! ```
//!
//! Input bits are the row index written most significant first, so the
//! primary inputs come first in declaration order followed by state bits from
//! the highest to `s0`. Output characters follow column order (`ns0..`,
//! `out0..`); `-` marks a don't-care bit. Rows without any cared bit are
//! omitted. Type `fr` makes espresso treat listed `0`s as the off-set and
//! everything unlisted as don't-care, which is what the care mask means.

use std::fmt::Write;

use super::{FsmError, TruthTable};

pub fn export_pla(tt: &TruthTable) -> String {
    let n = tt.num_vars();
    let rows: Vec<usize> = (0..tt.rows()).filter(|r| tt.row_has_care(*r)).collect();
    let mut out = String::new();
    writeln!(out, ".i {n}").unwrap();
    writeln!(out, ".o {}", tt.num_outs()).unwrap();
    out.push_str(".type fr\n");
    writeln!(out, ".p {}", rows.len()).unwrap();
    for r in rows {
        for v in (0..n).rev() {
            out.push(if (r >> v) & 1 == 1 { '1' } else { '0' });
        }
        out.push(' ');
        for c in 0..tt.num_outs() {
            out.push(match tt.get(r, c) {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            });
        }
        out.push('\n');
    }
    out.push_str(".e\n");
    out
}

/// Read a PLA written by [`export_pla`] (or any fully minterm-expanded `fr`
/// PLA) back into a table with no state bits. Input `-` is rejected.
pub fn parse_pla(text: &str) -> Result<TruthTable, FsmError> {
    let mut num_vars = None;
    let mut num_outs = None;
    let mut tt: Option<TruthTable> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| FsmError::Pla { line, msg };
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            ".i" => num_vars = fields.get(1).and_then(|s| s.parse::<usize>().ok()),
            ".o" => num_outs = fields.get(1).and_then(|s| s.parse::<usize>().ok()),
            ".e" | ".end" => break,
            d if d.starts_with('.') => {}
            _ => {
                let (Some(nv), Some(no)) = (num_vars, num_outs) else {
                    return Err(err("cube before .i/.o".into()));
                };
                let table = tt.get_or_insert_with(|| TruthTable::new(nv, 0, no));
                let [inp, outp] = fields.as_slice() else {
                    return Err(err("expected `inputs outputs`".into()));
                };
                if inp.len() != nv || outp.len() != no {
                    return Err(err("cube width disagrees with .i/.o".into()));
                }
                let mut row = 0usize;
                for c in inp.chars() {
                    row = (row << 1)
                        | match c {
                            '0' => 0,
                            '1' => 1,
                            _ => return Err(err(format!("unsupported input char {c:?}"))),
                        };
                }
                for (col, c) in outp.chars().enumerate() {
                    let v = match c {
                        '0' => Some(false),
                        '1' => Some(true),
                        '-' | '~' | '2' => None,
                        _ => return Err(err(format!("unsupported output char {c:?}"))),
                    };
                    table.set(row, col, v);
                }
            }
        }
    }
    match (tt, num_vars, num_outs) {
        (Some(t), _, _) => Ok(t),
        (None, Some(nv), Some(no)) => Ok(TruthTable::new(nv, 0, no)),
        _ => Err(FsmError::Pla {
            line: 0,
            msg: "missing .i/.o".into(),
        }),
    }
}
