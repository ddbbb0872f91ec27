use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use unigate::fsm::{
    build_truth_table, encode_states, load_benchmark, parse_encoding_map, parse_kiss2,
    EncodingScheme, Fsm, StateEncoding, TruthTable,
};

use crate::{Encoding, MachineArgs};

/// A parsed machine with its state assignment and truth table.
pub struct Machine {
    pub name: String,
    pub fsm: Fsm,
    pub enc: StateEncoding,
    pub tt: TruthTable,
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Bundled name or KISS2 file.
pub fn load_fsm(kiss2: Option<&Path>, builtin: Option<&str>) -> Result<Fsm> {
    match (kiss2, builtin) {
        (_, Some(name)) => load_benchmark(name).map_err(|e| anyhow!("builtin {name:?}: {e}")),
        (Some(path), None) => {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "machine".into());
            parse_kiss2(&read(path)?, &name).map_err(|e| anyhow!("{}: {e}", path.display()))
        }
        (None, None) => Err(anyhow!("no machine given (KISS2 path or --builtin)")),
    }
}

pub fn scheme(encoding: Encoding, map: Option<&Path>) -> Result<EncodingScheme> {
    if let Some(path) = map {
        return parse_encoding_map(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()));
    }
    Ok(match encoding {
        Encoding::Natural => EncodingScheme::Natural,
        Encoding::Gray => EncodingScheme::Gray,
    })
}

pub fn build(fsm: Fsm, scheme: &EncodingScheme) -> Result<Machine> {
    let enc = encode_states(&fsm, scheme).map_err(|e| anyhow!("{}: {e}", fsm.name))?;
    let tt = build_truth_table(&fsm, &enc);
    Ok(Machine {
        name: fsm.name.clone(),
        fsm,
        enc,
        tt,
    })
}

impl MachineArgs {
    pub fn load(&self) -> Result<Machine> {
        let fsm = load_fsm(self.kiss2.as_deref(), self.builtin.as_deref())?;
        build(fsm, &scheme(self.encoding, self.encoding_map.as_deref())?)
    }
}
