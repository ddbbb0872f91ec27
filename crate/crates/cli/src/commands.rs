use std::collections::BTreeMap;
use std::fs;
use std::io::{ErrorKind, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use unigate::cgp::Genotype;
use unigate::evolve::{aggregate_csv, detail_csv, run_sweep, GridEntry};
use unigate::fsm::{export_pla, EncodingScheme};
use unigate::netlist::{
    assemble_fsm, export_blif, export_dot, parse_blif, random_stimuli, simulate_fsm, to_netlist,
    verify_netlist, NetlistError, SignalNames,
};

use crate::machine::{self, read};
use crate::{EncodeArgs, ExportArgs, SimArgs, SweepArgs, VerifyArgs, EXIT_OK, EXIT_VERIFY};

/// Print to stdout; a reader that has gone away (`| head`) is not an error.
fn emit(body: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(body.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_or_print(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => emit(body),
    }
}

pub fn verify(a: VerifyArgs) -> Result<u8> {
    let m = a.machine.load()?;
    let parsed =
        parse_blif(&read(&a.netlist)?).map_err(|e| anyhow!("{}: {e}", a.netlist.display()))?;
    let report = match verify_netlist(&parsed.netlist, &m.tt) {
        Ok(r) => r,
        Err(e @ NetlistError::MissingSignal { .. }) => {
            println!("FAIL interface {e}");
            return Ok(EXIT_VERIFY);
        }
        Err(e) => return Err(e.into()),
    };
    emit(&report.to_string())?;
    let mut ok = report.passed();
    if let Some(reset) = m.fsm.reset_state {
        for l in &parsed.latches {
            let Some(k) = l
                .output
                .strip_prefix('s')
                .and_then(|k| k.parse::<usize>().ok())
            else {
                continue;
            };
            if k < m.enc.width() && l.init != m.enc.bit(reset, k) {
                println!("FAIL reset {}", l.output);
                ok = false;
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

/// One input vector: a bit string of exactly `n` characters (in0 first) or a
/// decimal integer.
fn parse_vector(tok: &str, n: usize) -> Result<u32> {
    if n > 1 && tok.len() == n && tok.chars().all(|c| c == '0' || c == '1') {
        return Ok(u32::from_str_radix(tok, 2)?);
    }
    tok.parse()
        .map_err(|_| anyhow!("bad stimulus value {tok:?}"))
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn sim(a: SimArgs) -> Result<u8> {
    let m = a.machine.load()?;
    let net = parse_blif(&read(&a.netlist)?)
        .map_err(|e| anyhow!("{}: {e}", a.netlist.display()))?
        .into_fsm_netlist();
    let n_pi = m.fsm.num_inputs;
    if let Some(text) = &a.stimulus {
        let stim = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_vector(t, n_pi))
            .collect::<Result<Vec<_>>>()?;
        let rep = simulate_fsm(&net, &m.fsm, &m.enc, &stim)?;
        for (c, out) in rep.outputs.iter().enumerate() {
            let tag = if rep.unconstrained.contains(&c) {
                " unconstrained"
            } else {
                ""
            };
            println!(
                "cycle {c} in {:0w$b} out {}{tag}",
                stim[c],
                bits(out),
                w = n_pi.max(1)
            );
        }
        return Ok(match rep.divergence {
            None => {
                println!(
                    "PASS {} cycles, {} output bits compared",
                    rep.cycles, rep.compared
                );
                EXIT_OK
            }
            Some(d) => {
                println!("FAIL {d}");
                EXIT_VERIFY
            }
        });
    }
    let count = a
        .random
        .ok_or_else(|| anyhow!("give --stimulus or --random N"))?;
    let mut compared = 0;
    for (i, stim) in random_stimuli(n_pi, count, a.cycles, a.seed)
        .iter()
        .enumerate()
    {
        let rep = simulate_fsm(&net, &m.fsm, &m.enc, stim)?;
        compared += rep.compared;
        if let Some(d) = rep.divergence {
            println!("FAIL sequence {i} {d}");
            return Ok(EXIT_VERIFY);
        }
    }
    println!(
        "PASS {count}x{} cycles, {compared} output bits compared",
        a.cycles
    );
    Ok(EXIT_OK)
}

pub fn encode(a: EncodeArgs) -> Result<u8> {
    let m = a.machine.load()?;
    write_or_print(a.pla.as_deref(), &export_pla(&m.tt))?;
    eprint!("{}", m.enc);
    Ok(EXIT_OK)
}

pub fn export(a: ExportArgs) -> Result<u8> {
    let g: Genotype = read(&a.genotype)?
        .parse()
        .map_err(|e| anyhow!("{}: {e}", a.genotype.display()))?;
    let p = *g.params();
    let (blif, dot) = if a.kiss2.is_some() || a.builtin.is_some() {
        let fsm = machine::load_fsm(a.kiss2.as_deref(), a.builtin.as_deref())?;
        let m = machine::build(
            fsm,
            &machine::scheme(a.encoding, a.encoding_map.as_deref())?,
        )?;
        if (p.num_inputs, p.num_outputs) != (m.tt.num_vars(), m.tt.num_outs()) {
            bail!(
                "genotype has {} inputs and {} outputs, {} needs {} and {}",
                p.num_inputs,
                p.num_outputs,
                m.name,
                m.tt.num_vars(),
                m.tt.num_outs()
            );
        }
        let core = to_netlist(&g.decode(), &g, &SignalNames::for_table(&m.tt));
        let f = assemble_fsm(&core, &m.enc, &m.fsm)?;
        (export_blif(&f, &m.name), export_dot(&f, &m.name))
    } else {
        let n = p.num_inputs;
        let names = SignalNames {
            by_address: (0..n).map(|v| format!("in{}", n - 1 - v)).collect(),
            input_order: (0..n).rev().collect(),
            outputs: (0..p.num_outputs).map(|k| format!("out{k}")).collect(),
        };
        let core = to_netlist(&g.decode(), &g, &names);
        (export_blif(&core, "cgp"), export_dot(&core, "cgp"))
    };
    if a.blif.is_none() && a.dot.is_none() {
        emit(&blif)?;
    }
    if let Some(p) = &a.blif {
        write_or_print(Some(p), &blif)?;
    }
    if let Some(p) = &a.dot {
        write_or_print(Some(p), &dot)?;
    }
    Ok(EXIT_OK)
}

fn parse<T: std::str::FromStr>(text: &str, path: &Path, line: usize) -> Result<T> {
    text.parse()
        .map_err(|_| anyhow!("{}:{line}: bad value {text:?}", path.display()))
}

fn read_grid(path: &Path) -> Result<Vec<GridEntry>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("{}: missing column {name:?}", path.display()))
    };
    let cols = [
        col("benchmark")?,
        col("lambda")?,
        col("m")?,
        col("mu_r")?,
        col("seeds")?,
    ];
    let mut grid = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |c: usize| rec.get(cols[c]).unwrap_or("");
        grid.push(GridEntry {
            benchmark: field(0).to_string(),
            lambda: parse(field(1), path, line)?,
            m: parse(field(2), path, line)?,
            mu_r: parse(field(3), path, line)?,
            seeds: (1..=parse::<u64>(field(4), path, line)?).collect(),
        });
    }
    Ok(grid)
}

pub fn sweep(a: SweepArgs) -> Result<u8> {
    let grid = read_grid(&a.grid)?;
    let mut tables = BTreeMap::new();
    for e in &grid {
        if tables.contains_key(&e.benchmark) {
            continue;
        }
        let as_path = Path::new(&e.benchmark);
        let fsm = if e.benchmark.ends_with(".kiss2") || as_path.is_file() {
            machine::load_fsm(Some(as_path), None)?
        } else {
            machine::load_fsm(None, Some(&e.benchmark))?
        };
        let m = machine::build(fsm, &EncodingScheme::Natural)?;
        tables.insert(e.benchmark.clone(), m.tt);
    }
    let res = run_sweep(&tables, &grid, a.max_generations)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for (file, body) in [
        ("sweep_detail.csv", detail_csv(&res.rows)?),
        ("sweep_aggregate.csv", aggregate_csv(&res.aggregates)?),
    ] {
        let path = a.out_dir.join(file);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    for g in &res.aggregates {
        println!(
            "{} lambda={} m={} mu_r={}: solved {}/{}, min nodes {}",
            g.benchmark,
            g.lambda,
            g.m,
            g.mu_r,
            g.solved,
            g.runs,
            g.min_nodes.map_or("-".to_string(), |n| n.to_string())
        );
    }
    Ok(EXIT_OK)
}
