use std::fmt::Write as _;
use std::fs;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use unigate::cgp::CgpParams;
use unigate::eval::evaluate_scalar;
use unigate::evolve::{detail_csv, evolve, EvolutionReport, EvolveConfig, SweepRow};
use unigate::netlist::{
    assemble_fsm, export_blif, export_dot, parse_blif, random_stimuli, simulate_fsm, to_netlist,
    verify_netlist, SignalNames,
};

use crate::machine::Machine;
use crate::{SynthArgs, EXIT_BUDGET, EXIT_OK, EXIT_VERIFY};

const SIM_SEQUENCES: usize = 100;
const SIM_CYCLES: usize = 50;

fn clock_seed() -> u64 {
    let t = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(1);
    t.max(1)
}

fn encoding_label(a: &SynthArgs) -> String {
    match &a.machine.encoding_map {
        Some(p) => format!("map {}", p.display()),
        None => format!("{:?}", a.machine.encoding).to_lowercase(),
    }
}

fn row(bench: &str, r: &EvolutionReport) -> SweepRow {
    let p = r.final_genotype.params();
    SweepRow {
        benchmark: bench.to_string(),
        lambda: r.config.lambda,
        m: p.columns,
        mu_r: p.mutation_rate,
        seed: r.config.seed,
        solved: r.solved,
        generations: r.generations_used,
        evaluations: r.evaluations,
        active_nodes: r.active_nodes,
        wall_time_s: r.wall_time.as_secs_f64(),
    }
}

pub fn run(a: SynthArgs) -> Result<u8> {
    let mach: Machine = a.machine.load()?;
    if a.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let tt = &mach.tt;
    let params =
        CgpParams::new(tt.num_vars(), tt.num_outs(), a.m, a.mu)?.with_mode(a.mutation.into());
    let seed = if a.seed == 0 { clock_seed() } else { a.seed };
    println!("seed {seed}");

    let seeds: Vec<u64> = (0..a.repeat).map(|i| seed.wrapping_add(i)).collect();
    let runs = seeds
        .par_iter()
        .map(|&s| {
            evolve(
                tt,
                params,
                EvolveConfig::new(a.lambda, a.max_generations, s),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by_key(|(i, r)| {
            let size = if r.solved {
                r.active_nodes as u64
            } else {
                r.final_fitness.mismatches
            };
            (!r.solved, size, *i)
        })
        .map(|(_, r)| r)
        .expect("at least one run");

    let g = &best.final_genotype;
    let core = to_netlist(&g.decode(), g, &SignalNames::for_table(tt));
    let machine = assemble_fsm(&core, &mach.enc, &mach.fsm)?;
    let stem = a.name.clone().unwrap_or_else(|| mach.name.clone());
    let blif = export_blif(&machine, &stem);

    // Three independent evaluations of the same genotype must agree, and the
    // written BLIF must read back to the same verdict.
    let packed = best.final_fitness.mismatches;
    let scalar = evaluate_scalar(g, tt)?.mismatches;
    let verdict = verify_netlist(&core, tt)?;
    let reread = verify_netlist(&parse_blif(&blif)?.netlist, tt)?;
    let mut consistent = packed == scalar && scalar == verdict.mismatches() && verdict == reread;

    let mut cosim = String::from("skipped");
    if best.solved && consistent {
        let reread = parse_blif(&blif)?.into_fsm_netlist();
        let stimuli = random_stimuli(
            mach.fsm.num_inputs,
            SIM_SEQUENCES,
            SIM_CYCLES,
            best.config.seed,
        );
        cosim = format!("PASS {SIM_SEQUENCES}x{SIM_CYCLES}");
        for stim in &stimuli {
            let rep = simulate_fsm(&reread, &mach.fsm, &mach.enc, stim)?;
            if let Some(d) = rep.divergence {
                cosim = format!("FAIL {d}");
                consistent = false;
                break;
            }
        }
    }

    let mut report = String::new();
    writeln!(report, "benchmark {}", mach.name)?;
    writeln!(report, "encoding {}", encoding_label(&a))?;
    for (i, s) in mach.fsm.states.iter().enumerate() {
        writeln!(
            report,
            "state {s} {:0w$b}",
            mach.enc.code(i),
            w = mach.enc.width()
        )?;
    }
    report.push_str(&best.to_text(true));
    writeln!(report, "gates {}", core.gate_count())?;
    writeln!(
        report,
        "transistors_estimate {}",
        core.transistor_estimate()
    )?;
    writeln!(
        report,
        "oracles packed={packed} scalar={scalar} netlist={}",
        verdict.mismatches()
    )?;
    writeln!(report, "cosim {cosim}")?;
    if runs.len() > 1 {
        for r in &runs {
            writeln!(
                report,
                "run seed={} solved={} nodes={} generations={}",
                r.config.seed, r.solved, r.active_nodes, r.generations_used
            )?;
        }
    }

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let rows: Vec<SweepRow> = runs.iter().map(|r| row(&mach.name, r)).collect();
    let files = [
        ("cgp", g.to_string()),
        ("blif", blif),
        ("dot", export_dot(&machine, &stem)),
        ("report.txt", report),
        ("csv", detail_csv(&rows)?),
    ];
    for (ext, body) in files {
        let path = a.out_dir.join(format!("{stem}.{ext}"));
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }

    println!(
        "{}: {} after {} generations ({} evaluations), seed {}",
        mach.name,
        if best.solved {
            "solved"
        } else {
            "budget exhausted"
        },
        best.generations_used,
        best.evaluations,
        best.config.seed
    );
    println!(
        "gates {} (about {} transistors), mismatches {}",
        core.gate_count(),
        core.transistor_estimate(),
        packed
    );
    if !consistent {
        eprintln!(
            "verification failed: packed={packed} scalar={scalar} netlist={} cosim {cosim}",
            verdict.mismatches()
        );
        return Ok(EXIT_VERIFY);
    }
    Ok(if best.solved { EXIT_OK } else { EXIT_BUDGET })
}
