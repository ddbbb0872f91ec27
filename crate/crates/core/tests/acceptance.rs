//! Acceptance suite. Each criterion prints one `[PASS]` or `[FAIL]` line
//! straight to stdout (visible without `--nocapture`) and then asserts.
//!
//! Run with `cargo test -p unigate --test acceptance`.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use unigate::cgp::{CgpParams, Genotype, MutationMode};
use unigate::eval::{evaluate, evaluate_scalar, pack_table};
use unigate::evolve::{
    aggregate_csv, detail_csv, evolve, run_sweep, EvolutionReport, EvolveConfig, GridEntry,
    AGGREGATE_HEADER, DETAIL_HEADER,
};
use unigate::fsm::{
    build_truth_table, encode_states, load_benchmark, EncodingScheme, Fsm, StateEncoding,
    TruthTable,
};
use unigate::netlist::{
    assemble_fsm, export_blif, export_dot, parse_blif, random_stimuli, reduction_percent,
    simulate_fsm, to_netlist, verify_netlist, FsmNetlist, GateNetlist, SignalNames,
};
use unigate::rng::{below, seeded};

const BUDGET: u64 = 5_000_000;
const SEEDS: u64 = 10;

fn verdict(id: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let line = format!("[{tag}] {id} {detail}\n");
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(ok, "{id} {detail}");
}

struct Bench {
    fsm: Fsm,
    enc: StateEncoding,
    tt: TruthTable,
}

fn bench(name: &str) -> Bench {
    let fsm = load_benchmark(name).unwrap();
    let enc = encode_states(&fsm, &EncodingScheme::Natural).unwrap();
    let tt = build_truth_table(&fsm, &enc);
    Bench { fsm, enc, tt }
}

struct Batch {
    bench: Bench,
    runs: Vec<EvolutionReport>,
    elapsed: Duration,
}

impl Batch {
    fn solved(&self) -> usize {
        self.runs.iter().filter(|r| r.solved).count()
    }

    fn best(&self) -> Option<usize> {
        self.runs
            .iter()
            .filter(|r| r.solved)
            .map(|r| r.active_nodes)
            .min()
    }
}

fn batch(name: &str, lambda: usize, m: usize) -> Batch {
    let b = bench(name);
    let p = CgpParams::new(b.tt.num_vars(), b.tt.num_outs(), m, 10.0).unwrap();
    let start = Instant::now();
    let runs = (1..=SEEDS)
        .map(|s| evolve(&b.tt, p, EvolveConfig::new(lambda, BUDGET, s)).unwrap())
        .collect();
    Batch {
        bench: b,
        runs,
        elapsed: start.elapsed(),
    }
}

fn dk27() -> &'static [Batch; 2] {
    static CELL: OnceLock<[Batch; 2]> = OnceLock::new();
    CELL.get_or_init(|| [batch("dk27", 4, 25), batch("dk27", 8, 25)])
}

fn detectors() -> &'static [Batch; 2] {
    static CELL: OnceLock<[Batch; 2]> = OnceLock::new();
    CELL.get_or_init(|| [batch("10101", 4, 25), batch("0001000", 4, 25)])
}

/// Every solved run with the machine it implements.
fn solved_artifacts() -> Vec<(&'static Bench, &'static EvolutionReport)> {
    dk27()
        .iter()
        .chain(detectors().iter())
        .flat_map(|b| {
            b.runs
                .iter()
                .filter(|r| r.solved)
                .map(move |r| (&b.bench, r))
        })
        .collect()
}

fn netlists(b: &Bench, g: &Genotype) -> (GateNetlist, FsmNetlist) {
    let core = to_netlist(&g.decode(), g, &SignalNames::for_table(&b.tt));
    let machine = assemble_fsm(&core, &b.enc, &b.fsm).unwrap();
    (core, machine)
}

#[test]
fn c1_dk27_replication() {
    let [l4, l8] = dk27();
    let total = l4.elapsed + l8.elapsed;
    let best = l4.best().into_iter().chain(l8.best()).min();
    let ok = l4.solved() >= 8
        && l8.solved() >= 8
        && best.is_some_and(|b| b <= 22)
        && total < Duration::from_secs(600);
    verdict(
        "C1",
        ok,
        &format!(
            "dk27 m=25: solved {}/10 (lambda 4), {}/10 (lambda 8); best gates {} / {} (limit 22); {:.1}s (limit 600)",
            l4.solved(),
            l8.solved(),
            l4.best().map_or("-".into(), |b| b.to_string()),
            l8.best().map_or("-".into(), |b| b.to_string()),
            total.as_secs_f64()
        ),
    );
}

#[test]
fn c2_detector_replication() {
    let [d10101, d0001000] = detectors();
    let ok = d10101.solved() >= 9
        && d10101.best().is_some_and(|b| b <= 23)
        && d0001000.best().is_some_and(|b| b <= 27);
    verdict(
        "C2",
        ok,
        &format!(
            "10101: solved {}/10, best {:?} (limit 23); 0001000: solved {}/10, best {:?} (limit 27)",
            d10101.solved(),
            d10101.best(),
            d0001000.solved(),
            d0001000.best()
        ),
    );
}

#[test]
fn c3_reduction_arithmetic() {
    let table = [
        (23, 18, 21.73),
        (25, 19, 24.0),
        (31, 22, 29.03),
        (38, 26, 31.57),
        (62, 43, 30.64),
        (124, 79, 36.29),
        (23, 19, 17.39),
        (27, 18, 33.33),
        (30, 20, 33.33),
        (42, 20, 52.38),
    ];
    let bad: Vec<_> = table
        .iter()
        .filter(|(b, c, want)| (reduction_percent(*b, *c).unwrap() - want).abs() > 0.01 + 1e-9)
        .collect();
    verdict(
        "C3",
        bad.is_empty(),
        &format!("{} pairs, mismatched {bad:?}", table.len()),
    );
}

fn oracle_counts(g: &Genotype, tt: &TruthTable) -> (u64, u64, u64) {
    let packed = evaluate(g, &pack_table(tt).unwrap()).unwrap().mismatches;
    let scalar = evaluate_scalar(g, tt).unwrap().mismatches;
    let n = to_netlist(&g.decode(), g, &SignalNames::for_table(tt));
    (packed, scalar, verify_netlist(&n, tt).unwrap().mismatches())
}

#[test]
fn c4_oracle_equivalence() {
    let mut rng = seeded(2024);
    let mut disagree = 0;
    for _ in 0..1000 {
        let nv = 1 + below(&mut rng, 10) as usize;
        let n_s = below(&mut rng, nv as u32) as usize;
        let n_po = 1 + below(&mut rng, 6) as usize;
        let mut tt = TruthTable::new(nv - n_s, n_s, n_po);
        let n_o = tt.num_outs();
        for row in 0..tt.rows() {
            for c in 0..n_o {
                let v = match below(&mut rng, 3) {
                    0 => None,
                    1 => Some(false),
                    _ => Some(true),
                };
                tt.set(row, c, v);
            }
        }
        let m = below(&mut rng, 60) as usize;
        let g = Genotype::random(CgpParams::new(nv, n_o, m, 10.0).unwrap(), &mut rng);
        let (a, b, c) = oracle_counts(&g, &tt);
        disagree += usize::from(a != b || b != c);
    }
    let artifacts = solved_artifacts();
    for (bench, r) in &artifacts {
        let (a, b, c) = oracle_counts(&r.final_genotype, &bench.tt);
        disagree += usize::from(a != 0 || b != 0 || c != 0);
    }
    verdict(
        "C4",
        disagree == 0,
        &format!(
            "1000 random genotypes + {} solved artifacts, {disagree} disagreements",
            artifacts.len()
        ),
    );
}

fn reachable(g: &Genotype) -> Vec<usize> {
    let n_i = g.params().num_inputs;
    let mut seen = vec![false; g.nodes().len()];
    let mut work: Vec<u32> = g.outputs().to_vec();
    while let Some(a) = work.pop() {
        let a = a as usize;
        if a < n_i || seen[a - n_i] {
            continue;
        }
        seen[a - n_i] = true;
        work.extend(g.nodes()[a - n_i].inputs);
    }
    (0..seen.len()).filter(|&j| seen[j]).collect()
}

fn all_outputs(g: &Genotype, tt: &TruthTable) -> Vec<bool> {
    let n = to_netlist(&g.decode(), g, &SignalNames::for_table(tt));
    let mut inputs = vec![false; n.inputs.len()];
    let slots: Vec<usize> = (0..tt.num_vars())
        .map(|v| n.input_index(&tt.var_name(v)).unwrap())
        .collect();
    let mut out = Vec::new();
    for row in 0..tt.rows() {
        for (v, &s) in slots.iter().enumerate() {
            inputs[s] = (row >> v) & 1 == 1;
        }
        out.extend(n.eval(&inputs));
    }
    out
}

#[test]
fn c5_structural_properties() {
    let mut rng = seeded(99);
    let mut violations = 0;
    for mode in [MutationMode::Redraw, MutationMode::Strict] {
        let p = CgpParams::new(7, 5, 40, 10.0).unwrap().with_mode(mode);
        let mut g = Genotype::random(p, &mut rng);
        for _ in 0..100_000 {
            g.mutate_in_place(&mut rng);
            violations += usize::from(g.validate().is_err());
        }
    }

    let mut decode_errors = 0;
    for i in 0..5000 {
        let m = i % 11;
        let p = CgpParams::new(1 + i % 4, 1 + i % 3, m, 10.0).unwrap();
        let g = Genotype::random(p, &mut rng);
        decode_errors += usize::from(g.decode().active != reachable(&g));
    }

    let mut neutral_changes = 0;
    let tt = TruthTable::from_fn(6, 3, |r, c| (r * 5 + c) % 7 < 3);
    for _ in 0..500 {
        let p = CgpParams::new(6, 3, 30, 10.0).unwrap();
        let g = Genotype::random(p, &mut rng);
        let mut mask = Vec::new();
        g.active_mask_into(&mut mask);
        let mut h = g.clone();
        for j in (0..mask.len()).filter(|&j| !mask[j]) {
            for idx in 3 * j..3 * j + 3 {
                let r = p.gene_range(idx);
                h.set_gene(idx, r.start + below(&mut rng, r.end - r.start));
            }
        }
        neutral_changes += usize::from(all_outputs(&g, &tt) != all_outputs(&h, &tt));
    }

    verdict(
        "C5",
        violations == 0 && decode_errors == 0 && neutral_changes == 0,
        &format!(
            "2x100000 mutations: {violations} gene violations; 5000 decodes (m<=10): {decode_errors} errors; 500 neutral rewrites: {neutral_changes} output changes"
        ),
    );
}

#[test]
fn c6_sequential_soundness() {
    let artifacts = solved_artifacts();
    let mut divergent = 0;
    let mut compared = 0;
    for (i, (bench, r)) in artifacts.iter().enumerate() {
        let (_, machine) = netlists(bench, &r.final_genotype);
        let reread = parse_blif(&export_blif(&machine, &bench.fsm.name))
            .unwrap()
            .into_fsm_netlist();
        for stim in random_stimuli(bench.fsm.num_inputs, 100, 50, i as u64) {
            let rep = simulate_fsm(&reread, &bench.fsm, &bench.enc, &stim).unwrap();
            compared += rep.compared;
            divergent += usize::from(!rep.passed());
        }
    }
    verdict(
        "C6",
        divergent == 0 && !artifacts.is_empty(),
        &format!(
            "{} solved artifacts x 100 sequences x 50 cycles, {compared} outputs compared, {divergent} divergent sequences",
            artifacts.len()
        ),
    );
}

fn run_files(b: &Bench, seed: u64) -> [String; 4] {
    let p = CgpParams::new(b.tt.num_vars(), b.tt.num_outs(), 25, 10.0).unwrap();
    let r = evolve(&b.tt, p, EvolveConfig::new(8, BUDGET, seed)).unwrap();
    let (_, machine) = netlists(b, &r.final_genotype);
    [
        r.to_text(false),
        r.final_genotype.to_string(),
        export_blif(&machine, "dk27"),
        export_dot(&machine, "dk27"),
    ]
}

#[test]
fn c7_determinism() {
    let b = bench("dk27");
    let first = run_files(&b, 7);
    let second = run_files(&b, 7);
    let same: Vec<bool> = first.iter().zip(&second).map(|(a, b)| a == b).collect();
    verdict(
        "C7",
        same.iter().all(|&s| s),
        &format!("dk27 seed 7 run twice; report/genotype/BLIF/DOT identical: {same:?}"),
    );
}

#[test]
fn c8_lambda_sweep_csv() {
    const CI_BUDGET: u64 = 20_000;
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../grids/lambda_sweep.csv"
    ))
    .unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let grid: Vec<GridEntry> = reader
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            GridEntry {
                benchmark: rec[0].to_string(),
                lambda: rec[1].parse().unwrap(),
                m: rec[2].parse().unwrap(),
                mu_r: rec[3].parse().unwrap(),
                seeds: (1..=rec[4].parse::<u64>().unwrap()).collect(),
            }
        })
        .collect();
    let tables: BTreeMap<String, TruthTable> = grid
        .iter()
        .map(|e| (e.benchmark.clone(), bench(&e.benchmark).tt))
        .collect();
    let res = run_sweep(&tables, &grid, CI_BUDGET).unwrap();
    let detail = detail_csv(&res.rows).unwrap();
    let agg = aggregate_csv(&res.aggregates).unwrap();

    let parse = |s: &str| -> (Vec<String>, Vec<Vec<String>>) {
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let h = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|x| x.unwrap().iter().map(String::from).collect())
            .collect();
        (h, rows)
    };
    let (dh, drows) = parse(&detail);
    let (ah, arows) = parse(&agg);
    let evals_consistent = res
        .rows
        .iter()
        .all(|r| r.evaluations == r.generations * r.lambda as u64);
    let ok = dh == DETAIL_HEADER
        && ah == AGGREGATE_HEADER
        && drows.len() == 80
        && drows.iter().all(|r| r.len() == DETAIL_HEADER.len())
        && arows.len() == 8
        && arows.iter().all(|r| r.len() == AGGREGATE_HEADER.len())
        && evals_consistent;
    let summary: Vec<String> = res
        .aggregates
        .iter()
        .map(|a| format!("{}/l{}={}/{}", a.benchmark, a.lambda, a.solved, a.runs))
        .collect();
    verdict(
        "C8",
        ok,
        &format!(
            "{} detail rows, {} aggregate rows at {CI_BUDGET} generations; solved {}",
            drows.len(),
            arows.len(),
            summary.join(" ")
        ),
    );
}
