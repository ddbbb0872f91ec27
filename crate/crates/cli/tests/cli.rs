use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use unigate::fsm::bundled_kiss2;

fn unigate(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unigate"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// dk27 synthesized into `dir/out`.
fn synth_dk27(dir: &Path) -> Output {
    unigate(
        &[
            "synth",
            "--builtin",
            "dk27",
            "--m",
            "25",
            "--seed",
            "1",
            "--out-dir",
            "out",
        ],
        dir,
    )
}

#[test]
fn synth_then_verify_passes() {
    let dir = TempDir::new().unwrap();
    let o = synth_dk27(dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("seed 1\n"));
    for ext in ["cgp", "blif", "dot", "report.txt", "csv"] {
        assert!(
            dir.path().join(format!("out/dk27.{ext}")).is_file(),
            "{ext}"
        );
    }
    let report = fs::read_to_string(dir.path().join("out/dk27.report.txt")).unwrap();
    assert!(report.contains("solved true\n"));
    assert!(report.contains("oracles packed=0 scalar=0 netlist=0\n"));
    assert!(report.contains("cosim PASS"));
    let csv = fs::read_to_string(dir.path().join("out/dk27.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);

    let v = unigate(
        &["verify", "out/dk27.blif", "--builtin", "dk27"],
        dir.path(),
    );
    assert_eq!(code(&v), 0);
    assert_eq!(stdout(&v), "PASS\n");

    let s = unigate(
        &[
            "sim",
            "out/dk27.blif",
            "--builtin",
            "dk27",
            "--random",
            "20",
        ],
        dir.path(),
    );
    assert_eq!(code(&s), 0);
    assert!(stdout(&s).starts_with("PASS"));

    // the saved genotype exports to an equivalent netlist
    let e = unigate(
        &[
            "export",
            "out/dk27.cgp",
            "--builtin",
            "dk27",
            "--blif",
            "re.blif",
            "--dot",
            "re.dot",
        ],
        dir.path(),
    );
    assert_eq!(code(&e), 0);
    assert_eq!(
        fs::read_to_string(dir.path().join("re.blif")).unwrap(),
        fs::read_to_string(dir.path().join("out/dk27.blif")).unwrap()
    );
    assert!(dir.path().join("re.dot").is_file());
}

#[test]
fn verify_against_other_machine_fails() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&synth_dk27(dir.path())), 0);
    // same interface, one output bit flipped on the first transition
    let text = bundled_kiss2("dk27").unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines
        .iter()
        .position(|l| l.split_whitespace().count() == 4 && !l.starts_with(['.', '#']))
        .unwrap();
    let mut fields: Vec<String> = lines[i].split_whitespace().map(String::from).collect();
    fields[3] = fields[3]
        .chars()
        .map(|c| match c {
            '0' => '1',
            '1' => '0',
            c => c,
        })
        .collect();
    lines[i] = fields.join(" ");
    fs::write(dir.path().join("other.kiss2"), lines.join("\n") + "\n").unwrap();

    let v = unigate(&["verify", "out/dk27.blif", "other.kiss2"], dir.path());
    assert_eq!(code(&v), 3);
    let out = stdout(&v);
    assert!(out.lines().all(|l| l.starts_with("FAIL ")), "{out}");
    assert!(out
        .lines()
        .any(|l| l.ends_with(" out0") || l.ends_with(" out1")));
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = unigate(&["synth", "missing.kiss2", "--m", "5"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.kiss2"));

    fs::write(
        dir.path().join("bad.kiss2"),
        ".i 1\n.o 1\n0 A B 1\n01 B A 0\n",
    )
    .unwrap();
    let o = unigate(&["synth", "bad.kiss2", "--m", "5"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let o = unigate(
        &["synth", "--builtin", "10101", "--m", "5", "--mu", "0.05"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    let o = unigate(&["synth", "--builtin", "10101"], dir.path());
    assert_eq!(code(&o), 1, "--m is required");
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = unigate(
        &[
            "synth",
            "--builtin",
            "lion9",
            "--m",
            "3",
            "--seed",
            "4",
            "--max-generations",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("lion9.report.txt").is_file());
}

#[test]
fn repeat_reports_every_seed() {
    let dir = TempDir::new().unwrap();
    let o = unigate(
        &[
            "synth",
            "--builtin",
            "10101",
            "--m",
            "25",
            "--seed",
            "5",
            "--repeat",
            "3",
            "--max-generations",
            "300",
            "--jobs",
            "1",
        ],
        dir.path(),
    );
    assert!(matches!(code(&o), 0 | 2));
    let csv = fs::read_to_string(dir.path().join("10101.csv")).unwrap();
    let seeds: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(seeds, ["5", "6", "7"]);
}

#[test]
fn encode_dk27() {
    let dir = TempDir::new().unwrap();
    let o = unigate(
        &["encode", "--builtin", "dk27", "--pla", "dk27.pla"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let pla = fs::read_to_string(dir.path().join("dk27.pla")).unwrap();
    assert!(pla.starts_with(".i 4\n.o 5\n"));
    assert!(pla.ends_with(".e\n"));
}

#[test]
fn single_cell_sweep() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("grid.csv"),
        "benchmark,lambda,m,mu_r,seeds\ndk27,4,25,10,3\n",
    )
    .unwrap();
    let o = unigate(
        &[
            "sweep",
            "grid.csv",
            "--out-dir",
            "res",
            "--max-generations",
            "2000",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let detail = fs::read_to_string(dir.path().join("res/sweep_detail.csv")).unwrap();
    assert_eq!(detail.lines().count(), 4);
    let agg = fs::read_to_string(dir.path().join("res/sweep_aggregate.csv")).unwrap();
    assert_eq!(agg.lines().count(), 2);
    assert!(agg.lines().nth(1).unwrap().starts_with("dk27,4,25,10,3,"));
}

#[test]
fn unknown_benchmark_fails_before_running() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("grid.csv"),
        "benchmark,lambda,m,mu_r,seeds\ndk27,4,25,10,3\nnot-a-machine,4,25,10,3\n",
    )
    .unwrap();
    let o = unigate(&["sweep", "grid.csv", "--out-dir", "res"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not-a-machine"));
    assert!(!dir.path().join("res").exists());

    fs::write(
        dir.path().join("bad.csv"),
        "benchmark,lambda,m,mu_r,seeds\ndk27,4.5,25,10,3\n",
    )
    .unwrap();
    assert_eq!(code(&unigate(&["sweep", "bad.csv"], dir.path())), 1);
}

#[test]
fn bundled_grid_has_eighty_runs() {
    let grid = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../grids/lambda_sweep.csv"
    ))
    .unwrap();
    let seeds: u32 = grid
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u32>().unwrap())
        .sum();
    assert_eq!(seeds, 80);
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let run = |out: &str| {
        let o = unigate(
            &[
                "synth",
                "--builtin",
                "dk27",
                "--m",
                "25",
                "--lambda",
                "8",
                "--seed",
                "7",
                "--out-dir",
                out,
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0);
    };
    run("a");
    run("b");
    let read = |d: &str, ext: &str| {
        fs::read_to_string(dir.path().join(format!("{d}/dk27.{ext}"))).unwrap()
    };
    for ext in ["cgp", "blif", "dot"] {
        assert_eq!(read("a", ext), read("b", ext), "{ext}");
    }
    let timeless = |s: String| -> String {
        s.lines()
            .filter(|l| !l.starts_with("wall_time_s"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(
        timeless(read("a", "report.txt")),
        timeless(read("b", "report.txt"))
    );
}
