use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use switched_consensus::Schedule;
use tempfile::TempDir;

fn swcons(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swcons"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: TempDir::new().unwrap(),
        };
        ws.file("k2.txt", "n 2 undirected\nedge 1 2 1\n");
        ws.file("k3.txt", "n 3 undirected\nedge 1 2 1\nedge 1 3 1\nedge 2 3 1\n");
        ws.file("cycle.txt", "n 3 directed\nedge 1 2 1\nedge 2 3 1\nedge 3 1 1\n");
        ws.file("lf.txt", "# agent 2 hears agent 1\nn 2 directed\nedge 2 1 1\n");
        ws.file("split.txt", "n 3 undirected\nedge 1 2 1\n");
        ws.file("star.txt", "n 4 undirected\nedge 1 2 1\nedge 1 3 1\nedge 1 4 1\n");
        ws.file("path.txt", "n 4 undirected\nedge 1 2 1\nedge 2 3 1\nedge 3 4 1\n");
        ws
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.dir.path().join(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        swcons(args, self.path())
    }
}

/// Value of `key = value` in a report block.
fn field(text: &str, key: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = ").map(str::to_string))
}

fn number(text: &str, key: &str) -> f64 {
    field(text, key)
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn certify_k2() {
    let ws = Workspace::new();
    let out = ws.run(&["certify", "--topology", "a=k2.txt", "--out", "rep"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = ws.read("rep/certificate-a.txt");
    assert_eq!(number(&text, "h_max"), 1.0);
    assert_eq!(number(&text, "h"), 0.9);
    assert_eq!(field(&text, "regime").unwrap(), "undirected-fixed");
    assert_eq!(field(&text, "consensus_value_rule").unwrap(), "average");
    let json = ws.read("rep/certificate-a.json");
    assert!(json.contains("\"h_max\": 1.0"), "{json}");
    assert_eq!(stdout(&out), format!("[certificate-a]\n{text}"));
}

#[test]
fn certify_directed_cycle() {
    let ws = Workspace::new();
    let out = ws.run(&["certify", "--topology", "c=cycle.txt"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!((number(&text, "h_max") - 1.0).abs() < 1e-12);
    assert_eq!(field(&text, "consensus_value_rule").unwrap(), "w-weighted");
    assert_eq!(field(&text, "regime").unwrap(), "directed-fixed");
}

#[test]
fn certify_switching_and_nonlinear_sets() {
    let ws = Workspace::new();
    let topo = ["--topology", "s=star.txt", "--topology", "p=path.txt"];
    let mut args = vec!["certify"];
    args.extend(topo);
    args.extend(["--out", "rep"]);
    let out = ws.run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let set = ws.read("rep/certificate-switching.txt");
    assert!((number(&set, "h_max") - 0.5).abs() < 1e-12);
    assert!(ws.path().join("rep/certificate-s.txt").exists());
    assert!(ws.path().join("rep/certificate-p.json").exists());

    let mut args = vec!["certify", "--protocol", "nonlinear", "--gamma1", "1", "--gamma2", "2"];
    args.extend(topo);
    let out = ws.run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "regime").unwrap(), "nonlinear-switching");
    assert!((number(&text, "h_max") - 0.125).abs() < 1e-12);
}

#[test]
fn certify_disconnected_is_a_hypothesis_failure() {
    let ws = Workspace::new();
    let out = ws.run(&["certify", "--topology", "s=split.txt"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not connected"), "{}", stderr(&out));
}

#[test]
fn certify_rejects_h_beyond_the_bound() {
    let ws = Workspace::new();
    let out = ws.run(&["certify", "--topology", "k=k3.txt", "--h", "0.7"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn malformed_files_report_line_numbers() {
    let ws = Workspace::new();
    ws.file("bad.txt", "n 3 undirected\n# fine\nedge 1 2 heavy\n");
    let out = ws.run(&["certify", "--topology", "b=bad.txt"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("bad.txt") && err.contains("line 3"), "{err}");

    ws.file("bad-schedule.txt", "ct 1.0 a\nwarp 3 a\n");
    let out = ws.run(&[
        "simulate", "--topology", "a=k2.txt", "--schedule", "bad-schedule.txt", "--x0", "0,1",
        "--out", "o",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = ws.run(&["certify", "--topology", "a=missing.txt"]);
    assert_eq!(code(&out), 1);
    let out = ws.run(&["certify", "--topology", "no-equals-sign"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_with_input_status() {
    let ws = Workspace::new();
    assert_eq!(code(&ws.run(&["simulate", "--bogus"])), 1);
    assert_eq!(code(&ws.run(&["--help"])), 0);
    let out = ws.run(&["simulate", "--topology", "a=k2.txt", "--x0", "1,2,3", "--out", "o"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn simulate_k2_auto_h_reaches_the_average() {
    let ws = Workspace::new();
    let out = ws.run(&["simulate", "--topology", "a=k2.txt", "--x0", "0,2", "--seed", "7", "--out", "run"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let verdict = ws.read("run/verdict.txt");
    assert_eq!(field(&verdict, "reached").unwrap(), "true");
    assert_eq!(number(&verdict, "h"), 0.9);
    assert!((number(&verdict, "achieved_value") - 1.0).abs() < 1e-6);
    assert_eq!(ws.read("run/schedule.txt").lines().count(), 10);

    let traj = ws.read("run/trajectory.csv");
    assert!(traj.starts_with("t,mode,topology,x1,x2\n0,"), "{traj}");
    let dis = ws.read("run/disagreement.csv");
    assert!(dis.starts_with("t,c,V\n0,1,2\n"), "{dis}");
    assert_eq!(traj.lines().count(), dis.lines().count());
}

#[test]
fn simulate_leader_follower_reaches_the_leader() {
    let ws = Workspace::new();
    let out = ws.run(&["simulate", "--topology", "l=lf.txt", "--x0", "5,-3", "--seed", "3", "--out", "run"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let verdict = ws.read("run/verdict.txt");
    assert_eq!(field(&verdict, "reached").unwrap(), "true");
    assert!((number(&verdict, "achieved_value") - 5.0).abs() < 1e-6);
    assert_eq!(number(&verdict, "predicted_value"), 5.0);
}

#[test]
fn simulate_k3_beyond_the_bound_does_not_converge() {
    let ws = Workspace::new();
    ws.file("dt.txt", "dt 30 k\n");
    let out = ws.run(&[
        "simulate", "--topology", "k=k3.txt", "--schedule", "dt.txt", "--h", "0.7", "--x0",
        "1,0,-1", "--out", "run",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let verdict = ws.read("run/verdict.txt");
    assert_eq!(field(&verdict, "reached").unwrap(), "false");
    assert!(number(&verdict, "estimated_rate") < 0.0);
}

#[test]
fn divergence_to_overflow_is_a_numerical_failure() {
    let ws = Workspace::new();
    ws.file("dt.txt", "dt 2000 k\n");
    let out = ws.run(&[
        "simulate", "--topology", "k=k3.txt", "--schedule", "dt.txt", "--h", "10", "--x0",
        "1,0,-1", "--out", "run",
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("non-finite"), "{}", stderr(&out));
}

#[test]
fn auto_h_needs_a_certifiable_regime() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "simulate", "--topology", "a=cycle.txt", "--topology", "b=cycle.txt", "--x0", "seed:1",
        "--out", "run",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn nonlinear_simulation_keeps_the_average() {
    let ws = Workspace::new();
    let out = ws.run(&[
        "simulate", "--protocol", "nonlinear", "--topology", "s=star.txt", "--topology",
        "p=path.txt", "--x0", "seed:4", "--seed", "4", "--segments", "20", "--out", "run",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let verdict = ws.read("run/verdict.txt");
    assert_eq!(field(&verdict, "reached").unwrap(), "true");
    let err = (number(&verdict, "achieved_value") - number(&verdict, "predicted_value")).abs();
    assert!(err < 1e-5, "{verdict}");
}

#[test]
fn simulate_is_deterministic() {
    let ws = Workspace::new();
    let args = |dir: &'static str| {
        vec![
            "simulate", "--topology", "k=k3.txt", "--x0", "seed:11", "--x0-range", "-2,2",
            "--seed", "11", "--out", dir,
        ]
    };
    assert_eq!(code(&ws.run(&args("one"))), 0);
    assert_eq!(code(&ws.run(&args("two"))), 0);
    for f in ["trajectory.csv", "disagreement.csv", "verdict.txt", "schedule.txt"] {
        assert_eq!(ws.read(&format!("one/{f}")), ws.read(&format!("two/{f}")), "{f}");
    }
    let first = ws.read("one/trajectory.csv");
    let x0: Vec<f64> = first.lines().nth(1).unwrap().split(',').skip(3).map(|v| v.parse().unwrap()).collect();
    assert!(x0.iter().all(|v| (-2.0..=2.0).contains(v)), "{x0:?}");
}

#[test]
fn random_schedule_is_reproducible() {
    let ws = Workspace::new();
    let args = |out: &'static str| vec!["random-schedule", "--seed", "5", "--segments", "12", "--ids", "a,b", "--out", out];
    assert_eq!(code(&ws.run(&args("one.txt"))), 0);
    assert_eq!(code(&ws.run(&args("two.txt"))), 0);
    let one = ws.read("one.txt");
    assert_eq!(one, ws.read("two.txt"));
    let parsed = Schedule::parse(&one).unwrap();
    assert_eq!(parsed.segments().len(), 12);
    assert_eq!(parsed.to_text(), one);

    let out = ws.run(&["random-schedule", "--seed", "0", "--segments", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn random_schedules_mix_both_modes() {
    let ws = Workspace::new();
    for seed in 0..40u64 {
        let seed = seed.to_string();
        let out = ws.run(&["random-schedule", "--seed", &seed, "--segments", "20"]);
        assert_eq!(code(&out), 0);
        let s = Schedule::parse(&stdout(&out)).unwrap();
        assert!(s.ct_time() > 0.0 && s.dt_steps() > 0, "seed {seed}");
    }
}
