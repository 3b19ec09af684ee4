use std::path::{Path, PathBuf};

use locglob_cli::error::{EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_VALIDATION};
use locglob_cli::run;
use serde_json::Value;

fn locglob(args: &[&str]) -> i32 {
    run(std::iter::once("locglob").chain(args.iter().copied()))
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn gen(&self, name: &str, family: &str, n: usize, copies: usize) {
        let code = locglob(&[
            "gen", "--family", family, "--n", &n.to_string(), "--copies", &copies.to_string(),
            "--graph-out", &self.s(name), "--out", &self.s(&format!("{name}.gen.json")),
        ]);
        assert_eq!(code, EXIT_OK);
    }
}

#[test]
fn stats_on_a_cycle_has_one_ball() {
    let d = Dir::new();
    d.gen("c6.txt", "cycle", 6, 1);
    let tsv = d.s("c6.tsv");
    assert_eq!(
        locglob(&["stats", "--graph", &d.s("c6.txt"), "--r", "1", "--tsv", &tsv, "--out", &d.s("s.json")]),
        EXIT_OK
    );
    let report = read(&d.path("s.json"));
    let balls = report["result"]["distribution"]["balls"].as_array().unwrap();
    assert_eq!(balls.len(), 1);
    assert_eq!(balls[0]["prob"], 1.0);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["inputs"].as_object().unwrap().len(), 1);
    assert_eq!(std::fs::read_to_string(tsv).unwrap().lines().count(), 1);
}

#[test]
fn dist_separates_c8_from_two_c4() {
    let d = Dir::new();
    d.gen("c8.txt", "cycle", 8, 1);
    d.gen("c4c4.txt", "cycle", 4, 2);
    let out = d.s("dist.json");
    assert_eq!(
        locglob(&["dist", "--mode", "exact", "--g1", &d.s("c8.txt"), "--g2", &d.s("c4c4.txt"), "--r", "1", "--k", "2", "--out", &out]),
        EXIT_OK
    );
    let r = &read(Path::new(&out))["result"];
    assert_eq!(r["local_tv"], "0/1");
    assert!(r["hausdorff"].as_f64().unwrap() > 0.0);
    assert_eq!(r["certified"], true);
}

#[test]
fn replay_is_identical_and_detects_tampering() {
    let d = Dir::new();
    d.gen("rr.txt", "random-regular", 200, 1);
    let out = d.s("fiid.json");
    assert_eq!(
        locglob(&["fiid", "--rule", "local-min-is", "--graph", &d.s("rr.txt"), "--seed", "1", "--trials", "3", "--out", &out]),
        EXIT_OK
    );
    let verdict = d.s("verdict.json");
    assert_eq!(locglob(&["replay", &out, "--out", &verdict]), EXIT_OK);
    assert_eq!(read(Path::new(&verdict))["status"], "identical");

    let mut report = read(Path::new(&out));
    report["config"]["seed"] = Value::from(2);
    let altered = d.s("altered.json");
    std::fs::write(&altered, serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(locglob(&["replay", &altered, "--out", &verdict]), EXIT_MISMATCH);
    let v = read(Path::new(&verdict));
    assert_eq!(v["status"], "mismatch");
    let paths: Vec<&str> = v["diff"]["differences"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["path"].as_str().unwrap())
        .collect();
    assert!(paths.iter().any(|p| p.starts_with("/result/trials/0/")));
}

#[test]
fn replay_notices_changed_inputs() {
    let d = Dir::new();
    d.gen("g.txt", "cycle", 10, 1);
    let out = d.s("spec.json");
    assert_eq!(locglob(&["spectral", "--graph", &d.s("g.txt"), "--out", &out]), EXIT_OK);
    d.gen("g.txt", "path", 10, 1);
    let verdict = d.s("verdict.json");
    assert_eq!(locglob(&["replay", &out, "--out", &verdict]), EXIT_MISMATCH);
    let diff = &read(Path::new(&verdict))["diff"]["differences"];
    assert!(diff.as_array().unwrap().iter().any(|x| x["path"].as_str().unwrap().starts_with("/inputs/")));
}

#[test]
fn sampled_reports_replay() {
    let d = Dir::new();
    d.gen("rr.txt", "random-regular", 100, 1);
    let out = d.s("s.json");
    assert_eq!(
        locglob(&["stats", "--graph", &d.s("rr.txt"), "--r", "2", "--samples", "50", "--seed", "9", "--out", &out]),
        EXIT_OK
    );
    assert_eq!(read(Path::new(&out))["result"]["distribution"]["mode"], "sampled");
    assert_eq!(locglob(&["replay", &out, "--out", &d.s("v.json")]), EXIT_OK);
}

#[test]
fn exit_codes() {
    let d = Dir::new();
    d.gen("c4.txt", "cycle", 4, 1);
    d.gen("c30.txt", "cycle", 30, 1);
    let out = d.s("x.json");
    assert_eq!(locglob(&["stats", "--r", "1"]), EXIT_VALIDATION);
    assert_eq!(locglob(&["stats", "--graph", &d.s("missing.txt"), "--r", "1", "--out", &out]), EXIT_VALIDATION);
    assert_eq!(
        locglob(&["fiid", "--rule", "no-such-rule", "--graph", &d.s("c4.txt"), "--out", &out]),
        EXIT_VALIDATION
    );
    assert_eq!(
        locglob(&["ptest", "--property", "disconnection", "--graph", &d.s("c4.txt"), "--beta", "0.7", "--out", &out]),
        EXIT_VALIDATION
    );
    assert_eq!(
        locglob(&["quotient", "--mode", "exact", "--graph", &d.s("c30.txt"), "--r", "1", "--k", "2", "--out", &out]),
        EXIT_BUDGET
    );
    assert_eq!(locglob(&["--help"]), EXIT_OK);
}

#[test]
fn every_subcommand_runs_and_replays() {
    let d = Dir::new();
    d.gen("c8.txt", "cycle", 8, 1);
    d.gen("p7.txt", "path", 7, 1);
    d.gen("rr.txt", "random-regular", 40, 1);
    d.gen("rr2.txt", "random-regular", 40, 2);
    let runs: Vec<Vec<String>> = vec![
        vec!["quotient".into(), "--graph".into(), d.s("c8.txt"), "--r".into(), "1".into(), "--k".into(), "2".into()],
        vec!["quotient".into(), "--mode".into(), "search".into(), "--graph".into(), d.s("rr.txt"), "--r".into(), "1".into(), "--k".into(), "2".into(), "--steps".into(), "50".into()],
        vec!["regularize".into(), "--graph".into(), d.s("p7.txt")],
        vec!["encode".into(), "--graph".into(), d.s("rr.txt"), "--k".into(), "3".into(), "--seed".into(), "4".into()],
        vec!["hyperfinite".into(), "--graph".into(), d.s("c8.txt"), "--q".into(), "2".into(), "--mode".into(), "exact".into(), "--eps".into(), "0.3".into(), "--verify-coloring".into()],
        vec!["spectral".into(), "--graph".into(), d.s("c8.txt"), "--expansion".into()],
        vec!["ptest".into(), "--property".into(), "disconnection".into(), "--graph".into(), d.s("rr2.txt"), "--trials".into(), "5".into()],
        vec!["ptest".into(), "--property".into(), "triangle-free".into(), "--graph".into(), d.s("c8.txt"), "--trials".into(), "3".into()],
    ];
    for (i, args) in runs.iter().enumerate() {
        let out = d.s(&format!("run{i}.json"));
        let mut argv: Vec<&str> = args.iter().map(String::as_str).collect();
        argv.extend(["--out", &out]);
        assert_eq!(locglob(&argv), EXIT_OK, "{args:?}");
        assert_eq!(locglob(&["replay", &out, "--out", &d.s("v.json")]), EXIT_OK, "{args:?}");
    }
    let h = &read(&d.path("run4.json"))["result"];
    assert_eq!(h["tau"], 3);
    assert_eq!(h["verdict"], false);
    assert_eq!(h["forbidden_blue_mass"], "0/1");
    let p = &read(&d.path("run6.json"))["result"];
    assert_eq!(p["verdict"], true);
    assert_eq!(p["acceptance"], 1.0);
}
