use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn troprank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_troprank")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const FANO: &str = "tropmat 7 7
1 1 1 0 0 0 0
1 0 0 1 1 0 0
1 0 0 0 0 1 1
0 1 0 1 0 1 0
0 1 0 0 1 0 1
0 0 1 1 0 0 1
0 0 1 0 1 1 0
";

#[test]
fn det_examples() {
    let dir = TempDir::new().unwrap();
    let zeros = write(&dir, "z", "tropmat 2 2\n0 0\n0 0\n");
    let o = troprank(&["det", s(&zeros)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("value 0, unique false"));
    let diag = write(&dir, "d", "tropmat 2 2\n0 inf\ninf 0\n");
    let o = troprank(&["det", s(&diag)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("value 0, unique true"));
    let wide = write(&dir, "w", "tropmat 2 3\n0 0 0\n0 0 0\n");
    assert_eq!(code(&troprank(&["det", s(&wide)])), 1);
    let broken = write(&dir, "b", "tropmat 2 2\n0 0\n");
    assert_eq!(code(&troprank(&["det", s(&broken)])), 1);
}

#[test]
fn rank_examples() {
    let dir = TempDir::new().unwrap();
    let fano = write(&dir, "fano", FANO);
    let o = troprank(&["rank", "--kind", "tropical", s(&fano)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("3"));

    let zeros = write(&dir, "z", "tropmat 4 4\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
    let o = troprank(&["rank", "--kind", "bounds", s(&zeros)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("lower 1 upper 1 tight"));

    let prefix = dir.path().join("id");
    let id = write(&dir, "id3", "tropmat 3 3\n0 inf inf\ninf 0 inf\ninf inf 0\n");
    let o = troprank(&["rank", "--kind", "barvinok", s(&id), "-o", s(&prefix)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("3"));
    // the factors are themselves matrix files
    let left = dir.path().join("id.left.tropmat");
    assert_eq!(code(&troprank(&["rank", s(&left)])), 0);
}

#[test]
fn tiny_budget_is_partial() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("pg13");
    assert_eq!(code(&troprank(&["gen-plane", "--order", "13", "-o", s(&prefix)])), 0);
    let m = dir.path().join("pg13.tropmat");
    let o = troprank(&["rank", "--kind", "tropical", "--budget", "10", s(&m)]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).starts_with("partial"));
    assert_eq!(code(&troprank(&["rank", "--kind", "bounds", "--budget", "10", s(&m)])), 3);
}

#[test]
fn gen_plane_examples() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("fano");
    assert_eq!(code(&troprank(&["gen-plane", "--order", "2", "--weights", "unit", "-o", s(&prefix)])), 0);
    let text = fs::read_to_string(dir.path().join("fano.tropmat")).unwrap();
    assert!(text.starts_with("tropmat 7 7\n"));
    let ones = text.lines().skip(1).flat_map(|l| l.split_whitespace()).filter(|e| *e == "1").count();
    assert_eq!(ones, 21);
    assert!(fs::read_to_string(dir.path().join("fano.plane")).unwrap().contains("P 0 "));
    assert!(dir.path().join("fano.manifest.json").exists());
    assert!(dir.path().join("fano.manifest.json.timing.json").exists());

    assert_eq!(code(&troprank(&["gen-plane", "--order", "6"])), 1);

    let a = troprank(&["gen-plane", "--order", "3", "--weights", "random", "--seed", "7"]);
    let b = troprank(&["gen-plane", "--order", "3", "--weights", "random", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_examples() {
    let dir = TempDir::new().unwrap();
    let unit = write(&dir, "x.cnf", "p cnf 1 1\n1 0\n");
    let prefix = dir.path().join("x");
    let o = troprank(&["reduce", "--cnf", s(&unit), "--seed", "5", "-o", s(&prefix)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pattern = dir.path().join("x.tropmat");
    assert!(fs::read_to_string(&pattern).unwrap().starts_with("tropmat "));
    let prov = fs::read_to_string(dir.path().join("x.prov")).unwrap();
    assert!(prov.starts_with("provenance hardened "));
    assert!(prov.contains("P 0 X : frame"));

    let empty = write(&dir, "e.cnf", "p cnf 1 1\n0\n");
    let o = troprank(&["reduce", "--cnf", s(&empty), "--seed", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1 = 0"));

    let bad = write(&dir, "bad.cnf", "p cnf 1 1\n1 2 0\n");
    assert_eq!(code(&troprank(&["reduce", "--cnf", s(&bad)])), 1);
    assert_eq!(code(&troprank(&["reduce"])), 1);

    let polys = write(&dir, "p.txt", "x1^2 - x1\n");
    let o = troprank(&["reduce", "--polys", s(&polys), "--harden", "off", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("# unhardened pattern"));
}

#[test]
fn realize_examples() {
    let dir = TempDir::new().unwrap();
    let fano = write(&dir, "fano", FANO);
    let prefix = dir.path().join("fq");
    let o = troprank(&["realize", "--pattern", s(&fano), "--field", "q", "-o", s(&prefix)]);
    assert_eq!(code(&o), 2);
    assert!(fs::read_to_string(dir.path().join("fq.trace")).unwrap().starts_with("infeasible over q"));

    let prefix = dir.path().join("f2");
    let o = troprank(&["realize", "--pattern", s(&fano), "--field", "gf2", "-o", s(&prefix)]);
    assert_eq!(code(&o), 0);
    let cert = fs::read_to_string(dir.path().join("f2.cert")).unwrap();
    assert!(cert.starts_with("field gf2\n"));
    let config = troprank::text::parse_configuration(&cert).unwrap();
    let pattern = troprank::lifting::IncidencePattern::from_matrix(&troprank::text::parse_tropmat(FANO).unwrap()).unwrap();
    assert_eq!(config.verify(&pattern), Ok(()));

    let id = write(&dir, "id", "tropmat 3 3\n1 0 0\n0 1 0\n0 0 1\n");
    assert_eq!(code(&troprank(&["realize", "--pattern", s(&id), "--field", "q"])), 0);
    assert_eq!(code(&troprank(&["realize", "--pattern", s(&id), "--field", "gf1"])), 1);
    let weighted = write(&dir, "w", "tropmat 1 1\n2\n");
    assert_eq!(code(&troprank(&["realize", "--pattern", s(&weighted)])), 1);
}

#[test]
fn reduced_pattern_round_trips_through_realize() {
    let dir = TempDir::new().unwrap();
    let polys = write(&dir, "p.txt", "x1 - 1\n");
    let prefix = dir.path().join("r");
    assert_eq!(code(&troprank(&["reduce", "--polys", s(&polys), "--seed", "3", "-o", s(&prefix)])), 0);
    let o = troprank(&["realize", "--pattern", s(&dir.path().join("r.tropmat")), "--field", "float", "--restarts", "1", "--seed", "1"]);
    assert!([0, 3].contains(&code(&o)));
}

#[test]
fn verify_lift_examples() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m", "tropmat 2 2\n0 1\n1 0\n");
    let l = write(&dir, "l", "troplift 2 2 q exact\n0 0 : 1\n0 1 : t\n1 0 : t\n1 1 : 1\n");
    let o = troprank(&["verify-lift", "--matrix", s(&m), "--lift", s(&l), "--rank", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("accept"));
    let o = troprank(&["verify-lift", "--matrix", s(&m), "--lift", s(&l), "--rank", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("reject"));

    let z = write(&dir, "z", "tropmat 2 2\n0 0\n0 0\n");
    let ind = write(&dir, "i", "troplift 2 2 q 1\n0 0 : 1\n0 1 : 1\n1 0 : 1\n1 1 : 1\n");
    let o = troprank(&["verify-lift", "--matrix", s(&z), "--lift", s(&ind), "--rank", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("truncation"));
}

#[test]
fn manifests_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "c.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    let mut manifests = Vec::new();
    for k in 0..2 {
        let prefix = dir.path().join("out");
        let o = troprank(&["reduce", "--cnf", s(&cnf), "--seed", "11", "-o", s(&prefix)]);
        assert_eq!(code(&o), 0, "run {k}");
        manifests.push(fs::read(dir.path().join("out.manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
    let manifest: serde_json::Value = serde_json::from_slice(&manifests[0]).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn seed_is_drawn_and_printed() {
    let o = troprank(&["gen-plane", "--order", "2", "--weights", "random"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).lines().any(|l| l.starts_with("seed ")));
}

#[test]
fn json_mirrors_the_report() {
    let dir = TempDir::new().unwrap();
    let fano = write(&dir, "fano", FANO);
    let o = troprank(&["--json", "rank", "--kind", "tropical", s(&fano)]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["report"]["rank"], 3);
    assert_eq!(doc["manifest"]["subcommand"], "rank");
    assert_eq!(doc["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let o = troprank(&["--json", "det", "/nonexistent/file"]);
    assert_eq!(code(&o), 1);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["exit_code"], 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&troprank(&["frobnicate"])), 1);
    assert_eq!(code(&troprank(&["rank", "--kind", "nope", "x"])), 1);
    assert_eq!(code(&troprank(&["--help"])), 0);
}
