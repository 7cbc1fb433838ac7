use std::fs;
use std::process::{Command, Output};

fn latvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cover_emits_planes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("planes.txt");
    let out = latvar(&["cover", "--n", "2", "--k", "1", "--b", "2", "--emit-planes", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n=2 k=1 B=2 points=49 "), "{text}");
    let planes = fs::read_to_string(&path).unwrap();
    let n_planes: usize = text
        .split_whitespace()
        .find_map(|w| w.strip_prefix("planes="))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(planes.lines().count(), n_planes);
    for line in planes.lines() {
        assert!(line.parse::<latvar::IntegerLattice>().is_ok(), "{line}");
    }
}

#[test]
fn densest_and_enum_lattices() {
    let out = latvar(&["densest", "--n", "2", "--k", "1", "--d", "1", "--b", "3"]);
    assert!(out.status.success());
    // one coordinate line holds every point of P^1(Q,3)
    assert!(stdout(&out).ends_with("count=16\n"), "{}", stdout(&out));

    let out = latvar(&["enum-lattices", "--ambient", "3", "--rank", "2", "--hsq", "2"]);
    let text = stdout(&out);
    assert!(text.ends_with("count=9 method=Duality\n"), "{text}");
    let searched = latvar(&["enum-lattices", "--ambient", "3", "--rank", "2", "--hsq", "2", "--search"]);
    let s = stdout(&searched);
    assert!(s.contains("count=9 method=GeneratorSearch"), "{s}");
}

#[test]
fn count_variety_files() {
    let dir = tempfile::tempdir().unwrap();
    let conic = dir.path().join("conic.poly");
    fs::write(&conic, "# a conic\nx0^2 + x1^2 - x2^2\n").unwrap();
    let out = latvar(&["count", "--input", conic.to_str().unwrap(), "--projective", "--b", "1"]);
    assert_eq!(stdout(&out), "P^2 B=1 count=4\n");

    let lines = dir.path().join("lines.poly");
    fs::write(&lines, "vars = 2\nx0^2 - x0\n").unwrap();
    let out = latvar(&["count", "--input", lines.to_str().unwrap(), "--affine", "--b", "2"]);
    assert_eq!(stdout(&out), "A^2 B=2 count=10\n");

    let out = latvar(&["count", "--input", lines.to_str().unwrap(), "--b", "2"]);
    assert!(!out.status.success());

    let bad = dir.path().join("bad.poly");
    fs::write(&bad, "x0 + \n").unwrap();
    let out = latvar(&["count", "--input", bad.to_str().unwrap(), "--affine", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1") && err.contains("position 5"), "{err}");
}

#[test]
fn project_twisted_cubic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.poly");
    fs::write(&path, "degree = 3\nx1 - x0^2\nx2 - x0^3\n").unwrap();
    let out = latvar(&["project", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("drop x0: degree=3"), "{text}");
    assert!(text.contains("drop x1: degree=3"), "{text}");
    assert!(text.contains("drop x2: degree=2"), "{text}");
    assert!(text.contains("best: drop x0 d'=3 d=3 contract=PASS"), "{text}");
}

#[test]
fn project_flags_contract_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.poly");
    // a line declared with an impossible degree: d' = 1 < sqrt(5)
    fs::write(&path, "degree = 5\nx0 - x1\nx0 - x2\n").unwrap();
    let out = latvar(&["project", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("contract=FAIL"));
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lines.toml");
    fs::write(&cfg, "b_values = [3, 5]\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = latvar(&[
        "experiment",
        "--id",
        "parallel-lines",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let csv = fs::read_to_string(out_dir.join("parallel-lines.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("d,b,count,elapsed_ms"));
    assert_eq!(csv.lines().count(), 1 + 3 + 5);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("parallel-lines.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert!(json["timing"]["total_ms"].is_number());
    assert!(json["measured"]["counts"].is_array());
}

#[test]
fn experiment_failure_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    fs::write(&cfg, "b_values = [2, 3]\n").unwrap();
    let out = latvar(&[
        "experiment",
        "--id",
        "cover-scaling",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("insufficient data"));

    let out = latvar(&[
        "experiment",
        "--id",
        "no-such-experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subdivide_reports_checks() {
    let out = latvar(&["subdivide", "--h", "16", "--k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("H=16 k=2 K=5 "), "{text}");
    assert_eq!(text.matches(": PASS").count(), 5);
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let id = path.file_stem().unwrap().to_str().unwrap().to_string();
        latvar::ExperimentConfig::load(&path, Some(&id)).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert_eq!(seen, latvar::experiment::EXPERIMENT_IDS.len());
}
