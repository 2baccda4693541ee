//! End-to-end tests of the binary: flag handling, file emission, error
//! exit codes and output round-trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plcsnet"))
}

fn sample_panel() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample-gdp.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn analyze_emits_requested_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        sample_panel().to_str().unwrap(),
        "--window",
        "2002:2011",
        "--formats",
        "matrix-csv,pairs-json,loglog-csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    for name in [
        "gamma-2002-2011.csv",
        "beta-2002-2011.csv",
        "ud-am-2002-2011.csv",
        "pairs-2002-2011.json",
        "loglog-2002-2011.csv",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
}

#[test]
#[allow(clippy::needless_range_loop)] // symmetric access rows[i][j] vs rows[j][i]
fn analyze_matrix_is_symmetric_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run(&[
        "analyze",
        "--input",
        sample_panel().to_str().unwrap(),
        "--window",
        "1992:2011",
        "--formats",
        "matrix-csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(dir.path().join("gamma-1992-2011.csv")).unwrap();
    let (entities, rows) = plcsnet_cli::output::read_matrix_csv(&text).unwrap();
    assert_eq!(entities.len(), 19);
    for i in 0..19 {
        for j in 0..19 {
            match (&rows[i][j], &rows[j][i]) {
                (
                    plcsnet_cli::output::MatrixCell::Value(a),
                    plcsnet_cli::output::MatrixCell::Value(b),
                ) => assert_eq!(a, b, "asymmetry at ({i},{j})"),
                (a, b) => assert_eq!(a, b),
            }
        }
        assert_eq!(rows[i][i], plcsnet_cli::output::MatrixCell::Empty);
    }
}

#[test]
fn npt_emits_one_network_per_preference() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run(&[
        "npt",
        "--input",
        sample_panel().to_str().unwrap(),
        "--window",
        "2002:2011",
        "--preference",
        "cp,sp,s",
        "--formats",
        "dot",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    for stem in ["cp-2002-2011", "sp-2002-2011", "s-2002-2011"] {
        assert!(dir.path().join(format!("{stem}.dot")).exists());
        assert!(dir.path().join(format!("{stem}.json")).exists());
    }
    assert!(!dir.path().join("ud-2002-2011.dot").exists());
}

#[test]
fn mst_rerun_is_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        assert_ok(&run(&[
            "mst",
            "--input",
            sample_panel().to_str().unwrap(),
            "--window",
            "1982:2011",
            "--out",
            d.path().to_str().unwrap(),
        ]));
    }
    for name in ["mst-1982-2011.dot", "mst-1982-2011.graphml", "mst-1982-2011.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    // a spanning tree over 19 nodes
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d1.path().join("mst-1982-2011.json")).unwrap())
            .unwrap();
    assert_eq!(summary["nodes"], 19);
    assert_eq!(summary["edges"], 18);
}

#[test]
fn parse_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "year,A,B\n1970,1,2\n1971,oops,3\n1972,2,4\n1973,3,5\n").unwrap();
    let out = run(&[
        "analyze",
        "--input",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 3"), "stderr: {stderr}");
}

#[test]
fn contract_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        sample_panel().to_str().unwrap(),
        "--window",
        "1900:2011",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_graph_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let twin = dir.path().join("twin.csv");
    // two identical columns: the only pair is degenerate on the fit channel
    let mut text = String::from("year,A,B\n");
    for y in 1970..1990 {
        text.push_str(&format!("{y},{0},{0}\n", y - 1960));
    }
    std::fs::write(&twin, text).unwrap();
    let out = run(&[
        "npt",
        "--input",
        twin.to_str().unwrap(),
        "--preference",
        "cp",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["analyze", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        dir.path().join("does-not-exist.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "input = {:?}\nwindow = \"2002:2011\"\nformats = [\"pairs-json\"]\nout = {:?}\n",
            sample_panel().to_str().unwrap(),
            dir.path().join("results").to_str().unwrap()
        ),
    )
    .unwrap();
    assert_ok(&run(&["analyze", "--config", cfg.to_str().unwrap()]));
    assert!(dir.path().join("results/pairs-2002-2011.json").exists());
}

#[test]
fn loglog_export_covers_every_pair() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&run(&[
        "analyze",
        "--input",
        sample_panel().to_str().unwrap(),
        "--window",
        "2002:2011",
        "--formats",
        "loglog-csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(dir.path().join("loglog-2002-2011.csv")).unwrap();
    let mut pairs = std::collections::BTreeSet::new();
    for line in text.lines().skip(1) {
        let mut fields = line.split(',');
        let a = fields.next().unwrap();
        let b = fields.next().unwrap();
        pairs.insert((a.to_string(), b.to_string()));
    }
    assert_eq!(pairs.len(), 171);
}
