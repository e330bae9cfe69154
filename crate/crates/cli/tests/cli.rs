use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planar-qec"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn ingest_summarizes_and_re_emits_losslessly() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("cal.csv");
    let text = "qubit_id,t1_us,t2_us\n0,50,120\n1,41.50,60.0\n2,1e2,35\n";
    std::fs::write(&input, text).unwrap();
    let emitted = tmp.path().join("emitted.csv");
    let out = run(&["ingest", input.to_str().unwrap(), "--emit", emitted.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("qubits: 3"));
    assert!(stdout.contains("clamped to the Ramsey limit: 1"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(std::fs::read_to_string(&emitted).unwrap(), text);
}

#[test]
fn ingest_shipped_washington() {
    let out = run(&["ingest", data("ibm_washington.csv").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("qubits: 85"), "{stdout}");
    assert!(stdout.contains("T1 (us): min 16.5 max 123.1"), "{stdout}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let out = out_dir.to_str().unwrap();
    // missing --seed
    assert_eq!(code(&run(&["sweep", "--symmetric-t-us", "50", "--out", out])), 1);
    // unknown verb
    assert_eq!(code(&run(&["simulate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(
        code(&run(&[
            "sweep",
            "--symmetric-t-us",
            "50",
            "--seed",
            "1",
            "-d",
            "1",
            "--out",
            out
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "sweep",
            "--symmetric-t-us",
            "50",
            "--seed",
            "1",
            "--p-grid",
            "0.8",
            "--out",
            out
        ])),
        1
    );

    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "qubit_id,t1_us,t2_us\n0,50,60\n0,40,60\n").unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(code(&run(&["ingest", bad])), 2);
    assert_eq!(
        code(&run(&["sweep", "--calibration", bad, "--seed", "1", "--out", out])),
        2
    );
    assert_eq!(code(&run(&["ingest", "/nonexistent/cal.csv"])), 2);

    let small = tmp.path().join("small.csv");
    std::fs::write(&small, "qubit_id,t1_us,t2_us\n0,50,60\n1,40,60\n").unwrap();
    let out = run(&[
        "sweep",
        "--calibration",
        small.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));

    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let unwritable = blocker.join("sub");
    let out = run(&[
        "sweep",
        "--symmetric-t-us",
        "50",
        "--seed",
        "1",
        "--p-grid",
        "0.1",
        "--trials",
        "10",
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn pseudothreshold_writes_stamped_results() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("pth");
    let out = run(&[
        "pseudothreshold",
        "--calibration",
        data("ibm_washington.csv").to_str().unwrap(),
        "--seed",
        "5",
        "--decoder",
        "mwpm",
        "--decoder",
        "rmwpm",
        "--arrangement",
        "random",
        "--arrangement",
        "optimized",
        "--p-grid",
        "0.005:0.3:8",
        "--trials",
        "2000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let fingerprint = summary["fingerprint"].as_str().unwrap();
    assert_eq!(summary["seed"], 5);
    let curves = summary["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 4);
    assert_eq!(curves[0]["ratio_to_first"], 1.0);
    // optimized mwpm against random mwpm
    assert!(curves[2]["ratio_to_first"].as_f64().unwrap() > 1.0);
    assert!(curves[3]["pseudothreshold"].as_f64().unwrap() > 0.0);

    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(text.contains(fingerprint), "every file carries the fingerprint");
    }
    let csv = std::fs::read_to_string(out_dir.join("curve_d3_rmwpm_optimized_t2.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with(&format!("# fingerprint={fingerprint} seed=5")));
    assert_eq!(lines.next().unwrap(), "p_physical,t_us,P_L_hat,ci_low,ci_high,n_trials");
    assert_eq!(lines.count(), 8);
    let svg = std::fs::read_to_string(out_dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn summary_config_re_runs_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let out = run(&[
        "sweep",
        "--symmetric-t-us",
        "80",
        "--seed",
        "11",
        "-d",
        "3",
        "--noise",
        "iid",
        "--p-grid",
        "0.02,0.1",
        "--trials",
        "500",
        "--breakdown",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let second = tmp.path().join("second");
    let out = run(&[
        "sweep",
        "--config",
        first.join("summary.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["summary.json", "curve_d3_mwpm_as_indexed.csv", "plot.svg"] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn optimize_layout_table_places_best_t2_at_centre() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("layout");
    let out = run(&[
        "optimize-layout",
        "--calibration",
        data("ibm_washington_d3.csv").to_str().unwrap(),
        "--seed",
        "1",
        "--arrangement",
        "optimized",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(out_dir.join("layout_d3_optimized_t2.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(2).collect();
    assert_eq!(rows.len(), 13);
    // centre of the d=3 grid is (2,2), lattice index 4; best T2 is qubit 23
    assert!(rows[4].starts_with("4,23,"), "{table}");
}
