use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn pmahp() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pmahp"));
    cmd.env_remove("PMAHP_SEED");
    cmd
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn with_stdin(cmd: &mut Command, input: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

const TRANSITIVE: &str = "1,2,4\n0.5,1,2\n0.25,0.5,1\n";
const SAATY3: &str = "1,2,6\n0.5,1,2\n0.16666666666666666,0.5,1\n";

#[test]
fn llsm_weights_recover_transitive_generators() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.csv", TRANSITIVE);
    let v = json(&run(pmahp()
        .args(["weights", "--method", "llsm"])
        .arg(&path)));
    assert_eq!(v["method"], "llsm");
    let w = floats(&v["weights"]);
    for (a, b) in w.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
        assert!((a - b).abs() < 1e-12, "{w:?}");
    }
    let v = json(&run(pmahp()
        .args([
            "weights",
            "--method",
            "llsm",
            "--normalization",
            "product-one",
        ])
        .arg(&path)));
    let product: f64 = floats(&v["weights"]).iter().product();
    assert!((product - 1.0).abs() < 1e-12);
}

#[test]
fn eigen_weights_report_lambda_and_iterations() {
    let out = with_stdin(pmahp().arg("weights"), TRANSITIVE);
    let v = json(&out);
    assert_eq!(v["method"], "eigen");
    assert!((v["lambda_max"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(v["iterations"].as_u64().unwrap() >= 1);
}

#[test]
fn two_by_two_reciprocal_has_zero_cr() {
    let out = with_stdin(
        pmahp().args(["consistency", "--ri", "saaty", "-"]),
        "1,3\n0.3333333333333333,1\n",
    );
    let v = json(&out);
    assert_eq!(v["cr"].as_f64(), Some(0.0));
    assert_eq!(v["acceptable"], true);
    assert_eq!(v["ri_source"]["method"], "saaty_table");
}

#[test]
fn non_reciprocal_input_has_no_cr() {
    let out = with_stdin(
        pmahp().args(["consistency", "--ri", "saaty"]),
        "1,2.1\n0.55,1\n",
    );
    let v = json(&out);
    assert!(v["cr"].is_null());
    assert!((v["intransitivity"].as_f64().unwrap() - 0.101_894_33).abs() < 1e-7);
}

#[test]
fn monte_carlo_ri_echoes_seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.csv", SAATY3);
    let v = json(&run(pmahp()
        .args(["consistency", "--ri-samples", "500"])
        .arg(&path)
        .env("PMAHP_SEED", "41")));
    assert_eq!(v["ri_source"]["method"], "monte_carlo");
    assert_eq!(v["ri_source"]["seed"], 41);
    assert_eq!(v["ri_source"]["samples"], 500);
    let flag = json(&run(pmahp()
        .args(["consistency", "--ri-samples", "500", "--seed", "41"])
        .arg(&path)));
    assert_eq!(v, flag);
}

#[test]
fn output_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", SAATY3);
    let b = write(&dir, "b.csv", TRANSITIVE);
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let mut bytes =
                run(pmahp().args(["census", "--n", "3..4", "--samples", "300", "--seed", "9"]))
                    .stdout;
            bytes.extend(run(pmahp().args(["induced", "--samples", "16"]).arg(&a).arg(&b)).stdout);
            bytes.extend(run(pmahp().args(["consistency", "--ri-samples", "300"]).arg(&a)).stdout);
            bytes
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn invalid_input_exits_one_with_location() {
    let out = with_stdin(pmahp().arg("weights"), "1,2,-3\n0.5,1,2\n1,0.5,1\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(0, 2)"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(pmahp().arg("frobnicate")).status.code(), Some(2));
    assert_eq!(
        run(pmahp().args(["weights", "--method", "median"]))
            .status
            .code(),
        Some(2)
    );
    // Verbs without a tabular CSV form refuse `--format csv`.
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.csv", TRANSITIVE);
    assert_eq!(
        run(pmahp().args(["--format", "csv", "decompose"]).arg(&path))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.csv", SAATY3);
    let out = run(pmahp().args(["--format", "csv", "nearest"]).arg(&path));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with('\n'));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    // Nearest transitive: u[0][2] = u[0][1] · u[1][2].
    assert!((rows[0][2] - rows[0][1] * rows[1][2]).abs() < 1e-12 * rows[0][2]);

    let out = run(pmahp().args(["--format", "csv", "census", "--n", "3", "--samples", "200"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("n,"));
    assert_eq!(text.lines().count(), 2);

    let out = run(pmahp().args(["--format", "csv", "weights"]).arg(&path));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("index,weight"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn pretty_tables_are_human_readable() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.csv", SAATY3);
    let out = run(pmahp().args(["--pretty", "deviation"]).arg(&path));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("revise ("), "{text}");
}

#[test]
fn deviation_reports_hint() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "s.csv", SAATY3);
    let v = json(&run(pmahp().arg("deviation").arg(&path)));
    assert!(v["revision_hint"].is_object());
    let dir2 = write(&dir, "t.csv", TRANSITIVE);
    let v = json(&run(pmahp().arg("deviation").arg(&dir2)));
    assert!(
        v["revision_hint"].to_string().contains("nothing"),
        "{}",
        v["revision_hint"]
    );
}

#[test]
fn coin_prices_fill_every_slot() {
    let out = with_stdin(pmahp().args(["coin", "--ri", "saaty"]), "[2, 4, 1, 8]");
    let v = json(&out);
    assert_eq!(v["inputs"], 4);
    assert_eq!(v["pairwise_slots"], 6);
    assert!(v["report"]["cr"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["report"]["intransitivity"].as_f64().unwrap() < 1e-12);
    // CSV input is accepted too.
    let out = with_stdin(pmahp().args(["coin", "--ri", "saaty"]), "2,4,1,8\n");
    assert_eq!(json(&out)["weights"], v["weights"]);
}

#[test]
fn aggregate_panel_from_json_and_csv() {
    let panel = r#"{"importance": [0.5, 0.5], "vectors": [[1, 2, 8], [1, 8, 2]]}"#;
    let v = json(&with_stdin(pmahp().arg("aggregate"), panel));
    let prices = v["prices"].to_string();
    assert!(prices.contains('4'), "{prices}");
    let csv = json(&with_stdin(
        pmahp().arg("aggregate"),
        "0.5,1,2,8\n0.5,1,8,2\n",
    ));
    assert_eq!(v, csv);
}

#[test]
fn synthesize_two_level_hierarchy() {
    let h = r#"{"criteria": [0.5, 0.5], "alternatives": [[0.2, 0.8], [0.6, 0.4]]}"#;
    let v = json(&with_stdin(pmahp().arg("synthesize"), h));
    let w = floats(&v["weights"]);
    assert!(
        (w[0] - 0.4).abs() < 1e-12 && (w[1] - 0.6).abs() < 1e-12,
        "{w:?}"
    );
}

#[test]
fn hilbert_distance_of_vectors() {
    let v = json(&run(pmahp().args(["hilbert", "1,2,3", "2,4,7"])));
    let expected = (7.0f64 / 3.0).ln() - 2f64.ln();
    assert!((v["distance"].as_f64().unwrap() - expected).abs() < 1e-12);
    let v = json(&run(pmahp().args(["hilbert", "1,2,3", "5,10,15"])));
    assert_eq!(v["distance"].as_f64(), Some(0.0));
    assert_eq!(
        run(pmahp().args(["hilbert", "1,2", "1,2,3"])).status.code(),
        Some(1)
    );
}

#[test]
fn induced_distances_of_rescaled_matrices_vanish() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", SAATY3);
    let b = write(&dir, "b.csv", "3,6,18\n1.5,3,6\n0.5,1.5,3\n");
    let v = json(&run(pmahp()
        .args(["induced", "--samples", "32"])
        .arg(&a)
        .arg(&b)));
    assert_eq!(v["samples"], 32);
    assert_eq!(v["seed"], 0);
    assert!(v["max"]["value"].as_f64().unwrap() < 1e-12, "{v}");
    assert!(v["integral"]["mean"].as_f64().unwrap() < 1e-12, "{v}");
}

#[test]
fn decompose_splits_flows_and_growths() {
    let v = json(&with_stdin(pmahp().arg("decompose"), "1,2\n3,-4\n"));
    let flows = v["flows"].to_string();
    let growths = v["growths"].to_string();
    assert!(!flows.is_empty() && !growths.is_empty());
    // Growths carry the column sums on the diagonal.
    let g: Vec<Vec<f64>> = serde_json::from_value(v["growths"].clone()).unwrap();
    assert_eq!(g[0][0], 4.0);
    assert_eq!(g[1][1], -2.0);
    assert_eq!(g[0][1], 0.0);
}

#[test]
fn eigenbasis_of_rotation_and_jordan_block() {
    let v = json(&with_stdin(pmahp().arg("eigenbasis"), "0,-1\n1,0\n"));
    let text = v["eigenvalues"].to_string();
    assert!(text.contains("1.0") || text.contains('1'), "{text}");
    assert!(v["reconstruction_error"].as_f64().unwrap() < 1e-12);

    let out = with_stdin(pmahp().arg("eigenbasis"), "1,1\n0,1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn every_verb_has_help() {
    let verbs = [
        "weights",
        "consistency",
        "nearest",
        "deviation",
        "coin",
        "aggregate",
        "synthesize",
        "hilbert",
        "induced",
        "decompose",
        "eigenbasis",
        "census",
        "serve",
    ];
    let help = String::from_utf8(run(pmahp().arg("--help")).stdout).unwrap();
    for verb in verbs {
        assert!(help.contains(verb), "missing {verb} in help");
        assert!(
            run(pmahp().args([verb, "--help"])).status.success(),
            "{verb} --help"
        );
    }
}
