use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use cyclorat::cli::{self, csvio, CsvError};
use cyclorat::preference::{simulate_dataset, PreferenceModel};
use cyclorat::{fixtures, Menu};

const SOFTMAX_CSV: &str = "menu_id,obs_id,alternative,value,prob
m,1,a1,0,0.5
m,1,a2,0,0.5
m,2,a1,1,0.7310585786300049
m,2,a2,0,0.2689414213699951
";

const VIOLATION_CSV: &str = "menu_id,obs_id,alternative,value,prob
m,1,a1,1,0.3
m,1,a2,0,0.7
m,2,a1,0,0.6
m,2,a2,1,0.4
";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn cyclorat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclorat"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn softmax_file_matches_hand_built_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "softmax.csv", SOFTMAX_CSV);
    let menus = cli::parse_dataset_csv(&path, 1e-9).unwrap();
    assert_eq!(menus.len(), 1);
    let (got, want) = (&menus[0].dataset, fixtures::softmax());
    assert_eq!(got.len(), 2);
    assert_eq!(got.menu().len(), 2);
    for i in 0..2 {
        assert_eq!(got.values(i), want.values(i));
        assert!(cyclorat::numeric::max_abs_diff(got.probs(i), want.probs(i)) <= 1e-16);
    }
}

#[test]
fn missing_prob_column_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.csv",
        "menu_id,obs_id,alternative,value\nm,1,a,1\n",
    );
    assert!(matches!(
        cli::parse_dataset_csv(&path, 1e-9),
        Err(CsvError::MissingColumn(c)) if c == "prob"
    ));
}

#[test]
fn negative_probability_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "neg.csv",
        "menu_id,obs_id,alternative,value,prob\nm,1,a,0,1.2\nm,1,b,1,-0.2\n",
    );
    let err = cli::parse_dataset_csv(&path, 1e-9).unwrap_err();
    assert!(
        matches!(err, CsvError::NegativeEntry { line: 3, .. }),
        "{err:?}"
    );
    let out = cyclorat(&["check", "--input", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "violation.csv", VIOLATION_CSV);
    let good = write(dir.path(), "softmax.csv", SOFTMAX_CSV);
    let report = dir.path().join("report.json");

    let out = cyclorat(&["check", "--input", s(&bad), "--output", s(&report)]);
    assert_eq!(out.status.code(), Some(3));
    let json = read_json(&report);
    assert_eq!(json["schema_version"], 1);
    let witness = &json["menus"][0]["cyclic_monotonicity"]["witness"];
    assert_eq!(witness["cycle"], serde_json::json!([1, 2]));
    assert!((witness["cycle_sum"].as_f64().unwrap() + 0.6).abs() <= 1e-12);
    // Floats carry 17 significant digits.
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(
        text.contains("\"cycle_sum\": -5.9999999999999987e-1"),
        "{text}"
    );

    let out = cyclorat(&["check", "--input", s(&good), "--output", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&report)["passed"], true);
}

#[test]
fn fit_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "softmax.csv", SOFTMAX_CSV);
    let fit = dir.path().join("fit.json");
    let verified = dir.path().join("verify.json");

    let out = cyclorat(&["fit", "--input", s(&input), "--output", s(&fit)]);
    assert_eq!(out.status.code(), Some(0));
    let json = read_json(&fit);
    let menu = &json["menus"][0];
    assert_eq!(menu["fit"]["base_observation"], 1);
    assert_eq!(menu["cost"]["kind"], "data_derived");
    let phi = menu["fit"]["potentials"][1].as_f64().unwrap();
    assert!((phi - 0.5).abs() <= 1e-15);

    let out = cyclorat(&[
        "verify",
        "--input",
        s(&input),
        "--fit",
        s(&fit),
        "--output",
        s(&verified),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let gap = read_json(&verified)["menus"][0]["verification"]["max_fenchel_gap"]
        .as_f64()
        .unwrap();
    assert!(gap <= 1e-9);
}

#[test]
fn verify_rejects_tampered_fit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "softmax.csv", SOFTMAX_CSV);
    let fit = dir.path().join("fit.json");
    assert_eq!(
        cyclorat(&["fit", "--input", s(&input), "--output", s(&fit)])
            .status
            .code(),
        Some(0)
    );
    let mut json = read_json(&fit);
    json["menus"][0]["fit"]["potentials"][1] = serde_json::json!(0.1);
    std::fs::write(&fit, serde_json::to_string(&json).unwrap()).unwrap();
    let out = cyclorat(&[
        "verify",
        "--input",
        s(&input),
        "--fit",
        s(&fit),
        "--output",
        s(&dir.path().join("v.json")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fit_on_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "violation.csv", VIOLATION_CSV);
    let report = dir.path().join("fit.json");
    let out = cyclorat(&["fit", "--input", s(&input), "--output", s(&report)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(read_json(&report)["menus"][0].get("fit").is_none());
}

#[test]
fn simulate_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let model = r#"{"family": "pairwise_regret", "theta": 0.8}"#;
    let out_path = dir.path().join("sim.csv");
    let out = cyclorat(&[
        "simulate",
        "--model",
        model,
        "--seed",
        "11",
        "--observations",
        "25",
        "--alternatives",
        "4",
        "--output",
        s(&out_path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(!text.contains('\r'));

    let parsed = cli::parse_dataset_csv(&out_path, 1e-9).unwrap();
    let model: PreferenceModel = serde_json::from_str(model).unwrap();
    let expected = simulate_dataset(
        &model,
        Menu::with_size("m1", 4).unwrap(),
        &cli::random_design(11, 25, 4),
    )
    .unwrap();
    assert_eq!(parsed[0].dataset, expected);
}

#[test]
fn simulate_from_design_file() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "design.csv",
        "menu_id,obs_id,alternative,value\nm,x,a,0\nm,x,b,0\nm,y,a,1\nm,y,b,0\n",
    );
    let model = write(
        dir.path(),
        "model.json",
        r#"{"family": "luce_exponential"}"#,
    );
    let out_path = dir.path().join("sim.csv");
    let out = cyclorat(&[
        "simulate",
        "--model",
        s(&model),
        "--input",
        s(&design),
        "--output",
        s(&out_path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let d = &cli::parse_dataset_csv(&out_path, 1e-9).unwrap()[0].dataset;
    assert_eq!(d.observations()[1].id, "y");
    assert_eq!(d.probs(0), &[0.5, 0.5]);
    assert!((d.probs(1)[0] - 0.7310585786300049).abs() <= 1e-16);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    let out = cyclorat(&[
        "simulate",
        "--model",
        r#"{"family": "salience_weighted", "sigma": 1.5}"#,
        "--observations",
        "15",
        "--output",
        s(&sim),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut texts = Vec::new();
    // Same config both times, output path included.
    let report = dir.path().join("r.json");
    for _ in 0..2 {
        let status = cyclorat(&["report-all", "--input", s(&sim), "--output", s(&report)]).status;
        assert!(matches!(status.code(), Some(0) | Some(3)));
        let text = std::fs::read_to_string(&report).unwrap();
        let cut = text.find("\"timing\"").expect("timing field");
        texts.push(text[..cut].to_string());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn menus_are_analysed_independently() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("menu_id,obs_id,alternative,value,prob\n");
    for line in VIOLATION_CSV.lines().skip(1) {
        text.push_str(&line.replacen("m,", "zz,", 1));
        text.push('\n');
    }
    for line in SOFTMAX_CSV.lines().skip(1) {
        text.push_str(&line.replacen("m,", "aa,", 1));
        text.push('\n');
    }
    // Three binary menus with one observation each: an intransitive triple.
    text.push_str("xy,1,x,0,0.6\nxy,1,y,0,0.4\n");
    text.push_str("yz,1,y,0,0.55\nyz,1,z,0,0.45\n");
    text.push_str("xz,1,x,0,0.4\nxz,1,z,0,0.6\n");
    let input = write(dir.path(), "multi.csv", &text);
    let report = dir.path().join("r.json");
    let series = dir.path().join("series.csv");
    let out = cyclorat(&[
        "check",
        "--input",
        s(&input),
        "--output",
        s(&report),
        "--series",
        s(&series),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let json = read_json(&report);
    let ids: Vec<&str> = json["menus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["menu_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, vec!["aa", "xy", "xz", "yz", "zz"]);
    assert_eq!(json["menus"][0]["passed"], true);
    assert_eq!(json["menus"][4]["passed"], false);
    let wst = &json["weak_stochastic_transitivity"];
    assert_eq!(wst["binary_menus"], 3);
    assert!(wst["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v["x"] == "x" && v["y"] == "y" && v["z"] == "z"));

    let series = std::fs::read_to_string(&series).unwrap();
    assert!(series.starts_with("menu_id,series,index,value\n"));
    assert!(series.contains("zz,two_cycle_sum,1,-5.9999999999999987e-1"));
}

#[test]
fn usage_and_io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(
        cyclorat(&["check", "--input", s(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(cyclorat(&["check"]).status.code(), Some(2));
    assert_eq!(cyclorat(&["frobnicate"]).status.code(), Some(2));
    let input = write(dir.path(), "softmax.csv", SOFTMAX_CSV);
    assert_eq!(
        cyclorat(&["check", "--input", s(&input), "--tol-cm", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cyclorat(&["simulate", "--model", r#"{"family": "luce"}"#])
            .status
            .code(),
        Some(2)
    );
    let garbage = write(
        dir.path(),
        "garbage.csv",
        "menu_id,obs_id,alternative,value,prob\nm,1,a,x,y\n",
    );
    assert_eq!(
        cyclorat(&["check", "--input", s(&garbage)]).status.code(),
        Some(2)
    );
}

#[test]
fn csv_writer_uses_seventeen_digits() {
    let mut buf = Vec::new();
    csvio::write_datasets(&mut buf, &[fixtures::softmax()]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(
        text.contains("m,2,a1,1.0000000000000000e0,7.3105857863000490e-1"),
        "{text}"
    );
}
