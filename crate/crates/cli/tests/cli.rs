use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ctx_cli::report::{AnalysisReport, FixtureCheckReport, GraphReport, QuantumReport, ScenarioListing};
use serde_json::{json, Value};
use tempfile::TempDir;

fn ctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctx")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.display().to_string()
}

fn export(dir: &Path, name: &str) {
    let o = ctx(&["fixtures", "export", name, "--dir", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn scenarios_list_text_and_json() {
    let o = ctx(&["scenarios", "list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["chsh", "kcbs", "peres-mermin"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let o = ctx(&["scenarios", "list", "--json"]);
    let listing: ScenarioListing = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(listing.0.iter().any(|e| e.name == "pr-box" && !e.description.is_empty()));
    let raw: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(raw.as_array().unwrap().iter().all(|e| e.get("name").is_some() && e.get("description").is_some()));
}

#[test]
fn analyze_chsh_is_probabilistically_contextual() {
    let o = ctx(&["analyze", "builtin:chsh", "--json", "--no-timing"]);
    assert_eq!(code(&o), 0);
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.class.unwrap().to_string(), "ProbabilisticallyContextual");
    assert!(r.compatibility.compatible);
    assert!(!r.feasibility[0].feasible);
    assert!(stdout(&ctx(&["analyze", "builtin:chsh"])).contains("class: ProbabilisticallyContextual"));
}

#[test]
fn analyze_pr_box_is_strongly_contextual() {
    let o = ctx(&["analyze", "builtin:pr-box", "--json", "--no-timing"]);
    assert_eq!(code(&o), 0);
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.class.unwrap().to_string(), "StronglyContextual");
    let bool_verdict = r.feasibility.iter().find(|f| f.semiring == "bool").unwrap();
    assert_eq!(bool_verdict.candidates, Some(0));
}

#[test]
fn analyze_deterministic_file_is_noncontextual_with_certificate() {
    let dir = TempDir::new().unwrap();
    let model = json!({
        "scenario": "chsh",
        "semiring": "prob",
        "table": {
            "A1,B1": ["0", "1", "0", "0"],
            "A1,B2": ["1", "0", "0", "0"],
            "A2,B1": ["0", "0", "0", "1"],
            "A2,B2": ["0", "0", "1", "0"]
        }
    });
    let path = write_json(dir.path(), "det.json", &model);
    let o = ctx(&["analyze", &path, "--json", "--no-timing"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.class.unwrap().to_string(), "Noncontextual");
    let prob = &r.feasibility[0];
    assert!(prob.feasible);
    assert!(prob.certificate.is_some());
    assert_eq!(prob.support, vec!["A1=0,A2=1,B1=1,B2=0: 1/1".to_string()]);
}

#[test]
fn analyze_single_semiring() {
    let o = ctx(&["analyze", "builtin:chsh", "--semiring", "signed", "--json", "--no-timing"]);
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.feasibility.len(), 1);
    assert_eq!(r.feasibility[0].semiring, "signed");
    assert!(r.feasibility[0].feasible);
}

#[test]
fn analyze_incompatible_reports_witness_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let model = json!({
        "scenario": "chsh",
        "semiring": "prob",
        "table": {
            "A1,B1": ["1", "0", "0", "0"],
            "A1,B2": ["0", "0", "1", "0"],
            "A2,B1": ["1", "0", "0", "0"],
            "A2,B2": ["1", "0", "0", "0"]
        }
    });
    let path = write_json(dir.path(), "bad.json", &model);
    let o = ctx(&["analyze", &path, "--json", "--no-timing"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.compatibility.compatible);
    assert_eq!(r.compatibility.witness.unwrap().overlap, vec!["A1".to_string()]);
    assert!(r.class.is_none());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ctx(&["no-such-command"])), 64);
    assert_eq!(code(&ctx(&["analyze"])), 64);
    assert_eq!(code(&ctx(&["analyze", "builtin:chsh", "--semiring", "tropical"])), 64);

    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let o = ctx(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 66);
    assert!(stderr(&o).starts_with("ctx: "));

    let o = ctx(&["analyze", "builtin:unknown"]);
    assert_eq!(code(&o), 66);
    assert!(stderr(&o).contains("chsh"), "available names listed");

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&ctx(&["analyze", garbage.to_str().unwrap()])), 65);

    let unnormalized = json!({
        "scenario": "chsh",
        "semiring": "prob",
        "table": {
            "A1,B1": ["1", "1", "0", "0"],
            "A1,B2": ["1", "0", "0", "0"],
            "A2,B1": ["1", "0", "0", "0"],
            "A2,B2": ["1", "0", "0", "0"]
        }
    });
    let path = write_json(dir.path(), "unnorm.json", &unnormalized);
    assert_eq!(code(&ctx(&["analyze", &path])), 65);

    assert_eq!(code(&ctx(&["analyze", "builtin:chsh", "--cap", "15"])), 70);
    assert_eq!(code(&ctx(&["analyze", "builtin:chsh", "--cap", "16"])), 0);

    let o = ctx(&["graph", "invariants", "builtin:chsh"]);
    assert_eq!(code(&o), 66, "chsh fixture has no graph");
    assert!(stderr(&o).contains("no exclusivity graph"));
    assert_eq!(code(&ctx(&["analyze", "builtin:yu-oh"])), 66, "yu-oh has no empirical model");

    let big = json!({ "n": 129, "weights": vec!["1"; 129], "edges": [] });
    let path = write_json(dir.path(), "big.json", &big);
    assert_eq!(code(&ctx(&["graph", "invariants", &path])), 70);

    let o = ctx(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("analyze"));
}

fn graph_report(source: &str) -> GraphReport {
    let o = ctx(&["graph", "invariants", source, "--json", "--no-timing"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn graph_invariants_chsh_graph_8() {
    let r = graph_report("builtin:chsh-graph-8");
    assert_eq!(r.alpha.unwrap().value, "3/1");
    let t = r.theta.unwrap();
    assert!((t.value - (2.0 + 2f64.sqrt())).abs() < 1e-4);
    assert_eq!(t.tolerance, 1e-4);
    assert_eq!(r.alpha_star.unwrap().value, "4/1");
    assert_eq!(r.chain_holds, Some(true));
    let text = stdout(&ctx(&["graph", "invariants", "builtin:chsh-graph-8"]));
    assert!(text.contains("alpha: 3/1"));
    assert!(text.contains("theta: 3.41421"));
    assert!(text.contains("alpha*: 4/1"));
}

#[test]
fn graph_invariants_kcbs() {
    let r = graph_report("builtin:kcbs");
    assert_eq!(r.alpha.unwrap().value, "2/1");
    assert!((r.theta.unwrap().value - 5f64.sqrt()).abs() < 1e-4);
    assert_eq!(r.alpha_star.unwrap().value, "5/2");
    assert_eq!(r.perfect.unwrap().verdict, "odd-hole");
}

#[test]
fn graph_invariants_triangle_file() {
    let dir = TempDir::new().unwrap();
    let k3 = json!({ "n": 3, "weights": ["1", "1", "1"], "edges": [[0, 1], [1, 2], [0, 2]] });
    let path = write_json(dir.path(), "k3.json", &k3);
    let r = graph_report(&path);
    assert_eq!(r.alpha.unwrap().value, "1/1");
    assert!((r.theta.unwrap().value - 1.0).abs() < 1e-4);
    assert_eq!(r.alpha_star.unwrap().value, "1/1");
    assert_eq!(r.perfect.unwrap().verdict, "none");
}

#[test]
fn graph_invariants_selection() {
    let o = ctx(&["graph", "invariants", "builtin:kcbs", "--alpha", "--json", "--no-timing"]);
    let r: GraphReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.alpha.is_some());
    assert!(r.theta.is_none() && r.alpha_star.is_none() && r.perfect.is_none());
    assert_eq!(r.chain_holds, None);
}

#[test]
fn dot_export_is_byte_stable_and_uses_labels() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.dot");
    let b = dir.path().join("b.dot");
    assert_eq!(code(&ctx(&["graph", "export", "builtin:chsh-graph-8", "--dot", a.to_str().unwrap()])), 0);
    assert_eq!(code(&ctx(&["graph", "export", "builtin:chsh-graph-8", "--dot", b.to_str().unwrap()])), 0);
    let (da, db) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(da, db);
    let text = String::from_utf8(da).unwrap();
    assert!(text.starts_with("graph"));
    assert!(text.contains("A1=0,B1=0"));
    assert_eq!(text.matches(" -- ").count(), 12);

    let bad = dir.path().join("no-such-dir").join("x.dot");
    assert_eq!(code(&ctx(&["graph", "export", "builtin:kcbs", "--dot", bad.to_str().unwrap()])), 73);
}

#[test]
fn quantum_chsh_reproduces_table() {
    let dir = TempDir::new().unwrap();
    export(dir.path(), "chsh");
    let state = dir.path().join("chsh.state.json");
    let real = dir.path().join("chsh.realization.json");
    let out = dir.path().join("generated.json");
    let o = ctx(&[
        "quantum",
        state.to_str().unwrap(),
        real.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--check",
        "--json",
        "--no-timing",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: QuantumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.class.unwrap().to_string(), "ProbabilisticallyContextual");
    let written: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let expected: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("chsh.model.json")).unwrap()).unwrap();
    assert_eq!(written["table"], expected["table"]);
    assert_eq!(r.model, written);
    assert_eq!(written["table"]["A2,B2"], json!(["1/8", "3/8", "3/8", "1/8"]));

    let o = ctx(&["analyze", out.to_str().unwrap(), "--json", "--no-timing"]);
    let a: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(a.class.unwrap().to_string(), "ProbabilisticallyContextual");
}

fn z_projectors() -> Value {
    let zero = [0.0, 0.0];
    let one = [1.0, 0.0];
    json!([[[one, zero], [zero, zero]], [[zero, zero], [zero, one]]])
}

fn x_projectors() -> Value {
    let h = [0.5, 0.0];
    let m = [-0.5, 0.0];
    json!([[[h, h], [h, h]], [[h, m], [m, h]]])
}

fn single_pair_scenario() -> Value {
    json!({ "measurements": ["P", "Q"], "outcomes": ["0", "1"], "cover": [["P", "Q"]] })
}

#[test]
fn quantum_basis_state_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let state = write_json(dir.path(), "s.json", &json!({ "dimension": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]] }));
    let real = json!({
        "scenario": single_pair_scenario(),
        "dimension": 2,
        "observables": [
            { "measurement": "Q", "projectors": z_projectors() },
            { "measurement": "P", "projectors": z_projectors() }
        ]
    });
    let real = write_json(dir.path(), "r.json", &real);
    let o = ctx(&["quantum", &state, &real, "--check", "--json", "--no-timing"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: QuantumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.model["table"]["P,Q"], json!(["1/1", "0/1", "0/1", "0/1"]));
    assert_eq!(r.class.unwrap().to_string(), "Noncontextual");
}

#[test]
fn quantum_non_commuting_pair_is_named() {
    let dir = TempDir::new().unwrap();
    let state = write_json(dir.path(), "s.json", &json!({ "dimension": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]] }));
    let real = json!({
        "scenario": single_pair_scenario(),
        "dimension": 2,
        "observables": [
            { "measurement": "P", "projectors": z_projectors() },
            { "measurement": "Q", "projectors": x_projectors() }
        ]
    });
    let real = write_json(dir.path(), "r.json", &real);
    let o = ctx(&["quantum", &state, &real]);
    assert_eq!(code(&o), 65);
    let err = stderr(&o);
    assert!(err.contains('P') && err.contains('Q'), "{err}");
}

#[test]
fn json_reports_are_byte_identical_without_timing() {
    let runs = [
        vec!["analyze", "builtin:chsh", "--json", "--no-timing"],
        vec!["graph", "invariants", "builtin:yu-oh", "--json", "--no-timing"],
        vec!["scenarios", "list", "--json"],
        vec!["fixtures", "check", "kcbs", "--json", "--no-timing"],
    ];
    for args in runs {
        let a = ctx(&args);
        let b = ctx(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let o = ctx(&["analyze", "builtin:chsh", "--json"]);
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.timing_ms.is_some());
}

#[test]
fn reports_round_trip() {
    let o = ctx(&["analyze", "builtin:kcbs", "--json"]);
    let r: AnalysisReport = serde_json::from_str(&stdout(&o)).unwrap();
    let again: AnalysisReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, again);

    let o = ctx(&["graph", "invariants", "builtin:chsh-graph-16", "--json"]);
    let r: GraphReport = serde_json::from_str(&stdout(&o)).unwrap();
    let again: GraphReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, again);

    let o = ctx(&["fixtures", "check", "yu-oh", "--json"]);
    let r: FixtureCheckReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.checks.iter().all(|c| c.passed));
    let again: FixtureCheckReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, again);
}

#[test]
fn text_and_json_agree() {
    let text = stdout(&ctx(&["graph", "invariants", "builtin:yu-oh", "--no-timing"]));
    let r = graph_report("builtin:yu-oh");
    let alpha = r.alpha.unwrap();
    assert!(text.contains(&format!("alpha: {} witness {:?}", alpha.value, alpha.witness)));
    assert!(text.contains(&format!("theta: {}", r.theta.unwrap().value)));
    assert!(text.contains(&format!("alpha*: {}", r.alpha_star.unwrap().value)));
}

#[test]
fn fixtures_export_round_trips_through_analyze() {
    let dir = TempDir::new().unwrap();
    for name in ["chsh", "pr-box", "kcbs", "peres-mermin"] {
        export(dir.path(), name);
        let file = dir.path().join(format!("{name}.model.json"));
        let from_file = ctx(&["analyze", file.to_str().unwrap(), "--json", "--no-timing"]);
        let builtin = ctx(&["analyze", &format!("builtin:{name}"), "--json", "--no-timing"]);
        let a: AnalysisReport = serde_json::from_str(&stdout(&from_file)).unwrap();
        let b: AnalysisReport = serde_json::from_str(&stdout(&builtin)).unwrap();
        assert_eq!(a.class, b.class, "{name}");
        assert_eq!(a.feasibility, b.feasibility, "{name}");
    }
    assert_eq!(code(&ctx(&["fixtures", "export", "nope", "--dir", dir.path().to_str().unwrap()])), 66);
}
