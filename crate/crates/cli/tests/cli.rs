use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stratclass::costs::scale_for_budget;
use stratclass::game::{jury_payoff, Classifier, Search};
use stratclass::io::{read_json, read_population_file};
use stratclass::CostModel64;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn stratclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stratclass(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    stratclass(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn separable_training_on_the_line_gives_threshold_8() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    ok(&[
        "train",
        "--algo",
        "separable",
        "--cost",
        s(&data("line_cost.json")),
        "--data",
        s(&data("line.csv")),
        "--out",
        s(&model),
    ]);
    let v: serde_json::Value = read_json(&model).unwrap();
    assert_eq!(v["algo"], "separable");
    assert_eq!(v["classifier"]["t"], 8.0);
    assert_eq!(v["metadata"]["threshold"], 8.0);
    assert_eq!(v["metadata"]["effective_threshold"], 6.0);
}

fn evaluate(model: &Path, cost: &Path, pop: &Path, gaming: &str, out: &Path) -> serde_json::Value {
    ok(&[
        "evaluate",
        "--model",
        s(model),
        "--cost",
        s(cost),
        "--data",
        s(pop),
        "--gaming",
        gaming,
        "--out",
        s(out),
    ]);
    read_json(out).unwrap()
}

#[test]
fn train_then_evaluate_matches_in_process_payoff() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let model = dir.path().join("model.json");
    let report = dir.path().join("eval.json");
    ok(&["gen-data", "--n", "120", "--seed", "5", "--out", s(&pop)]);
    ok(&[
        "train",
        "--algo",
        "baseline",
        "--data",
        s(&pop),
        "--out",
        s(&model),
        "--seed",
        "2",
    ]);

    let file: serde_json::Value = read_json(&model).unwrap();
    let f: Classifier<f64> = serde_json::from_value(file["classifier"].clone()).unwrap();
    let population = read_population_file::<f64>(&pop).unwrap();
    let alpha: Vec<f64> = (0..population.dim())
        .map(|j| if j % 2 == 0 { 1.0 } else { -0.5 })
        .collect();
    let cost = CostModel64::mixed(alpha, 0.2);
    let cost_path = dir.path().join("cost.json");
    std::fs::write(&cost_path, serde_json::to_string(&cost).unwrap()).unwrap();

    for t in ["0.5", "2", "3.25"] {
        let got = evaluate(&model, &cost_path, &pop, t, &report);
        let scaled = scale_for_budget(&cost, &t.parse::<f64>().unwrap()).unwrap();
        let want = jury_payoff(&f, &scaled, &population, Search::Auto).unwrap();
        assert_eq!(got["accuracy"].as_f64().unwrap(), want, "t = {t}");
    }
}

#[test]
fn tiny_gaming_budget_is_plain_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let report = dir.path().join("eval.json");
    ok(&[
        "train",
        "--algo",
        "separable",
        "--cost",
        s(&data("line_cost.json")),
        "--data",
        s(&data("line.csv")),
        "--out",
        s(&model),
    ]);
    let r = evaluate(
        &model,
        &data("line_cost.json"),
        &data("line.csv"),
        "0.0001",
        &report,
    );
    assert_eq!(r["accuracy"], r["no_gaming_accuracy"]);
}

#[test]
fn unsat_two_clause_instance_sits_at_its_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst");
    ok(&[
        "sat",
        "--cnf",
        s(&data("unsat2.cnf")),
        "--k",
        "200",
        "--verify",
        "--mode",
        "full",
        "--out",
        s(&out),
    ]);
    for f in [
        "population.csv",
        "cost.json",
        "index_map.json",
        "instance.json",
        "report.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let r: serde_json::Value = read_json(out.join("report.json")).unwrap();
    assert_eq!(r["satisfiable"], false);
    assert_eq!(r["optimum"], r["instance_baseline"]);
    assert_eq!(r["optimum"], 1000.0);
    let pop = read_population_file::<f64>(out.join("population.csv")).unwrap();
    let cost: CostModel64 = read_json(out.join("cost.json")).unwrap();
    assert!(cost.validate().is_ok());
    assert_eq!(pop.len(), 8);
}

#[test]
fn satisfiable_instance_beats_its_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst");
    ok(&[
        "sat",
        "--cnf",
        s(&data("sat2.cnf")),
        "--k",
        "200",
        "--verify",
        "--out",
        s(&out),
        "--workers",
        "2",
    ]);
    let r: serde_json::Value = read_json(out.join("report.json")).unwrap();
    assert_eq!(r["satisfiable"], true);
    assert_eq!(r["pass"], true);
    assert!(r["optimum"].as_f64().unwrap() >= 1200.0);
}

#[test]
fn oracle_and_sweep_ignore_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    for w in ["1", "3"] {
        ok(&[
            "oracle",
            "--data",
            s(&data("table.csv")),
            "--cost",
            s(&data("table_cost.json")),
            "--out",
            s(&p(&format!("o{w}.json"))),
            "--workers",
            w,
        ]);
        ok(&[
            "sweep",
            "hybrid",
            "--config",
            s(&data("sweep_small.json")),
            "--out",
            s(&p(&format!("h{w}.csv"))),
            "--workers",
            w,
        ]);
    }
    let read = |n: &str| std::fs::read(p(n)).unwrap();
    assert_eq!(read("o1.json"), read("o3.json"));
    assert_eq!(read("h1.csv"), read("h3.csv"));
    let o: serde_json::Value = read_json(p("o1.json")).unwrap();
    assert_eq!(o["opt_payoff"], 0.75);
}

#[test]
fn commands_are_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    for run in ["a", "b"] {
        let pop = p(&format!("{run}.csv"));
        ok(&[
            "gen-data",
            "--n",
            "60",
            "--seed",
            "9",
            "--separation",
            "2",
            "--out",
            s(&pop),
        ]);
        ok(&[
            "train",
            "--algo",
            "baseline",
            "--data",
            s(&pop),
            "--seed",
            "4",
            "--out",
            s(&p(&format!("{run}.json"))),
        ]);
        ok(&[
            "sweep",
            "angle",
            "--config",
            s(&data("sweep_small.json")),
            "--out",
            s(&p(&format!("{run}-angle.csv"))),
        ]);
    }
    for (a, b) in [
        ("a.csv", "b.csv"),
        ("a.json", "b.json"),
        ("a-angle.csv", "b-angle.csv"),
    ] {
        assert_eq!(std::fs::read(p(a)).unwrap(), std::fs::read(p(b)).unwrap());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let (line, cost) = (data("line.csv"), data("line_cost.json"));
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["validate-cost", "--cost", s(&cost), "--verbose"]), 1);
    assert_eq!(
        code(&[
            "train",
            "--algo",
            "perceptron",
            "--data",
            s(&line),
            "--out",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&[
            "train",
            "--algo",
            "separable",
            "--data",
            s(&line),
            "--out",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&[
            "evaluate",
            "--model",
            s(&out),
            "--cost",
            s(&cost),
            "--data",
            s(&line),
            "--gaming",
            "0"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "train",
            "--algo",
            "separable",
            "--cost",
            s(&cost),
            "--data",
            "/no/such.csv",
            "--out",
            s(&out)
        ]),
        2
    );
    assert_eq!(
        code(&[
            "train",
            "--algo",
            "separable",
            "--cost",
            s(&data("unsat2.cnf")),
            "--data",
            s(&line),
            "--out",
            s(&out)
        ]),
        2
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"type":"tabular","matrix":[[0,-1],[2,0]]}"#).unwrap();
    assert_eq!(code(&["validate-cost", "--cost", s(&bad)]), 2);
    assert_eq!(code(&["validate-cost", "--cost", s(&cost)]), 0);

    let big = dir.path().join("big.csv");
    ok(&["gen-data", "--n", "30", "--out", s(&big)]);
    assert_eq!(
        code(&[
            "oracle",
            "--data",
            s(&big),
            "--cost",
            s(&data("mixed_cost.json")),
            "--out",
            s(&out)
        ]),
        3
    );
}

#[test]
fn golden_files_parse() {
    use stratclass::experiments::ExperimentConfig;
    use stratclass::oracle::CnfFormula;

    let cfg: ExperimentConfig = read_json(data("experiment_default.json")).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    let small: ExperimentConfig = read_json(data("sweep_small.json")).unwrap();
    small.validate().unwrap();
    for c in ["line_cost.json", "table_cost.json", "mixed_cost.json"] {
        read_json::<CostModel64>(data(c))
            .unwrap()
            .validate()
            .unwrap();
    }
    for p in ["line.csv", "table.csv"] {
        read_population_file::<f64>(data(p)).unwrap();
    }
    for f in ["unsat2.cnf", "sat2.cnf"] {
        CnfFormula::parse_dimacs(&std::fs::read_to_string(data(f)).unwrap()).unwrap();
    }
}
