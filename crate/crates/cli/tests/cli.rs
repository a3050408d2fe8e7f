use std::path::PathBuf;
use std::process::{Command, Output};

use pseudocalc::hardy::{Envelope, HardyReport, SCHEMA_VERSION};
use pseudocalc::harness::{CampaignReport, ConvergenceReport, Reproduction};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pseudocalc"));
    cmd.env_remove("PSEUDOCALC_MAX_DEPTH");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn json_value(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn integrate_sqrt_generator_square() {
    let o = run(&["--format", "json", "integrate", "--f", "x^2*y^2", "--g", "sqrt", "--dim", "2", "--domain", "0,1,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_value(&o);
    assert_eq!(v["schema_version"], 1);
    let value = v["report"]["value"].as_f64().unwrap();
    assert!((value - 1.0 / 16.0).abs() < 1e-9, "{value}");
    assert_eq!(v["report"]["status"], "converged");
}

#[test]
fn integrate_identity_line() {
    let o = run(&["integrate", "--f", "x", "--g", "identity", "--dim", "1", "--domain", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value       0.5\n"), "{}", stdout(&o));
}

#[test]
fn integrate_divergent_exits_two() {
    let o = run(&["integrate", "--f", "(x*y)^(-2)", "--g", "sqrt", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("diverged"));
}

#[test]
fn integrate_sup_and_sugeno() {
    let o = run(&["--format", "json", "integrate", "--f", "x*y", "--semiring", "suptimes", "--psi", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((json_value(&o)["report"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = run(&["--format", "json", "integrate", "--f", "min(x,y)", "--sugeno"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_value(&o)["report"]["value"].as_f64().unwrap();
    assert!((v - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-3, "{v}");

    let o = run(&["--format", "json", "integrate", "--f", "x", "--semiring", "g:half", "--dim", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((json_value(&o)["report"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn parse_errors_point_at_the_offending_character() {
    let o = run(&["integrate", "--f", "x^^2", "--g", "sqrt"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("position 2"), "{err}");
    assert!(err.contains("  x^^2\n    ^"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["integrate", "--f", "x"]).status.code(), Some(1));
    assert_eq!(run(&["integrate", "--f", "x", "--g", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["integrate", "--f", "x*y", "--g", "sqrt", "--dim", "1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn hardy_scenario_file_holds() {
    let path = scenario("ex33.json");
    let o = run(&["--format", "json", "hardy", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env: Envelope<HardyReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(env.schema_version, SCHEMA_VERSION);
    assert_eq!(env.report.holds, Some(true));
    assert!((env.report.lhs.unwrap() - 14.0 / 192.0).abs() < 1e-6);
    assert!((env.report.rhs.unwrap() - 14.0 / 3.0).abs() < 1e-6);
}

#[test]
fn hardy_below_theorem_regime_suggests_diagnostics() {
    let o = run(&["hardy", "--f", "x*y", "--g", "identity", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--diagnostics"), "{}", stderr(&o));

    let o = run(&["--format", "json", "hardy", "--f", "x^2*y^2", "--g", "sqrt", "--p", "0", "--diagnostics"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_value(&o);
    assert!((v["report"]["criterion_value"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-8);
    assert_eq!(v["report"]["holds"], false);

    let o = run(&["hardy", "--f", "x^2*y^2", "--g", "sqrt", "--p", "-2", "--diagnostics"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exponent_accepts_constant_expressions() {
    let o = run(&["--format", "json", "hardy", "--f", "x^2*y^2", "--g", "sqrt", "--p", "1/6", "--diagnostics"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json_value(&o);
    assert_eq!(v["report"]["p"].as_f64().unwrap(), 1.0 / 6.0);
    assert_eq!(v["report"]["branch"], "fractional_power");

    let o = run(&["hardy", "--f", "x*y", "--g", "identity", "--p", "x+1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected a constant"), "{}", stderr(&o));
}

#[test]
fn hardy_json_round_trips() {
    let o = run(&["--format", "json", "hardy", "--f", "x*y", "--semiring", "suptimes", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env: Envelope<HardyReport> = serde_json::from_slice(&o.stdout).unwrap();
    let again = serde_json::to_string_pretty(&env).unwrap() + "\n";
    assert_eq!(again, stdout(&o));
    let back: Envelope<HardyReport> = serde_json::from_str(&again).unwrap();
    assert_eq!(back, env);
}

#[test]
fn reproduce_reports_both_columns() {
    let o = run(&["--format", "json", "reproduce", "ex33"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env: Envelope<Reproduction> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(env.report.matches);
    assert!(env.report.values.iter().all(|v| v.agrees != Some(false)));

    let o = run(&["reproduce", "ex32"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(1/25)^2") && text.contains("NO"), "{text}");

    let o = run(&["reproduce", "remark35a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recomputed verdict fails"));

    assert_eq!(run(&["reproduce", "ex99"]).status.code(), Some(1));
}

#[test]
fn every_fixture_matches_its_published_verdict() {
    for name in pseudocalc::harness::FIXTURE_NAMES {
        let o = run(&["reproduce", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn csv_rows_are_flat() {
    let o = run(&["--format", "csv", "reproduce", "ex33"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "published") && headers.iter().any(|h| h == "recomputed"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 4);
    assert!(rows.iter().all(|r| r.len() == headers.len()));

    let o = run(&["--format", "csv", "integrate", "--f", "x", "--g", "identity", "--dim", "1"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.lines().nth(1).unwrap().contains(",0.5,"));
}

#[test]
fn fuzz_small_campaign_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.json");
    std::fs::write(
        &config,
        r#"{"seed": 11, "trials": 4, "config": {"pointwise_grid": 4, "sup_hardy_levels": 5, "sugeno_hardy_grid": 32}}"#,
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let corpus = dir.path().join("corpus");
    let o = run(&[
        "--format",
        "json",
        "--output",
        out.to_str().unwrap(),
        "fuzz",
        "--config",
        config.to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let env: Envelope<CampaignReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(env.report.trials, 4);
    assert_eq!(env.report.seed, 11);
    assert_eq!(env.report.holds, 4);
    assert!(!corpus.exists(), "nothing flagged, nothing written");

    let o = run(&["--format", "csv", "fuzz", "--config", config.to_str().unwrap(), "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);

    std::fs::write(&config, r#"{"p_values": [0.5]}"#).unwrap();
    assert_eq!(run(&["fuzz", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn refine_reports_levels() {
    let o = run(&["--format", "json", "refine", "--f", "x^2*y^2", "--g", "identity", "--p", "2", "--levels", "1,2,3,4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env: Envelope<ConvergenceReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(env.report.levels.len(), 4);
    assert!(env.report.estimated_order.unwrap() > 3.0);
    assert_eq!(run(&["refine", "--f", "x", "--g", "identity", "--p", "2", "--levels", "3,2"]).status.code(), Some(1));
}

#[test]
fn max_depth_override_reaches_the_config() {
    let o = bin()
        .args(["--format", "json", "integrate", "--f", "x", "--g", "identity", "--dim", "1"])
        .env("PSEUDOCALC_MAX_DEPTH", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_value(&o)["config"]["quadrature"]["max_depth"], 7);
}

#[test]
fn shipped_campaign_config_is_the_default() {
    let text = std::fs::read_to_string(scenario("default.json")).unwrap();
    let cfg: pseudocalc::harness::FuzzConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(cfg, pseudocalc::harness::FuzzConfig::default());
}

#[test]
fn flagged_trials_land_in_the_corpus_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("steep.json");
    std::fs::write(
        &config,
        r#"{"trials": 3, "kinds": ["g_hardy"], "generators": ["power:2"], "families": ["affine-mean"],
            "config": {"pointwise_grid": 4}}"#,
    )
    .unwrap();
    let corpus = dir.path().join("corpus");
    let o = run(&["fuzz", "--config", config.to_str().unwrap(), "--corpus", corpus.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("flagged trial"));
    let mut files: Vec<PathBuf> = std::fs::read_dir(&corpus).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 3);
    assert!(files[0].ends_with("trial-00000.json"));
    for file in &files {
        let o = run(&["hardy", "--scenario", file.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
        assert!(stderr(&o).contains("outside [0, 1]"), "{}", stderr(&o));
    }
}
