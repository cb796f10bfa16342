mod common;

use std::path::Path;
use std::process::{Command, Output};

use baytta::bma::{run_bma, BmaConfig};
use baytta::cli::{cmd_simulate, evaluate_table, EvalArgs, EvalOptions, SimulateArgs};
use baytta::data::{save_csv, synthesize, SyntheticConfig};
use baytta::logreg::{fit_logistic, DesignMatrix, FitConfig};
use baytta::report::{Protocol, RunReport, SimulationReport};
use baytta::rng::child_seeds;
use common::{greedy_linear_oracle, max_abs_diff, seed42_table};

fn baytta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baytta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn fixture_csv(dir: &Path) -> String {
    let p = dir.join("seed42.csv");
    save_csv(&seed42_table(), &p).unwrap();
    p.to_str().unwrap().to_owned()
}

fn read_report(path: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn transductive_aggregate_matches_oracle_inclusion() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture_csv(dir.path());
    let json = dir.path().join("r.json");
    let o = baytta(&[
        "aggregate",
        "--input",
        &csv,
        "--protocol",
        "transductive",
        "--mode",
        "greedy",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("baytta") && stdout.contains("tta_mean"));
    let r = read_report(&json);
    let oracle = greedy_linear_oracle(&seed42_table());
    assert!(max_abs_diff(&r.inclusion_prob, &oracle.inclusion) < 1e-9);
    assert!(max_abs_diff(&r.expected_coeffs, &oracle.coeffs) < 1e-9);
    assert_eq!(r.n_fit_rows, 200);
    assert_eq!(r.n_eval_rows, 200);
    assert_eq!(r.split_fraction, None);
}

#[test]
fn single_column_accuracy_equals_logistic_regression() {
    let dir = tempfile::tempdir().unwrap();
    let t = seed42_table().select_columns(&[1]);
    let csv = dir.path().join("k0.csv");
    save_csv(&t, &csv).unwrap();
    let json = dir.path().join("r.json");
    let o = baytta(&[
        "aggregate",
        "--input",
        csv.to_str().unwrap(),
        "--protocol",
        "transductive",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = fit_logistic(
        &DesignMatrix::from_table(&t, &[0]).unwrap(),
        &FitConfig::default(),
    )
    .unwrap();
    let hits = (0..t.n_rows())
        .filter(|&i| (m.probability(&t.row(i)) >= 0.5) == t.labels()[i])
        .count();
    assert_eq!(
        read_report(&json).baytta.accuracy,
        hits as f64 / t.n_rows() as f64
    );
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        (write(d, "empty.csv", "label,pred_0\n"), "no data rows"),
        (write(d, "blank.csv", ""), "header"),
        (
            write(d, "range.csv", "label,pred_0\n1,0.9\n0,1.5\n"),
            "line 3",
        ),
        (
            write(d, "ragged.csv", "label,pred_0,pred_1\n1,0.9,0.8\n0,0.1\n"),
            "line 3",
        ),
        (
            write(d, "label.csv", "label,pred_0\n1,0.9\nyes,0.1\n"),
            "line 3",
        ),
        (d.join("missing.csv").to_str().unwrap().to_owned(), "error"),
    ];
    for (path, needle) in &cases {
        let o = baytta(&["aggregate", "--input", path]);
        assert_eq!(o.status.code(), Some(2), "{path}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{path}: {}", stderr(&o));
    }
}

#[test]
fn invalid_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture_csv(dir.path());
    let o = baytta(&["aggregate", "--input", &csv, "--split-fraction", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("evaluation set would be empty"));
    for args in [
        vec!["simulate", "--trials", "0"],
        vec!["simulate", "--columns", "3", "--adversarial", "3"],
        vec!["simulate", "--flip-rate", "0.5"],
        vec!["simulate", "--mode", "exhaustive"],
        vec!["aggregate"],
    ] {
        let o = baytta(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn single_class_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "one.csv",
        "label,pred_0\n1,0.9\n1,0.2\n1,0.7\n1,0.4\n",
    );
    let o = baytta(&["aggregate", "--input", &csv, "--protocol", "transductive"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn unwritable_json_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture_csv(dir.path());
    let target = dir.path().join("no_such_dir").join("r.json");
    let o = baytta(&[
        "aggregate",
        "--input",
        &csv,
        "--json",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_report_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let csv = fixture_csv(dir.path());
    let mut bytes = Vec::new();
    for name in ["a.json", "b.json"] {
        let json = dir.path().join(name);
        let o = baytta(&[
            "aggregate",
            "--input",
            &csv,
            "--mode",
            "full",
            "--json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        bytes.push(std::fs::read_to_string(&json).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let parsed: RunReport = serde_json::from_str(&bytes[0]).unwrap();
    assert_eq!(parsed.to_json(), bytes[0]);
    assert!(bytes[0].starts_with("{\n  \"schema_version\": 1,"));

    let sim = dir.path().join("sim.json");
    let sim_args = [
        "simulate",
        "--trials",
        "5",
        "--adversarial",
        "3",
        "--json",
        sim.to_str().unwrap(),
    ];
    assert_eq!(baytta(&sim_args).status.code(), Some(0));
    let first = std::fs::read_to_string(&sim).unwrap();
    assert_eq!(baytta(&sim_args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&sim).unwrap(), first);
    let parsed: SimulationReport = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.to_json(), first);
}

fn simulate_args(trials: usize) -> SimulateArgs {
    SimulateArgs {
        trials,
        rows: 200,
        columns: 4,
        signal_noise: 0.5,
        adversarial: vec![3],
        flip_rate: 0.0,
        latent_mean: baytta::data::LATENT_LOGIT_MEAN,
        latent_sd: baytta::data::LATENT_LOGIT_SD,
        seed: 7,
        eval: EvalArgs::default(),
        json: None,
    }
}

#[test]
fn one_trial_is_one_aggregate() {
    let args = simulate_args(1);
    let sim = cmd_simulate(&args).unwrap();
    let seed = child_seeds(7, 1)[0];
    assert_eq!(sim.trials[0].seed, seed);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trial.csv");
    save_csv(&synthesize(&args.synthetic_config(seed)).unwrap(), &csv).unwrap();
    let json = dir.path().join("r.json");
    let seed_arg = seed.to_string();
    let o = baytta(&[
        "aggregate",
        "--input",
        csv.to_str().unwrap(),
        "--seed",
        &seed_arg,
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(&json);
    assert_eq!(sim.trials[0].baytta_accuracy, r.baytta.accuracy);
    assert_eq!(sim.trials[0].tta_mean_accuracy, r.tta_mean.accuracy);
    assert_eq!(sim.trials[0].inclusion_prob, r.inclusion_prob);
    assert_eq!(sim.trials[0].sigma_baytta, r.sigma_baytta);
    assert_eq!(sim.baytta_accuracy.std, 0.0);
}

// With identical columns BayTTA is a logistic recalibration of column 0, so its
// labels can differ from the plain mean only between 0.5 and the fitted boundary.
#[test]
fn zero_noise_columns_disagree_only_between_boundaries() {
    let mut disagreements = 0;
    for seed in child_seeds(7, 20) {
        let mut cfg = SyntheticConfig::new(200, 4, seed);
        cfg.signal_noise = 0.0;
        let t = synthesize(&cfg).unwrap();
        for j in 1..4 {
            assert_eq!(t.column(j), t.column(0));
        }
        let opts = EvalOptions::from_args(
            &EvalArgs {
                protocol: Protocol::Transductive,
                ..EvalArgs::default()
            },
            seed,
        );
        let r = evaluate_table(&t, &opts).unwrap();
        let s = run_bma(&t, &BmaConfig::default()).unwrap();
        assert_eq!(s.accepted.len(), 1);
        let (a, b) = (s.expected_intercept, s.expected_coeffs[0]);
        assert!(b > 0.0);
        let boundary = -a / b;
        let (lo, hi) = (boundary.min(0.5), boundary.max(0.5));
        let (mut bay_hits, mut tta_hits) = (0, 0);
        for (i, &p) in t.column(0).iter().enumerate() {
            let bay = a + b * p >= 0.0;
            let tta = p >= 0.5;
            if bay != tta {
                disagreements += 1;
                assert!(p >= lo && p <= hi, "row {i}: p {p} outside [{lo}, {hi}]");
            }
            bay_hits += (bay == t.labels()[i]) as usize;
            tta_hits += (tta == t.labels()[i]) as usize;
        }
        assert_eq!(r.baytta.accuracy, bay_hits as f64 / 200.0);
        assert_eq!(r.tta_mean.accuracy, tta_hits as f64 / 200.0);
    }
    assert!(disagreements > 0);
}

#[test]
fn seed7_regression_fixture() {
    let r = cmd_simulate(&simulate_args(100)).unwrap();
    // Measured by the first full run and frozen.
    assert!((r.baytta_accuracy.mean - 0.8431).abs() < 1e-12);
    assert!((r.tta_mean_accuracy.mean - 0.8426).abs() < 1e-12);
    assert!((r.baytta_accuracy.std - 0.035034126220015).abs() < 1e-12);
    assert!((r.tta_mean_accuracy.std - 0.034310931202752).abs() < 1e-12);
    assert!((r.fraction_baytta_ge_tta - 0.63).abs() < 1e-12);
    assert_eq!(r.adversarial_below_clean_trials, 21);
    assert_eq!(r.adversarial_minimal_trials, 98);
    let expected = [
        0.377062663661128,
        0.352237805328957,
        0.298691971438868,
        0.011397708767727,
    ];
    assert!(max_abs_diff(&r.mean_inclusion_prob, &expected) < 1e-12);
    assert!(r.baytta_accuracy.mean >= r.tta_mean_accuracy.mean);
}
