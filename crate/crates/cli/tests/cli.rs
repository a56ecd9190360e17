mod common;

use std::fs;

use common::{fixture, run, stderr, stdout, summary, summary_value};
use stackboost::diagnostics::{nemenyi_cd, Confidence};
use stackboost::document::ModelDocument;
use stackboost::io::read_prediction_matrix;
use stackboost::methods::per_model_losses;
use stackboost::Method;

fn fit_to(dir: &tempfile::TempDir, extra: &[&str]) -> ModelDocument {
    let out = dir.path().join("model.toml");
    let mut args = vec!["fit", "--input"];
    let input = fixture("matrix.csv");
    args.push(input.to_str().unwrap());
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--output", out.to_str().unwrap()]);
    let res = run(&args);
    assert!(res.status.success(), "{}", stderr(&res));
    ModelDocument::from_toml(&fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn fitted_rboost_document_reloads_and_predicts_identically() {
    let dir = tempfile::tempdir().unwrap();
    let doc = fit_to(&dir, &["--method", "rboost", "--stop", "icm"]);
    assert_eq!(doc.method, "rboost");
    assert_eq!(doc.stop.as_deref(), Some("icm"));
    assert_eq!(doc.library_version, env!("CARGO_PKG_VERSION"));

    let (x, y) = read_prediction_matrix(fs::File::open(fixture("matrix.csv")).unwrap()).unwrap();
    let method = Method::parse("rboost", Some("icm")).unwrap();
    let lib = method.fit(&x, &y, &per_model_losses(&x, &y)).unwrap();
    assert_eq!(
        doc.model().predict(&x).unwrap(),
        lib.model.predict(&x).unwrap()
    );
    assert_eq!(doc.weights, lib.model.weights);
    assert_eq!(doc.stage, lib.model.trace);
}

#[test]
fn fitted_gem_weights_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = fit_to(&dir, &["--method", "gem"]);
    let total: f64 = doc.weights.iter().map(|w| w.weight).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(doc.weights.iter().all(|w| w.weight >= 0.0));
    assert_eq!(doc.bias, 0.0);
}

#[test]
fn boost_aicc_trace_matches_library_fit() {
    let dir = tempfile::tempdir().unwrap();
    let doc = fit_to(&dir, &["--method", "boost", "--stop", "aicc"]);
    let (x, y) = read_prediction_matrix(fs::File::open(fixture("matrix.csv")).unwrap()).unwrap();
    let lib = Method::parse("boost", Some("aicc"))
        .unwrap()
        .fit(&x, &y, &[])
        .unwrap();
    assert_eq!(doc.stage.len(), lib.model.trace.len());
    assert!(!doc.stage.is_empty());
}

#[test]
fn fit_without_output_prints_the_document() {
    let input = fixture("matrix.csv");
    let res = run([
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--method",
        "pls",
        "--stop",
        "bic",
    ]);
    assert!(res.status.success());
    let doc = ModelDocument::from_toml(&stdout(&res)).unwrap();
    assert_eq!(doc.method, "pls");
    assert!(doc.chosen_k.is_some());
}

#[test]
fn compare_two_methods_on_two_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let (a, b) = (fixture("small_a.csv"), fixture("small_b.csv"));
    let res = run([
        "compare",
        "--inputs",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--methods",
        "bem,ols",
        "--trials",
        "6",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let cells: Vec<Vec<String>> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(cells.len(), 4);
    let mut mean = [0.0; 2];
    for pair in cells.chunks(2) {
        let (e0, e1): (f64, f64) = (pair[0][2].parse().unwrap(), pair[1][2].parse().unwrap());
        let (r0, r1): (f64, f64) = (pair[0][3].parse().unwrap(), pair[1][3].parse().unwrap());
        let expected = if e0 < e1 {
            (1.0, 2.0)
        } else if e0 > e1 {
            (2.0, 1.0)
        } else {
            (1.5, 1.5)
        };
        assert_eq!((r0, r1), expected);
        mean[0] += r0 / 2.0;
        mean[1] += r1 / 2.0;
    }
    let rows = summary(&fs::read_to_string(dir.path().join("cmp.summary.csv")).unwrap());
    assert_eq!(summary_value(&rows, "mean_rank:bem"), mean[0]);
    assert_eq!(summary_value(&rows, "mean_rank:ols"), mean[1]);
    let cd = nemenyi_cd(2, 2, Confidence::P95).unwrap();
    assert_eq!(summary_value(&rows, "critical_difference"), cd);
}

#[test]
fn compare_critical_difference_matches_the_formula() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let res = run([
        "compare",
        "--suite",
        "15",
        "--methods",
        "ols,gem,bem,caruana,boost-icm,rboost-icm",
        "--sampler",
        "rs",
        "--trials",
        "10",
        "--confidence",
        "0.90",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let rows = summary(&fs::read_to_string(dir.path().join("cmp.summary.csv")).unwrap());
    let cd = nemenyi_cd(6, 15, Confidence::P90).unwrap();
    assert_eq!(summary_value(&rows, "critical_difference"), cd);
    assert!(stdout(&res).contains(&format!("critical difference (90%): {cd:.4}")));
}

#[test]
fn compare_flags_the_pair_exactly_when_the_gap_exceeds_cd() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let res = run([
        "compare",
        "--suite",
        "12",
        "--suite-seed",
        "4",
        "--methods",
        "ols,rboost-icm",
        "--sampler",
        "rs",
        "--trials",
        "12",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let rows = summary(&fs::read_to_string(dir.path().join("cmp.summary.csv")).unwrap());
    let gap = (summary_value(&rows, "mean_rank:ols")
        - summary_value(&rows, "mean_rank:rboost-icm"))
    .abs();
    let cd = summary_value(&rows, "critical_difference");
    let text = stdout(&res);
    let flagged = text.contains("rboost-icm < ols") || text.contains("ols < rboost-icm");
    assert_eq!(flagged, gap > cd, "{text}");
}

#[test]
fn compare_needs_two_methods_and_two_datasets() {
    let a = fixture("small_a.csv");
    let res = run([
        "compare",
        "--inputs",
        a.to_str().unwrap(),
        "--methods",
        "bem,ols",
    ]);
    assert_eq!(res.status.code(), Some(5));
    let res = run(["compare", "--suite", "3", "--methods", "bem"]);
    assert_eq!(res.status.code(), Some(5));
    let res = run([
        "compare",
        "--suite",
        "3",
        "--methods",
        "bem,ols",
        "--confidence",
        "0.99",
    ]);
    assert_eq!(res.status.code(), Some(5));
}

#[test]
fn compare_fails_fast_and_names_the_method() {
    let (a, c) = (fixture("small_a.csv"), fixture("constant_target.csv"));
    let res = run([
        "compare",
        "--inputs",
        a.to_str().unwrap(),
        c.to_str().unwrap(),
        "--methods",
        "bem,boost-icm",
        "--trials",
        "6",
    ]);
    assert_eq!(res.status.code(), Some(4));
    let err = stderr(&res);
    assert!(err.contains("constant_target"), "{err}");
    assert!(
        err.contains("`bem`") || err.contains("`boost-icm`"),
        "{err}"
    );
    assert!(stdout(&res).is_empty());
}

fn bucket_row(text: &str, label: &str) -> (String, String) {
    let line = text.lines().find(|l| l.starts_with(label)).unwrap();
    let parts: Vec<&str> = line.split_whitespace().collect();
    (parts[1].to_string(), parts[2].to_string())
}

#[test]
fn vif_buckets_for_fixtures() {
    let dup = fixture("duplicate.csv");
    let text = stdout(&run(["vif", "--input", dup.to_str().unwrap()]));
    assert_eq!(
        bucket_row(&text, "[1000,inf)"),
        ("4".into(), "100.00".into())
    );
    let orth = fixture("orthogonal.csv");
    let text = stdout(&run(["vif", "--input", orth.to_str().unwrap()]));
    assert_eq!(bucket_row(&text, "[1,5)"), ("3".into(), "100.00".into()));
}

#[test]
fn vif_of_generated_ridge_matrix_is_high() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("vif.csv");
    let m = fixture("matrix.csv");
    let res = run([
        "vif",
        "--input",
        m.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let cols = fs::read_to_string(dir.path().join("vif.columns.csv")).unwrap();
    let vifs: Vec<f64> = cols
        .lines()
        .skip(1)
        .map(|l| l.rsplit_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(vifs.len(), 8);
    let above = vifs.iter().filter(|&&v| v > 10.0).count() as f64 / vifs.len() as f64;
    assert!(above >= 0.9);
}

#[test]
fn help_lists_the_registered_names() {
    let res = run(["fit", "--help"]);
    assert_eq!(res.status.code(), Some(0));
    let text = stdout(&res);
    assert!(text.contains(
        "[possible values: best, bem, iew, gem, ols, fsr, pcr, pls, caruana, boost, rboost]"
    ));
    assert!(text.contains("[possible values: aic, aicc, bic, hqic, gmdl, icm]"));
    let text = stdout(&run(["evaluate", "--help"]));
    assert!(text.contains("best, bem, iew, gem, ols, fsr, pcr, pls, caruana, boost, rboost"));
    assert_eq!(run(["--version"]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let m = fixture("matrix.csv");
    let m = m.to_str().unwrap();
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["fit", "--input", m, "--method", "fsr", "--stop", "icm"]),
        Some(5)
    );
    assert_eq!(
        code(&["fit", "--input", m, "--method", "gem", "--stop", "aic"]),
        Some(5)
    );
    assert_eq!(code(&["fit", "--input", m, "--method", "lasso"]), Some(5));
    assert_eq!(code(&["frobnicate"]), Some(5));
    assert_eq!(code(&[]), Some(5));
    let bad = fixture("malformed.csv");
    assert_eq!(
        code(&["fit", "--input", bad.to_str().unwrap(), "--method", "ols"]),
        Some(2)
    );
    assert_eq!(
        code(&["vif", "--input", "/nonexistent/matrix.csv"]),
        Some(2)
    );
    let one = fixture("one_row.csv");
    assert_eq!(
        code(&["fit", "--input", one.to_str().unwrap(), "--method", "ols"]),
        Some(3)
    );
    let ds = fixture("dataset.csv");
    // a dataset is not a prediction matrix: the target column is missing
    assert_eq!(code(&["vif", "--input", ds.to_str().unwrap()]), Some(2));
    let res = run(["fit", "--input", m, "--method", "pcr", "--stop", "icm"]);
    assert_eq!(stderr(&res).lines().count(), 1);
}

#[test]
fn generate_commands_write_readable_files() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.csv");
    let mx = dir.path().join("m.csv");
    let res = run([
        "generate",
        "dataset",
        "--kind",
        "linear",
        "--rows",
        "30",
        "--features",
        "3",
        "--seed",
        "5",
        "--output",
        ds.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let res = run([
        "generate",
        "matrix",
        "--input",
        ds.to_str().unwrap(),
        "--trials",
        "7",
        "--sampler",
        "rs",
        "--output",
        mx.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let (x, y) = read_prediction_matrix(fs::File::open(&mx).unwrap()).unwrap();
    assert_eq!((x.nrows(), x.ncols(), y.len()), (30, 7, 30));
}
