use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use stackboost::diagnostics::{
    friedman_ranks, nemenyi_cd, vif, Confidence, RankTable, DEFAULT_VIF_EDGES,
};
use stackboost::document::ModelDocument;
use stackboost::harness::{
    build_prediction_matrix, evaluate_methods, sample_trials, CvPlan, Dataset, EvaluationConfig,
    HyperparameterTrial, Sampler,
};
use stackboost::io::{
    read_dataset, read_prediction_matrix, write_dataset, write_prediction_matrix,
};
use stackboost::methods::per_model_losses;
use stackboost::synthetic::{collinear_suite, generate, DatasetKind};
use stackboost::{DMatrix, Error, Method, Result};

use crate::args::{
    Command, CompareArgs, EvaluateArgs, FitArgs, GenerateCommand, GenerateDatasetArgs,
    GenerateMatrixArgs, SearchArgs, VifArgs,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit(a) => fit(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Compare(a) => compare(a),
        Command::Vif(a) => vif_report(a),
        Command::Generate(GenerateCommand::Dataset(a)) => generate_dataset(a),
        Command::Generate(GenerateCommand::Matrix(a)) => generate_matrix(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    read_dataset(open(path)?, &name)
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut methods: Vec<Method> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = item.parse()?;
        if methods.contains(&m) {
            return Err(Error::InvalidConfig(format!("method `{m}` listed twice")));
        }
        methods.push(m);
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods given".into()));
    }
    Ok(methods)
}

fn trials(search: &SearchArgs) -> Result<Vec<HyperparameterTrial>> {
    if search.trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let sampler: Sampler = search.sampler.parse()?;
    Ok(sample_trials(sampler, search.trials, search.seed))
}

/// Quotes a CSV field when it needs it.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let method = Method::parse(&a.method, a.stop.as_deref())?;
    let (x, y) = read_prediction_matrix(open(&a.input)?)?;
    let losses = per_model_losses(&x, &y);
    let fit = method.fit(&x, &y, &losses)?;
    let doc = ModelDocument::new(&method, &fit);
    let text = doc.to_toml()?;
    match &a.output {
        None => print(&text),
        Some(path) => {
            write_text(path, &text)?;
            let mut s = String::new();
            writeln!(s, "method: {method}").unwrap();
            writeln!(
                s,
                "models used: {} of {}",
                fit.model.weights.len(),
                x.ncols()
            )
            .unwrap();
            writeln!(s, "bias: {}", fit.model.bias).unwrap();
            if let Some(k) = fit.chosen_k {
                writeln!(s, "chosen k: {k}").unwrap();
            }
            if let Some(reason) = fit.stop_reason {
                writeln!(s, "stages: {}", fit.model.accepted_stages().count()).unwrap();
                writeln!(s, "stop: {reason:?}").unwrap();
            }
            writeln!(s, "wrote {}", path.display()).unwrap();
            print(&s)
        }
    }
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let ds = load_dataset(&a.input)?;
    let trials = trials(&a.search)?;
    let cfg = EvaluationConfig {
        seed: a.search.seed,
        ..EvaluationConfig::default()
    };
    let scores = evaluate_methods(&ds, &trials, &cfg, &methods)?;
    let width = methods
        .iter()
        .map(|m| m.to_string().len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut s = String::new();
    writeln!(
        s,
        "dataset: {} ({} rows, {} trials)",
        ds.name,
        ds.nrows(),
        trials.len()
    )
    .unwrap();
    writeln!(
        s,
        "{:<width$}  {:>12}  {:>11}",
        "method", "relative_mse", "models_used"
    )
    .unwrap();
    for sc in &scores {
        let name = sc.method.to_string();
        writeln!(
            s,
            "{name:<width$}  {:>12.6}  {:>11}",
            sc.relative_mse, sc.models_used
        )
        .unwrap();
    }
    if let Some(path) = &a.csv {
        let mut csv = String::from("dataset,method,relative_mse,models_used\n");
        for sc in &scores {
            writeln!(
                csv,
                "{},{},{},{}",
                field(&ds.name),
                sc.method,
                sc.relative_mse,
                sc.models_used
            )
            .unwrap();
        }
        write_text(path, &csv)?;
    }
    print(&s)
}

fn compare(a: CompareArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    if methods.len() < 2 {
        return Err(Error::InvalidConfig(
            "compare needs at least 2 methods".into(),
        ));
    }
    let confidence = Confidence::from_level(a.confidence)?;
    // fail on an unsupported method count before any fitting
    nemenyi_cd(methods.len(), 1, confidence)?;
    let mut datasets = a
        .inputs
        .iter()
        .map(|p| load_dataset(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(count) = a.suite {
        datasets.extend(collinear_suite(count, a.suite_seed)?);
    }
    if datasets.len() < 2 {
        return Err(Error::InvalidConfig(
            "compare needs at least 2 datasets".into(),
        ));
    }
    let trials = trials(&a.search)?;
    let cfg = EvaluationConfig {
        seed: a.search.seed,
        ..EvaluationConfig::default()
    };
    let mut errors = DMatrix::zeros(methods.len(), datasets.len());
    for (d, ds) in datasets.iter().enumerate() {
        let scores = evaluate_methods(ds, &trials, &cfg, &methods)?;
        for (m, sc) in scores.iter().enumerate() {
            errors[(m, d)] = sc.relative_mse;
        }
    }
    let table = friedman_ranks(&errors)?;
    let cd = nemenyi_cd(methods.len(), datasets.len(), confidence)?;
    let names: Vec<String> = methods.iter().map(Method::to_string).collect();
    let ds_names: Vec<&str> = datasets.iter().map(|d| d.name.as_str()).collect();

    if let Some(path) = &a.csv {
        write_text(path, &compare_cells_csv(&table, &names, &ds_names))?;
        write_text(
            &summary_path(path),
            &compare_summary_csv(&table, &names, cd, confidence),
        )?;
    }
    print(&render_compare(&table, &names, &ds_names, cd, confidence))
}

fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.csv")
}

fn compare_cells_csv(table: &RankTable, methods: &[String], datasets: &[&str]) -> String {
    let mut s = String::from("dataset,method,relative_mse,rank\n");
    for (d, ds) in datasets.iter().enumerate() {
        for (m, name) in methods.iter().enumerate() {
            writeln!(
                s,
                "{},{name},{},{}",
                field(ds),
                table.errors[(m, d)],
                table.ranks[(m, d)]
            )
            .unwrap();
        }
    }
    s
}

fn compare_summary_csv(
    table: &RankTable,
    methods: &[String],
    cd: f64,
    confidence: Confidence,
) -> String {
    let mut s = String::from("item,value\n");
    for (name, r) in methods.iter().zip(&table.mean_ranks) {
        writeln!(s, "mean_rank:{name},{r}").unwrap();
    }
    writeln!(s, "friedman_statistic,{}", table.friedman_statistic).unwrap();
    writeln!(s, "critical_difference,{cd}").unwrap();
    writeln!(s, "confidence,{}", confidence.level()).unwrap();
    writeln!(s, "methods,{}", table.methods()).unwrap();
    writeln!(s, "datasets,{}", table.datasets()).unwrap();
    s
}

/// Pairs `(better, worse, gap)` whose mean-rank gap exceeds `cd`.
pub fn significant_pairs(mean_ranks: &[f64], cd: f64) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for i in 0..mean_ranks.len() {
        for j in (i + 1)..mean_ranks.len() {
            let gap = (mean_ranks[i] - mean_ranks[j]).abs();
            if gap > cd {
                let (b, w) = if mean_ranks[i] <= mean_ranks[j] {
                    (i, j)
                } else {
                    (j, i)
                };
                pairs.push((b, w, gap));
            }
        }
    }
    pairs
}

fn render_compare(
    table: &RankTable,
    methods: &[String],
    datasets: &[&str],
    cd: f64,
    confidence: Confidence,
) -> String {
    let mut s = String::new();
    let cells: Vec<Vec<String>> = (0..datasets.len())
        .map(|d| {
            (0..methods.len())
                .map(|m| format!("{:.4} ({})", table.errors[(m, d)], table.ranks[(m, d)]))
                .collect()
        })
        .collect();
    let dw = datasets.iter().map(|d| d.len()).max().unwrap_or(0).max(7);
    let mw: Vec<usize> = (0..methods.len())
        .map(|m| {
            cells
                .iter()
                .map(|row| row[m].len())
                .max()
                .unwrap_or(0)
                .max(methods[m].len())
        })
        .collect();
    writeln!(
        s,
        "{} methods x {} datasets, relative MSE (rank)",
        methods.len(),
        datasets.len()
    )
    .unwrap();
    write!(s, "{:<dw$}", "dataset").unwrap();
    for (m, w) in methods.iter().zip(&mw) {
        write!(s, "  {m:>w$}").unwrap();
    }
    s.push('\n');
    for (ds, row) in datasets.iter().zip(&cells) {
        write!(s, "{ds:<dw$}").unwrap();
        for (cell, w) in row.iter().zip(&mw) {
            write!(s, "  {cell:>w$}").unwrap();
        }
        s.push('\n');
    }
    s.push('\n');
    let mut order: Vec<usize> = (0..methods.len()).collect();
    order.sort_by(|&a, &b| {
        table.mean_ranks[a]
            .total_cmp(&table.mean_ranks[b])
            .then(a.cmp(&b))
    });
    let nw = methods.iter().map(String::len).max().unwrap_or(6).max(6);
    writeln!(s, "{:<nw$}  {:>9}", "method", "mean_rank").unwrap();
    for &m in &order {
        writeln!(s, "{:<nw$}  {:>9.4}", methods[m], table.mean_ranks[m]).unwrap();
    }
    writeln!(s, "friedman statistic: {:.4}", table.friedman_statistic).unwrap();
    writeln!(
        s,
        "critical difference ({:.0}%): {cd:.4}",
        confidence.level() * 100.0
    )
    .unwrap();
    let pairs = significant_pairs(&table.mean_ranks, cd);
    if pairs.is_empty() {
        writeln!(s, "no pair differs by more than the critical difference").unwrap();
    } else {
        writeln!(s, "pairs beyond the critical difference:").unwrap();
        for (b, w, gap) in pairs {
            writeln!(s, "  {} < {}  (gap {gap:.4})", methods[b], methods[w]).unwrap();
        }
    }
    s
}

fn vif_report(a: VifArgs) -> Result<()> {
    let (x, _) = read_prediction_matrix(open(&a.input)?)?;
    let report = vif(&x)?;
    let buckets = report.histogram(&DEFAULT_VIF_EDGES);
    let mut s = String::new();
    writeln!(s, "{} columns", report.vif.len()).unwrap();
    writeln!(s, "{:<12}  {:>5}  {:>7}", "vif", "count", "percent").unwrap();
    for b in &buckets {
        writeln!(s, "{:<12}  {:>5}  {:>7.2}", b.label(), b.count, b.percent).unwrap();
    }
    writeln!(s, "above 10: {:.2}%", 100.0 * report.fraction_above(10.0)).unwrap();
    if let Some(path) = &a.csv {
        let mut csv = String::from("bucket,count,percent\n");
        for b in &buckets {
            writeln!(csv, "{},{},{}", field(&b.label()), b.count, b.percent).unwrap();
        }
        write_text(path, &csv)?;
        let mut cols = String::from("model,vif\n");
        for (id, v) in report.column_ids.iter().zip(&report.vif) {
            writeln!(cols, "{},{v}", field(id)).unwrap();
        }
        write_text(&path.with_extension("columns.csv"), &cols)?;
    }
    print(&s)
}

fn generate_dataset(a: GenerateDatasetArgs) -> Result<()> {
    let kind: DatasetKind = a.kind.parse()?;
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise must be >= 0, got {}",
            a.noise
        )));
    }
    let ds = generate(kind, a.rows, a.features, a.noise, a.seed)?;
    let mut w = create(&a.output)?;
    write_dataset(&mut w, &ds)?;
    w.flush()?;
    print(&format!(
        "wrote {} ({} rows, {} features)\n",
        a.output.display(),
        ds.nrows(),
        ds.features.ncols()
    ))
}

fn generate_matrix(a: GenerateMatrixArgs) -> Result<()> {
    let ds = load_dataset(&a.input)?;
    let trials = trials(&a.search)?;
    let plan = CvPlan::new(ds.nrows(), a.folds, a.search.seed)?;
    let (x, y) = build_prediction_matrix(&ds, &trials, &plan)?;
    let mut w = create(&a.output)?;
    write_prediction_matrix(&mut w, &x, &y)?;
    w.flush()?;
    print(&format!(
        "wrote {} ({} rows, {} models)\n",
        a.output.display(),
        x.nrows(),
        x.ncols()
    ))
}
