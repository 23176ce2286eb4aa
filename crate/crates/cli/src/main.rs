//! `profilekit` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 data error
//! (for example no positive examples or inconsistent training data).

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use profilekit::corpus::write_corpus;
use profilekit::eval::{
    render_table, render_table_csv, run_experiment, t_test, train_model, Cell, EvalError, ResultTable, RunReport,
    TrainedModel,
};
use profilekit::features::{assemble, select_keywords, DfTable, FeatureContext};
use profilekit::synthgen::{generate, GenSpec};
use profilekit::{FeatureSet, Label};

use config::{read_text, Overrides, Settings};

#[derive(Parser)]
#[command(name = "profilekit", version, about = "Learn and evaluate text-filtering profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one JSON feature vector per document.
    Featurize(Overrides),
    /// Train on the whole labeled corpus and write the learned profile.
    Learn(Overrides),
    /// Run the train/test protocol and write a report and table.
    Evaluate(Overrides),
    /// Two-tailed t-test on the per-run accuracies of two reports.
    Compare {
        report_a: PathBuf,
        report_b: PathBuf,
        /// Confidence level.
        #[arg(long, default_value_t = 0.90)]
        level: f64,
        /// Feature set to compare when a report holds several.
        #[arg(long)]
        features: Option<String>,
    },
    /// Generate a labeled synthetic corpus from a JSON spec.
    GenSynthetic {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the bundled reference resources to a directory.
    Resources {
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one results table from several evaluation reports.
    Table {
        reports: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn data(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: 2, error: e.into() })
    }

    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: 3, error: e.into() })
    }
}

fn eval_failure(e: EvalError) -> Failure {
    let code = match &e {
        EvalError::Run { source, .. } if source.is_data_error() => 3,
        _ => 2,
    };
    Failure { code, error: e.into() }
}

/// Report file written by `evaluate`.
#[derive(Debug, Serialize, Deserialize)]
struct EvaluationReport {
    problem: String,
    reports: Vec<RunReport>,
}

fn problem_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "corpus".to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).input()?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display())).input()
}

fn single_set(s: &Settings) -> Result<FeatureSet, Failure> {
    match s.features.as_slice() {
        [one] => Ok(*one),
        _ => Err(anyhow!("this command takes exactly one feature set")).input(),
    }
}

fn featurize(o: &Overrides) -> Result<(), Failure> {
    let s = Settings::load(o).input()?;
    let set = single_set(&s)?;
    let corpus = s.load_corpus().input()?;
    let res = s.resources().input()?;
    let out = s.out_dir().input()?.to_path_buf();
    let df = DfTable::build(&corpus, &res.tokenizer);
    let (labeled, _) = corpus.partition_labeled();
    let vocabulary = select_keywords(&labeled, &df, &res.tokenizer, s.n_keywords);
    let ctx = FeatureContext {
        tokenizer: res.tokenizer.clone(),
        df: Some(df),
        vocabulary: Some(vocabulary),
        lexicon: Some(res.lexicon),
        correlations: Some(res.correlations),
        gazetteer: Some(res.gazetteer),
    };
    let mut text = String::new();
    for doc in &corpus {
        let fv = assemble(doc, set, &ctx).input()?;
        let line = json!({"id": doc.id, "label": doc.label, "features": fv.to_json()});
        text.push_str(&serde_json::to_string(&line).expect("json values serialize"));
        text.push('\n');
    }
    write_file(&out, &text)
}

fn learn(o: &Overrides) -> Result<(), Failure> {
    let s = Settings::load(o).input()?;
    let set = single_set(&s)?;
    let corpus = s.load_corpus().input()?;
    let res = s.resources().input()?;
    let out = s.out_dir().input()?.to_path_buf();
    let (labeled, unlabeled) = corpus.partition_labeled();
    if labeled.n_positive() == 0 {
        return Err(anyhow!("corpus has no positive examples")).data();
    }
    let cfg = s.experiment(set);
    let model = train_model(&labeled, &unlabeled, &res, &cfg).map_err(|e| {
        let code = if e.is_data_error() { 3 } else { 2 };
        Failure { code, error: e.into() }
    })?;
    let rendered = model.render();
    match &model {
        TrainedModel::Aq { rules, .. } => {
            write_file(&out.join("rules.json"), &pretty(&rules.to_json()))?;
            write_file(&out.join("rules.txt"), &rendered)?;
        }
        TrainedModel::Tree { rules, .. } => {
            write_file(&out.join("rules.json"), &pretty(&rules.to_json()))?;
            write_file(&out.join("rules.txt"), &rendered)?;
        }
        TrainedModel::Rocchio { model, .. } => {
            write_file(&out.join("profile.tsv"), &rendered)?;
            write_file(&out.join("cutoff.json"), &pretty(&json!({"cutoff": model.cutoff})))?;
        }
    }
    print!("{rendered}");
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn table_for(reports: &[(String, &RunReport)]) -> ResultTable {
    let mut table = ResultTable::new();
    for (problem, r) in reports {
        table.insert(r.learner.label(), problem, r.feature_set, Cell::from(*r));
    }
    table
}

fn evaluate(o: &Overrides) -> Result<(), Failure> {
    let s = Settings::load(o).input()?;
    let corpus = s.load_corpus().input()?;
    let res = s.resources().input()?;
    let out = s.out_dir().input()?.to_path_buf();
    let problem = problem_name(s.corpus_path().input()?);
    let mut reports = Vec::new();
    for &set in &s.features {
        reports.push(run_experiment(&corpus, &res, &s.experiment(set)).map_err(eval_failure)?);
    }
    let rows: Vec<(String, &RunReport)> = reports.iter().map(|r| (problem.clone(), r)).collect();
    let table = table_for(&rows);
    let text = render_table(&table);
    write_file(&out.join("table.txt"), &text)?;
    write_file(&out.join("table.csv"), &render_table_csv(&table))?;
    let report = EvaluationReport { problem, reports };
    write_file(&out.join("report.json"), &(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"))?;
    print!("{text}");
    Ok(())
}

fn load_report(path: &Path) -> Result<EvaluationReport, Failure> {
    let text = read_text(path).input()?;
    serde_json::from_str(&text).with_context(|| format!("bad report {}", path.display())).input()
}

fn pick<'a>(r: &'a EvaluationReport, set: Option<FeatureSet>, path: &Path) -> Result<&'a RunReport, Failure> {
    match set {
        Some(set) => r.reports.iter().find(|x| x.feature_set == set),
        None => r.reports.first(),
    }
    .ok_or_else(|| anyhow!("{} holds no matching report", path.display()))
    .input()
}

fn compare(a: &Path, b: &Path, level: f64, features: Option<&str>) -> Result<(), Failure> {
    let set = features.map(str::parse::<FeatureSet>).transpose().input()?;
    let (ra, rb) = (load_report(a)?, load_report(b)?);
    let (xa, xb) = (pick(&ra, set, a)?, pick(&rb, set, b)?);
    let result = t_test(&xa.accuracies(), &xb.accuracies(), level).input()?;
    println!("{}", serde_json::to_string(&result).expect("results serialize"));
    Ok(())
}

fn gen_synthetic(spec: &Path, out: &Path) -> Result<(), Failure> {
    let text = read_text(spec).input()?;
    let spec: GenSpec = serde_json::from_str(&text).with_context(|| format!("bad spec {}", spec.display())).input()?;
    let corpus = generate(&spec, &profilekit::resources::Resources::reference()).input()?;
    let mut bytes = Vec::new();
    write_corpus(&corpus, &mut bytes).input()?;
    write_file(out, &String::from_utf8(bytes).expect("corpus output is UTF-8"))?;
    let pos = corpus.iter().filter(|d| d.label == Label::Positive).count();
    println!("{} documents ({pos} positive) written to {}", corpus.len(), out.display());
    Ok(())
}

fn resources(out: &Path) -> Result<(), Failure> {
    for (name, text) in profilekit::resources::reference_files() {
        write_file(&out.join(name), &text)?;
    }
    Ok(())
}

fn table(paths: &[PathBuf], csv: bool) -> Result<(), Failure> {
    let loaded: Vec<EvaluationReport> = paths.iter().map(|p| load_report(p)).collect::<Result<_, _>>()?;
    let rows: Vec<(String, &RunReport)> =
        loaded.iter().flat_map(|r| r.reports.iter().map(|x| (r.problem.clone(), x))).collect();
    let t = table_for(&rows);
    let text = if csv { render_table_csv(&t) } else { render_table(&t) };
    std::io::stdout().write_all(text.as_bytes()).context("cannot write to stdout").input()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Featurize(o) => featurize(o),
        Command::Learn(o) => learn(o),
        Command::Evaluate(o) => evaluate(o),
        Command::Compare { report_a, report_b, level, features } => {
            compare(report_a, report_b, *level, features.as_deref())
        }
        Command::GenSynthetic { spec, out } => gen_synthetic(spec, out),
        Command::Resources { out } => resources(out),
        Command::Table { reports, csv } => table(reports, *csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
