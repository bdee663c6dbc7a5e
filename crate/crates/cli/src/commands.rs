//! The subcommands. Each writes human-readable progress to `out` and its
//! artifacts to disk.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use fuzzy_effort::dataset::{
    filter_cases_with_summary, impute_mmsi, load_csv, missing_counts, normalize_minmax, synth_generate, to_csv_string,
    FilterCriterion, FilterSummary,
};
use fuzzy_effort::evaluation::{acceptable, threshold_sweep, EvaluationReport};
use fuzzy_effort::{train_effort_model, Dataset, EffortModel};

use crate::{write_atomic, CliError, RunConfig};

pub const PREDICTION_HEADER: &str =
    "project_id,predicted_hours,mode,leaf_1,activation_1,leaf_2,activation_2,leaf_3,activation_3";

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::Io(e.to_string()))?
    };
}

fn require<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Config(format!("`{key}` is required (config key or --{key})")))
}

fn load_input(cfg: &RunConfig) -> Result<Dataset, CliError> {
    Ok(load_csv(require(&cfg.input, "input")?)?)
}

/// Filter then impute.
fn prepare(raw: &Dataset) -> Result<(Dataset, FilterSummary), CliError> {
    let (kept, summary) = filter_cases_with_summary(raw);
    Ok((impute_mmsi(&kept)?, summary))
}

/// The configured input, or synthetic data when none is set.
fn experiment_data(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let raw = match &cfg.input {
        Some(path) => load_csv(path)?,
        None => synth_generate(&cfg.synth)?,
    };
    let (ds, _) = prepare(&raw)?;
    if ds.is_empty() {
        return Err(CliError::Data("no projects left after filtering".into()));
    }
    Ok(ds)
}

pub fn synth(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = require(&cfg.out, "out")?;
    let ds = synth_generate(&cfg.synth)?;
    write_atomic(path, to_csv_string(&ds).as_bytes())?;
    say!(out, "wrote {} synthetic projects to {}", ds.len(), path.display());
    Ok(())
}

pub fn filter_table(summary: &FilterSummary) -> String {
    let mut t = format!("{:<22}{:<16}{}\n", "criterion", "selected", "discarded");
    for c in FilterCriterion::ALL {
        let _ = writeln!(t, "{:<22}{:<16}{}", c.name(), c.selected(), summary.discarded_by(c));
    }
    let _ = writeln!(
        t,
        "examined {}, kept {}, discarded {}",
        summary.examined,
        summary.kept,
        summary.total_discarded()
    );
    t
}

pub fn preprocess(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = require(&cfg.out, "out")?;
    let raw = load_input(cfg)?;
    let (kept, summary) = filter_cases_with_summary(&raw);
    let gaps = missing_counts(&kept);
    let ds = impute_mmsi(&kept)?;
    write_atomic(path, to_csv_string(&ds).as_bytes())?;

    write!(out, "{}", filter_table(&summary)).map_err(|e| CliError::Io(e.to_string()))?;
    let filled: Vec<String> = gaps
        .features
        .iter()
        .filter(|(_, n)| **n > 0)
        .map(|(f, n)| format!("{} {n}", f.name()))
        .collect();
    if !filled.is_empty() {
        say!(out, "imputed: {}", filled.join(", "));
    }
    if gaps.work_effort > 0 {
        say!(out, "dropped {} project(s) without work effort", gaps.work_effort);
    }
    if ds.is_empty() {
        eprintln!(
            "warning: no projects survived preprocessing; {} holds only the header",
            path.display()
        );
    }
    say!(out, "wrote {} projects to {}", ds.len(), path.display());
    Ok(())
}

pub fn train(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = require(&cfg.out, "out")?;
    let (ds, _) = prepare(&load_input(cfg)?)?;
    if ds.is_empty() {
        return Err(CliError::Data("no projects left to train on".into()));
    }
    let (train, _, params) = normalize_minmax(&ds, &ds)?;
    let model = train_effort_model(&train, params, &cfg.growth)?;
    write_atomic(path, model.to_text().as_bytes())?;

    let stats = model.tree.stats();
    say!(
        out,
        "trained on {} projects: {} nodes, {} leaves, depth {}",
        train.len(),
        stats.nodes,
        stats.leaves,
        stats.max_depth
    );
    let criteria: Vec<String> = stats.criteria.iter().map(|(c, n)| format!("{c} {n}")).collect();
    say!(out, "leaf criteria: {}", criteria.join(", "));
    say!(out, "wrote model to {}", path.display());
    Ok(())
}

pub fn load_model(path: &Path) -> Result<EffortModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    EffortModel::from_text(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn predict(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let path = require(&cfg.out, "out")?;
    let model = load_model(require(&cfg.tree, "tree")?)?;
    let ds = load_input(cfg)?;

    let problems: Vec<String> = ds
        .records()
        .iter()
        .filter(|r| !r.has_all_features())
        .map(|r| {
            let names: Vec<&str> = r.missing_features().iter().map(|f| f.name()).collect();
            format!("project {}: missing {}", r.project_id, names.join(", "))
        })
        .collect();
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("{p}");
        }
        return Err(CliError::Data(format!(
            "{} project(s) lack input features",
            problems.len()
        )));
    }

    let mut csv = format!("{PREDICTION_HEADER}\n");
    for r in ds.records() {
        let p = model.predict(r, cfg.mode)?;
        let _ = write!(csv, "{},{},{}", r.project_id, p.hours, cfg.mode);
        for i in 0..3 {
            match p.activation.trace.get(i) {
                Some(t) => {
                    let _ = write!(csv, ",{},{}", t.label(), t.activation);
                }
                None => csv.push_str(",,"),
            }
        }
        csv.push('\n');
    }
    write_atomic(path, csv.as_bytes())?;
    say!(out, "wrote {} prediction(s) to {}", ds.len(), path.display());
    Ok(())
}

fn report_table(report: &EvaluationReport) -> String {
    let mut t = format!(
        "{:>4} {:>5} {:>10} {:>10} {:>6}  accept\n",
        "K", "T_h", "MMRE", "Pred(25)", "nodes"
    );
    for r in &report.rows {
        let a = acceptable(r.mmre, r.pred25);
        let flag = |ok: bool| if ok { "yes" } else { "no" };
        let _ = writeln!(
            t,
            "{:>4} {:>5} {:>10.2} {:>10.2} {:>6}  {}/{}",
            r.effort_classes,
            r.threshold,
            r.mmre,
            r.pred25,
            r.node_count,
            flag(a.mmre_ok),
            flag(a.pred_ok)
        );
    }
    t
}

/// `<dir>/<stem>_k<K>_<metric>.dat` next to the report.
pub fn series_path(report: &Path, k: usize, metric: &str) -> PathBuf {
    let stem = report.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    report.with_file_name(format!("{stem}_k{k}_{metric}.dat"))
}

fn run_sweep(
    cfg: &RunConfig,
    out: &mut dyn Write,
    thresholds: Vec<f64>,
    classes: Vec<usize>,
    series: bool,
) -> Result<(), CliError> {
    let ds = experiment_data(cfg)?;
    let report = threshold_sweep(&ds, &cfg.sweep(thresholds, classes))?;
    write!(out, "{}", report_table(&report)).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(path) = &cfg.out {
        write_atomic(path, report.to_csv().as_bytes())?;
        say!(out, "wrote report to {}", path.display());
        if series {
            for k in report.class_counts() {
                let (mmre, pred) = report.series(k);
                write_atomic(&series_path(path, k, "mmre"), mmre.as_bytes())?;
                write_atomic(&series_path(path, k, "pred25"), pred.as_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn evaluate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    run_sweep(
        cfg,
        out,
        vec![cfg.growth.fuzziness_threshold],
        vec![cfg.growth.effort_classes],
        false,
    )
}

pub fn sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    run_sweep(cfg, out, cfg.sweep_thresholds.clone(), cfg.sweep_classes.clone(), true)
}
