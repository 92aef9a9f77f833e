//! The subcommands as library functions. Each writes its files under the
//! configured output directory and returns what it wrote.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::json;

use dibalance::balance::{
    apportion, bound_at, check_restrictions, compute_plan, lattice_bound, materialize_sample, preset_plan,
    quadrant_bounds, LatticeBound, LatticeStep, RestrictionVerdict,
};
use dibalance::classifiers::{labels_from_scores, load_external_scores, ClassifierSpec, Learner, TrainedModel};
use dibalance::dataset::{generate_synthetic, load_csv, stratified_split, write_csv, Splits};
use dibalance::metrics::{format_cell, MetricReport};
use dibalance::search::{
    run_search, train_point, write_front_csv, write_jsonl, EvaluationPoint, ModelInspector, ParetoFront,
    SearchError,
};
use dibalance::{seed, BalanceParams, Dataset, QuadrantCounts, SamplingPlan, SetupPreset};

use crate::config::RunConfig;
use crate::output::{create, write_json, write_manifest, write_table};

/// Threshold used wherever none is searched.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

// Streams derived from the run seed.
const SPLIT_STREAM: u64 = 1;
const SEARCH_STREAM: u64 = 2;
const BASELINE_STREAM: u64 = 3;
const SETUP_STREAM: u64 = 4;

pub fn load_dataset(cfg: &RunConfig) -> anyhow::Result<Dataset> {
    if let Some(path) = &cfg.data.csv {
        return load_csv(path, &cfg.schema()).with_context(|| format!("loading {}", path.display()));
    }
    let s = cfg.data.synthetic.as_ref().ok_or_else(|| anyhow!("no data source"))?;
    Ok(generate_synthetic(&s.spec(), cfg.seed)?)
}

pub fn split_dataset(cfg: &RunConfig, d: &Dataset) -> anyhow::Result<Splits> {
    Ok(stratified_split(d, cfg.split, seed::derive(cfg.seed, &[SPLIT_STREAM]))?)
}

fn write_dataset(path: &Path, d: &Dataset) -> anyhow::Result<()> {
    write_csv(d, create(path)?)?;
    Ok(())
}

fn evaluate(model: &TrainedModel, eval: &Dataset, threshold: f64, cfg: &RunConfig) -> anyhow::Result<MetricReport> {
    let g = model.predict_labels(eval, threshold)?;
    Ok(MetricReport::from_predictions(&g, &cfg.weights)?)
}

/// A metric table row with NaN cells and a status column.
fn row(prefix: &[String], model: &str, r: Option<&MetricReport>, status: &str) -> Vec<String> {
    let mut cells = prefix.to_vec();
    match r {
        Some(r) => cells.extend(r.table_row(model)),
        None => {
            cells.push(model.to_string());
            cells.extend(std::iter::repeat_n("NaN".to_string(), MetricReport::TABLE_HEADER.len() - 1));
        }
    }
    cells.push(status.to_string());
    cells
}

fn header(prefix: &[&'static str], suffix: &[&'static str]) -> Vec<&'static str> {
    prefix
        .iter()
        .chain(MetricReport::TABLE_HEADER.iter())
        .chain(suffix)
        .copied()
        .collect()
}

// ---------------------------------------------------------------- generate

pub fn cmd_generate(cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let s = cfg
        .data
        .synthetic
        .as_ref()
        .ok_or_else(|| anyhow!("generate needs a [data.synthetic] section"))?;
    let d = generate_synthetic(&s.spec(), cfg.seed)?;
    let path = cfg.out.join("synthetic.csv");
    write_dataset(&path, &d)?;
    write_manifest(cfg, "generate", json!({ "spec": s }), std::slice::from_ref(&path))?;
    Ok(path)
}

// -------------------------------------------------------------------- plan

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PlanTarget {
    Params(BalanceParams),
    Preset(SetupPreset),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub counts: QuadrantCounts,
    pub target: PlanTarget,
    pub plan: SamplingPlan,
    /// Largest size each quadrant alone could support; `None` for zero ratios.
    pub quadrant_bounds: [Option<usize>; 4],
    /// Largest sample size feasible at the target.
    pub point_bound: usize,
    /// Largest sample size feasible over the whole lattice.
    pub lattice: LatticeBound,
    pub lattice_step: f64,
    /// Quadrant composition at the lattice-wide size.
    pub composition: [usize; 4],
    pub restrictions: RestrictionVerdict,
}

pub fn cmd_plan(cfg: &RunConfig, target: PlanTarget, step: f64) -> anyhow::Result<PlanReport> {
    let d = load_dataset(cfg)?;
    let counts = d.quadrant_counts();
    let plan = match target {
        PlanTarget::Params(b) => compute_plan(&counts, b)?,
        PlanTarget::Preset(p) => preset_plan(&counts, p)?,
    };
    let bounds = quadrant_bounds(&plan);
    let point_bound = bounds.iter().flatten().copied().min().unwrap_or(0);
    let lattice = lattice_bound(&counts, LatticeStep::new(step)?, cfg.grid.execution)?;
    let report = PlanReport {
        counts,
        target,
        composition: apportion(lattice.size, &plan.ratios),
        restrictions: check_restrictions(&counts, &plan),
        plan,
        quadrant_bounds: bounds,
        point_bound,
        lattice,
        lattice_step: step,
    };
    let path = cfg.out.join("plan.json");
    write_json(&path, &report)?;
    write_manifest(cfg, "plan", json!({ "target": target, "step": step }), &[path])?;
    Ok(report)
}

// ---------------------------------------------------------------- baseline

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub setup: Option<String>,
    pub model: String,
    pub report: Option<MetricReport>,
    pub sample_size: Option<usize>,
    pub status: String,
}

pub fn cmd_baseline(cfg: &RunConfig) -> anyhow::Result<Vec<ModelRow>> {
    let d = load_dataset(cfg)?;
    let splits = split_dataset(cfg, &d)?;
    let fit_seed = seed::derive(cfg.seed, &[BASELINE_STREAM]);
    let rows: Vec<ModelRow> = cfg
        .classifier_specs()
        .iter()
        .map(|spec| {
            let result = TrainedModel::fit(spec, &splits.train, fit_seed)
                .map_err(anyhow::Error::from)
                .and_then(|m| evaluate(&m, &splits.test0, DEFAULT_THRESHOLD, cfg));
            let (report, status) = match result {
                Ok(r) => (Some(r), "ok".to_string()),
                Err(e) => (None, format!("error: {e}")),
            };
            ModelRow {
                setup: None,
                model: spec.name(),
                report,
                sample_size: Some(splits.train.len()),
                status,
            }
        })
        .collect();
    let path = cfg.out.join("baseline.csv");
    let table: Vec<Vec<String>> = rows.iter().map(|r| row(&[], &r.model, r.report.as_ref(), &r.status)).collect();
    write_table(&path, &header(&[], &["status"]), &table)?;
    write_manifest(cfg, "baseline", json!({ "threshold": DEFAULT_THRESHOLD }), &[path])?;
    Ok(rows)
}

// ------------------------------------------------------------------ setups

pub fn cmd_setups(cfg: &RunConfig) -> anyhow::Result<Vec<ModelRow>> {
    let d = load_dataset(cfg)?;
    let splits = split_dataset(cfg, &d)?;
    let counts = splits.train.quadrant_counts();
    let specs = cfg.classifier_specs();
    let mut rows = Vec::new();
    for (i, preset) in SetupPreset::ALL.into_iter().enumerate() {
        let sample_seed = seed::derive(cfg.seed, &[SETUP_STREAM, i as u64]);
        // Each preset samples at its own largest feasible size.
        let sample = preset_plan(&counts, preset).and_then(|plan| {
            let size = bound_at(&counts, preset.params())?;
            materialize_sample(&splits.train, &plan, size, sample_seed)
        });
        for spec in &specs {
            let (report, size, status) = match &sample {
                Err(e) => (None, None, format!("infeasible: {e}")),
                Ok(s) => match TrainedModel::fit(spec, s, seed::derive(sample_seed, &[u64::MAX]))
                    .map_err(anyhow::Error::from)
                    .and_then(|m| evaluate(&m, &splits.test0, DEFAULT_THRESHOLD, cfg))
                {
                    Ok(r) => (Some(r), Some(s.len()), "ok".to_string()),
                    Err(e) => (None, Some(s.len()), format!("error: {e}")),
                },
            };
            rows.push(ModelRow {
                setup: Some(preset.name().to_string()),
                model: spec.name(),
                report,
                sample_size: size,
                status,
            });
        }
    }
    let path = cfg.out.join("setups.csv");
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = row(&[r.setup.clone().unwrap_or_default()], &r.model, r.report.as_ref(), &r.status);
            cells.insert(cells.len() - 1, r.sample_size.map_or_else(|| "NaN".into(), |s| s.to_string()));
            cells
        })
        .collect();
    write_table(&path, &header(&["setup"], &["sample_size", "status"]), &table)?;
    write_manifest(cfg, "setups", json!({ "threshold": DEFAULT_THRESHOLD }), &[path])?;
    Ok(rows)
}

// ------------------------------------------------------------------ search

/// Search outcome of one classifier, enough to retrain its optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub classifier: ClassifierSpec,
    pub name: String,
    pub sample_size: usize,
    pub level0_best: Option<EvaluationPoint>,
    pub optimum: Option<EvaluationPoint>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResults {
    pub config: RunConfig,
    pub search_seed: u64,
    pub models: Vec<ModelResult>,
}

pub struct SearchRun {
    pub results: SearchResults,
    /// Every kept point of both levels, per classifier in config order.
    pub points: Vec<EvaluationPoint>,
    pub fronts: Vec<ParetoFront>,
}

pub fn cmd_search(cfg: &RunConfig) -> anyhow::Result<SearchRun> {
    let d = load_dataset(cfg)?;
    let splits = split_dataset(cfg, &d)?;
    let grid = cfg.effective_grid();
    let counts = splits.train.quadrant_counts();
    let size = lattice_bound(&counts, LatticeStep::new(grid.level1_step)?, grid.execution)?.size;
    let search_seed = seed::derive(cfg.seed, &[SEARCH_STREAM]);
    log::info!("common sample size {size} from training counts {counts}");

    let mut models = Vec::new();
    let mut points = Vec::new();
    let mut fronts = Vec::new();
    for spec in cfg.classifier_specs() {
        let l0 = ModelInspector::new(&splits.train, &splits.test0, &spec, cfg.weights, size);
        let l1 = ModelInspector::new(&splits.train, &splits.test1, &spec, cfg.weights, size);
        log::info!("searching {}", spec.name());
        let mut result = ModelResult {
            name: spec.name(),
            classifier: spec.clone(),
            sample_size: size,
            level0_best: None,
            optimum: None,
            error: None,
        };
        match run_search(&l0, &l1, &grid, search_seed) {
            Ok(outcome) => {
                result.level0_best = dibalance::search::select_optimal(&outcome.front0, &grid.weights).ok().cloned();
                result.optimum = Some(outcome.optimum.clone());
                let mut front = outcome.front0.clone();
                front.points.extend(outcome.front1.points.iter().cloned());
                fronts.push(front);
                points.extend(outcome.level0);
                points.extend(outcome.level1);
            }
            Err(e @ (SearchError::NoValidPoints | SearchError::EmptyFront)) => {
                log::warn!("{}: {e}", spec.name());
                result.error = Some(e.to_string());
                fronts.push(ParetoFront::default());
            }
            Err(e) => return Err(e.into()),
        }
        models.push(result);
    }

    let out = &cfg.out;
    let mut written = Vec::new();
    let jsonl = out.join("search_points.jsonl");
    write_jsonl(&points, create(&jsonl)?)?;
    written.push(jsonl);

    let optimal_rows: Vec<Vec<String>> = models
        .iter()
        .map(|m| match &m.optimum {
            Some(p) => vec![
                m.name.clone(),
                p.params.alpha.to_string(),
                p.params.beta.to_string(),
                p.params.gamma.to_string(),
                p.threshold.to_string(),
                m.sample_size.to_string(),
            ],
            None => vec![m.name.clone(), "NaN".into(), "NaN".into(), "NaN".into(), "NaN".into(), m.sample_size.to_string()],
        })
        .collect();
    let optimal = out.join("optimal.csv");
    write_table(&optimal, &["model", "alpha", "beta", "gamma", "threshold", "sample_size"], &optimal_rows)?;
    written.push(optimal);

    let mut metric_rows = Vec::new();
    for m in &models {
        for (level, p) in [("0", &m.level0_best), ("1", &m.optimum)] {
            let status = m.error.clone().map_or_else(|| "ok".to_string(), |e| format!("error: {e}"));
            metric_rows.push(row(&[level.to_string()], &m.name, p.as_ref().and_then(|p| p.report.as_ref()), &status));
        }
    }
    let metrics = out.join("metrics.csv");
    write_table(&metrics, &header(&["level"], &["status"]), &metric_rows)?;
    written.push(metrics);

    for (m, front) in models.iter().zip(&fronts) {
        let path = out.join(format!("pareto_{}.csv", m.name));
        write_front_csv(front, create(&path)?)?;
        written.push(path);
    }
    for (name, d) in [("train.csv", &splits.train), ("test0.csv", &splits.test0), ("test1.csv", &splits.test1)] {
        let path = out.join(name);
        write_dataset(&path, d)?;
        written.push(path);
    }
    let results = SearchResults {
        config: cfg.clone(),
        search_seed,
        models,
    };
    let results_path = out.join("results.json");
    write_json(&results_path, &results)?;
    written.push(results_path);
    write_manifest(cfg, "search", json!({ "sample_size": size }), &written)?;

    if results.models.iter().all(|m| m.optimum.is_none()) {
        let why: Vec<String> = results
            .models
            .iter()
            .map(|m| format!("{}: {}", m.name, m.error.as_deref().unwrap_or("no optimum")))
            .collect();
        bail!("no classifier produced a valid point ({})", why.join("; "));
    }
    Ok(SearchRun {
        results,
        points,
        fronts,
    })
}

// ------------------------------------------------------------------ report

/// Retrains each stored optimum and evaluates it on `test`. External score
/// files are evaluated at [`DEFAULT_THRESHOLD`].
pub fn cmd_report(
    results_path: &Path,
    test_path: &Path,
    scores: &[(String, PathBuf)],
    out_override: Option<&Path>,
) -> anyhow::Result<Vec<ModelRow>> {
    let text = std::fs::read_to_string(results_path)
        .with_context(|| format!("reading results {}", results_path.display()))?;
    let results: SearchResults = serde_json::from_str(&text).context("invalid results file")?;
    let mut cfg = results.config.clone();
    if let Some(out) = out_override {
        cfg.out = out.to_path_buf();
    }
    let d = load_dataset(&cfg)?;
    let splits = split_dataset(&cfg, &d)?;
    let test = load_csv(test_path, &cfg.schema()).with_context(|| format!("loading {}", test_path.display()))?;

    let mut rows = Vec::new();
    for m in &results.models {
        let (report, status) = match &m.optimum {
            None => (None, format!("error: {}", m.error.as_deref().unwrap_or("no optimum"))),
            Some(p) => match train_point(&splits.train, &m.classifier, p.params, m.sample_size, p.seed)
                .map_err(|e| anyhow!(e))
                .and_then(|model| evaluate(&model, &test, p.threshold, &cfg))
            {
                Ok(r) => (Some(r), "ok".to_string()),
                Err(e) => return Err(e.context(format!("evaluating {}", m.name))),
            },
        };
        rows.push(ModelRow {
            setup: None,
            model: m.name.clone(),
            report,
            sample_size: Some(m.sample_size),
            status,
        });
    }
    for (name, path) in scores {
        let s = load_external_scores(path, test.len())?;
        let g = labels_from_scores(&test, &s, DEFAULT_THRESHOLD)?;
        rows.push(ModelRow {
            setup: None,
            model: name.clone(),
            report: Some(MetricReport::from_predictions(&g, &cfg.weights)?),
            sample_size: None,
            status: "external".into(),
        });
    }
    let path = cfg.out.join("report.csv");
    let table: Vec<Vec<String>> = rows.iter().map(|r| row(&[], &r.model, r.report.as_ref(), &r.status)).collect();
    write_table(&path, &header(&[], &["status"]), &table)?;
    write_manifest(
        &cfg,
        "report",
        json!({
            "results": results_path,
            "test": test_path,
            "scores": scores,
        }),
        &[path],
    )?;
    Ok(rows)
}

/// Human summary of a plan report.
pub fn describe_plan(r: &PlanReport) -> String {
    let q = r.plan.ratios.as_array();
    let cell = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    format!(
        "counts {}\nratios p_f={} p_uf={} up_f={} up_uf={}\nquadrant bounds {} {} {} {}\nbound at target {}\nlattice bound {} (step {}, at {}, {} infeasible points)\ncomposition at lattice bound {:?}\nrestrictions {}",
        r.counts,
        format_cell(Some(q[0])),
        format_cell(Some(q[1])),
        format_cell(Some(q[2])),
        format_cell(Some(q[3])),
        cell(r.quadrant_bounds[0]),
        cell(r.quadrant_bounds[1]),
        cell(r.quadrant_bounds[2]),
        cell(r.quadrant_bounds[3]),
        r.point_bound,
        r.lattice.size,
        r.lattice_step,
        r.lattice.argmin,
        r.lattice.infeasible_points,
        r.composition,
        if r.restrictions.passed() {
            "passed".to_string()
        } else {
            format!("violated {:?}", r.restrictions.violated)
        },
    )
}
