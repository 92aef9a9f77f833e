//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always print. Exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dibalance::balance::{
    check_restrictions, compute_plan, materialize_sample, max_sample_size, BalanceError,
    LatticeStep,
};
use dibalance::classifiers::{ClassifierError, Learner, Scorer};
use dibalance::dataset::{generate_synthetic, stratified_split, FeatureLayout, SyntheticSpec};
use dibalance::metrics::{basic_metrics, mcc, ConfusionCounts, LossWeights, MetricReport};
use dibalance::search::{
    grid_search_level0, grid_search_level1, key_params, key_value, pareto_front, run_search, select_optimal,
    EvaluationPoint, GridSpec, ModelInspector, ParetoFront, PointEvaluator, SearchError,
};
use dibalance::{BalanceParams, Execution, QuadrantCounts};
use dibalance_cli::commands::{cmd_search, cmd_setups};
use dibalance_cli::RunConfig;

type Outcome = Result<String, String>;

const WORKED_COUNTS: QuadrantCounts = QuadrantCounts {
    p_f: 19500,
    p_uf: 500,
    up_f: 1900,
    up_uf: 100,
};

fn params(a: f64, b: f64, g: f64) -> BalanceParams {
    BalanceParams::new(a, b, g).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ------------------------------------------------------------------ oracles

/// Targets `(P', F', A')` straight from the interpolation definitions.
fn targets(c: &QuadrantCounts, b: BalanceParams) -> (f64, f64, f64) {
    let d = c.total() as f64;
    let p = (c.p_f + c.p_uf) as f64;
    let up = (c.up_f + c.up_uf) as f64;
    let pp = p / d * (1.0 - b.alpha) + 0.5 * b.alpha;
    let ff = (c.p_f + c.up_f) as f64 / d * (1.0 - b.beta) + 0.5 * b.beta;
    let a = (c.p_f as f64 / p) / (c.up_f as f64 / up);
    (pp, ff, a * (1.0 - b.gamma) + b.gamma)
}

/// Solves the constraint system by bisection on the privileged-favourable
/// ratio. `None` when no ratio vector in `[0, 1]^4` satisfies it.
fn bisection_ratios(c: &QuadrantCounts, b: BalanceParams) -> Option<[f64; 4]> {
    let (pp, ff, aa) = targets(c, b);
    let adv = |r: f64| (r / pp) / ((ff - r) / (1.0 - pp));
    let lo0 = (ff - (1.0 - pp)).max(0.0);
    let hi0 = pp.min(ff);
    if lo0 > hi0 {
        return None;
    }
    let (a_lo, a_hi) = (adv(lo0), adv(hi0));
    // The advantage grows with r; outside its range there is no solution.
    if !(a_lo <= aa * (1.0 + 1e-12) && aa <= a_hi * (1.0 + 1e-12) || a_hi.is_infinite() && a_lo <= aa) {
        return None;
    }
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if adv(mid) < aa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    Some([r, pp - r, ff - r, 1.0 - pp - ff + r])
}

/// Phi coefficient through the chi-square statistic of the 2x2 table.
fn phi(c: &ConfusionCounts) -> f64 {
    let table = [[c.tp as f64, c.fn_ as f64], [c.fp as f64, c.tn as f64]];
    let n: f64 = table.iter().flatten().sum();
    let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    let mut chi2 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = rows[i] * cols[j] / n;
            chi2 += (table[i][j] - e).powi(2) / e;
        }
    }
    let sign = (table[0][0] * table[1][1] - table[0][1] * table[1][0]).signum();
    sign * (chi2 / n).sqrt()
}

fn dominance_front(points: &[EvaluationPoint]) -> Vec<EvaluationPoint> {
    let valid: Vec<&EvaluationPoint> = points.iter().filter(|p| p.is_valid()).collect();
    let mut out: Vec<EvaluationPoint> = valid
        .iter()
        .filter(|p| {
            let (pm, pd) = p.losses().unwrap();
            !valid.iter().any(|q| {
                let (qm, qd) = q.losses().unwrap();
                let dominates = qm <= pm && qd <= pd && (qm < pm || qd < pd);
                let earlier_twin = qm == pm && qd == pd && q.tie_order(p).is_lt();
                dominates || earlier_twin
            })
        })
        .map(|p| (*p).clone())
        .collect();
    out.sort_by(|a, b| a.losses().unwrap().0.total_cmp(&b.losses().unwrap().0));
    out
}

fn synthetic_point(i: usize, mcc_loss: f64, di_loss: f64) -> EvaluationPoint {
    let w = LossWeights::default();
    let mut r = MetricReport::from_parts(Some(1.0), Some(1.0), basic_metrics(&ConfusionCounts::new(1, 1, 0, 0)), &w);
    r.mcc_loss = Some(mcc_loss);
    r.di_loss = Some(di_loss);
    r.combined_loss = Some(w.combine(mcc_loss, di_loss));
    let key = [(i / 10_000 % 101) as u32, (i / 100 % 100) as u32, (i % 100) as u32];
    EvaluationPoint {
        params: key_params(key),
        key,
        threshold: 0.5,
        threshold_key: 50,
        classifier: "synthetic".into(),
        level: 0,
        report: Some(r),
        failure: None,
        sample_size: 1,
        seed: 0,
    }
}

// -------------------------------------------------------------------- stubs

/// Losses are closed-form functions of `(alpha, beta, gamma, threshold)`.
struct AnalyticStub;

impl AnalyticStub {
    fn losses(b: BalanceParams, t: f64) -> (f64, f64) {
        let m = 0.2 + (b.alpha - 0.37).powi(2) + 0.8 * (b.beta - 0.64).powi(2) + 0.5 * (t - 0.33).powi(2);
        let d = 0.1 + (b.gamma - 0.71).abs() + 0.4 * (b.alpha - 0.55).powi(2);
        (m, d)
    }
}

impl PointEvaluator for AnalyticStub {
    fn classifier(&self) -> String {
        "analytic".into()
    }

    fn sample_size(&self) -> usize {
        1
    }

    fn evaluate(&self, b: BalanceParams, thresholds: &[f64], _: u64) -> Vec<Result<MetricReport, String>> {
        let w = LossWeights::default();
        thresholds
            .iter()
            .map(|&t| {
                let (m, d) = Self::losses(b, t);
                let mut r = MetricReport::from_parts(Some(1.0 - d), Some(1.0 - m), basic_metrics(&ConfusionCounts::new(1, 1, 0, 0)), &w);
                r.mcc_loss = Some(m);
                r.di_loss = Some(d);
                r.combined_loss = Some(w.combine(m, d));
                Ok(r)
            })
            .collect()
    }
}

#[derive(Debug)]
struct NeverScorer;

impl Scorer for NeverScorer {
    fn score(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        vec![0.0; x.nrows()]
    }
}

/// A classifier that never predicts the unfavourable label.
struct NeverLearner;

impl Learner for NeverLearner {
    fn name(&self) -> String {
        "never".into()
    }

    fn fit(&self, _: ArrayView2<'_, f64>, _: &[bool], _: &FeatureLayout, _: u64) -> Result<Box<dyn Scorer>, ClassifierError> {
        Ok(Box::new(NeverScorer))
    }
}

/// Wraps the analytic stub but never flags anyone when `alpha > 0.5`.
struct HalfNever;

impl PointEvaluator for HalfNever {
    fn classifier(&self) -> String {
        "half-never".into()
    }

    fn sample_size(&self) -> usize {
        1
    }

    fn evaluate(&self, b: BalanceParams, thresholds: &[f64], s: u64) -> Vec<Result<MetricReport, String>> {
        if b.alpha > 0.5 {
            let c = ConfusionCounts::new(0, 90, 0, 10);
            thresholds
                .iter()
                .map(|_| Ok(MetricReport::from_parts(None, mcc(&c), basic_metrics(&c), &LossWeights::default())))
                .collect()
        } else {
            AnalyticStub.evaluate(b, thresholds, s)
        }
    }
}

// ----------------------------------------------------------------- criteria

fn c1_worked_ratios() -> Outcome {
    let b = params(0.5, 0.8, 0.4);
    let start = Instant::now();
    let plan = compute_plan(&WORKED_COUNTS, b).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r = plan.ratios.as_array();
    let published = [0.421, 0.284, 0.176, 0.120];
    let solved = [0.42082, 0.28373, 0.17374, 0.12173];
    for i in 0..4 {
        check((r[i] - published[i]).abs() <= 0.004, format!("ratio {i} = {} vs published {}", r[i], published[i]))?;
        check((r[i] - solved[i]).abs() <= 1e-4, format!("ratio {i} = {} vs solved {}", r[i], solved[i]))?;
    }
    let oracle = bisection_ratios(&WORKED_COUNTS, b).ok_or("oracle found no solution")?;
    for i in 0..4 {
        check((r[i] - oracle[i]).abs() <= 1e-9, format!("ratio {i} = {} vs bisection {}", r[i], oracle[i]))?;
    }
    check(elapsed < Duration::from_millis(1), format!("took {elapsed:?}"))?;
    Ok(format!("ratios ({:.5}, {:.5}, {:.5}, {:.5}) in {elapsed:?}", r[0], r[1], r[2], r[3]))
}

fn c2_worked_size() -> Outcome {
    let start = Instant::now();
    let size = max_sample_size(&WORKED_COUNTS, 0.01).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(size.abs_diff(394) <= 2, format!("size {size}"))?;
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("max size {size} over 101^3 points in {elapsed:?}"))
}

fn c3_worked_composition() -> Outcome {
    let d = generate_synthetic(&SyntheticSpec::new(WORKED_COUNTS, 0.0), 1).map_err(|e| e.to_string())?;
    let plan = compute_plan(&WORKED_COUNTS, params(0.5, 0.8, 0.4)).map_err(|e| e.to_string())?;
    let sample = materialize_sample(&d, &plan, 394, 9).map_err(|e| e.to_string())?;
    let got = sample.quadrant_counts().as_array();
    let published = [166, 112, 69, 47];
    for i in 0..4 {
        check(got[i].abs_diff(published[i]) <= 1, format!("quadrant {i}: {} vs {}", got[i], published[i]))?;
    }
    check(got.iter().sum::<usize>() == 394, format!("total {}", got.iter().sum::<usize>()))?;
    Ok(format!("composition {got:?}"))
}

fn c4_combined_loss() -> Outcome {
    let w = LossWeights::default();
    let rows = [("LR", 0.121, 1.001, 0.880), ("RF", 0.164, 0.995, 0.841), ("SVM", 0.167, 0.990, 0.842)];
    let mut detail = Vec::new();
    for (name, m, di, printed) in rows {
        let r = MetricReport::from_parts(Some(di), Some(m), basic_metrics(&ConfusionCounts::new(1, 1, 1, 1)), &w);
        let c = r.combined_loss.ok_or("undefined combined loss")?;
        // Compare at the printed precision of three decimals.
        let gap = ((c * 1000.0).round() as i64 - (printed * 1000.0_f64).round() as i64).abs();
        check(gap <= 1, format!("{name}: {c:.4} vs printed {printed}"))?;
        detail.push(format!("{name} {c:.3}"));
    }
    Ok(detail.join(", "))
}

fn c5_constraint_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut feasible = 0;
    let mut rejected = 0;
    let mut worst: f64 = 0.0;
    while feasible < 10_000 {
        let mut draw = || (10f64.powf(rng.gen_range(0.0..5.0))).round() as usize;
        let c = QuadrantCounts::new(draw(), draw(), draw(), draw());
        let b = params(rng.gen(), rng.gen(), rng.gen());
        match compute_plan(&c, b) {
            Ok(plan) => {
                feasible += 1;
                let r = plan.ratios.as_array();
                let (pp, ff, aa) = targets(&c, b);
                let privileged = r[0] + r[1];
                let favourable = r[0] + r[2];
                let advantage = (r[0] / privileged) / (r[2] / (1.0 - privileged));
                let errs = [
                    (privileged - pp).abs(),
                    (favourable - ff).abs(),
                    (advantage - aa).abs() / aa.max(1.0),
                    (r.iter().sum::<f64>() - 1.0).abs(),
                ];
                let e = errs.iter().cloned().fold(0.0, f64::max);
                worst = worst.max(e);
                check(e <= 1e-9, format!("{c} at {b}: residual {e:e}"))?;
                check(r.iter().all(|&x| (0.0..=1.0).contains(&x)), format!("{c} at {b}: ratios {r:?}"))?;
                let v = check_restrictions(&c, &plan);
                check(v.passed(), format!("{c} at {b}: restrictions {:?}", v.violated))?;
            }
            Err(BalanceError::InfeasibleRates { .. }) => {
                rejected += 1;
                check(bisection_ratios(&c, b).is_none(), format!("{c} at {b}: rejected but the oracle solves it"))?;
            }
            Err(e) => return Err(format!("{c} at {b}: {e}")),
        }
    }
    Ok(format!(
        "10000 feasible cases, worst residual {worst:.1e}; {rejected} infeasible cases rejected and confirmed by bisection"
    ))
}

fn c6_endpoints() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let c = QuadrantCounts::new(rng.gen_range(1..50_000), rng.gen_range(1..5_000), rng.gen_range(1..5_000), rng.gen_range(1..500));
        let d = c.total() as f64;
        let src = c.as_array().map(|x| x as f64 / d);
        let id = compute_plan(&c, BalanceParams::IDENTITY).map_err(|e| e.to_string())?.ratios.as_array();
        for i in 0..4 {
            worst = worst.max((id[i] - src[i]).abs());
        }
        let eq = compute_plan(&c, BalanceParams::EQUILIBRIUM).map_err(|e| e.to_string())?.ratios.as_array();
        check(eq == [0.25; 4], format!("{c}: equilibrium {eq:?}"))?;
    }
    check(worst <= 1e-15, format!("identity deviates by {worst:e}"))?;
    let flat = QuadrantCounts::new(100, 100, 100, 100);
    let step = LatticeStep::new(0.01).unwrap();
    let n = step.divisions();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                let r = compute_plan(&flat, step.params(i, j, k)).map_err(|e| e.to_string())?.ratios.as_array();
                check(r.iter().all(|&x| (x - 0.25).abs() <= 1e-15), format!("flat counts at ({i},{j},{k}): {r:?}"))?;
            }
        }
    }
    let size = max_sample_size(&flat, 0.01).map_err(|e| e.to_string())?;
    check(size == 400, format!("flat max size {size}"))?;
    Ok(format!("identity within {worst:.1e} of source, equilibrium exact, flat lattice 0.25 with size {size}"))
}

fn c7_pareto() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut selections = 0;
    for set in 0..1000 {
        let n = rng.gen_range(1..=500);
        // Half the sets use a coarse grid to force ties and duplicates.
        let coarse = set % 2 == 0;
        let pts: Vec<EvaluationPoint> = (0..n)
            .map(|i| {
                let (m, d) = if coarse {
                    (f64::from(rng.gen_range(0..15)) / 10.0, f64::from(rng.gen_range(0..15)) / 10.0)
                } else {
                    (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0))
                };
                synthetic_point(i, m, d)
            })
            .collect();
        let front = pareto_front(&pts);
        check(front.points == dominance_front(&pts), format!("set {set}: front differs from oracle"))?;
        for _ in 0..100 {
            let w = match rng.gen_range(0..10) {
                0 => LossWeights::new(0.0, rng.gen_range(0.0..3.0)).unwrap(),
                1 => LossWeights::new(rng.gen_range(0.0..3.0), 0.0).unwrap(),
                _ => LossWeights::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)).unwrap(),
            };
            let best = select_optimal(&front, &w).map_err(|e| e.to_string())?;
            check(front.contains(best), format!("set {set}: selection outside the front"))?;
            selections += 1;
        }
    }
    Ok(format!("1000 sets match the O(n^2) oracle; {selections} selections all on the front"))
}

fn c8_grid_search() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::default();
    let l0 = grid_search_level0(&AnalyticStub, &grid, 1).map_err(|e| e.to_string())?;
    check(l0.len() == 1331, format!("{} level-0 points", l0.len()))?;
    let mut best = f64::INFINITY;
    let mut arg = None;
    for a in (0..=100).step_by(10) {
        for b in (0..=100).step_by(10) {
            for g in (0..=100).step_by(10) {
                for t in (10..=90).step_by(10) {
                    let (m, d) = AnalyticStub::losses(key_params([a, b, g]), key_value(t));
                    if m + d < best {
                        best = m + d;
                        arg = Some(([a, b, g], t));
                    }
                }
            }
        }
    }
    let top = &l0[0];
    let (key, t) = arg.unwrap();
    check(
        (top.combined_loss().unwrap() - best).abs() < 1e-12 && top.key == key && top.threshold_key == t,
        format!("level 0 best {:?} at {:?} vs enumeration {best} at {key:?}", top.combined_loss(), top.key),
    )?;
    let l1 = grid_search_level1(&l0, &AnalyticStub, &grid, 1).map_err(|e| e.to_string())?;
    let b1 = l1[0].combined_loss().unwrap();
    check(b1 <= best, format!("level 1 best {b1} > level 0 best {best}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("level 0 best {best:.6} matches enumeration, level 1 best {b1:.6}, {elapsed:?}"))
}

fn c9_mcc() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 1000 {
        let [tp, tn, fp, fn_] = [(); 4].map(|_| rng.gen_range(0..1000usize));
        let c = ConfusionCounts::new(tp, tn, fp, fn_);
        let Some(m) = mcc(&c) else { continue };
        tested += 1;
        // Relabelling the positive class leaves MCC unchanged.
        let swapped = mcc(&ConfusionCounts::new(tn, tp, fn_, fp)).ok_or("swap undefined")?;
        check((m - swapped).abs() <= 1e-12, format!("{c:?}: class swap {m} vs {swapped}"))?;
        // Inverting every prediction negates it.
        let inverted = mcc(&ConfusionCounts::new(fn_, fp, tn, tp)).ok_or("inversion undefined")?;
        check((m + inverted).abs() <= 1e-12, format!("{c:?}: inversion {m} vs {inverted}"))?;
        check((-1.0..=1.0).contains(&m), format!("{c:?}: {m} outside [-1, 1]"))?;
        let p = phi(&c);
        worst = worst.max((m - p).abs());
        check((m - p).abs() <= 1e-12, format!("{c:?}: mcc {m} vs phi {p}"))?;
    }
    Ok(format!("1000 matrices, worst phi gap {worst:.1e}"))
}

fn c10_direction_of_effect() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut closer = 0;
    let mut in_band = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let mut cfg = RunConfig::synthetic([9000, 90, 900, 30], 1.0);
        cfg.seed = seed;
        cfg.classifiers = vec![dibalance_cli::config::ClassifierEntry::Name(dibalance::ClassifierKind::LogisticRegression)];
        cfg.out = dir.path().join(format!("seed{seed}"));
        cfg.validate().map_err(|e| e.to_string())?;

        let rows = cmd_setups(&cfg).map_err(|e| e.to_string())?;
        let di_of = |setup: &str| {
            rows.iter()
                .find(|r| r.setup.as_deref() == Some(setup))
                .and_then(|r| r.report.as_ref())
                .and_then(|r| r.di_ratio)
        };
        let (bal, imb) = (di_of("double-balanced"), di_of("double-imbalanced"));
        if let (Some(b), Some(i)) = (bal, imb) {
            if (b - 1.0).abs() < (i - 1.0).abs() {
                closer += 1;
            }
        }

        let run = cmd_search(&cfg).map_err(|e| e.to_string())?;
        let opt = run.results.models[0].optimum.as_ref().and_then(|p| p.report.clone());
        if let Some(r) = &opt {
            if r.di_ratio.is_some_and(|d| (0.8..=1.2).contains(&d)) && r.mcc.is_some_and(|m| m > 0.0) {
                in_band += 1;
            }
        }
        notes.push(format!(
            "s{seed}: DI {}/{} opt ({}, {})",
            fmt(bal),
            fmt(imb),
            fmt(opt.as_ref().and_then(|r| r.di_ratio)),
            fmt(opt.as_ref().and_then(|r| r.mcc))
        ));
    }
    let elapsed = start.elapsed();
    let summary = format!("balanced closer in {closer}/10, optimum in band with MCC > 0 in {in_band}/10, {elapsed:?}");
    eprintln!("    criterion 10 detail: {}", notes.join("; "));
    check(closer >= 8 && in_band >= 8 && elapsed < Duration::from_secs(300), summary.clone())?;
    Ok(summary)
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), |x| format!("{x:.3}"))
}

fn c11_degenerate() -> Outcome {
    let d = generate_synthetic(&SyntheticSpec::new(QuadrantCounts::new(300, 60, 200, 40), 1.0), 11).map_err(|e| e.to_string())?;
    let s = stratified_split(&d, [0.6, 0.2, 0.2], 11).map_err(|e| e.to_string())?;
    let grid = GridSpec {
        execution: Execution::Sequential,
        ..GridSpec::default()
    };
    let l0 = ModelInspector::new(&s.train, &s.test0, &NeverLearner, LossWeights::default(), 50);
    let l1 = ModelInspector::new(&s.train, &s.test1, &NeverLearner, LossWeights::default(), 50);
    let level0 = grid_search_level0(&l0, &grid, 3).map_err(|e| e.to_string())?;
    check(level0.len() == 1331, "level 0 incomplete")?;
    for p in &level0 {
        let r = p.report.as_ref().ok_or_else(|| format!("{:?} failed: {:?}", p.key, p.failure))?;
        check(r.di_ratio.is_none() && r.mcc.is_none(), format!("{:?}: defined metrics", p.key))?;
        let row = r.table_row("never");
        check(row[1] == "NaN" && row[2] == "NaN" && row[3] == "NaN", format!("rendered {row:?}"))?;
        check(!p.is_valid(), "degenerate point marked valid")?;
    }
    check(pareto_front(&level0).is_empty(), "degenerate points reached the front")?;
    check(
        matches!(run_search(&l0, &l1, &grid, 3), Err(SearchError::NoValidPoints)),
        "all-degenerate search did not end with a no-valid-points diagnosis",
    )?;
    check(
        matches!(select_optimal(&ParetoFront::default(), &LossWeights::default()), Err(SearchError::EmptyFront)),
        "empty front selection",
    )?;
    // Mixed case: degenerate points sit beside valid ones.
    let out = run_search(&HalfNever, &HalfNever, &GridSpec::default(), 3).map_err(|e| e.to_string())?;
    let invalid = out.level0.iter().filter(|p| !p.is_valid()).count();
    check(invalid == 5 * 121, format!("{invalid} invalid level-0 points"))?;
    for f in [&out.front0, &out.front1] {
        check(f.points.iter().all(|p| p.is_valid() && p.params.alpha <= 0.5), "invalid point on a front")?;
    }
    check(out.optimum.is_valid() && out.optimum.params.alpha <= 0.5, "invalid optimum")?;
    Ok(format!("1331 NaN points quarantined; mixed search kept {invalid} invalid points off both fronts"))
}

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 11] = [
        (1, "worked-example ratios", c1_worked_ratios),
        (2, "worked-example size", c2_worked_size),
        (3, "worked-example composition", c3_worked_composition),
        (4, "combined-loss arithmetic", c4_combined_loss),
        (5, "closed-form/constraint equivalence", c5_constraint_equivalence),
        (6, "identity/equilibration endpoints", c6_endpoints),
        (7, "Pareto correctness", c7_pareto),
        (8, "grid-search correctness", c8_grid_search),
        (9, "MCC properties", c9_mcc),
        (10, "direction of effect on synthetic data", c10_direction_of_effect),
        (11, "degenerate-model handling", c11_degenerate),
    ];
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS  {id:>2} {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {id:>2} {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {id:>2} {name}: panicked");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
