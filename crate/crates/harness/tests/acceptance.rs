//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured values, the pinned tolerances and the runtime against its budget.
//!
//! Exits 0 regardless of the verdicts so that `cargo test` reports the suite
//! as run; set `ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

use std::path::Path;
use std::time::{Duration, Instant};

use lrd_harness::config::{ConditionsConfig, ErrorFamily};
use lrd_harness::report::sha256_hex;
use lrd_harness::{emit_report, run_conditions, run_cv_experiment, run_rate_study, run_table_experiment};
use lrd_harness::{Cell, ExperimentConfig, ExperimentReport, Table};
use lrd_regression::conditions::{check_bandwidth_conditions, BandwidthRule, ConditionId, Verdict};
use lrd_regression::estimator::{bias_approx, nw_estimate, shape_estimate, Smoother};
use lrd_regression::processes::{farima_coeffs, partial_sum_variance_oracle, simulate_predictors, PredictorSpec};
use lrd_regression::scaling::{dyadic_ladder, log_log_fit};
use lrd_regression::{
    draw_innovations, split_seed, CoefficientSequence, DesignDensity, ErrorScale, ExactExponent, InnovationSpec,
    KernelShape, KernelSpec, ProcessSpec, RegressionSample, TrueFunction,
};
use rayon::prelude::*;

/// One measured quantity with its acceptance rule.
struct Check {
    label: String,
    pass: bool,
}

impl Check {
    fn new(pass: bool, label: impl Into<String>) -> Self {
        Self { label: label.into(), pass }
    }

    fn within(label: &str, value: f64, target: f64, tol: f64) -> Self {
        Self::new((value - target).abs() <= tol, format!("{label} = {value:.4} (want {target} ± {tol})"))
    }

    fn between(label: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self::new((lo..=hi).contains(&value), format!("{label} = {value:.4} (want [{lo}, {hi}])"))
    }

    fn above(label: &str, value: f64, bound: f64) -> Self {
        Self::new(value > bound, format!("{label} = {value:.4} (want > {bound})"))
    }

    fn below(label: &str, value: f64, bound: f64) -> Self {
        Self::new(value < bound, format!("{label} = {value:.4} (want < {bound})"))
    }
}

type Outcome = Result<Vec<Check>, String>;

fn config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn value(t: &Table, column: &str, filters: &[(&str, f64)]) -> f64 {
    let c = t.column(column).unwrap_or_else(|| panic!("{} has no column {column}", t.name));
    let hits: Vec<f64> = t
        .rows
        .iter()
        .filter(|row| {
            filters.iter().all(|(k, v)| {
                let j = t.column(k).expect("filter column");
                row[j].as_f64().is_some_and(|x| (x - v).abs() < 1e-9)
            })
        })
        .map(|row| row[c].as_f64().expect("numeric cell"))
        .collect();
    assert_eq!(hits.len(), 1, "{column} at {filters:?}");
    hits[0]
}

fn text(t: &Table, column: &str, row: &[Cell]) -> String {
    row[t.column(column).expect("column")].to_string()
}

fn criterion_1() -> Outcome {
    let iid = CoefficientSequence::<f64>::iid();
    let two = CoefficientSequence::new(vec![1.0, 1.0], 1.0).map_err(|e| e.to_string())?;
    let mut checks = vec![
        Check::new(partial_sum_variance_oracle(&iid, 37) == 37.0, "iid oracle at n=37 equals 37 exactly"),
        Check::new(partial_sum_variance_oracle(&two, 2) == 6.0, "coeffs [1, 1] at n=2 equal 6 exactly"),
    ];
    let mut worst = 0.0f64;
    for d in [-0.4f64, -0.1, 0.05, 0.2, 0.35, 0.45] {
        let c = farima_coeffs(d, 2).map_err(|e| e.to_string())?;
        let v = c.values();
        worst = worst.max((v[1] - d).abs()).max((v[2] - d * (1.0 + d) / 2.0).abs());
    }
    checks.push(Check::new(worst < 1e-12, format!("max |psi_k - closed form|, k = 1, 2 = {worst:.1e} (want < 1e-12)")));
    Ok(checks)
}

fn criterion_2() -> Outcome {
    let ladder: Vec<f64> = dyadic_ladder(8, 13).iter().map(|&n| n as f64).collect();
    let mut checks = Vec::new();
    for alpha in [0.2, 0.4, 0.6, 0.8] {
        let d = (1.0 - alpha) / 2.0;
        let c = farima_coeffs(d, 1 << 20).map_err(|e| e.to_string())?;
        let v: Vec<f64> = ladder.iter().map(|&n| partial_sum_variance_oracle(&c, n as usize)).collect();
        let slope = log_log_fit(&ladder, &v).ok_or("slope fit failed")?.slope;
        checks.push(Check::within(&format!("oracle slope alpha={alpha}"), slope, 2.0 - alpha, 0.05));

        let n = 1 << 10;
        let seeds = 1000u64;
        let spec = ProcessSpec::farima(d, InnovationSpec::gaussian(0)).with_truncation(5000).with_scale(ErrorScale::UnitInnovation);
        let oracle = partial_sum_variance_oracle(&spec.coefficients::<f64>(n).map_err(|e| e.to_string())?, n);
        let sq: f64 = (0..seeds)
            .into_par_iter()
            .map(|r| {
                let s: f64 = spec.clone().with_seed(split_seed(77, &[r])).simulate::<f64>(n).expect("simulate").iter().sum();
                s * s
            })
            .sum();
        let rel = (sq / seeds as f64) / oracle - 1.0;
        checks.push(Check::within(&format!("Monte Carlo/oracle - 1 at alpha={alpha}"), rel, 0.0, 0.15));
    }
    Ok(checks)
}

/// A random design and response of size 2..60 on `[-3, 3]` x `[-10, 10]`.
fn random_case(case: u64) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let u = |tag: u64, k: usize| -> Vec<f64> {
        let z: Vec<f64> = draw_innovations(&InnovationSpec::uniform(split_seed(case, &[tag])), k).expect("draws");
        z.into_iter().map(|v: f64| (v / 3f64.sqrt() + 1.0) / 2.0).collect()
    };
    let params = u(0, 3);
    let n = 2 + (params[0] * 58.0) as usize;
    let x = u(1, n).into_iter().map(|v| 6.0 * v - 3.0).collect();
    let y = u(2, n).into_iter().map(|v| 20.0 * v - 10.0).collect();
    (x, y, 0.05 + 1.95 * params[1], 100.0 * params[2] - 50.0)
}

fn criterion_3() -> Outcome {
    let grid: Vec<f64> = (0..41).map(|i| -3.0 + 0.15 * i as f64).collect();
    let shapes = [KernelShape::Epanechnikov, KernelShape::Quartic, KernelShape::GaussianTruncated];
    let cases = 1000u64;
    let bad = (0..cases)
        .into_par_iter()
        .map(|case| {
            let (x, y, h, c) = random_case(split_seed(31, &[case]));
            let kernel = KernelSpec::new(shapes[case as usize % shapes.len()]);
            let scale = 1.0 + y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let mut fails = [0usize; 4];

            let constant = RegressionSample::from_arrays(x.clone(), vec![c; x.len()]).unwrap();
            let est = nw_estimate(&constant, &kernel, h, &grid).unwrap();
            let ok = est.values.iter().zip(&est.flagged).all(|(v, f)| *f || (v - c).abs() <= 1e-12 * (1.0 + c.abs()));
            fails[0] += usize::from(!ok);

            let base = RegressionSample::from_arrays(x.clone(), y.clone()).unwrap();
            let shifted = RegressionSample::from_arrays(x.clone(), y.iter().map(|v| v + c).collect()).unwrap();
            let a = shape_estimate(&base, &kernel, h, &grid).unwrap();
            let b = shape_estimate(&shifted, &kernel, h, &grid).unwrap();
            let tol = 1e-12 * (scale + c.abs());
            let ok = a.flagged == b.flagged && a.values.iter().zip(&b.values).all(|(p, q)| (p - q).abs() <= tol);
            fails[1] += usize::from(!ok);

            // Weights: the fits of the unit responses e_j sum to one wherever the fit is defined.
            let mut total = vec![0.0; grid.len()];
            let mut flagged = vec![false; grid.len()];
            for j in 0..x.len() {
                let mut e = vec![0.0; x.len()];
                e[j] = 1.0;
                let (fit, fl) = Smoother::new(&x, &e).nw(&kernel, h, &grid);
                for g in 0..grid.len() {
                    total[g] += fit[g];
                    flagged[g] = fl[g];
                }
            }
            let ok = total.iter().zip(&flagged).all(|(t, f)| *f || (t - 1.0).abs() <= 1e-12);
            fails[2] += usize::from(!ok);

            let factor = c / 10.0;
            let scaled = RegressionSample::from_arrays(x, y.iter().map(|v| factor * v).collect()).unwrap();
            let tol = 1e-12 * scale * (1.0 + factor.abs());
            let ok = [nw_estimate::<f64>, shape_estimate::<f64>].iter().all(|est| {
                let p = est(&base, &kernel, h, &grid).unwrap();
                let q = est(&scaled, &kernel, h, &grid).unwrap();
                p.values.iter().zip(&q.values).all(|(u, v)| (factor * u - v).abs() <= tol)
            });
            fails[3] += usize::from(!ok);
            fails
        })
        .reduce(|| [0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
    let names = ["constant response", "shape shift invariance", "weight sum", "scaling equivariance"];
    Ok(names
        .iter()
        .zip(bad)
        .map(|(name, b)| Check::new(b == 0, format!("{name}: {b}/{cases} failing cases")))
        .collect())
}

/// Mean noiseless NW fit at 0 for `m(x) = x^2` under a normal design.
fn mean_fit_at_zero(h: f64, n: usize, reps: u64) -> f64 {
    let kernel = KernelSpec::new(KernelShape::Epanechnikov);
    let total: f64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x: Vec<f64> = simulate_predictors(&PredictorSpec::iid(split_seed(4, &[r])), n).expect("design");
            let y: Vec<f64> = x.iter().map(|v| v * v).collect();
            let (fit, flagged) = Smoother::new(&x, &y).nw(&kernel, h, &[0.0]);
            assert!(!flagged[0]);
            fit[0]
        })
        .sum();
    total / reps as f64
}

fn criterion_4() -> Outcome {
    let kernel = KernelSpec::new(KernelShape::Epanechnikov);
    let formula = bias_approx(TrueFunction::Square, DesignDensity::StandardNormal, &kernel, 0.05, 0.0).map_err(|e| e.to_string())?;
    let ratio = mean_fit_at_zero(0.05, 10_000, 500) / formula;
    let hs = [0.02, 0.04, 0.08, 0.12, 0.2];
    let bias: Vec<f64> = hs.iter().map(|&h| mean_fit_at_zero(h, 10_000, 500)).collect();
    let slope = log_log_fit(&hs, &bias).ok_or("slope fit failed")?.slope;
    Ok(vec![Check::between("bias/formula at h=0.05", ratio, 0.85, 1.15), Check::within("slope in h", slope, 2.0, 0.2)])
}

fn mise_table(r: &ExperimentReport) -> &Table {
    r.table("mise").expect("mise table")
}

fn criterion_5(t1: &ExperimentReport, ds: &[f64]) -> Outcome {
    let t = mise_table(t1);
    let star: Vec<f64> = ds.iter().map(|&d| value(t, "mise_star", &[("d", d), ("h", 0.05)])).collect();
    let (lo, hi) = star.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let last = *ds.last().expect("d ladder");
    let mise = |d: f64, h: f64| value(t, "mise", &[("d", d), ("h", h)]);
    let star1: Vec<f64> = ds.iter().map(|&d| value(t, "mise_star", &[("d", d), ("h", 1.0)])).collect();
    let drift = star1.iter().map(|v| (v / star1[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::below("h=0.05 MISE* max/min", hi / lo, 1.25),
        Check::above(&format!("h=0.05 MISE(d={last})/MISE(d=0)"), mise(last, 0.05) / mise(0.0, 0.05), 1.8),
        Check::above("h=1 MISE(d=0.25)/MISE(d=0)", mise(0.25, 1.0) / mise(0.0, 1.0), 1.0),
        Check::new(drift <= 0.03, format!("h=1 max |MISE*(d)/MISE*(0) - 1| = {drift:.4} (want <= 0.03)")),
    ])
}

fn criterion_6(t1: &ExperimentReport, t2: &ExperimentReport, ds: &[f64]) -> Outcome {
    let worst = ds
        .iter()
        .filter(|&&d| d <= 0.3 + 1e-12)
        .map(|&d| {
            let a = value(mise_table(t1), "mise", &[("d", d), ("h", 0.05)]);
            let b = value(mise_table(t2), "mise", &[("d", d), ("h", 0.05)]);
            (b / a - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(vec![Check::new(
        worst <= 0.25,
        format!("max |MISE_lrd-x/MISE_iid-x - 1| over d <= 0.3 at h=0.05 = {worst:.4} (want <= 0.25)"),
    )])
}

fn criterion_7() -> Outcome {
    let r = run_rate_study(&config("rates.toml")).map_err(|e| e.to_string())?;
    let t = r.table("rate_slopes").expect("slopes");
    let slope = |alpha: f64, est: &str| {
        let c = t.column("slope").expect("slope column");
        t.rows
            .iter()
            .find(|row| row[0].as_f64() == Some(alpha) && text(t, "estimator", row) == est)
            .and_then(|row| row[c].as_f64())
            .expect("slope row")
    };
    Ok(vec![
        Check::within("MISE slope alpha=0.9", slope(0.9, "m"), -0.8, 0.15),
        Check::within("MISE slope alpha=0.3", slope(0.3, "m"), -0.3, 0.15),
        Check::within("shape MISE slope alpha=0.3", slope(0.3, "shape"), -0.8, 0.15),
    ])
}

fn criterion_8() -> Outcome {
    let base = config("cv-by-memory.toml");
    let cfg = ExperimentConfig { n: 400, d_ladder: vec![0.05, 0.35], ..base.clone() };
    let r = run_cv_experiment(&cfg).map_err(|e| e.to_string())?;
    let s = r.table("cv_summary").expect("summary");
    let mut checks = vec![
        Check::between("n=400 median h_cv/h_ase alpha=0.9", value(s, "median_ratio", &[("d", 0.05)]), 0.7, 1.4),
        Check::between("n=400 median h_cv/h_ase alpha=0.3", value(s, "median_ratio", &[("d", 0.35)]), 0.7, 1.4),
        Check::above("n=400 corr(CV residual, cross term) alpha=0.3", value(s, "residual_cross_corr", &[("d", 0.35)]), 0.8),
    ];

    let t3 = run_cv_experiment(&base).map_err(|e| e.to_string())?;
    let s = t3.table("cv_summary").expect("summary");
    let m: Vec<f64> = base.d_ladder.iter().map(|&d| value(s, "mean_min_cv", &[("d", d)])).collect();
    let se: Vec<f64> = base.d_ladder.iter().map(|&d| value(s, "mean_min_cv_se", &[("d", d)])).collect();
    // A decrease breaks the pattern only when it exceeds two standard errors of the difference.
    let significant = (1..m.len()).filter(|&k| m[k - 1] - m[k] > 2.0 * (se[k].powi(2) + se[k - 1].powi(2)).sqrt()).count();
    let raw = m.windows(2).filter(|w| w[1] < w[0]).count();
    checks.push(Check::new(significant == 0, format!("significant decreases of mean min-CV along d = {significant} (raw {raw}; want 0)")));
    checks.push(Check::above("mean min-CV endpoint ratio", m[m.len() - 1] / m[0], 1.4));
    Ok(checks)
}

fn criterion_9() -> Outcome {
    type Q = ExactExponent;
    let one = Q::from_integer(1);
    let classify = |x: Q| match x.cmp(&Q::from_integer(0)) {
        std::cmp::Ordering::Greater => Verdict::Diverges,
        std::cmp::Ordering::Equal => Verdict::Bounded,
        std::cmp::Ordering::Less => Verdict::TendsToZero,
    };
    let mut wrong = 0;
    for i in 1..=50 {
        for j in 0..50 {
            let (alpha, beta) = (Q::new(i, 50), Q::new(j, 50));
            let v = check_bandwidth_conditions(alpha, one, &BandwidthRule::new(1.0, beta), &[256, 512]);
            let get = |id| v.iter().find(|c| c.id == id).expect("condition").verdict;
            // B1 flips at beta = 1 - alpha, B2 at beta = (1 - alpha) / 5.
            let expect_b1 = classify((one - alpha) - beta);
            let expect_b2 = classify((one - alpha) / 5 - beta);
            wrong += usize::from(get(ConditionId::B1) != expect_b1) + usize::from(get(ConditionId::B2) != expect_b2);
        }
    }
    let mut cfg = config("conditions.toml");
    cfg.conditions = Some(ConditionsConfig { families: vec![ErrorFamily::Farima], ..cfg.conditions.clone().unwrap_or_default() });
    let r = run_conditions(&cfg).map_err(|e| e.to_string())?;
    let t = r.table("conditions_mc").expect("mc table");
    // One row per ladder point; count each verdict once.
    let first = cfg.conditions.as_ref().map_or(256, |c| 1usize << c.ladder_lo) as f64;
    let agree: Vec<String> = t
        .rows
        .iter()
        .filter(|row| row[t.column("n").expect("n column")].as_f64() == Some(first))
        .map(|row| text(t, "agree", row))
        .filter(|a| !a.is_empty())
        .collect();
    let ok = agree.iter().filter(|a| *a == "true").count();
    Ok(vec![
        Check::new(wrong == 0, format!("lattice verdict mismatches = {wrong}/5000")),
        Check::new(ok == agree.len() && !agree.is_empty(), format!("linear Monte Carlo verdicts agreeing with oracle = {ok}/{}", agree.len())),
    ])
}

fn hashes(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .expect("report dir")
        .map(|e| {
            let p = e.expect("entry").path();
            (p.file_name().expect("name").to_string_lossy().into_owned(), sha256_hex(&std::fs::read(&p).expect("read")))
        })
        .collect();
    v.sort();
    v
}

fn criterion_10(t1: &ExperimentReport) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    emit_report(t1, &a).map_err(|e| e.to_string())?;
    let again = run_table_experiment(&config("mise-iid-design.toml")).map_err(|e| e.to_string())?;
    emit_report(&again, &b).map_err(|e| e.to_string())?;
    let (ha, hb) = (hashes(&a), hashes(&b));
    Ok(vec![Check::new(ha == hb, format!("MISE experiment rerun: {} files, identical hashes = {}", ha.len(), ha == hb))])
}

fn main() {
    let started = Instant::now();
    let mise_cfg = config("mise-iid-design.toml");
    let ds = mise_cfg.d_ladder.clone();
    let mut report1: Option<ExperimentReport> = None;

    let mut results: Vec<(usize, &str, Duration, Duration, Outcome)> = Vec::new();
    let mut run = |id: usize, name: &'static str, budget_s: u64, f: &mut dyn FnMut() -> Outcome| {
        let s = Instant::now();
        let out = f();
        results.push((id, name, s.elapsed(), Duration::from_secs(budget_s), out));
        let (id, name, took, budget, out) = results.last().expect("just pushed");
        report_line(*id, name, *took, *budget, out);
    };

    run(1, "oracle exactness", 1, &mut criterion_1);
    run(2, "partial-sum variance scaling", 60, &mut criterion_2);
    run(3, "estimator exactness", 30, &mut criterion_3);
    run(4, "bias law", 120, &mut criterion_4);
    run(5, "MISE pattern over d", 300, &mut || {
        let r = run_table_experiment(&mise_cfg).map_err(|e| e.to_string())?;
        let out = criterion_5(&r, &ds);
        report1 = Some(r);
        out
    });
    let Some(report1) = report1 else {
        println!("FAIL C6 long-memory design: MISE run failed");
        println!("FAIL C10 determinism: MISE run failed");
        std::process::exit(i32::from(strict()));
    };
    run(6, "long-memory design", 300, &mut || {
        let t2 = run_table_experiment(&config("mise-lrd-design.toml")).map_err(|e| e.to_string())?;
        criterion_6(&report1, &t2, &ds)
    });
    run(7, "rate dichotomy", 900, &mut criterion_7);
    run(8, "cross-validation behavior", 600, &mut criterion_8);
    run(9, "condition thresholds", 60, &mut criterion_9);
    run(10, "determinism", 300, &mut || criterion_10(&report1));

    let failed = results
        .iter()
        .filter(|(_, _, took, budget, out)| !passed(out) || took > budget)
        .count();
    println!(
        "acceptance: {} passed, {failed} failed (total {:.1} s)",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 && strict() {
        std::process::exit(1);
    }
}

fn strict() -> bool {
    std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1")
}

fn passed(out: &Outcome) -> bool {
    out.as_ref().is_ok_and(|checks| checks.iter().all(|c| c.pass))
}

fn report_line(id: usize, name: &str, took: Duration, budget: Duration, out: &Outcome) {
    let ok = passed(out) && took <= budget;
    let detail = match out {
        Ok(checks) => checks
            .iter()
            .map(|c| format!("{}{}", if c.pass { "" } else { "[x] " }, c.label))
            .collect::<Vec<_>>()
            .join("; "),
        Err(e) => format!("error: {e}"),
    };
    println!(
        "{} C{id} {name}: {detail} [{:.1} s of {} s]",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        budget.as_secs()
    );
}
