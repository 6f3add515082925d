//! Monte Carlo runners behind the CLI verbs.

use lrd_regression::conditions::{
    check_bandwidth_conditions, linear_negligibility_exponent, verdict_from_exponent, BandwidthRule, ConditionId,
    ConditionVerdict, MartingaleSums, Verdict, SLOPE_TOLERANCE,
};
use lrd_regression::estimator::Smoother;
use lrd_regression::functions::mean_response;
use lrd_regression::processes::simulate_predictors;
use lrd_regression::risk::{
    ase_with, cv_with, h_opt_theory, minimize_over_grid, mise_theory, EvalGrid, RiskWeight, TheoryConstants,
    EVAL_MASS, EVAL_POINTS,
};
use lrd_regression::scaling::{dyadic_ladder, log_log_fit};
use lrd_regression::{split_seed, DesignDensity, ExactExponent, KernelSpec};
use rayon::prelude::*;

use crate::config::{ConditionsConfig, ErrorFamily, ExperimentConfig, RatesConfig};
use crate::report::{sha256_hex, Cell, ExperimentReport, Provenance, Table};
use crate::HarnessError;

/// Seed-path labels below the replicate index.
const DESIGN: u64 = 1;
const ERRORS: u64 = 2;

const DESIGN_DENSITY: DesignDensity = DesignDensity::StandardNormal;

type Run<T> = Result<T, HarnessError>;

fn provenance(cfg: &ExperimentConfig) -> Provenance {
    Provenance {
        config_sha256: sha256_hex(cfg.to_toml().as_bytes()),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn report(cfg: &ExperimentConfig, kind: &str, tables: Vec<Table>, summary: Vec<String>) -> ExperimentReport {
    ExperimentReport { id: cfg.experiment.clone(), kind: kind.to_string(), tables, summary, provenance: provenance(cfg) }
}

/// Runs `f(r)` for every replicate on `workers` threads and returns the
/// results in replicate order.
fn par_replicates<T: Send>(cfg: &ExperimentConfig, f: impl Fn(usize) -> Run<T> + Sync + Send) -> Run<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("workers: {e}")))?;
    pool.install(|| (0..cfg.replicates).into_par_iter().map(f).collect())
}

fn design(cfg: &ExperimentConfig, r: usize, n: usize) -> Run<Vec<f64>> {
    let seed = split_seed(cfg.seed, &[r as u64, DESIGN]);
    Ok(simulate_predictors(&cfg.predictors.spec(seed), n)?)
}

fn errors(cfg: &ExperimentConfig, d: f64, r: usize, n: usize) -> Run<Vec<f64>> {
    let seed = split_seed(cfg.seed, &[r as u64, ERRORS]);
    match cfg.errors.process(d, seed) {
        None => Ok(vec![0.0; n]),
        Some(spec) => Ok(spec.simulate(n)?),
    }
}

fn responses(cfg: &ExperimentConfig, x: &[f64], eps: &[f64]) -> Vec<f64> {
    x.iter().zip(eps).map(|(&xi, &e)| cfg.truth.value(xi) + e).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard error of the mean; zero for a single value.
fn std_error(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (var / v.len() as f64).sqrt()
}

fn quantile(v: &[f64], p: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = p * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// ISE of the NW fit and of the shape fit on the evaluation grid.
struct GridRisk {
    grid: EvalGrid,
    m: Vec<f64>,
    m_star: Vec<f64>,
}

impl GridRisk {
    fn new(cfg: &ExperimentConfig) -> Self {
        let grid = EvalGrid::new(DESIGN_DENSITY, EVAL_POINTS, EVAL_MASS);
        let mbar = mean_response(cfg.truth, DESIGN_DENSITY);
        let m: Vec<f64> = grid.points.iter().map(|&x| cfg.truth.value(x)).collect();
        let m_star = m.iter().map(|v| v - mbar).collect();
        Self { grid, m, m_star }
    }

    /// `(ISE, ISE*, flagged points)`; flagged points drop out of both sums.
    fn ise(&self, sm: &Smoother<f64>, ybar: f64, kernel: &KernelSpec, h: f64) -> (f64, f64, usize) {
        let (fit, flagged) = sm.nw(kernel, h, &self.grid.points);
        let mut sq = vec![0.0; fit.len()];
        let mut sq_star = vec![0.0; fit.len()];
        for i in (0..fit.len()).filter(|&i| !flagged[i]) {
            sq[i] = (fit[i] - self.m[i]).powi(2);
            sq_star[i] = (fit[i] - ybar - self.m_star[i]).powi(2);
        }
        let nflag = flagged.iter().filter(|&&f| f).count();
        (self.grid.integrate(&sq), self.grid.integrate(&sq_star), nflag)
    }
}

fn alpha_of(d: f64) -> f64 {
    1.0 - 2.0 * d
}

/// Monte Carlo MISE and MISE* for every `(d, h)` of the config.
pub fn run_table_experiment(cfg: &ExperimentConfig) -> Run<ExperimentReport> {
    cfg.validate()?;
    let h_values = &cfg.bandwidth.values;
    if h_values.is_empty() {
        return Err(HarnessError::Config("bandwidth.values: the table experiment needs explicit bandwidths".into()));
    }
    let kernel = KernelSpec::new(cfg.kernel);
    let risk = GridRisk::new(cfg);
    let n = cfg.n;
    let per_rep = par_replicates(cfg, |r| {
        let x = design(cfg, r, n)?;
        let mut out = Vec::with_capacity(cfg.d_ladder.len());
        for &d in &cfg.d_ladder {
            let y = responses(cfg, &x, &errors(cfg, d, r, n)?);
            let ybar = mean(&y);
            let sm = Smoother::new(&x, &y);
            out.push(h_values.iter().map(|&h| risk.ise(&sm, ybar, &kernel, h)).collect::<Vec<_>>());
        }
        Ok(out)
    })?;

    let mut table = Table::new(
        "mise",
        &["d", "alpha", "h", "mise", "mise_se", "mise_star", "mise_star_se", "mean_flagged"],
    );
    let mut summary = vec![format!(
        "table experiment: n={} replicates={} truth={} kernel={} errors={:?} predictors alpha_x={}",
        n,
        cfg.replicates,
        cfg.truth.name(),
        cfg.kernel.name(),
        cfg.errors.family,
        cfg.predictors.alpha_x()
    )];
    for (j, &h) in h_values.iter().enumerate() {
        let mut mise_by_d = Vec::new();
        let mut star_by_d = Vec::new();
        for (k, &d) in cfg.d_ladder.iter().enumerate() {
            let ise: Vec<f64> = per_rep.iter().map(|rep| rep[k][j].0).collect();
            let star: Vec<f64> = per_rep.iter().map(|rep| rep[k][j].1).collect();
            let flagged: Vec<f64> = per_rep.iter().map(|rep| rep[k][j].2 as f64).collect();
            mise_by_d.push(mean(&ise));
            star_by_d.push(mean(&star));
            table.push(vec![
                d.into(),
                alpha_of(d).into(),
                h.into(),
                mean(&ise).into(),
                std_error(&ise).into(),
                mean(&star).into(),
                std_error(&star).into(),
                mean(&flagged).into(),
            ]);
        }
        let (lo, hi) = star_by_d.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        summary.push(format!(
            "h={h}: MISE* max/min over d = {:.4}; MISE(d={})/MISE(d={}) = {:.4}",
            hi / lo,
            cfg.d_ladder[cfg.d_ladder.len() - 1],
            cfg.d_ladder[0],
            mise_by_d[mise_by_d.len() - 1] / mise_by_d[0]
        ));
    }
    Ok(report(cfg, "table", vec![table], summary))
}

struct CvReplicate {
    cv: Vec<f64>,
    ase: Vec<f64>,
    mean_eps_sq: f64,
    cross_term: f64,
}

/// Cross-validation over the bandwidth grid for every `d`: minimized CV,
/// `h_CV / h_ASE`, and the CV residual against the error cross term.
pub fn run_cv_experiment(cfg: &ExperimentConfig) -> Run<ExperimentReport> {
    cfg.validate()?;
    let kernel = KernelSpec::new(cfg.kernel);
    let h_grid = cfg.bandwidth.grid();
    let (lo, hi) = DESIGN_DENSITY.central_range(EVAL_MASS);
    let weight = RiskWeight::Range(lo, hi);
    let l = cfg.bandwidth.leave_out;
    let n = cfg.n;
    let per_rep = par_replicates(cfg, |r| {
        let x = design(cfg, r, n)?;
        let mut out = Vec::with_capacity(cfg.d_ladder.len());
        for &d in &cfg.d_ladder {
            let eps = errors(cfg, d, r, n)?;
            let y = responses(cfg, &x, &eps);
            let sm = Smoother::new(&x, &y);
            let mut cv = Vec::with_capacity(h_grid.len());
            let mut ase = Vec::with_capacity(h_grid.len());
            for &h in &h_grid {
                cv.push(cv_with(&sm, &x, &y, &kernel, h, l, weight)?.value);
                ase.push(ase_with(&sm, &x, cfg.truth, &kernel, h, weight)?.value);
            }
            let nf = n as f64;
            let sum: f64 = eps.iter().sum();
            let sq: f64 = eps.iter().map(|e| e * e).sum();
            let sq_w: f64 = eps.iter().zip(&x).filter(|(_, &xi)| xi >= lo && xi <= hi).map(|(e, _)| e * e).sum();
            out.push(CvReplicate { cv, ase, mean_eps_sq: sq_w / nf, cross_term: (sum * sum - sq) / (nf * nf) });
        }
        Ok(out)
    })?;

    let mut per_d = Table::new(
        "cv_summary",
        &[
            "d",
            "alpha",
            "mean_min_cv",
            "mean_min_cv_se",
            "median_h_cv",
            "median_h_ase",
            "median_ratio",
            "ratio_q25",
            "ratio_q75",
            "mean_eps_sq",
            "min_mase",
            "residual_cross_corr",
            "boundary_minima",
        ],
    );
    let mut reps = Table::new(
        "cv_replicates",
        &["d", "replicate", "h_cv", "h_ase", "min_cv", "residual", "cross_term", "mean_eps_sq"],
    );
    let mut means = Vec::new();
    let mut summary = vec![format!(
        "cv experiment: n={} replicates={} leave_out={} grid=[{}, {}] x {}",
        n, cfg.replicates, l, cfg.bandwidth.grid_lo, cfg.bandwidth.grid_hi, cfg.bandwidth.grid_count
    )];
    for (k, &d) in cfg.d_ladder.iter().enumerate() {
        let mase: Vec<f64> = (0..h_grid.len()).map(|j| mean(&per_rep.iter().map(|rep| rep[k].ase[j]).collect::<Vec<_>>())).collect();
        let mut min_cv = Vec::new();
        let mut ratio = Vec::new();
        let mut h_cv = Vec::new();
        let mut h_ase = Vec::new();
        let mut residual = Vec::new();
        let mut cross = Vec::new();
        let mut eps_sq = Vec::new();
        let mut boundary = 0usize;
        for (r, rep) in per_rep.iter().enumerate() {
            let c = &rep[k];
            let gc = minimize_over_grid(&c.cv, &h_grid)?;
            let ga = minimize_over_grid(&c.ase, &h_grid)?;
            boundary += usize::from(gc.at_boundary || ga.at_boundary);
            let res = c.cv[gc.index] - mase[gc.index] - c.mean_eps_sq;
            min_cv.push(c.cv[gc.index]);
            h_cv.push(gc.h);
            h_ase.push(ga.h);
            ratio.push(gc.h / ga.h);
            residual.push(res);
            cross.push(c.cross_term);
            eps_sq.push(c.mean_eps_sq);
            reps.push(vec![
                d.into(),
                r.into(),
                gc.h.into(),
                ga.h.into(),
                c.cv[gc.index].into(),
                res.into(),
                c.cross_term.into(),
                c.mean_eps_sq.into(),
            ]);
        }
        let min_mase = mase.iter().copied().fold(f64::INFINITY, f64::min);
        let corr = if per_rep.len() > 2 { correlation(&residual, &cross) } else { f64::NAN };
        means.push(mean(&min_cv));
        per_d.push(vec![
            d.into(),
            alpha_of(d).into(),
            mean(&min_cv).into(),
            std_error(&min_cv).into(),
            quantile(&h_cv, 0.5).into(),
            quantile(&h_ase, 0.5).into(),
            quantile(&ratio, 0.5).into(),
            quantile(&ratio, 0.25).into(),
            quantile(&ratio, 0.75).into(),
            mean(&eps_sq).into(),
            min_mase.into(),
            corr.into(),
            boundary.into(),
        ]);
        summary.push(format!(
            "d={d}: mean CV(h_cv)={:.4} vs mean eps^2 + min MASE = {:.4}; median h_cv/h_ase = {:.3}; corr(residual, cross) = {:.3}",
            mean(&min_cv),
            mean(&eps_sq) + min_mase,
            quantile(&ratio, 0.5),
            corr
        ));
    }
    let inversions = means.windows(2).filter(|w| w[1] < w[0]).count();
    summary.push(format!(
        "mean CV endpoint ratio = {:.4}; decreases along the ladder = {inversions}",
        means[means.len() - 1] / means[0]
    ));
    Ok(report(cfg, "cv", vec![per_d, reps], summary))
}

/// Expected MISE slope `-min(4/5, alpha)`.
pub fn expected_rate(alpha: f64) -> f64 {
    -(0.8f64).min(alpha)
}

/// Monte Carlo MISE and MISE* at the grid-optimal bandwidth over an `n`
/// ladder, with fitted log-log slopes. Smaller sizes reuse prefixes of the
/// largest simulation.
pub fn run_rate_study(cfg: &ExperimentConfig) -> Run<ExperimentReport> {
    cfg.validate()?;
    let rates: RatesConfig = cfg
        .rates
        .clone()
        .ok_or_else(|| HarnessError::Config("rates: section required for the rate study".into()))?;
    let kernel = KernelSpec::new(cfg.kernel);
    let risk = GridRisk::new(cfg);
    let h_grid = cfg.bandwidth.grid();
    let n_max = *rates.n_ladder.iter().max().expect("validated ladder");
    let alpha_x = cfg.predictors.alpha_x();

    let mut table = Table::new(
        "rates",
        &[
            "alpha", "n", "h_mise", "mise", "mise_se", "mise_boundary", "h_mise_star", "mise_star", "mise_star_se",
            "mise_star_boundary", "h_opt_theory", "mise_theory",
        ],
    );
    let mut slopes = Table::new("rate_slopes", &["alpha", "estimator", "slope", "slope_se", "expected", "theory_slope"]);
    let mut summary = vec![format!(
        "rate study: n in {:?}, replicates={}, truth={}, errors={:?}, alpha_x={alpha_x}",
        rates.n_ladder,
        cfg.replicates,
        cfg.truth.name(),
        cfg.errors.family
    )];
    for (a_idx, &alpha) in rates.alphas.iter().enumerate() {
        let d = (1.0 - alpha) / 2.0;
        // Separate design/error streams per alpha keep each slope fit independent of the others.
        let sub = ExperimentConfig { seed: split_seed(cfg.seed, &[a_idx as u64]), ..cfg.clone() };
        let per_rep = par_replicates(&sub, |r| {
            let x = design(&sub, r, n_max)?;
            let y = responses(&sub, &x, &errors(&sub, d, r, n_max)?);
            let mut out = Vec::with_capacity(rates.n_ladder.len());
            for &n in &rates.n_ladder {
                let ybar = mean(&y[..n]);
                let sm = Smoother::new(&x[..n], &y[..n]);
                out.push(h_grid.iter().map(|&h| risk.ise(&sm, ybar, &kernel, h)).collect::<Vec<_>>());
            }
            Ok(out)
        })?;

        let theory = theory_constants(cfg, d, alpha, alpha_x, n_max);
        let mut best = Vec::new();
        let mut best_star = Vec::new();
        let mut best_theory = Vec::new();
        for (k, &n) in rates.n_ladder.iter().enumerate() {
            let curve = |pick: fn(&(f64, f64, usize)) -> f64| -> (Vec<f64>, Vec<Vec<f64>>) {
                let per_h: Vec<Vec<f64>> =
                    (0..h_grid.len()).map(|j| per_rep.iter().map(|rep| pick(&rep[k][j])).collect()).collect();
                (per_h.iter().map(|v| mean(v)).collect(), per_h)
            };
            let (mise, raw) = curve(|t| t.0);
            let (star, raw_star) = curve(|t| t.1);
            let g = minimize_over_grid(&mise, &h_grid)?;
            let gs = minimize_over_grid(&star, &h_grid)?;
            let (h_th, m_th) = match &theory {
                Some(c) => match h_opt_theory(n, alpha, c, &kernel) {
                    Ok(o) => (o.h, mise_theory(o.h, n, alpha, c, &kernel)),
                    Err(_) => (f64::NAN, f64::NAN),
                },
                None => (f64::NAN, f64::NAN),
            };
            best.push(mise[g.index]);
            best_star.push(star[gs.index]);
            best_theory.push(m_th);
            table.push(vec![
                alpha.into(),
                n.into(),
                g.h.into(),
                mise[g.index].into(),
                std_error(&raw[g.index]).into(),
                Cell::text(g.at_boundary.to_string()),
                gs.h.into(),
                star[gs.index].into(),
                std_error(&raw_star[gs.index]).into(),
                Cell::text(gs.at_boundary.to_string()),
                h_th.into(),
                m_th.into(),
            ]);
        }
        let ns: Vec<f64> = rates.n_ladder.iter().map(|&n| n as f64).collect();
        let theory_slope = log_log_fit(&ns, &best_theory).map_or(f64::NAN, |f| f.slope);
        for (name, values, expected, th) in [
            ("m", &best, expected_rate(alpha), theory_slope),
            ("shape", &best_star, expected_rate(alpha_x), f64::NAN),
        ] {
            let fit = log_log_fit(&ns, values)
                .ok_or_else(|| HarnessError::Run(lrd_regression::Error::Data("cannot fit a rate slope".into())))?;
            slopes.push(vec![
                alpha.into(),
                name.into(),
                fit.slope.into(),
                fit.slope_se.into(),
                expected.into(),
                th.into(),
            ]);
            summary.push(format!(
                "alpha={alpha} {name}: slope {:.3} (se {:.3}), expected {expected:.3}",
                fit.slope, fit.slope_se
            ));
        }
    }
    Ok(report(cfg, "rates", vec![table, slopes], summary))
}

/// Asymptotic-risk constants for linear error families; `None` otherwise.
fn theory_constants(cfg: &ExperimentConfig, d: f64, alpha: f64, alpha_x: f64, n: usize) -> Option<TheoryConstants> {
    if !cfg.errors.is_linear() {
        return None;
    }
    let errs = cfg.errors.process(d, 0)?.coefficients::<f64>(n).ok()?;
    let preds = cfg.predictors.spec(0).coefficients::<f64>().ok()?;
    Some(TheoryConstants::compute(
        cfg.truth,
        DESIGN_DENSITY,
        DESIGN_DENSITY.central_range(EVAL_MASS),
        &errs,
        alpha,
        &preds,
        alpha_x,
        n,
    ))
}

/// Exact rational approximation of a configured exponent.
fn exact(x: f64) -> ExactExponent {
    ExactExponent::approximate_float(x).unwrap_or_else(|| ExactExponent::from_integer(0))
}

/// Analytic bandwidth verdicts plus Monte Carlo checks of (A) and the
/// variance order, compared against exact oracles for linear families.
pub fn run_conditions(cfg: &ExperimentConfig) -> Run<ExperimentReport> {
    cfg.validate()?;
    let cc: ConditionsConfig = cfg.conditions.clone().unwrap_or_default();
    let ladder = dyadic_ladder(cc.ladder_lo, cc.ladder_hi);
    let alpha_x = exact(cc.alpha_x);

    let mut analytic = Table::new("conditions_analytic", &["alpha", "beta", "condition", "exponent", "verdict"]);
    for &a in &cc.alphas {
        for &b in &cc.betas {
            let rule = BandwidthRule::new(1.0, exact(b));
            for v in check_bandwidth_conditions(exact(a), alpha_x, &rule, &ladder) {
                analytic.push(vec![
                    a.into(),
                    b.into(),
                    Cell::text(v.id.to_string()),
                    Cell::text(v.exponent.to_string()),
                    Cell::text(v.verdict.to_string()),
                ]);
            }
        }
    }

    let mut mc = Table::new(
        "conditions_mc",
        &[
            "family", "alpha", "beta", "condition", "n", "statistic", "exponent", "verdict", "oracle_exponent",
            "oracle_verdict", "agree",
        ],
    );
    let mut summary = vec![format!(
        "conditions: ladder {:?}, replicates={}, slope tolerance {SLOPE_TOLERANCE}",
        ladder, cfg.replicates
    )];
    let (mut agree, mut compared) = (0usize, 0usize);
    for (f_idx, &family) in cc.families.iter().enumerate() {
        let errs = crate::config::ErrorsConfig { family, ..cfg.errors.clone() };
        let linear = errs.is_linear();
        for (a_idx, &a) in cc.alphas.iter().enumerate() {
            let seed = split_seed(cfg.seed, &[f_idx as u64, a_idx as u64]);
            let Some(spec) = errs.process((1.0 - a) / 2.0, seed) else { continue };
            let sums = MartingaleSums::simulate(&spec, &ladder, cfg.replicates, seed)?;
            let mut checks: Vec<(f64, ConditionVerdict<f64>, Option<(f64, Verdict)>)> = Vec::new();
            for &b in &cc.mc_betas {
                let v = sums.negligibility_a(&BandwidthRule::new(1.0, b))?;
                // Judged at the Monte Carlo tolerance so both verdicts use the same rule.
                let oracle = linear.then(|| {
                    let e = linear_negligibility_exponent(&BandwidthRule::new(1.0, exact(b)));
                    (to_f64(e), verdict_from_exponent(e, exact(SLOPE_TOLERANCE)))
                });
                checks.push((b, v, oracle));
            }
            checks.push((f64::NAN, sums.var_linear_growth()?, linear.then_some((1.0, Verdict::Bounded))));
            for (b, v, oracle) in checks {
                let ok = oracle.map(|(_, ov)| ov == v.verdict);
                if let Some(ok) = ok {
                    compared += 1;
                    agree += usize::from(ok);
                }
                for (n, stat) in v.n_values.iter().zip(&v.statistic) {
                    mc.push(vec![
                        family_name(family).into(),
                        a.into(),
                        if b.is_nan() { Cell::text("") } else { b.into() },
                        Cell::text(v.id.to_string()),
                        (*n).into(),
                        (*stat).into(),
                        v.exponent.into(),
                        Cell::text(v.verdict.to_string()),
                        oracle.map_or(Cell::text(""), |(e, _)| e.into()),
                        oracle.map_or(Cell::text(""), |(_, ov)| Cell::text(ov.to_string())),
                        ok.map_or(Cell::text(""), |o| Cell::text(o.to_string())),
                    ]);
                }
                if v.id == ConditionId::VarOn || !b.is_nan() {
                    summary.push(format!(
                        "{} alpha={a} {}{}: slope {:.3} -> {}{}",
                        family_name(family),
                        v.id,
                        if b.is_nan() { String::new() } else { format!(" beta={b}") },
                        v.exponent,
                        v.verdict,
                        oracle.map_or(String::new(), |(e, ov)| format!(" (oracle {e:.3} -> {ov})"))
                    ));
                }
            }
        }
    }
    summary.push(format!("Monte Carlo verdicts agreeing with exact oracles: {agree}/{compared}"));
    Ok(report(cfg, "conditions", vec![analytic, mc], summary))
}

fn to_f64(e: ExactExponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

fn family_name(f: ErrorFamily) -> &'static str {
    match f {
        ErrorFamily::Farima => "farima",
        ErrorFamily::LinearLrd => "linear-lrd",
        ErrorFamily::FunctionalSquare => "functional-square",
        ErrorFamily::FarimaGarch => "farima-garch",
        ErrorFamily::StochasticVolatility => "stochastic-volatility",
        ErrorFamily::Larch => "larch",
        ErrorFamily::Zero => "zero",
    }
}

/// Writes the simulated samples of every replicate and `d`, plus per-`d`
/// error moments.
pub fn run_simulate(cfg: &ExperimentConfig) -> Run<ExperimentReport> {
    cfg.validate()?;
    let n = cfg.n;
    let per_rep = par_replicates(cfg, |r| {
        let x = design(cfg, r, n)?;
        let mut out = Vec::with_capacity(cfg.d_ladder.len());
        for &d in &cfg.d_ladder {
            let eps = errors(cfg, d, r, n)?;
            out.push(eps);
        }
        Ok((x, out))
    })?;
    let mut sample = Table::new("sample", &["d", "replicate", "i", "x", "y", "eps"]);
    let mut moments = Table::new("moments", &["d", "mean_eps", "var_eps", "marginal_variance"]);
    for (k, &d) in cfg.d_ladder.iter().enumerate() {
        let mut all = Vec::with_capacity(n * cfg.replicates);
        for (r, (x, eps)) in per_rep.iter().enumerate() {
            let y = responses(cfg, x, &eps[k]);
            for i in 0..n {
                sample.push(vec![d.into(), r.into(), i.into(), x[i].into(), y[i].into(), eps[k][i].into()]);
            }
            all.extend_from_slice(&eps[k]);
        }
        let m = mean(&all);
        let var = all.iter().map(|e| (e - m).powi(2)).sum::<f64>() / all.len() as f64;
        let marginal = match cfg.errors.process(d, 0) {
            Some(spec) if cfg.errors.is_linear() => spec.coefficients::<f64>(n)?.square_sum(),
            Some(_) => f64::NAN,
            None => 0.0,
        };
        moments.push(vec![d.into(), m.into(), var.into(), marginal.into()]);
    }
    let summary = vec![format!(
        "simulate: n={} replicates={} errors={:?} d in {:?}",
        n, cfg.replicates, cfg.errors.family, cfg.d_ladder
    )];
    Ok(report(cfg, "simulate", vec![sample, moments], summary))
}
