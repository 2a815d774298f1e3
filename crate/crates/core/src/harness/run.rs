//! Experiment runners. Each produces report rows in sweep order plus a list
//! of asserted checks; a failing row carries an `error` cell and is skipped
//! by the checks.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::bodies::json::short_label;
use crate::bodies::ConvexBody;
use crate::borell::{
    borell_from_profile, c0_upper_bound_check, cq_estimate, paley_zygmund_from_profile, shell_bound_check,
    union_bound_check, verify_discrete_bm, verify_meanwidth_discrete, C0Profile, InequalityReport, MeanWidthMode,
    MeanWidthParams,
};
use crate::error::{Error, Result};
use crate::lattice::{enumerate, moment};
use crate::sampling::{
    centroid_support, centroid_support_closed_form, floating_body_support, mean_width_centroid,
    random_polytope_mean_width, CentroidMethod, RngStream,
};
use crate::scalar::Scalar;

use super::config::{Experiment, ExperimentConfig, MeanWidthKind};
use super::corpus::random_bm_triple;
use super::report::{render, Cell, ReportFormat, Row};

/// Stream id for harness-level sampling; row `i` uses substream `i`.
pub const HARNESS_STREAM: u64 = 0x6862;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }

    /// A check that every listed row passed.
    fn all(name: impl Into<String>, passes: &[bool]) -> Self {
        let failed = passes.iter().filter(|&&p| !p).count();
        Check::new(name, failed == 0, format!("{failed} of {} rows failed", passes.len()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        render(&self.rows, format)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn check_summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }

    fn ok_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.is_error())
    }

    fn ok_rows_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Row> {
        self.ok_rows().filter(move |r| r.get("kind") == Some(&Cell::Text(kind.to_string())))
    }
}

fn flag(row: &Row, key: &str) -> bool {
    row.get(key) == Some(&Cell::Bool(true))
}

fn value_cell(v: &Value) -> Cell {
    match v {
        Value::Null => Cell::Null,
        Value::Bool(b) => Cell::Bool(*b),
        Value::Number(n) => match n.as_i64() {
            Some(i) if !n.is_f64() => Cell::Int(i),
            _ => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => Cell::Text(s.clone()),
        other => Cell::Text(other.to_string()),
    }
}

/// Appends an inequality report's sides, verdict and context.
fn with_report(mut row: Row, r: &InequalityReport) -> Row {
    row = row
        .text("check", &r.name)
        .float("lhs", r.lhs)
        .float("rhs", r.rhs)
        .float("implied_constant", r.implied_constant)
        .flag("pass", r.pass)
        .flag("exact", r.exact);
    for (k, v) in &r.context {
        if row.get(k).is_none() {
            row.push(k, value_cell(v));
        }
    }
    row
}

fn guarded(base: Row, f: impl FnOnce(Row) -> Result<Row>) -> Row {
    match f(base.clone()) {
        Ok(row) => row,
        Err(e) => base.error(e),
    }
}

fn number_rows(rows: Vec<Row>) -> Vec<Row> {
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out = Row::new().int("row", i as i64);
            for (k, c) in row.cells() {
                out.push(k, c.clone());
            }
            out
        })
        .collect()
}

fn key(prefix: &str, v: f64) -> String {
    format!("{prefix}{v}")
}

fn dilate(body: &ConvexBody, lambda: &Scalar) -> Result<ConvexBody> {
    ConvexBody::scaled(lambda.clone(), body.clone())
}

fn lambdas_or_one(cfg: &ExperimentConfig) -> Result<Vec<Scalar>> {
    let l = cfg.lambdas()?;
    Ok(if l.is_empty() { vec![Scalar::from_int(1)] } else { l })
}

fn or_default(v: &[f64], default: &[f64]) -> Vec<f64> {
    if v.is_empty() { default.to_vec() } else { v.to_vec() }
}

fn rows_evaluated(report: &Report) -> Check {
    let ok = report.ok_rows().count();
    Check::new("rows-evaluated", ok > 0, format!("{ok} of {} rows evaluated", report.rows.len()))
}

/// Runs the experiment named in `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Enumerate => run_enumerate(cfg),
        Experiment::Borell => run_borell(cfg),
        Experiment::Cq => run_cq(cfg),
        Experiment::BrunnMinkowski => run_brunn_minkowski(cfg),
        Experiment::Meanwidth => run_meanwidth_sweep(cfg),
        Experiment::Convergence => run_convergence(cfg),
        Experiment::Counterexample => run_counterexample(cfg),
        Experiment::ShellBound => run_shell_bound(cfg),
    }
}

fn finish(experiment: Experiment, rows: Vec<Row>, checks: impl FnOnce(&Report) -> Vec<Check>) -> Report {
    let mut report = Report { experiment, rows: number_rows(rows), checks: Vec::new() };
    let mut all = vec![rows_evaluated(&report)];
    all.extend(checks(&report));
    report.checks = all;
    report
}

pub fn run_enumerate(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let ps = cfg.sweeps.p.clone();
    let rows: Vec<Row> = lambdas_or_one(cfg)?
        .par_iter()
        .map(|lambda| {
            guarded(Row::new().float("lambda", lambda.value()), |row| {
                let set = enumerate(&dilate(&body, lambda)?)?;
                let mut row = row
                    .int("count", set.count() as i64)
                    .int("ambiguous_count", set.ambiguous_count() as i64)
                    .text("body_fingerprint", set.body_fingerprint());
                if set.count() > 0 {
                    let dist = set.distribution()?;
                    row = row.int("max_projection", dist.max_value() as i64);
                    for &p in &ps {
                        row = row.float(&key("moment_p", p), moment(&dist, p)?.root);
                    }
                }
                Ok(row)
            })
        })
        .collect();
    Ok(finish(Experiment::Enumerate, rows, |_| Vec::new()))
}

pub fn run_borell(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let ps = or_default(&cfg.sweeps.p, &[1.0]);
    let qs = or_default(&cfg.sweeps.q, &[2.0]);
    let c_ref = cfg.tolerances.borell;
    let blocks: Vec<Vec<Row>> = lambdas_or_one(cfg)?
        .par_iter()
        .map(|lambda| {
            let base = Row::new().float("lambda", lambda.value());
            let profile = match dilate(&body, lambda).and_then(|b| C0Profile::of(&b)) {
                Ok(p) => p,
                Err(e) => return vec![base.error(e)],
            };
            let mut rows = Vec::new();
            for &p in &ps {
                for &q in qs.iter().filter(|&&q| q >= p) {
                    let row = base.clone().text("kind", "borell").float("p", p).float("q", q);
                    rows.push(guarded(row, |row| {
                        let v = borell_from_profile(&profile, p, q, c_ref)?;
                        Ok(with_report(row, &v.upper)
                            .flag("holder_pass", v.holder.pass)
                            .flag("holder_exact", v.holder.exact)
                            .float("m_p", v.holder.lhs))
                    }));
                }
                let row = base.clone().text("kind", "paley-zygmund").float("p", p);
                rows.push(guarded(row, |row| Ok(with_report(row, &paley_zygmund_from_profile(&profile, p, c_ref)?))));
                for &a in &cfg.sweeps.a {
                    for &q in &qs {
                        for &n in &cfg.sweeps.n {
                            let row = base.clone().text("kind", "union-bound").float("p", p);
                            rows.push(guarded(row, |row| {
                                Ok(with_report(row, &union_bound_check(profile.inner(), a, q, n)?))
                            }));
                        }
                    }
                }
            }
            rows
        })
        .collect();
    Ok(finish(Experiment::Borell, blocks.concat(), |r| {
        let borell: Vec<&Row> = r.ok_rows_of("borell").collect();
        let worst = borell.iter().filter_map(|row| row.get_f64("implied_constant")).fold(0.0, f64::max);
        vec![
            Check::all("holder", &borell.iter().map(|row| flag(row, "holder_pass")).collect::<Vec<_>>()),
            Check::new(
                "borell-upper",
                borell.iter().all(|row| flag(row, "pass")),
                format!("largest implied constant {worst} against {c_ref}"),
            ),
            Check::all("paley-zygmund", &r.ok_rows_of("paley-zygmund").map(|row| flag(row, "pass")).collect::<Vec<_>>()),
            Check::all("union-bound", &r.ok_rows_of("union-bound").map(|row| flag(row, "pass")).collect::<Vec<_>>()),
        ]
    }))
}

pub fn run_cq(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let qs = or_default(&cfg.sweeps.q, &[2.0]);
    let cases: Vec<(Scalar, f64)> =
        lambdas_or_one(cfg)?.into_iter().flat_map(|l| qs.iter().map(move |&q| (l.clone(), q))).collect();
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|(lambda, q)| {
            guarded(Row::new().float("lambda", lambda.value()).float("q", *q), |row| {
                let est = cq_estimate(&dilate(&body, lambda)?, *q, cfg.budgets.rotations, cfg.budgets.p_grid, cfg.seed)?;
                Ok(row
                    .float("c0", est.c0)
                    .float("cq_estimate", est.cq_estimate)
                    .text("cq_note", "estimate (lower bound)")
                    .int("argmax_rotation", est.argmax.rotation_index as i64)
                    .float("argmax_p", est.argmax.p)
                    .int("rotations", est.rotation_budget as i64)
                    .int("seed", est.seed as i64))
            })
        })
        .collect();
    Ok(finish(Experiment::Cq, rows, |r| {
        let dominated: Vec<bool> = r
            .ok_rows()
            .map(|row| row.get_f64("cq_estimate").unwrap_or(f64::NAN) >= row.get_f64("c0").unwrap_or(f64::NAN))
            .collect();
        vec![Check::all("cq-dominates-identity", &dominated)]
    }))
}

pub fn run_brunn_minkowski(cfg: &ExperimentConfig) -> Result<Report> {
    let mut cases: Vec<(String, ConvexBody, ConvexBody, Scalar)> = Vec::new();
    if let (Some(k), Some(l)) = (cfg.body.as_ref().map(|_| cfg.body()).transpose()?, cfg.other_body()?) {
        for lambda in cfg.lambdas()? {
            cases.push(("pair".into(), k.clone(), l.clone(), lambda));
        }
    }
    let stream = RngStream::new(cfg.seed, HARNESS_STREAM);
    for i in 0..cfg.budgets.random_triples.unwrap_or(0) {
        let (k, l, lambda) = random_bm_triple(&mut stream.substream(i as u64).rng());
        cases.push(("random".into(), k, l, lambda));
    }
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|(kind, k, l, lambda)| {
            let base = Row::new()
                .text("kind", kind)
                .float("lambda", lambda.value())
                .text("lambda_exact", lambda.to_literal())
                .text("k", short_label(k))
                .text("l", short_label(l));
            guarded(base, |row| Ok(with_report(row, &verify_discrete_bm(k, l, lambda)?)))
        })
        .collect();
    Ok(finish(Experiment::BrunnMinkowski, rows, |r| {
        vec![Check::all("brunn-minkowski", &r.ok_rows().map(|row| flag(row, "pass")).collect::<Vec<_>>())]
    }))
}

fn coordinate_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    dirs
}

pub fn run_meanwidth_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let b = &cfg.budgets;
    let t = &cfg.tolerances;
    let stream = RngStream::new(cfg.seed, HARNESS_STREAM);
    match cfg.mode {
        MeanWidthKind::Sandwich => {
            let ns: Vec<(usize, u64)> = cfg.sweeps.n.iter().copied().enumerate().collect();
            let rows: Vec<Row> = ns
                .par_iter()
                .map(|&(i, n)| {
                    guarded(Row::new().int("n_samples", n as i64), |row| {
                        let sub = stream.substream(i as u64);
                        let order = (n as f64).ln();
                        let n_points = usize::try_from(n).map_err(|_| Error::ZeroBudget)?;
                        let ew =
                            random_polytope_mean_width(&body, n_points, b.replicates, b.direction_samples, &sub.substream(0))?;
                        let wz = mean_width_centroid(&body, order, b.direction_samples, b.point_samples, &sub.substream(1))?;
                        Ok(row
                            .float("moment_order", order)
                            .float("polytope_width", ew.value)
                            .float("polytope_width_stderr", ew.stderr)
                            .float("centroid_width", wz.value)
                            .float("centroid_width_stderr", wz.stderr)
                            .float("ratio", ew.value / wz.value))
                    })
                })
                .collect();
            Ok(finish(Experiment::Meanwidth, rows, |r| {
                let ok: Vec<&Row> = r.ok_rows().collect();
                let ratios: Vec<f64> = ok.iter().filter_map(|row| row.get_f64("ratio")).collect();
                let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().copied().fold(0.0, f64::max);
                let mut by_n: Vec<(f64, f64, f64)> = ok
                    .iter()
                    .map(|row| {
                        (
                            row.get_f64("n_samples").unwrap_or(0.0),
                            row.get_f64("polytope_width").unwrap_or(f64::NAN),
                            row.get_f64("polytope_width_stderr").unwrap_or(f64::NAN),
                        )
                    })
                    .collect();
                by_n.sort_by(|a, b| a.0.total_cmp(&b.0));
                let monotone = by_n.windows(2).all(|w| w[1].1 >= w[0].1 - 3.0 * w[0].2.hypot(w[1].2));
                vec![
                    Check::new(
                        "ratio-band",
                        ratios.iter().all(|&x| x >= t.band_low && x <= t.band_high),
                        format!("ratios in [{lo}, {hi}], band [{}, {}]", t.band_low, t.band_high),
                    ),
                    Check::new(
                        "ratio-log-range",
                        ratios.is_empty() || (hi / lo).ln() <= 10f64.ln(),
                        format!("log-range {}", if ratios.is_empty() { 0.0 } else { (hi / lo).ln() }),
                    ),
                    Check::new("width-monotone", monotone, "E w(K_N) nondecreasing in N within 3 stderr"),
                ]
            }))
        }
        MeanWidthKind::Floating => {
            let dirs = coordinate_directions(body.dim());
            let cases: Vec<(f64, usize)> =
                cfg.sweeps.delta.iter().flat_map(|&d| (0..dirs.len()).map(move |j| (d, j))).collect();
            let rows: Vec<Row> = cases
                .par_iter()
                .enumerate()
                .map(|(i, &(delta, j))| {
                    guarded(Row::new().float("delta", delta).int("direction", j as i64), |row| {
                        let sub = stream.substream(i as u64);
                        let p = (1.0 / delta).ln();
                        let theta = &dirs[j];
                        let floating = floating_body_support(&body, delta, theta, b.point_samples, &sub.substream(0))?;
                        let method = CentroidMethod::MonteCarlo { samples: b.point_samples, stream: sub.substream(1) };
                        let centroid = centroid_support(&body, p, theta, &method)?;
                        Ok(row
                            .float("p", p)
                            .float("floating_support", floating)
                            .float("centroid_support", centroid)
                            .float("ratio", floating / centroid))
                    })
                })
                .collect();
            Ok(finish(Experiment::Meanwidth, rows, |r| {
                let in_band: Vec<bool> = r
                    .ok_rows()
                    .map(|row| row.get_f64("ratio").is_some_and(|x| x >= t.band_low && x <= t.band_high))
                    .collect();
                vec![Check::all("floating-band", &in_band)]
            }))
        }
        MeanWidthKind::DiscreteUpper => {
            let rows: Vec<Row> = cfg
                .sweeps
                .n
                .iter()
                .map(|&n| {
                    guarded(Row::new().int("n_samples", n as i64), |row| {
                        let mut params = MeanWidthParams::new(n, MeanWidthMode::Upper, b.rotations, cfg.seed);
                        params.constants = t.constants();
                        Ok(with_report(row, &verify_meanwidth_discrete(&body, &params)?))
                    })
                })
                .collect();
            Ok(finish(Experiment::Meanwidth, rows, |r| {
                vec![Check::all("meanwidth-upper", &r.ok_rows().map(|row| flag(row, "pass")).collect::<Vec<_>>())]
            }))
        }
        MeanWidthKind::DiscreteLower => {
            let mut cases: Vec<(f64, Option<u64>)> = Vec::new();
            for &q in &cfg.sweeps.q {
                if cfg.sweeps.n.is_empty() {
                    cases.push((q, None));
                } else {
                    cases.extend(cfg.sweeps.n.iter().map(|&n| (q, Some(n))));
                }
            }
            let rows: Vec<Row> = cases
                .iter()
                .map(|&(q, n)| {
                    guarded(Row::new().float("q", q), |row| {
                        let n = match n {
                            Some(n) => n,
                            None => {
                                let cq = cq_estimate(&body, q, b.rotations, b.p_grid, cfg.seed)?;
                                crate::borell::smallest_admissible_n(cq.cq_estimate, t.lower_scale)
                            }
                        };
                        let mut params = MeanWidthParams::new(n, MeanWidthMode::Lower, b.rotations, cfg.seed);
                        params.q = q;
                        params.cq_rotations = b.rotations;
                        params.cq_grid = b.p_grid;
                        params.constants = t.constants();
                        Ok(with_report(row.int("n_samples", n as i64), &verify_meanwidth_discrete(&body, &params)?))
                    })
                })
                .collect();
            Ok(finish(Experiment::Meanwidth, rows, |r| {
                vec![Check::all("meanwidth-lower", &r.ok_rows().map(|row| flag(row, "pass")).collect::<Vec<_>>())]
            }))
        }
    }
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let n = body.dim();
    let ps = or_default(&cfg.sweeps.p, &[1.0]);
    let volume = body.volume().ok();
    let inradius = body.radii().map(|r| r.inner).unwrap_or(0.0);
    let stream = RngStream::new(cfg.seed, HARNESS_STREAM);
    let mut e_n = vec![0.0; n];
    e_n[n - 1] = 1.0;
    let continuous: Vec<Option<f64>> = ps
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            centroid_support_closed_form(&body, p).or_else(|| {
                let method =
                    CentroidMethod::MonteCarlo { samples: cfg.budgets.point_samples, stream: stream.substream(j as u64) };
                centroid_support(&body, p, &e_n, &method).ok()
            })
        })
        .collect();
    let rows: Vec<Row> = cfg
        .lambdas()?
        .par_iter()
        .map(|lambda| {
            let l = lambda.value();
            guarded(Row::new().float("lambda", l), |mut row| {
                if !cfg.sweeps.q.is_empty() && inradius * l < 1.0 {
                    return Err(Error::PreconditionViolated(format!("r(K)·λ = {} < 1", inradius * l)));
                }
                let scaled = dilate(&body, lambda)?;
                let profile = C0Profile::of(&scaled)?;
                let count = profile.inner().total();
                let normalized = count as f64 / l.powi(n as i32);
                row = row.int("count", count as i64).float("count_over_volume_scale", normalized);
                row = match volume {
                    Some(v) => row.float("volume", v).float("volume_rel_gap", (normalized - v).abs() / v),
                    None => row.null("volume").null("volume_rel_gap"),
                };
                for (&p, cont) in ps.iter().zip(&continuous) {
                    let c0 = profile.value(p)?;
                    let m = moment(profile.inner(), p)?.root / l;
                    row = row.float(&key("c0_p", p), c0).float(&key("gap_p", p), (c0 - 1.0).abs());
                    row = row.float(&key("scaled_moment_p", p), m);
                    row = match cont {
                        Some(c) => row.float(&key("continuous_p", p), *c).float(&key("moment_rel_err_p", p), (m - c).abs() / c),
                        None => row.null(&key("continuous_p", p)).null(&key("moment_rel_err_p", p)),
                    };
                }
                for &q in &cfg.sweeps.q {
                    let est = cq_estimate(&scaled, q, cfg.budgets.rotations, cfg.budgets.p_grid, cfg.seed)?;
                    row = row.float(&key("cq_q", q), est.cq_estimate);
                }
                Ok(row.int("ambiguous_count", profile.ambiguous_count() as i64))
            })
        })
        .collect();
    let gap_limit = cfg.tolerances.convergence_gap;
    Ok(finish(Experiment::Convergence, rows, |r| {
        let mut checks = Vec::new();
        for &p in &ps {
            let gaps: Vec<f64> = r.ok_rows().filter_map(|row| row.get_f64(&key("gap_p", p))).collect();
            let (Some(first), Some(last)) = (gaps.first(), gaps.last()) else { continue };
            checks.push(Check::new(
                key("final-gap-p", p),
                *last <= gap_limit,
                format!("first gap {first}, last gap {last}, limit {gap_limit}"),
            ));
            checks.push(Check::new(
                key("gap-monotone-p", p),
                gaps.windows(2).all(|w| w[1] <= w[0]),
                format!("gaps {gaps:?}"),
            ));
        }
        checks
    }))
}

pub fn run_counterexample(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.dimension.unwrap_or(2);
    let ps = or_default(&cfg.sweeps.p, &[1.0]);
    let qs = or_default(&cfg.sweeps.q, &[2.0]);
    let c_ref = cfg.tolerances.borell;
    let pairs: Vec<(f64, f64)> =
        ps.iter().flat_map(|&p| qs.iter().filter(move |&&q| q >= p).map(move |&q| (p, q))).collect();
    let blocks: Vec<Vec<Row>> = cfg
        .lambdas()?
        .par_iter()
        .map(|lambda| {
            let base = Row::new().float("lambda", lambda.value());
            let profile = match ConvexBody::counterexample(lambda.clone(), n).and_then(|b| C0Profile::of(&b)) {
                Ok(p) => p,
                Err(e) => return vec![base.error(e)],
            };
            pairs
                .iter()
                .map(|&(p, q)| {
                    guarded(base.clone().float("p", p).float("q", q), |row| {
                        let v = borell_from_profile(&profile, p, q, c_ref)?;
                        let (mp, mq) = (v.holder.lhs, v.holder.rhs);
                        Ok(row
                            .int("count", profile.inner().total() as i64)
                            .float("m_p", mp)
                            .float("m_q", mq)
                            .float("raw_ratio", mq / mp)
                            .float("c0", profile.value(p)?)
                            .float("normalized_ratio", v.upper.implied_constant)
                            .flag("pass", v.upper.pass))
                    })
                })
                .collect()
        })
        .collect();
    Ok(finish(Experiment::Counterexample, blocks.concat(), |r| {
        let mut checks = Vec::new();
        for &(p, q) in &pairs {
            let rows: Vec<&Row> = r
                .ok_rows()
                .filter(|row| row.get_f64("p") == Some(p) && row.get_f64("q") == Some(q))
                .collect();
            let raw: Vec<f64> = rows.iter().filter_map(|row| row.get_f64("raw_ratio")).collect();
            let norm: Vec<f64> = rows.iter().filter_map(|row| row.get_f64("normalized_ratio")).collect();
            let growth = match (raw.first(), raw.last()) {
                (Some(a), Some(b)) => b / a,
                _ => f64::NAN,
            };
            checks.push(Check::new(
                format!("raw-ratio-increasing-p{p}-q{q}"),
                raw.windows(2).all(|w| w[1] > w[0]),
                format!("last/first raw ratio {growth}"),
            ));
            let worst = norm.iter().copied().fold(0.0, f64::max);
            checks.push(Check::new(
                format!("normalized-ratio-bounded-p{p}-q{q}"),
                norm.iter().all(|&x| x <= c_ref),
                format!("largest normalized ratio {worst} against {c_ref}"),
            ));
        }
        checks
    }))
}

pub fn run_shell_bound(cfg: &ExperimentConfig) -> Result<Report> {
    let body = cfg.body()?;
    let ps = or_default(&cfg.sweeps.p, &[1.0]);
    let blocks: Vec<Vec<Row>> = lambdas_or_one(cfg)?
        .par_iter()
        .map(|lambda| {
            let base = Row::new().float("lambda", lambda.value());
            let scaled = match dilate(&body, lambda) {
                Ok(b) => b,
                Err(e) => return vec![base.error(e)],
            };
            let mut rows = Vec::new();
            for &t in &cfg.sweeps.t {
                let row = base.clone().text("kind", "shell-count").float("t", t);
                rows.push(guarded(row, |row| Ok(with_report(row, &shell_bound_check(&scaled, t)?))));
            }
            for &p in &ps {
                let row = base.clone().text("kind", "c0-upper-bound").float("p", p);
                rows.push(guarded(row, |row| Ok(with_report(row, &c0_upper_bound_check(&scaled, p)?))));
            }
            rows
        })
        .collect();
    Ok(finish(Experiment::ShellBound, blocks.concat(), |r| {
        vec![
            Check::all("shell-count", &r.ok_rows_of("shell-count").map(|row| flag(row, "pass")).collect::<Vec<_>>()),
            Check::all("c0-upper-bound", &r.ok_rows_of("c0-upper-bound").map(|row| flag(row, "pass")).collect::<Vec<_>>()),
        ]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn box_convergence_counts() {
        let r = run_experiment(&cfg(
            r#"{"experiment": "convergence", "body": {"variant": "box", "n": 2, "halfwidths": [1, 1]},
                "sweeps": {"lambda": [10, 50, 100], "p": [2]}}"#,
        ))
        .unwrap();
        let last = r.rows.last().unwrap();
        assert_eq!(last.get_f64("count_over_volume_scale"), Some(4.0401));
        assert!(last.get_f64("volume_rel_gap").unwrap() <= 0.05);
        assert!(last.get_f64("moment_rel_err_p2").unwrap() < 0.01);
    }

    #[test]
    fn counterexample_rows() {
        let r = run_experiment(&cfg(r#"{"experiment": "counterexample", "sweeps": {"lambda": [4, 16, 64]}}"#)).unwrap();
        assert!(r.pass(), "{}", r.check_summary());
        let raw: Vec<f64> = r.rows.iter().map(|row| row.get_f64("raw_ratio").unwrap()).collect();
        assert!(raw[2] >= 2.0 * raw[0]);
    }

    #[test]
    fn failed_rows_do_not_abort() {
        // λ = 1/2 leaves Ball(1) without a unit ball inside, so the C_q column fails.
        let r = run_experiment(&cfg(
            r#"{"experiment": "convergence", "body": {"variant": "ball", "n": 2, "radius": 1},
                "sweeps": {"lambda": ["1/2", 4, 8], "q": [1]}, "budgets": {"rotations": 2}}"#,
        ))
        .unwrap();
        assert!(r.rows[0].is_error());
        assert!(!r.rows[1].is_error() && !r.rows[2].is_error());
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(
            r#"{"experiment": "meanwidth", "body": {"variant": "ball", "n": 2, "radius": 1},
                "sweeps": {"n": [8, 32]}, "budgets": {"point_samples": 500, "direction_samples": 50, "replicates": 3},
                "seed": 11}"#,
        );
        let a = run_experiment(&c).unwrap().render(ReportFormat::Csv).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_experiment(&c).unwrap().render(ReportFormat::Csv).unwrap());
        assert_eq!(a, b);
    }
}
