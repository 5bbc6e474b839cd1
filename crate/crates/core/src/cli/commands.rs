//! The five commands. Each returns an [`Outcome`]; nothing here touches the
//! filesystem except reading data tables named in the config.

use std::fs::File;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::convergence::{ConvergenceError, ConvergenceReport};
use crate::exterior::{self, PointJet, PolynomialProfile, Profile};
use crate::flow::cone::{self, cone_phi, ClosedFormTables};
use crate::flow::io::{read_flow_table, write_solution, InitialTable, SolutionRow};
use crate::flow::characteristic::integrate_characteristic;
use crate::flow::{CharacteristicState, FlowData, FlowSolution};
use crate::g2::{metric_from_form, torsion_residuals};

use super::config::{Command, ConfigError, DataSource, Format, ProfileSpec, ScenarioConfig};
use super::ExitStatus;

const SQRT12: f64 = 3.464_101_615_137_754_6;

/// Result of a command: exit status, main output, metadata and diagnostics.
#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub body: String,
    pub meta: Map<String, Value>,
    pub messages: Vec<String>,
}

impl Outcome {
    fn new(cfg: &ScenarioConfig, command: Command) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), json!(command.name()));
        let config: Map<String, Value> = cfg
            .resolved(command)
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::String(v)))
            .collect();
        meta.insert("config".into(), Value::Object(config));
        Outcome { status: ExitStatus::Pass, body: String::new(), meta, messages: Vec::new() }
    }

    fn fail(&mut self, status: ExitStatus, message: impl Into<String>) {
        if self.status == ExitStatus::Pass {
            self.status = status;
        }
        self.messages.push(message.into());
    }
}

pub fn run(command: Command, cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(cfg, command);
    let result = match command {
        Command::VerifyAppendix => verify_appendix(cfg, &mut out),
        Command::Solve => solve(cfg, &mut out),
        Command::Converge => converge(cfg, &mut out),
        Command::Torsion => torsion(cfg, &mut out),
        Command::CheckMetric => check_metric(cfg, &mut out),
    };
    if let Err(e) = result {
        out.status = ExitStatus::ConfigError;
        out.messages.push(e.to_string());
    }
    out
}

pub fn load_flow_data(cfg: &ScenarioConfig) -> Result<FlowData, ConfigError> {
    let open = |p: &std::path::Path| {
        File::open(p).map_err(|e| ConfigError::Io { path: p.display().to_string(), message: e.to_string() })
    };
    let wrap = |p: &std::path::Path, e: crate::flow::FlowError| ConfigError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    match &cfg.data {
        DataSource::Builtin { f, h } => Ok(FlowData { f: Arc::from(f.build()), h: Arc::from(h.build()) }),
        DataSource::FlowTable(p) => read_flow_table(open(p)?).map_err(|e| wrap(p, e)),
        DataSource::InitialData(p) => InitialTable::read(open(p)?)
            .and_then(|t| t.to_flow_data(cfg.quad_tol))
            .map_err(|e| wrap(p, e)),
    }
}

fn solution(cfg: &ScenarioConfig) -> Result<FlowSolution, ConfigError> {
    Ok(FlowSolution::new(load_flow_data(cfg)?, cfg.quad_tol, cfg.root_tol))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().map(crate::flow::io::format_f64)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn random_jet(rng: &mut ChaCha8Rng) -> PointJet {
    PointJet::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0))
        .with_r_derivatives(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        .with_t_derivatives(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn jet_json(j: &PointJet) -> Value {
    json!({ "A": j.a, "B": j.b, "A_r": j.a_r, "B_r": j.b_r, "A_t": j.a_t, "B_t": j.b_t })
}

/// Engine `d`, `∂/∂t` versus the closed-form tables on seeded random jets.
fn verify_appendix(cfg: &ScenarioConfig, out: &mut Outcome) -> Result<(), ConfigError> {
    let tables = match cfg.inject_sign_flip {
        Some(blade) => ClosedFormTables::standard().with_flipped_dphi(blade),
        None => ClosedFormTables::standard(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jets: Vec<PointJet> = (0..cfg.samples).map(|_| random_jet(&mut rng)).collect();
    let r = 2.0;
    let mut rows = Vec::with_capacity(jets.len());
    let mut worst: Option<(&str, String, f64, PointJet)> = None;
    let (mut max_dphi, mut max_dphidt) = (0.0f64, 0.0f64);
    for jet in &jets {
        let pair = (|| -> Result<_, exterior::ExteriorError> {
            Ok((
                (cone::dphi_engine(jet, r, 0.0)?, tables.dphi_at(jet, r, 0.0)?),
                (cone::dphidt_engine(jet, r, 0.0)?, tables.dphidt_at(jet, r, 0.0)?),
            ))
        })();
        let ((e1, c1), (e2, c2)) = match pair {
            Ok(p) => p,
            Err(e) => {
                out.fail(ExitStatus::VerificationFailure, format!("profile {}: {e}", jet_json(jet)));
                continue;
            }
        };
        let mut row_diffs = [0.0; 2];
        for (slot, (table, engine, closed)) in
            [("dphi", &e1, &c1), ("dphidt", &e2, &c2)].into_iter().enumerate()
        {
            if let Some((blade, diff)) = engine.worst_term(closed) {
                row_diffs[slot] = diff;
                if worst.as_ref().is_none_or(|w| diff > w.2) {
                    worst = Some((table, blade.to_string(), diff, *jet));
                }
            }
        }
        max_dphi = max_dphi.max(row_diffs[0]);
        max_dphidt = max_dphidt.max(row_diffs[1]);
        rows.push(vec![jet.a, jet.b, jet.a_r, jet.b_r, jet.a_t, jet.b_t, row_diffs[0], row_diffs[1]]);
    }
    let pass = max_dphi.max(max_dphidt) < cfg.verify_tol;
    let worst_json = worst.as_ref().map_or(Value::Null, |(table, term, diff, jet)| {
        json!({ "table": table, "term": term, "diff": diff, "profile": jet_json(jet) })
    });
    if !pass {
        out.fail(
            ExitStatus::VerificationFailure,
            format!("closed form disagrees with engine: worst term {}", worst_json),
        );
    }
    out.meta.insert("worst".into(), worst_json.clone());
    out.body = match cfg.format_for(Command::VerifyAppendix) {
        Format::Json => {
            let report = json!({
                "samples": cfg.samples,
                "seed": cfg.seed,
                "tolerance": cfg.verify_tol,
                "max_diff_dphi": max_dphi,
                "max_diff_dphidt": max_dphidt,
                "worst": worst_json,
                "pass": pass,
            });
            serde_json::to_string_pretty(&report).expect("json") + "\n"
        }
        Format::Csv => csv_text(&["A", "B", "A_r", "B_r", "A_t", "B_t", "dphi_diff", "dphidt_diff"], rows),
    };
    Ok(())
}

fn hypothesis_json(rep: &crate::flow::HypothesisReport) -> Value {
    json!({
        "f_bounded": rep.f_bounded,
        "f_nonneg": rep.f_nonneg,
        "h_bounded": rep.h_bounded,
        "h_below_identity": rep.h_below_identity,
        "smooth": rep.smooth,
        "violations": rep.violations,
    })
}

/// Solution table on the `(t, r)` grid with flow residuals and RK4 cross-checks.
fn solve(cfg: &ScenarioConfig, out: &mut Outcome) -> Result<(), ConfigError> {
    let sol = solution(cfg)?;
    let rs = cfg.r_grid();
    let points: Vec<(f64, f64)> = cfg.t.iter().flat_map(|&t| rs.iter().map(move |&r| (t, r))).collect();
    let window: Vec<f64> = points.iter().map(|(t, r)| r - t).collect();
    let hyp = sol.data().check_hypotheses(&window, &rs);
    if !hyp.smooth {
        out.messages.push("data is interpolated (C1 only)".into());
    }
    out.meta.insert("hypotheses".into(), hypothesis_json(&hyp));

    let results: Vec<Result<SolutionRow, String>> = points
        .par_iter()
        .map(|&(t, r)| {
            let jet = sol.jet_rt(r, t).map_err(|e| e.to_string())?;
            let residual = cone::flow_residual(&jet.point_jet(), r, t).map_err(|e| e.to_string())?.max_abs();
            Ok(SolutionRow { t, r, x: jet.x, y: jet.y, b: jet.b, a: jet.a, residual })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (&(t, r), res) in points.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => out.fail(ExitStatus::VerificationFailure, format!("row t = {t}, r = {r}: {e}")),
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    if max_residual >= cfg.verify_tol {
        out.fail(ExitStatus::VerificationFailure, format!("flow residual {max_residual:e} exceeds tolerance"));
    }

    // RK4 along y = r − t up to the row's x, from the t = 0 point x = y when
    // it lies in the domain and otherwise from halfway between h(y) and x
    let candidates: Vec<&SolutionRow> = rows.iter().filter(|r| r.x > r.y).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut oracle_max = 0.0f64;
    let mut checked = 0;
    if !candidates.is_empty() {
        for _ in 0..cfg.oracle_points {
            let row = candidates[rng.gen_range(0..candidates.len())];
            let end = sol.data().h.value(row.y).and_then(|h| {
                let x0 = if row.y > h { row.y } else { h + 0.5 * (row.x - h) };
                let (b, a) = sol.values(x0, row.y)?;
                integrate_characteristic(CharacteristicState { x: x0, b, a }, row.x, cfg.oracle_steps, |_| {})
            });
            match end {
                Ok(s) => {
                    oracle_max = oracle_max.max((s.b - row.b).abs()).max((s.a - row.a).abs());
                    checked += 1;
                }
                Err(e) => out.fail(
                    ExitStatus::VerificationFailure,
                    format!("oracle at t = {}, r = {}: {e}", row.t, row.r),
                ),
            }
        }
    }
    if oracle_max >= cfg.oracle_tol {
        out.fail(ExitStatus::VerificationFailure, format!("oracle discrepancy {oracle_max:e} exceeds tolerance"));
    }
    out.meta.insert("rows".into(), json!(rows.len()));
    out.meta.insert("max_residual".into(), json!(max_residual));
    out.meta.insert("oracle_checked".into(), json!(checked));
    out.meta.insert("oracle_max_discrepancy".into(), json!(oracle_max));

    out.body = match cfg.format_for(Command::Solve) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_solution(&mut buf, &rows).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({"t": r.t, "r": r.r, "x": r.x, "y": r.y, "B": r.b, "A": r.a, "residual": r.residual}))
                .collect();
            serde_json::to_string_pretty(&rows).expect("json") + "\n"
        }
    };
    Ok(())
}

/// Deviation curves, gated on the hypotheses.
fn converge(cfg: &ScenarioConfig, out: &mut Outcome) -> Result<(), ConfigError> {
    let sol = solution(cfg)?;
    let grid = crate::convergence::s_grid(cfg.k, cfg.n).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let window: Vec<f64> = cfg
        .t
        .iter()
        .flat_map(|&t| grid.iter().map(move |&s| (t + 1.0) * s - 2.0 * t))
        .collect();
    let hyp = sol.data().check_hypotheses(&window, &grid);
    out.meta.insert("hypotheses".into(), hypothesis_json(&hyp));
    if !hyp.holds() {
        for v in &hyp.violations {
            out.fail(ExitStatus::HypothesisViolation, format!("hypothesis violated: {v}"));
        }
        return Ok(());
    }
    if !hyp.smooth {
        out.messages.push("data is interpolated (C1 only)".into());
    }

    let report = match ConvergenceReport::compute(&sol, &cfg.t, cfg.k, cfg.n, Some(cfg.refine_tol)) {
        Ok(r) => r,
        Err(e @ (ConvergenceError::Flow { .. } | ConvergenceError::GridNotConverged { .. })) => {
            out.fail(ExitStatus::VerificationFailure, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(ConfigError::Invalid(e.to_string())),
    };

    // The sup of |h| over the window bounds sup_B_dev·√12·(t+1) when f ≡ 0;
    // for other f the comparison is recorded, not enforced.
    let h_sup = window
        .iter()
        .filter_map(|&y| sol.data().h.value(y).ok())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let bound_holds: Vec<bool> = cfg
        .t
        .iter()
        .zip(&report.sup_b_dev)
        .map(|(t, d)| *d <= h_sup / (SQRT12 * (t + 1.0)) + 1e-9)
        .collect();
    out.meta.insert("h_sup".into(), json!(h_sup));
    out.meta.insert("h_bound_holds".into(), json!(bound_holds));
    out.meta.insert("refinement_gap".into(), json!(report.refinement_gap));

    let first = report.sup_metric_dev.first().copied().unwrap_or(0.0);
    let last = report.sup_metric_dev.last().copied().unwrap_or(0.0);
    let threshold = cfg.metric_threshold.unwrap_or(first / cfg.reduction);
    match report.fit_exponent {
        Some(p) if p > -0.9 => out.fail(ExitStatus::VerificationFailure, format!("decay exponent {p} > -0.9")),
        None if last > cfg.verify_tol => out.fail(
            ExitStatus::VerificationFailure,
            "no decay fit possible and the metric deviation is not negligible",
        ),
        _ => {}
    }
    if last > threshold.max(cfg.verify_tol) {
        out.fail(
            ExitStatus::VerificationFailure,
            format!("final metric deviation {last:e} above threshold {threshold:e}"),
        );
    }
    out.body = match cfg.format_for(Command::Converge) {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
    };
    Ok(())
}

/// Evaluates `body` on every radial grid point for the configured profile.
/// Flow profiles are frozen to their first jet at each point.
fn for_each_point<T: Send>(
    cfg: &ScenarioConfig,
    spec: ProfileSpec,
    body: impl Fn(&dyn Profile, f64, f64) -> Result<T, String> + Sync,
) -> Result<Vec<(f64, Result<T, String>)>, ConfigError> {
    let rs = cfg.r_grid();
    let rows = match spec {
        ProfileSpec::G2Cone | ProfileSpec::Constant { .. } | ProfileSpec::Linear { .. } => {
            let p = match spec {
                ProfileSpec::G2Cone => PolynomialProfile::g2_cone(),
                ProfileSpec::Constant { a, b } => PolynomialProfile::constant(a, b),
                ProfileSpec::Linear { a, b } => PolynomialProfile::linear(a, b),
                _ => unreachable!(),
            };
            rs.par_iter().map(|&r| (r, body(&p, r, 0.0))).collect()
        }
        ProfileSpec::Flow { t } => {
            let sol = solution(cfg)?;
            rs.par_iter()
                .map(|&r| {
                    let res = sol.jet_rt(r, t).map_err(|e| e.to_string()).and_then(|j| body(&j.point_jet(), r, t));
                    (r, res)
                })
                .collect()
        }
        ProfileSpec::Random => {
            return Err(ConfigError::Invalid("profile = random is only available for check-metric".into()))
        }
    };
    Ok(rows)
}

fn torsion(cfg: &ScenarioConfig, out: &mut Outcome) -> Result<(), ConfigError> {
    let spec = cfg.profile_for(Command::Torsion).expect("torsion has a default profile");
    let rows = for_each_point(cfg, spec, |p, r, t| {
        let res = torsion_residuals(p, r, t).map_err(|e| e.to_string())?;
        Ok([res.dphi, res.codiff])
    })?;
    let mut table = Vec::new();
    let mut worst = 0.0f64;
    for (r, res) in rows {
        match res {
            Ok([dphi, codiff]) => {
                worst = worst.max(dphi).max(codiff);
                table.push(vec![r, dphi, codiff]);
            }
            Err(e) => out.fail(ExitStatus::VerificationFailure, format!("r = {r}: {e}")),
        }
    }
    out.meta.insert("max_residual".into(), json!(worst));
    if worst >= cfg.verify_tol {
        out.fail(ExitStatus::VerificationFailure, format!("torsion residual {worst:e}: structure is not torsion-free"));
    }
    out.body = csv_text(&["r", "dphi_residual", "codiff_residual"], table);
    Ok(())
}

fn metric_error(p: &dyn Profile, r: f64, t: f64) -> Result<[f64; 3], String> {
    let phi = exterior::eval(cone_phi(), p, r, t).map_err(|e| e.to_string())?;
    let [a, b, ..] = p.first_jet(r, t).map_err(|e| e.to_string())?;
    let g = metric_from_form(&phi).map_err(|e| e.to_string())?;
    let expected = crate::g2::MetricDiag::cone(a, b).map_err(|e| e.to_string())?.components();
    let mut err = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            let e = if i == j { expected[i] } else { 0.0 };
            err = err.max((g.0[(i, j)] - e).abs());
        }
    }
    Ok([a, b, err])
}

fn check_metric(cfg: &ScenarioConfig, out: &mut Outcome) -> Result<(), ConfigError> {
    let spec = cfg.profile_for(Command::CheckMetric).expect("check-metric has a default profile");
    let rows: Vec<(f64, Result<[f64; 3], String>)> = if spec == ProfileSpec::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let rs = cfg.r_grid();
        (0..cfg.samples)
            .map(|i| {
                let jet = PointJet::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
                let r = rs[i % rs.len()];
                (r, metric_error(&jet, r, 0.0))
            })
            .collect()
    } else {
        for_each_point(cfg, spec, metric_error)?
    };
    let mut table = Vec::new();
    let mut worst = 0.0f64;
    for (i, (r, res)) in rows.into_iter().enumerate() {
        match res {
            Ok([a, b, err]) => {
                worst = worst.max(err);
                table.push(vec![i as f64, r, a, b, err]);
            }
            Err(e) => out.fail(ExitStatus::VerificationFailure, format!("row {i}, r = {r}: {e}")),
        }
    }
    out.meta.insert("max_error".into(), json!(worst));
    if worst >= cfg.verify_tol {
        out.fail(ExitStatus::VerificationFailure, format!("metric error {worst:e} exceeds tolerance"));
    }
    out.body = csv_text(&["index", "r", "A", "B", "max_error"], table);
    Ok(())
}
