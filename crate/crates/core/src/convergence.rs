//! Convergence of the rescaled metric `g/(t+1)²` to the limit cone.
//!
//! With `s = r/(t+1)` the rescaled metric is
//! `ds² + (A/(t+1))² Σα² + (B/(t+1))² Σβ²`, compared against
//! `ds² + (s²/36) Σα² + (s²/12) Σβ²` on the window `s ∈ [1, K]`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::flow::{FlowError, FlowSolution};
use crate::g2::MetricDiag;

const SQRT12: f64 = 3.464_101_615_137_754_6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvergenceError {
    #[error("at s = {s}, t = {t}: {source}")]
    Flow { s: f64, t: f64, source: FlowError },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("decay fit needs at least 3 positive samples, got {0}")]
    Fit(usize),
    #[error("sup at t = {t} moved by {gap} under grid refinement")]
    GridNotConverged { t: f64, gap: f64 },
}

/// `diag(s²/36 ×3, s²/12 ×3, 1)` in the α/β/ds coframe.
pub fn limit_metric(s: f64) -> Result<MetricDiag, ConvergenceError> {
    let (a2, b2) = (s * s / 36.0, s * s / 12.0);
    MetricDiag::new([a2, a2, a2, b2, b2, b2, 1.0])
        .map_err(|e| ConvergenceError::Invalid(format!("limit metric at s = {s}: {e}")))
}

/// `g/(t+1)²` in the α/β/ds coframe; the ds component is exactly 1.
pub fn rescaled_metric(a: f64, b: f64, t: f64) -> Result<MetricDiag, ConvergenceError> {
    let (a2, b2) = ((a / (t + 1.0)).powi(2), (b / (t + 1.0)).powi(2));
    MetricDiag::new([a2, a2, a2, b2, b2, b2, 1.0])
        .map_err(|e| ConvergenceError::Invalid(format!("rescaled metric: {e}")))
}

/// `n` uniform points from 1 to `K` inclusive.
pub fn s_grid(k: f64, n: usize) -> Result<Vec<f64>, ConvergenceError> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(ConvergenceError::Invalid(format!("K = {k} must be a finite number > 1")));
    }
    if n < 2 {
        return Err(ConvergenceError::Invalid(format!("grid needs n >= 2 points, got {n}")));
    }
    Ok((0..n).map(|i| 1.0 + (k - 1.0) * i as f64 / (n - 1) as f64).collect())
}

/// Sup-norm deviations at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Deviations {
    pub b: f64,
    pub bsq: f64,
    pub metric: f64,
}

impl Deviations {
    fn gap(self, o: Deviations) -> f64 {
        (self.b - o.b).abs().max((self.bsq - o.bsq).abs()).max((self.metric - o.metric).abs())
    }
}

/// Deviations at a single `(s, t)`, with `x = (t+1)s`, `y = x − 2t`.
pub fn point_deviations(sol: &FlowSolution, s: f64, t: f64) -> Result<Deviations, ConvergenceError> {
    let x = (t + 1.0) * s;
    let (b, a) = sol
        .values(x, x - 2.0 * t)
        .map_err(|source| ConvergenceError::Flow { s, t, source })?;
    let g = rescaled_metric(a, b, t)?;
    let limit = limit_metric(s)?;
    Ok(Deviations {
        b: (b / (t + 1.0) - s / SQRT12).abs(),
        bsq: ((b / (t + 1.0)).powi(2) - s * s / 12.0).abs(),
        metric: g.max_abs_diff(&limit),
    })
}

const GOLDEN_ITERATIONS: usize = 60;

/// Golden-section maximization of `g` on `[lo, hi]`, assuming one local
/// maximum there; endpoints are included as candidates.
fn refine_max<G>(lo: f64, hi: f64, g: G) -> Result<f64, ConvergenceError>
where
    G: Fn(f64) -> Result<f64, ConvergenceError>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    let mut best = g(lo)?.max(g(hi)?).max(gc).max(gd);
    for _ in 0..GOLDEN_ITERATIONS {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
            best = best.max(gc);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
            best = best.max(gd);
        }
        if b - a <= 1e-12 * b.abs() {
            break;
        }
    }
    Ok(best)
}

/// All three sups over `[1, K]`: the max over the `n`-point grid, refined
/// by a golden-section search between the neighbours of each grid argmax.
pub fn deviations(sol: &FlowSolution, t: f64, k: f64, n: usize) -> Result<Deviations, ConvergenceError> {
    if !(t >= 0.0) {
        return Err(ConvergenceError::Invalid(format!("t = {t} must be nonnegative")));
    }
    let grid = s_grid(k, n)?;
    let points = grid
        .par_iter()
        .map(|&s| point_deviations(sol, s, t))
        .collect::<Result<Vec<_>, _>>()?;
    let component: [fn(&Deviations) -> f64; 3] = [|d| d.b, |d| d.bsq, |d| d.metric];
    let sups = component
        .par_iter()
        .map(|pick| {
            let (i, grid_max) = points
                .iter()
                .map(pick)
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            let (lo, hi) = (grid[i.saturating_sub(1)], grid[(i + 1).min(n - 1)]);
            let refined = refine_max(lo, hi, |s| Ok(pick(&point_deviations(sol, s, t)?)))?;
            Ok(grid_max.max(refined))
        })
        .collect::<Result<Vec<f64>, ConvergenceError>>()?;
    Ok(Deviations { b: sups[0], bsq: sups[1], metric: sups[2] })
}

/// `sup |B/(t+1) − s/√12|`.
pub fn sup_deviation_b(sol: &FlowSolution, t: f64, k: f64, n: usize) -> Result<f64, ConvergenceError> {
    Ok(deviations(sol, t, k, n)?.b)
}

/// `sup |B²/(t+1)² − s²/12|`.
pub fn sup_deviation_bsq(sol: &FlowSolution, t: f64, k: f64, n: usize) -> Result<f64, ConvergenceError> {
    Ok(deviations(sol, t, k, n)?.bsq)
}

/// `sup` over the grid of the max-abs component of `g/(t+1)² − g∞`.
pub fn metric_deviation(sol: &FlowSolution, t: f64, k: f64, n: usize) -> Result<f64, ConvergenceError> {
    Ok(deviations(sol, t, k, n)?.metric)
}

/// Deviations on `n` points, checked against the nested `2n − 1` grid.
/// Returns the coarse values and the refinement gap.
pub fn refined_deviations(
    sol: &FlowSolution,
    t: f64,
    k: f64,
    n: usize,
    max_gap: f64,
) -> Result<(Deviations, f64), ConvergenceError> {
    let coarse = deviations(sol, t, k, n)?;
    let fine = deviations(sol, t, k, 2 * n - 1)?;
    let gap = coarse.gap(fine);
    if gap >= max_gap {
        return Err(ConvergenceError::GridNotConverged { t, gap });
    }
    Ok((coarse, gap))
}

/// Least-squares fit `dev ≈ c·(t+1)^p` in log-log coordinates; nonpositive
/// deviations are dropped. Returns `(p, c)`.
pub fn decay_fit(ts: &[f64], devs: &[f64]) -> Result<(f64, f64), ConvergenceError> {
    if ts.len() != devs.len() {
        return Err(ConvergenceError::Invalid("times and deviations differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(devs)
        .filter(|(t, d)| **d > 0.0 && d.is_finite() && **t > -1.0)
        .map(|(t, d)| ((t + 1.0).ln(), d.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(ConvergenceError::Fit(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ConvergenceError::Invalid("decay fit needs distinct times".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, (my - slope * mx).exp()))
}

/// Deviation curves over a list of times, with a decay fit of the `B` curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub t: Vec<f64>,
    #[serde(rename = "sup_B_dev")]
    pub sup_b_dev: Vec<f64>,
    #[serde(rename = "sup_Bsq_dev")]
    pub sup_bsq_dev: Vec<f64>,
    pub sup_metric_dev: Vec<f64>,
    #[serde(rename = "K")]
    pub k: f64,
    pub n: usize,
    /// `None` when fewer than three deviations are positive.
    pub fit_exponent: Option<f64>,
    pub fit_constant: Option<f64>,
    #[serde(skip)]
    pub refinement_gap: Vec<f64>,
}

impl ConvergenceReport {
    /// Builds the report; each time is checked against a refined grid when
    /// `max_gap` is given.
    pub fn compute(
        sol: &FlowSolution,
        ts: &[f64],
        k: f64,
        n: usize,
        max_gap: Option<f64>,
    ) -> Result<Self, ConvergenceError> {
        let mut report = ConvergenceReport {
            t: ts.to_vec(),
            sup_b_dev: Vec::with_capacity(ts.len()),
            sup_bsq_dev: Vec::with_capacity(ts.len()),
            sup_metric_dev: Vec::with_capacity(ts.len()),
            k,
            n,
            fit_exponent: None,
            fit_constant: None,
            refinement_gap: Vec::with_capacity(ts.len()),
        };
        for &t in ts {
            let (dev, gap) = match max_gap {
                Some(g) => refined_deviations(sol, t, k, n, g)?,
                None => (deviations(sol, t, k, n)?, f64::NAN),
            };
            report.sup_b_dev.push(dev.b);
            report.sup_bsq_dev.push(dev.bsq);
            report.sup_metric_dev.push(dev.metric);
            report.refinement_gap.push(gap);
        }
        if let Ok((p, c)) = decay_fit(ts, &report.sup_b_dev) {
            report.fit_exponent = Some(p);
            report.fit_constant = Some(c);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "sup_B_dev", "sup_Bsq_dev", "sup_metric_dev"])?;
        for i in 0..self.t.len() {
            w.write_record(
                [self.t[i], self.sup_b_dev[i], self.sup_bsq_dev[i], self.sup_metric_dev[i]]
                    .map(crate::flow::io::format_f64),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::FlowData;

    fn solution(f: f64, h: f64) -> FlowSolution {
        FlowSolution::with_default_tolerances(FlowData::constant(f, h))
    }

    #[test]
    fn limit_metric_examples() {
        let g = limit_metric(6.0).unwrap();
        assert_eq!(g.components(), [1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 1.0]);
        for s in [1.5, 2.0, 17.0] {
            let c = limit_metric(s).unwrap().components();
            assert!((c[3] / c[0] - 3.0).abs() < 1e-14);
        }
        // A∞ = 2B∞/√12 at the limit
        let s = 2.5;
        assert!((s / 6.0 - 2.0 * (s / SQRT12) / SQRT12).abs() < 1e-15);
    }

    #[test]
    fn self_similar_data_has_zero_deviation() {
        let sol = solution(0.0, 0.0);
        for t in [0.0, 1.0, 7.0] {
            let d = deviations(&sol, t, 4.0, 64).unwrap();
            assert!(d.b < 1e-12 && d.bsq < 1e-12 && d.metric < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn constant_shift_gives_closed_form() {
        let sol = solution(0.0, -1.0);
        let d9 = sup_deviation_b(&sol, 9.0, 4.0, 64).unwrap();
        assert!((d9 - 1.0 / (SQRT12 * 10.0)).abs() < 1e-12);
        let d99 = sup_deviation_b(&sol, 99.0, 4.0, 64).unwrap();
        assert!((d99 - d9 / 10.0).abs() < 1e-12);
        // B = (x + 1)/√12, worst at s = K
        let (t, k) = (9.0, 4.0);
        let x: f64 = (t + 1.0) * k;
        let expected = ((x + 1.0) / SQRT12 / (t + 1.0)).powi(2) - k * k / 12.0;
        assert!((sup_deviation_bsq(&sol, t, k, 64).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn bsq_bounded_by_factorization() {
        let sol = solution(0.2, -0.5);
        let (t, k) = (3.0, 4.0);
        let db = sup_deviation_b(&sol, t, k, 64).unwrap();
        let dbsq = sup_deviation_bsq(&sol, t, k, 64).unwrap();
        assert!(dbsq <= db * (db + 2.0 * k / SQRT12) + 1e-12);
    }

    #[test]
    fn decay_fit_examples() {
        let ts = [0.0, 1.0, 3.0, 7.0, 15.0, 31.0];
        let inv: Vec<f64> = ts.iter().map(|t| 0.3 / (t + 1.0)).collect();
        let (p, c) = decay_fit(&ts, &inv).unwrap();
        assert!((p + 1.0).abs() < 1e-12 && (c - 0.3).abs() < 1e-12);
        let sq: Vec<f64> = ts.iter().map(|t| 2.0 / (t + 1.0f64).powi(2)).collect();
        assert!((decay_fit(&ts, &sq).unwrap().0 + 2.0).abs() < 1e-12);
        assert!(decay_fit(&ts, &[0.0; 6]).is_err());
    }

    #[test]
    fn report_serializes_expected_keys() {
        let sol = solution(0.0, -1.0);
        let rep = ConvergenceReport::compute(&sol, &[0.0, 1.0, 3.0], 4.0, 16, Some(1e-6)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["K", "fit_constant", "fit_exponent", "n", "sup_B_dev", "sup_Bsq_dev", "sup_metric_dev", "t"]
        );
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("t,sup_B_dev,sup_Bsq_dev,sup_metric_dev\n0.0,"));
    }

    #[test]
    fn refinement_finds_interior_maximum() {
        let peak = refine_max(0.0, 1.0, |s| Ok(-(s - 0.3f64).powi(2))).unwrap();
        assert!(peak.abs() < 1e-20);
        let edge = refine_max(0.0, 1.0, Ok).unwrap();
        assert_eq!(edge, 1.0);
    }

    #[test]
    fn invalid_grid() {
        assert!(s_grid(1.0, 10).is_err());
        assert!(s_grid(4.0, 1).is_err());
    }
}
