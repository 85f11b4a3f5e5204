use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::{candidate_pairs, cluster_stats, sample_spread_out, ClusterReport, Model, NeighborBall};
use super::window::Window;
use crate::error::PercolationError;
use crate::group::Group;
use crate::union_find::UnionFind;

pub const LAMBDA_MAX: f64 = 4.0;

/// Smallest `lambda` at which the largest cluster of one seed reaches
/// `theta * n`, found by adding pairs in order of their uniforms. `None`
/// when it is not reached for `lambda <= lambda_max`.
pub fn seed_threshold(
    group: &Group,
    ball: &NeighborBall,
    model: Model,
    window: &Window,
    seed: u64,
    theta: f64,
    lambda_max: f64,
) -> Result<Option<f64>, PercolationError> {
    let denom = model.denominator(group, ball);
    let p_max = (lambda_max / denom).min(1.0);
    let mut pairs = candidate_pairs(window, ball, seed, p_max)?;
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let n = window.len();
    let target = (theta * n as f64).ceil().max(1.0) as u32;
    let mut uf = UnionFind::new(n);
    if uf.largest() >= target {
        return Ok(Some(0.0));
    }
    for (u, v, x) in pairs {
        uf.union(u, v);
        if uf.largest() >= target {
            // the edge is present for every lambda with x < lambda / denom
            return Ok(Some(x * denom));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaCEstimate {
    pub lambda_hat: f64,
    pub lo: f64,
    pub hi: f64,
    pub seed_thresholds: Vec<Option<f64>>,
    pub iterations: usize,
}

/// A `lambda` is supercritical when a strict majority of seeds reach the
/// giant threshold at or below it.
pub fn majority_supercritical(thresholds: &[Option<f64>], lambda: f64) -> bool {
    let hits = thresholds.iter().filter(|t| matches!(t, Some(x) if *x < lambda)).count();
    2 * hits > thresholds.len()
}

/// Bisection over `[0, 4]` with the majority rule. Per-seed thresholds are
/// exact for the coupled samples, so each bisection step is a count.
#[allow(clippy::too_many_arguments)]
pub fn estimate_lambda_c(
    group: &Group,
    ball: &NeighborBall,
    model: Model,
    window: &Window,
    seeds: &[u64],
    theta: f64,
    tol: f64,
) -> Result<LambdaCEstimate, PercolationError> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(PercolationError::InvalidParameters(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(tol >= 0.01) {
        return Err(PercolationError::InvalidParameters(format!("tol must be at least 0.01, got {tol}")));
    }
    if seeds.is_empty() {
        return Err(PercolationError::InsufficientSeeds { need: 1, got: 0 });
    }
    let thresholds = seeds
        .par_iter()
        .map(|&s| seed_threshold(group, ball, model, window, s, theta, LAMBDA_MAX))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut lo, mut hi) = (0.0, LAMBDA_MAX);
    if !majority_supercritical(&thresholds, hi) {
        return Err(PercolationError::BracketFailure { upper: hi });
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if majority_supercritical(&thresholds, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(LambdaCEstimate { lambda_hat: 0.5 * (lo + hi), lo, hi, seed_thresholds: thresholds, iterations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GiantRow {
    pub r: usize,
    pub rho: f64,
    pub n_vertices: usize,
    pub c1_over_rho_mean: f64,
    pub c1_over_rho_sd: f64,
    pub c2_over_rho_mean: f64,
    pub c2_over_rho_sd: f64,
    pub c2_over_c1_mean: f64,
    pub giant_fraction_mean: f64,
    pub reports: Vec<ClusterReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GiantReport {
    pub lambda: f64,
    pub rows: Vec<GiantRow>,
}

impl GiantReport {
    /// `|m_last - m_prev| / max(m_last, m_prev)` for the mean `C1 / rho` at
    /// the two largest radii.
    pub fn relative_drift(&self) -> Option<f64> {
        let k = self.rows.len();
        if k < 2 {
            return None;
        }
        let (a, b) = (self.rows[k - 2].c1_over_rho_mean, self.rows[k - 1].c1_over_rho_mean);
        let m = a.max(b);
        Some(if m == 0.0 { 0.0 } else { (b - a).abs() / m })
    }

    /// Drift measured in units of the pooled standard deviation.
    pub fn sd_normalized_drift(&self) -> Option<f64> {
        let k = self.rows.len();
        if k < 2 {
            return None;
        }
        let (x, y) = (&self.rows[k - 2], &self.rows[k - 1]);
        let sd = (0.5 * (x.c1_over_rho_sd.powi(2) + y.c1_over_rho_sd.powi(2))).sqrt();
        Some(if sd == 0.0 { 0.0 } else { (y.c1_over_rho_mean - x.c1_over_rho_mean).abs() / sd })
    }

    pub fn c2_over_c1_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].c2_over_c1_mean < w[0].c2_over_c1_mean)
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, v.sqrt())
}

/// One sampled configuration per `(r, seed)`; the window for each `r` comes
/// from `window_for`.
pub fn giant_component_law_check<F>(
    group: &Group,
    balls: &[NeighborBall],
    model: Model,
    window_for: F,
    seeds: &[u64],
) -> Result<GiantReport, PercolationError>
where
    F: Fn(usize) -> Result<Window, PercolationError>,
{
    if seeds.len() < 5 {
        return Err(PercolationError::InsufficientSeeds { need: 5, got: seeds.len() });
    }
    let mut rows = Vec::new();
    for ball in balls {
        let m = model.with_r(ball.r);
        let window = window_for(ball.r)?;
        let rho = m.denominator(group, ball);
        let reports = seeds
            .par_iter()
            .map(|&s| sample_spread_out(group, ball, m, &window, s).map(|x| cluster_stats(&x)))
            .collect::<Result<Vec<_>, _>>()?;
        let c1: Vec<f64> = reports.iter().map(|c| c.c1_vertices as f64 / rho).collect();
        let c2: Vec<f64> = reports.iter().map(|c| c.c2_vertices as f64 / rho).collect();
        let ratio: Vec<f64> = reports.iter().map(|c| c.c2_vertices as f64 / c.c1_vertices as f64).collect();
        let gf: Vec<f64> = reports.iter().map(|c| c.giant_fraction()).collect();
        let (c1m, c1s) = mean_sd(&c1);
        let (c2m, c2s) = mean_sd(&c2);
        rows.push(GiantRow {
            r: ball.r,
            rho,
            n_vertices: window.len(),
            c1_over_rho_mean: c1m,
            c1_over_rho_sd: c1s,
            c2_over_rho_mean: c2m,
            c2_over_rho_sd: c2s,
            c2_over_c1_mean: mean_sd(&ratio).0,
            giant_fraction_mean: mean_sd(&gf).0,
            reports,
        });
    }
    Ok(GiantReport { lambda: model.lambda(), rows })
}
