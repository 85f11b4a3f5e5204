use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::window::Window;
use crate::cayley::BallTable;
use crate::error::PercolationError;
use crate::group::{Group, LatticePoint};
use crate::rng::{hash_coords, uniform};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Model {
    /// Edge probability `lambda / beta(r)` within word distance `r`.
    WordMetric { r: usize, lambda: f64 },
    /// Edge probability `lambda / (c_S r^{d_Gamma})` within proxy distance
    /// `r`; the proxy is the word length.
    CCProxy { r: usize, lambda: f64, c_s: f64 },
}

impl Model {
    pub fn r(&self) -> usize {
        match *self {
            Model::WordMetric { r, .. } | Model::CCProxy { r, .. } => r,
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Model::WordMetric { lambda, .. } | Model::CCProxy { lambda, .. } => lambda,
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Model {
        match *self {
            Model::WordMetric { r, .. } => Model::WordMetric { r, lambda },
            Model::CCProxy { r, c_s, .. } => Model::CCProxy { r, lambda, c_s },
        }
    }

    pub fn with_r(&self, r: usize) -> Model {
        match *self {
            Model::WordMetric { lambda, .. } => Model::WordMetric { r, lambda },
            Model::CCProxy { lambda, c_s, .. } => Model::CCProxy { r, lambda, c_s },
        }
    }

    /// `beta(r)` or `c_S r^{d_Gamma}`; this is also the `rho` of the
    /// giant-component normalization.
    pub fn denominator(&self, group: &Group, ball: &NeighborBall) -> f64 {
        match *self {
            Model::WordMetric { .. } => ball.beta as f64,
            Model::CCProxy { r, c_s, .. } => c_s * (r as f64).powi(group.spec().growth_degree as i32),
        }
    }

    pub fn edge_probability(&self, group: &Group, ball: &NeighborBall) -> Result<f64, PercolationError> {
        let denom = self.denominator(group, ball);
        let lambda = self.lambda();
        if !(lambda >= 0.0) || lambda > denom {
            return Err(PercolationError::LambdaTooLarge { lambda, denom });
        }
        Ok(lambda / denom)
    }
}

/// The nonidentity elements `s` of the `r`-ball with `s > s^{-1}` in
/// lexicographic order: one representative per unordered pair `{u, us}`.
#[derive(Clone, Debug)]
pub struct NeighborBall {
    pub r: usize,
    pub beta: u64,
    pub steps: Vec<LatticePoint>,
    pub step_hashes: Vec<u64>,
}

impl NeighborBall {
    pub fn new(group: &Group, table: &BallTable, r: usize) -> Result<NeighborBall, PercolationError> {
        if r > table.r_max {
            return Err(PercolationError::InvalidParameters(format!(
                "ball table has radius {}, need {r}",
                table.r_max
            )));
        }
        let pts = table.points_within(r as u32)?;
        let mut steps = Vec::new();
        for (s, _) in pts {
            if s.is_identity() {
                continue;
            }
            let inv = group.inverse(&s)?;
            if s > inv {
                steps.push(s);
            }
        }
        steps.sort();
        let step_hashes = steps.iter().map(|s| hash_coords(&s.0)).collect();
        Ok(NeighborBall { r, beta: table.counts[r], steps, step_hashes })
    }
}

/// Header recorded with every sample so the substitutions are auditable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub distance: String,
    pub denominator: f64,
    pub edge_probability: f64,
    pub c_s: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PercolationSample {
    pub model: Model,
    pub seed: u64,
    pub n_vertices: usize,
    pub edges: Vec<(u32, u32)>,
    pub header: SampleHeader,
}

/// Calls `f(u, v, U)` for every candidate pair of the window whose uniform is
/// below `p_max`. Pairs come out in `(u, step)` order.
pub fn candidate_pairs(
    window: &Window,
    ball: &NeighborBall,
    seed: u64,
    p_max: f64,
) -> Result<Vec<(u32, u32, f64)>, PercolationError> {
    if let Some(per) = window.min_period() {
        if per <= 2 * ball.r as i64 {
            return Err(PercolationError::BadWindow(format!(
                "torus side {per} must exceed twice the range {}",
                ball.r
            )));
        }
    }
    let n = window.len();
    let chunk = 4096;
    let parts: Vec<Vec<(u32, u32, f64)>> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for u in c * chunk..((c + 1) * chunk).min(n) {
                let hu = window.vertex_hash(u);
                for (s, &hs) in ball.steps.iter().zip(&ball.step_hashes) {
                    let x = uniform(seed, hu, hs);
                    if x < p_max {
                        if let Some(v) = window.neighbor(u, s) {
                            out.push((u as u32, v as u32, x));
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

pub fn sample_spread_out(
    group: &Group,
    ball: &NeighborBall,
    model: Model,
    window: &Window,
    seed: u64,
) -> Result<PercolationSample, PercolationError> {
    if model.r() != ball.r {
        return Err(PercolationError::InvalidParameters(format!(
            "model range {} differs from neighbor ball range {}",
            model.r(),
            ball.r
        )));
    }
    let denom = model.denominator(group, ball);
    let p = model.edge_probability(group, ball)?;
    // p = 1 keeps every pair: uniforms are strictly below 1
    let edges = candidate_pairs(window, ball, seed, p)?.into_iter().map(|(u, v, _)| (u, v)).collect();
    let c_s = match model {
        Model::CCProxy { c_s, .. } => Some(c_s),
        Model::WordMetric { .. } => None,
    };
    Ok(PercolationSample {
        model,
        seed,
        n_vertices: window.len(),
        edges,
        header: SampleHeader {
            distance: "word length".into(),
            denominator: denom,
            edge_probability: p,
            c_s,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub c1_vertices: u64,
    pub c2_vertices: u64,
    pub c1_edges: u64,
    pub c2_edges: u64,
    pub total_edges: u64,
    pub n_vertices: u64,
}

impl ClusterReport {
    pub fn giant_fraction(&self) -> f64 {
        self.c1_vertices as f64 / self.n_vertices.max(1) as f64
    }
}

fn top_two<T: Ord + Copy + Default>(it: impl Iterator<Item = T>) -> (T, T) {
    let mut a = T::default();
    let mut b = T::default();
    for x in it {
        if x > a {
            b = a;
            a = x;
        } else if x > b {
            b = x;
        }
    }
    (a, b)
}

/// Two largest components, ranked separately by vertex and by edge count.
pub fn cluster_stats_edges(n_vertices: usize, edges: &[(u32, u32)]) -> ClusterReport {
    let mut uf = UnionFind::new(n_vertices);
    for &(u, v) in edges {
        uf.union(u, v);
    }
    let comps = uf.components();
    let (c1v, c2v) = top_two(comps.iter().map(|c| c.0 as u64));
    let (c1e, c2e) = top_two(comps.iter().map(|c| c.1));
    ClusterReport {
        c1_vertices: c1v,
        c2_vertices: c2v,
        c1_edges: c1e,
        c2_edges: c2e,
        total_edges: edges.len() as u64,
        n_vertices: n_vertices as u64,
    }
}

pub fn cluster_stats(sample: &PercolationSample) -> ClusterReport {
    cluster_stats_edges(sample.n_vertices, &sample.edges)
}

/// The same sample seen through `delta_{1/r}`: vertices are rescaled
/// exponential coordinates and `g ~ h` is decided from the rescaled
/// displacement `delta_{1/r}(log(h^{-1} g))` landing in the rescaled
/// `r`-ball, using the uniforms of the unscaled pair.
pub fn sample_rescaled(
    group: &Group,
    ball: &NeighborBall,
    model: Model,
    window: &Window,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, Vec<(u32, u32)>), PercolationError> {
    let r = model.r() as f64;
    let p = model.edge_probability(group, ball)?;
    let scaled_ball: Vec<Vec<f64>> = ball
        .steps
        .iter()
        .map(|s| {
            let v = group.to_exponential(s)?.to_f64();
            group.dilate(1.0 / r, &v)
        })
        .collect::<Result<_, _>>()?;
    let verts: Vec<Vec<f64>> = (0..window.len())
        .map(|i| {
            let v = group.to_exponential(&window.vertex(i))?.to_f64();
            group.dilate(1.0 / r, &v)
        })
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for u in 0..window.len() {
        let hu = window.vertex_hash(u);
        for (k, (s, &hs)) in ball.steps.iter().zip(&ball.step_hashes).enumerate() {
            let Some(v) = window.neighbor(u, s) else { continue };
            // displacement u^{-1} v seen at scale 1/r
            let uinv = group.inverse(&window.vertex(u))?;
            let disp = group.multiply(&uinv, &window.vertex(v))?;
            let dv = group.dilate(1.0 / r, &group.to_exponential(&disp)?.to_f64())?;
            let in_ball = dv.iter().zip(&scaled_ball[k]).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            if in_ball && uniform(seed, hu, hs) < p {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok((verts, edges))
}
