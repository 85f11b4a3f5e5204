use serde::{Deserialize, Serialize};

use crate::cayley::enumerate_ball;
use crate::error::PercolationError;
use crate::group::{Group, Structure};
use crate::haar::{CoordinateSystem, Region};
use crate::interval::Interval;
use crate::rng::uniform;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBound {
    /// Monte Carlo estimate of `H(S \ U) / H(S)`.
    pub ratio: f64,
    /// `lambda * sqrt(ratio)`.
    pub bound: f64,
    pub samples: usize,
    pub interior_hits: usize,
    pub proxy_points: usize,
}

/// Unit ball of the limit metric, approximated by the rescaled word sphere
/// `delta_{1/R}(S(R))` in exponential coordinates.
pub fn unit_ball_proxy(group: &Group, radius: usize) -> Result<Vec<Vec<f64>>, PercolationError> {
    if radius == 0 {
        return Err(PercolationError::InvalidParameters("proxy radius must be positive".into()));
    }
    let t = enumerate_ball(group, radius, true, crate::cayley::DEFAULT_POINT_CAP)?;
    let pts = t.points_within(radius as u32)?;
    pts.into_iter()
        .filter(|(_, l)| *l as usize == radius)
        .map(|(p, _)| {
            let v = group.to_exponential(&p)?.to_f64();
            Ok(group.dilate(1.0 / radius as f64, &v)?)
        })
        .collect()
}

/// Lower bound `lambda sqrt(H(S \ U) / H(S))` on the norm of the limiting
/// integral operator restricted to the box `S`, where `U` is the unit
/// neighbourhood of the complement: `g` lies outside `U` when `g . y` stays
/// in `S` for every `y` of the unit-ball proxy.
pub fn kernel_norm_lower_bound(
    group: &Group,
    region: &Region,
    lambda: f64,
    mc_samples: usize,
    seed: u64,
    proxy_radius: usize,
) -> Result<KernelBound, PercolationError> {
    if !(lambda > 0.0) {
        return Err(PercolationError::InvalidParameters(format!("lambda must be positive, got {lambda}")));
    }
    if mc_samples == 0 {
        return Err(PercolationError::InvalidParameters("need at least one sample".into()));
    }
    let d = group.dim();
    let (lo, hi, system, _) = region.bounds(group.weights())?;
    let proxy = unit_ball_proxy(group, proxy_radius)?;
    let hull: Vec<Interval> = (0..d)
        .map(|i| {
            let a = proxy.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let b = proxy.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            Interval::new(a.min(0.0), b.max(0.0))
        })
        .collect();
    let polys: Vec<_> = (0..d).map(|i| group.bch_polynomial(Structure::Graded, i)).collect();
    let in_region = |z: &[f64]| -> Result<bool, PercolationError> {
        let c = match system {
            CoordinateSystem::Exponential => z.to_vec(),
            CoordinateSystem::SecondKindGraded => group.to_second_kind_f64(z, Structure::Graded)?,
        };
        Ok(c.iter().enumerate().all(|(i, &x)| x > lo[i] && x < hi[i]))
    };
    let exponential = system == CoordinateSystem::Exponential;
    let mut hits = 0;
    let mut args = vec![Interval::point(0.0); 2 * d];
    args[d..].copy_from_slice(&hull);
    for k in 0..mc_samples {
        let x: Vec<f64> = (0..d).map(|i| lo[i] + (hi[i] - lo[i]) * uniform(seed, k as u64, i as u64)).collect();
        let g = match system {
            CoordinateSystem::Exponential => x,
            CoordinateSystem::SecondKindGraded => group.to_exponential_f64(Structure::Graded, &x)?,
        };
        // cheap certificate: the whole hull of the proxy maps into the box
        if exponential {
            for i in 0..d {
                args[i] = Interval::point(g[i]);
            }
            let certified = polys.iter().enumerate().all(|(i, p)| {
                let img = p.eval_interval(&args);
                img.lo > lo[i] && img.hi < hi[i]
            });
            if certified {
                hits += 1;
                continue;
            }
        }
        let mut inside = true;
        for y in &proxy {
            if !in_region(&group.graded_multiply_f64(&g, y)?)? {
                inside = false;
                break;
            }
        }
        if inside {
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(PercolationError::RegionTooSmall);
    }
    let ratio = hits as f64 / mc_samples as f64;
    Ok(KernelBound { ratio, bound: lambda * ratio.sqrt(), samples: mc_samples, interior_hits: hits, proxy_points: proxy.len() })
}
