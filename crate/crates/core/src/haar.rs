//! Anisotropic lattice-point counting and its convergence to Lebesgue and
//! Haar measure.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HaarError;
use crate::group::{Group, LatticePoint, Structure};
use crate::interval::Interval;
use crate::poly::{q_from_f64, IntPoly, Poly, Q};

pub const DEFAULT_WINDOW_CAP: u128 = 500_000_000;
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordinateSystem {
    Exponential,
    SecondKindGraded,
}

fn default_closed() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    WeightedBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
        system: CoordinateSystem,
        #[serde(default = "default_closed")]
        closed: bool,
    },
    /// `{ |t_i| < N^{s_i} }` in exponential coordinates.
    HalfScaledBox { n: f64 },
}

#[derive(Clone, Debug, PartialEq)]
struct Bx {
    lo: Vec<f64>,
    hi: Vec<f64>,
    system: CoordinateSystem,
    closed: bool,
}

impl Region {
    pub fn closed_box(lo: Vec<f64>, hi: Vec<f64>, system: CoordinateSystem) -> Region {
        Region::WeightedBox { lo, hi, system, closed: true }
    }

    pub fn open_box(lo: Vec<f64>, hi: Vec<f64>, system: CoordinateSystem) -> Region {
        Region::WeightedBox { lo, hi, system, closed: false }
    }

    /// The image of the open unit cube under the graded second-kind chart.
    pub fn unit_cube_graded(dim: usize) -> Region {
        Region::open_box(vec![0.0; dim], vec![1.0; dim], CoordinateSystem::SecondKindGraded)
    }

    fn resolve(&self, weights: &[u32]) -> Result<Bx, HaarError> {
        match self {
            Region::WeightedBox { lo, hi, system, closed } => {
                if lo.len() != weights.len() || hi.len() != weights.len() {
                    return Err(HaarError::BadRegion(format!(
                        "box has dimension {}/{}, expected {}",
                        lo.len(),
                        hi.len(),
                        weights.len()
                    )));
                }
                for (a, b) in lo.iter().zip(hi) {
                    if !a.is_finite() || !b.is_finite() {
                        return Err(HaarError::BadRegion("unbounded box".into()));
                    }
                    if a >= b {
                        return Err(HaarError::BadRegion(format!("need lo < hi, got [{a}, {b}]")));
                    }
                }
                Ok(Bx { lo: lo.clone(), hi: hi.clone(), system: *system, closed: *closed })
            }
            Region::HalfScaledBox { n } => {
                if !(n.is_finite() && *n > 0.0) {
                    return Err(HaarError::BadRegion(format!("box scale must be positive, got {n}")));
                }
                let hi: Vec<f64> = weights.iter().map(|&w| n.powi(w as i32)).collect();
                let lo = hi.iter().map(|h| -h).collect();
                Ok(Bx { lo, hi, system: CoordinateSystem::Exponential, closed: false })
            }
        }
    }

    /// `(lo, hi, system, closed)` after resolving scaled boxes.
    pub fn bounds(&self, weights: &[u32]) -> Result<(Vec<f64>, Vec<f64>, CoordinateSystem, bool), HaarError> {
        let b = self.resolve(weights)?;
        Ok((b.lo, b.hi, b.system, b.closed))
    }

    /// Lebesgue measure of the box in its own coordinates.
    pub fn lebesgue(&self, weights: &[u32]) -> Result<f64, HaarError> {
        let b = self.resolve(weights)?;
        Ok(b.lo.iter().zip(&b.hi).map(|(l, h)| h - l).product())
    }
}

fn check_scale(r: f64) -> Result<(), HaarError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(HaarError::BadScale(r));
    }
    Ok(())
}

/// Integers `x` with `lo <= x / scale <= hi` (strict when open).
fn axis_count(lo: Q, hi: Q, scale: Q, closed: bool) -> i128 {
    let a = lo * scale;
    let b = hi * scale;
    let first = if closed || !a.is_integer() { a.ceil() } else { a + Q::one() };
    let last = if closed || !b.is_integer() { b.floor() } else { b - Q::one() };
    (last - first + Q::one()).to_integer().max(0)
}

/// `#(delta_{1/r}(Z^d) cap A)`, counting per axis. The coordinate system of
/// `A` is ignored: on `R^d` both charts are the identity.
pub fn lattice_count_anisotropic(weights: &[u32], a: &Region, r: f64) -> Result<u128, HaarError> {
    check_scale(r)?;
    let b = a.resolve(weights)?;
    let rq = q_from_f64(r).ok_or(HaarError::BadScale(r))?;
    let mut total: u128 = 1;
    for ((lo, hi), &w) in b.lo.iter().zip(&b.hi).zip(weights) {
        let lo = q_from_f64(*lo).ok_or_else(|| HaarError::BadRegion("box corner out of range".into()))?;
        let hi = q_from_f64(*hi).ok_or_else(|| HaarError::BadRegion("box corner out of range".into()))?;
        let c = axis_count(lo, hi, num_traits::pow(rq, w as usize), b.closed);
        total = total.saturating_mul(c as u128);
    }
    Ok(total)
}

/// `count / r^{sum s_i}`.
pub fn lattice_ratio(weights: &[u32], a: &Region, r: f64) -> Result<f64, HaarError> {
    let c = lattice_count_anisotropic(weights, a, r)?;
    let d: u32 = weights.iter().sum();
    Ok(c as f64 / r.powi(d as i32))
}

fn dilation_map(weights: &[u32], lambda: Q) -> Vec<Poly> {
    let d = weights.len();
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Poly::var(d, i).scale(num_traits::pow(lambda, w as usize)))
        .collect()
}

fn compose_map(outer: &[Poly], inner: &[Poly]) -> Vec<Poly> {
    outer.iter().map(|p| p.compose(inner)).collect()
}

/// Polynomial maps between lattice coordinates and the chart of a region at
/// scale `r`.
struct Charts {
    /// lattice second-kind coordinates -> chart coordinates of `delta_{1/r}`.
    forward: Vec<Poly>,
    /// chart coordinates -> lattice coordinates.
    backward: Vec<Poly>,
}

fn charts(group: &Group, system: CoordinateSystem, r: Q) -> Charts {
    let w = group.weights();
    let to_exp = group.exponential_polynomials(Structure::Original);
    let to_sec = group.second_kind_polynomials(Structure::Original);
    let shrink = compose_map(&dilation_map(w, Q::one() / r), to_exp);
    let grow = dilation_map(w, r);
    match system {
        CoordinateSystem::Exponential => Charts { forward: shrink, backward: compose_map(to_sec, &grow) },
        CoordinateSystem::SecondKindGraded => {
            let g_sec = group.second_kind_polynomials(Structure::Graded);
            let g_exp = group.exponential_polynomials(Structure::Graded);
            Charts {
                forward: compose_map(g_sec, &shrink),
                backward: compose_map(to_sec, &compose_map(&grow, g_exp)),
            }
        }
    }
}

/// Integer box enclosing every lattice point whose chart image lies in `b`.
fn enumeration_window(backward: &[Poly], b: &Bx) -> Vec<(i64, i64)> {
    let boxv: Vec<Interval> = b.lo.iter().zip(&b.hi).map(|(&l, &h)| Interval::new(l, h)).collect();
    backward
        .iter()
        .map(|p| {
            let iv = p.eval_interval(&boxv);
            (iv.lo.floor() as i64, iv.hi.ceil() as i64)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaarCount {
    pub count: u64,
    /// Points within the boundary tolerance, counted as inside. Always zero
    /// on the exact path.
    pub ambiguous: u64,
}

enum Membership {
    Exact { polys: Vec<IntPoly>, lo: Vec<Q>, hi: Vec<Q>, closed: bool },
    Float { polys: Vec<crate::poly::F64Poly>, lo: Vec<f64>, hi: Vec<f64> },
}

impl Membership {
    /// `None` when outside, `Some(near_boundary)` when inside.
    fn test(&self, x: &[i64]) -> Result<Option<bool>, HaarError> {
        match self {
            Membership::Exact { polys, lo, hi, closed } => {
                for (i, p) in polys.iter().enumerate() {
                    let v = Q::new(p.eval_numerator(x)?, p.denom());
                    let ok = if *closed { v >= lo[i] && v <= hi[i] } else { v > lo[i] && v < hi[i] };
                    if !ok {
                        return Ok(None);
                    }
                }
                Ok(Some(false))
            }
            Membership::Float { polys, lo, hi } => {
                let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
                let mut near = false;
                for (i, p) in polys.iter().enumerate() {
                    let v = p.eval(&xf);
                    let tol = BOUNDARY_TOL * (1.0 + lo[i].abs().max(hi[i].abs()));
                    if v < lo[i] - tol || v > hi[i] + tol {
                        return Ok(None);
                    }
                    if !(v > lo[i] + tol && v < hi[i] - tol) {
                        near = true;
                    }
                }
                Ok(Some(near))
            }
        }
    }
}

/// Calls `visit` on every lattice point whose image `delta_{1/r}` lies in
/// `a`, slice by slice over the first coordinate; slices run in parallel and
/// their results come back in coordinate order.
fn scan_region<T, F>(group: &Group, a: &Region, r: f64, cap: u128, visit: F) -> Result<Vec<T>, HaarError>
where
    T: Send + Default,
    F: Fn(&mut T, &[i64], bool) + Sync,
{
    check_scale(r)?;
    let b = a.resolve(group.weights())?;
    let rq = q_from_f64(r).ok_or(HaarError::BadScale(r))?;
    let ch = charts(group, b.system, rq);
    let window = enumeration_window(&ch.backward, &b);
    let size: u128 = window.iter().map(|(l, h)| (h - l + 1).max(0) as u128).product();
    if size > cap {
        return Err(HaarError::EnumerationCap { window: size, cap });
    }
    let mem = if rq.is_integer() {
        let polys = ch.forward.iter().map(Poly::to_int).collect::<Result<Vec<_>, _>>()?;
        let conv = |v: &[f64]| -> Result<Vec<Q>, HaarError> {
            v.iter().map(|&x| q_from_f64(x).ok_or_else(|| HaarError::BadRegion("corner out of range".into()))).collect()
        };
        Membership::Exact { polys, lo: conv(&b.lo)?, hi: conv(&b.hi)?, closed: b.closed }
    } else {
        Membership::Float { polys: ch.forward.iter().map(Poly::to_f64).collect(), lo: b.lo.clone(), hi: b.hi.clone() }
    };
    if size == 0 {
        return Ok(Vec::new());
    }
    let d = group.dim();
    let (first_lo, first_hi) = window[0];
    let rest = &window[1..];
    let per_slice = |x0: i64| -> Result<T, HaarError> {
        let mut out = T::default();
        let mut x = vec![0i64; d];
        x[0] = x0;
        for (i, (l, _)) in rest.iter().enumerate() {
            x[i + 1] = *l;
        }
        loop {
            if let Some(near) = mem.test(&x)? {
                visit(&mut out, &x, near);
            }
            let mut k = d - 1;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                if x[k] < rest[k - 1].1 {
                    x[k] += 1;
                    break;
                }
                x[k] = rest[k - 1].0;
                k -= 1;
            }
        }
    };
    (first_lo..=first_hi).into_par_iter().map(per_slice).collect()
}

/// `#(delta_{1/r}(Gamma) cap A)`. Exact rational membership when `r` is an
/// integer, doubles with a boundary tolerance otherwise.
pub fn haar_count(group: &Group, a: &Region, r: f64, cap: u128) -> Result<HaarCount, HaarError> {
    let parts = scan_region(group, a, r, cap, |c: &mut HaarCount, _, near| {
        c.count += 1;
        if near {
            c.ambiguous += 1;
        }
    })?;
    Ok(parts.into_iter().fold(HaarCount::default(), |a, b| HaarCount {
        count: a.count + b.count,
        ambiguous: a.ambiguous + b.ambiguous,
    }))
}

/// The lattice points counted by [`haar_count`], in lexicographic order.
pub fn region_points(group: &Group, a: &Region, r: f64, cap: u128) -> Result<Vec<LatticePoint>, HaarError> {
    let parts = scan_region(group, a, r, cap, |v: &mut Vec<LatticePoint>, x, _| v.push(LatticePoint(x.to_vec())))?;
    Ok(parts.into_iter().flatten().collect())
}

/// `#(delta_{1/r}(Gamma) cap A) / (c_S r^{d_Gamma})`.
pub fn haar_ratio(group: &Group, c_s: f64, a: &Region, r: f64) -> Result<f64, HaarError> {
    if !(c_s.is_finite() && c_s > 0.0) {
        return Err(HaarError::BadScale(c_s));
    }
    let c = haar_count(group, a, r, DEFAULT_WINDOW_CAP)?;
    Ok(c.count as f64 / (c_s * r.powi(group.spec().growth_degree as i32)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub r: f64,
    pub count: u64,
    pub ambiguous: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub rows: Vec<RatioRow>,
    pub extrapolated_limit: f64,
    pub reference_value: f64,
    pub reference_note: String,
}

impl MeasureEstimate {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,count,ratio\n");
        for row in &self.rows {
            s.push_str(&format!("{},{},{}\n", row.r, row.count, row.ratio));
        }
        s
    }

    pub fn summary_json(&self) -> String {
        serde_json::json!({
            "extrapolated_limit": self.extrapolated_limit,
            "reference_value": self.reference_value,
            "reference_note": self.reference_note,
            "rows": self.rows.len(),
        })
        .to_string()
    }

    /// Successive differences shrink in absolute value.
    pub fn is_cauchy_trending(&self) -> bool {
        let d: Vec<f64> = self.rows.windows(2).map(|w| (w[1].ratio - w[0].ratio).abs()).collect();
        d.windows(2).all(|w| w[1] < w[0])
    }
}

/// Fits `L + a/r + b/r^2` through the last three points and returns `L`;
/// with fewer points, the last ratio.
pub fn richardson(points: &[(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return points.last().map_or(f64::NAN, |p| p.1);
    }
    let p = &points[points.len() - 3..];
    let m = Matrix3::from_fn(|i, j| p[i].0.powi(-(j as i32)));
    let y = Vector3::new(p[0].1, p[1].1, p[2].1);
    match m.lu().solve(&y) {
        Some(s) => s[0],
        None => p[2].1,
    }
}

/// Haar-count ratios at each `r` plus an extrapolated limit.
pub fn measure_estimate(
    group: &Group,
    c_s: f64,
    a: &Region,
    radii: &[f64],
    reference_value: f64,
    reference_note: &str,
) -> Result<MeasureEstimate, HaarError> {
    let norm = |r: f64| c_s * r.powi(group.spec().growth_degree as i32);
    let mut rows = Vec::new();
    for &r in radii {
        let c = haar_count(group, a, r, DEFAULT_WINDOW_CAP)?;
        rows.push(RatioRow { r, count: c.count, ambiguous: c.ambiguous, ratio: c.count as f64 / norm(r) });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|row| (row.r, row.ratio)).collect();
    Ok(MeasureEstimate {
        extrapolated_limit: richardson(&pts),
        rows,
        reference_value,
        reference_note: reference_note.to_string(),
    })
}

/// `|det J(Psi^{-1} o exp)(0)|` by central differences with step `1e-6`.
pub fn jacobian_volume_factor(group: &Group) -> f64 {
    let d = group.dim();
    let h = 1e-6;
    let sec = |v: &[f64]| group.to_second_kind_f64(v, Structure::Original).expect("dimension matches");
    let mut j = DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let mut p = vec![0.0; d];
        let mut m = vec![0.0; d];
        p[k] = h;
        m[k] = -h;
        let (fp, fm) = (sec(&p), sec(&m));
        for i in 0..d {
            j[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j.determinant().abs()
}

/// Sup-norm distance between `log F_r(x)` and `log Psi_inf(x)`.
pub fn rescaled_embedding_error(group: &Group, r: f64, x: &[f64]) -> Result<f64, HaarError> {
    let v = group.rescaled_embedding(r, x)?;
    let lim = group.to_exponential_f64(Structure::Graded, x)?;
    Ok(v.iter().zip(&lim).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Exact version of [`rescaled_embedding_error`] for rational inputs.
pub fn rescaled_embedding_error_q(group: &Group, r: Q, x: &[Q]) -> Result<Q, HaarError> {
    let v = group.rescaled_embedding_q(r, x)?;
    let lim = group.to_exponential_q(Structure::Graded, x)?;
    Ok(v.0.iter().zip(&lim.0).map(|(a, b)| (a - b).abs()).fold(Q::zero(), |m, e| if e > m { e } else { m }))
}
