//! Word-metric geometry of Cayley graphs: balls, growth, shells, and the
//! subgroup/coset inclusions used by the coupling arguments.

use std::fmt::Write as _;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::MetricError;
use crate::group::{Group, LatticePoint};

pub const DEFAULT_POINT_CAP: usize = 50_000_000;

/// Ball sizes `beta(n)` for `n = 0..=r_max`, optionally with every element
/// and its word length.
#[derive(Clone, Debug)]
pub struct BallTable {
    pub r_max: usize,
    pub counts: Vec<u64>,
    pub elements: Option<FxHashMap<LatticePoint, u32>>,
}

impl BallTable {
    pub fn beta(&self, n: usize) -> Option<u64> {
        self.counts.get(n).copied()
    }

    pub fn word_length(&self, g: &LatticePoint) -> Result<u32, MetricError> {
        let el = self.elements.as_ref().ok_or(MetricError::NotMaterialized)?;
        el.get(g).copied().ok_or_else(|| MetricError::OutsideBall(g.0.clone()))
    }

    /// Elements of word length at most `n`, sorted by (length, coordinates).
    pub fn points_within(&self, n: u32) -> Result<Vec<(LatticePoint, u32)>, MetricError> {
        let el = self.elements.as_ref().ok_or(MetricError::NotMaterialized)?;
        let mut v: Vec<(LatticePoint, u32)> =
            el.iter().filter(|(_, &l)| l <= n).map(|(p, &l)| (p.clone(), l)).collect();
        v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(v)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,beta_n\n");
        for (n, c) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{n},{c}");
        }
        s
    }
}

/// Breadth-first search from `center` along right multiplication by the
/// generators. Fails rather than truncating once more than `cap` points are
/// discovered.
pub fn enumerate_ball_from(
    group: &Group,
    center: &LatticePoint,
    r: usize,
    materialize: bool,
    cap: usize,
) -> Result<BallTable, MetricError> {
    let gens: Vec<LatticePoint> =
        group.spec().generators.iter().filter(|g| !g.is_identity()).cloned().collect();
    if group.spec().generators.is_empty() {
        return Err(MetricError::NoGenerators);
    }
    let mut seen: FxHashMap<LatticePoint, u32> = FxHashMap::default();
    seen.insert(center.clone(), 0);
    let mut frontier = vec![center.clone()];
    let mut counts = vec![1u64];
    for n in 1..=r {
        let next: Vec<LatticePoint> = frontier
            .par_iter()
            .map(|u| gens.iter().map(|s| group.multiply(u, s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut fresh = Vec::new();
        for v in next {
            if !seen.contains_key(&v) {
                seen.insert(v.clone(), n as u32);
                fresh.push(v);
                if seen.len() > cap {
                    return Err(MetricError::ResourceCap { cap });
                }
            }
        }
        counts.push(counts[n - 1] + fresh.len() as u64);
        frontier = fresh;
    }
    Ok(BallTable { r_max: r, counts, elements: materialize.then_some(seen) })
}

pub fn enumerate_ball(group: &Group, r: usize, materialize: bool, cap: usize) -> Result<BallTable, MetricError> {
    enumerate_ball_from(group, &group.identity(), r, materialize, cap)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GrowthFit {
    pub fitted_degree: u32,
    pub slope: f64,
    pub c_s: f64,
    /// `(n, beta(n) / (c_S n^d) - 1)` for `n >= 1`.
    pub residuals: Vec<(usize, f64)>,
}

impl GrowthFit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fit serializes")
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

/// Degree from the log-log slope over the top half of radii, `c_S` as the
/// mean of `beta(n)/n^d` over the top quarter.
pub fn fit_growth(table: &BallTable) -> Result<GrowthFit, MetricError> {
    let r = table.r_max;
    if r < 8 {
        return Err(MetricError::TableTooSmall { need: 8, have: r });
    }
    if table.counts[r] == table.counts[r / 2] {
        return Err(MetricError::Degenerate);
    }
    let half: Vec<usize> = (r / 2..=r).collect();
    let xs: Vec<f64> = half.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = half.iter().map(|&n| (table.counts[n] as f64).ln()).collect();
    let (slope, _) = ls_slope(&xs, &ys);
    let degree = slope.round().max(1.0) as u32;
    let quarter: Vec<usize> = (r - r / 4..=r).collect();
    let c_s = quarter.iter().map(|&n| table.counts[n] as f64 / (n as f64).powi(degree as i32)).sum::<f64>()
        / quarter.len() as f64;
    let residuals = (1..=r)
        .map(|n| (n, table.counts[n] as f64 / (c_s * (n as f64).powi(degree as i32)) - 1.0))
        .collect();
    Ok(GrowthFit { fitted_degree: degree, slope, c_s, residuals })
}

/// `(n, |B(n+1) \ B(n)| / beta(n))` for `n < r_max`.
pub fn shell_profile(table: &BallTable) -> Result<Vec<(usize, f64)>, MetricError> {
    if table.r_max < 4 {
        return Err(MetricError::TableTooSmall { need: 4, have: table.r_max });
    }
    Ok((0..table.r_max)
        .map(|n| (n, (table.counts[n + 1] - table.counts[n]) as f64 / table.counts[n] as f64))
        .collect())
}

/// Power-law envelope `C n^{-delta}` for a shell profile: `delta` from the
/// log-log slope over `n >= from`, `C` the smallest constant dominating every
/// ratio there.
pub fn fit_shell_decay(profile: &[(usize, f64)], from: usize) -> (f64, f64) {
    let pts: Vec<(f64, f64)> =
        profile.iter().filter(|(n, q)| *n >= from.max(1) && *q > 0.0).map(|&(n, q)| (n as f64, q)).collect();
    if pts.len() < 2 {
        return (f64::INFINITY, 0.0);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let delta = -ls_slope(&xs, &ys).0;
    let c = pts.iter().map(|(n, q)| q * n.powf(delta)).fold(0.0, f64::max);
    (c, delta)
}

/// Word length as a stand-in for the Carnot-Caratheodory distance to the
/// identity. The two differ by `O(d^{alpha_s})`; no numeric bound is claimed.
pub fn cc_distance_proxy(table: &BallTable, g: &LatticePoint) -> Result<u32, MetricError> {
    table.word_length(g)
}

/// The part of a subgroup `H = <gens>` that can be reached from the identity
/// through words in `gens` staying inside a materialized ball. Membership
/// answers are exact for "yes" and only window-certified for "no".
#[derive(Clone, Debug)]
pub struct SubgroupWindow {
    pub radius: usize,
    pub members: FxHashSet<LatticePoint>,
}

impl SubgroupWindow {
    pub fn new(group: &Group, h_gens: &[LatticePoint], ambient: &BallTable) -> Result<Self, MetricError> {
        let el = ambient.elements.as_ref().ok_or(MetricError::NotMaterialized)?;
        let mut gens: Vec<LatticePoint> = Vec::new();
        for h in h_gens {
            if h.dim() != group.dim() {
                return Err(MetricError::InvalidParameters(format!("subgroup generator {:?} has wrong dimension", h.0)));
            }
            gens.push(h.clone());
            gens.push(group.inverse(h)?);
        }
        let id = group.identity();
        let mut members = FxHashSet::default();
        members.insert(id.clone());
        let mut stack = vec![id];
        while let Some(u) = stack.pop() {
            for h in &gens {
                let v = group.multiply(&u, h)?;
                if el.contains_key(&v) && members.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
        Ok(SubgroupWindow { radius: ambient.r_max, members })
    }

    pub fn contains(&self, g: &LatticePoint) -> bool {
        self.members.contains(g)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InclusionReport {
    pub holds: bool,
    pub ball_radius: usize,
    pub ball_size: usize,
    pub product_size: usize,
    /// A ball element outside `(H cap S^m)^r X`, when the inclusion fails.
    pub witness: Option<Vec<i64>>,
    /// `|S^{r(m-2k)}| <= [G:H] |(H cap S^m)^r|`, when the index is supplied.
    pub index_bound_holds: Option<bool>,
}

fn check_transversal(
    group: &Group,
    h: &SubgroupWindow,
    x: &[LatticePoint],
    ball: &[LatticePoint],
) -> Result<(), MetricError> {
    let x_inv: Vec<LatticePoint> = x.iter().map(|p| group.inverse(p)).collect::<Result<_, _>>()?;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if h.contains(&group.multiply(&x[i], &x_inv[j])?) {
                return Err(MetricError::NotTransversal(format!(
                    "{:?} and {:?} lie in the same coset",
                    x[i].0, x[j].0
                )));
            }
        }
    }
    for g in ball {
        let mut hit = false;
        for xi in &x_inv {
            if h.contains(&group.multiply(g, xi)?) {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(MetricError::NotTransversal(format!("{:?} lies in no coset H x", g.0)));
        }
    }
    Ok(())
}

/// Checks `S^{r(m-2k)} subset (H cap S^m)^r X` by exhaustive enumeration.
#[allow(clippy::too_many_arguments)]
pub fn coset_ball_inclusion_check(
    group: &Group,
    h_gens: &[LatticePoint],
    x: &[LatticePoint],
    k: usize,
    m: usize,
    r: usize,
    index: Option<u64>,
    cap: usize,
) -> Result<InclusionReport, MetricError> {
    if m <= 2 * k {
        return Err(MetricError::InvalidParameters(format!("need m > 2k, got m = {m}, k = {k}")));
    }
    if x.is_empty() {
        return Err(MetricError::InvalidParameters("empty representative set".into()));
    }
    let target = r * (m - 2 * k);
    let slack = 2 * m + 2 * k;
    let ambient = enumerate_ball(group, (r * m).max(target + k) + slack, true, cap)?;
    let hw = SubgroupWindow::new(group, h_gens, &ambient)?;
    for p in x {
        if ambient.word_length(p)? as usize > k {
            return Err(MetricError::NotTransversal(format!("{:?} is not in S^{k}", p.0)));
        }
    }
    let ball: Vec<LatticePoint> = ambient.points_within(target as u32)?.into_iter().map(|p| p.0).collect();
    check_transversal(group, &hw, x, &ball)?;

    let h_m: Vec<LatticePoint> =
        ambient.points_within(m as u32)?.into_iter().map(|p| p.0).filter(|p| hw.contains(p)).collect();
    let mut prod: FxHashSet<LatticePoint> = FxHashSet::default();
    prod.insert(group.identity());
    for _ in 0..r {
        let mut next = FxHashSet::default();
        for a in &prod {
            for b in &h_m {
                next.insert(group.multiply(a, b)?);
                if next.len() > cap {
                    return Err(MetricError::ResourceCap { cap });
                }
            }
        }
        prod = next;
    }
    let mut covered: FxHashSet<LatticePoint> = FxHashSet::default();
    for a in &prod {
        for xi in x {
            covered.insert(group.multiply(a, xi)?);
        }
    }
    let witness = ball.iter().find(|g| !covered.contains(*g)).map(|g| g.0.clone());
    Ok(InclusionReport {
        holds: witness.is_none(),
        ball_radius: target,
        ball_size: ball.len(),
        product_size: prod.len(),
        witness,
        index_bound_holds: index.map(|i| ball.len() as u64 <= i * prod.len() as u64),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrbitReport {
    pub k: usize,
    pub orbits_met: usize,
    pub holds: bool,
    /// One representative per orbit met, in (length, coordinates) order.
    pub representatives: Vec<Vec<i64>>,
}

fn orbits_in_ball(
    group: &Group,
    hw: &SubgroupWindow,
    pts: &[LatticePoint],
) -> Result<Vec<LatticePoint>, MetricError> {
    let mut reps: Vec<LatticePoint> = Vec::new();
    let mut rep_inv: Vec<LatticePoint> = Vec::new();
    for g in pts {
        let mut new = true;
        for ri in &rep_inv {
            if hw.contains(&group.multiply(g, ri)?) {
                new = false;
                break;
            }
        }
        if new {
            rep_inv.push(group.inverse(g)?);
            reps.push(g.clone());
        }
    }
    Ok(reps)
}

/// Counts the orbits of `H` (acting by left multiplication) that meet the
/// ball `S^{k-1}(o)`. The count is recomputed on a larger ambient ball; if
/// the two disagree the window could not certify distinctness.
pub fn orbit_count_check(
    group: &Group,
    h_gens: &[LatticePoint],
    k: usize,
    cap: usize,
) -> Result<OrbitReport, MetricError> {
    if k == 0 {
        return Err(MetricError::InvalidParameters("k must be positive".into()));
    }
    let inner = k - 1;
    let mut last: Option<Vec<LatticePoint>> = None;
    for slack in [2 * k + 2, 4 * k + 4] {
        let ambient = enumerate_ball(group, 2 * inner + slack, true, cap)?;
        let hw = SubgroupWindow::new(group, h_gens, &ambient)?;
        let pts: Vec<LatticePoint> = ambient.points_within(inner as u32)?.into_iter().map(|p| p.0).collect();
        let reps = orbits_in_ball(group, &hw, &pts)?;
        if let Some(prev) = &last {
            if prev.len() != reps.len() {
                return Err(MetricError::BallTooSmall(format!(
                    "orbit count changed from {} to {} when enlarging the ambient ball",
                    prev.len(),
                    reps.len()
                )));
            }
        }
        last = Some(reps);
    }
    let reps = last.expect("loop ran");
    Ok(OrbitReport {
        k,
        orbits_met: reps.len(),
        holds: reps.len() >= k,
        representatives: reps.into_iter().map(|p| p.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{builtin_spec, Builtin};

    fn group(b: Builtin) -> Group {
        Group::new(builtin_spec(&b).unwrap()).unwrap()
    }

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    #[test]
    fn z2_ball_is_l1_ball() {
        let g = group(Builtin::Zd(2));
        let t = enumerate_ball(&g, 3, true, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(t.counts, vec![1, 5, 13, 25]);
        assert_eq!(t.word_length(&lp(&[2, -1])).unwrap(), 3);
        assert_eq!(cc_distance_proxy(&t, &lp(&[0, 0])).unwrap(), 0);
    }

    #[test]
    fn radius_zero() {
        let g = group(Builtin::Heisenberg3);
        assert_eq!(enumerate_ball(&g, 0, false, 10).unwrap().counts, vec![1]);
    }

    #[test]
    fn cap_is_an_error() {
        let g = group(Builtin::Zd(3));
        assert_eq!(enumerate_ball(&g, 10, false, 100).unwrap_err(), MetricError::ResourceCap { cap: 100 });
    }

    #[test]
    fn commutator_word_length() {
        let g = group(Builtin::Heisenberg3);
        let t = enumerate_ball(&g, 6, true, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(cc_distance_proxy(&t, &lp(&[0, 0, 1])).unwrap(), 4);
        assert!(matches!(cc_distance_proxy(&t, &lp(&[0, 0, 100])), Err(MetricError::OutsideBall(_))));
        let unmat = enumerate_ball(&g, 2, false, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(cc_distance_proxy(&unmat, &lp(&[0, 0, 0])), Err(MetricError::NotMaterialized));
    }

    #[test]
    fn fit_rejects_short_or_flat_tables() {
        let t = BallTable { r_max: 5, counts: vec![1, 3, 5, 7, 9, 11], elements: None };
        assert!(matches!(fit_growth(&t), Err(MetricError::TableTooSmall { .. })));
        let flat = BallTable { r_max: 9, counts: vec![1; 10], elements: None };
        assert_eq!(fit_growth(&flat), Err(MetricError::Degenerate));
    }

    #[test]
    fn shell_profile_matches_closed_form_on_z2() {
        let g = group(Builtin::Zd(2));
        let t = enumerate_ball(&g, 12, false, DEFAULT_POINT_CAP).unwrap();
        for (n, q) in shell_profile(&t).unwrap() {
            let n = n as f64;
            assert!((q - (4.0 * n + 4.0) / (2.0 * n * n + 2.0 * n + 1.0)).abs() < 1e-12);
        }
        let short = BallTable { r_max: 3, counts: vec![1, 5, 13, 25], elements: None };
        assert!(shell_profile(&short).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = group(Builtin::Zd(1));
        let t = enumerate_ball(&g, 2, false, 100).unwrap();
        assert_eq!(t.to_csv(), "n,beta_n\n0,1\n1,3\n2,5\n");
    }

    #[test]
    fn transversal_errors() {
        let g = group(Builtin::Zd(2));
        let h = [lp(&[2, 0]), lp(&[0, 1])];
        let dup = coset_ball_inclusion_check(&g, &h, &[lp(&[0, 0]), lp(&[0, 1])], 1, 4, 1, None, DEFAULT_POINT_CAP);
        assert!(matches!(dup, Err(MetricError::NotTransversal(_))));
        let short = coset_ball_inclusion_check(&g, &h, &[lp(&[0, 0])], 1, 4, 1, None, DEFAULT_POINT_CAP);
        assert!(matches!(short, Err(MetricError::NotTransversal(_))));
        let bad_m = coset_ball_inclusion_check(&g, &h, &[lp(&[0, 0]), lp(&[1, 0])], 1, 2, 1, None, DEFAULT_POINT_CAP);
        assert!(matches!(bad_m, Err(MetricError::InvalidParameters(_))));
    }
}
