use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::sample::{candidate_pairs, Model, NeighborBall};
use super::stats::{family_independence, independence_test, FamilyResult, IndependenceTest, Table2};
use super::window::Window;
use crate::error::PercolationError;
use crate::group::{Group, GroupSpec, LatticePoint, Structure};
use crate::haar::{region_points, Region};
use crate::interval::Interval;
use crate::rng::{derive_seed, uniform};
use crate::union_find::UnionFind;

/// Significance level of the independence tests.
pub const INDEPENDENCE_LEVEL: f64 = 0.01;
const OVERLAP_NODE_CAP: usize = 200_000;

/// `2 + ceil(sum |C|)` over the main BCH table.
pub fn k_computed(spec: &GroupSpec) -> u32 {
    let mass = spec.main_coefficient_mass();
    2 + mass.ceil().to_integer() as u32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormConfig {
    pub n: u32,
    /// Linear-size threshold as a fraction of the box size `|P0|`.
    pub alpha: f64,
    pub k_computed: u32,
    pub lattice_extent: usize,
    pub samples_per_edge: usize,
}

impl RenormConfig {
    pub fn new(spec: &GroupSpec, n: u32, alpha: f64, lattice_extent: usize, samples_per_edge: usize) -> Self {
        RenormConfig { n, alpha, k_computed: k_computed(spec), lattice_extent, samples_per_edge }
    }

    pub fn validate(&self) -> Result<(), PercolationError> {
        let bad = |m: String| Err(PercolationError::InvalidParameters(m));
        if self.n < 1 {
            return bad("N must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.k_computed < 2 {
            return bad(format!("K must be at least 2, got {}", self.k_computed));
        }
        if self.lattice_extent < 2 {
            return bad("lattice extent must be at least 2".into());
        }
        if self.samples_per_edge == 0 {
            return bad("need at least one sample per edge".into());
        }
        Ok(())
    }
}

/// Coordinates carrying `h1` (top weight) and `h2` (weight `s - 1`, or the
/// other axis of an abelian group).
pub fn translation_axes(group: &Group) -> Result<(usize, usize), PercolationError> {
    let w = group.weights();
    let d = w.len();
    let s = *w.iter().max().unwrap_or(&0);
    let top = (0..d).rev().find(|&i| w[i] == s).expect("nonempty weights");
    let second = if s >= 2 {
        (0..d).rev().find(|&i| w[i] == s - 1)
    } else {
        (0..d).rev().find(|&i| i != top)
    };
    match second {
        Some(j) => Ok((top, j)),
        None => Err(PercolationError::InvalidParameters("renormalization needs dimension at least 2".into())),
    }
}

/// `log(h1^a h2^b)` at scale `scale` (1 for the limit group, `r` on the
/// lattice): `2 (scale N)^{w_i}` along each translation axis.
fn translation_log(group: &Group, n: f64, scale: f64, offset: (i64, i64)) -> Result<Vec<f64>, PercolationError> {
    let (i, j) = translation_axes(group)?;
    let w = group.weights();
    let mut v = vec![0.0; group.dim()];
    v[i] += offset.0 as f64 * 2.0 * (scale * n).powi(w[i] as i32);
    v[j] += offset.1 as f64 * 2.0 * (scale * n).powi(w[j] as i32);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OverlapStatus {
    Disjoint,
    Intersects { witness: Vec<f64> },
    /// Branch-and-bound hit its node cap; treated as an overlap.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapCheck {
    pub structure: Structure,
    pub offset: (i64, i64),
    pub status: OverlapStatus,
    pub nodes: usize,
}

/// Decides whether `exp(Box(N))` meets its translate by `h1^a h2^b`, i.e.
/// whether some `y` in the box has `log h . y` in the box, by interval
/// branch and bound over the closed box.
pub fn translate_overlap(
    group: &Group,
    n: f64,
    structure: Structure,
    offset: (i64, i64),
    node_cap: usize,
) -> Result<OverlapCheck, PercolationError> {
    let d = group.dim();
    let hi: Vec<f64> = group.weights().iter().map(|&w| n.powi(w as i32)).collect();
    let a = translation_log(group, n, 1.0, offset)?;
    let polys: Vec<_> = (0..d).map(|i| group.bch_polynomial(structure, i)).collect();
    let inside_open = |v: f64, i: usize| v > -hi[i] && v < hi[i];
    let mut stack: Vec<Vec<Interval>> = vec![hi.iter().map(|&h| Interval::new(-h, h)).collect()];
    let mut nodes = 0;
    let mut args: Vec<Interval> = a.iter().map(|&x| Interval::point(x)).collect();
    args.extend(std::iter::repeat(Interval::point(0.0)).take(d));
    let mut pt = a.clone();
    pt.extend(std::iter::repeat(0.0).take(d));
    let status = loop {
        let Some(b) = stack.pop() else { break OverlapStatus::Disjoint };
        nodes += 1;
        if nodes > node_cap {
            break OverlapStatus::Undetermined;
        }
        args[d..].copy_from_slice(&b);
        let excluded = polys.iter().enumerate().any(|(i, p)| {
            let img = p.eval_interval(&args);
            img.hi <= -hi[i] || img.lo >= hi[i]
        });
        if excluded {
            continue;
        }
        for (k, iv) in b.iter().enumerate() {
            pt[d + k] = iv.mid();
        }
        let y_in = (0..d).all(|k| inside_open(pt[d + k], k));
        if y_in && polys.iter().enumerate().all(|(i, p)| inside_open(p.eval_f64(&pt), i)) {
            break OverlapStatus::Intersects { witness: pt[d..].to_vec() };
        }
        // split the widest side relative to its weight scale
        let k = (0..d)
            .max_by(|&x, &y| (b[x].width() / hi[x]).total_cmp(&(b[y].width() / hi[y])))
            .expect("nonempty");
        let (l, r) = b[k].bisect();
        let mut bl = b.clone();
        bl[k] = l;
        let mut br = b;
        br[k] = r;
        stack.push(bl);
        stack.push(br);
    };
    Ok(OverlapCheck { structure, offset, status, nodes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub n: f64,
    pub k: u32,
    pub checks: Vec<OverlapCheck>,
}

impl OverlapReport {
    /// True when some translate beyond distance `K` was not certified
    /// disjoint.
    pub fn fired(&self) -> bool {
        self.checks.iter().any(|c| c.status != OverlapStatus::Disjoint)
    }
}

/// Checks every offset with `K < |a| + |b| <= K + 3` under both structures.
pub fn overlap_check(group: &Group, n: f64, k: u32) -> Result<OverlapReport, PercolationError> {
    let k_i = k as i64;
    let mut offsets = Vec::new();
    for a in -(k_i + 3)..=(k_i + 3) {
        for b in -(k_i + 3)..=(k_i + 3) {
            let dist = a.abs() + b.abs();
            if dist > k_i && dist <= k_i + 3 {
                offsets.push((a, b));
            }
        }
    }
    let checks = [Structure::Original, Structure::Graded]
        .iter()
        .flat_map(|&s| offsets.iter().map(move |&o| (s, o)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(s, o)| translate_overlap(group, n, s, o, OVERLAP_NODE_CAP))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OverlapReport { n, k, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeEdge {
    pub n: usize,
    pub m: usize,
    /// 0: towards `(n + 1, m)`, 1: towards `(n, m + 1)`.
    pub dir: u8,
}

impl LatticeEdge {
    pub fn endpoints(&self) -> ((usize, usize), (usize, usize)) {
        let b = if self.dir == 0 { (self.n + 1, self.m) } else { (self.n, self.m + 1) };
        ((self.n, self.m), b)
    }

    /// Smallest `l^1` distance between endpoints.
    pub fn distance(&self, other: &LatticeEdge) -> u32 {
        let (a0, a1) = self.endpoints();
        let (b0, b1) = other.endpoints();
        let l1 = |p: (usize, usize), q: (usize, usize)| (p.0.abs_diff(q.0) + p.1.abs_diff(q.1)) as u32;
        [l1(a0, b0), l1(a0, b1), l1(a1, b0), l1(a1, b1)].into_iter().min().expect("four values")
    }
}

/// All edges of the `extent x extent` vertex grid, in `(n, m, dir)` order.
pub fn lattice_edges(extent: usize) -> Vec<LatticeEdge> {
    let mut out = Vec::new();
    for n in 0..extent {
        for m in 0..extent {
            for dir in 0..2u8 {
                let ok = if dir == 0 { n + 1 < extent } else { m + 1 < extent };
                if ok {
                    out.push(LatticeEdge { n, m, dir });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeGrid {
    pub extent: usize,
    pub edges: Vec<LatticeEdge>,
    pub open: Vec<bool>,
}

impl EdgeGrid {
    pub fn open_fraction(&self) -> f64 {
        if self.open.is_empty() {
            return 0.0;
        }
        self.open.iter().filter(|&&x| x).count() as f64 / self.open.len() as f64
    }

    /// Portable text form: four header lines, then `n m dir 0|1` per edge.
    pub fn to_grid_file(&self, k: u32, n: u32, alpha: f64) -> String {
        let mut s = format!("# extent {}\n# K {k}\n# N {n}\n# alpha {alpha}\n", self.extent);
        for (e, &o) in self.edges.iter().zip(&self.open) {
            s.push_str(&format!("{} {} {} {}\n", e.n, e.m, e.dir, o as u8));
        }
        s
    }

    pub fn from_grid_file(text: &str) -> Result<EdgeGrid, PercolationError> {
        let bad = |m: String| PercolationError::InvalidParameters(format!("grid file: {m}"));
        let mut extent = None;
        let mut states = FxHashMap::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let mut it = h.split_whitespace();
                if it.next() == Some("extent") {
                    let v = it.next().ok_or_else(|| bad("empty extent".into()))?;
                    extent = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?);
                }
                continue;
            }
            let f: Vec<usize> = line
                .split_whitespace()
                .map(|x| x.parse::<usize>().map_err(|e| bad(format!("{line:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            if f.len() != 4 || f[2] > 1 || f[3] > 1 {
                return Err(bad(format!("malformed line {line:?}")));
            }
            states.insert(LatticeEdge { n: f[0], m: f[1], dir: f[2] as u8 }, f[3] == 1);
        }
        let extent = extent.ok_or_else(|| bad("missing extent header".into()))?;
        let edges = lattice_edges(extent);
        let open = edges
            .iter()
            .map(|e| states.get(e).copied().ok_or_else(|| bad(format!("missing edge {e:?}"))))
            .collect::<Result<_, _>>()?;
        Ok(EdgeGrid { extent, edges, open })
    }
}

/// Independent edges open with probability `p`.
pub fn iid_edge_grid(extent: usize, p: f64, seed: u64) -> EdgeGrid {
    let edges = lattice_edges(extent);
    let open = edges
        .iter()
        .map(|e| uniform(seed, (e.n * extent + e.m) as u64, e.dir as u64) < p)
        .collect();
    EdgeGrid { extent, edges, open }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LssReport {
    pub p_open: f64,
    pub p_threshold: f64,
    pub k: u32,
    pub meets_threshold: bool,
    pub largest_cluster_edges: u64,
    pub largest_cluster_fraction: f64,
    /// An open cluster touches both the `n = 0` and `n = extent - 1` columns.
    pub crossing: bool,
}

pub fn lss_threshold_check(grid: &EdgeGrid, k: u32, p_threshold: f64) -> LssReport {
    let e = grid.extent;
    let mut uf = UnionFind::new(e * e);
    let id = |p: (usize, usize)| (p.0 * e + p.1) as u32;
    for (edge, &o) in grid.edges.iter().zip(&grid.open) {
        if o {
            let (a, b) = edge.endpoints();
            uf.union(id(a), id(b));
        }
    }
    let largest = uf.components().iter().map(|c| c.1).max().unwrap_or(0);
    let mut left = std::collections::HashSet::new();
    for m in 0..e {
        left.insert(uf.find(id((0, m))));
    }
    let crossing = e > 1
        && (0..e).any(|m| {
            let r = uf.find(id((e - 1, m)));
            left.contains(&r) && uf.component_size(r) > 1
        });
    let p_open = grid.open_fraction();
    LssReport {
        p_open,
        p_threshold,
        k,
        meets_threshold: p_open >= p_threshold,
        largest_cluster_edges: largest,
        largest_cluster_fraction: largest as f64 / grid.edges.len().max(1) as f64,
        crossing,
    }
}

/// The unscaled boxes `t(n, m) . P0` on the lattice, one per vertex of the
/// extent grid, sharing a window.
#[derive(Clone, Debug)]
pub struct BoxLattice {
    pub extent: usize,
    pub p0_size: usize,
    pub window: Window,
    /// Window indices of each box, boxes in `n * extent + m` order.
    pub boxes: Vec<Vec<u32>>,
}

impl BoxLattice {
    pub fn build(group: &Group, n: u32, r: usize, extent: usize, cap: usize) -> Result<BoxLattice, PercolationError> {
        let p0 = region_points(group, &Region::HalfScaledBox { n: n as f64 }, r as f64, cap as u128)?;
        let total = p0.len().saturating_mul(extent * extent);
        if total > cap {
            return Err(PercolationError::WindowTooLarge(total));
        }
        let (i, j) = translation_axes(group)?;
        let w = group.weights();
        let step = |axis: usize| -> Result<LatticePoint, PercolationError> {
            let c = 2.0 * ((r as f64) * n as f64).powi(w[axis] as i32);
            Ok(group.exp_axis(axis, c)?)
        };
        let (t1, t2) = (step(i)?, step(j)?);
        let mut index: FxHashMap<LatticePoint, u32> = FxHashMap::default();
        let mut pts = Vec::new();
        let mut boxes = Vec::with_capacity(extent * extent);
        let mut row = group.identity();
        for _ in 0..extent {
            let mut t = row.clone();
            for _ in 0..extent {
                let mut ids = Vec::with_capacity(p0.len());
                for p in &p0 {
                    let x = group.multiply(&t, p)?;
                    let id = *index.entry(x.clone()).or_insert_with(|| {
                        pts.push(x);
                        (pts.len() - 1) as u32
                    });
                    ids.push(id);
                }
                boxes.push(ids);
                t = group.multiply(&t2, &t)?;
            }
            row = group.multiply(&t1, &row)?;
        }
        let window = Window::from_points(group, pts)?;
        Ok(BoxLattice { extent, p0_size: p0.len(), window, boxes })
    }

    fn box_id(&self, v: (usize, usize)) -> usize {
        v.0 * self.extent + v.1
    }
}

/// Top two component sizes of the subgraph induced on `verts`.
fn top_two_induced(verts: &[u32], adj: &Csr, local: &mut [u32]) -> (u64, u64) {
    for (k, &v) in verts.iter().enumerate() {
        local[v as usize] = k as u32;
    }
    let mut uf = UnionFind::new(verts.len());
    for (k, &v) in verts.iter().enumerate() {
        for &u in adj.neighbors(v) {
            let lu = local[u as usize];
            if lu != u32::MAX && lu as usize != k {
                uf.union(k as u32, lu);
            }
        }
    }
    for &v in verts {
        local[v as usize] = u32::MAX;
    }
    let mut sizes: Vec<u64> = uf.components().iter().map(|c| c.0 as u64).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    (sizes.first().copied().unwrap_or(0), sizes.get(1).copied().unwrap_or(0))
}

struct Csr {
    start: Vec<u32>,
    nbrs: Vec<u32>,
}

impl Csr {
    fn new(n: usize, edges: &[(u32, u32, f64)]) -> Csr {
        let mut deg = vec![0u32; n + 1];
        for &(u, v, _) in edges {
            deg[u as usize + 1] += 1;
            deg[v as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut fill = deg.clone();
        let mut nbrs = vec![0u32; deg[n] as usize];
        for &(u, v, _) in edges {
            nbrs[fill[u as usize] as usize] = v;
            fill[u as usize] += 1;
            nbrs[fill[v as usize] as usize] = u;
            fill[v as usize] += 1;
        }
        Csr { start: deg, nbrs }
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        &self.nbrs[self.start[v as usize] as usize..self.start[v as usize + 1] as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub e: LatticeEdge,
    pub f: LatticeEdge,
    pub distance: u32,
    pub table: Table2,
    pub correlation: f64,
    pub test: IndependenceTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormSummary {
    pub r: usize,
    pub lambda: f64,
    pub n: u32,
    pub alpha: f64,
    pub k: u32,
    pub p0_size: usize,
    pub edge_probability: f64,
    pub samples: usize,
    /// Pooled empirical `P(X(e))` over edges and samples.
    pub p_open: f64,
    pub per_edge_p: Vec<f64>,
    /// Mean `C1(box) / |P0|` over boxes and samples.
    pub box_giant_fraction: f64,
    pub pairs: Vec<PairTest>,
    pub family: FamilyResult,
    pub max_abs_correlation: f64,
    pub overlap: OverlapReport,
}

#[derive(Clone, Debug)]
pub struct RenormResult {
    pub grids: Vec<EdgeGrid>,
    pub summary: RenormSummary,
}

/// Disjoint pairs of lattice edges at distance greater than `k`, matched
/// greedily in edge order.
pub fn far_edge_pairs(edges: &[LatticeEdge], k: u32) -> Vec<(usize, usize)> {
    let mut used = vec![false; edges.len()];
    let mut out = Vec::new();
    for a in 0..edges.len() {
        if used[a] {
            continue;
        }
        if let Some(b) = (a + 1..edges.len()).find(|&b| !used[b] && edges[a].distance(&edges[b]) > k) {
            used[a] = true;
            used[b] = true;
            out.push((a, b));
        }
    }
    out
}

/// Samples the `CCProxy` model on the box lattice once per sample seed and
/// evaluates `X(e)` for every lattice edge: both boxes carry a cluster of at
/// least `alpha |P0|` vertices and the union has no second such cluster.
#[allow(clippy::too_many_arguments)]
pub fn renormalize(
    group: &Group,
    config: &RenormConfig,
    ball: &NeighborBall,
    c_s: f64,
    lambda: f64,
    seed: u64,
    cap: usize,
) -> Result<RenormResult, PercolationError> {
    config.validate()?;
    let overlap = overlap_check(group, config.n as f64, config.k_computed)?;
    if let Some(c) = overlap.checks.iter().find(|c| c.status != OverlapStatus::Disjoint) {
        return Err(PercolationError::OverlapViolation {
            distance: (c.offset.0.abs() + c.offset.1.abs()) as u32,
            k: config.k_computed,
            detail: format!("{:?} at offset {:?}: {:?}", c.structure, c.offset, c.status),
        });
    }
    let r = ball.r;
    let model = Model::CCProxy { r, lambda, c_s };
    let p = model.edge_probability(group, ball)?;
    let lat = BoxLattice::build(group, config.n, r, config.lattice_extent, cap)?;
    let edges = lattice_edges(config.lattice_extent);
    let threshold = config.alpha * lat.p0_size as f64;

    let per_sample = |s: usize| -> Result<(EdgeGrid, f64), PercolationError> {
        let sd = derive_seed(seed, s as u64);
        let pairs = candidate_pairs(&lat.window, ball, sd, p)?;
        let adj = Csr::new(lat.window.len(), &pairs);
        let mut local = vec![u32::MAX; lat.window.len()];
        let c1: Vec<u64> = lat.boxes.iter().map(|b| top_two_induced(b, &adj, &mut local).0).collect();
        let mut open = Vec::with_capacity(edges.len());
        let mut union = Vec::new();
        for e in &edges {
            let (a, b) = e.endpoints();
            let (ia, ib) = (lat.box_id(a), lat.box_id(b));
            let x = if c1[ia] as f64 >= threshold && c1[ib] as f64 >= threshold {
                union.clear();
                union.extend_from_slice(&lat.boxes[ia]);
                union.extend_from_slice(&lat.boxes[ib]);
                union.sort_unstable();
                union.dedup();
                let (_, c2) = top_two_induced(&union, &adj, &mut local);
                (c2 as f64) < threshold
            } else {
                false
            };
            open.push(x);
        }
        let gf = c1.iter().map(|&c| c as f64).sum::<f64>() / (c1.len() as f64 * lat.p0_size.max(1) as f64);
        Ok((EdgeGrid { extent: config.lattice_extent, edges: edges.clone(), open }, gf))
    };
    let results = (0..config.samples_per_edge)
        .into_par_iter()
        .map(per_sample)
        .collect::<Result<Vec<_>, _>>()?;
    let samples = results.len();
    let box_giant_fraction = results.iter().map(|x| x.1).sum::<f64>() / samples as f64;
    let grids: Vec<EdgeGrid> = results.into_iter().map(|x| x.0).collect();

    let per_edge_p: Vec<f64> = (0..edges.len())
        .map(|i| grids.iter().filter(|g| g.open[i]).count() as f64 / samples as f64)
        .collect();
    let p_open = per_edge_p.iter().sum::<f64>() / per_edge_p.len().max(1) as f64;
    let pairs: Vec<PairTest> = far_edge_pairs(&edges, config.k_computed)
        .into_iter()
        .map(|(a, b)| {
            let xa: Vec<bool> = grids.iter().map(|g| g.open[a]).collect();
            let xb: Vec<bool> = grids.iter().map(|g| g.open[b]).collect();
            let table = Table2::from_pairs(&xa, &xb);
            PairTest {
                e: edges[a],
                f: edges[b],
                distance: edges[a].distance(&edges[b]),
                table,
                correlation: table.correlation(),
                test: independence_test(&table),
            }
        })
        .collect();
    let family = family_independence(&pairs.iter().map(|t| t.test.p_value).collect::<Vec<_>>(), INDEPENDENCE_LEVEL);
    let max_abs_correlation = pairs.iter().map(|t| t.correlation.abs()).fold(0.0, f64::max);
    Ok(RenormResult {
        grids,
        summary: RenormSummary {
            r,
            lambda,
            n: config.n,
            alpha: config.alpha,
            k: config.k_computed,
            p0_size: lat.p0_size,
            edge_probability: p,
            samples,
            p_open,
            per_edge_p,
            box_giant_fraction,
            pairs,
            family,
            max_abs_correlation,
            overlap,
        },
    })
}
