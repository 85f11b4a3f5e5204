//! Exploration couplings between percolation on a graph and on its quotient
//! by a group of automorphisms, and on a finite-index subgroup.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::cayley::{enumerate_ball, SubgroupWindow};
use crate::error::CouplingError;
use crate::group::{Group, LatticePoint};
use crate::rng::{combine, derive_seed, hash_coords, uniform};
use crate::union_find::UnionFind;

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    adj: Vec<Vec<u32>>,
}

impl FiniteGraph {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<FiniteGraph, CouplingError> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(CouplingError::InvalidParameters(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u != v {
                adj[u as usize].insert(v);
                adj[v as usize].insert(u);
            }
        }
        Ok(FiniteGraph { adj: adj.into_iter().map(|s| s.into_iter().collect()).collect() })
    }

    /// `{0..len} x {0, 1}` with rungs; vertex `(i, j)` is `2 i + j`.
    pub fn ladder(len: usize) -> FiniteGraph {
        let mut e = Vec::new();
        for i in 0..len as u32 {
            e.push((2 * i, 2 * i + 1));
            if i + 1 < len as u32 {
                e.push((2 * i, 2 * i + 2));
                e.push((2 * i + 1, 2 * i + 3));
            }
        }
        FiniteGraph::new(2 * len, &e).expect("valid ladder")
    }

    /// `w x h` square grid; vertex `(x, y)` is `x h + y`.
    pub fn grid(w: usize, h: usize) -> FiniteGraph {
        let id = |x: usize, y: usize| (x * h + y) as u32;
        let mut e = Vec::new();
        for x in 0..w {
            for y in 0..h {
                if x + 1 < w {
                    e.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < h {
                    e.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        FiniteGraph::new(w * h, &e).expect("valid grid")
    }

    /// Cayley graph of `group` restricted to `points`, with the standard
    /// generators.
    pub fn from_points(group: &Group, points: &[LatticePoint]) -> Result<FiniteGraph, CouplingError> {
        let index: FxHashMap<&LatticePoint, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let mut e = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for s in &group.spec().generators {
                if let Some(&j) = index.get(&group.multiply(p, s)?) {
                    e.push((i as u32, j));
                }
            }
        }
        FiniteGraph::new(points.len(), &e)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    /// BFS distances from `v`, `u32::MAX` when unreachable, truncated at
    /// `max_depth`.
    pub fn distances_from(&self, v: u32, max_depth: u32) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.len()];
        d[v as usize] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            let du = d[u as usize];
            if du == max_depth {
                continue;
            }
            for &w in self.neighbors(u) {
                if d[w as usize] == u32::MAX {
                    d[w as usize] = du + 1;
                    q.push_back(w);
                }
            }
        }
        d
    }

    /// Pairs `u < v` at distance `1..=r`.
    pub fn power_edges(&self, r: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.len() as u32 {
            let d = self.distances_from(u, r);
            for (v, &dv) in d.iter().enumerate() {
                if (v as u32) > u && dv >= 1 && dv <= r {
                    out.push((u, v as u32));
                }
            }
        }
        out
    }
}

/// A graph together with the orbits of a group of automorphisms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub graph: FiniteGraph,
    pub orbit_of: Vec<u32>,
    pub orbits: Vec<Vec<u32>>,
    pub k: usize,
    pub ell: u32,
    /// Orbits on the edge of the finite window; reaching one marks an
    /// exploration as exhausted.
    pub boundary: Vec<bool>,
}

impl QuotientSpec {
    /// Orbit ids must be `0..number of orbits`; every orbit must have the
    /// same size and finite diameter in the graph.
    pub fn new(graph: FiniteGraph, orbit_of: Vec<u32>, boundary: Vec<bool>) -> Result<QuotientSpec, CouplingError> {
        if orbit_of.len() != graph.len() {
            return Err(CouplingError::InvalidQuotient(format!(
                "orbit map has {} entries for {} vertices",
                orbit_of.len(),
                graph.len()
            )));
        }
        let n_orbits = orbit_of.iter().map(|&o| o as usize + 1).max().unwrap_or(0);
        let mut orbits = vec![Vec::new(); n_orbits];
        for (v, &o) in orbit_of.iter().enumerate() {
            orbits[o as usize].push(v as u32);
        }
        let k = orbits.first().map_or(0, Vec::len);
        if let Some((i, o)) = orbits.iter().enumerate().find(|(_, o)| o.len() != k) {
            return Err(CouplingError::InvalidQuotient(format!("orbit {i} has size {}, expected {k}", o.len())));
        }
        if boundary.len() != n_orbits {
            return Err(CouplingError::InvalidQuotient(format!(
                "boundary flags for {} orbits, have {n_orbits}",
                boundary.len()
            )));
        }
        let mut ell = 0;
        for (i, o) in orbits.iter().enumerate() {
            let d = graph.distances_from(o[0], u32::MAX);
            for &v in &o[1..] {
                if d[v as usize] == u32::MAX {
                    return Err(CouplingError::InvalidQuotient(format!("orbit {i} is not connected in the graph")));
                }
                ell = ell.max(d[v as usize]);
            }
        }
        Ok(QuotientSpec { graph, orbit_of, orbits, k, ell, boundary })
    }

    /// Ladder of `len` rungs with `H` swapping the rails: orbits are rungs,
    /// `k = 2`, `ell = 1`.
    pub fn ladder(len: usize) -> Result<QuotientSpec, CouplingError> {
        let g = FiniteGraph::ladder(len);
        let orbit_of = (0..2 * len as u32).map(|v| v / 2).collect();
        let boundary = (0..len).map(|i| i == 0 || i + 1 == len).collect();
        QuotientSpec::new(g, orbit_of, boundary)
    }

    /// Every vertex is its own orbit.
    pub fn trivial(graph: FiniteGraph, boundary: Vec<bool>) -> Result<QuotientSpec, CouplingError> {
        let orbit_of = (0..graph.len() as u32).collect();
        QuotientSpec::new(graph, orbit_of, boundary)
    }

    /// `w x h` grid modulo the point reflection `(x, y) -> (w-1-x, h-1-y)`;
    /// `w` must be even so the reflection has no fixed vertex.
    pub fn grid_reflection(w: usize, h: usize) -> Result<QuotientSpec, CouplingError> {
        if w % 2 != 0 {
            return Err(CouplingError::InvalidParameters("width must be even".into()));
        }
        let g = FiniteGraph::grid(w, h);
        let mut orbit_of = vec![0u32; w * h];
        let mut next = 0;
        let mut boundary = Vec::new();
        for x in 0..w {
            for y in 0..h {
                let v = x * h + y;
                let m = (w - 1 - x) * h + (h - 1 - y);
                if v < m {
                    orbit_of[v] = next;
                    orbit_of[m] = next;
                    boundary.push(x == 0 || y == 0 || x + 1 == w || y + 1 == h);
                    next += 1;
                }
            }
        }
        QuotientSpec::new(g, orbit_of, boundary)
    }

    pub fn n_orbits(&self) -> usize {
        self.orbits.len()
    }

    /// `H(x) ~ H(y)` iff some representatives are adjacent.
    pub fn quotient_graph(&self) -> FiniteGraph {
        let e: Vec<(u32, u32)> = self
            .graph
            .edges()
            .into_iter()
            .map(|(u, v)| (self.orbit_of[u as usize], self.orbit_of[v as usize]))
            .filter(|(a, b)| a != b)
            .collect();
        FiniteGraph::new(self.n_orbits(), &e).expect("orbit ids in range")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExplorationStatus {
    Complete,
    /// The cluster reached the edge of the window.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub target: Vec<i64>,
    pub distance: usize,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub from: Vec<i64>,
    pub to: Vec<i64>,
    /// Distance of `from` to the root in the explored graph.
    pub depth: u32,
    pub witness: Vec<i64>,
    pub trials: Vec<Trial>,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingTrace {
    pub root: Vec<i64>,
    pub root_witness: Vec<i64>,
    /// Explored cluster in order of discovery.
    pub cluster: Vec<Vec<i64>>,
    /// Open upstairs edges `(witness of from, witness of to)`.
    pub witness_edges: Vec<(Vec<i64>, Vec<i64>)>,
    pub steps: Vec<TraceStep>,
    pub status: ExplorationStatus,
}

impl CouplingTrace {
    /// One step per line.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for st in &self.steps {
            s.push_str(&serde_json::to_string(st).expect("serializable step"));
            s.push('\n');
        }
        s
    }

    /// Every discovered element has an open witness edge hanging off an
    /// earlier witness, starting from the root's.
    pub fn witnesses_are_sound(&self) -> bool {
        let mut reached: FxHashSet<&Vec<i64>> = FxHashSet::default();
        reached.insert(&self.root_witness);
        for (a, b) in &self.witness_edges {
            if !reached.contains(a) {
                return false;
            }
            reached.insert(b);
        }
        self.witness_edges.len() + 1 == self.cluster.len()
    }

    pub fn open_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.open).count()
    }
}

fn pair_uniform(seed: u64, a: u64, b: u64) -> f64 {
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    uniform(seed, x, y)
}

fn check_p(p: f64) -> Result<(), CouplingError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CouplingError::InvalidParameters(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Explores the cluster of `pi(root)` in `(G/H)_r` through `G_{r+ell}`: the
/// boundary edge `(x, y)` with `x` closest to the root orbit (then smallest
/// `x`, then `y`) is open when one of the `k` upstairs edges from the
/// witness of `x` into the orbit `y` is open. The witness of `y` is the first
/// open trial.
pub fn coupled_quotient_exploration(
    q: &QuotientSpec,
    r: u32,
    p: f64,
    root: u32,
    seed: u64,
) -> Result<CouplingTrace, CouplingError> {
    check_p(p)?;
    if r == 0 {
        return Err(CouplingError::InvalidParameters("r must be at least 1".into()));
    }
    if root as usize >= q.graph.len() {
        return Err(CouplingError::InvalidParameters(format!("root {root} outside the graph")));
    }
    let qg = q.quotient_graph();
    let root_orbit = q.orbit_of[root as usize];
    let depth = qg.distances_from(root_orbit, u32::MAX);
    let bound = (r + q.ell) as usize;
    let mut in_c = vec![false; q.n_orbits()];
    let mut witness = vec![u32::MAX; q.n_orbits()];
    let mut examined: FxHashSet<(u32, u32)> = FxHashSet::default();
    let mut heap = BinaryHeap::new();
    let mut trace = CouplingTrace {
        root: vec![root_orbit as i64],
        root_witness: vec![root as i64],
        cluster: vec![vec![root_orbit as i64]],
        witness_edges: Vec::new(),
        steps: Vec::new(),
        status: ExplorationStatus::Complete,
    };
    let mut exhausted = q.boundary[root_orbit as usize];
    let push = |x: u32, heap: &mut BinaryHeap<Reverse<(u32, u32, u32)>>| {
        let d = qg.distances_from(x, r);
        for (y, &dy) in d.iter().enumerate() {
            if dy >= 1 && dy <= r {
                heap.push(Reverse((depth[x as usize], x, y as u32)));
            }
        }
    };
    in_c[root_orbit as usize] = true;
    witness[root_orbit as usize] = root;
    push(root_orbit, &mut heap);
    while let Some(Reverse((dx, x, y))) = heap.pop() {
        let key = (x.min(y), x.max(y));
        if in_c[y as usize] || !examined.insert(key) {
            continue;
        }
        let ux = witness[x as usize];
        let du = q.graph.distances_from(ux, bound as u32 + 1);
        let mut trials = Vec::with_capacity(q.k);
        let mut first_open = None;
        for &z in &q.orbits[y as usize] {
            let dist = du[z as usize];
            if dist as usize > bound {
                return Err(CouplingError::DistanceBound {
                    distance: if dist == u32::MAX { usize::MAX } else { dist as usize },
                    bound,
                });
            }
            let open = pair_uniform(seed, ux as u64, z as u64) < p;
            if open && first_open.is_none() {
                first_open = Some(z);
            }
            trials.push(Trial { target: vec![z as i64], distance: dist as usize, open });
        }
        let step = trace.steps.len();
        trace.steps.push(TraceStep {
            step,
            from: vec![x as i64],
            to: vec![y as i64],
            depth: dx,
            witness: vec![ux as i64],
            trials,
            open: first_open.is_some(),
        });
        if let Some(z) = first_open {
            in_c[y as usize] = true;
            witness[y as usize] = z;
            trace.cluster.push(vec![y as i64]);
            trace.witness_edges.push((vec![ux as i64], vec![z as i64]));
            exhausted |= q.boundary[y as usize];
            push(y, &mut heap);
        }
    }
    if exhausted {
        trace.status = ExplorationStatus::Exhausted;
    }
    Ok(trace)
}

/// `(H cap S^m)^r` without the identity, sorted.
fn subgroup_steps(
    group: &Group,
    hw: &SubgroupWindow,
    ball: &[LatticePoint],
    r: usize,
) -> Result<Vec<LatticePoint>, CouplingError> {
    let h_m: Vec<&LatticePoint> = ball.iter().filter(|p| hw.contains(p)).collect();
    let mut prod: BTreeSet<LatticePoint> = BTreeSet::from([group.identity()]);
    for _ in 0..r {
        let mut next = BTreeSet::new();
        for a in &prod {
            for b in &h_m {
                next.insert(group.multiply(a, b)?);
            }
        }
        prod = next;
    }
    prod.remove(&group.identity());
    Ok(prod.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetSetup {
    pub steps: Vec<LatticePoint>,
    pub window_radius: usize,
    pub window_size: usize,
}

/// Exploration of the subgroup Cayley graph `G(H, (H cap S^m)^r)` from the
/// identity, where the block `u X` of `u` in `H` stands for `u`. The edge
/// `(u, u t)` is open when one of the trials `(u x_u, u t y)`, `y` in `X`, is
/// open in `G_{rm + 2k}`.
#[allow(clippy::too_many_arguments)]
pub fn coset_exploration(
    group: &Group,
    h_gens: &[LatticePoint],
    x: &[LatticePoint],
    k: usize,
    m: usize,
    r: usize,
    p: f64,
    seed: u64,
    window_radius: usize,
) -> Result<(CouplingTrace, CosetSetup), CouplingError> {
    check_p(p)?;
    if m == 0 || r == 0 {
        return Err(CouplingError::InvalidParameters("m and r must be positive".into()));
    }
    if x.len() != k {
        return Err(CouplingError::InvalidParameters(format!("{} representatives for k = {k}", x.len())));
    }
    let id = group.identity();
    if !x.contains(&id) {
        return Err(CouplingError::NotTransversal("representatives must contain the identity".into()));
    }
    let bound = r * m + 2 * k;
    let ambient = enumerate_ball(group, window_radius + bound, true, crate::cayley::DEFAULT_POINT_CAP)?;
    let hw = SubgroupWindow::new(group, h_gens, &ambient)?;
    for p in x {
        if ambient.word_length(p)? as usize > k {
            return Err(CouplingError::NotTransversal(format!("{:?} is not in S^{k}", p.0)));
        }
    }
    // distinct cosets, and every element near the root block is covered
    let x_inv: Vec<LatticePoint> = x.iter().map(|p| group.inverse(p)).collect::<Result<_, _>>()?;
    for i in 0..k {
        for j in i + 1..k {
            if hw.contains(&group.multiply(&x[i], &x_inv[j])?) {
                return Err(CouplingError::NotTransversal(format!("{:?} and {:?} share a coset", x[i].0, x[j].0)));
            }
        }
    }
    let near: Vec<LatticePoint> = ambient.points_within(bound as u32)?.into_iter().map(|p| p.0).collect();
    for g in &near {
        let mut hit = false;
        for xi in &x_inv {
            if hw.contains(&group.multiply(g, xi)?) {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(CouplingError::NotTransversal(format!("{:?} lies in no coset H x", g.0)));
        }
    }
    let ball_m: Vec<LatticePoint> = ambient.points_within(m as u32)?.into_iter().map(|p| p.0).collect();
    let steps = subgroup_steps(group, &hw, &ball_m, r)?;

    // the explored window: H within word distance window_radius
    let in_window = |g: &LatticePoint| -> Result<bool, CouplingError> {
        Ok(hw.contains(g) && ambient.word_length(g)? as usize <= window_radius)
    };
    let mut depth: FxHashMap<LatticePoint, u32> = FxHashMap::default();
    depth.insert(id.clone(), 0);
    let mut queue = VecDeque::from([id.clone()]);
    while let Some(u) = queue.pop_front() {
        let du = depth[&u];
        for t in &steps {
            let v = group.multiply(&u, t)?;
            if !depth.contains_key(&v) && in_window(&v)? {
                depth.insert(v.clone(), du + 1);
                queue.push_back(v);
            }
        }
    }
    let setup = CosetSetup { steps: steps.clone(), window_radius, window_size: depth.len() };

    let mut witness: FxHashMap<LatticePoint, LatticePoint> = FxHashMap::default();
    witness.insert(id.clone(), id.clone());
    let mut examined: FxHashSet<(LatticePoint, LatticePoint)> = FxHashSet::default();
    let mut heap: BinaryHeap<Reverse<(u32, LatticePoint, usize)>> = BinaryHeap::new();
    let mut trace = CouplingTrace {
        root: id.0.clone(),
        root_witness: id.0.clone(),
        cluster: vec![id.0.clone()],
        witness_edges: Vec::new(),
        steps: Vec::new(),
        status: ExplorationStatus::Complete,
    };
    let mut exhausted = false;
    for i in 0..steps.len() {
        heap.push(Reverse((0, id.clone(), i)));
    }
    while let Some(Reverse((du, u, ti))) = heap.pop() {
        let v = group.multiply(&u, &steps[ti])?;
        if witness.contains_key(&v) {
            continue;
        }
        if !depth.contains_key(&v) {
            exhausted = true;
            continue;
        }
        let key = if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) };
        if !examined.insert(key) {
            continue;
        }
        let a = group.multiply(&u, &witness[&u])?;
        let a_inv = group.inverse(&a)?;
        let ha = hash_coords(&a.0);
        let mut trials = Vec::with_capacity(k);
        let mut first_open = None;
        for y in x {
            let b = group.multiply(&v, y)?;
            let dist = ambient.word_length(&group.multiply(&a_inv, &b)?).map(|d| d as usize).unwrap_or(usize::MAX);
            if dist > bound {
                return Err(CouplingError::DistanceBound { distance: dist, bound });
            }
            let open = pair_uniform(seed, ha, hash_coords(&b.0)) < p;
            if open && first_open.is_none() {
                first_open = Some((y.clone(), b.clone()));
            }
            trials.push(Trial { target: b.0, distance: dist, open });
        }
        let step = trace.steps.len();
        trace.steps.push(TraceStep {
            step,
            from: u.0.clone(),
            to: v.0.clone(),
            depth: du,
            witness: a.0.clone(),
            trials,
            open: first_open.is_some(),
        });
        if let Some((y, b)) = first_open {
            trace.cluster.push(v.0.clone());
            trace.witness_edges.push((a.0, b.0));
            witness.insert(v.clone(), y);
            let dv = depth[&v];
            for i in 0..steps.len() {
                heap.push(Reverse((dv, v.clone(), i)));
            }
        }
    }
    if exhausted {
        trace.status = ExplorationStatus::Exhausted;
    }
    Ok((trace, setup))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow {
    pub m: usize,
    /// `P(|pi(K_v)| >= m)` in `G_{r+ell}` at `p`.
    pub p_base: f64,
    /// `P(|K_{pi(v)}| >= m)` in `(G/H)_r` at `1 - (1 - p)^k`.
    pub p_quotient: f64,
    pub std_error: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub p: f64,
    pub q: f64,
    pub r: u32,
    pub seeds: usize,
    pub rows: Vec<DominanceRow>,
}

impl DominanceReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Orbits met by the cluster of `root` in `G_{r+ell}` at parameter `p`.
pub fn base_cluster_orbits(q: &QuotientSpec, power_edges: &[(u32, u32)], p: f64, root: u32, seed: u64) -> usize {
    let mut uf = UnionFind::new(q.graph.len());
    for &(u, v) in power_edges {
        if pair_uniform(seed, u as u64, v as u64) < p {
            uf.union(u, v);
        }
    }
    let rr = uf.find(root);
    let mut seen = FxHashSet::default();
    for v in 0..q.graph.len() as u32 {
        if uf.find(v) == rr {
            seen.insert(q.orbit_of[v as usize]);
        }
    }
    seen.len()
}

/// Size of the cluster of `root` in the quotient percolation.
pub fn quotient_cluster_size(n_orbits: usize, power_edges: &[(u32, u32)], q: f64, root: u32, seed: u64) -> usize {
    let mut uf = UnionFind::new(n_orbits);
    for &(a, b) in power_edges {
        if pair_uniform(seed, a as u64, b as u64) < q {
            uf.union(a, b);
        }
    }
    uf.component_size(root) as usize
}

/// One-sided check that the projected cluster of `G_{r+ell}` dominates the
/// quotient cluster on every event `{size >= m}`, within three combined
/// standard errors. The two samplers use independent seed streams.
pub fn dominance_test(
    qs: &QuotientSpec,
    r: u32,
    p: f64,
    root: u32,
    levels: &[usize],
    n_seeds: usize,
    seed: u64,
) -> Result<DominanceReport, CouplingError> {
    check_p(p)?;
    if n_seeds < 30 {
        return Err(CouplingError::InsufficientSeeds { need: 30, got: n_seeds });
    }
    if root as usize >= qs.graph.len() {
        return Err(CouplingError::InvalidParameters(format!("root {root} outside the graph")));
    }
    let q = 1.0 - (1.0 - p).powi(qs.k as i32);
    let base_edges = qs.graph.power_edges(r + qs.ell);
    let quot_edges = qs.quotient_graph().power_edges(r);
    let root_orbit = qs.orbit_of[root as usize];
    let sizes: Vec<(usize, usize)> = (0..n_seeds)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i as u64);
            (
                base_cluster_orbits(qs, &base_edges, p, root, combine(s, 1)),
                quotient_cluster_size(qs.n_orbits(), &quot_edges, q, root_orbit, combine(s, 2)),
            )
        })
        .collect();
    let n = n_seeds as f64;
    let rows = levels
        .iter()
        .map(|&m| {
            let a = sizes.iter().filter(|s| s.0 >= m).count() as f64 / n;
            let b = sizes.iter().filter(|s| s.1 >= m).count() as f64 / n;
            let se = ((a * (1.0 - a) + b * (1.0 - b)) / n).sqrt();
            DominanceRow { m, p_base: a, p_quotient: b, std_error: se, holds: a >= b - 3.0 * se }
        })
        .collect();
    Ok(DominanceReport { p, q, r, seeds: n_seeds, rows })
}
