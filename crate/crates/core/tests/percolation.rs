use std::collections::HashSet;

use proptest::prelude::*;

use nilperc::cayley::{enumerate_ball, DEFAULT_POINT_CAP};
use nilperc::group::{builtin_spec, Builtin};
use nilperc::haar::Region;
use nilperc::percolation::{
    cluster_stats_edges, giant_component_law_check, iid_edge_grid, kernel_norm_lower_bound, lss_threshold_check,
    sample_rescaled, sample_spread_out, Model, NeighborBall, Window, WindowSpec, DEFAULT_VERTEX_CAP,
};
use nilperc::Group;

fn setup(b: Builtin, r: usize) -> (Group, NeighborBall) {
    let g = Group::new(builtin_spec(&b).unwrap()).unwrap();
    let t = enumerate_ball(&g, r, true, DEFAULT_POINT_CAP).unwrap();
    let nb = NeighborBall::new(&g, &t, r).unwrap();
    (g, nb)
}

fn edge_set(edges: &[(u32, u32)]) -> HashSet<(u32, u32)> {
    edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect()
}

#[test]
fn word_metric_edge_density() {
    // p = 2.5 / 5 over 2 * 708^2 > 10^6 candidate pairs
    let (g, nb) = setup(Builtin::Zd(2), 1);
    let w = Window::build(&g, &WindowSpec::torus(708), DEFAULT_VERTEX_CAP).unwrap();
    let s = sample_spread_out(&g, &nb, Model::WordMetric { r: 1, lambda: 2.5 }, &w, 17).unwrap();
    let pairs = (w.len() * nb.steps.len()) as f64;
    assert!(pairs >= 1e6);
    let density = s.edges.len() as f64 / pairs;
    assert!((density - 0.5).abs() < 0.003, "{density}");
    assert_eq!(s.header.edge_probability, 0.5);
}

#[test]
fn cc_proxy_edge_density() {
    let (g, nb) = setup(Builtin::Zd(2), 4);
    let w = Window::build(&g, &WindowSpec::torus(200), DEFAULT_VERTEX_CAP).unwrap();
    let model = Model::CCProxy { r: 4, lambda: 2.0, c_s: 2.0 };
    let s = sample_spread_out(&g, &nb, model, &w, 3).unwrap();
    let p = 1.0 / 16.0;
    let pairs = (w.len() * nb.steps.len()) as f64;
    let sd = (p * (1.0 - p) / pairs).sqrt();
    let density = s.edges.len() as f64 / pairs;
    assert!((density - p).abs() < 5.0 * sd, "{density}");
    assert_eq!(s.header.c_s, Some(2.0));
}

#[test]
fn samples_are_monotone_in_lambda() {
    let (g, nb) = setup(Builtin::Heisenberg3, 3);
    let w = Window::build(&g, &WindowSpec::word_ball(8), DEFAULT_VERTEX_CAP).unwrap();
    let mut prev = HashSet::new();
    for lambda in [0.5, 1.0, 2.0, 4.0] {
        let s = sample_spread_out(&g, &nb, Model::WordMetric { r: 3, lambda }, &w, 11).unwrap();
        let cur = edge_set(&s.edges);
        assert!(prev.is_subset(&cur));
        assert!(cur.len() > prev.len());
        prev = cur;
    }
}

#[test]
fn samples_are_reproducible() {
    let (g, nb) = setup(Builtin::Heisenberg3, 2);
    let w = Window::build(&g, &WindowSpec::word_ball(10), DEFAULT_VERTEX_CAP).unwrap();
    let m = Model::WordMetric { r: 2, lambda: 2.0 };
    let a = sample_spread_out(&g, &nb, m, &w, 5).unwrap();
    let b = sample_spread_out(&g, &nb, m, &w, 5).unwrap();
    let c = sample_spread_out(&g, &nb, m, &w, 6).unwrap();
    assert_eq!(a.edges, b.edges);
    assert_ne!(a.edges, c.edges);
}

#[test]
fn rescaled_sample_has_the_same_edges() {
    let (g, nb) = setup(Builtin::Heisenberg3, 3);
    let w = Window::build(&g, &WindowSpec::word_ball(7), DEFAULT_VERTEX_CAP).unwrap();
    let m = Model::WordMetric { r: 3, lambda: 2.0 };
    let s = sample_spread_out(&g, &nb, m, &w, 9).unwrap();
    let (verts, edges) = sample_rescaled(&g, &nb, m, &w, 9).unwrap();
    assert_eq!(verts.len(), w.len());
    assert_eq!(edge_set(&edges), edge_set(&s.edges));
    // vertices are delta_{1/3} of the exponential coordinates
    let i = (0..w.len()).find(|&i| w.coords(i) == [1, 1, 0]).unwrap();
    let want = [1.0 / 3.0, 1.0 / 3.0, -0.5 / 9.0];
    for (a, b) in verts[i].iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn heisenberg_giant_emerges() {
    let g = Group::new(builtin_spec(&Builtin::Heisenberg3).unwrap()).unwrap();
    let t = enumerate_ball(&g, 5, true, DEFAULT_POINT_CAP).unwrap();
    let balls: Vec<NeighborBall> = [3, 5].iter().map(|&r| NeighborBall::new(&g, &t, r).unwrap()).collect();
    let seeds: Vec<u64> = (0..10).collect();
    let rep = giant_component_law_check(
        &g,
        &balls,
        Model::WordMetric { r: 3, lambda: 2.0 },
        |r| Window::build(&g, &WindowSpec::word_ball(4 * r), DEFAULT_VERTEX_CAP),
        &seeds,
    )
    .unwrap();
    for row in &rep.rows {
        assert!(row.giant_fraction_mean > 0.3, "r = {}: {}", row.r, row.giant_fraction_mean);
        assert!(row.c2_over_c1_mean < 0.1, "r = {}: {}", row.r, row.c2_over_c1_mean);
    }
    // subcritical: no giant
    let sub = giant_component_law_check(
        &g,
        &balls,
        Model::WordMetric { r: 3, lambda: 0.5 },
        |r| Window::build(&g, &WindowSpec::word_ball(4 * r), DEFAULT_VERTEX_CAP),
        &seeds,
    )
    .unwrap();
    for row in &sub.rows {
        assert!(row.giant_fraction_mean < 0.05, "r = {}: {}", row.r, row.giant_fraction_mean);
    }
}

#[test]
fn kernel_bound_grows_with_the_box() {
    let g = Group::new(builtin_spec(&Builtin::Heisenberg3).unwrap()).unwrap();
    let b10 = kernel_norm_lower_bound(&g, &Region::HalfScaledBox { n: 10.0 }, 1.5, 4000, 2, 6).unwrap();
    let b20 = kernel_norm_lower_bound(&g, &Region::HalfScaledBox { n: 20.0 }, 1.5, 4000, 2, 6).unwrap();
    assert!(b20.ratio > b10.ratio, "{} vs {}", b10.ratio, b20.ratio);
    assert!(b20.bound > 1.0, "{}", b20.bound);
    assert!(b20.bound <= 1.5);
}

#[test]
fn dense_iid_grids_cross() {
    let crossings = (0..100).filter(|&s| lss_threshold_check(&iid_edge_grid(64, 0.99, s), 2, 0.9).crossing).count();
    assert!(crossings >= 99, "{crossings}");
}

/// Component sizes by depth-first search over an adjacency list.
fn dfs_sizes(n: usize, edges: &[(u32, u32)]) -> Vec<u64> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cluster_sizes_match_dfs(n in 1usize..60, raw in prop::collection::vec((0u32..60, 0u32..60), 0..120)) {
        let edges: Vec<(u32, u32)> = raw.into_iter().map(|(u, v)| (u % n as u32, v % n as u32)).collect();
        let rep = cluster_stats_edges(n, &edges);
        let sizes = dfs_sizes(n, &edges);
        prop_assert_eq!(rep.c1_vertices, sizes[0]);
        prop_assert_eq!(rep.c2_vertices, sizes.get(1).copied().unwrap_or(0));
        prop_assert_eq!(rep.total_edges, edges.len() as u64);
        prop_assert_eq!(rep.n_vertices, n as u64);
    }
}
