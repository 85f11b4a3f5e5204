use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;

use nilperc::cayley::{
    cc_distance_proxy, coset_ball_inclusion_check, enumerate_ball, enumerate_ball_from, fit_growth, orbit_count_check,
    shell_profile, DEFAULT_POINT_CAP,
};
use nilperc::group::{builtin_spec, Builtin};
use nilperc::{Group, LatticePoint};

fn group(b: Builtin) -> Group {
    Group::new(builtin_spec(&b).unwrap()).unwrap()
}

fn lp(v: &[i64]) -> LatticePoint {
    LatticePoint(v.to_vec())
}

/// Word lengths on the discrete Heisenberg group from unitriangular matrix
/// products `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
fn heisenberg_bfs(r: u32) -> HashMap<[i64; 3], u32> {
    let gens = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]];
    let mut seen = HashMap::new();
    seen.insert([0i64; 3], 0u32);
    let mut q = VecDeque::from([[0i64; 3]]);
    while let Some(u) = q.pop_front() {
        let l = seen[&u];
        if l == r {
            continue;
        }
        for s in gens {
            let v = [u[0] + s[0], u[1] + s[1], u[2] + s[2] + u[0] * s[1]];
            if !seen.contains_key(&v) {
                seen.insert(v, l + 1);
                q.push_back(v);
            }
        }
    }
    seen
}

#[test]
fn heisenberg_ball_matches_matrix_bfs() {
    let g = group(Builtin::Heisenberg3);
    let t = enumerate_ball(&g, 8, true, DEFAULT_POINT_CAP).unwrap();
    let oracle = heisenberg_bfs(8);
    for n in 0..=8u32 {
        let want = oracle.values().filter(|&&l| l <= n).count() as u64;
        assert_eq!(t.beta(n as usize), Some(want), "n = {n}");
    }
    for (p, l) in &oracle {
        assert_eq!(t.word_length(&lp(p)).unwrap(), *l);
    }
}

#[test]
fn z2_ball_sizes() {
    let g = group(Builtin::Zd(2));
    let t = enumerate_ball(&g, 10, false, DEFAULT_POINT_CAP).unwrap();
    assert_eq!(t.beta(3), Some(25));
    for n in 0..=10u64 {
        assert_eq!(t.counts[n as usize], 2 * n * n + 2 * n + 1);
    }
}

#[test]
fn ball_size_is_left_invariant() {
    let g = group(Builtin::Heisenberg3);
    let base = enumerate_ball(&g, 6, false, DEFAULT_POINT_CAP).unwrap();
    let mut rng = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..10 {
        let c: Vec<i64> = (0..3)
            .map(|_| {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((rng >> 33) % 41) as i64 - 20
            })
            .collect();
        let t = enumerate_ball_from(&g, &lp(&c), 6, false, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(t.counts, base.counts, "center {c:?}");
    }
}

#[test]
fn heisenberg_growth_is_quartic() {
    let g = group(Builtin::Heisenberg3);
    let t = enumerate_ball(&g, 20, false, DEFAULT_POINT_CAP).unwrap();
    let fit = fit_growth(&t).unwrap();
    assert_eq!(fit.fitted_degree, 4);
    for n in [10usize, 15, 20] {
        let ratio = t.counts[n] as f64 / (fit.c_s * (n as f64).powi(4));
        assert!((ratio - 1.0).abs() < 0.25, "n = {n}: {ratio}");
    }
}

#[test]
fn z2_shell_profile_matches_formula() {
    let g = group(Builtin::Zd(2));
    let t = enumerate_ball(&g, 12, false, DEFAULT_POINT_CAP).unwrap();
    for (n, q) in shell_profile(&t).unwrap() {
        let n = n as f64;
        let want = (4.0 * n + 4.0) / (2.0 * n * n + 2.0 * n + 1.0);
        assert!((q - want).abs() < 1e-12);
    }
}

#[test]
fn cc_proxy_examples() {
    let z = group(Builtin::Zd(2));
    let t = enumerate_ball(&z, 8, true, DEFAULT_POINT_CAP).unwrap();
    assert_eq!(cc_distance_proxy(&t, &lp(&[3, 4])).unwrap(), 7);
    let h = group(Builtin::Heisenberg3);
    let t = enumerate_ball(&h, 6, true, DEFAULT_POINT_CAP).unwrap();
    // the commutator [x, y] is the shortest word reaching the centre
    assert_eq!(cc_distance_proxy(&t, &lp(&[0, 0, 1])).unwrap(), 4);
    assert_eq!(heisenberg_bfs(4)[&[0, 0, 1]], 4);
}

#[test]
fn coset_inclusion_on_index_two_subgroup() {
    let g = group(Builtin::Zd(2));
    let h = [lp(&[2, 0]), lp(&[0, 1])];
    let x = [lp(&[0, 0]), lp(&[1, 0])];
    let rep = coset_ball_inclusion_check(&g, &h, &x, 1, 3, 2, Some(2), DEFAULT_POINT_CAP).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.ball_radius, 2);
    assert_eq!(rep.ball_size, 13);
    assert_eq!(rep.index_bound_holds, Some(true));
    // a single representative misses the odd coset
    let bad = coset_ball_inclusion_check(&g, &h, &x[..1], 1, 3, 2, None, DEFAULT_POINT_CAP);
    assert!(bad.is_err());
    assert!(coset_ball_inclusion_check(&g, &h, &x, 1, 2, 2, None, DEFAULT_POINT_CAP).is_err());
}

#[test]
fn orbit_counts() {
    let g = group(Builtin::Zd(2));
    let rep = orbit_count_check(&g, &[lp(&[2, 0]), lp(&[0, 1])], 2, DEFAULT_POINT_CAP).unwrap();
    assert_eq!(rep.orbits_met, 2);
    assert!(rep.holds);
    let whole = orbit_count_check(&g, &[lp(&[1, 0]), lp(&[0, 1])], 2, DEFAULT_POINT_CAP).unwrap();
    assert_eq!(whole.orbits_met, 1);
    assert!(!whole.holds);
    // H = 3Z x 3Z meets 5 orbits within distance 1 of the origin
    let sparse = orbit_count_check(&g, &[lp(&[3, 0]), lp(&[0, 3])], 2, DEFAULT_POINT_CAP).unwrap();
    assert_eq!(sparse.orbits_met, 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_length_is_symmetric_and_subadditive(a in prop::collection::vec(-2i64..=2, 3), b in prop::collection::vec(-2i64..=2, 3)) {
        let g = group(Builtin::Heisenberg3);
        let t = heisenberg_table();
        let (a, b) = (lp(&a), lp(&b));
        let la = t.word_length(&a).unwrap();
        let lb = t.word_length(&b).unwrap();
        prop_assert_eq!(la, t.word_length(&g.inverse(&a).unwrap()).unwrap());
        prop_assert!(t.word_length(&g.multiply(&a, &b).unwrap()).unwrap() <= la + lb);
    }
}

fn heisenberg_table() -> &'static nilperc::cayley::BallTable {
    static T: std::sync::OnceLock<nilperc::cayley::BallTable> = std::sync::OnceLock::new();
    T.get_or_init(|| enumerate_ball(&group(Builtin::Heisenberg3), 24, true, DEFAULT_POINT_CAP).unwrap())
}
