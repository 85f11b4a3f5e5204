use nilperc::coupling::{
    coset_exploration, coupled_quotient_exploration, dominance_test, ExplorationStatus, FiniteGraph, QuotientSpec,
};
use nilperc::group::{builtin_spec, Builtin};
use nilperc::{Group, LatticePoint};

fn z2() -> Group {
    Group::new(builtin_spec(&Builtin::Zd(2)).unwrap()).unwrap()
}

#[test]
fn ladder_rate_matches_two_trials() {
    // each quotient edge gets k = 2 upstairs trials: 1 - 0.7^2 = 0.51
    let q = QuotientSpec::ladder(41).unwrap();
    let (mut open, mut total) = (0, 0);
    let mut seed = 0;
    while total < 5000 {
        let t = coupled_quotient_exploration(&q, 1, 0.3, 40, seed).unwrap();
        assert!(t.witnesses_are_sound());
        open += t.open_steps();
        total += t.steps.len();
        seed += 1;
    }
    let rate = open as f64 / total as f64;
    assert!((rate - 0.51).abs() < 0.03, "{rate}");
}

#[test]
fn full_coset_exploration_covers_the_window() {
    let g = z2();
    let h = [LatticePoint(vec![2, 0]), LatticePoint(vec![0, 1])];
    let x = [g.identity(), LatticePoint(vec![1, 0])];
    let (t, setup) = coset_exploration(&g, &h, &x, 2, 2, 1, 1.0, 3, 12).unwrap();
    assert_eq!(t.cluster.len(), setup.window_size);
    assert!(t.cluster.iter().all(|p| p[0] % 2 == 0));
    assert!(t.witnesses_are_sound());
    let (t0, _) = coset_exploration(&g, &h, &x, 2, 2, 1, 0.0, 3, 12).unwrap();
    assert_eq!(t0.cluster.len(), 1);
    assert_eq!(t0.status, ExplorationStatus::Complete);
}

#[test]
fn coset_rate_matches_two_trials() {
    let g = z2();
    let h = [LatticePoint(vec![2, 0]), LatticePoint(vec![0, 1])];
    let x = [g.identity(), LatticePoint(vec![1, 0])];
    let (mut open, mut total) = (0, 0);
    let mut seed = 100;
    while total < 4000 {
        let (t, _) = coset_exploration(&g, &h, &x, 2, 2, 1, 0.4, seed, 20).unwrap();
        open += t.open_steps();
        total += t.steps.len();
        seed += 1;
    }
    let rate = open as f64 / total as f64;
    assert!((rate - 0.64).abs() < 0.03, "{rate}");
}

#[test]
fn quotient_cluster_is_dominated() {
    let q = QuotientSpec::ladder(41).unwrap();
    let rep = dominance_test(&q, 1, 0.35, 40, &[2, 4, 8, 16], 600, 7).unwrap();
    assert!(rep.passes(), "{rep:?}");
    assert!((rep.q - (1.0 - 0.65f64.powi(2))).abs() < 1e-12);
    let grid = QuotientSpec::grid_reflection(22, 21).unwrap();
    assert_eq!(grid.n_orbits(), 231);
    let rep = dominance_test(&grid, 1, 0.3, 10 * 21 + 10, &[2, 8, 32], 300, 8).unwrap();
    assert!(rep.passes(), "{rep:?}");
}

#[test]
fn traces_are_sound_across_seeds() {
    let specs = [
        QuotientSpec::ladder(15).unwrap(),
        QuotientSpec::grid_reflection(8, 7).unwrap(),
        QuotientSpec::trivial(FiniteGraph::grid(6, 6), vec![false; 36]).unwrap(),
    ];
    for q in &specs {
        for seed in 0..40 {
            for p in [0.2, 0.5, 0.8] {
                let t = coupled_quotient_exploration(q, 1, p, 0, seed).unwrap();
                assert!(t.witnesses_are_sound(), "seed {seed}, p {p}");
                assert_eq!(t.to_json_lines().lines().count(), t.steps.len());
            }
        }
    }
}
