use proptest::prelude::*;

use wentzell::graph::GrowthParams;
use wentzell::solver::SpaceTimeFn;
use wentzell::verify::{
    energy_check, hvi_residual, inclusion_check, reaction_growth_check, HviOptions, InclusionOptions,
};
use wentzell::{solve, DomainSpec, PiecewiseGraph, SolveConfig};

/// Graphs with growth `|γ| ≤ 1` and a usable sign condition.
fn family(k: usize) -> PiecewiseGraph {
    match k % 4 {
        0 => PiecewiseGraph::from_pieces(&[], "tanh(t)").unwrap(),
        1 => PiecewiseGraph::heaviside(),
        2 => PiecewiseGraph::sign(),
        _ => PiecewiseGraph::from_pieces(&[(-0.2, "-1"), (0.3, "0.5*sin(5*t)")], "1").unwrap(),
    }
}

fn problem(two_d: bool, g1: usize, g2: usize, amp: f64, f1: f64, f2: f64, eps: f64) -> SolveConfig {
    let domain = if two_d {
        DomainSpec::unit_square(0.5)
    } else {
        DomainSpec::unit_interval(6)
    };
    let mut cfg = SolveConfig::new(domain);
    cfg.final_time = 0.3;
    cfg.dt = 0.05;
    cfg.eps = eps;
    cfg.gamma1 = family(g1);
    cfg.gamma2 = family(g2);
    cfg.u0 = SpaceTimeFn::parse(&format!("{amp}*cos(pi*x)")).unwrap();
    cfg.f1 = SpaceTimeFn::constant(f1);
    cfg.f2 = SpaceTimeFn::parse(&format!("{f2}*(1 + t)")).unwrap();
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_solve_satisfies_the_energy_inequality(
        two_d: bool, g1 in 0usize..4, g2 in 0usize..4,
        amp in -2.0..2.0f64, f1 in -3.0..3.0f64, f2 in -3.0..3.0f64, eps in 0.02..0.3f64,
    ) {
        let out = solve(&problem(two_d, g1, g2, amp, f1, f2, eps)).unwrap();
        let e = energy_check(&out.ops, &out.trajectory, &out.ledger, 1e-10).unwrap();
        prop_assert!(e.pass, "worst violation {}", e.worst_violation);
        prop_assert!(e.worst_integrated_violation <= 1e-10);
    }

    #[test]
    fn solves_are_bit_identical(g1 in 0usize..4, g2 in 0usize..4, amp in -2.0..2.0f64, f2 in -3.0..3.0f64) {
        let cfg = problem(false, g1, g2, amp, 0.5, f2, 0.1);
        let (a, b) = (solve(&cfg).unwrap(), solve(&cfg).unwrap());
        prop_assert_eq!(&a.trajectory.states, &b.trajectory.states);
        prop_assert_eq!(&a.trajectory.reactions, &b.trajectory.reactions);
        prop_assert_eq!(&a.ledger, &b.ledger);
    }

    #[test]
    fn reactions_respect_their_growth_bound(two_d: bool, g1 in 0usize..4, g2 in 0usize..4, amp in -2.0..2.0f64, f2 in -3.0..3.0f64, eps in 0.02..0.3f64) {
        let out = solve(&problem(two_d, g1, g2, amp, 0.0, f2, eps)).unwrap();
        let p = GrowthParams::new(1.0, 0.0).unwrap();
        let r = reaction_growth_check(&out.ops, &out.trajectory, &p, &p, eps);
        prop_assert!(r.ok, "{:?}", r);
    }

    #[test]
    fn widening_shrinks_distances_by_the_widening(g2 in 0usize..4, amp in -2.0..2.0f64, f2 in -3.0..3.0f64, delta in 0.0..0.5f64) {
        let cfg = problem(false, 0, g2, amp, 0.0, f2, 0.2);
        let out = solve(&cfg).unwrap();
        let base = InclusionOptions::default();
        let wide = InclusionOptions { widen: delta, ..base };
        let r0 = inclusion_check(&out.trajectory, &cfg.gamma1, &cfg.gamma2, cfg.eps, &base);
        let r1 = inclusion_check(&out.trajectory, &cfg.gamma1, &cfg.gamma2, cfg.eps, &wide);
        let shrink = |d0: f64, d1: f64| (d0 - d1 - d0.min(delta)).abs() <= 1e-12;
        prop_assert!(shrink(r0.worst_distance, r1.worst_distance));
        prop_assert!(shrink(r0.worst_pointwise_distance, r1.worst_pointwise_distance));
        prop_assert!(r1.fraction_inside >= r0.fraction_inside);
    }

    #[test]
    fn hvi_residual_vanishes_in_the_zero_direction(two_d: bool, g1 in 0usize..4, g2 in 0usize..4, amp in -2.0..2.0f64, f2 in -3.0..3.0f64, seed in any::<u64>()) {
        let cfg = problem(two_d, g1, g2, amp, 0.0, f2, 0.1);
        let out = solve(&cfg).unwrap();
        let opts = HviOptions { tests_per_step: 10, seed, ..HviOptions::default() };
        let r = hvi_residual(&out.ops, &out.trajectory, &cfg.gamma1, &cfg.gamma2, cfg.eps, &opts);
        prop_assert_eq!(r.zero_direction_max, 0.0);
        prop_assert_eq!(r.evaluations, 10 * (out.trajectory.len() - 1));
    }
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let out = solve(&SolveConfig::new(DomainSpec::unit_interval(4))).unwrap();
    assert!(out.trajectory.states.iter().all(|s| s.coeffs.iter().all(|&v| v == 0.0)));
    let e = energy_check(&out.ops, &out.trajectory, &out.ledger, 1e-10).unwrap();
    assert!(e.pass && e.h_norm_nonincreasing);
}

#[test]
fn manufactured_run_fills_the_error_column() {
    let u = "exp(-t)*cos(pi*x)";
    let mut cfg = SolveConfig::new(DomainSpec::unit_interval(16));
    cfg.u0 = SpaceTimeFn::parse(u).unwrap();
    cfg.f1 = SpaceTimeFn::parse(&format!("(pi^2 - 1)*{u}")).unwrap();
    cfg.exact = Some(SpaceTimeFn::parse(u).unwrap());
    let out = solve(&cfg).unwrap();
    assert!(out.ledger.rows.iter().all(|r| r.error.is_some_and(|e| e < 0.05)));
}
