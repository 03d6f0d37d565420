use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shepherd_core::controller::{
    bipartite_ideal_position, pinning_context, run_singling, run_singling_with, select_pinning, ControllerConfig,
    IdealPosition, IdealPositionRule, Method,
};
use shepherd_core::experiment::{grid5x5, TargetLabel};
use shepherd_core::metrics::is_separated;
use shepherd_core::separation::{feasible_sets, line_coefficient, FeasibleSets, DEFAULT_DOMAIN_BOUND};
use shepherd_core::swarm::{step_with, Saturation, SwarmParams, SwarmState};
use shepherd_core::{Result, Vec2};

struct Midpoint;

impl IdealPositionRule for Midpoint {
    fn ideal_position(
        &self,
        state: &SwarmState,
        p: usize,
        t: usize,
        _: &SwarmParams,
        _: &FeasibleSets,
    ) -> Result<IdealPosition> {
        Ok(IdealPosition {
            position: (state.positions[p] + state.positions[t]) / 2.0,
            fallback: false,
        })
    }
}

#[test]
fn baseline_is_the_shared_loop_with_a_midpoint_goal() {
    let scenario = grid5x5();
    let p = SwarmParams::default();
    let config = ControllerConfig::default();
    for label in [TargetLabel::A, TargetLabel::E] {
        let t = scenario.labels[&label];
        for seed in 0..5 {
            let builtin = run_singling(
                &scenario.state,
                t,
                &p,
                Method::Bipartite,
                &mut ChaCha8Rng::seed_from_u64(seed),
                seed,
                &config,
            )
            .unwrap();
            let custom = run_singling_with(
                &scenario.state,
                t,
                &p,
                &Midpoint,
                Method::Bipartite,
                &mut ChaCha8Rng::seed_from_u64(seed),
                seed,
                &config,
            )
            .unwrap();
            assert_eq!(builtin.trace, custom.trace);
            assert_eq!(builtin.connectivity_series, custom.connectivity_series);
            assert_eq!(builtin.final_state, custom.final_state);
        }
    }
}

#[test]
fn bipartite_goal_is_the_midpoint() {
    let s = SwarmState::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 2.0)], Vec2::zeros());
    assert_eq!(bipartite_ideal_position(&s, 0, 1), Vec2::new(0.5, 1.0));
}

#[test]
fn runs_end_separated_exactly_when_successful() {
    let scenario = grid5x5();
    let p = SwarmParams::default();
    let config = ControllerConfig::default();
    for label in TargetLabel::ALL {
        let t = scenario.labels[&label];
        for method in [Method::Proposed, Method::Bipartite] {
            for seed in 0..4 {
                let r = run_singling(
                    &scenario.state,
                    t,
                    &p,
                    method,
                    &mut ChaCha8Rng::seed_from_u64(seed),
                    seed,
                    &config,
                )
                .unwrap();
                assert_eq!(r.success, is_separated(&r.final_state, t, p.r).unwrap());
                assert!(r.max_shepherd_step <= p.v_bar + 1e-12);
                assert_eq!(r.connectivity_series.len() as u64, r.steps);
                assert_eq!(r.trace.len() as u64, r.steps);
                let mut prev = scenario.state.shepherd;
                for rec in &r.trace {
                    assert!((rec.shepherd - prev).norm() <= p.v_bar + 1e-12);
                    prev = rec.shepherd;
                }
            }
        }
    }
}

#[test]
fn step_budget_bounds_a_run() {
    let scenario = grid5x5();
    let t = scenario.labels[&TargetLabel::E];
    let config = ControllerConfig {
        step_budget: 3,
        ..ControllerConfig::default()
    };
    let r = run_singling(
        &scenario.state,
        t,
        &SwarmParams::default(),
        Method::Proposed,
        &mut ChaCha8Rng::seed_from_u64(0),
        0,
        &config,
    )
    .unwrap();
    assert!(!r.success);
    assert_eq!(r.steps, 3);
}

#[test]
fn two_sheep_always_split() {
    let p = SwarmParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..20 {
        let d = rng.gen_range(0.2..0.9);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let x2 = Vec2::new(angle.cos(), angle.sin()) * d;
        let s = SwarmState::new(vec![Vec2::zeros(), x2], Vec2::new(-3.0, 1.0));
        let r = run_singling(
            &s,
            1,
            &p,
            Method::Proposed,
            &mut ChaCha8Rng::seed_from_u64(seed),
            seed,
            &ControllerConfig::default(),
        )
        .unwrap();
        assert!(r.success);
        assert!((r.final_state.positions[0] - r.final_state.positions[1]).norm() >= p.r);
    }
}

#[test]
fn shepherd_at_ideal_position_pushes_pair_apart() {
    let p = SwarmParams::default();
    let sets = feasible_sets(&p, DEFAULT_DOMAIN_BOUND).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..500 {
        let d = rng.gen_range(0.1..0.95);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let xt = Vec2::new(angle.cos(), angle.sin()) * d;
        let mut s = SwarmState::new(vec![Vec2::zeros(), xt], Vec2::new(5.0, 5.0));
        let ctx = pinning_context(&s, 0, 1, &p, &sets).unwrap();
        assert!(sets.contains(line_coefficient(ctx.y_star, Vec2::zeros(), xt).unwrap()));
        s.shepherd = ctx.y_star;
        let next = step_with(&s, &p, s.shepherd, Saturation::Disabled).unwrap();
        assert!(next.distance(0, 1) > d, "d = {d}");
    }
}

#[test]
fn pinning_choice_is_uniform_over_target_neighbours() {
    // Target at the origin with four neighbours and two far sheep.
    let s = SwarmState::new(
        vec![
            Vec2::zeros(),
            Vec2::new(0.5, 0.0),
            Vec2::new(-0.5, 0.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(0.0, -0.5),
            Vec2::new(3.0, 3.0),
            Vec2::new(-3.0, 3.0),
        ],
        Vec2::new(9.0, 9.0),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let draws = 40_000;
    let mut counts = [0usize; 7];
    for _ in 0..draws {
        counts[select_pinning(&s, 0, 1.0, &mut rng).unwrap()] += 1;
    }
    assert_eq!(counts[0] + counts[5] + counts[6], 0);
    let expected = draws as f64 / 4.0;
    let chi2: f64 = counts[1..5]
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 99.9th percentile of chi-square with 3 degrees of freedom.
    assert!(chi2 < 16.27, "chi2 = {chi2}, counts = {counts:?}");
}

#[test]
fn lone_target_cannot_be_pinned() {
    let s = SwarmState::new(vec![Vec2::zeros(), Vec2::new(2.0, 0.0)], Vec2::new(9.0, 9.0));
    assert!(select_pinning(&s, 0, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}
