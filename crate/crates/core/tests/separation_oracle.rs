mod common;

use proptest::prelude::*;
use shepherd_core::separation::{
    feasible_sets, line_coefficient, project_to_feasible_line, separation_gain, SeparationProbe, CLAMP_MARGIN,
    DEFAULT_DOMAIN_BOUND,
};
use shepherd_core::swarm::{step_with, Saturation, SwarmParams, SwarmState};
use shepherd_core::Vec2;

// Reference endpoints from an independent root solve of the boundary
// equations at the default gains.
const C1_LO: f64 = -0.473_482_664_064_202_3;
const C2_HI_LO: f64 = 0.318_697_139_998_654_3;
const C2_LO_HI: f64 = 0.681_302_860_001_345_7;
const C3_HI: f64 = 1.473_482_664_064_202_3;

#[test]
fn default_endpoints_match_reference_roots() {
    let s = feasible_sets(&SwarmParams::default(), DEFAULT_DOMAIN_BOUND).unwrap();
    assert!((s.c1[0].lo - C1_LO).abs() <= 1e-9);
    assert!((s.c2[0].hi - C2_HI_LO).abs() <= 1e-9);
    assert!((s.c2[1].lo - C2_LO_HI).abs() <= 1e-9);
    assert!((s.c3[0].hi - C3_HI).abs() <= 1e-9);
}

#[test]
fn proof_scalars_at_reference_configuration() {
    let probe = SeparationProbe::new(Vec2::new(0.8, 0.0), 0.3, &SwarmParams::default()).unwrap();
    assert!((probe.f - 6.750).abs() < 5e-3, "f = {}", probe.f);
    assert!((probe.e - 5.40).abs() < 5e-3, "e = {}", probe.e);
}

fn feasible_c() -> impl Strategy<Value = f64> {
    prop_oneof![
        C1_LO + 1e-6..-1e-6,
        1e-6..C2_HI_LO - 1e-6,
        C2_LO_HI + 1e-6..1.0 - 1e-6,
        1.0 + 1e-6..C3_HI - 1e-6
    ]
}

proptest! {
    #[test]
    fn feasible_placement_grows_distance_by_predicted_gain(
        c in feasible_c(),
        len in 0.05..1.0f64,
        angle in 0.0..std::f64::consts::TAU,
        ox in -5.0..5.0f64,
        oy in -5.0..5.0f64,
    ) {
        let p = SwarmParams::default();
        let delta = Vec2::new(angle.cos(), angle.sin()) * len;
        let x1 = Vec2::new(ox, oy);
        let s = SwarmState::new(vec![x1, x1 + delta], x1 + delta * c);
        let next = step_with(&s, &p, s.shepherd, Saturation::Disabled).unwrap();
        let grown = (next.positions[1] - next.positions[0]).norm() - len;
        let predicted = separation_gain(delta, c, &p).unwrap();
        prop_assert!(grown > 0.0);
        prop_assert!((grown - predicted).abs() <= 1e-9 * predicted.abs());
    }

    #[test]
    fn membership_matches_printed_inequalities(c in -3.0..4.0f64) {
        let p = SwarmParams::default();
        let s = feasible_sets(&p, DEFAULT_DOMAIN_BOUND).unwrap();
        let near = s.intervals().any(|i| (c - i.lo).abs() <= s.tol || (c - i.hi).abs() <= s.tol);
        prop_assume!(!near);
        prop_assert_eq!(s.contains(c), common::printed_inequality(c, &p));
    }

    #[test]
    fn projection_lands_on_feasible_line(
        yx in -4.0..4.0f64, yy in -4.0..4.0f64,
        tx in -2.0..2.0f64, ty in -2.0..2.0f64,
    ) {
        let s = feasible_sets(&SwarmParams::default(), DEFAULT_DOMAIN_BOUND).unwrap();
        let xp = Vec2::zeros();
        let xt = Vec2::new(tx, ty);
        prop_assume!(xt.norm() > 0.05);
        let y = project_to_feasible_line(Vec2::new(yx, yy), xp, xt, &s).unwrap();
        let c = line_coefficient(y, xp, xt).unwrap();
        prop_assert!(s.contains(c), "c = {}", c);
        prop_assert!((xp + (xt - xp) * c - y).norm() <= 1e-9);
    }
}

#[test]
fn infeasible_coefficients_snap_inside_nearest_interval() {
    let s = feasible_sets(&SwarmParams::default(), DEFAULT_DOMAIN_BOUND).unwrap();
    let xp = Vec2::zeros();
    let xt = Vec2::new(1.0, 0.0);
    let y = project_to_feasible_line(Vec2::new(0.5, 0.3), xp, xt, &s).unwrap();
    let c = line_coefficient(y, xp, xt).unwrap();
    assert!(s.contains(c));
    assert!((c - (C2_HI_LO - CLAMP_MARGIN)).abs() < 1e-8 || (c - (C2_LO_HI + CLAMP_MARGIN)).abs() < 1e-8);
    let far = project_to_feasible_line(Vec2::new(5.0, 0.0), xp, xt, &s).unwrap();
    assert!((far.x - (C3_HI - CLAMP_MARGIN)).abs() < 1e-8);
}
