use proptest::prelude::*;
use rscc_core::analysis::{
    check_irreducible, detect_jump, fattening_experiment, propagation_check, Drive, JumpVerdict, DEFAULT_CONV_TOL,
};
use rscc_core::chain::{reachable_states, update_state};
use rscc_core::scenario::{builtin, embed_gdms, GdmsEdge};
use rscc_core::state::{exact, exact_ratio};
use rscc_core::{KernelCertificate, MapSpec, ScenarioSpec, StatePoint};

const EPS: f64 = 0.01;
const LEVELS: i64 = 21;

fn quantized() -> ScenarioSpec {
    builtin::reinforcement_trunc_quantized(0.5, EPS, Some(LEVELS as u32)).unwrap()
}

/// `ε + k(1 - 2ε)/20` in exact arithmetic, `k = 0..=20`.
fn grid_states() -> Vec<StatePoint> {
    let (lo, hi) = (exact(EPS), exact(1.0 - EPS));
    (0..LEVELS)
        .map(|k| StatePoint::Real(&lo + (&hi - &lo) * exact_ratio(k, LEVELS - 1)))
        .collect()
}

#[test]
fn quantized_updates_stay_on_the_grid() {
    let spec = quantized();
    let grid = grid_states();
    for w in &grid {
        for x in 0..2 {
            let next = update_state(&spec, w, x).unwrap();
            assert!(grid.contains(&next), "{w:?} --{x}--> {next:?}");
        }
    }
    let reach = reachable_states(&spec, &StatePoint::real(0.5), 60).unwrap();
    assert!(reach.iter().all(|s| grid.contains(s)));
}

#[test]
fn quantized_grid_is_irreducible_and_propagates() {
    let spec = quantized();
    let grid = grid_states();
    assert!(check_irreducible(&spec, &grid, 200).unwrap().irreducible);
    let prop = propagation_check(&spec, &grid, 2).unwrap();
    assert!(prop.holds && !prop.vacuous);
    assert!(prop.verdicts.iter().all(|(_, c)| c.is_empty_certified()));
}

#[test]
fn reducible_sets_name_a_witness() {
    let spec = builtin::reinforcement(0.5).unwrap();
    // 0 is absorbing
    let states = [StatePoint::real(0.0), StatePoint::real(0.5)];
    let r = check_irreducible(&spec, &states, 4).unwrap();
    assert!(!r.irreducible);
    assert_eq!(r.witness.unwrap().0, StatePoint::real(0.0));
}

#[test]
fn propagation_needs_irreducibility() {
    // 0.3 is off the grid, so nothing returns to it
    let mut states = grid_states();
    states.push(StatePoint::real(0.3));
    assert!(!check_irreducible(&quantized(), &states, 200).unwrap().irreducible);
    assert!(propagation_check(&quantized(), &states, 2).is_err());
}

#[test]
fn alternating_cycle_propagation_is_vacuous() {
    let f = MapSpec::monomial(1.0, 2).unwrap();
    let spec = embed_gdms(
        2,
        &[
            GdmsEdge { from: 0, to: 1, maps: vec![(f.clone(), 1.0)] },
            GdmsEdge { from: 1, to: 0, maps: vec![(f, 1.0)] },
        ],
    )
    .unwrap();
    let states = [StatePoint::discrete("v0"), StatePoint::discrete("v1")];
    let prop = propagation_check(&spec, &states, 4).unwrap();
    assert!(prop.holds && prop.vacuous);
    assert!(prop.verdicts.iter().all(|(_, c)| matches!(c, KernelCertificate::UnknownSuperset(..))));
}

#[test]
fn ladder_jump_under_forced_advance() {
    let spec = builtin::jump_annulus();
    let x1 = spec.index_by_name("x1").unwrap();
    for depth in 2..=4 {
        let r = detect_jump(&spec, &StatePoint::rung(1), &Drive::Forced(vec![x1]), 50, depth, DEFAULT_CONV_TOL).unwrap();
        assert_eq!(r.verdict, JumpVerdict::JumpDetected, "kernel depth {depth}");
        assert_eq!(r.limit_state, Some(StatePoint::rung(0)));
        assert!(r.warning.is_none());
    }
}

#[test]
fn reinforcement_jump_toward_one() {
    let spec = builtin::reinforcement(0.5).unwrap();
    let one = spec.index_by_name("1").unwrap();
    let r = detect_jump(&spec, &StatePoint::real(0.5), &Drive::Forced(vec![one]), 60, 2, DEFAULT_CONV_TOL).unwrap();
    assert_eq!(r.limit_state, Some(StatePoint::real(1.0)));
    assert_eq!(r.verdict, JumpVerdict::JumpDetected);
}

#[test]
fn truncated_reinforcement_never_jumps() {
    let spec = builtin::reinforcement_trunc(0.5, EPS).unwrap();
    for x in 0..2 {
        let r = detect_jump(&spec, &StatePoint::real(0.5), &Drive::Forced(vec![x]), 200, 2, DEFAULT_CONV_TOL).unwrap();
        assert_eq!(r.verdict, JumpVerdict::NoJumpWithinHorizon);
    }
}

#[test]
fn fattening_against_product_formula() {
    let spec = builtin::fattening();
    let x1 = spec.index_by_name("x1").unwrap();
    let trace = fattening_experiment(0.1, 0.1, 60, &Drive::Forced(vec![x1])).unwrap();
    let product: f64 = (1..=60).map(|n| 1.0 - 0.5f64.powi(n)).product();
    assert!((trace.all_x1_probability - product).abs() <= 1e-12);
    for s in &trace.steps {
        assert!((s.y - 0.1 / 2f64.powi(s.k as i32)).abs() <= 1e-15);
        assert_eq!(s.dist_unfattened, f64::INFINITY);
        let n = s.k + 1;
        if 1.0 / (n as f64) < 0.1 {
            assert_eq!(s.dist_thickened, s.y);
        } else {
            assert_eq!(s.dist_thickened, f64::INFINITY);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn discrete_scenarios_never_jump(seed in any::<u64>(), start in prop_oneof![Just("v0"), Just("v1")], horizon in 1usize..200) {
        let spec = builtin::gdms_demo();
        let r = detect_jump(&spec, &StatePoint::discrete(start), &Drive::Sampled(seed), horizon, 2, DEFAULT_CONV_TOL).unwrap();
        prop_assert_eq!(r.verdict, JumpVerdict::NoJumpWithinHorizon);
    }

    #[test]
    fn thickening_never_loses_the_kernel(eps in 0.01f64..0.5, y0 in 0.001f64..0.12, horizon in 1usize..80) {
        let x1 = builtin::fattening().index_by_name("x1").unwrap();
        let trace = fattening_experiment(eps, y0, horizon, &Drive::Forced(vec![x1])).unwrap();
        for s in &trace.steps {
            prop_assert!(s.dist_thickened <= s.dist_unfattened);
        }
        let d: Vec<f64> = trace.steps.iter().map(|s| s.dist_thickened).filter(|d| d.is_finite()).collect();
        prop_assert!(d.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sampled_fattening_paths_are_valid(seed in any::<u64>()) {
        let trace = fattening_experiment(0.1, 0.1, 60, &Drive::Sampled(seed)).unwrap();
        prop_assert_eq!(trace.steps.len(), 61);
        prop_assert!(trace.steps.iter().all(|s| (0.0..=0.125).contains(&s.y)));
    }
}
