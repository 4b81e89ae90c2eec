use proptest::prelude::*;
use rscc_core::chain::{
    admissible_words, cylinder_prob, forced_path, reachable_states, run_word, sample_chain, sample_path_stream,
    sample_path_with_maps, transition_probs, update_state,
};
use rscc_core::scenario::{builtin, embed_gdms, GdmsEdge};
use rscc_core::{compose_monomials, MapSpec, Monomial, ScenarioSpec, StatePoint};

fn ladder_state() -> impl Strategy<Value = StatePoint> {
    prop_oneof![
        (0u64..40).prop_map(StatePoint::rung),
        Just(StatePoint::extra("2")),
    ]
}

fn unit_state() -> impl Strategy<Value = StatePoint> {
    (0u32..=64).prop_map(|k| StatePoint::real(k as f64 / 64.0))
}

fn scenario_and_state() -> impl Strategy<Value = (ScenarioSpec, StatePoint)> {
    prop_oneof![
        ladder_state().prop_map(|w| (builtin::jump_annulus(), w)),
        ladder_state().prop_map(|w| (builtin::fattening(), match w {
            StatePoint::Ladder(rscc_core::state::Rung::Extra(_)) => StatePoint::rung(0),
            w => w,
        })),
        unit_state().prop_map(|w| (builtin::reinforcement(0.5).unwrap(), w)),
        (1u32..=63).prop_map(|k| (
            builtin::reinforcement_trunc(0.5, 0.01).unwrap(),
            StatePoint::real(0.01 + 0.98 * k as f64 / 64.0)
        )),
        prop_oneof![Just("v0"), Just("v1")].prop_map(|v| (builtin::gdms_demo(), StatePoint::discrete(v))),
    ]
}

/// Every word in `X^n` with positive cylinder probability, by brute force.
fn brute_words(spec: &ScenarioSpec, w: &StatePoint, n: usize) -> Vec<Vec<usize>> {
    let k = spec.indices.len();
    let mut out = Vec::new();
    for code in 0..k.pow(n as u32) {
        let mut c = code;
        let mut word = vec![0; n];
        for slot in word.iter_mut().rev() {
            *slot = c % k;
            c /= k;
        }
        if cylinder_prob(spec, w, &word).unwrap() > 0.0 {
            out.push(word);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_are_distributions((spec, w) in scenario_and_state()) {
        let row = transition_probs(&spec, &w).unwrap();
        prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn chain_rule((spec, w) in scenario_and_state(), a in prop::collection::vec(0usize..2, 0..4), b in prop::collection::vec(0usize..2, 0..4)) {
        let pa = cylinder_prob(&spec, &w, &a).unwrap();
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let pab = cylinder_prob(&spec, &w, &ab).unwrap();
        let expect = if pa > 0.0 {
            pa * cylinder_prob(&spec, &run_word(&spec, &w, &a).unwrap(), &b).unwrap()
        } else {
            0.0
        };
        prop_assert!((pab - expect).abs() <= 1e-14, "{pab} vs {expect}");
    }

    #[test]
    fn admissible_words_match_brute_force((spec, w) in scenario_and_state(), n in 1usize..=6) {
        let mut fast = admissible_words(&spec, &w, n).unwrap();
        fast.sort();
        prop_assert_eq!(fast, brute_words(&spec, &w, n));
    }

    #[test]
    fn cylinders_of_length_n_sum_to_one((spec, w) in scenario_and_state(), n in 1usize..=5) {
        let total: f64 = admissible_words(&spec, &w, n).unwrap().iter().map(|x| cylinder_prob(&spec, &w, x).unwrap()).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampled_states_follow_the_update((spec, w) in scenario_and_state(), n in 1usize..30, seed in any::<u64>()) {
        let (word, states) = sample_chain(&spec, &w, n, seed).unwrap();
        prop_assert_eq!(states.len(), n + 1);
        for k in 0..n {
            prop_assert_eq!(&states[k + 1], &update_state(&spec, &states[k], word[k]).unwrap());
        }
        prop_assert!(cylinder_prob(&spec, &w, &word).unwrap() > 0.0);
    }

    #[test]
    fn path_log_prob_is_the_step_sum((spec, w) in scenario_and_state(), n in 1usize..12, seed in any::<u64>()) {
        let p = sample_path_with_maps(&spec, &w, n, seed).unwrap();
        let sum: f64 = p.step_log_probs.iter().sum();
        prop_assert!((p.log_prob - sum).abs() <= 1e-12);
        let (word, _) = sample_chain(&spec, &w, n, seed).unwrap();
        prop_assert_eq!(&p.indices, &word);
        let weights: f64 = p.indices.iter().zip(&p.map_ids).map(|(x, m)| spec.tau[*x][*m].weight.ln()).sum();
        let cyl = cylinder_prob(&spec, &w, &p.indices).unwrap().ln();
        prop_assert!((p.log_prob - (cyl + weights)).abs() <= 1e-9);
    }

    #[test]
    fn same_address_same_path((spec, w) in scenario_and_state(), seed in any::<u64>(), stream in any::<u64>()) {
        let a = sample_path_stream(&spec, &w, 8, seed, stream).unwrap();
        let b = sample_path_stream(&spec, &w, 8, seed, stream).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reachable_sets_grow_with_depth((spec, w) in scenario_and_state(), d in 1usize..5) {
        let small = reachable_states(&spec, &w, d).unwrap();
        let big = reachable_states(&spec, &w, d + 1).unwrap();
        prop_assert!(small.iter().all(|s| big.iter().any(|t| t.approx_eq(s))));
    }
}

#[test]
fn first_index_frequency_at_state_one() {
    let s = builtin::jump_annulus();
    let x1 = s.index_by_name("x1").unwrap();
    let n = 100_000;
    let hits = (0..n).filter(|seed| sample_chain(&s, &StatePoint::rung(1), 1, *seed).unwrap().0[0] == x1).count();
    let freq = hits as f64 / n as f64;
    assert!((freq - cylinder_prob(&s, &StatePoint::rung(1), &[x1]).unwrap()).abs() <= 0.01, "{freq}");
}

#[test]
fn map_frequency_given_the_jump_index() {
    let s = builtin::jump_annulus();
    let two = StatePoint::extra("2");
    let n = 100_000u64;
    let f_count = (0..n)
        .filter(|seed| sample_path_with_maps(&s, &two, 1, *seed).unwrap().map_ids[0] == 0)
        .count();
    assert!((f_count as f64 / n as f64 - 0.5).abs() <= 0.01);
}

#[test]
fn reinforcement_log_prob_matches_enumeration() {
    let s = builtin::reinforcement(0.5).unwrap();
    let w = StatePoint::real(0.5);
    for seed in 0..20 {
        let p = sample_path_with_maps(&s, &w, 3, seed).unwrap();
        // brute force: product of transition rows along the drawn word, maps are Dirac
        let mut state = w.clone();
        let mut prob = 1.0;
        for &x in &p.indices {
            let p_one = match &state {
                StatePoint::Real(v) => rscc_core::state::to_f64(v),
                _ => unreachable!(),
            };
            prob *= if s.index_name(x) == "1" { p_one } else { 1.0 - p_one };
            let a = 0.5;
            let xv: f64 = s.index_name(x).parse().unwrap();
            state = StatePoint::real((1.0 - a) * p_one + a * xv);
        }
        assert!((p.log_prob.exp() - prob).abs() <= 1e-10);
    }
}

#[test]
fn dirac_maps_follow_indices() {
    let s = builtin::reinforcement(0.5).unwrap();
    for seed in 0..50 {
        let p = sample_path_with_maps(&s, &StatePoint::real(0.3), 10, seed).unwrap();
        assert!(p.map_ids.iter().all(|m| *m == 0));
    }
}

fn gdms_f() -> MapSpec {
    MapSpec::monomial(1.0, 2).unwrap()
}

#[test]
fn single_self_edge_is_iid() {
    let s = embed_gdms(1, &[GdmsEdge { from: 0, to: 0, maps: vec![(gdms_f(), 1.0)] }]).unwrap();
    let words = admissible_words(&s, &StatePoint::discrete("v0"), 5).unwrap();
    assert_eq!(words, vec![vec![0; 5]]);
}

#[test]
fn two_cycle_alternates() {
    let s = embed_gdms(
        2,
        &[
            GdmsEdge { from: 0, to: 1, maps: vec![(gdms_f(), 1.0)] },
            GdmsEdge { from: 1, to: 0, maps: vec![(gdms_f(), 1.0)] },
        ],
    )
    .unwrap();
    let e01 = s.index_by_name("e0_1").unwrap();
    let e10 = s.index_by_name("e1_0").unwrap();
    assert_eq!(admissible_words(&s, &StatePoint::discrete("v0"), 4).unwrap(), vec![vec![e01, e10, e01, e10]]);
    assert_eq!(admissible_words(&s, &StatePoint::discrete("v1"), 4).unwrap(), vec![vec![e10, e01, e10, e01]]);
}

/// Compositions along GDMS paths from `v`, read off the edge list directly.
fn gdms_family(edges: &[GdmsEdge], v: usize, n: usize) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    fn walk(edges: &[GdmsEdge], v: usize, n: usize, acc: Vec<Monomial>, out: &mut Vec<(u64, i64)>) {
        if n == 0 {
            out.push(key(&acc));
            return;
        }
        for e in edges.iter().filter(|e| e.from == v) {
            for (m, mass) in &e.maps {
                if *mass > 0.0 {
                    let mut next = acc.clone();
                    next.push(*m.as_monomial().unwrap());
                    walk(edges, e.to, n - 1, next, out);
                }
            }
        }
    }
    walk(edges, v, n, Vec::new(), &mut out);
    out.sort();
    out
}

/// Applied-first-to-last list to a comparable `(degree, log-coefficient·1e9)` key.
fn key(applied: &[Monomial]) -> (u64, i64) {
    if applied.is_empty() {
        return (1, 0);
    }
    let rev: Vec<Monomial> = applied.iter().rev().copied().collect();
    let m = compose_monomials(&rev).unwrap();
    (m.degree, (m.log_coeff * 1e9).round() as i64)
}

fn embedded_family(spec: &ScenarioSpec, w: &StatePoint, n: usize) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    for word in admissible_words(spec, w, n).unwrap() {
        let sizes: Vec<usize> = word.iter().map(|x| spec.tau[*x].len()).collect();
        let total: usize = sizes.iter().product();
        for mut code in 0..total {
            let mut ids = vec![0; n];
            for (slot, size) in ids.iter_mut().zip(&sizes) {
                *slot = code % size;
                code /= size;
            }
            let p = forced_path(spec, w, &word, &ids, 0).unwrap();
            let monos: Vec<Monomial> = p.maps.iter().map(|m| *m.as_monomial().unwrap()).collect();
            out.push(key(&monos));
        }
    }
    out.sort();
    out
}

#[test]
fn embedding_reproduces_gdms_families() {
    let f = gdms_f();
    let g = MapSpec::monomial(0.5, 2).unwrap();
    let h = MapSpec::monomial(3.0, 3).unwrap();
    let edges = vec![
        GdmsEdge { from: 0, to: 0, maps: vec![(f.clone(), 0.5)] },
        GdmsEdge { from: 0, to: 1, maps: vec![(g.clone(), 0.3), (h.clone(), 0.2)] },
        GdmsEdge { from: 1, to: 2, maps: vec![(f.clone(), 1.0)] },
        GdmsEdge { from: 2, to: 0, maps: vec![(h, 0.6)] },
        GdmsEdge { from: 2, to: 2, maps: vec![(g, 0.4)] },
    ];
    let spec = embed_gdms(3, &edges).unwrap();
    for v in 0..3 {
        for n in 1..=4 {
            let w = StatePoint::discrete(&format!("v{v}"));
            assert_eq!(embedded_family(&spec, &w, n), gdms_family(&edges, v, n), "vertex {v}, depth {n}");
        }
    }
}

#[test]
fn reach_examples() {
    let ja = builtin::jump_annulus();
    assert_eq!(reachable_states(&ja, &StatePoint::extra("2"), 5).unwrap(), vec![StatePoint::extra("2")]);
    let fat = builtin::fattening();
    assert_eq!(reachable_states(&fat, &StatePoint::rung(0), 5).unwrap(), vec![StatePoint::rung(0)]);
}
