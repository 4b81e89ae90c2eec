use proptest::prelude::*;
use rscc::config::{load_scenario, parse_scenario, scenario_to_ini};
use rscc_core::scenario::{builtin, embed_gdms, GdmsEdge};
use rscc_core::{MapSpec, ScenarioSpec};

/// Equality up to the last bit of monomial log-coefficients, which the
/// decimal coefficient in the file does not always preserve.
fn assert_same(a: &ScenarioSpec, b: &ScenarioSpec) {
    assert_eq!(a.name, b.name);
    assert_eq!(a.state_space, b.state_space);
    assert_eq!(a.indices, b.indices);
    assert_eq!(a.update, b.update);
    assert_eq!(a.transition, b.transition);
    assert_eq!(a.radial_classes, b.radial_classes);
    assert_eq!(a.tau.len(), b.tau.len());
    for (x, y) in a.tau.iter().flatten().zip(b.tau.iter().flatten()) {
        assert_eq!(x.name, y.name);
        assert!((x.weight - y.weight).abs() <= 1e-15);
        match (x.map.as_monomial(), y.map.as_monomial()) {
            (Some(m), Some(n)) => {
                assert_eq!(m.degree, n.degree);
                assert!((m.log_coeff - n.log_coeff).abs() <= 1e-14, "{} vs {}", m.log_coeff, n.log_coeff);
            }
            _ => assert_eq!(x.map, y.map),
        }
    }
}

#[test]
fn builtins_round_trip() {
    for name in builtin::NAMES {
        let spec = builtin::by_name(name, None, None).unwrap();
        assert_same(&parse_scenario(&scenario_to_ini(&spec)).unwrap(), &spec);
    }
    let q = builtin::reinforcement_trunc_quantized(0.3, 0.05, Some(11)).unwrap();
    assert_same(&parse_scenario(&scenario_to_ini(&q)).unwrap(), &q);
}

#[test]
fn files_load_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.ini");
    std::fs::write(&path, scenario_to_ini(&builtin::gdms_demo())).unwrap();
    assert_same(&load_scenario(path.to_str().unwrap(), None, None).unwrap(), &builtin::gdms_demo());
}

#[test]
fn malformed_files_are_rejected() {
    let good = scenario_to_ini(&builtin::jump_annulus());
    for broken in [
        good.replace("kind = ladder", "kind = spiral"),
        good.replace("[tau.x2]", "[tau.x9]"),
        good.replace("0.5 monomial", "0.7 monomial"),
        good.replace("decay = reciprocal", ""),
        "name = x\n[state]\nkind = interval\nlo = 1\nhi = 0\n".to_string(),
    ] {
        assert!(parse_scenario(&broken).is_err(), "accepted:\n{broken}");
    }
}

fn monomial() -> impl Strategy<Value = MapSpec> {
    (0.1f64..10.0, 2u64..5).prop_map(|(c, d)| MapSpec::monomial(c, d).unwrap())
}

fn gdms() -> impl Strategy<Value = ScenarioSpec> {
    (1usize..4)
        .prop_flat_map(|v| {
            let edges = prop::collection::vec(
                (0..v, prop::collection::vec((monomial(), 0.05f64..1.0), 1..3)),
                v..=v,
            );
            (Just(v), edges)
        })
        .prop_map(|(v, edges)| {
            // vertex i sends its mass to `target`, split over the listed maps
            let edges: Vec<GdmsEdge> = edges
                .into_iter()
                .enumerate()
                .map(|(from, (to, maps))| {
                    let total: f64 = maps.iter().map(|(_, m)| m).sum();
                    GdmsEdge { from, to, maps: maps.into_iter().map(|(f, m)| (f, m / total)).collect() }
                })
                .collect();
            embed_gdms(v, &edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_gdms_round_trip(spec in gdms()) {
        assert_same(&parse_scenario(&scenario_to_ini(&spec)).unwrap(), &spec);
    }

    #[test]
    fn reinforcement_parameters_round_trip(alpha in 0.01f64..1.0, eps in 0.001f64..0.49, levels in prop::option::of(2u32..50)) {
        let spec = builtin::reinforcement_trunc_quantized(alpha, eps, levels).unwrap();
        assert_same(&parse_scenario(&scenario_to_ini(&spec)).unwrap(), &spec);
    }
}
