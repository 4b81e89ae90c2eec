//! Scenario descriptions: state space, index set, update and transition
//! families, per-index map distributions and optional radial classes.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, invalid, Result};
use crate::maps::{MapSpec, Monomial, SpherePoint};
use crate::state::{IndexId, Rung, StatePoint, StateSpace};

/// Row sums of transition and map weights must equal 1 within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MapChoice {
    pub name: String,
    pub map: MapSpec,
    pub weight: f64,
}

impl MapChoice {
    pub fn new(name: &str, map: MapSpec, weight: f64) -> Self {
        MapChoice { name: name.to_string(), map, weight }
    }
}

/// How the jump probability of a ladder decays along the rungs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderDecay {
    /// `P(1/n, jump) = 2^{-1/n}`
    Reciprocal,
    /// `P(1/n, jump) = 2^{-n}`
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRule {
    /// `1/n ↦ 1/(n+1)` on `advance`, `↦ target` on `jump`; `0` stays on
    /// `advance`; extra points are absorbing.
    Ladder { advance: usize, jump: usize, target: Rung },
    /// `p ↦ clamp((1-α)p + α·x, lo, hi)` where `x` is the numeric index name,
    /// optionally snapped to `levels` equally spaced points of `[lo, hi]`.
    ClampAffine { alpha: f64, lo: f64, hi: f64, levels: Option<u32> },
    /// `next[state][index]` as positions in the discrete label list.
    Table { next: Vec<Vec<usize>> },
    /// `u(y, x) = f_x(y)`: the state is the phase point, driven by the
    /// (Dirac) affine map of the chosen index.
    MapDriven,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Constant(f64),
    /// `θ(y) = clamp(a + b·|y|, 0, 1)`
    Affine { a: f64, b: f64 },
    /// `θ(y) = exp(-(|y| - center)² / width²)`
    Bump { center: f64, width: f64 },
}

impl Theta {
    pub fn eval(&self, y: f64) -> f64 {
        let v = match *self {
            Theta::Constant(c) => c,
            Theta::Affine { a, b } => a + b * libm::fabs(y),
            Theta::Bump { center, width } => {
                let t = (libm::fabs(y) - center) / width;
                libm::exp(-t * t)
            }
        };
        v.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransitionRule {
    /// Rung `1/n` jumps with the decayed probability and advances otherwise;
    /// `0` always advances; extra points always take the jump index.
    Ladder { decay: LadderDecay },
    /// `P(p, {1}) = p`, `P(p, {0}) = 1 - p`.
    Reinforce,
    /// `probs[state][index]`.
    Table { probs: Vec<Vec<f64>> },
    /// `P(y, {first}) = θ(y)`, `P(y, {second}) = 1 - θ(y)`.
    FeedbackTheta { theta: Theta },
}

/// Which states belong to a radial behavior class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassMember {
    /// Every `1/n` with `n ≥ 1`.
    Rungs,
    Point(StatePoint),
    Closed(f64, f64),
    Open(f64, f64),
    Label(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialClass {
    pub label: String,
    pub member: ClassMember,
    /// `(index, successor class label)`; the maps are the support of `τ_index`.
    pub transitions: Vec<(usize, String)>,
}

/// Phase space `Y` the maps act on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpace {
    Sphere,
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub state_space: StateSpace,
    pub indices: Vec<IndexId>,
    pub update: UpdateRule,
    pub transition: TransitionRule,
    pub tau: Vec<Vec<MapChoice>>,
    pub radial_classes: Option<Vec<RadialClass>>,
}

impl ScenarioSpec {
    /// Checks every structural invariant; all constructors go through here.
    pub fn validated(self) -> Result<Self> {
        let n = self.indices.len();
        if n == 0 {
            return Err(config("scenario has no indices"));
        }
        for (i, x) in self.indices.iter().enumerate() {
            if x.id != i {
                return Err(config(format!("index ids must be dense 0..{n}, found {} at {i}", x.id)));
            }
        }
        if self.tau.len() != n {
            return Err(config(format!("expected {n} map distributions, found {}", self.tau.len())));
        }
        for (i, dist) in self.tau.iter().enumerate() {
            if dist.is_empty() {
                return Err(config(format!("index {} has no maps", self.indices[i].name)));
            }
            if dist.iter().any(|c| !(c.weight > 0.0)) {
                return Err(config(format!("index {} has a non-positive map weight", self.indices[i].name)));
            }
            let s: f64 = dist.iter().map(|c| c.weight).sum();
            if (s - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(config(format!("map weights of {} sum to {s}", self.indices[i].name)));
            }
        }
        self.phase_space()?;
        self.check_families()?;
        if let Some(classes) = &self.radial_classes {
            for (k, c) in classes.iter().enumerate() {
                if classes[..k].iter().any(|d| d.label == c.label) {
                    return Err(config(format!("duplicate radial class '{}'", c.label)));
                }
            }
            for c in classes {
                for (x, succ) in &c.transitions {
                    if *x >= n {
                        return Err(config(format!("class {} uses unknown index {x}", c.label)));
                    }
                    if !classes.iter().any(|d| &d.label == succ) {
                        return Err(config(format!("class {} points to unknown class {succ}", c.label)));
                    }
                }
            }
        }
        Ok(self)
    }

    fn check_families(&self) -> Result<()> {
        let n = self.indices.len();
        match (&self.update, &self.state_space) {
            (UpdateRule::Ladder { advance, jump, target }, StateSpace::Ladder { extras }) => {
                if *advance >= n || *jump >= n || advance == jump {
                    return Err(config("ladder update needs distinct advance and jump indices"));
                }
                if let Rung::Extra(l) = target {
                    if !extras.contains(l) {
                        return Err(config(format!("ladder jump target {l} is not a declared extra")));
                    }
                }
            }
            (UpdateRule::ClampAffine { alpha, lo, hi, levels }, StateSpace::Interval { lo: a, hi: b }) => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(config("clamp-affine alpha must lie in (0, 1)"));
                }
                if lo < a || hi > b || !(lo < hi) {
                    return Err(config("clamp bounds must lie inside the state interval"));
                }
                if matches!(levels, Some(k) if *k < 2) {
                    return Err(config("quantization needs at least 2 levels"));
                }
                for x in &self.indices {
                    x.name
                        .parse::<f64>()
                        .map_err(|_| config(format!("clamp-affine index '{}' must be numeric", x.name)))?;
                }
            }
            (UpdateRule::Table { next }, StateSpace::Discrete { labels }) => {
                if next.len() != labels.len() || next.iter().any(|r| r.len() != n || r.iter().any(|&s| s >= labels.len())) {
                    return Err(config("update table must be |states| x |indices| with valid targets"));
                }
            }
            (UpdateRule::MapDriven, StateSpace::Interval { lo, hi }) => {
                for (i, dist) in self.tau.iter().enumerate() {
                    match dist.as_slice() {
                        [MapChoice { map: MapSpec::AffineInterval { lo: l, hi: h, .. }, .. }] if l == lo && h == hi => {}
                        _ => {
                            return Err(config(format!(
                                "map-driven update needs a single affine map on the state interval for index {}",
                                self.indices[i].name
                            )))
                        }
                    }
                }
            }
            (u, s) => {
                return Err(config(format!("update family {u:?} does not fit a {} state space", s.kind_name())));
            }
        }
        match (&self.transition, &self.state_space) {
            (TransitionRule::Ladder { .. }, StateSpace::Ladder { .. }) => {
                if !matches!(self.update, UpdateRule::Ladder { .. }) {
                    return Err(config("ladder transitions need a ladder update"));
                }
            }
            (TransitionRule::Reinforce, StateSpace::Interval { lo, hi }) => {
                let mut names: Vec<f64> = self.indices.iter().filter_map(|x| x.name.parse().ok()).collect();
                names.sort_by(f64::total_cmp);
                if names != [0.0, 1.0] || *lo < 0.0 || *hi > 1.0 {
                    return Err(config("reinforce transitions need indices 0 and 1 and states in [0, 1]"));
                }
            }
            (TransitionRule::Table { probs }, StateSpace::Discrete { labels }) => {
                if probs.len() != labels.len() || probs.iter().any(|r| r.len() != n) {
                    return Err(config("transition table must be |states| x |indices|"));
                }
                for (s, row) in probs.iter().enumerate() {
                    if row.iter().any(|p| !(*p >= 0.0)) {
                        return Err(config(format!("negative transition weight at state {}", labels[s])));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                        return Err(config(format!("transition row of {} sums to {sum}", labels[s])));
                    }
                }
            }
            (TransitionRule::FeedbackTheta { .. }, StateSpace::Interval { .. }) => {
                if n != 2 {
                    return Err(config("feedback transitions need exactly two indices"));
                }
            }
            (t, s) => {
                return Err(config(format!("transition family {t:?} does not fit a {} state space", s.kind_name())));
            }
        }
        Ok(())
    }

    /// Phase space implied by the maps: the sphere unless some map is an
    /// interval map, in which case every map must act on that interval.
    pub fn phase_space(&self) -> Result<PhaseSpace> {
        let mut interval: Option<(f64, f64)> = None;
        let mut sphere_only = false;
        for c in self.tau.iter().flatten() {
            match &c.map {
                MapSpec::AffineInterval { lo, hi, .. } => match interval {
                    None => interval = Some((*lo, *hi)),
                    Some(iv) if iv == (*lo, *hi) => {}
                    Some(_) => return Err(config("interval maps act on different intervals")),
                },
                MapSpec::Monomial(_) | MapSpec::PolynomialC(_) => sphere_only = true,
                MapSpec::Constant(_) => {}
            }
        }
        match interval {
            Some(_) if sphere_only => Err(config("scenario mixes sphere and interval maps")),
            Some((lo, hi)) => {
                for c in self.tau.iter().flatten() {
                    if let MapSpec::Constant(p) = c.map {
                        let ok = matches!(p, SpherePoint::Finite(z) if z.im == 0.0 && z.re >= lo && z.re <= hi);
                        if !ok {
                            return Err(config("constant map value lies outside the phase interval"));
                        }
                    }
                }
                Ok(PhaseSpace::Interval { lo, hi })
            }
            None => Ok(PhaseSpace::Sphere),
        }
    }

    pub fn index_by_name(&self, name: &str) -> Result<usize> {
        self.indices
            .iter()
            .position(|x| x.name == name)
            .ok_or_else(|| invalid(format!("unknown index '{name}'")))
    }

    pub fn index_name(&self, x: usize) -> &str {
        &self.indices[x].name
    }

    pub fn parse_state(&self, text: &str) -> Result<StatePoint> {
        StatePoint::parse(text, &self.state_space)
    }

    /// All maps monomial (the exact radial machinery applies).
    pub fn monomial_only(&self) -> bool {
        self.tau.iter().flatten().all(|c| c.map.as_monomial().is_some())
    }

    /// Every map is open; Constant maps bar the cooperation diagnostics.
    pub fn all_maps_open(&self) -> bool {
        self.tau.iter().flatten().all(|c| c.map.is_open())
    }

    pub fn monomials_of(&self, x: usize) -> Option<Vec<Monomial>> {
        self.tau[x].iter().map(|c| c.map.as_monomial().copied()).collect()
    }
}

/// One GDMS edge `from → to` carrying the (unnormalized) map measure `τ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct GdmsEdge {
    pub from: usize,
    pub to: usize,
    pub maps: Vec<(MapSpec, f64)>,
}

impl GdmsEdge {
    pub fn mass(&self) -> f64 {
        self.maps.iter().map(|(_, m)| *m).sum()
    }
}

pub fn vertex_label(i: usize) -> String {
    format!("v{i}")
}

/// Realizes a finite graph directed Markov system as a scenario: states are
/// vertices, indices are edges of positive mass, `u(w, e) = t(e)` when
/// `i(e) = w` (else `w`), `P(w, {e}) = mass(e)` when `i(e) = w` (else 0),
/// and `Γ_e` is the support of the edge measure.
pub fn embed_gdms(vertex_count: usize, edges: &[GdmsEdge]) -> Result<ScenarioSpec> {
    if vertex_count == 0 {
        return Err(invalid("a GDMS needs at least one vertex"));
    }
    let live: Vec<&GdmsEdge> = edges.iter().filter(|e| e.mass() > 0.0).collect();
    for e in &live {
        if e.from >= vertex_count || e.to >= vertex_count {
            return Err(invalid(format!("edge ({}, {}) uses an unknown vertex", e.from, e.to)));
        }
        if e.maps.iter().any(|(_, m)| *m < 0.0) {
            return Err(invalid("negative map mass"));
        }
    }
    for v in 0..vertex_count {
        let s: f64 = live.iter().filter(|e| e.from == v).map(|e| e.mass()).sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(invalid(format!("outgoing masses of vertex {v} sum to {s}")));
        }
    }
    let labels: Vec<String> = (0..vertex_count).map(vertex_label).collect();
    let indices: Vec<IndexId> = live
        .iter()
        .enumerate()
        .map(|(k, e)| IndexId::new(k, &format!("e{}_{}", e.from, e.to)))
        .collect();
    let next = (0..vertex_count)
        .map(|w| live.iter().map(|e| if e.from == w { e.to } else { w }).collect())
        .collect();
    let probs = (0..vertex_count)
        .map(|w| live.iter().map(|e| if e.from == w { e.mass() } else { 0.0 }).collect())
        .collect();
    let tau: Vec<Vec<MapChoice>> = live
        .iter()
        .map(|e| {
            let m = e.mass();
            e.maps
                .iter()
                .filter(|(_, w)| *w > 0.0)
                .enumerate()
                .map(|(k, (map, w))| MapChoice::new(&format!("m{k}"), map.clone(), w / m))
                .collect()
        })
        .collect();
    let monomial = live.iter().all(|e| e.maps.iter().all(|(m, _)| m.as_monomial().is_some()));
    let radial_classes = monomial.then(|| {
        (0..vertex_count)
            .map(|v| RadialClass {
                label: vertex_label(v),
                member: ClassMember::Label(vertex_label(v)),
                transitions: live
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.from == v)
                    .map(|(k, e)| (k, vertex_label(e.to)))
                    .collect(),
            })
            .collect()
    });
    ScenarioSpec {
        name: "gdms".into(),
        state_space: StateSpace::Discrete { labels },
        indices,
        update: UpdateRule::Table { next },
        transition: TransitionRule::Table { probs },
        tau,
        radial_classes,
    }
    .validated()
}

pub mod builtin {
    //! The named scenarios reproducing the worked examples.

    use super::*;

    pub const NAMES: [&str; 6] = ["jump-annulus", "fattening", "reinforcement", "reinforcement-trunc", "feedback", "gdms-demo"];

    pub const DEFAULT_ALPHA: f64 = 0.5;
    pub const DEFAULT_EPS: f64 = 0.01;

    fn f() -> MapSpec {
        MapSpec::monomial(1.0, 2).expect("z^2")
    }

    fn g() -> MapSpec {
        MapSpec::monomial(0.5, 2).expect("z^2/2")
    }

    fn class(label: &str, member: ClassMember, transitions: &[(usize, &str)]) -> RadialClass {
        RadialClass {
            label: label.into(),
            member,
            transitions: transitions.iter().map(|(x, s)| (*x, s.to_string())).collect(),
        }
    }

    /// Ladder `{0} ∪ {1/n} ∪ {2}` with `Γ_{x1} = {z²}` and `Γ_{x2} = {z², z²/2}`
    /// (uniform weights on `Γ_{x2}`).
    pub fn jump_annulus() -> ScenarioSpec {
        ScenarioSpec {
            name: "jump-annulus".into(),
            state_space: StateSpace::Ladder { extras: vec!["2".into()] },
            indices: vec![IndexId::new(0, "x1"), IndexId::new(1, "x2")],
            update: UpdateRule::Ladder { advance: 0, jump: 1, target: Rung::Extra("2".into()) },
            transition: TransitionRule::Ladder { decay: LadderDecay::Reciprocal },
            tau: vec![
                vec![MapChoice::new("f", f(), 1.0)],
                vec![MapChoice::new("f", f(), 0.5), MapChoice::new("g", g(), 0.5)],
            ],
            radial_classes: Some(vec![
                class("Ladder", ClassMember::Rungs, &[(0, "Ladder"), (1, "Two")]),
                class("Zero", ClassMember::Point(StatePoint::rung(0)), &[(0, "Zero")]),
                class("Two", ClassMember::Point(StatePoint::extra("2")), &[(1, "Two")]),
            ]),
        }
        .validated()
        .expect("builtin jump-annulus")
    }

    /// Ladder `{0} ∪ {1/n}` acting on `Y = [0, 1]` by `y/2` and the constant `1/8`.
    pub fn fattening() -> ScenarioSpec {
        ScenarioSpec {
            name: "fattening".into(),
            state_space: StateSpace::Ladder { extras: vec![] },
            indices: vec![IndexId::new(0, "x1"), IndexId::new(1, "x2")],
            update: UpdateRule::Ladder { advance: 0, jump: 1, target: Rung::ZERO },
            transition: TransitionRule::Ladder { decay: LadderDecay::Power },
            tau: vec![
                vec![MapChoice::new("f1", MapSpec::affine(0.5, 0.0, 0.0, 1.0).expect("y/2"), 1.0)],
                vec![MapChoice::new("f2", MapSpec::Constant(SpherePoint::real(0.125)), 1.0)],
            ],
            radial_classes: None,
        }
        .validated()
        .expect("builtin fattening")
    }

    fn reinforce_classes(lo: f64, hi: f64, truncated: bool) -> Vec<RadialClass> {
        if truncated {
            vec![class("Interior", ClassMember::Closed(lo, hi), &[(0, "Interior"), (1, "Interior")])]
        } else {
            vec![
                class("Interior", ClassMember::Open(lo, hi), &[(0, "Interior"), (1, "Interior")]),
                class("Zero", ClassMember::Point(StatePoint::real(lo)), &[(0, "Zero")]),
                class("One", ClassMember::Point(StatePoint::real(hi)), &[(1, "One")]),
            ]
        }
    }

    fn reinforce_tau() -> Vec<Vec<MapChoice>> {
        vec![vec![MapChoice::new("f0", f(), 1.0)], vec![MapChoice::new("f1", g(), 1.0)]]
    }

    /// `W = [0, 1]`, `P(p, {1}) = p`, `u(p, x) = (1-α)p + αx`, `f_0 = z²`, `f_1 = z²/2`.
    pub fn reinforcement(alpha: f64) -> Result<ScenarioSpec> {
        ScenarioSpec {
            name: "reinforcement".into(),
            state_space: StateSpace::Interval { lo: 0.0, hi: 1.0 },
            indices: vec![IndexId::new(0, "0"), IndexId::new(1, "1")],
            update: UpdateRule::ClampAffine { alpha, lo: 0.0, hi: 1.0, levels: None },
            transition: TransitionRule::Reinforce,
            tau: reinforce_tau(),
            radial_classes: Some(reinforce_classes(0.0, 1.0, false)),
        }
        .validated()
    }

    /// Reinforcement on `[ε, 1-ε]` with the update clamped to that interval.
    pub fn reinforcement_trunc(alpha: f64, eps: f64) -> Result<ScenarioSpec> {
        reinforcement_trunc_quantized(alpha, eps, None)
    }

    /// As [`reinforcement_trunc`], snapping every update to `levels` grid points.
    pub fn reinforcement_trunc_quantized(alpha: f64, eps: f64, levels: Option<u32>) -> Result<ScenarioSpec> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(invalid("eps must lie in (0, 1/2)"));
        }
        let (lo, hi) = (eps, 1.0 - eps);
        ScenarioSpec {
            name: "reinforcement-trunc".into(),
            state_space: StateSpace::Interval { lo, hi },
            indices: vec![IndexId::new(0, "0"), IndexId::new(1, "1")],
            update: UpdateRule::ClampAffine { alpha, lo, hi, levels },
            transition: TransitionRule::Reinforce,
            tau: reinforce_tau(),
            radial_classes: Some(reinforce_classes(lo, hi, true)),
        }
        .validated()
    }

    /// Feedback on `Y = W = [0, 1]`: `f(y) = y/2`, `g(y) = y/2 + 1/2`, chosen
    /// with probabilities `θ(y)` and `1 - θ(y)`, `θ(y) = 0.2 + 0.6·y`.
    pub fn feedback() -> ScenarioSpec {
        ScenarioSpec {
            name: "feedback".into(),
            state_space: StateSpace::Interval { lo: 0.0, hi: 1.0 },
            indices: vec![IndexId::new(0, "f"), IndexId::new(1, "g")],
            update: UpdateRule::MapDriven,
            transition: TransitionRule::FeedbackTheta { theta: Theta::Affine { a: 0.2, b: 0.6 } },
            tau: vec![
                vec![MapChoice::new("f", MapSpec::affine(0.5, 0.0, 0.0, 1.0).expect("y/2"), 1.0)],
                vec![MapChoice::new("g", MapSpec::affine(0.5, 0.5, 0.0, 1.0).expect("y/2+1/2"), 1.0)],
            ],
            radial_classes: None,
        }
        .validated()
        .expect("builtin feedback")
    }

    /// Two-vertex GDMS: `v0 → v0` (mass ½, `z²`), `v0 → v1` (mass ½, `z²/2`),
    /// `v1 → v0` (mass 1, `z²` and `z²/2` equally).
    pub fn gdms_demo() -> ScenarioSpec {
        let edges = [
            GdmsEdge { from: 0, to: 0, maps: vec![(f(), 0.5)] },
            GdmsEdge { from: 0, to: 1, maps: vec![(g(), 0.5)] },
            GdmsEdge { from: 1, to: 0, maps: vec![(f(), 0.5), (g(), 0.5)] },
        ];
        let mut s = embed_gdms(2, &edges).expect("builtin gdms-demo");
        s.name = "gdms-demo".into();
        s
    }

    /// Looks up a builtin by name with the given parameters.
    pub fn by_name(name: &str, alpha: Option<f64>, eps: Option<f64>) -> Result<ScenarioSpec> {
        let alpha = alpha.unwrap_or(DEFAULT_ALPHA);
        let eps = eps.unwrap_or(DEFAULT_EPS);
        match name {
            "jump-annulus" => Ok(jump_annulus()),
            "fattening" => Ok(fattening()),
            "reinforcement" => reinforcement(alpha),
            "reinforcement-trunc" => reinforcement_trunc(alpha, eps),
            "feedback" => Ok(feedback()),
            "gdms-demo" => Ok(gdms_demo()),
            other => Err(invalid(format!("unknown builtin scenario '{other}'"))),
        }
    }
}
