//! Emptiness jumps, irreducibility, kernel propagation and the thickened
//! kernel counterexample.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{cylinder_prob, reachable_states, sample_chain, update_state, PathSample, StateKey};
use crate::error::{invalid, Result};
use crate::maps::SpherePoint;
use crate::radial::{path_julia_radius, KernelCertificate, RadialModel, DEFAULT_TOL};
use crate::scenario::{builtin, ScenarioSpec, UpdateRule};
use crate::state::{Rung, StatePoint, Word};

/// Number of tail states inspected when deciding convergence.
pub const TAIL_LEN: usize = 10;
pub const DEFAULT_CONV_TOL: f64 = 1e-6;
/// Reachability depth used by [`propagation_check`].
pub const PROPAGATION_REACH_DEPTH: usize = 200;

/// How the index sequence of a trajectory is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Drive {
    /// Repeat the word cyclically.
    Forced(Word),
    Sampled(u64),
}

/// Runs the drive for `horizon` steps; forced drives must stay admissible.
pub fn drive_states(spec: &ScenarioSpec, w0: &StatePoint, drive: &Drive, horizon: usize) -> Result<(Word, Vec<StatePoint>)> {
    match drive {
        Drive::Sampled(seed) => sample_chain(spec, w0, horizon, *seed),
        Drive::Forced(pattern) => {
            if pattern.is_empty() {
                return Err(invalid("forced drive pattern is empty"));
            }
            let word: Word = pattern.iter().copied().cycle().take(horizon).collect();
            if cylinder_prob(spec, w0, &word)? <= 0.0 {
                return Err(invalid("forced drive is not admissible from the initial state"));
            }
            let mut states = vec![w0.clone()];
            for &x in &word {
                let next = update_state(spec, states.last().expect("nonempty"), x)?;
                states.push(next);
            }
            Ok((word, states))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JumpVerdict {
    JumpDetected,
    NoJumpWithinHorizon,
    NotApplicable(String),
}

impl JumpVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            JumpVerdict::JumpDetected => "JumpDetected",
            JumpVerdict::NoJumpWithinHorizon => "NoJumpWithinHorizon",
            JumpVerdict::NotApplicable(_) => "NotApplicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    /// `(step, state, kernel verdict)`; verdicts are absent when not computed.
    pub trajectory: Vec<(usize, StatePoint, Option<KernelCertificate>)>,
    pub limit_state: Option<StatePoint>,
    pub limit_verdict: Option<KernelCertificate>,
    pub verdict: JumpVerdict,
    pub warning: Option<String>,
}

/// True iff the scenario's state space is discrete; then every convergent
/// trajectory is eventually constant and no jump can occur.
pub fn no_jump_discrete_check(spec: &ScenarioSpec) -> bool {
    spec.state_space.is_discrete()
}

/// Limit candidate of a trajectory tail, with a warning when it is only the
/// final state. `None` when the tail has not settled.
fn limit_of(spec: &ScenarioSpec, word: &[usize], states: &[StatePoint], conv_tol: f64) -> (Option<StatePoint>, Option<String>) {
    let tail = &states[states.len().saturating_sub(TAIL_LEN)..];
    if tail.len() < TAIL_LEN {
        return (None, None);
    }
    let last = tail.last().expect("nonempty");
    if tail.iter().all(|s| s == last) {
        return (Some(last.clone()), None);
    }
    if let UpdateRule::Ladder { advance, .. } = spec.update {
        let tail_word = &word[word.len().saturating_sub(TAIL_LEN - 1)..];
        let on_rungs = tail.iter().all(|s| matches!(s, StatePoint::Ladder(Rung::Reciprocal(n)) if *n >= 1));
        return if on_rungs && tail_word.iter().all(|x| *x == advance) {
            (Some(StatePoint::rung(0)), None)
        } else {
            (None, None)
        };
    }
    let settled = tail.iter().all(|a| tail.iter().all(|b| spec.state_space.distance(a, b) < conv_tol));
    if !settled {
        return (None, None);
    }
    if let UpdateRule::ClampAffine { lo, hi, .. } = spec.update {
        for end in [lo, hi] {
            let e = StatePoint::real(end);
            if spec.state_space.distance(last, &e) < conv_tol {
                return (Some(e), None);
            }
        }
    }
    (Some(last.clone()), Some(format!("no known accumulation point; using the final state {last}")))
}

/// Follows the drive for `horizon` steps, certifies the kernel at every
/// visited state and at the extrapolated limit, and reports a jump when all
/// visited kernels are certified empty while the limit kernel is nonempty.
pub fn detect_jump(
    spec: &ScenarioSpec,
    w0: &StatePoint,
    drive: &Drive,
    horizon: usize,
    kernel_depth: usize,
    conv_tol: f64,
) -> Result<JumpReport> {
    if horizon == 0 || kernel_depth == 0 {
        return Err(invalid("horizon and kernel depth must be positive"));
    }
    if !(conv_tol > 0.0) {
        return Err(invalid("convergence tolerance must be positive"));
    }
    let (word, states) = drive_states(spec, w0, drive, horizon)?;
    let bare = |verdict: JumpVerdict| JumpReport {
        trajectory: states.iter().enumerate().map(|(k, s)| (k, s.clone(), None)).collect(),
        limit_state: None,
        limit_verdict: None,
        verdict,
        warning: None,
    };
    if no_jump_discrete_check(spec) {
        return Ok(bare(JumpVerdict::NoJumpWithinHorizon));
    }
    if spec.radial_classes.is_none() || !spec.monomial_only() {
        return Ok(bare(JumpVerdict::NotApplicable("kernel certificates need a monomial scenario with radial classes".into())));
    }
    let model = RadialModel::new(spec, DEFAULT_TOL)?;
    let mut cache: BTreeMap<StateKey, KernelCertificate> = BTreeMap::new();
    let mut trajectory = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let key = StateKey(s.clone());
        let cert = match cache.get(&key) {
            Some(c) => c.clone(),
            None => {
                let c = model.kernel(s, kernel_depth)?;
                cache.insert(key, c.clone());
                c
            }
        };
        trajectory.push((k, s.clone(), Some(cert)));
    }
    let (limit_state, warning) = limit_of(spec, &word, &states, conv_tol);
    let limit_verdict = match &limit_state {
        Some(l) => Some(model.kernel(l, kernel_depth)?),
        None => None,
    };
    let all_empty = trajectory
        .iter()
        .all(|(_, _, c)| c.as_ref().is_some_and(KernelCertificate::is_empty_certified));
    let verdict = match &limit_verdict {
        Some(KernelCertificate::ExactNonempty(_)) if all_empty => JumpVerdict::JumpDetected,
        _ => JumpVerdict::NoJumpWithinHorizon,
    };
    Ok(JumpReport { trajectory, limit_state, limit_verdict, verdict, warning })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Irreducibility {
    pub irreducible: bool,
    /// A state and a target singleton it never reaches.
    pub witness: Option<(StatePoint, StatePoint)>,
}

/// Counting-measure irreducibility on a finite state set: every state reaches
/// every listed state in `1..=depth` steps with positive probability. The
/// witness is taken from the state with the fewest reachable states (first in
/// list order on ties), paired with its smallest unreached target.
pub fn check_irreducible(spec: &ScenarioSpec, states: &[StatePoint], depth: usize) -> Result<Irreducibility> {
    if states.is_empty() {
        return Err(invalid("the state set is empty"));
    }
    let mut targets = states.to_vec();
    targets.sort_by(|a, b| a.canonical_cmp(b));
    let mut worst: Option<(usize, StatePoint, StatePoint)> = None;
    for w in states {
        let reach = reachable_states(spec, w, depth)?;
        let missed = targets.iter().find(|t| !reach.iter().any(|r| r.approx_eq(t)));
        if let Some(t) = missed {
            if worst.as_ref().is_none_or(|(n, _, _)| reach.len() < *n) {
                worst = Some((reach.len(), w.clone(), t.clone()));
            }
        }
    }
    Ok(match worst {
        None => Irreducibility { irreducible: true, witness: None },
        Some((_, w, t)) => Irreducibility { irreducible: false, witness: Some((w, t)) },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub holds: bool,
    /// No state was certified empty, so the implication holds trivially.
    pub vacuous: bool,
    pub verdicts: Vec<(StatePoint, KernelCertificate)>,
}

/// On an irreducible finite state set, kernel emptiness at one state must
/// propagate to all of them.
pub fn propagation_check(spec: &ScenarioSpec, states: &[StatePoint], kernel_depth: usize) -> Result<Propagation> {
    let irr = check_irreducible(spec, states, PROPAGATION_REACH_DEPTH)?;
    if !irr.irreducible {
        return Err(invalid("the state set is not irreducible"));
    }
    let model = RadialModel::new(spec, DEFAULT_TOL)?;
    let verdicts = states
        .iter()
        .map(|w| Ok((w.clone(), model.kernel(w, kernel_depth)?)))
        .collect::<Result<Vec<_>>>()?;
    let any = verdicts.iter().any(|(_, c)| c.is_empty_certified());
    let all = verdicts.iter().all(|(_, c)| c.is_empty_certified());
    Ok(Propagation { holds: !any || all, vacuous: !any, verdicts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatteningStep {
    pub k: usize,
    pub y: f64,
    pub w: StatePoint,
    pub dist_unfattened: f64,
    pub dist_thickened: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatteningTrace {
    pub eps: f64,
    pub y0: f64,
    pub steps: Vec<FatteningStep>,
    /// Probability of the all-`x1` cylinder of length `horizon` from `w = 1`.
    pub all_x1_probability: f64,
}

fn kernel_distances(w: &StatePoint, y: f64, eps: f64) -> (f64, f64) {
    match w {
        // L_ker at 0 is {0}; at 1/n it is empty, and the ε-thickening picks up
        // L_ker at 0 exactly when 1/n < ε
        StatePoint::Ladder(Rung::Reciprocal(0)) => (libm::fabs(y), libm::fabs(y)),
        StatePoint::Ladder(Rung::Reciprocal(n)) if 1.0 / (*n as f64) < eps => (f64::INFINITY, libm::fabs(y)),
        _ => (f64::INFINITY, f64::INFINITY),
    }
}

/// Runs the fattening scenario from `w = 1`, `y = y0` and records the
/// distances to the kernel set and to its `ε`-thickening along the way.
pub fn fattening_experiment(eps: f64, y0: f64, horizon: usize, drive: &Drive) -> Result<FatteningTrace> {
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    if !(y0 > 0.0 && y0 < 0.125) {
        return Err(invalid("y0 must lie in (0, 1/8)"));
    }
    let spec = builtin::fattening();
    let w0 = StatePoint::rung(1);
    let (word, states) = drive_states(&spec, &w0, drive, horizon)?;
    let mut y = SpherePoint::real(y0);
    let mut steps = Vec::with_capacity(states.len());
    for (k, w) in states.iter().enumerate() {
        let yv = match y {
            SpherePoint::Finite(z) => z.re,
            SpherePoint::Infinity => f64::INFINITY,
        };
        let (dist_unfattened, dist_thickened) = kernel_distances(w, yv, eps);
        steps.push(FatteningStep { k, y: yv, w: w.clone(), dist_unfattened, dist_thickened });
        if let Some(&x) = word.get(k) {
            y = spec.tau[x][0].map.apply(y)?;
        }
    }
    let all_x1 = vec![spec.index_by_name("x1")?; horizon];
    Ok(FatteningTrace { eps, y0, steps, all_x1_probability: cylinder_prob(&spec, &w0, &all_x1)? })
}

/// Relation between the path Julia radii of `ξ` and `σ(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialRelation {
    pub t_path: f64,
    pub t_shifted: f64,
    /// `(t_shifted - log c_1)/d_1`.
    pub predicted: f64,
    pub error_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkewStep {
    pub shifted: PathSample,
    pub image: SpherePoint,
    pub radial: Option<RadialRelation>,
}

/// One step of the skew product `(ξ, y) ↦ (σξ, γ_1(y))`; for monomial paths
/// also checks `J_ξ = γ_1⁻¹(J_σξ)` on the truncated radii.
pub fn skew_step(prefix: &PathSample, y: SpherePoint) -> Result<SkewStep> {
    if prefix.is_empty() {
        return Err(invalid("skew step needs a nonempty path"));
    }
    let image = prefix.maps[0].apply(y)?;
    let shifted = PathSample {
        indices: prefix.indices[1..].to_vec(),
        map_ids: prefix.map_ids[1..].to_vec(),
        maps: prefix.maps[1..].to_vec(),
        states: prefix.states[1..].to_vec(),
        seed: prefix.seed,
        log_prob: prefix.step_log_probs[1..].iter().sum(),
        step_log_probs: prefix.step_log_probs[1..].to_vec(),
    };
    let monos: Option<Vec<_>> = prefix.maps.iter().map(|m| m.as_monomial().copied()).collect();
    let radial = match monos {
        None => None,
        Some(ms) => {
            let (t_path, e_path) = path_julia_radius(|k| ms[k], ms.len())?;
            let (t_shifted, e_shifted) = if ms.len() > 1 {
                path_julia_radius(|k| ms[k + 1], ms.len() - 1)?
            } else {
                (0.0, 0.0)
            };
            let first = ms[0];
            let predicted = (t_shifted - first.log_coeff) / first.degree as f64;
            let error_bound = e_path + e_shifted / first.degree as f64;
            let holds = libm::fabs(t_path - predicted) <= error_bound + 1e-12;
            Some(RadialRelation { t_path, t_shifted, predicted, error_bound, holds })
        }
    };
    Ok(SkewStep { shifted, image, radial })
}

impl core::fmt::Display for JumpVerdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            JumpVerdict::NotApplicable(r) => write!(f, "NotApplicable({r})"),
            v => f.write_str(v.name()),
        }
    }
}
