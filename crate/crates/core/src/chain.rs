//! The chain `(w_n)` driven by the RSCC: updates, transition rows, cylinder
//! probabilities, admissible words, reachability and sampling.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{domain, invalid, Result, RsccError};
use crate::maps::{MapSpec, SpherePoint};
use crate::rng::{pick_weighted, StreamRng, LANE_INDEX, LANE_MAP};
use crate::scenario::{LadderDecay, ScenarioSpec, TransitionRule, UpdateRule};
use crate::state::{exact, exact_one, to_f64, ExactReal, Rung, StatePoint, StateSpace, Word};

/// Default cap on `|X|^n` for word enumeration.
pub const WORD_CAP: u64 = 1_000_000;
/// Default cap on distinct states held by a reachability search.
pub const STATE_CAP: usize = 1_000_000;

fn check_index(spec: &ScenarioSpec, x: usize) -> Result<()> {
    if x < spec.indices.len() {
        Ok(())
    } else {
        Err(invalid(format!("unknown index id {x}")))
    }
}

fn label_pos(spec: &ScenarioSpec, w: &StatePoint) -> Result<usize> {
    match (&spec.state_space, w) {
        (StateSpace::Discrete { labels }, StatePoint::Discrete(l)) => {
            labels.iter().position(|x| x == l).ok_or_else(|| domain(format!("unknown state {l}")))
        }
        _ => Err(domain(format!("state {w} is not a discrete label"))),
    }
}

fn index_value(spec: &ScenarioSpec, x: usize) -> f64 {
    spec.indices[x].name.parse().unwrap_or(f64::NAN)
}

fn clamp_exact(v: ExactReal, lo: &ExactReal, hi: &ExactReal) -> ExactReal {
    if &v < lo {
        lo.clone()
    } else if &v > hi {
        hi.clone()
    } else {
        v
    }
}

/// `u(w, x)`.
pub fn update_state(spec: &ScenarioSpec, w: &StatePoint, x: usize) -> Result<StatePoint> {
    check_index(spec, x)?;
    spec.state_space.check(w)?;
    let next = match (&spec.update, w) {
        (UpdateRule::Ladder { advance, jump, target }, StatePoint::Ladder(r)) => match r {
            Rung::Extra(_) => w.clone(),
            Rung::Reciprocal(n) if x == *advance => {
                if *n == 0 {
                    StatePoint::rung(0)
                } else {
                    StatePoint::rung(n.checked_add(1).ok_or(RsccError::ResourceCap { what: "ladder rung", limit: u64::MAX })?)
                }
            }
            Rung::Reciprocal(_) if x == *jump => StatePoint::Ladder(target.clone()),
            Rung::Reciprocal(_) => w.clone(),
        },
        (UpdateRule::ClampAffine { alpha, lo, hi, levels }, StatePoint::Real(p)) => {
            let a = exact(*alpha);
            let v = (exact_one() - &a) * p + a * exact(index_value(spec, x));
            let (lo, hi) = (exact(*lo), exact(*hi));
            let mut v = clamp_exact(v, &lo, &hi);
            if let Some(m) = levels {
                let steps = BigRational::from_integer(BigInt::from(m - 1));
                let k = ((&v - &lo) / (&hi - &lo) * &steps).round();
                v = clamp_exact(&lo + k * (&hi - &lo) / steps, &lo, &hi);
            }
            StatePoint::Real(v)
        }
        (UpdateRule::Table { next }, StatePoint::Discrete(_)) => {
            let s = label_pos(spec, w)?;
            match &spec.state_space {
                StateSpace::Discrete { labels } => StatePoint::Discrete(labels[next[s][x]].clone()),
                _ => unreachable!("validated"),
            }
        }
        (UpdateRule::MapDriven, StatePoint::Real(y)) => match &spec.tau[x][0].map {
            MapSpec::AffineInterval { a, b, lo, hi } => {
                StatePoint::Real(clamp_exact(exact(*a) * y + exact(*b), &exact(*lo), &exact(*hi)))
            }
            _ => unreachable!("validated"),
        },
        _ => return Err(domain(format!("state {w} does not fit the update family"))),
    };
    Ok(next)
}

/// `P(w, {x})` for every index, in id order.
pub fn transition_probs(spec: &ScenarioSpec, w: &StatePoint) -> Result<Vec<f64>> {
    spec.state_space.check(w)?;
    let n = spec.indices.len();
    let mut row = vec![0.0; n];
    match (&spec.transition, w) {
        (TransitionRule::Ladder { decay }, StatePoint::Ladder(r)) => {
            let (advance, jump) = match &spec.update {
                UpdateRule::Ladder { advance, jump, .. } => (*advance, *jump),
                _ => unreachable!("validated"),
            };
            match r {
                Rung::Extra(_) => row[jump] = 1.0,
                Rung::Reciprocal(0) => row[advance] = 1.0,
                Rung::Reciprocal(k) => {
                    let k = *k as f64;
                    let (pj, pa) = match decay {
                        // 1 - 2^{-1/n} via expm1 keeps the advance weight accurate for large n
                        LadderDecay::Reciprocal => {
                            let e = -core::f64::consts::LN_2 / k;
                            (libm::exp(e), -libm::expm1(e))
                        }
                        LadderDecay::Power => {
                            let pj = libm::exp2(-k);
                            (pj, 1.0 - pj)
                        }
                    };
                    row[jump] = pj;
                    row[advance] = pa;
                }
            }
        }
        (TransitionRule::Reinforce, StatePoint::Real(p)) => {
            for (x, slot) in row.iter_mut().enumerate() {
                *slot = if index_value(spec, x) == 1.0 { to_f64(p) } else { to_f64(&(exact_one() - p)) };
            }
        }
        (TransitionRule::Table { probs }, StatePoint::Discrete(_)) => {
            row.clone_from(&probs[label_pos(spec, w)?]);
        }
        (TransitionRule::FeedbackTheta { theta }, StatePoint::Real(y)) => {
            let t = theta.eval(to_f64(y));
            row[0] = t;
            row[1] = 1.0 - t;
        }
        _ => return Err(domain(format!("state {w} does not fit the transition family"))),
    }
    Ok(row)
}

/// Chain-rule cylinder probability `P_w([x_1, …, x_n])`; 0 for inadmissible words.
pub fn cylinder_prob(spec: &ScenarioSpec, w: &StatePoint, word: &[usize]) -> Result<f64> {
    for &x in word {
        check_index(spec, x)?;
    }
    let mut p = 1.0;
    let mut state = w.clone();
    for &x in word {
        let q = transition_probs(spec, &state)?[x];
        if q <= 0.0 {
            return Ok(0.0);
        }
        p *= q;
        state = update_state(spec, &state, x)?;
    }
    Ok(p)
}

/// `w·word`, the state reached along a word.
pub fn run_word(spec: &ScenarioSpec, w: &StatePoint, word: &[usize]) -> Result<StatePoint> {
    let mut state = w.clone();
    for &x in word {
        state = update_state(spec, &state, x)?;
    }
    Ok(state)
}

/// Indices with `P(w, {x}) > 0`, ascending.
pub fn admissible_indices(spec: &ScenarioSpec, w: &StatePoint) -> Result<Vec<usize>> {
    Ok(transition_probs(spec, w)?
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(x, _)| x)
        .collect())
}

pub fn admissible_words(spec: &ScenarioSpec, w: &StatePoint, n: usize) -> Result<Vec<Word>> {
    admissible_words_capped(spec, w, n, WORD_CAP)
}

/// Words of length `n` with positive cylinder probability, lexicographic.
pub fn admissible_words_capped(spec: &ScenarioSpec, w: &StatePoint, n: usize, cap: u64) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(invalid("word length must be at least 1"));
    }
    spec.state_space.check(w)?;
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| (spec.indices.len() as u64).checked_pow(e))
        .unwrap_or(u64::MAX);
    if total > cap {
        return Err(RsccError::ResourceCap { what: "admissible word enumeration", limit: cap });
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    extend_words(spec, w, n, &mut prefix, &mut out)?;
    Ok(out)
}

fn extend_words(spec: &ScenarioSpec, w: &StatePoint, left: usize, prefix: &mut Word, out: &mut Vec<Word>) -> Result<()> {
    if left == 0 {
        out.push(prefix.clone());
        return Ok(());
    }
    for x in admissible_indices(spec, w)? {
        let next = update_state(spec, w, x)?;
        prefix.push(x);
        extend_words(spec, &next, left - 1, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Orders states canonically so they can live in ordered sets.
#[derive(Debug, Clone)]
pub struct StateKey(pub StatePoint);

impl PartialEq for StateKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for StateKey {}
impl PartialOrd for StateKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for StateKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.canonical_cmp(&other.0)
    }
}

/// Sorts canonically and merges real states closer than the dedup tolerance.
pub fn dedup_states(mut states: Vec<StatePoint>) -> Vec<StatePoint> {
    states.sort_by(|a, b| a.canonical_cmp(b));
    let mut out: Vec<StatePoint> = Vec::with_capacity(states.len());
    for s in states {
        if out.last().is_none_or(|l| !l.approx_eq(&s)) {
            out.push(s);
        }
    }
    out
}

pub fn reachable_states(spec: &ScenarioSpec, w: &StatePoint, depth: usize) -> Result<Vec<StatePoint>> {
    reachable_states_capped(spec, w, depth, STATE_CAP)
}

/// `{w·x^(k) : x^(k) admissible, 1 ≤ k ≤ depth}`, sorted canonically.
pub fn reachable_states_capped(spec: &ScenarioSpec, w: &StatePoint, depth: usize, cap: usize) -> Result<Vec<StatePoint>> {
    if depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    spec.state_space.check(w)?;
    let mut seen: BTreeSet<StateKey> = BTreeSet::new();
    let mut frontier = vec![w.clone()];
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for s in &frontier {
            for x in admissible_indices(spec, s)? {
                let t = update_state(spec, s, x)?;
                if !seen.contains(&StateKey(t.clone())) {
                    next.insert(StateKey(t));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next.iter().map(|k| k.0.clone()).collect();
        seen.extend(next);
        if seen.len() > cap {
            return Err(RsccError::ResourceCap { what: "reachable states", limit: cap as u64 });
        }
    }
    Ok(dedup_states(seen.into_iter().map(|k| k.0).collect()))
}

/// One step of a sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub index: usize,
    /// Position of the drawn map inside `tau[index]`.
    pub map_id: usize,
    pub prob: f64,
    pub weight: f64,
}

/// Lazily samples a map-labeled path step by step.
///
/// The index drawn at step `k` uses lane [`LANE_INDEX`] of counter `k` and
/// the map uses lane [`LANE_MAP`], so chains and map-labeled paths with the
/// same seed and stream share their index sequences.
pub struct PathCursor<'a> {
    spec: &'a ScenarioSpec,
    rng: StreamRng,
    step: u64,
    state: StatePoint,
}

impl<'a> PathCursor<'a> {
    pub fn new(spec: &'a ScenarioSpec, w: &StatePoint, seed: u64, stream: u64) -> Result<Self> {
        spec.state_space.check(w)?;
        Ok(PathCursor { spec, rng: StreamRng::new(seed, stream), step: 0, state: w.clone() })
    }

    pub fn state(&self) -> &StatePoint {
        &self.state
    }

    /// Draws the next index and map and advances the state.
    pub fn advance(&mut self) -> Result<PathStep> {
        let row = transition_probs(self.spec, &self.state)?;
        let index = pick_weighted(row.iter().copied(), self.rng.uniform(self.step, LANE_INDEX));
        let dist = &self.spec.tau[index];
        let map_id = if dist.len() == 1 {
            0
        } else {
            pick_weighted(dist.iter().map(|c| c.weight), self.rng.uniform(self.step, LANE_MAP))
        };
        self.state = update_state(self.spec, &self.state, index)?;
        self.step += 1;
        Ok(PathStep { index, map_id, prob: row[index], weight: dist[map_id].weight })
    }
}

/// Samples `n` steps of the chain from `w`; returns indices and `w_0..w_n`.
pub fn sample_chain(spec: &ScenarioSpec, w: &StatePoint, n: usize, seed: u64) -> Result<(Word, Vec<StatePoint>)> {
    let p = sample_path_stream(spec, w, n, seed, 0)?;
    Ok((p.indices, p.states))
}

/// A finite draw from the path measure: indices, maps and visited states.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub indices: Word,
    pub map_ids: Vec<usize>,
    pub maps: Vec<MapSpec>,
    pub states: Vec<StatePoint>,
    pub seed: u64,
    pub log_prob: f64,
    /// Per-step `log P(w_k, {x_k}) + log τ(γ_k)`; sums to `log_prob`.
    pub step_log_probs: Vec<f64>,
}

impl PathSample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `γ_{n,1}(y) = γ_n ∘ … ∘ γ_1 (y)`.
    pub fn apply(&self, y: SpherePoint) -> Result<SpherePoint> {
        self.maps.iter().try_fold(y, |z, m| m.apply(z))
    }
}

pub fn sample_path_with_maps(spec: &ScenarioSpec, w: &StatePoint, n: usize, seed: u64) -> Result<PathSample> {
    sample_path_stream(spec, w, n, seed, 0)
}

/// As [`sample_path_with_maps`] on an explicit RNG stream.
pub fn sample_path_stream(spec: &ScenarioSpec, w: &StatePoint, n: usize, seed: u64, stream: u64) -> Result<PathSample> {
    if n == 0 {
        return Err(invalid("path length must be at least 1"));
    }
    let mut cur = PathCursor::new(spec, w, seed, stream)?;
    let mut out = PathSample {
        indices: Vec::with_capacity(n),
        map_ids: Vec::with_capacity(n),
        maps: Vec::with_capacity(n),
        states: vec![w.clone()],
        seed,
        log_prob: 0.0,
        step_log_probs: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let s = cur.advance()?;
        let lp = libm::log(s.prob) + libm::log(s.weight);
        out.log_prob += lp;
        out.step_log_probs.push(lp);
        out.maps.push(spec.tau[s.index][s.map_id].map.clone());
        out.indices.push(s.index);
        out.map_ids.push(s.map_id);
        out.states.push(cur.state().clone());
    }
    Ok(out)
}

/// The path along a given word and map choice; errors if any step is inadmissible.
pub fn forced_path(spec: &ScenarioSpec, w: &StatePoint, word: &[usize], map_ids: &[usize], seed: u64) -> Result<PathSample> {
    if word.len() != map_ids.len() {
        return Err(invalid("word and map choices differ in length"));
    }
    let mut out = PathSample {
        indices: word.to_vec(),
        map_ids: map_ids.to_vec(),
        maps: Vec::with_capacity(word.len()),
        states: vec![w.clone()],
        seed,
        log_prob: 0.0,
        step_log_probs: Vec::with_capacity(word.len()),
    };
    let mut state = w.clone();
    for (k, (&x, &j)) in word.iter().zip(map_ids).enumerate() {
        check_index(spec, x)?;
        let p = transition_probs(spec, &state)?[x];
        if p <= 0.0 {
            return Err(invalid(format!("index {} is inadmissible at step {k} from {state}", spec.index_name(x))));
        }
        let c = spec.tau[x].get(j).ok_or_else(|| invalid(format!("map {j} is not in the support of {}", spec.index_name(x))))?;
        let lp = libm::log(p) + libm::log(c.weight);
        out.log_prob += lp;
        out.step_log_probs.push(lp);
        out.maps.push(c.map.clone());
        state = update_state(spec, &state, x)?;
        out.states.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin::*;

    fn ja() -> ScenarioSpec {
        jump_annulus()
    }

    #[test]
    fn ladder_updates() {
        let s = ja();
        assert_eq!(update_state(&s, &StatePoint::rung(3), 0).unwrap(), StatePoint::rung(4));
        assert_eq!(update_state(&s, &StatePoint::extra("2"), 1).unwrap(), StatePoint::extra("2"));
        assert_eq!(update_state(&s, &StatePoint::rung(5), 1).unwrap(), StatePoint::extra("2"));
        assert_eq!(update_state(&s, &StatePoint::rung(0), 0).unwrap(), StatePoint::rung(0));
        assert!(update_state(&s, &StatePoint::rung(0), 9).is_err());
    }

    #[test]
    fn reinforcement_update() {
        let s = reinforcement(0.5).unwrap();
        assert_eq!(update_state(&s, &StatePoint::real(0.5), 1).unwrap(), StatePoint::real(0.75));
        assert!(matches!(update_state(&s, &StatePoint::real(1.5), 1), Err(RsccError::Domain(_))));
    }

    #[test]
    fn ladder_rows() {
        let s = ja();
        let r = transition_probs(&s, &StatePoint::rung(2)).unwrap();
        assert!((r[0] - (1.0 - 2f64.powf(-0.5))).abs() < 1e-15);
        assert!((r[1] - 2f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(transition_probs(&s, &StatePoint::rung(0)).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn cylinders() {
        let s = ja();
        let one = StatePoint::rung(1);
        assert_eq!(cylinder_prob(&s, &one, &[0]).unwrap(), 0.5);
        assert_eq!(cylinder_prob(&s, &one, &[]).unwrap(), 1.0);
        let expect = 0.5 * (1.0 - 2f64.powf(-0.5));
        assert!((cylinder_prob(&s, &one, &[0, 0]).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn words_and_reach() {
        let s = ja();
        assert_eq!(admissible_words(&s, &StatePoint::extra("2"), 1).unwrap(), vec![vec![1]]);
        assert_eq!(admissible_words(&s, &StatePoint::rung(0), 1).unwrap(), vec![vec![0]]);
        assert_eq!(admissible_words(&s, &StatePoint::rung(1), 1).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(reachable_states(&s, &StatePoint::extra("2"), 5).unwrap(), vec![StatePoint::extra("2")]);
        assert_eq!(
            reachable_states(&s, &StatePoint::rung(4), 1).unwrap(),
            vec![StatePoint::rung(5), StatePoint::extra("2")]
        );
        let f = fattening();
        assert_eq!(reachable_states(&f, &StatePoint::rung(0), 5).unwrap(), vec![StatePoint::rung(0)]);
        assert!(matches!(
            admissible_words_capped(&s, &StatePoint::rung(1), 21, WORD_CAP),
            Err(RsccError::ResourceCap { .. })
        ));
    }

    #[test]
    fn zero_state_chain_is_frozen() {
        let s = ja();
        let (ix, st) = sample_chain(&s, &StatePoint::rung(0), 5, 7).unwrap();
        assert_eq!(ix, vec![0; 5]);
        assert!(st.iter().all(|w| *w == StatePoint::rung(0)));
    }

    #[test]
    fn path_and_chain_share_indices() {
        let s = ja();
        let (ix, _) = sample_chain(&s, &StatePoint::rung(1), 30, 11).unwrap();
        let p = sample_path_with_maps(&s, &StatePoint::rung(1), 30, 11).unwrap();
        assert_eq!(ix, p.indices);
    }

    #[test]
    fn quantized_grid_is_closed() {
        let s = reinforcement_trunc_quantized(0.5, 0.01, Some(21)).unwrap();
        let reach = reachable_states(&s, &StatePoint::real(0.5), 60).unwrap();
        assert!(reach.len() <= 21);
    }
}
