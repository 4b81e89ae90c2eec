//! The transition operator `M_τ` on `Y × W`:
//!
//! `(M_τ φ)(y, w) = Σ_x P(w, {x}) Σ_γ τ_x(γ) φ(γ(y), u(w, x))`.
//!
//! Iterates are evaluated exactly by recursion over the admissible branches,
//! checked against a flat enumeration over words and map tuples and against a
//! Monte Carlo average over sampled paths.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chain::{admissible_words_capped, cylinder_prob, run_word, transition_probs, update_state, PathCursor};
use crate::error::{invalid, unsupported, Result, RsccError};
use crate::maps::SpherePoint;
use crate::scenario::{PhaseSpace, ScenarioSpec};
use crate::state::{StatePoint, StateSpace};

/// Cap on the number of branches one evaluation may visit.
pub const BRANCH_CAP: u64 = 10_000_000;
pub const RING_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    pub y: SpherePoint,
    pub w: StatePoint,
}

impl ProductPoint {
    pub fn new(y: SpherePoint, w: StatePoint) -> Self {
        ProductPoint { y, w }
    }

    /// Checks both coordinates against the scenario's spaces.
    pub fn check(&self, spec: &ScenarioSpec) -> Result<()> {
        spec.state_space.check(&self.w)?;
        if let PhaseSpace::Interval { lo, hi } = spec.phase_space()? {
            match self.y {
                SpherePoint::Finite(z) if z.im == 0.0 && z.re >= lo && z.re <= hi => {}
                _ => return Err(crate::error::domain(format!("{} lies outside [{lo}, {hi}]", self.y))),
            }
        }
        Ok(())
    }
}

/// Closed-form bounded continuous test functions on `Y × W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    One,
    /// The numeric coordinate of the state.
    StateCoord,
    /// `exp(-(log|y| - center)² / width²)`, 0 at 0 and ∞.
    RadialBump { center: f64, width: f64 },
    /// `log|y|` clamped to `[lo, hi]`.
    ClippedLogMod { lo: f64, hi: f64 },
}

impl TestFunction {
    pub fn eval(&self, space: &StateSpace, y: SpherePoint, w: &StatePoint) -> f64 {
        match *self {
            TestFunction::One => 1.0,
            TestFunction::StateCoord => space.coordinate(w),
            TestFunction::RadialBump { center, width } => {
                let s = y.log_modulus();
                if s.is_finite() {
                    let t = (s - center) / width;
                    libm::exp(-t * t)
                } else {
                    0.0
                }
            }
            TestFunction::ClippedLogMod { lo, hi } => y.log_modulus().clamp(lo, hi),
        }
    }

    /// `sup |φ|` over `Y × W`.
    pub fn sup_norm(&self, space: &StateSpace) -> f64 {
        match *self {
            TestFunction::One | TestFunction::RadialBump { .. } => 1.0,
            TestFunction::StateCoord => coord_range(space).map_or(f64::NAN, |(a, b)| a.abs().max(b.abs())),
            TestFunction::ClippedLogMod { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    /// `sup φ - inf φ` over `Y × W`.
    pub fn range(&self, space: &StateSpace) -> f64 {
        match *self {
            TestFunction::One => 0.0,
            TestFunction::RadialBump { .. } => 1.0,
            TestFunction::StateCoord => coord_range(space).map_or(f64::NAN, |(a, b)| b - a),
            TestFunction::ClippedLogMod { lo, hi } => hi - lo,
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            TestFunction::RadialBump { width, .. } if !(width > 0.0) => Err(invalid("bump width must be positive")),
            TestFunction::ClippedLogMod { lo, hi } if !(lo < hi) => Err(invalid("clip bounds need lo < hi")),
            _ => Ok(()),
        }
    }
}

fn coord_range(space: &StateSpace) -> Option<(f64, f64)> {
    match space {
        StateSpace::Interval { lo, hi } => Some((*lo, *hi)),
        StateSpace::Discrete { labels } => Some((0.0, labels.len().saturating_sub(1) as f64)),
        StateSpace::Ladder { extras } => {
            let vals = extras.iter().filter_map(|e| e.parse::<f64>().ok());
            Some(vals.fold((0.0, 1.0), |(a, b), v| (a.min(v), b.max(v))))
        }
    }
}

fn charge(budget: &mut u64) -> Result<()> {
    if *budget == 0 {
        return Err(RsccError::ResourceCap { what: "operator branches", limit: BRANCH_CAP });
    }
    *budget -= 1;
    Ok(())
}

fn recurse(spec: &ScenarioSpec, phi: &TestFunction, y: SpherePoint, w: &StatePoint, n: usize, budget: &mut u64) -> Result<f64> {
    if n == 0 {
        return Ok(phi.eval(&spec.state_space, y, w));
    }
    let mut total = 0.0;
    for (x, p) in transition_probs(spec, w)?.into_iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let wx = update_state(spec, w, x)?;
        let mut inner = 0.0;
        for c in &spec.tau[x] {
            charge(budget)?;
            inner += c.weight * recurse(spec, phi, c.map.apply(y)?, &wx, n - 1, budget)?;
        }
        total += p * inner;
    }
    Ok(total)
}

/// `(M_τ φ)(p)`.
pub fn apply_m(spec: &ScenarioSpec, phi: &TestFunction, p: &ProductPoint) -> Result<f64> {
    iterate_m(spec, phi, p, 1)
}

/// `(M_τ^n φ)(p)` by depth-`n` recursion; `n = 0` gives `φ(p)`.
pub fn iterate_m(spec: &ScenarioSpec, phi: &TestFunction, p: &ProductPoint, n: usize) -> Result<f64> {
    phi.check()?;
    p.check(spec)?;
    let mut budget = BRANCH_CAP;
    recurse(spec, phi, p.y, &p.w, n, &mut budget)
}

/// Odometer step over map tuples, last position fastest; false after the last tuple.
fn next_tuple(choice: &mut [usize], sizes: &[usize]) -> bool {
    for k in (0..choice.len()).rev() {
        choice[k] += 1;
        if choice[k] < sizes[k] {
            return true;
        }
        choice[k] = 0;
    }
    false
}

/// `Σ_{words} P_w(word) Σ_{map tuples} Π τ(γ_k) φ(γ_n ∘ … ∘ γ_1(y), w·word)`.
pub fn word_sum_oracle(spec: &ScenarioSpec, phi: &TestFunction, p: &ProductPoint, n: usize) -> Result<f64> {
    phi.check()?;
    p.check(spec)?;
    if n == 0 {
        return Ok(phi.eval(&spec.state_space, p.y, &p.w));
    }
    let words = admissible_words_capped(spec, &p.w, n, BRANCH_CAP)?;
    let mut budget = BRANCH_CAP;
    let mut total = 0.0;
    for word in &words {
        let pw = cylinder_prob(spec, &p.w, word)?;
        let end = run_word(spec, &p.w, word)?;
        let sizes: Vec<usize> = word.iter().map(|x| spec.tau[*x].len()).collect();
        let mut choice = vec![0usize; n];
        loop {
            charge(&mut budget)?;
            let mut weight = pw;
            let mut y = p.y;
            for (k, x) in word.iter().enumerate() {
                let c = &spec.tau[*x][choice[k]];
                weight *= c.weight;
                y = c.map.apply(y)?;
            }
            total += weight * phi.eval(&spec.state_space, y, &end);
            if !next_tuple(&mut choice, &sizes) {
                break;
            }
        }
    }
    Ok(total)
}

/// Monte Carlo mean and standard error of `φ(γ_{n,1}(y), w_n)` over `samples`
/// paths; sample `j` uses RNG stream `j`.
pub fn mc_estimate_m(
    spec: &ScenarioSpec,
    phi: &TestFunction,
    p: &ProductPoint,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    phi.check()?;
    p.check(spec)?;
    if samples < 100 {
        return Err(invalid(format!("at least 100 samples are required, got {samples}")));
    }
    let (mut mean, mut m2) = (0.0, 0.0);
    for j in 0..samples {
        let mut cur = PathCursor::new(spec, &p.w, seed, j as u64)?;
        let mut y = p.y;
        for _ in 0..n {
            let s = cur.advance()?;
            y = spec.tau[s.index][s.map_id].map.apply(y)?;
        }
        let v = phi.eval(&spec.state_space, y, cur.state());
        let delta = v - mean;
        mean += delta / (j + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    Ok((mean, libm::sqrt(var / samples as f64)))
}

fn to_sphere(y: SpherePoint) -> [f64; 3] {
    match y {
        SpherePoint::Infinity => [0.0, 0.0, 1.0],
        SpherePoint::Finite(z) => {
            let r2 = z.norm_sqr();
            let d = 1.0 + r2;
            [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
        }
    }
}

fn from_sphere(v: [f64; 3]) -> SpherePoint {
    let den = 1.0 - v[2];
    if den <= 0.0 {
        SpherePoint::Infinity
    } else {
        SpherePoint::Finite(Complex64::new(v[0] / den, v[1] / den))
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = libm::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// `RING_SIZE` points at chordal distance `delta` (`0 < delta ≤ 2`) from `y`,
/// evenly spread around it on the sphere.
pub fn chordal_ring(y: SpherePoint, delta: f64) -> Vec<SpherePoint> {
    let p = to_sphere(y);
    let axis = if libm::fabs(p[2]) < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalize(cross(p, axis));
    let e2 = cross(p, e1);
    let theta = 2.0 * libm::asin((delta / 2.0).min(1.0));
    let (st, ct) = (libm::sin(theta), libm::cos(theta));
    (0..RING_SIZE)
        .map(|k| {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / RING_SIZE as f64;
            let (sp, cp) = (libm::sin(phi), libm::cos(phi));
            from_sphere(core::array::from_fn(|i| ct * p[i] + st * (cp * e1[i] + sp * e2[i])))
        })
        .collect()
}

fn probe_ring(phase: PhaseSpace, y: SpherePoint, delta: f64) -> Vec<SpherePoint> {
    match (phase, y) {
        (PhaseSpace::Interval { lo, hi }, SpherePoint::Finite(z)) => [z.re - delta, z.re + delta]
            .into_iter()
            .filter(|v| (lo..=hi).contains(v))
            .map(SpherePoint::real)
            .collect(),
        _ => chordal_ring(y, delta),
    }
}

/// Oscillation table of `M^n φ` on probe rings around `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticTable {
    /// `(δ, n, osc(δ, n))` with `δ` in the given order and `n = 1..=nMax`.
    pub rows: Vec<(f64, usize, f64)>,
    /// `(δ, max_n osc(δ, n))`.
    pub sup_over_n: Vec<(f64, f64)>,
}

impl DiagnosticTable {
    /// `supOverN` does not increase as `δ` decreases.
    pub fn nonincreasing(&self) -> bool {
        self.sup_over_n.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn sup_at(&self, delta: f64) -> Option<f64> {
        self.sup_over_n.iter().find(|(d, _)| *d == delta).map(|r| r.1)
    }
}

/// Pointwise equicontinuity probe: `osc(δ, n) = max_probe |M^nφ(probe) - M^nφ(p)|`
/// over a ring at distance `δ` around `y` (chordal on the sphere, Euclidean on
/// an interval) with the same state.
pub fn equicontinuity_diagnostic(
    spec: &ScenarioSpec,
    phi: &TestFunction,
    p: &ProductPoint,
    radii: &[f64],
    n_max: usize,
) -> Result<DiagnosticTable> {
    if radii.is_empty() || radii.iter().any(|d| !(*d > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("radii must be positive and strictly descending"));
    }
    if n_max == 0 {
        return Err(invalid("nMax must be at least 1"));
    }
    if !spec.all_maps_open() {
        return Err(unsupported("equicontinuity diagnostics need open maps"));
    }
    let phase = spec.phase_space()?;
    let base: Vec<f64> = (1..=n_max).map(|n| iterate_m(spec, phi, p, n)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(radii.len() * n_max);
    let mut sup_over_n = Vec::with_capacity(radii.len());
    for &delta in radii {
        let ring = probe_ring(phase, p.y, delta);
        let mut osc = vec![0.0_f64; n_max];
        for q in ring {
            let qp = ProductPoint::new(q, p.w.clone());
            for n in 1..=n_max {
                let v = iterate_m(spec, phi, &qp, n)?;
                osc[n - 1] = osc[n - 1].max(libm::fabs(v - base[n - 1]));
            }
        }
        for (k, o) in osc.iter().enumerate() {
            rows.push((delta, k + 1, *o));
        }
        sup_over_n.push((delta, osc.iter().copied().fold(0.0, f64::max)));
    }
    Ok(DiagnosticTable { rows, sup_over_n })
}
