//! Exact Julia computations for monomial families in log-radius coordinates.
//!
//! A rotation-invariant compact set is stored as a finite union of closed
//! intervals of `s = log|z|`. Every monomial acts affinely on `s`, so Julia
//! sets of monomial semigroups are attractors of affine contractions and
//! preimages are exact interval maps.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{admissible_indices, reachable_states_capped, update_state, StateKey};
use crate::error::{config, invalid, unsupported, Result, RsccError};
use crate::maps::Monomial;
use crate::scenario::{ClassMember, RadialClass, ScenarioSpec};
use crate::state::{exact, Rung, StatePoint, StateSpace};

/// Adjacent intervals closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Intervals allowed in one set during refinement.
pub const INTERVAL_CAP: usize = 1 << 18;
/// Composition nodes allowed on one level of a kernel search.
pub const FRONTIER_CAP: usize = 1_000_000;
/// Depth to which declared radial classes are checked against the chain.
pub const CLASS_CHECK_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadialSet {
    intervals: Vec<(f64, f64)>,
}

impl RadialSet {
    pub fn empty() -> Self {
        RadialSet::default()
    }

    pub fn point(s: f64) -> Self {
        RadialSet { intervals: vec![(s, s)] }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        RadialSet::from_intervals(vec![(lo, hi)])
    }

    /// Sorts, drops reversed pairs and merges overlaps and gaps `≤ MERGE_TOL`.
    pub fn from_intervals(mut v: Vec<(f64, f64)>) -> Self {
        v.retain(|(a, b)| a <= b);
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a - last.1 <= MERGE_TOL => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        RadialSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.1)
    }

    pub fn union(&self, other: &RadialSet) -> RadialSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        RadialSet::from_intervals(v)
    }

    /// Intersection that treats endpoints within `tol` as touching; a touch
    /// contributes the midpoint of the two endpoints.
    pub fn intersect(&self, other: &RadialSet, tol: f64) -> RadialSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let start = other.intervals.partition_point(|&(_, d)| d + tol < a);
            for &(c, d) in &other.intervals[start..] {
                if c > b + tol {
                    break;
                }
                let (lo, hi) = (a.max(c), b.min(d));
                if lo <= hi {
                    out.push((lo, hi));
                } else {
                    let m = 0.5 * (lo + hi);
                    out.push((m, m));
                }
            }
        }
        RadialSet::from_intervals(out)
    }

    /// `{s : slope·s + offset ∈ self}` for `slope > 0`.
    pub fn affine_preimage(&self, slope: f64, offset: f64) -> RadialSet {
        RadialSet {
            intervals: self.intervals.iter().map(|&(a, b)| ((a - offset) / slope, (b - offset) / slope)).collect(),
        }
    }

    pub fn contains(&self, s: f64, tol: f64) -> bool {
        self.distance_to(s) <= tol
    }

    /// Every interval of `other` lies in one interval of `self` widened by `tol`.
    pub fn contains_set(&self, other: &RadialSet, tol: f64) -> bool {
        other.intervals.iter().all(|&(c, d)| {
            let k = self.intervals.partition_point(|&(a, _)| a - tol <= c);
            k > 0 && d <= self.intervals[k - 1].1 + tol
        })
    }

    /// Distance from `s` to the set (`∞` when empty).
    pub fn distance_to(&self, s: f64) -> f64 {
        let k = self.intervals.partition_point(|&(a, _)| a <= s);
        let below = k.checked_sub(1).map_or(f64::INFINITY, |i| (s - self.intervals[i].1).max(0.0));
        let above = self.intervals.get(k).map_or(f64::INFINITY, |&(a, _)| a - s);
        below.min(above)
    }

    fn sup_distance_from(&self, other: &RadialSet) -> f64 {
        // sup over self of the distance to other: attained at an endpoint of
        // self or at a gap midpoint of other lying inside self
        let mut cands: Vec<f64> = self.intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
        for w in other.intervals.windows(2) {
            let m = 0.5 * (w[0].1 + w[1].0);
            if self.contains(m, 0.0) {
                cands.push(m);
            }
        }
        cands.into_iter().map(|s| other.distance_to(s)).fold(0.0, f64::max)
    }

    /// Circle radii `exp(s)` of the interval endpoints.
    pub fn radii(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|&(a, b)| (libm::exp(a), libm::exp(b))).collect()
    }
}

impl fmt::Display for RadialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("radii: ")?;
        if self.is_empty() {
            return f.write_str("∅");
        }
        for (k, (a, b)) in self.radii().into_iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "[{a}, {b}]")?;
        }
        Ok(())
    }
}

/// Hausdorff distance in log-radius; `0` for two empty sets, `∞` if exactly one is empty.
pub fn radial_hausdorff(a: &RadialSet, b: &RadialSet) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => a.sup_distance_from(b).max(b.sup_distance_from(a)),
    }
}

/// Preimage of `r` under `m`: `[lo, hi] ↦ [(lo - log c)/d, (hi - log c)/d]`.
pub fn radial_preimage(m: &Monomial, r: &RadialSet) -> RadialSet {
    r.affine_preimage(m.degree as f64, m.log_coeff)
}

fn check_monomial(m: &Monomial) -> Result<()> {
    if m.degree < 2 {
        return Err(unsupported(format!("degree {} is below 2", m.degree)));
    }
    Ok(())
}

/// Attractor of a graph-directed system of inverse log-radius actions.
/// `edges[v]` lists `(map, successor)`; `R_v = ∪ m⁻¹(R_succ)`.
pub fn graph_attractor(edges: &[Vec<(Monomial, usize)>], tol: f64) -> Result<Vec<RadialSet>> {
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let all: Vec<&Monomial> = edges.iter().flatten().map(|(m, _)| m).collect();
    for m in &all {
        check_monomial(m)?;
    }
    let fps = all.iter().map(|m| m.fixed_log_radius());
    let lo = fps.clone().fold(f64::INFINITY, f64::min);
    let hi = fps.fold(f64::NEG_INFINITY, f64::max);
    let mut sets: Vec<RadialSet> = edges
        .iter()
        .map(|e| if e.is_empty() { RadialSet::empty() } else { RadialSet::interval(lo, hi) })
        .collect();
    for _ in 0..10_000 {
        let next: Vec<RadialSet> = edges
            .iter()
            .map(|e| {
                let v = e.iter().flat_map(|(m, s)| radial_preimage(m, &sets[*s]).intervals).collect();
                RadialSet::from_intervals(v)
            })
            .collect();
        if next.iter().any(|s| s.intervals.len() > INTERVAL_CAP) {
            return Err(RsccError::ResourceCap { what: "radial intervals", limit: INTERVAL_CAP as u64 });
        }
        let delta = next.iter().zip(&sets).map(|(a, b)| radial_hausdorff(a, b)).fold(0.0, f64::max);
        sets = next;
        if delta < tol {
            return Ok(sets);
        }
    }
    Err(RsccError::ResourceCap { what: "attractor iterations", limit: 10_000 })
}

/// Julia set of the semigroup generated by `maps`.
pub fn semigroup_julia_radial(maps: &[Monomial], tol: f64) -> Result<RadialSet> {
    if maps.is_empty() {
        return Err(invalid("at least one map is required"));
    }
    let edges = vec![maps.iter().map(|m| (*m, 0)).collect()];
    Ok(graph_attractor(&edges, tol)?.remove(0))
}

pub fn member_matches(member: &ClassMember, w: &StatePoint) -> bool {
    match (member, w) {
        (ClassMember::Rungs, StatePoint::Ladder(Rung::Reciprocal(n))) => *n >= 1,
        (ClassMember::Point(p), _) => p == w,
        (ClassMember::Closed(lo, hi), StatePoint::Real(x)) => *x >= exact(*lo) && *x <= exact(*hi),
        (ClassMember::Open(lo, hi), StatePoint::Real(x)) => *x > exact(*lo) && *x < exact(*hi),
        (ClassMember::Closed(lo, hi), StatePoint::Ladder(r)) => (*lo..=*hi).contains(&r.value()),
        (ClassMember::Open(lo, hi), StatePoint::Ladder(r)) => r.value() > *lo && r.value() < *hi,
        (ClassMember::Label(l), StatePoint::Discrete(d)) => l == d,
        (ClassMember::Label(l), StatePoint::Ladder(Rung::Extra(e))) => l == e,
        _ => false,
    }
}

fn representatives(member: &ClassMember, space: &StateSpace) -> Vec<StatePoint> {
    match member {
        ClassMember::Rungs => (1..=3).map(StatePoint::rung).collect(),
        ClassMember::Point(p) => vec![p.clone()],
        ClassMember::Closed(lo, hi) | ClassMember::Open(lo, hi) => {
            let mut v: Vec<StatePoint> =
                (1..=5).map(|k| StatePoint::real(lo + (hi - lo) * k as f64 / 6.0)).collect();
            if matches!(member, ClassMember::Closed(..)) {
                v.push(StatePoint::real(*lo));
                v.push(StatePoint::real(*hi));
            }
            v.retain(|p| space.check(p).is_ok());
            v
        }
        ClassMember::Label(l) => match space {
            StateSpace::Discrete { .. } => vec![StatePoint::discrete(l)],
            _ => vec![StatePoint::extra(l)],
        },
    }
}

/// Statewise Julia sets of a monomial scenario, one per declared radial class.
#[derive(Debug, Clone)]
pub struct RadialModel<'a> {
    spec: &'a ScenarioSpec,
    classes: &'a [RadialClass],
    sets: Vec<RadialSet>,
    tol: f64,
}

impl<'a> RadialModel<'a> {
    /// Validates the class declaration against the chain and solves for the
    /// statewise Julia sets.
    pub fn new(spec: &'a ScenarioSpec, tol: f64) -> Result<Self> {
        let classes = spec
            .radial_classes
            .as_deref()
            .ok_or_else(|| config(format!("scenario {} declares no radial classes", spec.name)))?;
        if !spec.monomial_only() {
            return Err(unsupported("radial computations need monomial maps"));
        }
        let model = RadialModel { spec, classes, sets: Vec::new(), tol };
        model.validate_classes()?;
        let edges: Vec<Vec<(Monomial, usize)>> = classes
            .iter()
            .map(|c| {
                c.transitions
                    .iter()
                    .flat_map(|(x, succ)| {
                        let v = model.class_index(succ);
                        spec.monomials_of(*x).unwrap_or_default().into_iter().map(move |m| (m, v))
                    })
                    .collect()
            })
            .collect();
        let sets = graph_attractor(&edges, tol)?;
        Ok(RadialModel { sets, ..model })
    }

    fn class_index(&self, label: &str) -> usize {
        self.classes.iter().position(|c| c.label == label).expect("validated label")
    }

    /// Position of the unique class containing `w`.
    pub fn class_of(&self, w: &StatePoint) -> Result<usize> {
        let mut hits = self.classes.iter().enumerate().filter(|(_, c)| member_matches(&c.member, w));
        match (hits.next(), hits.next()) {
            (Some((k, _)), None) => Ok(k),
            (None, _) => Err(config(format!("state {w} belongs to no radial class"))),
            (Some(_), Some(_)) => Err(config(format!("state {w} belongs to several radial classes"))),
        }
    }

    fn validate_classes(&self) -> Result<()> {
        let mut probes: BTreeSet<StateKey> = BTreeSet::new();
        for c in self.classes {
            for p in representatives(&c.member, &self.spec.state_space) {
                for q in reachable_states_capped(self.spec, &p, CLASS_CHECK_DEPTH, 100_000)? {
                    probes.insert(StateKey(q));
                }
                probes.insert(StateKey(p));
            }
        }
        for StateKey(w) in &probes {
            let k = self.class_of(w)?;
            let class = &self.classes[k];
            let declared: BTreeSet<usize> = class.transitions.iter().map(|t| t.0).collect();
            let actual: BTreeSet<usize> = admissible_indices(self.spec, w)?.into_iter().collect();
            if declared != actual {
                return Err(config(format!(
                    "class {} declares indices {declared:?} but state {w} admits {actual:?}",
                    class.label
                )));
            }
            for (x, succ) in &class.transitions {
                let next = update_state(self.spec, w, *x)?;
                let got = &self.classes[self.class_of(&next)?].label;
                if got != succ {
                    return Err(config(format!(
                        "class {}: index {} leads from {w} to class {got}, declared {succ}",
                        class.label,
                        self.spec.index_name(*x)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `(label, R_label)` in declaration order.
    pub fn sets(&self) -> Vec<(String, RadialSet)> {
        self.classes.iter().map(|c| c.label.clone()).zip(self.sets.iter().cloned()).collect()
    }

    pub fn julia_at(&self, w: &StatePoint) -> Result<&RadialSet> {
        Ok(&self.sets[self.class_of(w)?])
    }

    /// Largest violation of backward invariance `m⁻¹(R_succ) ⊆ R_v` over all declared edges.
    pub fn backward_invariant(&self, tol: f64) -> bool {
        self.classes.iter().enumerate().all(|(v, c)| {
            c.transitions.iter().all(|(x, succ)| {
                let r = &self.sets[self.class_index(succ)];
                self.spec
                    .monomials_of(*x)
                    .unwrap_or_default()
                    .iter()
                    .all(|m| self.sets[v].contains_set(&radial_preimage(m, r), tol))
            })
        })
    }

    /// Kernel Julia certificate at `w`, searching compositions up to `depth`.
    pub fn kernel(&self, w: &StatePoint, depth: usize) -> Result<KernelCertificate> {
        if depth == 0 {
            return Err(invalid("depth must be at least 1"));
        }
        self.spec.state_space.check(w)?;
        let adm = admissible_indices(self.spec, w)?;
        if let [x] = adm.as_slice() {
            if self.spec.tau[*x].len() == 1 && update_state(self.spec, w, *x)? == *w {
                let m = self.spec.tau[*x][0].map.as_monomial().expect("monomial scenario");
                return Ok(KernelCertificate::ExactNonempty(RadialSet::point(m.fixed_log_radius())));
            }
        }
        let mut frontier: Vec<(StatePoint, f64, f64)> = vec![(w.clone(), 1.0, 0.0)];
        let mut acc: Option<RadialSet> = None;
        for k in 1..=depth {
            let mut next: Vec<(StatePoint, f64, f64)> = Vec::new();
            for (s, d, l) in &frontier {
                for x in admissible_indices(self.spec, s)? {
                    let t = update_state(self.spec, s, x)?;
                    for c in &self.spec.tau[x] {
                        let m = c.map.as_monomial().expect("monomial scenario");
                        let md = m.degree as f64;
                        next.push((t.clone(), md * d, md * l + m.log_coeff));
                    }
                }
            }
            next.sort_by(|a, b| {
                a.0.canonical_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
            });
            next.dedup_by(|a, b| a.0 == b.0 && a.1.to_bits() == b.1.to_bits() && a.2.to_bits() == b.2.to_bits());
            if next.len() > FRONTIER_CAP {
                return Err(RsccError::ResourceCap { what: "kernel composition frontier", limit: FRONTIER_CAP as u64 });
            }
            let mut cur = acc.take();
            for (s, d, l) in &next {
                let pre = self.julia_at(s)?.affine_preimage(*d, *l);
                cur = Some(match cur {
                    None => pre,
                    Some(c) => c.intersect(&pre, MERGE_TOL),
                });
                if cur.as_ref().is_some_and(RadialSet::is_empty) {
                    return Ok(KernelCertificate::EmptyAtDepth(k));
                }
            }
            acc = cur;
            frontier = next;
        }
        Ok(KernelCertificate::UnknownSuperset(acc.unwrap_or_default(), depth))
    }
}

/// Outcome of a kernel Julia search.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelCertificate {
    /// The intersection over compositions of length `≤ k` is empty; `k` is least.
    EmptyAtDepth(usize),
    /// Deterministic absorbing state: the kernel is this single map's Julia set.
    ExactNonempty(RadialSet),
    /// Nothing certified; the set is a superset of the kernel.
    UnknownSuperset(RadialSet, usize),
}

impl KernelCertificate {
    pub fn is_empty_certified(&self) -> bool {
        matches!(self, KernelCertificate::EmptyAtDepth(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            KernelCertificate::EmptyAtDepth(_) => "EmptyAtDepth",
            KernelCertificate::ExactNonempty(_) => "ExactNonempty",
            KernelCertificate::UnknownSuperset(..) => "UnknownSuperset",
        }
    }
}

impl fmt::Display for KernelCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelCertificate::EmptyAtDepth(k) => write!(f, "EmptyAtDepth({k})"),
            KernelCertificate::ExactNonempty(r) => write!(f, "ExactNonempty({r})"),
            KernelCertificate::UnknownSuperset(r, d) => write!(f, "UnknownSuperset({r}, depth {d})"),
        }
    }
}

/// Statewise Julia sets per declared radial class, in declaration order.
pub fn statewise_julia_radial(spec: &ScenarioSpec, tol: f64) -> Result<Vec<(String, RadialSet)>> {
    Ok(RadialModel::new(spec, tol)?.sets())
}

pub fn kernel_julia_depth(spec: &ScenarioSpec, w: &StatePoint, depth: usize, tol: f64) -> Result<KernelCertificate> {
    RadialModel::new(spec, tol)?.kernel(w, depth)
}

/// Log-radius `t = Σ_{k ≤ depth} (-log c_k)/(d_1⋯d_k)` of the circle `J_ξ` for
/// the monomial path `step(0), step(1), …`, with a bound on the truncated tail
/// `B/(d_1⋯d_depth·(d_min - 1))`, `B` the largest `|log c_k|` seen.
pub fn path_julia_radius(step: impl Fn(usize) -> Monomial, depth: usize) -> Result<(f64, f64)> {
    if depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    let (mut t, mut prod, mut bound, mut dmin) = (0.0, 1.0, 0.0_f64, u64::MAX);
    for k in 0..depth {
        let m = step(k);
        check_monomial(&m)?;
        prod *= m.degree as f64;
        t += -m.log_coeff / prod;
        bound = bound.max(libm::fabs(m.log_coeff));
        dmin = dmin.min(m.degree);
    }
    Ok((t, bound / (prod * (dmin as f64 - 1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin::*;
    use core::f64::consts::LN_2;

    fn f() -> Monomial {
        Monomial::new(1.0, 2).unwrap()
    }
    fn g() -> Monomial {
        Monomial::new(0.5, 2).unwrap()
    }

    #[test]
    fn annulus() {
        let r = semigroup_julia_radial(&[f(), g()], 1e-9).unwrap();
        assert_eq!(r.intervals().len(), 1);
        assert!(r.min().unwrap().abs() < 1e-8 && (r.max().unwrap() - LN_2).abs() < 1e-8);
        let rf = semigroup_julia_radial(&[f()], 1e-9).unwrap();
        assert!(rf.min().unwrap().abs() < 1e-12 && rf.max().unwrap().abs() < 1e-12);
        let rg = semigroup_julia_radial(&[g()], 1e-9).unwrap();
        assert!((rg.min().unwrap() - LN_2).abs() < 1e-12);
        assert!(semigroup_julia_radial(&[f()], 0.0).is_err());
    }

    #[test]
    fn preimages() {
        let a = RadialSet::interval(0.0, LN_2);
        assert_eq!(radial_preimage(&f(), &a), RadialSet::interval(0.0, LN_2 / 2.0));
        let gp = radial_preimage(&g(), &a);
        assert!((gp.min().unwrap() - LN_2 / 2.0).abs() < 1e-12 && (gp.max().unwrap() - LN_2).abs() < 1e-12);
        let f2 = crate::maps::compose_monomials(&[f(), f()]).unwrap();
        assert_eq!(radial_preimage(&f2, &a), RadialSet::interval(0.0, LN_2 / 4.0));
    }

    #[test]
    fn hausdorff() {
        let a = RadialSet::interval(0.0, 1.0);
        assert_eq!(radial_hausdorff(&a, &a), 0.0);
        assert_eq!(radial_hausdorff(&a, &RadialSet::empty()), f64::INFINITY);
        assert_eq!(radial_hausdorff(&RadialSet::empty(), &RadialSet::empty()), 0.0);
        assert_eq!(radial_hausdorff(&a, &RadialSet::interval(2.0, 3.0)), 2.0);
        let gap = RadialSet::from_intervals(vec![(0.0, 1.0), (3.0, 4.0)]);
        assert_eq!(radial_hausdorff(&RadialSet::interval(0.0, 4.0), &gap), 1.0);
    }

    #[test]
    fn statewise_jump_annulus() {
        let s = jump_annulus();
        let sets = statewise_julia_radial(&s, 1e-9).unwrap();
        let get = |l: &str| sets.iter().find(|(k, _)| k == l).unwrap().1.clone();
        for l in ["Two", "Ladder"] {
            let r = get(l);
            assert_eq!(r.intervals().len(), 1, "{l}: {r}");
            assert!(r.min().unwrap().abs() < 1e-8 && (r.max().unwrap() - LN_2).abs() < 1e-8);
        }
        assert!(radial_hausdorff(&get("Zero"), &RadialSet::point(0.0)) < 2e-9);
        let m = RadialModel::new(&s, 1e-9).unwrap();
        assert!(m.backward_invariant(1e-9));
    }

    #[test]
    fn kernels() {
        let s = jump_annulus();
        let m = RadialModel::new(&s, 1e-9).unwrap();
        assert_eq!(m.kernel(&StatePoint::extra("2"), 2).unwrap(), KernelCertificate::EmptyAtDepth(2));
        assert_eq!(m.kernel(&StatePoint::rung(0), 3).unwrap(), KernelCertificate::ExactNonempty(RadialSet::point(0.0)));
        let r = reinforcement(0.5).unwrap();
        let m = RadialModel::new(&r, 1e-9).unwrap();
        assert_eq!(m.kernel(&StatePoint::real(0.5), 2).unwrap(), KernelCertificate::EmptyAtDepth(2));
        let one = m.kernel(&StatePoint::real(1.0), 2).unwrap();
        assert_eq!(one, KernelCertificate::ExactNonempty(RadialSet::point(LN_2)));
    }

    #[test]
    fn missing_classes_is_configuration_error() {
        assert!(matches!(statewise_julia_radial(&fattening(), 1e-9), Err(RsccError::Configuration(_))));
    }

    #[test]
    fn path_radii() {
        let (t, e) = path_julia_radius(|_| f(), 40).unwrap();
        assert_eq!((t, e), (0.0, 0.0));
        let (t, e) = path_julia_radius(|_| g(), 60).unwrap();
        assert!((t - LN_2).abs() <= e + 1e-15);
        let (t, _) = path_julia_radius(|k| if k % 2 == 0 { g() } else { f() }, 60).unwrap();
        assert!((t - 2.0 / 3.0 * LN_2).abs() < 1e-15);
    }
}
