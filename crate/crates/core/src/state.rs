//! State points, state spaces and index identifiers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive};

use crate::error::{domain, invalid, Result};

/// Tolerance used when deduplicating real-valued states.
pub const STATE_DEDUP_TOL: f64 = 1e-12;

/// Exact real number. Every finite `f64` is a dyadic rational, so affine
/// updates of real states are carried out without rounding; states near an
/// interval endpoint therefore never collapse onto it by accident.
pub type ExactReal = BigRational;

pub fn exact(x: f64) -> ExactReal {
    BigRational::from_f64(x).expect("finite real")
}

pub fn exact_ratio(num: i64, den: i64) -> ExactReal {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &ExactReal) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A point of the `{0} ∪ {1/n} ∪ extras` ladder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rung {
    /// `Reciprocal(n)` is the point `1/n`; `Reciprocal(0)` is the point 0.
    Reciprocal(u64),
    /// A distinguished extra point, labelled by its decimal value (e.g. "2").
    Extra(String),
}

impl Rung {
    pub const ZERO: Rung = Rung::Reciprocal(0);

    pub fn value(&self) -> f64 {
        match self {
            Rung::Reciprocal(0) => 0.0,
            Rung::Reciprocal(n) => 1.0 / *n as f64,
            Rung::Extra(label) => label.parse().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StatePoint {
    Discrete(String),
    Real(ExactReal),
    Ladder(Rung),
}

impl StatePoint {
    pub fn real(x: f64) -> Self {
        StatePoint::Real(exact(x))
    }

    pub fn rung(n: u64) -> Self {
        StatePoint::Ladder(Rung::Reciprocal(n))
    }

    pub fn extra(label: &str) -> Self {
        StatePoint::Ladder(Rung::Extra(label.to_string()))
    }

    pub fn discrete(label: &str) -> Self {
        StatePoint::Discrete(label.to_string())
    }

    /// Position on the real line; discrete labels have no embedding.
    pub fn embedding(&self) -> Option<f64> {
        match self {
            StatePoint::Discrete(_) => None,
            StatePoint::Real(x) => Some(to_f64(x)),
            StatePoint::Ladder(r) => Some(r.value()),
        }
    }

    fn tag(&self) -> u8 {
        match self {
            StatePoint::Discrete(_) => 0,
            StatePoint::Real(_) => 1,
            StatePoint::Ladder(_) => 2,
        }
    }

    /// Total order used for sorted outputs: by tag, then position, then label.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.tag().cmp(&other.tag()).then_with(|| match (self, other) {
            (StatePoint::Discrete(a), StatePoint::Discrete(b)) => a.cmp(b),
            (StatePoint::Real(a), StatePoint::Real(b)) => a.cmp(b),
            (StatePoint::Ladder(a), StatePoint::Ladder(b)) => {
                let (x, y) = (a.value(), b.value());
                x.total_cmp(&y).then_with(|| match (a, b) {
                    (Rung::Extra(p), Rung::Extra(q)) => p.cmp(q),
                    (Rung::Extra(_), _) => Ordering::Greater,
                    (_, Rung::Extra(_)) => Ordering::Less,
                    _ => Ordering::Equal,
                })
            }
            _ => Ordering::Equal,
        })
    }

    /// Equality with the real-state tie rule: real states closer than
    /// [`STATE_DEDUP_TOL`] are identified.
    pub fn approx_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (StatePoint::Real(a), StatePoint::Real(b)) => {
                a == b || libm::fabs(to_f64(a) - to_f64(b)) <= STATE_DEDUP_TOL
            }
            _ => self == other,
        }
    }

    /// Parses `1/3`, `0`, `2`, `0.25` or a bare label against a state space.
    pub fn parse(text: &str, space: &StateSpace) -> Result<Self> {
        let t = text.trim();
        let point = match space {
            StateSpace::Discrete { .. } => StatePoint::Discrete(t.to_string()),
            StateSpace::Interval { .. } => {
                let v: f64 = parse_number(t)?;
                StatePoint::Real(exact(v))
            }
            StateSpace::Ladder { extras } => {
                if extras.iter().any(|e| e == t) {
                    StatePoint::extra(t)
                } else if let Some(den) = t.strip_prefix("1/") {
                    let n: u64 = den
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("bad ladder point '{t}'")))?;
                    if n == 0 {
                        return Err(invalid("1/0 is not a ladder point"));
                    }
                    StatePoint::rung(n)
                } else {
                    let v = parse_number(t)?;
                    if v == 0.0 {
                        StatePoint::rung(0)
                    } else if v > 0.0 && v <= 1.0 && libm::fabs(1.0 / v - libm::round(1.0 / v)) < 1e-9
                    {
                        StatePoint::rung(libm::round(1.0 / v) as u64)
                    } else {
                        return Err(domain(format!("{t} is not a ladder point")));
                    }
                }
            }
        };
        space.check(&point)?;
        Ok(point)
    }
}

fn parse_number(t: &str) -> Result<f64> {
    if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| invalid(format!("bad number '{t}'")))?;
        let b: f64 = b.trim().parse().map_err(|_| invalid(format!("bad number '{t}'")))?;
        return Ok(a / b);
    }
    t.parse().map_err(|_| invalid(format!("bad number '{t}'")))
}

impl fmt::Display for StatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePoint::Discrete(l) => f.write_str(l),
            StatePoint::Real(x) => {
                // exact dyadics print through the nearest double
                write!(f, "{}", to_f64(x))
            }
            StatePoint::Ladder(Rung::Reciprocal(0)) => f.write_str("0"),
            StatePoint::Ladder(Rung::Reciprocal(1)) => f.write_str("1"),
            StatePoint::Ladder(Rung::Reciprocal(n)) => write!(f, "1/{n}"),
            StatePoint::Ladder(Rung::Extra(l)) => f.write_str(l),
        }
    }
}

/// Declared state space `W` with its metric.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpace {
    /// `{0} ∪ {1/n : n ≥ 1} ∪ extras` with the Euclidean metric.
    Ladder { extras: Vec<String> },
    /// Closed interval with the Euclidean metric.
    Interval { lo: f64, hi: f64 },
    /// Finite label set with the discrete 0/1 metric.
    Discrete { labels: Vec<String> },
}

impl StateSpace {
    pub fn is_discrete(&self) -> bool {
        matches!(self, StateSpace::Discrete { .. })
    }

    pub fn check(&self, w: &StatePoint) -> Result<()> {
        let ok = match (self, w) {
            (StateSpace::Ladder { extras }, StatePoint::Ladder(r)) => match r {
                Rung::Reciprocal(_) => true,
                Rung::Extra(l) => extras.contains(l),
            },
            (StateSpace::Interval { lo, hi }, StatePoint::Real(x)) => {
                *x >= exact(*lo) && *x <= exact(*hi)
            }
            (StateSpace::Discrete { labels }, StatePoint::Discrete(l)) => labels.contains(l),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("state {w} lies outside the state space")))
        }
    }

    /// The declared metric `d_W`.
    pub fn distance(&self, a: &StatePoint, b: &StatePoint) -> f64 {
        match (a, b) {
            (StatePoint::Discrete(x), StatePoint::Discrete(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (StatePoint::Real(x), StatePoint::Real(y)) => to_f64(&(x - y).abs()),
            _ => match (a.embedding(), b.embedding()) {
                (Some(x), Some(y)) => libm::fabs(x - y),
                _ => f64::INFINITY,
            },
        }
    }

    /// The state as a number, used by the state-coordinate test function.
    /// Discrete labels map to their position in the label list.
    pub fn coordinate(&self, w: &StatePoint) -> f64 {
        match (self, w) {
            (StateSpace::Discrete { labels }, StatePoint::Discrete(l)) => {
                labels.iter().position(|x| x == l).map_or(f64::NAN, |i| i as f64)
            }
            _ => w.embedding().unwrap_or(f64::NAN),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StateSpace::Ladder { .. } => "ladder",
            StateSpace::Interval { .. } => "interval",
            StateSpace::Discrete { .. } => "discrete",
        }
    }
}

/// Index `x ∈ X`: a dense id plus a display name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexId {
    pub id: usize,
    pub name: String,
}

impl IndexId {
    pub fn new(id: usize, name: &str) -> Self {
        IndexId { id, name: name.to_string() }
    }
}

/// Finite index word; the empty word means "no step".
pub type Word = Vec<usize>;

pub(crate) fn exact_one() -> ExactReal {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ladder() -> StateSpace {
        StateSpace::Ladder { extras: vec!["2".into()] }
    }

    #[test]
    fn parse_ladder_points() {
        let s = ladder();
        assert_eq!(StatePoint::parse("1/3", &s).unwrap(), StatePoint::rung(3));
        assert_eq!(StatePoint::parse("0", &s).unwrap(), StatePoint::rung(0));
        assert_eq!(StatePoint::parse("1", &s).unwrap(), StatePoint::rung(1));
        assert_eq!(StatePoint::parse("0.25", &s).unwrap(), StatePoint::rung(4));
        assert_eq!(StatePoint::parse("2", &s).unwrap(), StatePoint::extra("2"));
        assert!(StatePoint::parse("0.3", &s).is_err());
    }

    #[test]
    fn interval_bounds_are_enforced() {
        let s = StateSpace::Interval { lo: 0.01, hi: 0.99 };
        assert!(StatePoint::parse("0.5", &s).is_ok());
        assert!(matches!(StatePoint::parse("0.995", &s), Err(crate::RsccError::Domain(_))));
    }

    #[test]
    fn metrics() {
        let d = StateSpace::Discrete { labels: vec!["a".into(), "b".into()] };
        assert_eq!(d.distance(&StatePoint::discrete("a"), &StatePoint::discrete("b")), 1.0);
        assert_eq!(d.distance(&StatePoint::discrete("a"), &StatePoint::discrete("a")), 0.0);
        let l = ladder();
        assert!((l.distance(&StatePoint::rung(2), &StatePoint::extra("2")) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn display_round_trips_ladder() {
        let l = ladder();
        for p in [StatePoint::rung(0), StatePoint::rung(1), StatePoint::rung(7), StatePoint::extra("2")] {
            let s = p.to_string();
            assert_eq!(StatePoint::parse(&s, &l).unwrap(), p);
        }
    }
}
