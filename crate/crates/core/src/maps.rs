//! Map families on the Riemann sphere and on real intervals.
//!
//! Monomials `z ↦ c z^d` (with `c > 0`) act on the log-radius `s = log|z|` as
//! the affine map `s ↦ d·s + log c`; this is what makes their Julia sets
//! computable exactly in [`crate::radial`].

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

pub use num_complex::Complex64;

use crate::error::{domain, invalid, unsupported, Result, RsccError};

/// Degrees above this are evaluated in log-polar form.
pub const LOG_POLAR_DEGREE: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn real(x: f64) -> Self {
        SpherePoint::new(x, 0.0)
    }

    pub fn modulus(&self) -> f64 {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }

    /// `log|z|`, with `-∞` at 0 and `+∞` at infinity.
    pub fn log_modulus(&self) -> f64 {
        match self {
            SpherePoint::Finite(z) => libm::log(z.norm()),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }

    fn from_polar_log(log_r: f64, theta: f64) -> SpherePoint {
        if log_r > 709.0 {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(Complex64::from_polar(libm::exp(log_r), theta))
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            SpherePoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Chordal metric on the sphere, `2|a-b| / √((1+|a|²)(1+|b|²))`, in `[0, 2]`.
pub fn chordal_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Infinity, SpherePoint::Finite(z)) | (SpherePoint::Finite(z), SpherePoint::Infinity) => {
            2.0 / libm::sqrt(1.0 + z.norm_sqr())
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            let (nz, nw) = (z.norm(), w.norm());
            if nz <= 1.0 && nw <= 1.0 {
                2.0 * (z - w).norm() / libm::sqrt((1.0 + nz * nz) * (1.0 + nw * nw))
            } else if nz > 1.0 && nw > 1.0 {
                // inversion z ↦ 1/z is an isometry
                chordal_distance(SpherePoint::Finite(z.inv()), SpherePoint::Finite(w.inv()))
            } else {
                let (big, small) = if nz > 1.0 { (z, w) } else { (w, z) };
                let nb = big.norm();
                let q = Complex64::new(1.0, 0.0) - small / big;
                let d = 2.0 * q.norm()
                    / (libm::sqrt(1.0 + 1.0 / (nb * nb)) * libm::sqrt(1.0 + small.norm_sqr()));
                d.min(2.0)
            }
        }
    }
}

/// `z ↦ c·z^d` with real `c > 0`, stored as `(log c, d)` so compositions
/// accumulate the coefficient exactly in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub log_coeff: f64,
    pub degree: u64,
}

impl Monomial {
    pub fn new(coeff_modulus: f64, degree: u64) -> Result<Self> {
        if !(coeff_modulus > 0.0 && coeff_modulus.is_finite()) {
            return Err(invalid(format!("monomial coefficient must be positive, got {coeff_modulus}")));
        }
        if degree < 2 {
            return Err(invalid(format!("monomial degree must be at least 2, got {degree}")));
        }
        Ok(Monomial { log_coeff: libm::log(coeff_modulus), degree })
    }

    pub fn coeff(&self) -> f64 {
        libm::exp(self.log_coeff)
    }

    /// Inverse log-radius action `s ↦ (s - log c)/d`.
    pub fn inverse_log_radius(&self, s: f64) -> f64 {
        (s - self.log_coeff) / self.degree as f64
    }

    /// Fixed point of the log-radius action: the invariant circle's log-radius.
    pub fn fixed_log_radius(&self) -> f64 {
        -self.log_coeff / (self.degree as f64 - 1.0)
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(w) => {
                let r = w.norm();
                if r == 0.0 {
                    return SpherePoint::Finite(Complex64::new(0.0, 0.0));
                }
                if self.degree <= LOG_POLAR_DEGREE && (1e-100..=1e100).contains(&r) {
                    let v = w.powi(self.degree as i32) * self.coeff();
                    if v.re.is_finite() && v.im.is_finite() {
                        return SpherePoint::Finite(v);
                    }
                }
                let log_r = self.log_coeff + self.degree as f64 * libm::log(r);
                let theta = rem_2pi(self.degree as f64 * w.arg());
                SpherePoint::from_polar_log(log_r, theta)
            }
        }
    }
}

fn rem_2pi(t: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    t - tau * libm::floor(t / tau)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Monomial(Monomial),
    /// `y ↦ a·y + b` on `[lo, hi]`, required to map the interval into itself.
    AffineInterval { a: f64, b: f64, lo: f64, hi: f64 },
    Constant(SpherePoint),
    /// `c0 + c1 z + … + cd z^d`, leading coefficient nonzero, `d ≥ 2`.
    PolynomialC(Vec<Complex64>),
}

impl MapSpec {
    pub fn monomial(c: f64, d: u64) -> Result<Self> {
        Ok(MapSpec::Monomial(Monomial::new(c, d)?))
    }

    pub fn affine(a: f64, b: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid("affine map needs lo < hi"));
        }
        let (p, q) = (a * lo + b, a * hi + b);
        let tol = 1e-12 * (1.0 + libm::fabs(lo) + libm::fabs(hi));
        if p < lo - tol || p > hi + tol || q < lo - tol || q > hi + tol {
            return Err(invalid(format!("affine map {a}·y+{b} does not map [{lo},{hi}] into itself")));
        }
        Ok(MapSpec::AffineInterval { a, b, lo, hi })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(invalid("polynomial maps need degree at least 2"));
        }
        if coeffs.last().is_none_or(|c| c.norm() == 0.0) {
            return Err(invalid("polynomial leading coefficient must be nonzero"));
        }
        Ok(MapSpec::PolynomialC(coeffs))
    }

    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self {
            MapSpec::Monomial(m) => Some(m),
            _ => None,
        }
    }

    /// Open continuous self-map of its space (Constant maps are not open).
    pub fn is_open(&self) -> bool {
        match self {
            MapSpec::Monomial(_) | MapSpec::PolynomialC(_) => true,
            MapSpec::AffineInterval { a, .. } => *a != 0.0,
            MapSpec::Constant(_) => false,
        }
    }

    pub fn acts_on_sphere(&self) -> bool {
        !matches!(self, MapSpec::AffineInterval { .. })
    }

    /// Exact evaluation. Interval maps reject points off the real interval.
    pub fn apply(&self, z: SpherePoint) -> Result<SpherePoint> {
        match self {
            MapSpec::Monomial(m) => Ok(m.apply(z)),
            MapSpec::Constant(c) => Ok(*c),
            MapSpec::AffineInterval { a, b, lo, hi } => match z {
                SpherePoint::Finite(w) if w.im == 0.0 && w.re >= *lo && w.re <= *hi => {
                    Ok(SpherePoint::real((a * w.re + b).clamp(*lo, *hi)))
                }
                _ => Err(domain(format!("{z} is outside the interval [{lo}, {hi}]"))),
            },
            MapSpec::PolynomialC(cs) => Ok(match z {
                SpherePoint::Infinity => SpherePoint::Infinity,
                SpherePoint::Finite(w) => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in cs.iter().rev() {
                        acc = acc * w + c;
                    }
                    if acc.re.is_finite() && acc.im.is_finite() {
                        SpherePoint::Finite(acc)
                    } else {
                        SpherePoint::Infinity
                    }
                }
            }),
        }
    }
}

impl fmt::Display for MapSpec {
    /// Scenario-file serialization: `monomial c d`, `affine a b lo hi`,
    /// `const v` (or `const re im`, `const inf`), `poly c0 c1 … cd`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Monomial(m) => write!(f, "monomial {} {}", m.coeff(), m.degree),
            MapSpec::AffineInterval { a, b, lo, hi } => write!(f, "affine {a} {b} {lo} {hi}"),
            MapSpec::Constant(SpherePoint::Infinity) => f.write_str("const inf"),
            MapSpec::Constant(SpherePoint::Finite(z)) if z.im == 0.0 => write!(f, "const {}", z.re),
            MapSpec::Constant(SpherePoint::Finite(z)) => write!(f, "const {} {}", z.re, z.im),
            MapSpec::PolynomialC(cs) => {
                f.write_str("poly")?;
                for c in cs {
                    if c.im == 0.0 {
                        write!(f, " {}", c.re)?;
                    } else {
                        write!(f, " {}{:+}i", c.re, c.im)?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse().map_err(|_| invalid(format!("bad number '{tok}'")))
}

fn parse_complex(tok: &str) -> Result<Complex64> {
    let t = tok.trim();
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let mut cut = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                cut = Some(i);
                break;
            }
        }
        return match cut {
            Some(i) => Ok(Complex64::new(parse_f64(&body[..i])?, parse_f64(&body[i..])?)),
            None => Ok(Complex64::new(0.0, parse_f64(body)?)),
        };
    }
    Ok(Complex64::new(parse_f64(t)?, 0.0))
}

impl core::str::FromStr for MapSpec {
    type Err = RsccError;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            ["monomial", c, d] => {
                let d: u64 = d.parse().map_err(|_| invalid(format!("bad degree '{d}'")))?;
                MapSpec::monomial(parse_f64(c)?, d)
            }
            ["affine", a, b, lo, hi] => {
                MapSpec::affine(parse_f64(a)?, parse_f64(b)?, parse_f64(lo)?, parse_f64(hi)?)
            }
            ["const", "inf"] => Ok(MapSpec::Constant(SpherePoint::Infinity)),
            ["const", v] => Ok(MapSpec::Constant(SpherePoint::Finite(parse_complex(v)?))),
            ["const", re, im] => Ok(MapSpec::Constant(SpherePoint::new(parse_f64(re)?, parse_f64(im)?))),
            ["poly", rest @ ..] if !rest.is_empty() => {
                MapSpec::polynomial(rest.iter().map(|t| parse_complex(t)).collect::<Result<_>>()?)
            }
            _ => Err(invalid(format!("cannot parse map '{s}'"))),
        }
    }
}

/// Closed form of `m_1 ∘ m_2 ∘ … ∘ m_k` (the first element is applied last).
pub fn compose_monomials(maps: &[Monomial]) -> Result<Monomial> {
    let (last, rest) = maps
        .split_last()
        .ok_or_else(|| invalid("compose_monomials needs at least one map"))?;
    let mut acc = *last;
    for m in rest.iter().rev() {
        // m ∘ acc: c_m (c_acc z^D)^d = c_m c_acc^d z^{dD}
        let degree = acc
            .degree
            .checked_mul(m.degree)
            .ok_or(RsccError::ResourceCap { what: "composed monomial degree", limit: u64::MAX })?;
        acc = Monomial { log_coeff: m.log_coeff + m.degree as f64 * acc.log_coeff, degree };
    }
    Ok(acc)
}

/// Log-radius action `s ↦ slope·s + offset` of a monomial.
pub fn log_radius_action(m: &MapSpec) -> Result<(f64, f64)> {
    match m {
        MapSpec::Monomial(mm) => Ok((mm.degree as f64, mm.log_coeff)),
        other => Err(unsupported(format!("log-radius action needs a monomial, got '{other}'"))),
    }
}

pub fn apply_map(m: &MapSpec, z: SpherePoint) -> Result<SpherePoint> {
    m.apply(z)
}
