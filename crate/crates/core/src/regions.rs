//! Known convexity and concavity regions of `Φ_{p,q,s}`, of the sandwich map
//! `(A,B) ↦ A^{q/2} B^p A^{q/2}` and of the triple trace.
//!
//! Exponents entered as exact rationals are compared exactly; anything
//! involving a decimal is compared with an absolute/relative slack of `1e-12`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{ParamPoint, TripleParams};

/// Slack used when at least one operand of a comparison is a decimal.
pub const DECIMAL_TOL: f64 = 1e-12;

/// An exponent, either an exact rational or a decimal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Exact(Ratio<i128>),
    Decimal(f64),
}

impl Exponent {
    pub fn rational(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::param("zero denominator"));
        }
        Ok(Exponent::Exact(Ratio::new(numer as i128, denom as i128)))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Decimal(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Exponent::Exact(_))
    }

    fn is_zero(self) -> bool {
        match self {
            Exponent::Exact(r) => *r.numer() == 0,
            Exponent::Decimal(x) => x == 0.0,
        }
    }
}

impl From<f64> for Exponent {
    fn from(x: f64) -> Self {
        Exponent::Decimal(x)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `"n/d"` (exact), a bare integer (exact) or a decimal.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| Error::param(format!("bad numerator in {s:?}")))?;
            let d: i64 = d.trim().parse().map_err(|_| Error::param(format!("bad denominator in {s:?}")))?;
            return Exponent::rational(n, d);
        }
        if let Ok(n) = t.parse::<i64>() {
            return Exponent::rational(n, 1);
        }
        let x: f64 = t.parse().map_err(|_| Error::param(format!("cannot parse exponent {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::param(format!("exponent must be finite, got {s:?}")));
        }
        Ok(Exponent::Decimal(x))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Decimal(x) => write!(f, "{x}"),
        }
    }
}

// Serialized as the same text `FromStr` accepts.
impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Arithmetic on exponents. Extended with +∞ so that 1/(p−1) at p = 1 is representable.
#[derive(Clone, Copy, Debug)]
enum Val {
    Exact(Ratio<i128>),
    Approx(f64),
    Infinite,
}

impl From<Exponent> for Val {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Exact(r) => Val::Exact(r),
            Exponent::Decimal(x) => Val::Approx(x),
        }
    }
}

fn int(n: i128) -> Val {
    Val::Exact(Ratio::from_integer(n))
}

impl Val {
    fn approx(self) -> f64 {
        match self {
            Val::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Val::Approx(x) => x,
            Val::Infinite => f64::INFINITY,
        }
    }

    fn add(self, o: Val) -> Val {
        match (self, o) {
            (Val::Infinite, _) | (_, Val::Infinite) => Val::Infinite,
            (Val::Exact(a), Val::Exact(b)) => Val::Exact(a + b),
            (a, b) => Val::Approx(a.approx() + b.approx()),
        }
    }

    fn neg(self) -> Val {
        match self {
            Val::Exact(a) => Val::Exact(-a),
            Val::Approx(x) => Val::Approx(-x),
            Val::Infinite => Val::Infinite,
        }
    }

    fn sub(self, o: Val) -> Val {
        self.add(o.neg())
    }

    /// `1/x`, with `1/0 = +∞` (only used where the denominator is known ≥ 0).
    fn recip(self) -> Val {
        if self.cmp_to(int(0)) == Ordering::Equal {
            return Val::Infinite;
        }
        match self {
            Val::Exact(a) => Val::Exact(a.recip()),
            Val::Approx(x) => Val::Approx(1.0 / x),
            Val::Infinite => int(0),
        }
    }

    fn min(self, o: Val) -> Val {
        if self.cmp_to(o) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    fn cmp_to(self, o: Val) -> Ordering {
        match (self, o) {
            (Val::Infinite, Val::Infinite) => Ordering::Equal,
            (Val::Infinite, _) => Ordering::Greater,
            (_, Val::Infinite) => Ordering::Less,
            (Val::Exact(a), Val::Exact(b)) => a.cmp(&b),
            (a, b) => {
                let (x, y) = (a.approx(), b.approx());
                if (x - y).abs() <= DECIMAL_TOL * x.abs().max(y.abs()).max(1.0) {
                    Ordering::Equal
                } else if x < y {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    fn le(self, o: Val) -> bool {
        self.cmp_to(o) != Ordering::Greater
    }

    fn lt(self, o: Val) -> bool {
        self.cmp_to(o) == Ordering::Less
    }

    fn ge(self, o: Val) -> bool {
        o.le(self)
    }

    fn eq(self, o: Val) -> bool {
        self.cmp_to(o) == Ordering::Equal
    }

    fn in_closed(self, lo: i128, hi: i128) -> bool {
        self.ge(int(lo)) && self.le(int(hi))
    }
}

/// `(p, q, s)` as exponents; `p, q ≠ 0`, `s > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentTriple {
    pub p: Exponent,
    pub q: Exponent,
    pub s: Exponent,
}

impl ExponentTriple {
    pub fn new(p: Exponent, q: Exponent, s: Exponent) -> Result<Self> {
        ParamPoint::new(p.to_f64(), q.to_f64(), s.to_f64())?;
        if p.is_zero() || q.is_zero() || !Val::from(s).ge(int(0)) || s.is_zero() {
            return Err(Error::param("p and q must be nonzero and s positive"));
        }
        Ok(ExponentTriple { p, q, s })
    }

    pub fn parse(p: &str, q: &str, s: &str) -> Result<Self> {
        ExponentTriple::new(p.parse()?, q.parse()?, s.parse()?)
    }

    pub fn to_param_point(&self) -> ParamPoint {
        ParamPoint {
            p: self.p.to_f64(),
            q: self.q.to_f64(),
            s: self.s.to_f64(),
        }
    }

    #[cfg(test)]
    fn swapped(&self) -> Self {
        ExponentTriple {
            p: self.q,
            q: self.p,
            s: self.s,
        }
    }
}

impl From<&ParamPoint> for ExponentTriple {
    fn from(x: &ParamPoint) -> Self {
        ExponentTriple {
            p: x.p.into(),
            q: x.q.into(),
            s: x.s.into(),
        }
    }
}

impl From<ParamPoint> for ExponentTriple {
    fn from(x: ParamPoint) -> Self {
        (&x).into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionStatus {
    ProvenConvex,
    ProvenConcave,
    ProvenNotConvex,
    ProvenNotConcave,
    OpenConvexity,
}

impl RegionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionStatus::ProvenConvex => "proven_convex",
            RegionStatus::ProvenConcave => "proven_concave",
            RegionStatus::ProvenNotConvex => "proven_not_convex",
            RegionStatus::ProvenNotConcave => "proven_not_concave",
            RegionStatus::OpenConvexity => "open_convexity",
        }
    }

    /// Status asserting that the property holds.
    pub fn is_proven_positive(self) -> bool {
        matches!(self, RegionStatus::ProvenConvex | RegionStatus::ProvenConcave)
    }

    /// Status asserting that the property fails for some input.
    pub fn is_proven_negative(self) -> bool {
        matches!(self, RegionStatus::ProvenNotConvex | RegionStatus::ProvenNotConcave)
    }
}

impl fmt::Display for RegionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Citation tags naming the statement behind a verdict.
pub mod tags {
    /// `p = 2`, `−1 ≤ q < 0`, `s ≥ 1/(2+q)`.
    pub const P2_OPTIMAL: &str = "p2-optimal-range";
    /// `p ∈ [1,2]`, `q ∈ [−1,0)`, `s ≥ min{1/(p−1), 1/(1+q)}`.
    pub const LARGE_S: &str = "large-s-convexity";
    /// `s = 1` together with the positive/negative necessary condition.
    pub const ANDO_S1: &str = "ando-s1";
    /// `s = 1` with `−1 ≤ p,q < 0`.
    pub const NEGATIVE_S1: &str = "negative-exponents-s1";
    /// `−1 ≤ p,q < 0`, `1/2 ≤ s ≤ −1/(p+q)`.
    pub const HIAI_NEGATIVE: &str = "hiai-negative-exponents";
    /// `p ∈ (1,2)`, `q ∈ [−1,0)`, s between `1/(p+q)` and the proven range.
    pub const CONVEXITY_GAP: &str = "mixed-sign-gap";
    /// `−1 ≤ p,q < 0` outside both proven ranges.
    pub const NEGATIVE_GAP: &str = "negative-exponents-gap";
    /// Neither necessary condition for convexity holds.
    pub const HIAI_NECESSARY: &str = "hiai-necessary-conditions";
    /// `0 < p,q ≤ 1`, `s ≤ 1/(p+q)` characterizes concavity.
    pub const CONCAVITY_IFF: &str = "concavity-iff";
    /// The sandwich map is operator convex iff `q = 2`, `−1 ≤ p < 0`.
    pub const OPERATOR_CONVEXITY_IFF: &str = "operator-convexity-iff";
    /// The sandwich map is never operator concave.
    pub const OPERATOR_NEVER_CONCAVE: &str = "operator-never-concave";
    /// The triple trace is convex iff `q = 2`, `p,r < 0`, `−1 ≤ p+r < 0`.
    pub const TRIPLE_CONVEXITY_IFF: &str = "triple-convexity-iff";
    /// The triple trace is never concave.
    pub const TRIPLE_NEVER_CONCAVE: &str = "triple-never-concave";
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub status: RegionStatus,
    pub justification: String,
}

impl RegionVerdict {
    fn new(status: RegionStatus, tag: &str) -> Self {
        RegionVerdict {
            status,
            justification: tag.to_string(),
        }
    }
}

/// Convexity and concavity verdicts for the same exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub convexity: RegionVerdict,
    pub concavity: RegionVerdict,
}

// The predicates below are written for the ordering "p is the positive
// exponent"; callers try both orderings.

fn mixed_necessary(p: Val, q: Val, s: Val) -> bool {
    p.in_closed(1, 2) && q.ge(int(-1)) && q.lt(int(0)) && s.ge(p.add(q).recip())
}

fn negative_necessary(p: Val, q: Val) -> bool {
    p.ge(int(-1)) && p.lt(int(0)) && q.ge(int(-1)) && q.lt(int(0))
}

fn p2_optimal(p: Val, q: Val, s: Val) -> bool {
    p.eq(int(2)) && q.ge(int(-1)) && q.lt(int(0)) && s.ge(int(2).add(q).recip())
}

fn large_s(p: Val, q: Val, s: Val) -> bool {
    if !(p.in_closed(1, 2) && q.ge(int(-1)) && q.lt(int(0))) {
        return false;
    }
    let bound = p.sub(int(1)).recip().min(int(1).add(q).recip());
    !matches!(bound, Val::Infinite) && s.ge(bound)
}

fn either<F: Fn(Val, Val, Val) -> bool>(t: &ExponentTriple, f: F) -> bool {
    let (p, q, s) = (t.p.into(), t.q.into(), t.s.into());
    f(p, q, s) || f(q, p, s)
}

/// Proven status of joint convexity of `Φ_{p,q,s}`. When several results
/// apply the strongest one is cited.
pub fn classify_convexity(t: &ExponentTriple) -> RegionVerdict {
    use RegionStatus::*;
    let s: Val = t.s.into();
    let s_is_one = s.eq(int(1));
    if either(t, p2_optimal) {
        return RegionVerdict::new(ProvenConvex, tags::P2_OPTIMAL);
    }
    if either(t, large_s) {
        return RegionVerdict::new(ProvenConvex, tags::LARGE_S);
    }
    let mixed = either(t, mixed_necessary);
    let negative = negative_necessary(t.p.into(), t.q.into());
    if s_is_one && mixed {
        return RegionVerdict::new(ProvenConvex, tags::ANDO_S1);
    }
    if s_is_one && negative {
        return RegionVerdict::new(ProvenConvex, tags::NEGATIVE_S1);
    }
    if negative {
        let sum = Val::from(t.p).add(t.q.into());
        if s.ge(Val::Exact(Ratio::new(1, 2))) && s.le(sum.neg().recip()) {
            return RegionVerdict::new(ProvenConvex, tags::HIAI_NEGATIVE);
        }
        return RegionVerdict::new(OpenConvexity, tags::NEGATIVE_GAP);
    }
    if mixed {
        return RegionVerdict::new(OpenConvexity, tags::CONVEXITY_GAP);
    }
    RegionVerdict::new(ProvenNotConvex, tags::HIAI_NECESSARY)
}

/// Proven status of joint concavity of `Φ_{p,q,s}` (a complete characterization).
pub fn classify_concavity(t: &ExponentTriple) -> RegionVerdict {
    let (p, q, s): (Val, Val, Val) = (t.p.into(), t.q.into(), t.s.into());
    let unit = |x: Val| x.gt_zero() && x.le(int(1));
    if unit(p) && unit(q) && s.le(p.add(q).recip()) {
        RegionVerdict::new(RegionStatus::ProvenConcave, tags::CONCAVITY_IFF)
    } else {
        RegionVerdict::new(RegionStatus::ProvenNotConcave, tags::CONCAVITY_IFF)
    }
}

impl Val {
    fn gt_zero(self) -> bool {
        int(0).lt(self)
    }
}

pub fn classify(t: &ExponentTriple) -> Classification {
    Classification {
        convexity: classify_convexity(t),
        concavity: classify_concavity(t),
    }
}

/// Joint operator convexity/concavity of `(A,B) ↦ A^{q/2} B^p A^{q/2}`.
pub fn classify_operator_map(p: Exponent, q: Exponent) -> Result<Classification> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::param("p and q must be nonzero"));
    }
    let (p, q): (Val, Val) = (p.into(), q.into());
    let convex = q.eq(int(2)) && p.ge(int(-1)) && p.lt(int(0));
    Ok(Classification {
        convexity: RegionVerdict::new(
            if convex {
                RegionStatus::ProvenConvex
            } else {
                RegionStatus::ProvenNotConvex
            },
            tags::OPERATOR_CONVEXITY_IFF,
        ),
        concavity: RegionVerdict::new(RegionStatus::ProvenNotConcave, tags::OPERATOR_NEVER_CONCAVE),
    })
}

/// Joint convexity/concavity of `(A,B,C) ↦ Tr[A^{q/2} B^p A^{q/2} C^r]`.
pub fn classify_triple(p: Exponent, q: Exponent, r: Exponent) -> Result<Classification> {
    if p.is_zero() || q.is_zero() || r.is_zero() {
        return Err(Error::param("p, q and r must be nonzero"));
    }
    let (p, q, r): (Val, Val, Val) = (p.into(), q.into(), r.into());
    let sum = p.add(r);
    let convex = q.eq(int(2)) && p.lt(int(0)) && r.lt(int(0)) && sum.ge(int(-1)) && sum.lt(int(0));
    Ok(Classification {
        convexity: RegionVerdict::new(
            if convex {
                RegionStatus::ProvenConvex
            } else {
                RegionStatus::ProvenNotConvex
            },
            tags::TRIPLE_CONVEXITY_IFF,
        ),
        concavity: RegionVerdict::new(RegionStatus::ProvenNotConcave, tags::TRIPLE_NEVER_CONCAVE),
    })
}

pub fn classify_triple_params(t: &TripleParams) -> Classification {
    classify_triple(t.p.into(), t.q.into(), t.r.into()).expect("TripleParams are validated nonzero")
}
