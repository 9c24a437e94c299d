//! The abstract domain: binary64-endpoint intervals with outward rounding.
//!
//! Directed rounding is emulated by stepping endpoints to the next
//! representable value instead of switching the FPU rounding mode, costing at
//! most one ulp per endpoint. Addition, subtraction and multiplication skip
//! the widening when an error-free transformation proves the endpoint exact;
//! division, square root, logarithm and exponential always widen. Endpoint
//! evaluation of `ln`/`exp` uses the platform's round-to-nearest
//! implementations, assumed accurate to under one ulp, so those endpoints
//! carry that additional slack.

use std::cmp::Ordering;

use crate::dd::{two_prod, two_sum, Dd};
use crate::error::Error;
use crate::expr::OpKind;
use crate::literal;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interval {
    Empty,
    Range { lo: f64, hi: f64 },
}

use Interval::{Empty, Range};

/// The top element `[-inf, +inf]`.
pub const TOP: Interval = Range { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

#[inline]
fn norm_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[inline]
fn widen_down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        x
    } else {
        x.next_down()
    }
}

#[inline]
fn widen_up(x: f64) -> f64 {
    if x == f64::INFINITY {
        x
    } else {
        x.next_up()
    }
}

impl Interval {
    /// A nonempty interval; panics on NaN or a reversed pair.
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(!lo.is_nan() && !hi.is_nan(), "interval endpoints must not be NaN");
        assert!(lo <= hi, "reversed interval [{lo}, {hi}]");
        Range { lo: norm_zero(lo), hi: norm_zero(hi) }
    }

    pub fn singleton(x: f64) -> Interval {
        Interval::new(x, x)
    }

    pub fn is_empty(self) -> bool {
        matches!(self, Empty)
    }

    pub fn lo(self) -> Option<f64> {
        match self {
            Empty => None,
            Range { lo, .. } => Some(lo),
        }
    }

    pub fn hi(self) -> Option<f64> {
        match self {
            Empty => None,
            Range { hi, .. } => Some(hi),
        }
    }

    /// Outward-rounded abstraction of an exact decimal literal; degenerate
    /// when the value is exactly representable.
    pub fn make_const(lit: &str) -> Result<Interval, Error> {
        let d = literal::parse_decimal(lit).ok_or_else(|| Error::BadLiteral(lit.to_string()))?;
        let nearest: f64 = lit.parse().map_err(|_| Error::BadLiteral(lit.to_string()))?;
        if nearest == f64::INFINITY {
            return Ok(Interval::new(f64::MAX, f64::INFINITY));
        }
        if nearest == f64::NEG_INFINITY {
            return Ok(Interval::new(f64::NEG_INFINITY, f64::MIN));
        }
        Ok(match literal::cmp_decimal_f64(&d, nearest) {
            Ordering::Equal => Interval::singleton(nearest),
            // true value below the rounded one: round_down steps back
            Ordering::Less => Interval::new(nearest.next_down(), nearest),
            Ordering::Greater => Interval::new(nearest, nearest.next_up()),
        })
    }

    /// Set intersection, the lattice meet.
    pub fn meet(self, other: Interval) -> Interval {
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (Range { lo: a, hi: b }, Range { lo: c, hi: d }) => {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    Interval::new(lo, hi)
                } else {
                    Empty
                }
            }
        }
    }

    /// `self` included in `other` as sets; Empty is below everything.
    pub fn leq(self, other: Interval) -> bool {
        match (self, other) {
            (Empty, _) => true,
            (_, Empty) => false,
            (Range { lo: a, hi: b }, Range { lo: c, hi: d }) => c <= a && b <= d,
        }
    }

    /// True when every point of the interval is nonzero. An endpoint at zero
    /// counts as containing zero.
    pub fn excludes_zero(self) -> bool {
        match self {
            Empty => false,
            Range { lo, hi } => lo > 0.0 || hi < 0.0,
        }
    }

    /// True when the interval is nonempty and within `[0, +inf]`.
    pub fn is_nonnegative(self) -> bool {
        match self {
            Empty => false,
            Range { lo, .. } => lo >= 0.0,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Empty => false,
            Range { lo, hi } => lo <= x && x <= hi,
        }
    }

    /// `hi - lo`; zero for Empty, infinite when an endpoint is infinite.
    pub fn width(self) -> f64 {
        match self {
            Empty => 0.0,
            Range { lo, hi } => {
                if lo.is_infinite() || hi.is_infinite() {
                    f64::INFINITY
                } else {
                    hi - lo
                }
            }
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Empty => f.write_str("empty"),
            Range { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

/// Candidate endpoint value plus whether it is known exact.
#[derive(Clone, Copy)]
struct Cand {
    val: f64,
    exact: bool,
}

fn select_lo(cands: &[Cand]) -> f64 {
    let mut best = f64::INFINITY;
    for c in cands {
        best = best.min(c.val);
    }
    let exact = cands.iter().any(|c| c.val == best && c.exact);
    let best = norm_zero(best);
    if exact || best == f64::NEG_INFINITY {
        best
    } else {
        widen_down(best)
    }
}

fn select_hi(cands: &[Cand]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for c in cands {
        best = best.max(c.val);
    }
    let exact = cands.iter().any(|c| c.val == best && c.exact);
    let best = norm_zero(best);
    if exact || best == f64::INFINITY {
        best
    } else {
        widen_up(best)
    }
}

fn add_cand(a: f64, b: f64) -> Cand {
    if a.is_infinite() || b.is_infinite() {
        // -inf + +inf has no defined concrete witness; the caller decides the
        // safe direction via select_lo/select_hi over the remaining
        // candidates, so map it to an infinity of the matching sign set.
        let s = a + b;
        return Cand { val: if s.is_nan() { f64::NAN } else { s }, exact: true };
    }
    let (s, e) = two_sum(a, b);
    if s.is_infinite() {
        return Cand { val: s, exact: true };
    }
    Cand { val: s, exact: e == 0.0 }
}

fn mul_cand(a: f64, b: f64) -> Cand {
    if a == 0.0 || b == 0.0 {
        // interval endpoint convention: 0 * inf = 0
        return Cand { val: 0.0, exact: true };
    }
    if a.is_infinite() || b.is_infinite() {
        return Cand { val: a * b, exact: true };
    }
    let (p, e) = two_prod(a, b);
    if p.is_infinite() {
        return Cand { val: p, exact: true };
    }
    Cand { val: p, exact: e == 0.0 }
}

fn iv_add(a: (f64, f64), b: (f64, f64)) -> Interval {
    let lo = {
        let c = add_cand(a.0, b.0);
        let v = if c.val.is_nan() { f64::NEG_INFINITY } else { c.val };
        if c.exact || v == f64::NEG_INFINITY {
            v
        } else {
            widen_down(v)
        }
    };
    let hi = {
        let c = add_cand(a.1, b.1);
        let v = if c.val.is_nan() { f64::INFINITY } else { c.val };
        if c.exact || v == f64::INFINITY {
            v
        } else {
            widen_up(v)
        }
    };
    Interval::new(norm_zero(lo), norm_zero(hi))
}

fn iv_neg(a: (f64, f64)) -> Interval {
    Interval::new(norm_zero(-a.1), norm_zero(-a.0))
}

fn iv_sub(a: (f64, f64), b: (f64, f64)) -> Interval {
    iv_add(a, (-b.1, -b.0))
}

fn iv_mul(a: (f64, f64), b: (f64, f64)) -> Interval {
    let cands = [
        mul_cand(a.0, b.0),
        mul_cand(a.0, b.1),
        mul_cand(a.1, b.0),
        mul_cand(a.1, b.1),
    ];
    Interval::new(select_lo(&cands), select_hi(&cands))
}

/// Division candidate; divisor endpoints at zero arrive as signed zeros so
/// IEEE division produces the correct directed infinity. `None` skips the
/// candidate (indeterminate inf/inf pairs have no concrete witness).
fn div_cand(x: f64, y: f64) -> Option<Cand> {
    if x == 0.0 {
        return Some(Cand { val: 0.0, exact: true });
    }
    if y == 0.0 {
        return Some(Cand { val: x / y, exact: true });
    }
    let q = x / y;
    if q.is_nan() {
        return None; // inf / inf
    }
    if q.is_infinite() {
        return Some(Cand { val: q, exact: true });
    }
    // division always widens by design
    Some(Cand { val: q, exact: false })
}

fn iv_div(a: (f64, f64), b: (f64, f64)) -> Interval {
    let (blo, bhi) = b;
    if blo < 0.0 && bhi > 0.0 {
        return TOP; // divisor straddles zero
    }
    if blo == 0.0 && bhi == 0.0 {
        return TOP; // division by exactly zero: no useful enclosure
    }
    // encode one-sided zero endpoints as signed zeros for directed limits
    let blo = if blo == 0.0 { 0.0 } else { blo };
    let bhi = if bhi == 0.0 { -0.0 } else { bhi };
    let mut cands = Vec::with_capacity(4);
    for x in [a.0, a.1] {
        for y in [blo, bhi] {
            if let Some(c) = div_cand(x, y) {
                cands.push(c);
            }
        }
    }
    debug_assert!(!cands.is_empty());
    Interval::new(select_lo(&cands), select_hi(&cands))
}

/// Directed rounding of a double-double endpoint value down/up. The
/// double-double error is far below one f64 ulp, so stepping one unit in the
/// uncertain direction is sound and within one step of optimal.
fn round_dd(v: Dd, up: bool) -> f64 {
    let hi = v.hi();
    if hi.is_infinite() {
        return hi;
    }
    let err = hi.abs() * 1e-30 + 1e-320;
    let lo_part = v.sub(Dd::from(hi)).to_f64();
    if up {
        if lo_part <= -err {
            hi
        } else {
            widen_up(hi)
        }
    } else if lo_part >= err {
        hi
    } else {
        widen_down(hi)
    }
}

fn pow_endpoint(x: f64, n: i32, up: bool) -> f64 {
    if x.is_infinite() {
        // extended-real power of an infinite endpoint is exact
        let v = x.powi(n);
        return norm_zero(v);
    }
    if n == 2 {
        let (p, e) = two_prod(x, x);
        if p.is_infinite() {
            return p;
        }
        if e == 0.0 {
            return norm_zero(p);
        }
        return if up { widen_up(p) } else { widen_down(p) };
    }
    norm_zero(round_dd(Dd::from(x).powi(n), up))
}

fn iv_pow(a: (f64, f64), n: i32) -> Interval {
    let (lo, hi) = a;
    if n == 0 {
        // x^0 = 1 on every point where it is defined
        return Interval::singleton(1.0);
    }
    if n == 1 {
        return Interval::new(lo, hi);
    }
    if n < 0 && lo <= 0.0 && hi >= 0.0 {
        return TOP; // negative power over an interval containing zero
    }
    let even = n % 2 == 0;
    if n > 0 {
        if even {
            if lo <= 0.0 && hi >= 0.0 {
                let m = lo.abs().max(hi.abs());
                return Interval::new(0.0, pow_endpoint(m, n, true));
            }
            // single-signed: |x|^n is monotone in |x|
            let (small, large) = if lo > 0.0 { (lo, hi) } else { (hi, lo) };
            Interval::new(pow_endpoint(small, n, false), pow_endpoint(large, n, true))
        } else {
            Interval::new(pow_endpoint(lo, n, false), pow_endpoint(hi, n, true))
        }
    } else {
        // 0 is excluded here; x^n with n < 0
        let positive_base = lo > 0.0;
        if even || positive_base {
            // monotone decreasing for x > 0; for x < 0 with even n the values
            // are positive and increasing in x
            if positive_base || !even {
                Interval::new(pow_endpoint(hi, n, false), pow_endpoint(lo, n, true))
            } else {
                Interval::new(pow_endpoint(lo, n, false), pow_endpoint(hi, n, true))
            }
        } else {
            // negative base, odd negative exponent: decreasing
            Interval::new(pow_endpoint(hi, n, false), pow_endpoint(lo, n, true))
        }
    }
}

fn iv_sqrt(a: (f64, f64)) -> Interval {
    let (lo, hi) = a;
    if hi < 0.0 {
        return Empty;
    }
    let lo = lo.max(0.0);
    let lo_res = if lo == 0.0 { 0.0 } else { widen_down(lo.sqrt()).max(0.0) };
    let hi_res = if hi.is_infinite() { hi } else { widen_up(hi.sqrt()) };
    Interval::new(lo_res, hi_res)
}

fn iv_ln(a: (f64, f64)) -> Interval {
    let (lo, hi) = a;
    if hi <= 0.0 {
        return Empty;
    }
    let lo_res = if lo <= 0.0 { f64::NEG_INFINITY } else { widen_down(lo.ln()) };
    let hi_res = if hi.is_infinite() { hi } else { widen_up(hi.ln()) };
    Interval::new(lo_res, hi_res)
}

fn iv_exp(a: (f64, f64)) -> Interval {
    let (lo, hi) = a;
    let lo_res = if lo == f64::NEG_INFINITY { 0.0 } else { widen_down(lo.exp()).max(0.0) };
    let hi_res = if hi == f64::INFINITY { hi } else { widen_up(hi.exp()) };
    Interval::new(lo_res, hi_res)
}

/// The abstract transfer function for `op`. Any Empty argument yields Empty;
/// domain issues are encoded as Empty or infinite endpoints, never as errors.
/// Panics on an arity mismatch.
pub fn iv_apply(op: OpKind, args: &[Interval]) -> Interval {
    assert_eq!(args.len(), op.arity(), "arity mismatch applying {op}");
    let mut ends = [(0.0, 0.0); 2];
    for (i, a) in args.iter().enumerate() {
        match a {
            Empty => return Empty,
            Range { lo, hi } => ends[i] = (*lo, *hi),
        }
    }
    let a = ends[0];
    match op {
        OpKind::Add => iv_add(a, ends[1]),
        OpKind::Sub => iv_sub(a, ends[1]),
        OpKind::Mul => iv_mul(a, ends[1]),
        OpKind::Div => iv_div(a, ends[1]),
        OpKind::Neg => iv_neg(a),
        OpKind::Sqrt => iv_sqrt(a),
        OpKind::Ln => iv_ln(a),
        OpKind::Exp => iv_exp(a),
        OpKind::Pow(n) => iv_pow(a, n),
    }
}

mod serde_impl {
    use super::Interval;
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Endpoints {
        lo: String,
        hi: String,
    }

    impl Serialize for Interval {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self {
                Interval::Empty => s.serialize_none(),
                Interval::Range { lo, hi } => {
                    Endpoints { lo: lo.to_string(), hi: hi.to_string() }.serialize(s)
                }
            }
        }
    }

    impl<'de> Deserialize<'de> for Interval {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let opt = Option::<Endpoints>::deserialize(d)?;
            match opt {
                None => Ok(Interval::Empty),
                Some(e) => {
                    let lo: f64 = e.lo.parse().map_err(D::Error::custom)?;
                    let hi: f64 = e.hi.parse().map_err(D::Error::custom)?;
                    if lo.is_nan() || hi.is_nan() || lo > hi {
                        return Err(D::Error::custom("invalid interval endpoints"));
                    }
                    Ok(Interval::new(lo, hi))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn make_const_examples() {
        assert_eq!(Interval::make_const("1").unwrap(), iv(1.0, 1.0));
        assert_eq!(Interval::make_const("-0.5").unwrap(), iv(-0.5, -0.5));
        // 1/10 is not representable; binary64 rounds it up
        assert_eq!(Interval::make_const("0.1").unwrap(), iv(0.1_f64.next_down(), 0.1));
        assert!(Interval::make_const("abc").is_err());
        assert_eq!(Interval::make_const("1e400").unwrap(), iv(f64::MAX, f64::INFINITY));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(iv(0.0, 2.0).meet(iv(1.0, 3.0)), iv(1.0, 2.0));
        assert_eq!(iv(0.0, 1.0).meet(iv(2.0, 3.0)), Empty);
        assert_eq!(Empty.meet(iv(0.0, 1.0)), Empty);
        // the three-expression example: [-3, 1/3] ∩ [-2, 0] ∩ [-1, 1] = [-1, 0]
        let m = iv(-3.0, 1.0 / 3.0).meet(iv(-2.0, 0.0)).meet(iv(-1.0, 1.0));
        assert_eq!(m, iv(-1.0, 0.0));
    }

    #[test]
    fn leq_examples() {
        assert!(iv(1.0, 2.0).leq(iv(0.0, 3.0)));
        assert!(!iv(0.0, 3.0).leq(iv(1.0, 2.0)));
        assert!(Empty.leq(iv(5.0, 5.0)));
        assert!(iv(1.0, 1.0).leq(TOP));
    }

    #[test]
    fn excludes_zero_examples() {
        assert!(iv(1.0, 3.0).excludes_zero());
        assert!(!iv(-1.0, 1.0).excludes_zero());
        assert!(!iv(0.0, 2.0).excludes_zero()); // endpoint zero counts
        assert!(!Empty.excludes_zero());
        assert!(iv(-3.0, -0.5).excludes_zero());
    }

    #[test]
    fn width_examples() {
        assert_eq!(iv(-1.0, 1.0).width(), 2.0);
        assert_eq!(iv(0.0, 0.0).width(), 0.0);
        assert_eq!(iv(0.0, f64::INFINITY).width(), f64::INFINITY);
        assert_eq!(Empty.width(), 0.0);
    }

    #[test]
    fn sub_is_the_dependency_problem() {
        // [0,1] - [0,1] = [0-1, 1-0] = [-1, 1], exact integer endpoints
        assert_eq!(iv_apply(OpKind::Sub, &[iv(0.0, 1.0), iv(0.0, 1.0)]), iv(-1.0, 1.0));
    }

    #[test]
    fn add_exactness() {
        assert_eq!(iv_apply(OpKind::Add, &[iv(1.0, 2.0), iv(3.0, 4.0)]), iv(4.0, 6.0));
        // inexact endpoints widen outward
        let r = iv_apply(OpKind::Add, &[iv(0.1, 0.1), iv(0.2, 0.2)]);
        let s: f64 = 0.1 + 0.2;
        assert_eq!(r, iv(s.next_down(), s.next_up()));
    }

    #[test]
    fn mul_cases() {
        assert_eq!(iv_apply(OpKind::Mul, &[iv(2.0, 3.0), iv(4.0, 5.0)]), iv(8.0, 15.0));
        assert_eq!(iv_apply(OpKind::Mul, &[iv(-2.0, 3.0), iv(-5.0, 4.0)]), iv(-15.0, 12.0));
        // 0 * inf endpointing
        assert_eq!(
            iv_apply(OpKind::Mul, &[iv(0.0, 1.0), iv(2.0, f64::INFINITY)]),
            iv(0.0, f64::INFINITY)
        );
    }

    #[test]
    fn div_cases() {
        // divisor straddling zero
        assert_eq!(iv_apply(OpKind::Div, &[iv(1.0, 2.0), iv(-1.0, 1.0)]), TOP);
        assert_eq!(iv_apply(OpKind::Div, &[iv(1.0, 2.0), iv(0.0, 0.0)]), TOP);
        // divisor touching zero from one side
        let r = iv_apply(OpKind::Div, &[iv(1.0, 2.0), iv(0.0, 4.0)]);
        assert_eq!(r.hi(), Some(f64::INFINITY));
        assert!(r.lo().unwrap() <= 0.25 && r.lo().unwrap() >= 0.25_f64.next_down());
        let r = iv_apply(OpKind::Div, &[iv(1.0, 2.0), iv(-4.0, 0.0)]);
        assert_eq!(r.lo(), Some(f64::NEG_INFINITY));
        // plain division widens one step
        let r = iv_apply(OpKind::Div, &[iv(1.0, 1.0), iv(3.0, 3.0)]);
        let q: f64 = 1.0 / 3.0;
        assert_eq!(r, iv(q.next_down(), q.next_up()));
        // a zero numerator endpoint divides exactly
        let r = iv_apply(OpKind::Div, &[iv(0.0, 1.0), iv(1.0, 2.0)]);
        assert_eq!(r.lo(), Some(0.0));
    }

    #[test]
    fn pow_cases() {
        assert_eq!(iv_apply(OpKind::Pow(2), &[iv(-1.0, 2.0)]), iv(0.0, 4.0));
        assert_eq!(iv_apply(OpKind::Pow(2), &[iv(-3.0, -2.0)]), iv(4.0, 9.0));
        assert_eq!(iv_apply(OpKind::Pow(0), &[iv(2.0, 3.0)]), iv(1.0, 1.0));
        assert_eq!(iv_apply(OpKind::Pow(1), &[iv(2.0, 3.0)]), iv(2.0, 3.0));
        assert_eq!(iv_apply(OpKind::Pow(-1), &[iv(-1.0, 1.0)]), TOP);

        let r = iv_apply(OpKind::Pow(3), &[iv(-2.0, 3.0)]);
        assert!(r.contains(-8.0) && r.contains(27.0));
        assert!(r.lo().unwrap() >= -8.0 - 1e-13 && r.hi().unwrap() <= 27.0 + 1e-13);

        let r = iv_apply(OpKind::Pow(-2), &[iv(2.0, 4.0)]);
        assert!(r.contains(1.0 / 16.0) && r.contains(0.25));
        assert!(!r.contains(0.3));

        // infinite endpoints
        assert_eq!(iv_apply(OpKind::Pow(2), &[iv(0.0, f64::INFINITY)]), iv(0.0, f64::INFINITY));
        let r = iv_apply(OpKind::Pow(-2), &[iv(1.0, f64::INFINITY)]);
        assert_eq!(r.lo(), Some(0.0));
    }

    #[test]
    fn sqrt_cases() {
        assert_eq!(iv_apply(OpKind::Sqrt, &[iv(-3.0, -1.0)]), Empty);
        let r = iv_apply(OpKind::Sqrt, &[iv(-1.0, 4.0)]);
        assert_eq!(r.lo(), Some(0.0));
        assert!(r.hi().unwrap() >= 2.0 && r.hi().unwrap() <= 2.0 + 1e-15);
        let r = iv_apply(OpKind::Sqrt, &[iv(4.0, 9.0)]);
        assert!(r.contains(2.0) && r.contains(3.0));
        assert!(r.lo().unwrap() >= 0.0);
    }

    #[test]
    fn ln_exp_cases() {
        assert_eq!(iv_apply(OpKind::Ln, &[iv(-2.0, 0.0)]), Empty);
        let r = iv_apply(OpKind::Ln, &[iv(0.0, 1.0)]);
        assert_eq!(r.lo(), Some(f64::NEG_INFINITY));
        assert!(r.hi().unwrap() >= 0.0);

        let r = iv_apply(OpKind::Exp, &[iv(f64::NEG_INFINITY, 0.0)]);
        assert_eq!(r.lo(), Some(0.0));
        assert!(r.hi().unwrap() >= 1.0);
        assert_eq!(
            iv_apply(OpKind::Exp, &[iv(0.0, f64::INFINITY)]).hi(),
            Some(f64::INFINITY)
        );
    }

    #[test]
    fn neg_is_exact() {
        assert_eq!(iv_apply(OpKind::Neg, &[iv(0.1, 0.2)]), iv(-0.2, -0.1));
        assert_eq!(iv_apply(OpKind::Neg, &[iv(f64::NEG_INFINITY, 1.0)]), iv(-1.0, f64::INFINITY));
    }

    #[test]
    fn empty_propagates() {
        assert_eq!(iv_apply(OpKind::Add, &[Empty, iv(0.0, 1.0)]), Empty);
        assert_eq!(iv_apply(OpKind::Neg, &[Empty]), Empty);
    }

    #[test]
    #[should_panic(expected = "arity mismatch")]
    fn arity_mismatch_panics() {
        iv_apply(OpKind::Add, &[iv(0.0, 1.0)]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for i in [
            iv(0.1_f64.next_down(), 0.1),
            iv(f64::NEG_INFINITY, 3.5e-300),
            Interval::Empty,
            TOP,
        ] {
            let text = serde_json::to_string(&i).unwrap();
            let back: Interval = serde_json::from_str(&text).unwrap();
            assert_eq!(back, i, "{text}");
        }
        assert_eq!(serde_json::to_string(&Interval::Empty).unwrap(), "null");
    }
}
