//! Double-double arithmetic: an unevaluated sum of two binary64 values with a
//! roughly 106-bit significand. This backs the concrete evaluator
//! ([`crate::expr::concrete_eval`]) so that sampling-based containment checks
//! are not disturbed by the evaluator's own rounding.
//!
//! The error-free transformations ([`two_sum`], [`two_prod`]) are also used by
//! the interval endpoint arithmetic to detect exact operations.

use std::cmp::Ordering;

/// Error-free addition: `a + b = s + e` exactly, with `s = fl(a + b)`.
/// Finite inputs only.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let e = (a - (s - bv)) + (b - bv);
    (s, e)
}

/// `two_sum` specialisation requiring `|a| >= |b|` (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free multiplication via FMA: `a * b = p + e` exactly. Finite inputs
/// whose product does not overflow.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A double-double value `hi + lo` with `hi = fl(hi + lo)`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

/// ln 2 to double-double precision.
const LN2: Dd = Dd { hi: 6.931471805599453e-1, lo: 2.3190468138462996e-17 };

impl Dd {
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Rounds to the nearest binary64.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn abs(self) -> Dd {
        if self.is_sign_negative() {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn add(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Dd { hi: self.hi + other.hi, lo: 0.0 };
        }
        let (s1, s2) = two_sum(self.hi, other.hi);
        if !s1.is_finite() {
            return Dd { hi: s1, lo: 0.0 };
        }
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() {
            return Dd { hi: self.hi * other.hi, lo: 0.0 };
        }
        let (p1, p2) = two_prod(self.hi, other.hi);
        if !p1.is_finite() {
            return Dd { hi: p1, lo: 0.0 };
        }
        let p2 = p2 + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, c: f64) -> Dd {
        if !self.hi.is_finite() || !c.is_finite() {
            return Dd { hi: self.hi * c, lo: 0.0 };
        }
        let (p1, p2) = two_prod(self.hi, c);
        if !p1.is_finite() {
            return Dd { hi: p1, lo: 0.0 };
        }
        let p2 = p2 + self.lo * c;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        if !self.hi.is_finite() || !other.hi.is_finite() || other.hi == 0.0 {
            return Dd { hi: self.hi / other.hi, lo: 0.0 };
        }
        let q1 = self.hi / other.hi;
        if !q1.is_finite() {
            return Dd { hi: q1, lo: 0.0 };
        }
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    pub fn div_f64(self, c: f64) -> Dd {
        self.div(Dd::from(c))
    }

    pub fn recip(self) -> Dd {
        ONE.div(self)
    }

    /// Integer power by binary exponentiation. `powi(0)` is 1 even for zero;
    /// callers enforce the `pow(0, negative)` domain restriction.
    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return ONE;
        }
        if self.hi == 0.0 {
            return if n > 0 {
                ZERO
            } else {
                Dd { hi: f64::INFINITY, lo: 0.0 }
            };
        }
        if !self.hi.is_finite() {
            return Dd { hi: self.hi.powi(n), lo: 0.0 };
        }
        let mut result = ONE;
        let mut base = self;
        let mut e = (n as i64).unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        if n < 0 {
            result.recip()
        } else {
            result
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return ZERO;
        }
        if self.hi < 0.0 {
            return Dd { hi: f64::NAN, lo: 0.0 };
        }
        if !self.hi.is_finite() {
            return self;
        }
        // One Newton step on y^2 = x from the correctly rounded f64 root.
        let y = self.hi.sqrt();
        let yd = Dd::from(y);
        let diff = self.sub(yd.mul(yd));
        let corr = diff.hi / (2.0 * y);
        let (hi, lo) = quick_two_sum(y, corr);
        Dd { hi, lo }
    }

    /// Multiplies by 2^k exactly (up to over/underflow).
    fn ldexp(self, k: i32) -> Dd {
        let f = libm_exp2(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn exp(self) -> Dd {
        if self.hi.is_nan() {
            return Dd { hi: f64::NAN, lo: 0.0 };
        }
        if self.hi > 710.0 {
            return Dd { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -746.0 {
            return ZERO;
        }
        // exp(x) = 2^k * exp(r), r = x - k ln2, then squared argument
        // reduction: exp(r) = exp(r / 2^9)^(2^9).
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self.sub(LN2.mul_f64(k)).ldexp(-9);
        // Taylor series for exp(r) - 1; |r| <= ln2 / 2^10 so this converges
        // far past double-double precision within a few terms.
        let mut term = r;
        let mut sum = r;
        for n in 2..=12 {
            term = term.mul(r).div_f64(n as f64);
            sum = sum.add(term);
        }
        // Undo the scaling: if s = exp(t) - 1 then exp(2t) - 1 = s^2 + 2s.
        let mut s = sum;
        for _ in 0..9 {
            s = s.mul(s).add(s.mul_f64(2.0));
        }
        s.add(ONE).ldexp(k as i32)
    }

    /// Natural log. Callers enforce positivity; nonpositive inputs give NaN.
    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd { hi: f64::NAN, lo: 0.0 };
        }
        if !self.hi.is_finite() {
            return self;
        }
        // Newton iteration y <- y + x exp(-y) - 1 from the f64 estimate;
        // each step roughly doubles the correct digits.
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            let e = y.neg().exp();
            y = y.add(self.mul(e).sub(ONE));
        }
        y
    }

    /// Evaluates a decimal literal (as accepted by [`crate::literal`]) to
    /// double-double precision.
    pub fn from_decimal(lit: &crate::literal::Decimal) -> Dd {
        let mut v = ZERO;
        for &d in &lit.digits {
            v = v.mul_f64(10.0).add(Dd::from(d as f64));
        }
        let scale = Dd::from(10.0).powi_clamped(lit.exp10);
        v = v.mul(scale);
        if lit.neg {
            v.neg()
        } else {
            v
        }
    }

    fn powi_clamped(self, n: i64) -> Dd {
        let n = n.clamp(-400, 400) as i32;
        self.powi(n)
    }
}

/// 2^k as f64, saturating to 0 / infinity outside the representable range.
fn libm_exp2(k: i32) -> f64 {
    if k >= 1024 {
        f64::INFINITY
    } else if k < -1074 {
        0.0
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        // subnormal range
        f64::from_bits(1u64 << (k + 1074))
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl std::fmt::Display for Dd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_decimal;

    fn dd_close(a: Dd, b: Dd, rel: f64) -> bool {
        let diff = a.sub(b).abs();
        let scale = b.abs().hi().max(1e-300);
        diff.hi() <= rel * scale
    }

    fn from_digits(s: &str) -> Dd {
        Dd::from_decimal(&parse_decimal(s).unwrap())
    }

    #[test]
    fn two_sum_is_error_free() {
        let (s, e) = two_sum(0.1, 0.2);
        assert_eq!(s, 0.1 + 0.2);
        assert_ne!(e, 0.0); // 0.1 + 0.2 is inexact in binary64
        let (s, e) = two_sum(1.0, 2.0);
        assert_eq!((s, e), (3.0, 0.0));
    }

    #[test]
    fn two_prod_detects_exactness() {
        assert_eq!(two_prod(3.0, 4.0).1, 0.0);
        assert_ne!(two_prod(0.1, 0.1).1, 0.0);
    }

    #[test]
    fn basic_arithmetic() {
        let a = from_digits("0.1");
        let b = from_digits("0.2");
        let c = a.add(b);
        assert!(dd_close(c, from_digits("0.3"), 1e-30));
        let p = a.mul(b);
        assert!(dd_close(p, from_digits("0.02"), 1e-30));
        let q = ONE.div(Dd::from(3.0));
        assert!(dd_close(q.mul_f64(3.0), ONE, 1e-30));
    }

    #[test]
    fn sqrt_of_two() {
        let r = Dd::from(2.0).sqrt();
        let reference = from_digits("1.41421356237309504880168872420970");
        assert!(dd_close(r, reference, 1e-30));
    }

    #[test]
    fn exp_and_ln() {
        let e = ONE.exp();
        let reference = from_digits("2.71828182845904523536028747135266");
        assert!(dd_close(e, reference, 1e-29));

        let l = Dd::from(2.0).ln();
        let reference = from_digits("0.693147180559945309417232121458177");
        assert!(dd_close(l, reference, 1e-29));

        // round trip
        let x = from_digits("5.0");
        assert!(dd_close(x.exp().ln(), x, 1e-28));
    }

    #[test]
    fn powi_small_cases() {
        assert_eq!(Dd::from(2.0).powi(10).to_f64(), 1024.0);
        assert!(dd_close(Dd::from(2.0).powi(-2), from_digits("0.25"), 1e-30));
        assert_eq!(ZERO.powi(3), ZERO);
        assert_eq!(Dd::from(7.0).powi(0), ONE);
    }

    #[test]
    fn infinities_flow_through() {
        let inf = Dd::from(f64::INFINITY);
        assert_eq!(inf.add(ONE).to_f64(), f64::INFINITY);
        assert!(inf.sub(inf).to_f64().is_nan());
        assert_eq!(ONE.div(Dd::from(0.0)).to_f64(), f64::INFINITY);
    }

    #[test]
    fn decimal_parsing_matches_f64() {
        for s in ["1", "-2.5", "0.1", "3e-2", "12345.6789e3"] {
            let d = from_digits(s);
            let f: f64 = s.parse().unwrap();
            assert!((d.to_f64() - f).abs() <= f.abs() * 1e-15, "{s}");
        }
    }
}
