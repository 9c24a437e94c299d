//! Exact decimal literals. Constants keep their source text until they are
//! abstracted, so the conversion to binary64 can round outward from the true
//! rational value instead of from a pre-rounded double.

use num_bigint::BigUint;
use std::cmp::Ordering;

/// A validated decimal literal: `(-1)^neg * digits * 10^exp10`, where
/// `digits` is the concatenated integer/fraction digit string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub neg: bool,
    pub digits: Vec<u8>,
    pub exp10: i64,
}

impl Decimal {
    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }
}

/// Validates and decomposes a decimal literal such as `1`, `-2.5`, `0.1` or
/// `3e-2`. Returns `None` when the text is not a finite decimal.
pub fn parse_decimal(text: &str) -> Option<Decimal> {
    let mut chars = text.chars().peekable();
    let neg = match chars.peek() {
        Some('-') => {
            chars.next();
            true
        }
        Some('+') => {
            chars.next();
            false
        }
        _ => false,
    };

    let mut digits: Vec<u8> = Vec::new();
    let mut frac_len: i64 = 0;
    let mut seen_digit = false;
    let mut seen_dot = false;
    while let Some(&c) = chars.peek() {
        match c {
            '0'..='9' => {
                digits.push(c as u8 - b'0');
                if seen_dot {
                    frac_len += 1;
                }
                seen_digit = true;
                chars.next();
            }
            '.' if !seen_dot => {
                seen_dot = true;
                chars.next();
            }
            _ => break,
        }
    }
    if !seen_digit {
        return None;
    }

    let mut exp: i64 = 0;
    match chars.peek() {
        None => {}
        Some('e') | Some('E') => {
            chars.next();
            let exp_neg = match chars.peek() {
                Some('-') => {
                    chars.next();
                    true
                }
                Some('+') => {
                    chars.next();
                    false
                }
                _ => false,
            };
            let mut any = false;
            while let Some(&c) = chars.peek() {
                match c.to_digit(10) {
                    Some(d) => {
                        exp = exp.saturating_mul(10).saturating_add(d as i64);
                        any = true;
                        chars.next();
                    }
                    None => return None,
                }
            }
            if !any {
                return None;
            }
            if exp_neg {
                exp = -exp;
            }
        }
        Some(_) => return None,
    }

    Some(Decimal { neg, digits, exp10: exp - frac_len })
}

/// Decomposes a positive finite f64 into `(mantissa, exponent)` with
/// `x = mantissa * 2^exponent` exactly.
fn decompose(x: f64) -> (u64, i64) {
    debug_assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let mant = bits & ((1u64 << 52) - 1);
    let biased = (bits >> 52) & 0x7ff;
    if biased == 0 {
        (mant, -1074)
    } else {
        (mant | (1u64 << 52), biased as i64 - 1075)
    }
}

/// Exactly compares a decimal literal against a finite binary64.
pub fn cmp_decimal_f64(d: &Decimal, v: f64) -> Ordering {
    debug_assert!(v.is_finite());
    if d.is_zero() {
        return 0.0_f64.partial_cmp(&v).unwrap();
    }
    let lneg = d.neg;
    if v == 0.0 {
        return if lneg { Ordering::Less } else { Ordering::Greater };
    }
    let vneg = v < 0.0;
    if lneg != vneg {
        return if lneg { Ordering::Less } else { Ordering::Greater };
    }

    let mag = cmp_magnitudes(d, v.abs());
    if lneg {
        mag.reverse()
    } else {
        mag
    }
}

fn cmp_magnitudes(d: &Decimal, v: f64) -> Ordering {
    // Strip leading zeros for the size estimate.
    let lead = d.digits.iter().position(|&x| x != 0).unwrap_or(0);
    let sig_len = (d.digits.len() - lead) as i64;
    // 10^(sig_len - 1 + exp10) <= |d| < 10^(sig_len + exp10)
    let hi_bound = sig_len + d.exp10;
    let lo_bound = sig_len - 1 + d.exp10;
    if hi_bound < -350 {
        return Ordering::Less; // below any positive binary64
    }
    if lo_bound > 320 {
        return Ordering::Greater; // above the binary64 range
    }

    let mut lhs = BigUint::from(0u32);
    for &dig in &d.digits[lead..] {
        lhs = lhs * 10u32 + dig;
    }
    let (m, e2) = decompose(v);
    let mut rhs = BigUint::from(m);
    if d.exp10 > 0 {
        lhs *= BigUint::from(10u32).pow(d.exp10 as u32);
    } else if d.exp10 < 0 {
        rhs *= BigUint::from(10u32).pow((-d.exp10) as u32);
    }
    if e2 > 0 {
        rhs <<= e2 as u32;
    } else if e2 < 0 {
        lhs <<= (-e2) as u32;
    }
    lhs.cmp(&rhs)
}
