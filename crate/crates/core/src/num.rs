//! Rational number helpers.

use alloc::string::{String, ToString};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for all probabilities and coefficients.
pub type Rat = num_rational::BigRational;

/// Builds `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `a`, `-a`, `a/b` or a finite decimal such as `0.25`.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((n, d)) = body.split_once('/') {
        let n = parse_uint(n)?;
        let d = parse_uint(d)?;
        if d.is_zero() {
            return None;
        }
        Rat::new(BigInt::from(n), BigInt::from(d))
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return None;
        }
        let w = if whole.is_empty() { BigUint::zero() } else { parse_uint(whole)? };
        let f = if frac.is_empty() { BigUint::zero() } else { parse_uint(frac)? };
        let scale = num_traits::pow(BigUint::from(10u32), frac.len());
        Rat::new(BigInt::from(w * &scale + f), BigInt::from(scale))
    } else {
        Rat::from_integer(BigInt::from(parse_uint(body)?))
    };
    Some(if neg { -value } else { value })
}

fn parse_uint(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Renders `q` as `a` or `a/b`.
pub fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest `f64`, used only by the numeric search.
pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// computed from the continued fraction expansion.
pub fn approximate(x: f64, max_den: u64) -> Rat {
    if !x.is_finite() {
        return Rat::zero();
    }
    let neg = x < 0.0;
    let mut y = if neg { -x } else { x };
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = floor(y);
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as u128 {
            // Semiconvergent check: pick the closer of the last convergent
            // and the largest admissible semiconvergent.
            let k = (max_den as u128 - q0) / q1.max(1);
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let conv = p1 as f64 / q1 as f64;
            let semi = ps as f64 / qs.max(1) as f64;
            let target = if neg { -x } else { x };
            if qs > 0 && (semi - target).abs() < (conv - target).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = y - a as f64;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if q1 == 0 {
        return Rat::zero();
    }
    let r = Rat::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

fn floor(x: f64) -> f64 {
    let t = x as i128 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

/// True when the denominator of `q` is a power of two.
pub fn is_dyadic(q: &Rat) -> bool {
    let d = q.denom();
    let one = BigInt::one();
    (d & (d - &one)).is_zero()
}

/// Base-2 logarithm of the denominator of a dyadic rational.
pub fn dyadic_exponent(q: &Rat) -> Option<u64> {
    if !is_dyadic(q) {
        return None;
    }
    Some(q.denom().bits() - 1)
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
