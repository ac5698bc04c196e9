//! Exact rational scalars and their textual forms.
//!
//! Every numeric quantity in the crate is a [`Rational`]: arbitrary-precision
//! numerator, positive denominator, always in lowest terms. Values render as
//! `p/q` (`p` alone when the denominator is 1) and parse back from the same
//! form. Decimal output exists only for presentation and never feeds back
//! into arithmetic.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("invalid rational '{0}'")]
    Malformed(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
}

/// Parses `p/q` or a bare integer `p`. Leading/trailing whitespace is
/// tolerated; the result is reduced and the sign lives on the numerator.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        None => (t, "1"),
        Some((p, q)) => (p.trim(), q.trim()),
    };
    let p = BigInt::from_str(num).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
    let q = BigInt::from_str(den).map_err(|_| RationalParseError::Malformed(s.to_string()))?;
    if q.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(p, q))
}

/// Canonical `p/q` form (or `p` for integers); inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Decimal rendering with `sig` significant digits, round-half-up, trailing
/// fractional zeros trimmed. Presentation only; exactness lives in `p/q`.
pub fn to_decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig > 0, "need at least one significant digit");
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let p = r.numer().abs();
    let q = r.denom().clone();

    // e = number of digits left of the decimal point (may be <= 0), i.e.
    // the unique exponent with 10^(e-1) <= |r| < 10^e.
    let ten = BigInt::from(10);
    let mut e: i64 = 0;
    if p >= q {
        let mut bound = q.clone();
        while p >= bound {
            bound *= &ten;
            e += 1;
        }
    } else {
        let mut scaled = p.clone();
        while scaled < q {
            scaled *= &ten;
            e -= 1;
        }
        e += 1;
    }
    // |r| is in [10^(e-1), 10^e). Round p * 10^(sig - e) / q half-up.
    let shift = sig as i64 - e;
    let (num, den) = if shift >= 0 {
        (p * ten.pow(shift as u32), q)
    } else {
        (p, q * ten.pow((-shift) as u32))
    };
    let mut digits = (BigInt::from(2) * num + &den) / (BigInt::from(2) * den);
    if digits >= ten.pow(sig as u32) {
        // Rounding carried into a new leading digit (e.g. 0.999... -> 1.0).
        digits /= &ten;
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= sig as i64 {
        out.push_str(&ds);
        for _ in 0..(e - sig as i64) {
            out.push('0');
        }
    } else if e >= 1 {
        let (int_part, frac_part) = ds.split_at(e as usize);
        out.push_str(int_part);
        let frac = frac_part.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-e) {
            out.push('0');
        }
        out.push_str(ds.trim_end_matches('0'));
    }
    out
}

/// Convenience for tests and benches: exact f64 only when representable.
pub fn to_f64_lossy(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
