//! Exact-rational helpers: string encoding and overflow-free logarithms.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Encodes a rational as `"p/q"` with a positive denominator, always
/// including the denominator.
pub fn to_ratio_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// `log2` of a big unsigned integer, computed from its top 64 bits so that
/// values far beyond `f64::MAX` are handled.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let v = top.iter_u64_digits().next().unwrap_or(0);
    (v as f64).log2() + shift as f64
}

/// `log2` of a positive rational. Returns NaN for non-positive input.
pub fn log2_ratio(q: &BigRational) -> f64 {
    if !q.is_positive() {
        return f64::NAN;
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    log2_biguint(num) - log2_biguint(den)
}

/// `x^(1/m)` as a float for a big integer, via the logarithm.
pub fn root_biguint(x: &BigUint, m: u32) -> f64 {
    if m == 0 {
        return f64::NAN;
    }
    if x.is_zero() {
        return 0.0;
    }
    (log2_biguint(x) / m as f64).exp2()
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn uint(v: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, v.clone()))
}
