//! Text forms for exact numbers. Big integers print in decimal and rationals
//! as `p/q` (or `p` when the denominator is 1), so CSV and JSON output stays
//! lossless.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serializer;

pub fn rat_str(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or a decimal such as `0.25` into an exact rational.
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p.trim().parse().ok()?, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" { BigInt::from(0) } else { int.parse().ok()? };
        if !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let f: BigInt = if frac.is_empty() { BigInt::from(0) } else { frac.parse().ok()? };
        let f = if neg { -f } else { f };
        return Some(BigRational::new(int * &scale + f, scale));
    }
    Some(BigRational::from_integer(s.parse().ok()?))
}

pub fn ser_rat<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_str(q))
}

pub fn ser_biguint<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

pub fn ser_opt_biguint<S: Serializer>(n: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.collect_str(n),
        None => s.serialize_none(),
    }
}
