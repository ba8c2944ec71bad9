//! Helpers for exact rationals: `"num/den"` text form and serde glue.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serializer;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `"num/den"`, or just `"num"` for integers.
pub fn to_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn parse(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_text(r))
}

pub fn serialize_opt<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&to_text(r)),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec<S: Serializer>(rs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(to_text))
}

pub fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn serialize_bigint_vec<S: Serializer>(ns: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ns.iter().map(BigInt::to_string))
}

pub fn serialize_bigint_opt<S: Serializer>(n: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match n {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for r in [rat(39, 128), rat(-3, 4), rat(5, 1), rat(0, 7)] {
            assert_eq!(parse(&to_text(&r)), Some(r));
        }
        assert_eq!(to_text(&rat(6, 4)), "3/2");
        assert_eq!(to_text(&rat(4, 2)), "2");
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }
}
