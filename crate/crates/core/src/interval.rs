//! Closed real intervals with big-float endpoints and outward rounding.
//!
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so the true real result always lies inside. Transcendental functions are
//! additionally widened by a relative `2^-(prec-8)` so that a last-bit error
//! in the underlying library cannot break containment.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

const DOWN: RoundingMode = RoundingMode::Down;
const UP: RoundingMode = RoundingMode::Up;

#[derive(Debug, Clone)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
    prec: usize,
}

fn bigint_to_float(n: &BigInt, shift: i64) -> BigFloat {
    // n · 2^-shift, exactly
    if n.is_zero() {
        return BigFloat::from_word(0, 64);
    }
    let digits: Vec<Word> = n.magnitude().to_u64_digits();
    let sign = if n.sign() == BigSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let e = (digits.len() as i64) * 64 - shift;
    BigFloat::from_words(&digits, sign, e as i32)
}

fn bits(n: &BigInt) -> i64 {
    n.bits() as i64
}

impl Interval {
    pub fn point(x: BigFloat, prec: usize) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
            prec,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n), DEFAULT_PRECISION)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        Self::point(bigint_to_float(n, 0), prec)
    }

    /// Tightest dyadic enclosure of `r` with about `prec` significant bits.
    pub fn from_rational(r: &BigRational, prec: usize) -> Self {
        let (n, d) = (r.numer(), r.denom());
        if n.is_zero() {
            return Self::from_bigint(n, prec);
        }
        // choose k so that n·2^k/d carries prec + 2 bits
        let k = prec as i64 + 2 + bits(d) - bits(n);
        let (num, den) = if k >= 0 {
            (n << k as usize, d.clone())
        } else {
            (n.clone(), d << (-k) as usize)
        };
        let (q, rem) = num.div_mod_floor(&den);
        let lo = bigint_to_float(&q, k);
        let hi = if rem.is_zero() {
            lo.clone()
        } else {
            bigint_to_float(&(q + 1), k)
        };
        Self { lo, hi, prec }
    }

    pub fn from_f64_exact(x: f64, prec: usize) -> Self {
        Self::point(BigFloat::from_f64(x, 64), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn with_precision(mut self, prec: usize) -> Self {
        self.prec = prec;
        self
    }

    fn p(&self, other: &Self) -> usize {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p(other);
        Self {
            lo: self.lo.add(&other.lo, p, DOWN),
            hi: self.hi.add(&other.hi, p, UP),
            prec: p,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.p(other);
        Self {
            lo: self.lo.sub(&other.hi, p, DOWN),
            hi: self.hi.sub(&other.lo, p, UP),
            prec: p,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.mul(b, p, DOWN))
            .reduce(fmin)
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.mul(b, p, UP))
            .reduce(fmax)
            .unwrap();
        Self { lo, hi, prec: p }
    }

    /// Panics if `other` contains zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let p = self.p(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, DOWN))
            .reduce(fmin)
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, UP))
            .reduce(fmax)
            .unwrap();
        Self { lo, hi, prec: p }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.mul(&Self::from_int(k).with_precision(self.prec))
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(1).with_precision(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Natural logarithm. Panics unless the interval is strictly positive.
    pub fn ln(&self) -> Self {
        assert!(
            self.lo.is_positive(),
            "logarithm of a non-positive interval"
        );
        let p = self.prec;
        let (lo, hi) = with_consts(|cc| (self.lo.ln(p, DOWN, cc), self.hi.ln(p, UP, cc)));
        Self { lo, hi, prec: p }.widen()
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        let (lo, hi) = with_consts(|cc| (self.lo.exp(p, DOWN, cc), self.hi.exp(p, UP, cc)));
        Self { lo, hi, prec: p }.widen()
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self) -> Self {
        assert!(!self.hi.is_negative(), "square root of a negative interval");
        let p = self.prec;
        let lo = if self.lo.is_positive() {
            self.lo.sqrt(p, DOWN)
        } else {
            BigFloat::from_word(0, 64)
        };
        Self {
            lo,
            hi: self.hi.sqrt(p, UP),
            prec: p,
        }
        .widen()
    }

    /// Fourth root, as two square roots.
    pub fn root4(&self) -> Self {
        self.sqrt().sqrt()
    }

    fn widen(self) -> Self {
        let p = self.prec;
        let rel = BigFloat::from_word(1, 64);
        let mut rel = rel;
        rel.set_exponent(-(p as i32 - 8));
        let tiny = {
            let mut t = BigFloat::from_word(1, 64);
            t.set_exponent(-(4 * p as i32));
            t
        };
        let slack = |x: &BigFloat| x.abs().mul(&rel, p, UP).add(&tiny, p, UP);
        Self {
            lo: self.lo.sub(&slack(&self.lo), p, DOWN),
            hi: self.hi.add(&slack(&self.hi), p, UP),
            prec: p,
        }
    }

    /// Hull of two intervals.
    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: fmin(self.lo.clone(), other.lo.clone()),
            hi: fmax(self.hi.clone(), other.hi.clone()),
            prec: self.p(other),
        }
    }

    /// Enclosure of `max(x, y)` over both intervals.
    pub fn max(&self, other: &Self) -> Self {
        Self {
            lo: fmax(self.lo.clone(), other.lo.clone()),
            hi: fmax(self.hi.clone(), other.hi.clone()),
            prec: self.p(other),
        }
    }

    /// `⌊lo⌋`, a floor that is never too large.
    pub fn floor_lower(&self) -> BigInt {
        float_floor(&self.lo)
    }

    /// Every point of `self` is `<` every point of `other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        fcmp(&self.hi, &other.lo) == Ordering::Less
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        fcmp(&self.hi, &other.lo) != Ordering::Greater
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `⌊x⌋` when the floor is the same at both endpoints.
    pub fn floor_exact(&self) -> Option<BigInt> {
        let a = float_floor(&self.lo);
        let b = float_floor(&self.hi);
        (a == b).then_some(a)
    }

    /// `⌈x⌉` when the ceiling is the same at both endpoints.
    pub fn ceil_exact(&self) -> Option<BigInt> {
        let a = -float_floor(&self.lo.neg());
        let b = -float_floor(&self.hi.neg());
        (a == b).then_some(a)
    }

    pub fn mid_f64(&self) -> f64 {
        let m = self.lo.add(&self.hi, self.prec, RoundingMode::ToEven);
        let mut half = m;
        if let Some(e) = half.exponent() {
            half.set_exponent(e - 1);
        }
        float_to_f64(&half)
    }

    pub fn lo_f64(&self) -> f64 {
        float_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        float_to_f64(&self.hi)
    }

    /// Width `hi − lo`, as an `f64` upper estimate.
    pub fn width_f64(&self) -> f64 {
        float_to_f64(&self.hi.sub(&self.lo, self.prec, UP))
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let m = self.lo.add(&self.hi, self.prec, RoundingMode::ToEven);
        let mut half = m;
        if let Some(e) = half.exponent() {
            half.set_exponent(e - 1);
        }
        if half.is_zero() {
            return "0".to_string();
        }
        let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 4;
        let rounded = half.add(
            &BigFloat::from_word(0, 64),
            bits.max(64),
            RoundingMode::ToEven,
        );
        let s = with_consts(|cc| rounded.format(Radix::Dec, RoundingMode::ToEven, cc))
            .unwrap_or_else(|_| "NaN".into());
        trim_decimal(&s, digits)
    }
}

/// A real number known either exactly or through an enclosure. Arithmetic
/// stays exact until an inexact operand appears.
#[derive(Debug, Clone)]
pub enum Real {
    Exact(BigRational),
    Approx(Interval),
}

impl Real {
    pub fn int(n: i64) -> Self {
        Real::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// `ln n` for a positive integer, exact only at `n = 1`.
    pub fn ln_int(n: u64) -> Self {
        if n == 1 {
            Real::int(0)
        } else {
            Real::Approx(Interval::from_bigint(&BigInt::from(n), DEFAULT_PRECISION).ln())
        }
    }

    pub fn to_interval(&self) -> Interval {
        match self {
            Real::Exact(r) => Interval::from_rational(r, DEFAULT_PRECISION),
            Real::Approx(iv) => iv.clone(),
        }
    }

    fn combine(
        &self,
        other: &Self,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        approx: impl FnOnce(&Interval, &Interval) -> Interval,
    ) -> Self {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(exact(a, b)),
            _ => Real::Approx(approx(&self.to_interval(), &other.to_interval())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b, Interval::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b, Interval::sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a * b, Interval::mul)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a / b, Interval::div)
    }

    /// Certainly `self < other`.
    pub fn lt(&self, other: &Self) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a < b,
            _ => self.to_interval().certainly_lt(&other.to_interval()),
        }
    }

    /// Certainly `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a <= b,
            _ => self.to_interval().certainly_le(&other.to_interval()),
        }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        self.to_interval().to_decimal(digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_interval().mid_f64()
    }
}

impl serde::Serialize for Real {
    /// Exact values as `num/den`, enclosures as a 20-digit decimal midpoint.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) => s.serialize_str(&crate::ratio::to_text(r)),
            Real::Approx(iv) => s.serialize_str(&iv.to_decimal(20)),
        }
    }
}

fn trim_decimal(s: &str, digits: usize) -> String {
    // astro-float prints `d.ddddde±x`; keep `digits` significant digits and
    // switch to positional notation for moderate exponents
    let (mant, exp) = s.split_once('e').unwrap_or((s, "0"));
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let exp: i64 = exp.parse().unwrap_or(0);
    let all: String = mant
        .chars()
        .filter(char::is_ascii_digit)
        .take(digits.max(1))
        .collect();
    let sig = all.trim_end_matches('0');
    let sig = if sig.is_empty() { "0" } else { sig };
    if !(-7..21).contains(&exp) {
        let (head, tail) = sig.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{sig}", "0".repeat((-point) as usize))
    } else if point as usize >= sig.len() {
        format!("{sig}{}", "0".repeat(point as usize - sig.len()))
    } else {
        let (int, frac) = sig.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

fn fcmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        Some(_) => Ordering::Greater,
        None => panic!("comparison with NaN"),
    }
}

fn fmin(a: BigFloat, b: BigFloat) -> BigFloat {
    if fcmp(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn fmax(a: BigFloat, b: BigFloat) -> BigFloat {
    if fcmp(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Exact conversion of a finite big float to its floor.
fn float_floor(x: &BigFloat) -> BigInt {
    let f = x.floor();
    if f.is_zero() {
        return BigInt::zero();
    }
    let (words, _, sign, e, _) = f.as_raw_parts().expect("finite value");
    let mut mag = BigInt::zero();
    for &w in words.iter().rev() {
        mag = (mag << 64usize) + BigInt::from(w);
    }
    // value = mag · 2^(e − 64·len)
    let shift = e as i64 - 64 * words.len() as i64;
    let mag = if shift >= 0 {
        mag << shift as usize
    } else {
        mag >> (-shift) as usize
    };
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let top = *words.last().unwrap() as f64;
    let v = top * 2f64.powi(e.saturating_sub(64).clamp(-2000, 2000));
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

/// Integer `⌈a / b⌉` for positive `b`.
pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + BigInt::one()
    }
}

/// Smallest integer `r` with `r^k ≥ x`, for `x ≥ 0`.
pub fn ceil_nth_root(x: &BigInt, k: u32) -> BigInt {
    assert!(!x.is_negative() && k >= 1);
    let r = x.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *x {
        r
    } else {
        r + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_enclosure() {
        for (n, d) in [(1, 3), (-7, 11), (39, 128), (1, 1), (123456789, 1000)] {
            let iv = Interval::from_rational(&q(n, d), 128);
            let x = n as f64 / d as f64;
            assert!(iv.lo_f64() <= x && x <= iv.hi_f64(), "{n}/{d}");
            assert!(iv.width_f64() < x.abs() * 1e-35);
        }
        let exact = Interval::from_rational(&q(39, 128), 64);
        assert_eq!(exact.width_f64(), 0.0);
        let huge = BigRational::from_integer(BigInt::from(10).pow(400));
        let iv = Interval::from_rational(&huge, 128);
        assert!(iv.certainly_lt(&Interval::from_rational(
            &(huge.clone() * q(1_000_001, 1_000_000)),
            128
        )));
        let pow2 = BigRational::from_integer(BigInt::one() << 400usize);
        assert_eq!(
            Interval::from_rational(&pow2, 128).floor_exact(),
            Some(BigInt::one() << 400usize)
        );
        assert!(iv.certainly_positive());
    }

    #[test]
    fn transcendental_values() {
        let one = Interval::from_int(1);
        let e = one.exp();
        assert!((e.mid_f64() - std::f64::consts::E).abs() < 1e-15);
        let below = Interval::from_rational(
            &BigRational::new(
                "2718281828459045235360287471352".parse().unwrap(),
                BigInt::from(10).pow(30),
            ),
            256,
        );
        let above = Interval::from_rational(
            &BigRational::new(
                "2718281828459045235360287471353".parse().unwrap(),
                BigInt::from(10).pow(30),
            ),
            256,
        );
        assert!(below.certainly_lt(&e) && e.certainly_lt(&above));
        let l = Interval::from_int(3).ln();
        assert!((l.mid_f64() - 3f64.ln()).abs() < 1e-15);
        let s = Interval::from_int(10_000).sqrt();
        assert!(s.lo_f64() <= 100.0 && s.hi_f64() >= 100.0);
        assert!((Interval::from_int(16).root4().mid_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ordering_is_certain() {
        let a = Interval::from_rational(&q(1, 3), 256);
        let b = Interval::from_rational(&q(1, 3), 256)
            .add(&Interval::from_rational(&q(1, 1_000_000), 256));
        assert!(a.certainly_lt(&b));
        assert!(!b.certainly_lt(&a));
        assert!(!a.certainly_lt(&a));
        assert!(Interval::from_int(2).certainly_le(&Interval::from_int(2)));
    }

    #[test]
    fn floors_and_roots() {
        let x = Interval::from_rational(&q(37708, 10000), 128);
        assert_eq!(x.floor_exact(), Some(BigInt::from(3)));
        assert_eq!(x.neg().floor_exact(), Some(BigInt::from(-4)));
        assert_eq!(x.ceil_exact(), Some(BigInt::from(4)));
        assert_eq!(ceil_nth_root(&BigInt::from(27), 3), BigInt::from(3));
        assert_eq!(ceil_nth_root(&BigInt::from(28), 3), BigInt::from(4));
        assert_eq!(
            ceil_div(&BigInt::from(7), &BigInt::from(2)),
            BigInt::from(4)
        );
    }

    #[test]
    fn decimal_layout() {
        assert_eq!(trim_decimal("2.4695588931926980241e-1", 6), "0.246955");
        assert_eq!(trim_decimal("5.0000e-1", 20), "0.5");
        assert_eq!(trim_decimal("1.2345e+3", 3), "1230");
        assert_eq!(trim_decimal("-1.25e+2", 10), "-125");
        assert_eq!(trim_decimal("3.1e+40", 10), "3.1e40");
        assert_eq!(trim_decimal("7.0e-9", 10), "7e-9");
    }

    #[test]
    fn decimal_output() {
        let third = Interval::from_rational(&q(1, 3), 256);
        assert_eq!(third.to_decimal(10), "0.3333333333");
        assert_eq!(Interval::from_int(0).to_decimal(5), "0");
    }
}
