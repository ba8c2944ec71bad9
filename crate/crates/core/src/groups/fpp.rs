use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::indicatrix::rational_bits;
use super::{
    indicatrix, is_transitive, make_coset, GroupError, IndicatrixPolynomial, Permutation,
    PermutationSet,
};
use crate::interval::{Interval, DEFAULT_PRECISION};
use crate::ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FppMode {
    Exact,
    Float { precision: usize },
}

/// A fixed-point proportion, exact when it fits the bit budget and
/// otherwise a rigorous enclosure.
#[derive(Debug, Clone, Serialize)]
pub struct FppValue {
    pub n: usize,
    #[serde(serialize_with = "ratio::serialize_opt")]
    pub exact: Option<BigRational>,
    /// Midpoint of the enclosure, 30 significant digits.
    pub approx: String,
    #[serde(flatten)]
    pub mode: FppMode,
    #[serde(skip)]
    pub enclosure: Interval,
}

impl FppValue {
    pub fn from_exact(n: usize, v: BigRational) -> Self {
        let enclosure = Interval::from_rational(&v, DEFAULT_PRECISION);
        Self {
            n,
            approx: enclosure.to_decimal(30),
            exact: Some(v),
            mode: FppMode::Exact,
            enclosure,
        }
    }

    fn float(n: usize, enclosure: Interval) -> Self {
        Self {
            n,
            exact: None,
            approx: enclosure.to_decimal(30),
            mode: FppMode::Float {
                precision: enclosure.precision(),
            },
            enclosure,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure.mid_f64()
    }
}

/// `FPP_k = 1 − Φᵏ(0)` for `k = 1..=n_max`.
///
/// Values stay exact while `bits(num) + bits(den)` of the next iterate is
/// predicted to fit `bit_budget`; after that a `256`-bit enclosure is
/// carried. Interval Horner is sound for any polynomial, and on `[0, 1]`
/// the nonnegative coefficients keep it tight.
pub fn fpp_sequence(phi: &IndicatrixPolynomial, n_max: usize, bit_budget: u64) -> Vec<FppValue> {
    let (num, den) = phi.integer_form();
    let deg = phi.degree().max(1) as u64;
    let primes = prime_factors(&den);
    let mut out = Vec::with_capacity(n_max);
    let mut x = BigRational::zero();
    let mut exact = true;
    let mut iv = Interval::from_int(0);
    for n in 1..=n_max {
        if exact && rational_bits(&x) * deg + den.bits() > bit_budget {
            exact = false;
            iv = Interval::from_rational(&x, DEFAULT_PRECISION);
        }
        if exact {
            x = eval_integer_form(&num, &den, primes.as_deref(), &x);
            // 1 − a/b = (b − a)/b is already in lowest terms
            let complement = BigRational::new_raw(x.denom() - x.numer(), x.denom().clone());
            out.push(FppValue::from_exact(n, complement));
        } else {
            iv = phi.eval_interval(&iv);
            out.push(FppValue::float(n, Interval::from_int(1).sub(&iv)));
        }
    }
    out
}

/// Prime factors of `den` found by trial division, or `None` when a cofactor
/// is too large to certify as prime.
fn prime_factors(den: &BigInt) -> Option<Vec<BigInt>> {
    const TRIAL_LIMIT: u64 = 1 << 20;
    let mut rest = den.magnitude().clone();
    let mut primes = Vec::new();
    let mut q = 2u64;
    while q <= TRIAL_LIMIT && num_bigint::BigUint::from(q * q) <= rest {
        if (&rest % q).is_zero() {
            primes.push(BigInt::from(q));
            while (&rest % q).is_zero() {
                rest /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if rest > num_bigint::BigUint::one() {
        if num_bigint::BigUint::from(TRIAL_LIMIT * TRIAL_LIMIT) < rest {
            return None;
        }
        primes.push(BigInt::from(rest));
    }
    Some(primes)
}

/// Divides out the common factor of `num` and `den`, assuming every prime
/// of the common factor is in `primes`.
fn reduce_by(mut num: BigInt, mut den: BigInt, primes: &[BigInt]) -> BigRational {
    if num.is_zero() {
        return BigRational::zero();
    }
    for q in primes {
        if *q == BigInt::from(2) {
            let k = num
                .trailing_zeros()
                .unwrap_or(0)
                .min(den.trailing_zeros().unwrap_or(0));
            num >>= k;
            den >>= k;
            continue;
        }
        loop {
            let (nq, nr) = num.div_rem(q);
            if !nr.is_zero() {
                break;
            }
            let (dq, dr) = den.div_rem(q);
            if !dr.is_zero() {
                break;
            }
            num = nq;
            den = dq;
        }
    }
    BigRational::new_raw(num, den)
}

/// `P(a/b) / D`, reduced once at the end.
///
/// With `primes` the prime factors of `D`, the reduction avoids a full gcd:
/// by induction every denominator `b` has its primes among those of `D`, so
/// the common factor of the result does too.
fn eval_integer_form(
    num: &[BigInt],
    den: &BigInt,
    primes: Option<&[BigInt]>,
    x: &BigRational,
) -> BigRational {
    let (a, b) = (x.numer(), x.denom());
    let m = num.len().saturating_sub(1);
    // Σ P_j a^j b^(m−j), by Horner in a with b-powers folded in
    let mut acc = BigInt::zero();
    let mut b_pow = BigInt::one();
    for c in num.iter().rev() {
        acc = acc * a + c * &b_pow;
        b_pow *= b;
    }
    let denom = den * num_traits::pow(b.clone(), m);
    match primes {
        Some(primes) => reduce_by(acc, denom, primes),
        None => {
            let g = acc.gcd(&denom);
            BigRational::new_raw(acc / &g, denom / g)
        }
    }
}

/// `FPP([G]ⁿ) = 1 − Φⁿ(0)`.
pub fn iterate_at_zero(
    phi: &IndicatrixPolynomial,
    n: usize,
    bit_budget: u64,
) -> Result<FppValue, GroupError> {
    if n == 0 {
        return Err(GroupError::ParameterOutOfRange(
            "iterate index must be ≥ 1".into(),
        ));
    }
    Ok(fpp_sequence(phi, n, bit_budget).pop().unwrap())
}

/// `1 − Φ_{τG}ⁿ(0)`, the fixed-point proportion of the iterated coset.
pub fn fpp_coset_iterated(
    tau: &Permutation,
    group: &PermutationSet,
    n: usize,
    bit_budget: u64,
) -> Result<FppValue, GroupError> {
    if !is_transitive(group) {
        return Err(GroupError::NotTransitive);
    }
    let phi = indicatrix(&make_coset(tau, group)?)?;
    iterate_at_zero(&phi, n, bit_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{
        closed_form_indicatrix, generate_from, make_group, Family, DEFAULT_BIT_BUDGET,
    };
    use crate::ratio::rat;

    #[test]
    fn quadratic_sequence() {
        let s2 = closed_form_indicatrix(Family::Sd, 2).unwrap();
        let seq = fpp_sequence(&s2, 3, DEFAULT_BIT_BUDGET);
        let exact: Vec<_> = seq.iter().map(|v| v.exact.clone().unwrap()).collect();
        assert_eq!(exact, vec![rat(1, 2), rat(3, 8), rat(39, 128)]);
        assert_eq!(
            iterate_at_zero(&s2, 3, DEFAULT_BIT_BUDGET).unwrap().exact,
            Some(rat(39, 128))
        );
        let c3 = closed_form_indicatrix(Family::Cd, 3).unwrap();
        assert_eq!(
            iterate_at_zero(&c3, 1, DEFAULT_BIT_BUDGET).unwrap().exact,
            Some(rat(1, 3))
        );
        assert_eq!(
            iterate_at_zero(&IndicatrixPolynomial::identity(), 1, DEFAULT_BIT_BUDGET)
                .unwrap()
                .exact,
            Some(rat(1, 1))
        );
    }

    #[test]
    fn prime_stripping_matches_gcd() {
        assert_eq!(
            prime_factors(&BigInt::from(720)),
            Some(vec![2, 3, 5].into_iter().map(BigInt::from).collect())
        );
        let big = BigInt::from((1u64 << 31) - 1) * BigInt::from((1u64 << 61) - 1);
        assert_eq!(prime_factors(&big), None);
        for (f, d) in [
            (Family::Sd, 5),
            (Family::Ad, 4),
            (Family::Dd, 6),
            (Family::Cd, 7),
        ] {
            let phi = closed_form_indicatrix(f, d).unwrap();
            let mut x = BigRational::zero();
            for v in fpp_sequence(&phi, 6, u64::MAX) {
                x = phi.eval(&x);
                assert_eq!(v.exact.unwrap(), BigRational::one() - &x);
            }
        }
    }

    #[test]
    fn budget_fallback_encloses_exact() {
        let s3 = closed_form_indicatrix(Family::Sd, 3).unwrap();
        let exact = fpp_sequence(&s3, 9, u64::MAX);
        let mixed = fpp_sequence(&s3, 9, 2_000);
        assert!(matches!(mixed[8].mode, FppMode::Float { precision: 256 }));
        for (e, m) in exact.iter().zip(&mixed) {
            let v = Interval::from_rational(e.exact.as_ref().unwrap(), 256);
            assert!(
                !m.enclosure.certainly_lt(&v) && !v.certainly_lt(&m.enclosure),
                "n={}",
                e.n
            );
            assert!(m.enclosure.width_f64() < 1e-60);
        }
    }

    #[test]
    fn strictly_decreasing() {
        let d5 = closed_form_indicatrix(Family::Dd, 5).unwrap();
        let seq = fpp_sequence(&d5, 30, DEFAULT_BIT_BUDGET);
        for w in seq.windows(2) {
            assert!(w[1].enclosure.certainly_lt(&w[0].enclosure));
        }
    }

    #[test]
    fn cosets() {
        let s2 = make_group(Family::Sd, 2).unwrap();
        let id = Permutation::identity(2);
        let phi = closed_form_indicatrix(Family::Sd, 2).unwrap();
        for n in 1..6 {
            assert_eq!(
                fpp_coset_iterated(&id, &s2, n, DEFAULT_BIT_BUDGET)
                    .unwrap()
                    .exact,
                iterate_at_zero(&phi, n, DEFAULT_BIT_BUDGET).unwrap().exact
            );
        }
        let a3 = make_group(Family::Ad, 3).unwrap();
        let tau = Permutation::parse("(0 1)", Some(3)).unwrap();
        assert_eq!(
            fpp_coset_iterated(&tau, &a3, 4, DEFAULT_BIT_BUDGET)
                .unwrap()
                .exact,
            Some(rat(1, 1))
        );
        let rot: Permutation = "(0 1 2)".parse().unwrap();
        let c3 = closed_form_indicatrix(Family::Cd, 3).unwrap();
        assert_eq!(
            fpp_coset_iterated(&rot, &a3, 3, DEFAULT_BIT_BUDGET)
                .unwrap()
                .exact,
            iterate_at_zero(&c3, 3, DEFAULT_BIT_BUDGET).unwrap().exact
        );
        let trivial = generate_from(2, &[]).unwrap();
        assert_eq!(
            fpp_coset_iterated(&id, &trivial, 1, DEFAULT_BIT_BUDGET).unwrap_err(),
            GroupError::NotTransitive
        );
    }
}
