use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::TheoryError;
use crate::groups::FppValue;
use crate::interval::{Interval, Real, DEFAULT_PRECISION};
use crate::ratio;

/// Default error constant in the effective Chebotarev estimate.
pub const DEFAULT_M: i64 = 3;

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn sqrt_real(q: &BigInt) -> Real {
    let r = q.sqrt();
    if &r * &r == *q {
        Real::Exact(BigRational::from_integer(r))
    } else {
        Real::Approx(Interval::from_bigint(q, DEFAULT_PRECISION).sqrt())
    }
}

fn root4_real(q: &BigInt) -> Real {
    match sqrt_real(q) {
        Real::Exact(r) => sqrt_real(r.numer()),
        Real::Approx(_) => Real::Approx(Interval::from_bigint(q, DEFAULT_PRECISION).root4()),
    }
}

/// `ln q` as an enclosure, for `q ≥ 1`.
pub fn ln_of(q: &BigInt) -> Result<Interval, TheoryError> {
    if !q.is_positive() {
        return Err(TheoryError::Domain(format!("logarithm of {q}")));
    }
    Ok(Interval::from_bigint(q, DEFAULT_PRECISION).ln())
}

/// `(2c/m)·[(m + g)√q + m·q^{1/4} + g + m]`.
pub fn chebotarev_error(
    c: &BigInt,
    m: &BigInt,
    g: &BigInt,
    q: &BigInt,
) -> Result<Real, TheoryError> {
    if c.is_negative() || g.is_negative() || q.is_negative() || !m.is_positive() {
        return Err(TheoryError::ParameterOutOfRange(
            "need c, g, q ≥ 0 and m ≥ 1".into(),
        ));
    }
    if c.is_zero() {
        return Ok(Real::int(0));
    }
    let int = |n: &BigInt| Real::Exact(BigRational::from_integer(n.clone()));
    let lead = Real::Exact(BigRational::new(c * 2, m.clone()));
    let bracket = int(&(m + g))
        .mul(&sqrt_real(q))
        .add(&int(m).mul(&root4_real(q)))
        .add(&int(&(g + m)));
    Ok(lead.mul(&bracket))
}

/// `(m_n − 1)(nd − n − 1)`, floored at zero.
pub fn genus_bound(n: u64, d: u64, m_n: &BigInt) -> BigInt {
    let k = (n * d).saturating_sub(n + 1);
    let g = (m_n - 1u32) * big(k);
    if g.is_negative() {
        BigInt::zero()
    } else {
        g
    }
}

pub fn ramified_prime_bound(n: u64, d: u64) -> u64 {
    n * (2 * d - 2)
}

/// `|G|^((dⁿ − 1)/(d − 1))`, refused when the result would pass `bit_budget`.
pub fn kn_degree(
    group_order: &BigInt,
    d: u64,
    n: u32,
    bit_budget: u64,
) -> Result<BigInt, TheoryError> {
    if d < 2 || !group_order.is_positive() {
        return Err(TheoryError::ParameterOutOfRange(
            "need d ≥ 2 and |G| ≥ 1".into(),
        ));
    }
    if group_order.is_one() {
        return Ok(BigInt::one());
    }
    let exponent = (num_traits::pow(big(d), n as usize) - 1u32) / big(d - 1);
    let predicted = &exponent * big(group_order.bits() - 1);
    if predicted > big(bit_budget) {
        return Err(TheoryError::BudgetExceeded(bit_budget));
    }
    let e: usize = exponent
        .try_into()
        .map_err(|_| TheoryError::BudgetExceeded(bit_budget))?;
    Ok(num_traits::pow(group_order.clone(), e))
}

/// Inputs to the error radius of the `n`-th image count.
#[derive(Debug, Clone, Serialize)]
pub struct BoundParameters {
    pub d: u64,
    pub n: u32,
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub group_order: BigInt,
    /// Degree of the `n`-th preimage field over the rational function field,
    /// taken to be `|G|^((dⁿ−1)/(d−1))`.
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub m_n: BigInt,
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub genus_bound: BigInt,
    pub ramified_bound: u64,
    #[serde(rename = "M", serialize_with = "ratio::serialize")]
    pub m_const: BigRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_prime: Option<u64>,
}

impl BoundParameters {
    pub fn new(group_order: &BigInt, d: u64, n: u32, bit_budget: u64) -> Result<Self, TheoryError> {
        if n == 0 {
            return Err(TheoryError::ParameterOutOfRange(
                "iterate index must be ≥ 1".into(),
            ));
        }
        let m_n = kn_degree(group_order, d, n, bit_budget)?;
        Ok(Self {
            d,
            n,
            group_order: group_order.clone(),
            genus_bound: genus_bound(n as u64, d, &m_n),
            ramified_bound: ramified_prime_bound(n as u64, d),
            m_n,
            m_const: BigRational::from_integer(DEFAULT_M.into()),
            c_prime: None,
        })
    }

    pub fn with_m(mut self, m: BigRational) -> Self {
        self.m_const = m;
        self
    }
}

/// Predicted `#φⁿ(P¹(F_q))` as `center ± radius`.
#[derive(Debug, Clone, Serialize)]
pub struct PredictedImage {
    pub center: Real,
    pub radius: Real,
    /// The radius is not certainly below `q`, so the prediction says nothing.
    pub vacuous: bool,
}

/// `center = fpp·q`, `radius = fpp·2M·m_n·n·d·√q`.
pub fn predicted_image_interval(
    fpp: &FppValue,
    params: &BoundParameters,
    q: &BigInt,
) -> Result<PredictedImage, TheoryError> {
    if q < &big(2) {
        return Err(TheoryError::ParameterOutOfRange(
            "q must be at least 2".into(),
        ));
    }
    let f = match &fpp.exact {
        Some(r) => Real::Exact(r.clone()),
        None => Real::Approx(fpp.enclosure.clone()),
    };
    let q_real = Real::Exact(BigRational::from_integer(q.clone()));
    let scale =
        &params.m_const * BigRational::from_integer(&params.m_n * 2u32 * params.n * params.d);
    let radius = f.mul(&Real::Exact(scale)).mul(&sqrt_real(q));
    Ok(PredictedImage {
        center: f.mul(&q_real),
        vacuous: !radius.lt(&q_real),
        radius,
    })
}

/// `⌊ln ln q / ln d − d⌋`, clamped at zero, from an enclosure of `ln q`.
///
/// When the enclosure straddles an integer the smaller floor is returned.
pub fn threshold_n(ln_q: &Interval, d: u64) -> Result<u64, TheoryError> {
    if d < 2 {
        return Err(TheoryError::ParameterOutOfRange("need d ≥ 2".into()));
    }
    if !ln_q.certainly_positive() {
        return Err(TheoryError::Domain("ln ln q is undefined for q ≤ 1".into()));
    }
    let ln_d = Interval::from_bigint(&big(d), DEFAULT_PRECISION).ln();
    let v = ln_q
        .ln()
        .div(&ln_d)
        .sub(&Interval::from_bigint(&big(d), DEFAULT_PRECISION));
    let f = v.floor_lower();
    Ok(if f.is_negative() {
        0
    } else {
        f.try_into().unwrap_or(u64::MAX)
    })
}

/// `2 ln d / (ln(ln q − K ln 2) − A) + 4M·q^{−1/4}` with `K = degree_k`.
pub fn periodic_proportion_bound(
    ln_q: &Interval,
    d: u64,
    a: &Interval,
    degree_k: u64,
    m: &BigRational,
) -> Result<Interval, TheoryError> {
    let p = DEFAULT_PRECISION;
    let int = |n: u64| Interval::from_bigint(&big(n), p);
    let inner = ln_q.sub(&int(2).ln().mul(&int(degree_k)));
    if !inner.certainly_positive() {
        return Err(TheoryError::BoundVoid(
            "ln q − K ln 2 is not positive".into(),
        ));
    }
    let denom = inner.ln().sub(a);
    if !denom.certainly_positive() {
        return Err(TheoryError::BoundVoid(
            "ln(ln q − K ln 2) does not exceed A".into(),
        ));
    }
    let main = int(d).ln().mul(&int(2)).div(&denom);
    let tail = ln_q
        .div(&int(4))
        .neg()
        .exp()
        .mul(&Interval::from_rational(&(m * BigInt::from(4)), p));
    Ok(main.add(&tail))
}
