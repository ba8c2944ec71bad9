use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::TheoryError;
use crate::interval::{ceil_nth_root, Interval, Real, DEFAULT_PRECISION};
use crate::ratio;

/// Orbit values larger than this many bits abort the exact iteration.
pub const DEFAULT_ORBIT_BITS: u64 = 1_000_000;

/// Divisor search for integer critical points stops past this many trials.
const DIVISOR_SEARCH_LIMIT: u64 = 10_000_000;

fn to_big(coeffs: &[i128]) -> Vec<BigInt> {
    coeffs.iter().map(|&c| BigInt::from(c)).collect()
}

fn horner(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn degree_of(coeffs: &[i128]) -> Result<usize, TheoryError> {
    match coeffs.last() {
        Some(&lead) if lead != 0 && coeffs.len() >= 3 => Ok(coeffs.len() - 1),
        _ => Err(TheoryError::ParameterOutOfRange(
            "need an integer polynomial of degree at least 2 with nonzero leading coefficient"
                .into(),
        )),
    }
}

/// Divide out `(x − r)` once, if it is a factor.
fn deflate(coeffs: &[BigInt], r: &BigInt) -> Option<Vec<BigInt>> {
    // synthetic division from the top
    let mut q = vec![BigInt::zero(); coeffs.len() - 1];
    let mut carry = BigInt::zero();
    for i in (1..coeffs.len()).rev() {
        carry = &coeffs[i] + carry * r;
        q[i - 1] = carry.clone();
    }
    (&coeffs[0] + carry * r).is_zero().then_some(q)
}

/// Distinct integer roots of `φ'` with multiplicities. Fails with
/// `NonIntegerCritical` unless the integer roots account for all of `φ'`.
pub fn integer_critical_points(coeffs: &[i128]) -> Result<Vec<(BigInt, usize)>, TheoryError> {
    let d = degree_of(coeffs)?;
    let mut deriv: Vec<BigInt> = (1..=d).map(|i| BigInt::from(coeffs[i]) * i).collect();
    let mut found = Vec::new();
    let zeros = deriv.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        found.push((BigInt::zero(), zeros));
        deriv.drain(..zeros);
    }
    let lead = deriv.last().unwrap().abs();
    let cauchy = deriv.iter().map(|c| c.abs()).max().unwrap() / &lead + 1u32;
    let t = deriv[0].abs();
    let mut candidates = Vec::new();
    let mut k = BigInt::one();
    let mut trials = 0u64;
    while &k * &k <= t && k <= cauchy {
        trials += 1;
        if trials > DIVISOR_SEARCH_LIMIT {
            return Err(TheoryError::ParameterOutOfRange(
                "constant term too large for the integer critical point search".into(),
            ));
        }
        if t.is_multiple_of(&k) {
            candidates.push(k.clone());
            candidates.push(&t / &k);
        }
        k += 1u32;
    }
    candidates.sort();
    candidates.dedup();
    for m in candidates.into_iter().filter(|m| m <= &cauchy) {
        for r in [-m.clone(), m] {
            let mut mult = 0;
            while let Some(q) = deflate(&deriv, &r) {
                deriv = q;
                mult += 1;
            }
            if mult > 0 {
                found.push((r, mult));
            }
        }
    }
    if deriv.len() > 1 {
        return Err(TheoryError::NonIntegerCritical(format!(
            "derivative keeps a factor of degree {} with no integer roots",
            deriv.len() - 1
        )));
    }
    found.sort();
    Ok(found)
}

/// Height constants for an integer polynomial whose critical points are
/// integers.
///
/// `C = ln((d+1)·max|aᵢ|)` bounds the growth `ln|φ(α)| ≤ d·ln max(|α|,1) + C`
/// at integers, `D` is the largest critical log-height and
/// `B = e^{D + C/(d−1)}`. Since `B^{d−1} = β` is an integer, thresholds are
/// computed from `β` exactly.
#[derive(Debug, Clone, Serialize)]
pub struct HeightReport {
    pub d: usize,
    pub degree_k: u64,
    #[serde(serialize_with = "ratio::serialize_bigint_vec")]
    pub critical: Vec<BigInt>,
    #[serde(rename = "C")]
    pub c: Real,
    #[serde(rename = "D")]
    pub d_const: Real,
    #[serde(rename = "B")]
    pub b: Real,
    #[serde(rename = "A")]
    pub a: Real,
    /// `B^{d−1}`.
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub beta: BigInt,
    #[serde(skip)]
    ln_b: Interval,
}

pub fn height_constants(coeffs: &[i128]) -> Result<HeightReport, TheoryError> {
    let d = degree_of(coeffs)?;
    let critical: Vec<BigInt> = integer_critical_points(coeffs)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let max_a = coeffs.iter().map(|c| BigInt::from(*c).abs()).max().unwrap();
    let k = &max_a * (d + 1);
    let max_c = critical
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default()
        .max(BigInt::one());
    let beta = num_traits::pow(max_c.clone(), d - 1) * &k;
    let prec = DEFAULT_PRECISION;
    let ln = |n: &BigInt| {
        if n.is_one() {
            Real::int(0)
        } else {
            Real::Approx(Interval::from_bigint(n, prec).ln())
        }
    };
    let ln_b = Interval::from_bigint(&beta, prec)
        .ln()
        .div(&Interval::from_int(d as i64 - 1));
    let root = beta.nth_root(d as u32 - 1);
    let b = if num_traits::pow(root.clone(), d - 1) == beta {
        Real::Exact(BigRational::from_integer(root))
    } else {
        Real::Approx(ln_b.exp())
    };
    let dd = Interval::from_int(d as i64);
    // ln ln B^2 = ln(2 ln B), with ln B > 0 because β ≥ 3
    let a = dd.mul(&dd.ln()).max(&ln_b.scale_int(2).ln());
    Ok(HeightReport {
        d,
        degree_k: 1,
        critical,
        c: ln(&k),
        d_const: ln(&max_c),
        b,
        a: Real::Approx(a),
        beta,
        ln_b,
    })
}

impl HeightReport {
    /// `⌈2B^{2dⁿ}⌉`, from `T^{d−1} ≥ 2^{d−1}·β^{2dⁿ}`.
    pub fn prime_threshold(&self, n: u32, bit_budget: u64) -> Result<BigInt, TheoryError> {
        let e: BigInt = 2 * num_traits::pow(BigInt::from(self.d), n as usize);
        if &e * self.beta.bits() > BigInt::from(bit_budget) {
            return Err(TheoryError::BudgetExceeded(bit_budget));
        }
        let e: usize = e
            .try_into()
            .map_err(|_| TheoryError::BudgetExceeded(bit_budget))?;
        let k = self.d as u32 - 1;
        let x =
            num_traits::pow(BigInt::from(2), k as usize) * num_traits::pow(self.beta.clone(), e);
        Ok(ceil_nth_root(&x, k))
    }

    /// Largest `n` with `n < (ln(ln q − ln 2) − ln(2 ln B))/ln d`, or `None`
    /// when no `n ≥ 0` qualifies. Rounded so that the answer is never too big.
    pub fn n_threshold(&self, ln_q: &Interval) -> Option<u64> {
        let prec = DEFAULT_PRECISION;
        let inner = ln_q.sub(&Interval::from_int(2).ln());
        if !inner.certainly_positive() {
            return None;
        }
        let x = inner
            .ln()
            .sub(&self.ln_b.scale_int(2).ln())
            .div(&Interval::from_int(self.d as i64).ln());
        let ceil_lo = Interval::point(x.lo().clone(), prec).ceil_exact()?;
        let n: BigInt = ceil_lo - 1;
        (!n.is_negative()).then(|| n.try_into().unwrap_or(u64::MAX))
    }

    pub fn ln_b(&self) -> &Interval {
        &self.ln_b
    }
}

/// `φⁿ(a) = φᵐ(b)` over the integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntCollision {
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub a: BigInt,
    pub n: usize,
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub b: BigInt,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalOrbit {
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub critical: BigInt,
    /// `φʳ(c)` for `r = 1..=N`.
    #[serde(serialize_with = "ratio::serialize_bigint_vec")]
    pub values: Vec<BigInt>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitDistinctness {
    pub orbits: Vec<CriticalOrbit>,
    pub distinct: bool,
    pub first_collision: Option<IntCollision>,
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub max_abs: BigInt,
    /// `max − min` over every orbit value. No two distinct values can meet
    /// modulo a prime above this.
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub spread: BigInt,
}

/// Exact critical orbits `φʳ(c)`, `1 ≤ r ≤ n_max`, over `ℤ`.
pub fn exact_orbit_distinctness(
    coeffs: &[i128],
    n_max: usize,
    bit_budget: u64,
) -> Result<OrbitDistinctness, TheoryError> {
    let critical: Vec<BigInt> = integer_critical_points(coeffs)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let poly = to_big(coeffs);
    let mut orbits: Vec<CriticalOrbit> = critical
        .iter()
        .map(|c| CriticalOrbit {
            critical: c.clone(),
            values: Vec::with_capacity(n_max),
        })
        .collect();
    let mut current = critical.clone();
    let mut seen = std::collections::HashMap::new();
    let mut first_collision = None;
    for level in 1..=n_max {
        for (i, c) in critical.iter().enumerate() {
            let v = horner(&poly, &current[i]);
            if v.bits() > bit_budget {
                return Err(TheoryError::OrbitExplosion { budget: bit_budget });
            }
            if first_collision.is_none() {
                if let Some((b, m)) = seen.get(&v) {
                    first_collision = Some(IntCollision {
                        a: c.clone(),
                        n: level,
                        b: BigInt::clone(b),
                        m: *m,
                    });
                } else {
                    seen.insert(v.clone(), (c.clone(), level));
                }
            }
            orbits[i].values.push(v.clone());
            current[i] = v;
        }
    }
    let all = orbits.iter().flat_map(|o| o.values.iter());
    let max = all.clone().max().cloned().unwrap_or_default();
    let min = all.clone().min().cloned().unwrap_or_default();
    let max_abs = all.map(|v| v.abs()).max().unwrap_or_default();
    Ok(OrbitDistinctness {
        orbits,
        distinct: first_collision.is_none(),
        first_collision,
        max_abs,
        spread: max - min,
    })
}

/// The example families with known iterated Galois groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ExampleFamily {
    /// `a·x^d + c`.
    AxdPlusC { a: u64, c: u64, d: u32 },
    /// `(d−1)·x^d + d·a·x^{d−1}`.
    Odoni { a: u64, d: u32 },
}

impl ExampleFamily {
    /// Integer coefficients, constant term first.
    pub fn coefficients(&self) -> Vec<i128> {
        match *self {
            ExampleFamily::AxdPlusC { a, c, d } => {
                let mut v = vec![0i128; d as usize + 1];
                v[0] = c as i128;
                v[d as usize] = a as i128;
                v
            }
            ExampleFamily::Odoni { a, d } => {
                let mut v = vec![0i128; d as usize + 1];
                v[d as usize - 1] = d as i128 * a as i128;
                v[d as usize] = d as i128 - 1;
                v
            }
        }
    }
}

/// `q ≡ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub modulus: u64,
    pub residue: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyThreshold {
    /// The characteristic must exceed this.
    #[serde(serialize_with = "ratio::serialize_bigint")]
    pub threshold: BigInt,
    pub congruence: Option<Congruence>,
}

fn checked_pow(base: u64, exponent: &BigInt, bit_budget: u64) -> Result<BigInt, TheoryError> {
    let base = BigInt::from(base);
    if base.bits() > 1 && exponent * (base.bits() - 1) > BigInt::from(bit_budget) {
        return Err(TheoryError::BudgetExceeded(bit_budget));
    }
    let e: usize = exponent
        .try_into()
        .map_err(|_| TheoryError::BudgetExceeded(bit_budget))?;
    Ok(num_traits::pow(base, e))
}

/// Characteristic bound above which the `n`-th iterate of the family has the
/// full iterated wreath product as geometric Galois group.
pub fn family_threshold(
    family: ExampleFamily,
    n: u32,
    bit_budget: u64,
) -> Result<FamilyThreshold, TheoryError> {
    let out_of_range = |m: &str| Err(TheoryError::ParameterOutOfRange(m.into()));
    if n == 0 {
        return out_of_range("iterate index must be ≥ 1");
    }
    let geometric =
        |d: u32, k: u32| (num_traits::pow(BigInt::from(d), k as usize) - 1u32) / (d - 1);
    match family {
        ExampleFamily::AxdPlusC { a, c, d } => {
            if a == 0 || c == 0 || d < 2 {
                return out_of_range("need a, c > 0 and d ≥ 2");
            }
            Ok(FamilyThreshold {
                threshold: checked_pow(a + c, &geometric(d, n), bit_budget)?,
                congruence: (d > 2).then_some(Congruence {
                    modulus: d as u64,
                    residue: 1,
                }),
            })
        }
        ExampleFamily::Odoni { a, d } => {
            if d < 3 || a < 2 {
                return out_of_range("need d ≥ 3 and a ≥ 2");
            }
            let head = checked_pow(2 * d as u64, &geometric(d, n - 1), bit_budget)?;
            let tail = checked_pow(a, &num_traits::pow(BigInt::from(d), n as usize), bit_budget)?;
            Ok(FamilyThreshold {
                threshold: head * tail,
                congruence: None,
            })
        }
    }
}
