use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Family, GroupError, PermutationSet};
use crate::interval::Interval;
use crate::ratio;

/// Largest degree accepted by [`closed_form_indicatrix`].
pub const MAX_CLOSED_FORM_DEGREE: usize = 64;

/// Default cap on `bits(numerator) + bits(denominator)` of exact values.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// `Φ(x) = Σ_j c_j x^j` with exact rational coefficients; for an indicatrix
/// `c_j` is the proportion of elements with exactly `j` fixed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatrixPolynomial {
    coeffs: Vec<BigRational>,
}

impl IndicatrixPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `Φ(x) = x`
    pub fn identity() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Interval Horner evaluation; rigorous for any input interval.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let prec = x.precision();
        self.coeffs
            .iter()
            .rev()
            .fold(Interval::from_int(0).with_precision(prec), |acc, c| {
                acc.mul(x).add(&Interval::from_rational(c, prec))
            })
    }

    /// `Φ(Ψ(x))`, failing if a coefficient grows past `bit_budget`.
    pub fn compose(&self, inner: &Self, bit_budget: u64) -> Result<Self, GroupError> {
        let mut acc: Vec<BigRational> = Vec::new();
        for c in self.coeffs.iter().rev() {
            acc = poly_mul(&acc, &inner.coeffs);
            if acc.is_empty() {
                acc.push(c.clone());
            } else {
                acc[0] += c;
            }
            if let Some(bits) = acc.iter().map(rational_bits).max() {
                if bits > bit_budget {
                    return Err(GroupError::CoefficientBudgetExceeded(bit_budget));
                }
            }
        }
        Ok(Self::from_coeffs(acc))
    }

    /// `(Φ′(1), Φ″(1))`
    pub fn derivative_invariants(&self) -> (BigRational, BigRational) {
        let mut d1 = BigRational::zero();
        let mut d2 = BigRational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            let j = BigInt::from(j);
            d1 += c * &j;
            d2 += c * &j * (&j - 1);
        }
        (d1, d2)
    }

    /// A nonzero constant term means some element fixes nothing.
    pub fn has_fixed_point_free_element(&self) -> bool {
        !self.coeff(0).is_zero()
    }

    /// `1 − Φ(0)`
    pub fn fpp(&self) -> BigRational {
        BigRational::one() - self.coeff(0)
    }

    /// `Φ = P/D` with integer `P` and positive `D`, `D` the lcm of the
    /// coefficient denominators.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (num, den)
    }

    pub fn is_distribution(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| !c.is_negative() && *c <= BigRational::one())
            && self.eval(&BigRational::one()).is_one()
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn rational_bits(r: &BigRational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Renders as `1/3 + 1/2 x + 1/6 x^3`, constant term first.
impl fmt::Display for IndicatrixPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{j}"),
            };
            terms.push(match (j, c.is_one()) {
                (0, _) => ratio::to_text(c),
                (_, true) => mono,
                _ => format!("{} {mono}", ratio::to_text(c)),
            });
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&terms.join(" + "))
    }
}

impl Serialize for IndicatrixPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IndicatrixPolynomial", 3)?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field(
            "coefficients",
            &self.coeffs.iter().map(ratio::to_text).collect::<Vec<_>>(),
        )?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

/// Brute-force indicatrix by trace counting.
pub fn indicatrix(set: &PermutationSet) -> Result<IndicatrixPolynomial, GroupError> {
    if set.is_empty() {
        return Err(GroupError::EmptySet);
    }
    let mut counts = vec![0u64; set.degree() + 1];
    for g in set.elements() {
        counts[g.trace()] += 1;
    }
    let total = BigInt::from(set.len());
    Ok(IndicatrixPolynomial::from_coeffs(
        counts
            .into_iter()
            .map(|c| BigRational::new(BigInt::from(c), total.clone()))
            .collect(),
    ))
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for k in 1..=n {
        let next = &f[k - 1] * k;
        f.push(next);
    }
    f
}

/// `Σ_{i ≤ k} (−1)^i / i!`: the derangement proportion of `S_k`.
fn alternating_sum(k: usize, fact: &[BigInt]) -> BigRational {
    (0..=k)
        .map(|i| {
            let t = BigRational::new(BigInt::one(), fact[i].clone());
            if i % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Indicatrix of `S_d`, `A_d`, `C_d` or `D_d` from its closed form, without
/// enumeration.
pub fn closed_form_indicatrix(
    family: Family,
    d: usize,
) -> Result<IndicatrixPolynomial, GroupError> {
    let min = if family == Family::Dd { 3 } else { 2 };
    if d < min || d > MAX_CLOSED_FORM_DEGREE {
        return Err(GroupError::UnsupportedFamily(format!(
            "{}_{d}",
            family.name()
        )));
    }
    let r = |n: i64, m: i64| BigRational::new(n.into(), m.into());
    let di = d as i64;
    let mut coeffs = vec![BigRational::zero(); d + 1];
    match family {
        Family::Cd => {
            coeffs[d] = r(1, di);
            coeffs[0] = r(di - 1, di);
        }
        Family::Dd if d % 2 == 1 => {
            coeffs[d] = r(1, 2 * di);
            coeffs[1] = r(di, 2 * di);
            coeffs[0] = r(di - 1, 2 * di);
        }
        Family::Dd => {
            coeffs[d] = r(1, 2 * di);
            coeffs[2] += r(di, 4 * di);
            coeffs[0] = r(3 * di - 2, 4 * di);
        }
        Family::Sd | Family::Ad => {
            let fact = factorials(d);
            // Φ_k(0) for the degree-k member of the family; for S this is the
            // derangement proportion, for A it carries a parity correction
            let at_zero = |k: usize| {
                let s = alternating_sum(k, &fact);
                if family == Family::Sd {
                    return s;
                }
                let corr = BigRational::new(BigInt::from(k as i64 - 1), fact[k].clone());
                if k % 2 == 1 {
                    s + corr
                } else {
                    s - corr
                }
            };
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c = at_zero(d - j) / BigRational::from_integer(fact[j].clone());
            }
        }
    }
    Ok(IndicatrixPolynomial::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_coset, make_group, Permutation};
    use crate::ratio::rat;

    fn poly(cs: &[(i64, i64)]) -> IndicatrixPolynomial {
        IndicatrixPolynomial::from_coeffs(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn brute_force_examples() {
        let s3 = indicatrix(&make_group(Family::Sd, 3).unwrap()).unwrap();
        assert_eq!(s3, poly(&[(1, 3), (1, 2), (0, 1), (1, 6)]));
        assert_eq!(s3.to_string(), "1/3 + 1/2 x + 1/6 x^3");
        let c4 = indicatrix(&make_group(Family::Cd, 4).unwrap()).unwrap();
        assert_eq!(c4, poly(&[(3, 4), (0, 1), (0, 1), (0, 1), (1, 4)]));
        let a3 = make_group(Family::Ad, 3).unwrap();
        let tau = Permutation::parse("(0 1)", Some(3)).unwrap();
        let coset = indicatrix(&make_coset(&tau, &a3).unwrap()).unwrap();
        assert_eq!(coset, IndicatrixPolynomial::identity());
        assert_eq!(coset.to_string(), "x");
        assert!(!coset.has_fixed_point_free_element());
        assert!(s3.has_fixed_point_free_element());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            closed_form_indicatrix(Family::Sd, 3).unwrap(),
            poly(&[(1, 3), (1, 2), (0, 1), (1, 6)])
        );
        assert_eq!(
            closed_form_indicatrix(Family::Ad, 4).unwrap(),
            poly(&[(1, 4), (2, 3), (0, 1), (0, 1), (1, 12)])
        );
        assert_eq!(
            closed_form_indicatrix(Family::Dd, 4).unwrap(),
            poly(&[(5, 8), (0, 1), (1, 4), (0, 1), (1, 8)])
        );
        // A_2 is trivial on two points, A_3 is cyclic
        assert_eq!(
            closed_form_indicatrix(Family::Ad, 2).unwrap(),
            poly(&[(0, 1), (0, 1), (1, 1)])
        );
        assert_eq!(
            closed_form_indicatrix(Family::Ad, 3).unwrap(),
            closed_form_indicatrix(Family::Cd, 3).unwrap()
        );
        for f in [Family::Sd, Family::Ad, Family::Cd, Family::Dd] {
            let phi = closed_form_indicatrix(f, 64).unwrap();
            assert!(phi.is_distribution(), "{f:?}");
        }
        assert!(closed_form_indicatrix(Family::Sd, 65).is_err());
        assert!(closed_form_indicatrix(Family::Dd, 2).is_err());
    }

    #[test]
    fn composition() {
        let c2 = closed_form_indicatrix(Family::Cd, 2).unwrap();
        let cc = c2.compose(&c2, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(cc, closed_form_indicatrix(Family::Dd, 4).unwrap());
        assert_eq!(cc.eval(&BigRational::zero()), rat(5, 8));
        let s3 = closed_form_indicatrix(Family::Sd, 3).unwrap();
        assert_eq!(
            s3.compose(&IndicatrixPolynomial::identity(), DEFAULT_BIT_BUDGET)
                .unwrap(),
            s3
        );
        assert_eq!(
            IndicatrixPolynomial::identity()
                .compose(&s3, DEFAULT_BIT_BUDGET)
                .unwrap(),
            s3
        );
        assert_eq!(
            s3.compose(&s3, 8),
            Err(GroupError::CoefficientBudgetExceeded(8))
        );
    }

    #[test]
    fn derivatives() {
        let inv = |f, d| {
            closed_form_indicatrix(f, d)
                .unwrap()
                .derivative_invariants()
        };
        assert_eq!(inv(Family::Cd, 5), (rat(1, 1), rat(4, 1)));
        assert_eq!(inv(Family::Sd, 4), (rat(1, 1), rat(1, 1)));
        assert_eq!(inv(Family::Dd, 6), (rat(1, 1), rat(3, 1)));
        assert_eq!(inv(Family::Dd, 7), (rat(1, 1), rat(3, 1)));
    }

    #[test]
    fn interval_evaluation_encloses_exact() {
        let s5 = closed_form_indicatrix(Family::Sd, 5).unwrap();
        for k in 0..=10 {
            let x = rat(k, 10);
            let exact = Interval::from_rational(&s5.eval(&x), 256);
            let enclosed = s5.eval_interval(&Interval::from_rational(&x, 256));
            assert!(enclosed.lo_f64() <= exact.hi_f64() && exact.lo_f64() <= enclosed.hi_f64());
        }
    }

    #[test]
    fn integer_form() {
        let (num, den) = closed_form_indicatrix(Family::Sd, 3)
            .unwrap()
            .integer_form();
        assert_eq!(den, BigInt::from(6));
        assert_eq!(num, [2, 3, 0, 1].map(BigInt::from).to_vec());
    }
}
