use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    closed_form_indicatrix, fpp_sequence, Family, FppValue, GroupError, IndicatrixPolynomial,
};
use crate::interval::Real;
use crate::ratio;

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    /// Decimal value of the bound.
    pub value: String,
    pub strict: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub fpp: FppValue,
    pub lower: Option<BoundCheck>,
    pub upper: BoundCheck,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub family: Family,
    pub d: usize,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

fn check(fpp: &Real, bound: Real, strict: bool, below: bool) -> BoundCheck {
    let holds = match (below, strict) {
        (true, true) => bound.lt(fpp),
        (true, false) => bound.le(fpp),
        (false, true) => fpp.lt(&bound),
        (false, false) => fpp.le(&bound),
    };
    BoundCheck {
        value: bound.to_decimal(20),
        strict,
        holds,
    }
}

/// Checks the two-sided fixed-point-proportion bounds for `[family_d]ⁿ`,
/// `n = 1..=n_max`, with natural logarithms and rigorous comparisons.
///
/// * `C_d`: `2/((d−1)(n+4+ln n)) < FPP < 2/((d−1)(n+1))`
/// * `S_d`: `2/(n+4+ln n) ≤ FPP < 2/(n+2)`
/// * `A_4`: `2/(n+2) < FPP < 2/(n+1−ln n)`
/// * `A_d`, `d ≥ 5`: `2/(n+4+ln n) ≤ FPP < 2/(n+2)`
/// * `D_d`: `FPP < 2/(n+2)`
pub fn verify_fpp_bounds(
    family: Family,
    d: usize,
    n_max: usize,
    bit_budget: u64,
) -> Result<BoundReport, GroupError> {
    if family == Family::Ad && d < 4 {
        return Err(GroupError::ParameterOutOfRange(
            "the A_d bounds cover d ≥ 4".into(),
        ));
    }
    let phi = closed_form_indicatrix(family, d)?;
    let seq = fpp_sequence(&phi, n_max, bit_budget);
    let two = Real::int(2);
    let rows = seq
        .into_iter()
        .map(|fpp| {
            let n = fpp.n as i64;
            let value = match &fpp.exact {
                Some(r) => Real::Exact(r.clone()),
                None => Real::Approx(fpp.enclosure.clone()),
            };
            let ln_n = Real::ln_int(fpp.n as u64);
            let slow = Real::int(n + 4).add(&ln_n);
            let (lower, upper) = match (family, d) {
                (Family::Cd, _) => {
                    let c = Real::int(d as i64 - 1);
                    (
                        Some(check(&value, two.div(&c.mul(&slow)), true, true)),
                        check(&value, two.div(&c.mul(&Real::int(n + 1))), true, false),
                    )
                }
                (Family::Ad, 4) => (
                    Some(check(&value, two.div(&Real::int(n + 2)), true, true)),
                    check(&value, two.div(&Real::int(n + 1).sub(&ln_n)), true, false),
                ),
                (Family::Sd | Family::Ad, _) => (
                    Some(check(&value, two.div(&slow), false, true)),
                    check(&value, two.div(&Real::int(n + 2)), true, false),
                ),
                (Family::Dd, _) => (None, check(&value, two.div(&Real::int(n + 2)), true, false)),
            };
            let pass = upper.holds && lower.as_ref().is_none_or(|l| l.holds);
            BoundRow {
                n: fpp.n,
                fpp,
                lower,
                upper,
                pass,
            }
        })
        .collect();
    Ok(BoundReport { family, d, rows })
}

/// The pointwise comparisons between indicatrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Lemma {
    /// `Φ_{S_d} ≤ Φ_{S_k}` for even `k`, `≥` for odd `k`; `d > k ≥ 1`.
    Scompare { d: usize, k: usize },
    /// `Φ_{A_d} ≥ Φ_{A_k}` for even `k`, `≤` for odd `k`; `d > k ≥ 2`.
    Acompare { d: usize, k: usize },
    /// `Φ_{D_d} ≥ Φ_{D_k}` for `d > k ≥ 3` of equal parity, or `d = k + 1`
    /// with `k` odd.
    Dcompare { d: usize, k: usize },
    /// `Φⁿ ≤ Ψⁿ`, non-strict.
    Ncompare {
        phi: IndicatrixPolynomial,
        psi: IndicatrixPolynomial,
        n: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "ratio::serialize")]
    pub x: BigRational,
    #[serde(serialize_with = "ratio::serialize")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ratio::serialize")]
    pub rhs: BigRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub lemma: String,
    pub points_checked: usize,
    pub pass: bool,
    pub witness: Option<Witness>,
}

/// `Φ_k` for the symmetric or alternating family, with `Φ_1(x) = x`.
fn family_member(family: Family, k: usize) -> Result<IndicatrixPolynomial, GroupError> {
    if k == 1 && family == Family::Sd {
        Ok(IndicatrixPolynomial::identity())
    } else {
        closed_form_indicatrix(family, k)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Relation {
    /// lhs < rhs on [0, 1), equal at 1
    Below,
    /// lhs > rhs on [0, 1), equal at 1
    Above,
    /// lhs ≤ rhs everywhere
    AtMost,
}

/// Checks a comparison lemma at the exact grid points `0, step, 2·step, …, 1`.
pub fn verify_domination(
    lemma: &Lemma,
    step: &BigRational,
) -> Result<DominationReport, GroupError> {
    if *step <= BigRational::zero() {
        return Err(GroupError::ParameterOutOfRange(
            "grid step must be positive".into(),
        ));
    }
    let out_of_range = |msg: String| Err(GroupError::ParameterOutOfRange(msg));
    let (name, lhs, rhs, relation, iterations) = match lemma {
        Lemma::Scompare { d, k } => {
            if !(d > k && *k >= 1) {
                return out_of_range(format!("Scompare needs d > k ≥ 1, got d={d}, k={k}"));
            }
            let rel = if k % 2 == 0 {
                Relation::Below
            } else {
                Relation::Above
            };
            let lhs = family_member(Family::Sd, *d)?;
            let rhs = family_member(Family::Sd, *k)?;
            (format!("Scompare(d={d}, k={k})"), lhs, rhs, rel, 1)
        }
        Lemma::Acompare { d, k } => {
            if !(d > k && *k >= 2) {
                return out_of_range(format!("Acompare needs d > k ≥ 2, got d={d}, k={k}"));
            }
            let rel = if k % 2 == 0 {
                Relation::Above
            } else {
                Relation::Below
            };
            let lhs = family_member(Family::Ad, *d)?;
            let rhs = family_member(Family::Ad, *k)?;
            (format!("Acompare(d={d}, k={k})"), lhs, rhs, rel, 1)
        }
        Lemma::Dcompare { d, k } => {
            let same_parity = d > k && (d - k) % 2 == 0;
            let successor = *d == k + 1 && k % 2 == 1;
            if *k < 3 || !(same_parity || successor) {
                return out_of_range(format!("Dcompare does not cover d={d}, k={k}"));
            }
            let lhs = closed_form_indicatrix(Family::Dd, *d)?;
            let rhs = closed_form_indicatrix(Family::Dd, *k)?;
            (
                format!("Dcompare(d={d}, k={k})"),
                lhs,
                rhs,
                Relation::Above,
                1,
            )
        }
        Lemma::Ncompare { phi, psi, n } => {
            if *n == 0 {
                return out_of_range("ncompare needs n ≥ 1".into());
            }
            (
                format!("ncompare(n={n})"),
                phi.clone(),
                psi.clone(),
                Relation::AtMost,
                *n,
            )
        }
    };

    let iterate = |p: &IndicatrixPolynomial, x: &BigRational| {
        (0..iterations).fold(x.clone(), |y, _| p.eval(&y))
    };
    let one = BigRational::one();
    let mut x = BigRational::zero();
    let mut checked = 0;
    loop {
        let at_end = x >= one;
        let x_eval = if at_end { one.clone() } else { x.clone() };
        let (a, b) = (iterate(&lhs, &x_eval), iterate(&rhs, &x_eval));
        checked += 1;
        let ok = match (relation, at_end) {
            (Relation::AtMost, _) => a <= b,
            (_, true) => a == b,
            (Relation::Below, false) => a < b,
            (Relation::Above, false) => a > b,
        };
        if !ok {
            return Ok(DominationReport {
                lemma: name,
                points_checked: checked,
                pass: false,
                witness: Some(Witness {
                    x: x_eval,
                    lhs: a,
                    rhs: b,
                }),
            });
        }
        if at_end {
            break;
        }
        x += step;
    }
    Ok(DominationReport {
        lemma: name,
        points_checked: checked,
        pass: true,
        witness: None,
    })
}

/// `1/100`, the default grid.
pub fn default_grid_step() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(100))
}
