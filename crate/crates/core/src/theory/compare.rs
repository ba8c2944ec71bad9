use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use super::bounds::{predicted_image_interval, BoundParameters, PredictedImage, DEFAULT_M};
use super::TheoryError;
use crate::dynamics::{build_graph, check_orbit_separation, RationalMap};
use crate::groups::{
    closed_form_indicatrix, fpp_sequence, indicatrix, make_coset, make_group, Family, FppValue,
    IndicatrixPolynomial, Permutation, PermutationSet, DEFAULT_BIT_BUDGET,
};
use crate::interval::Real;
use crate::ratio;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum GroupHypothesis {
    Family(Family, usize),
    Explicit(PermutationSet),
}

/// The group under which predictions are made, optionally shifted to the
/// coset `τG` when the constant field grows.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub group: GroupHypothesis,
    pub coset: Option<Permutation>,
}

impl Hypothesis {
    pub fn family(family: Family, d: usize) -> Self {
        Self {
            group: GroupHypothesis::Family(family, d),
            coset: None,
        }
    }

    pub fn degree(&self) -> usize {
        match &self.group {
            GroupHypothesis::Family(_, d) => *d,
            GroupHypothesis::Explicit(set) => set.degree(),
        }
    }

    pub fn label(&self) -> String {
        let g = match &self.group {
            GroupHypothesis::Family(f, d) => format!("{}{d}", f.name()),
            GroupHypothesis::Explicit(set) => {
                format!("<{} elements of degree {}>", set.len(), set.degree())
            }
        };
        match &self.coset {
            None => format!("[{g}]^n"),
            Some(tau) => format!("coset {tau}·[{g}]^n"),
        }
    }

    fn order(&self) -> BigInt {
        match &self.group {
            GroupHypothesis::Explicit(set) => BigInt::from(set.len()),
            GroupHypothesis::Family(f, d) => {
                let fact = (1..=*d).fold(BigInt::from(1), |acc, k| acc * k);
                match f {
                    Family::Sd => fact,
                    Family::Ad => fact / 2u32,
                    Family::Cd => BigInt::from(*d),
                    Family::Dd => BigInt::from(2 * d),
                }
            }
        }
    }

    fn indicatrix(&self) -> Result<IndicatrixPolynomial, TheoryError> {
        let group = match (&self.group, &self.coset) {
            (GroupHypothesis::Family(f, d), None) => return Ok(closed_form_indicatrix(*f, *d)?),
            (GroupHypothesis::Explicit(set), None) => return Ok(indicatrix(set)?),
            (GroupHypothesis::Family(f, d), Some(_)) => make_group(*f, *d)?,
            (GroupHypothesis::Explicit(set), Some(_)) => set.clone(),
        };
        Ok(indicatrix(&make_coset(
            self.coset.as_ref().unwrap(),
            &group,
        )?)?)
    }
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// Allowed `|ratio − FPP_n|` for the empirical check.
    pub tolerance: f64,
    pub m_const: BigRational,
    pub bit_budget: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.02,
            m_const: BigRational::from_integer(DEFAULT_M.into()),
            bit_budget: DEFAULT_BIT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonFlags {
    pub hypothesis: String,
    /// No constant-field extension assumed; false when a coset was supplied.
    pub geometric: bool,
    pub degree_matches: bool,
    /// Critical orbits are separated for every iterate up to this one.
    pub orbit_certified_to: usize,
    pub tame_advisory: bool,
    pub bijective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub image_size: u64,
    #[serde(serialize_with = "ratio::serialize")]
    pub ratio: BigRational,
    pub fpp: FppValue,
    /// `|ratio − FPP_n|`.
    pub deviation: f64,
    /// `None` when `m_n` is beyond the bit budget; such rows are vacuous.
    pub prediction: Option<PredictedImage>,
    pub vacuous: bool,
    pub within_radius: Option<bool>,
    pub within_tolerance: bool,
    pub theory_applicable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub map: String,
    pub p: u64,
    pub n_max: usize,
    pub tolerance: f64,
    pub flags: ComparisonFlags,
    pub rows: Vec<ComparisonRow>,
}

/// Image densities of `φⁿ` against `FPP_n` of the hypothesised iterated
/// wreath product, with the effective error radius and the hypothesis flags
/// that decide whether a row is covered by theory. The group is never
/// checked; the report records what was assumed.
pub fn compare(
    map: &RationalMap,
    hypothesis: &Hypothesis,
    n_max: usize,
    options: &CompareOptions,
) -> Result<ComparisonReport, TheoryError> {
    if n_max == 0 {
        return Err(TheoryError::ParameterOutOfRange(
            "iterate count must be ≥ 1".into(),
        ));
    }
    let (empirical, predicted) = rayon::join(
        || -> Result<_, TheoryError> {
            let graph = build_graph(map)?;
            let sizes = graph.image_sizes(n_max)?;
            let orbits = check_orbit_separation(map, n_max)?.with_graph(&graph);
            Ok((sizes, orbits))
        },
        || -> Result<_, TheoryError> {
            let phi = hypothesis.indicatrix()?;
            Ok(fpp_sequence(&phi, n_max, options.bit_budget))
        },
    );
    let (sizes, orbits) = empirical?;
    let fpps = predicted?;

    let p = map.field().modulus();
    let d = map.degree();
    let flags = ComparisonFlags {
        hypothesis: hypothesis.label(),
        geometric: hypothesis.coset.is_none(),
        degree_matches: hypothesis.degree() == d,
        orbit_certified_to: orbits.certified_to,
        tame_advisory: orbits.critical.tame_advisory(p, d),
        bijective: orbits.bijective.unwrap_or(false),
    };
    let order = hypothesis.order();
    let q = BigInt::from(p);
    let points = BigInt::from(p + 1);
    let mut rows = Vec::with_capacity(n_max);
    for (i, fpp) in fpps.into_iter().enumerate() {
        let n = i + 1;
        let image_size = sizes[i];
        let ratio = BigRational::new(BigInt::from(image_size), points.clone());
        let deviation = match &fpp.exact {
            Some(f) => ratio::to_f64(&(&ratio - f).abs()),
            None => (ratio::to_f64(&ratio) - fpp.to_f64()).abs(),
        };
        let prediction = match BoundParameters::new(&order, d as u64, n as u32, options.bit_budget)
        {
            Ok(params) => Some(predicted_image_interval(
                &fpp,
                &params.with_m(options.m_const.clone()),
                &q,
            )?),
            Err(TheoryError::BudgetExceeded(_)) => None,
            Err(e) => return Err(e),
        };
        let within_radius = prediction.as_ref().map(|pred| {
            let diff = Real::int(image_size as i64).sub(&pred.center);
            let abs = match &diff {
                Real::Exact(r) => Real::Exact(r.abs()),
                Real::Approx(_) if diff.lt(&Real::int(0)) => Real::int(0).sub(&diff),
                Real::Approx(_) => diff,
            };
            abs.le(&pred.radius)
        });
        rows.push(ComparisonRow {
            n,
            image_size,
            ratio,
            vacuous: prediction.as_ref().is_none_or(|pred| pred.vacuous),
            within_tolerance: deviation < options.tolerance,
            theory_applicable: n <= flags.orbit_certified_to
                && flags.tame_advisory
                && !flags.bijective
                && flags.degree_matches,
            fpp,
            deviation,
            prediction,
            within_radius,
        });
    }
    Ok(ComparisonReport {
        schema_version: SCHEMA_VERSION,
        map: map.to_spec(),
        p,
        n_max,
        tolerance: options.tolerance,
        flags,
        rows,
    })
}

impl ComparisonReport {
    pub fn all_within_tolerance(&self) -> bool {
        self.rows.iter().all(|r| r.within_tolerance)
    }

    pub fn applicable_rows(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.theory_applicable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapSpec;
    use crate::theory::shao_mu;

    fn map(s: &str) -> RationalMap {
        s.parse::<MapSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn small_field_rows() {
        let r = compare(
            &map("p=5; num=1,0,1"),
            &Hypothesis::family(Family::Sd, 2),
            3,
            &CompareOptions::default(),
        )
        .unwrap();
        let sizes: Vec<u64> = r.rows.iter().map(|r| r.image_size).collect();
        assert_eq!(sizes, vec![4, 4, 4]);
        assert_eq!(r.rows[0].ratio, ratio::rat(2, 3));
        assert_eq!(r.flags.orbit_certified_to, 3);
        assert!(r.flags.tame_advisory && !r.flags.bijective && r.flags.geometric);
        assert_eq!(r.rows[2].fpp.exact, Some(shao_mu(3)));
        assert_eq!(r.flags.hypothesis, "[S2]^n");

        let r = compare(
            &map("p=5; num=1,0,1"),
            &Hypothesis::family(Family::Sd, 2),
            5,
            &CompareOptions::default(),
        )
        .unwrap();
        assert_eq!(r.flags.orbit_certified_to, 3);
        let applicable: Vec<usize> = r.applicable_rows().map(|r| r.n).collect();
        assert_eq!(applicable, vec![1, 2, 3]);
    }

    #[test]
    fn bijection_is_rejected() {
        // x^3 permutes F_5 since gcd(3, 4) = 1
        let r = compare(
            &map("p=5; num=0,0,0,1"),
            &Hypothesis::family(Family::Sd, 3),
            2,
            &CompareOptions::default(),
        )
        .unwrap();
        assert!(r.flags.bijective);
        assert_eq!(r.applicable_rows().count(), 0);
    }

    #[test]
    fn medium_prime() {
        let r = compare(
            &map("p=10007; num=1,0,1"),
            &Hypothesis::family(Family::Sd, 2),
            5,
            &CompareOptions::default(),
        )
        .unwrap();
        for row in &r.rows {
            assert!(row.within_tolerance, "n={} dev={}", row.n, row.deviation);
        }
        assert!(!r.rows[0].vacuous && r.rows[0].within_radius == Some(true));
        assert!(r.rows[4].vacuous);
        assert_eq!(
            (r.rows[0].image_size, r.rows[0].ratio.clone()),
            (5005, ratio::rat(5005, 10008))
        );
    }

    #[test]
    fn coset_hypothesis() {
        let h = Hypothesis {
            group: GroupHypothesis::Family(Family::Ad, 3),
            coset: Some(Permutation::parse("(0 1)", Some(3)).unwrap()),
        };
        let r = compare(&map("p=11; num=0,0,0,1"), &h, 2, &CompareOptions::default()).unwrap();
        assert!(!r.flags.geometric);
        assert!(r.flags.hypothesis.starts_with("coset (0 1)"));
        assert_eq!(r.rows[0].fpp.exact, Some(ratio::rat(1, 1)));
    }
}
