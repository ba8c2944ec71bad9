use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::DynamicsError;
use crate::ffield::{PrimeField, ProjectivePoint};
use crate::polyfp::PolyFp;

/// A rational map `φ = f/g` over `F_p`, acting on `P¹(F_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    field: PrimeField,
    num: PolyFp,
    den: PolyFp,
    degree: usize,
    // inverse of a constant denominator
    den_inv: Option<u64>,
}

impl RationalMap {
    /// Builds `f/g` from reduced coefficient lists (constant term first).
    ///
    /// The nominal degree of each list is its length minus one; a leading
    /// coefficient that vanishes mod `p` is rejected rather than silently
    /// lowering the degree.
    pub fn new(field: PrimeField, num: &[u64], den: &[u64]) -> Result<Self, DynamicsError> {
        for (name, cs) in [("numerator", num), ("denominator", den)] {
            if let Some(&lead) = cs.last() {
                if lead % field.modulus() == 0 && cs.len() > 1 {
                    return Err(DynamicsError::DegreeDrop {
                        part: name,
                        p: field.modulus(),
                    });
                }
            }
        }
        let reduce = |cs: &[u64]| cs.iter().map(|&c| c % field.modulus()).collect::<Vec<_>>();
        let num = PolyFp::from_coeffs(reduce(num));
        let den = PolyFp::from_coeffs(reduce(den));
        if den.is_zero() {
            return Err(DynamicsError::ZeroDenominator);
        }
        let common = num.gcd(&den, &field);
        if common.degree().unwrap_or(0) > 0 {
            return Err(DynamicsError::DegenerateMap);
        }
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        if degree == 0 {
            return Err(DynamicsError::ConstantMap);
        }
        let den_inv = (den.degree() == Some(0)).then(|| field.inv(den.leading()).unwrap());
        Ok(Self {
            field,
            num,
            den,
            degree,
            den_inv,
        })
    }

    /// Polynomial map with signed integer coefficients, reduced mod `p`.
    pub fn polynomial(field: PrimeField, coeffs: &[i64]) -> Result<Self, DynamicsError> {
        let reduced: Vec<u64> = coeffs.iter().map(|&c| field.reduce(c as i128)).collect();
        Self::new(field, &reduced, &[1])
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn numerator(&self) -> &PolyFp {
        &self.num
    }

    pub fn denominator(&self) -> &PolyFp {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Projective evaluation.
    pub fn evaluate(&self, pt: ProjectivePoint) -> ProjectivePoint {
        let k = &self.field;
        match pt {
            ProjectivePoint::Affine(x) => {
                let g = self.den.eval(k, x);
                if g == 0 {
                    return ProjectivePoint::Infinity;
                }
                let f = self.num.eval(k, x);
                let g_inv = match self.den_inv {
                    Some(c) => c,
                    None => k.inv(g).expect("nonzero"),
                };
                ProjectivePoint::Affine(k.mul(f, g_inv))
            }
            ProjectivePoint::Infinity => self.value_at_infinity(),
        }
    }

    pub fn value_at_infinity(&self) -> ProjectivePoint {
        let df = self.num.degree();
        let dg = self.den.degree();
        match df.cmp(&dg) {
            std::cmp::Ordering::Greater => ProjectivePoint::Infinity,
            std::cmp::Ordering::Less => ProjectivePoint::Affine(0),
            std::cmp::Ordering::Equal => {
                let k = &self.field;
                ProjectivePoint::Affine(
                    k.mul(self.num.leading(), k.inv(self.den.leading()).unwrap()),
                )
            }
        }
    }

    /// `φ^n(pt)`
    pub fn iterate(&self, pt: ProjectivePoint, n: usize) -> ProjectivePoint {
        (0..n).fold(pt, |x, _| self.evaluate(x))
    }

    /// All `x ∈ P¹(F_p)` with `φ(x) = target`, sorted.
    pub fn preimages(&self, target: ProjectivePoint) -> Vec<ProjectivePoint> {
        let k = &self.field;
        let mut out: Vec<ProjectivePoint> = match target {
            // poles of φ: roots of g
            ProjectivePoint::Infinity => self.den.roots(k),
            ProjectivePoint::Affine(a) => {
                // roots of f − a·g; common roots with g are impossible since gcd(f, g) = 1
                self.num.sub(&self.den.scale(a, k), k).roots(k)
            }
        }
        .into_iter()
        .map(ProjectivePoint::Affine)
        .collect();
        if self.value_at_infinity() == target {
            out.push(ProjectivePoint::Infinity);
        }
        out
    }

    /// `p=<prime>; num=<c0,...>; den=<c0,...>`
    pub fn to_spec(&self) -> String {
        let join = |p: &PolyFp| {
            if p.is_zero() {
                "0".to_string()
            } else {
                p.coeffs()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            }
        };
        let mut s = format!("p={}; num={}", self.field.modulus(), join(&self.num));
        if !(self.is_polynomial() && self.den.leading() == 1) {
            s.push_str(&format!("; den={}", join(&self.den)));
        }
        s
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_spec())
    }
}

impl Serialize for RationalMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_spec())
    }
}

/// Parsed `num`/`den` coefficient lists before a prime is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTemplate {
    pub num: Vec<i128>,
    pub den: Vec<i128>,
}

impl MapTemplate {
    pub fn instantiate(&self, field: PrimeField) -> Result<RationalMap, DynamicsError> {
        let red = |cs: &[i128]| cs.iter().map(|&c| field.reduce(c)).collect::<Vec<_>>();
        RationalMap::new(field, &red(&self.num), &red(&self.den))
    }

    /// The integer coefficients when the template is a polynomial (denominator 1).
    pub fn integer_polynomial(&self) -> Option<Vec<i128>> {
        (self.den == [1]).then(|| self.num.clone())
    }
}

/// A parsed map description: optional prime plus coefficient template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    pub p: Option<u64>,
    pub template: MapTemplate,
}

impl MapSpec {
    pub fn build(&self) -> Result<RationalMap, DynamicsError> {
        let p = self.p.ok_or(DynamicsError::Parse("missing `p=`".into()))?;
        let field = PrimeField::new(p)?;
        self.template.instantiate(field)
    }
}

impl FromStr for MapSpec {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = None;
        let mut num = None;
        let mut den = None;
        for part in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| DynamicsError::Parse(format!("expected key=value, got `{part}`")))?;
            let value = value.trim();
            match key.trim() {
                "p" => {
                    let v = value
                        .parse::<u64>()
                        .map_err(|e| DynamicsError::Parse(format!("bad prime `{value}`: {e}")))?;
                    p = Some(v);
                }
                "num" => num = Some(parse_coeffs(value)?),
                "den" => den = Some(parse_coeffs(value)?),
                other => return Err(DynamicsError::Parse(format!("unknown key `{other}`"))),
            }
        }
        let num = num.ok_or_else(|| DynamicsError::Parse("missing `num=`".into()))?;
        Ok(Self {
            p,
            template: MapTemplate {
                num,
                den: den.unwrap_or_else(|| vec![1]),
            },
        })
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<i128>, DynamicsError> {
    let cs = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i128>()
                .map_err(|e| DynamicsError::Parse(format!("bad coefficient `{c}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if cs.is_empty() {
        return Err(DynamicsError::Parse("empty coefficient list".into()));
    }
    Ok(cs)
}
