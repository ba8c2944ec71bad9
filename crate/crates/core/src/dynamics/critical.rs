use std::collections::HashMap;

use serde::Serialize;

use super::{DynamicsError, FunctionalGraph, RationalMap};
use crate::ffield::ProjectivePoint;

/// Up to this modulus critical points are found by scanning every residue.
const SCAN_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    pub point: u64,
    /// Order of vanishing of the Wronskian `f'g − fg'` at `point`.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPoints {
    pub points: Vec<CriticalPoint>,
    /// Ramification index at `∞` minus one; zero when `∞` is not critical.
    pub infinity_multiplicity: usize,
    /// Set when `p ≤ d`: multiplicities read off the Wronskian are then
    /// unreliable.
    pub characteristic_too_small: bool,
}

impl CriticalPoints {
    pub fn infinity_is_critical(&self) -> bool {
        self.infinity_multiplicity > 0
    }

    /// Standard sufficient condition for tame ramification: `p > d` and `p`
    /// divides no ramification index `multiplicity + 1`.
    pub fn tame_advisory(&self, p: u64, degree: usize) -> bool {
        if p <= degree as u64 {
            return false;
        }
        self.points
            .iter()
            .map(|c| c.multiplicity)
            .chain((self.infinity_multiplicity > 0).then_some(self.infinity_multiplicity))
            .all(|m| !(m as u64 + 1).is_multiple_of(p))
    }
}

/// Finite critical points of `φ = f/g` with multiplicities, plus the
/// ramification at `∞`.
pub fn critical_points(map: &RationalMap) -> Result<CriticalPoints, DynamicsError> {
    let k = map.field();
    let (f, g) = (map.numerator(), map.denominator());
    let wronskian = f
        .derivative(k)
        .mul(g, k)
        .sub(&f.mul(&g.derivative(k), k), k);
    if wronskian.is_zero() {
        return Err(DynamicsError::InseparableMap);
    }
    let p = k.modulus();
    let roots: Vec<u64> = if p <= SCAN_LIMIT {
        (0..p).filter(|&x| wronskian.eval(k, x) == 0).collect()
    } else {
        wronskian.roots(k)
    };
    let points = roots
        .into_iter()
        .map(|r| CriticalPoint {
            point: r,
            multiplicity: wronskian.root_multiplicity(k, r).unwrap_or(0),
        })
        .collect();

    let df = f.degree().unwrap_or(0);
    let dg = g.degree().unwrap_or(0);
    let d = map.degree();
    let e_inf = match df.cmp(&dg) {
        std::cmp::Ordering::Greater => df - dg,
        std::cmp::Ordering::Less => dg - df,
        std::cmp::Ordering::Equal => {
            // φ(∞) = a; local degree is d − deg(f − a·g)
            let a = k.mul(f.leading(), k.inv(g.leading()).expect("nonzero"));
            let diff = f.sub(&g.scale(a, k), k);
            d - diff.degree().unwrap_or(0)
        }
    };

    Ok(CriticalPoints {
        points,
        infinity_multiplicity: e_inf.saturating_sub(1),
        characteristic_too_small: p <= d as u64,
    })
}

/// A coincidence `φⁿ(a) = φᵐ(b)` between critical orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub a: u64,
    pub n: usize,
    pub b: u64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub critical: CriticalPoints,
    /// `orbit_table[i][k − 1] = φᵏ(cᵢ)` for `k = 1..=n_max`.
    pub orbit_table: Vec<Vec<ProjectivePoint>>,
    /// The collision with the smallest larger index, if any.
    pub first_collision: Option<Collision>,
    /// Largest `N` for which no collision has both indices `≤ N`.
    pub certified_to: usize,
    pub n_max: usize,
    /// Filled in when the caller has a functional graph at hand.
    pub bijective: Option<bool>,
}

impl OrbitReport {
    pub fn with_graph(mut self, graph: &FunctionalGraph) -> Self {
        self.bijective = Some(graph.is_bijection());
        self
    }

    pub fn is_separated(&self) -> bool {
        self.first_collision.is_none()
    }
}

/// Checks `φⁿ(a) ≠ φᵐ(b)` for finite critical points `a, b` and
/// `1 ≤ n, m ≤ n_max` unless `(a, n) = (b, m)`.
pub fn check_orbit_separation(
    map: &RationalMap,
    n_max: usize,
) -> Result<OrbitReport, DynamicsError> {
    let critical = critical_points(map)?;
    let mut orbit_table: Vec<Vec<ProjectivePoint>> =
        vec![Vec::with_capacity(n_max); critical.points.len()];
    let mut current: Vec<ProjectivePoint> = critical
        .points
        .iter()
        .map(|c| ProjectivePoint::Affine(c.point))
        .collect();
    let mut seen: HashMap<ProjectivePoint, (u64, usize)> = HashMap::new();
    let mut first_collision = None;
    for level in 1..=n_max {
        for (i, c) in critical.points.iter().enumerate() {
            let v = map.evaluate(current[i]);
            current[i] = v;
            orbit_table[i].push(v);
            if first_collision.is_none() {
                if let Some(&(b, m)) = seen.get(&v) {
                    first_collision = Some(Collision {
                        a: c.point,
                        n: level,
                        b,
                        m,
                    });
                } else {
                    seen.insert(v, (c.point, level));
                }
            }
        }
    }
    let certified_to = first_collision.map_or(n_max, |c| c.n - 1);
    Ok(OrbitReport {
        critical,
        orbit_table,
        first_collision,
        certified_to,
        n_max,
        bijective: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapSpec;
    use crate::ffield::ProjectivePoint::Affine;

    fn map(s: &str) -> RationalMap {
        s.parse::<MapSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn quadratic_critical_point() {
        let c = critical_points(&map("p=5; num=1,0,1")).unwrap();
        assert_eq!(
            c.points,
            vec![CriticalPoint {
                point: 0,
                multiplicity: 1
            }]
        );
        assert!(c.infinity_is_critical());
        assert_eq!(c.infinity_multiplicity, 1);
        assert!(c.tame_advisory(5, 2));
    }

    #[test]
    fn odoni_family_cubic() {
        // 2x^3 + 6x^2: φ' = 6x(x + 2)
        for p in [5u64, 7, 101, 1_000_003] {
            let c = critical_points(&map(&format!("p={p}; num=0,0,6,2"))).unwrap();
            let pts: Vec<_> = c.points.iter().map(|c| (c.point, c.multiplicity)).collect();
            assert_eq!(pts, vec![(0, 1), (p - 2, 1)], "p={p}");
            assert_eq!(c.infinity_multiplicity, 2);
        }
        // x^3 has a double critical point at 0
        let c = critical_points(&map("p=7; num=0,0,0,1")).unwrap();
        assert_eq!(
            c.points,
            vec![CriticalPoint {
                point: 0,
                multiplicity: 2
            }]
        );
        // and for p = 3 its ramification index 3 is wild
        assert!(!c.tame_advisory(3, 3));
    }

    #[test]
    fn large_prime_uses_root_finding() {
        let p = 1_000_000_007u64;
        let c = critical_points(&map(&format!("p={p}; num=0,0,6,2"))).unwrap();
        let pts: Vec<_> = c.points.iter().map(|c| c.point).collect();
        assert_eq!(pts, vec![0, p - 2]);
    }

    #[test]
    fn inseparable_and_small_characteristic() {
        assert_eq!(
            critical_points(&map("p=5; num=0,0,0,0,0,1")),
            Err(DynamicsError::InseparableMap)
        );
        let c = critical_points(&map("p=3; num=1,1,0,1,1")).unwrap();
        assert!(c.characteristic_too_small);
    }

    #[test]
    fn rational_map_infinity() {
        // x + 1/x = (x^2 + 1)/x over F_11: ∞ ↦ ∞ unramified, critical points ±1
        let c = critical_points(&map("p=11; num=1,0,1; den=0,1")).unwrap();
        assert_eq!(c.infinity_multiplicity, 0);
        let pts: Vec<_> = c.points.iter().map(|c| c.point).collect();
        assert_eq!(pts, vec![1, 10]);
        // 1/x^2: ∞ ↦ 0 with local degree 2
        let c = critical_points(&map("p=11; num=1; den=0,0,1")).unwrap();
        assert_eq!(c.infinity_multiplicity, 1);
        assert_eq!(
            c.points,
            vec![CriticalPoint {
                point: 0,
                multiplicity: 1
            }]
        );
    }

    #[test]
    fn separation_mod_5() {
        let m = map("p=5; num=1,0,1");
        let r = check_orbit_separation(&m, 2).unwrap();
        assert!(r.is_separated());
        assert_eq!(r.orbit_table, vec![vec![Affine(1), Affine(2)]]);
        let r = check_orbit_separation(&m, 4).unwrap();
        assert_eq!(
            r.first_collision,
            Some(Collision {
                a: 0,
                n: 4,
                b: 0,
                m: 1
            })
        );
        assert_eq!(r.certified_to, 3);
    }

    #[test]
    fn separation_large_prime() {
        // integer orbit of 0 is 1, 2, 5, 26: all distinct below any p > 26
        for p in [677u64, 1009, 1_000_003] {
            let r = check_orbit_separation(&map(&format!("p={p}; num=1,0,1")), 4).unwrap();
            assert!(r.is_separated(), "p={p}");
            assert_eq!(r.certified_to, 4);
        }
    }

    #[test]
    fn fixed_critical_point_collides() {
        // 0 is a fixed critical point of x^2: φ¹(0) = φ²(0)
        let r = check_orbit_separation(&map("p=7; num=0,0,1"), 3).unwrap();
        assert_eq!(
            r.first_collision,
            Some(Collision {
                a: 0,
                n: 2,
                b: 0,
                m: 1
            })
        );
        assert_eq!(r.certified_to, 1);
    }
}
