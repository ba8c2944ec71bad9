use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_graph, DynamicsError, RationalMap};
use crate::ffield::ProjectivePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberMode {
    /// Walk the whole successor array.
    Exhaustive,
    /// Count preimages of `count` uniformly random affine targets.
    Sample { count: u64, seed: u64 },
}

/// Distribution of `#φ⁻ⁿ(y)` over affine targets `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberHistogram {
    pub n: usize,
    /// Fiber size → number of targets with that size.
    pub counts: BTreeMap<u64, u64>,
    /// Number of targets examined: `p` when exhaustive.
    pub targets: u64,
    /// `#φ⁻ⁿ(∞)`; `None` in sample mode.
    pub infinity_fiber: Option<u64>,
    /// Affine points sent to `∞` by `φⁿ`; `None` in sample mode.
    pub affine_to_infinity: Option<u64>,
}

impl FiberHistogram {
    pub fn proportion(&self, size: u64) -> f64 {
        self.counts.get(&size).copied().unwrap_or(0) as f64 / self.targets as f64
    }
}

pub fn fiber_histogram(
    map: &RationalMap,
    n: usize,
    mode: FiberMode,
) -> Result<FiberHistogram, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::ZeroIterate);
    }
    match mode {
        FiberMode::Exhaustive => exhaustive(map, n),
        FiberMode::Sample { count, seed } => sampled(map, n, count, seed),
    }
}

fn exhaustive(map: &RationalMap, n: usize) -> Result<FiberHistogram, DynamicsError> {
    let graph = build_graph(map)?;
    let len = graph.len();
    let inf = len - 1;
    // image[x] = φⁿ(x), advanced one step at a time
    let mut image: Vec<u32> = (0..len as u32).collect();
    for _ in 0..n {
        for v in image.iter_mut() {
            *v = graph.successor(*v as usize) as u32;
        }
    }
    let mut fiber = vec![0u64; len];
    for &y in &image {
        fiber[y as usize] += 1;
    }
    let mut counts = BTreeMap::new();
    for &size in &fiber[..inf] {
        *counts.entry(size).or_insert(0) += 1;
    }
    let affine_to_infinity = image[..inf].iter().filter(|&&y| y as usize == inf).count() as u64;
    Ok(FiberHistogram {
        n,
        counts,
        targets: inf as u64,
        infinity_fiber: Some(fiber[inf]),
        affine_to_infinity: Some(affine_to_infinity),
    })
}

/// Preimage counting backwards through `n` levels of root finding; cost
/// is governed by the fiber sizes, not by `p`.
fn sampled(
    map: &RationalMap,
    n: usize,
    count: u64,
    seed: u64,
) -> Result<FiberHistogram, DynamicsError> {
    let p = map.field().modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..count {
        let y = ProjectivePoint::Affine(rng.gen_range(0..p));
        let mut level = vec![y];
        for _ in 0..n {
            level = level.iter().flat_map(|&t| map.preimages(t)).collect();
        }
        *counts.entry(level.len() as u64).or_insert(0) += 1;
    }
    Ok(FiberHistogram {
        n,
        counts,
        targets: count,
        infinity_fiber: None,
        affine_to_infinity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapSpec;

    fn map(s: &str) -> RationalMap {
        s.parse::<MapSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn quadratic_mod_13() {
        let h = fiber_histogram(&map("p=13; num=1,0,1"), 1, FiberMode::Exhaustive).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(0, 6), (1, 1), (2, 6)]));
        assert_eq!(h.infinity_fiber, Some(1));
        assert_eq!(h.affine_to_infinity, Some(0));
    }

    #[test]
    fn bijection_fibers_are_singletons() {
        let h = fiber_histogram(&map("p=11; num=0,0,0,1"), 3, FiberMode::Exhaustive).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(1, 11)]));
        assert_eq!(h.proportion(1), 1.0);
    }

    #[test]
    fn fiber_mass_balance() {
        for s in [
            "p=31; num=3,0,1",
            "p=29; num=1,2; den=0,0,1",
            "p=17; num=1; den=0,1",
        ] {
            let m = map(s);
            for n in 1..4 {
                let h = fiber_histogram(&m, n, FiberMode::Exhaustive).unwrap();
                let mass: u64 = h.counts.iter().map(|(s, c)| s * c).sum();
                let p = m.field().modulus();
                assert_eq!(mass, p + 1 - h.infinity_fiber.unwrap(), "{s} n={n}");
                assert_eq!(h.targets, p);
            }
        }
    }

    #[test]
    fn sampling_agrees_with_exhaustive() {
        // with many samples every affine target is seen; compare per-target sizes
        let m = map("p=23; num=5,0,0,1; den=1,1");
        for n in 1..3 {
            let ex = fiber_histogram(&m, n, FiberMode::Exhaustive).unwrap();
            let graph = build_graph(&m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..50 {
                let y: u64 = rng.gen_range(0..23);
                let brute = (0..=23usize)
                    .filter(|&x| (0..n).fold(x, |z, _| graph.successor(z)) == y as usize)
                    .count();
                let mut level = vec![ProjectivePoint::Affine(y)];
                for _ in 0..n {
                    level = level.iter().flat_map(|&t| m.preimages(t)).collect();
                }
                assert_eq!(level.len(), brute);
            }
            let s = fiber_histogram(
                &m,
                n,
                FiberMode::Sample {
                    count: 2000,
                    seed: 1,
                },
            )
            .unwrap();
            for size in s.counts.keys() {
                assert!(ex.counts.contains_key(size), "n={n} size={size}");
            }
            for (size, c) in &ex.counts {
                let expect = *c as f64 / 23.0;
                assert!(
                    (s.proportion(*size) - expect).abs() < 0.05,
                    "n={n} size={size}"
                );
            }
        }
    }
}
