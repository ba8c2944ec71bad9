use rayon::prelude::*;

use super::{DynamicsError, RationalMap};
use crate::ffield::{PrimeField, ProjectivePoint};

/// Point indices are stored as `u32`, with index `p` standing for `∞`.
pub const MAX_GRAPH_MODULUS: u64 = u32::MAX as u64 - 1;

/// The successor structure `x ↦ φ(x)` on `P¹(F_p)` with its derived
/// statistics.
///
/// `height[x]` is, for a non-periodic `x`, the length of the longest chain
/// of non-periodic points ending at `x` (zero when `x` has no preimage).
/// Preimages of a non-periodic point are themselves non-periodic, so
/// `x ∈ φⁿ(P¹)` exactly when `x` is periodic or `height[x] ≥ n`.
#[derive(Debug, Clone)]
pub struct FunctionalGraph {
    field: PrimeField,
    successor: Vec<u32>,
    periodic: Vec<bool>,
    height: Vec<u32>,
    cycle_lengths: Vec<u64>,
    sources: u64,
}

pub fn build_graph(map: &RationalMap) -> Result<FunctionalGraph, DynamicsError> {
    let field = *map.field();
    let p = field.modulus();
    if p > MAX_GRAPH_MODULUS {
        return Err(DynamicsError::FieldTooLarge {
            p,
            max: MAX_GRAPH_MODULUS,
        });
    }
    let successor: Vec<u32> = (0..p as usize + 1)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| field.index_of(map.evaluate(field.point_at(i as u64))) as u32)
        .collect();
    Ok(FunctionalGraph::from_successors(field, successor))
}

impl FunctionalGraph {
    /// Peels in-degree-zero points until only cycles remain.
    pub(crate) fn from_successors(field: PrimeField, successor: Vec<u32>) -> Self {
        let n = successor.len();
        let mut indeg = vec![0u32; n];
        for &s in &successor {
            indeg[s as usize] += 1;
        }
        let mut stack: Vec<u32> = (0..n as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let sources = stack.len() as u64;
        let mut periodic = vec![true; n];
        let mut height = vec![0u32; n];
        while let Some(x) = stack.pop() {
            let x = x as usize;
            periodic[x] = false;
            // every preimage of x was popped before x, so height[x] is final
            let y = successor[x] as usize;
            height[y] = height[y].max(height[x] + 1);
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y as u32);
            }
        }
        for (h, &per) in height.iter_mut().zip(&periodic) {
            if per {
                *h = 0;
            }
        }

        let mut seen = vec![false; n];
        let mut cycle_lengths = Vec::new();
        for start in 0..n {
            if !periodic[start] || seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = successor[x] as usize;
            }
            cycle_lengths.push(len);
        }
        cycle_lengths.sort_unstable_by(|a, b| b.cmp(a));

        Self {
            field,
            successor,
            periodic,
            height,
            cycle_lengths,
            sources,
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.successor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successor.is_empty()
    }

    pub fn successor(&self, index: usize) -> usize {
        self.successor[index] as usize
    }

    pub fn successors(&self) -> &[u32] {
        &self.successor
    }

    pub fn is_periodic(&self, index: usize) -> bool {
        self.periodic[index]
    }

    pub fn periodic_points(&self) -> Vec<ProjectivePoint> {
        self.periodic
            .iter()
            .enumerate()
            .filter(|(_, &per)| per)
            .map(|(i, _)| self.field.point_at(i as u64))
            .collect()
    }

    /// Forest height of a non-periodic point; zero for periodic ones.
    pub fn height(&self, index: usize) -> u32 {
        self.height[index]
    }

    /// Number of points with no preimage.
    pub fn source_count(&self) -> u64 {
        self.sources
    }

    /// `#φⁿ(P¹(F_p))` for `n = 1..=n_max`, in `O(p + n_max)`.
    pub fn image_sizes(&self, n_max: usize) -> Result<Vec<u64>, DynamicsError> {
        if n_max == 0 {
            return Err(DynamicsError::ZeroIterate);
        }
        let mut by_height = vec![0u64; n_max + 1];
        let mut periodic = 0u64;
        for (h, &per) in self.height.iter().zip(&self.periodic) {
            if per {
                periodic += 1;
            } else {
                by_height[(*h as usize).min(n_max)] += 1;
            }
        }
        // suffix sums: at_least[n] = #{non-periodic x : H(x) ≥ n}
        let mut out = vec![0u64; n_max];
        let mut at_least = 0u64;
        for n in (1..=n_max).rev() {
            at_least += by_height[n];
            out[n - 1] = periodic + at_least;
        }
        Ok(out)
    }

    /// `#φⁿ(F_p)`: images of the affine points only, which may still
    /// include `∞`. Computed by forward marking in `O(n_max · p)`.
    pub fn affine_image_sizes(&self, n_max: usize) -> Result<Vec<u64>, DynamicsError> {
        if n_max == 0 {
            return Err(DynamicsError::ZeroIterate);
        }
        let mut start = vec![true; self.len()];
        start[self.len() - 1] = false;
        Ok(forward_image_sizes(self, start, n_max))
    }

    /// `(#Per(φ), cycle lengths in decreasing order)`.
    pub fn periodic_count(&self) -> (u64, &[u64]) {
        (self.cycle_lengths.iter().sum(), &self.cycle_lengths)
    }

    /// Longest pre-periodic tail: the maximum over non-periodic `x` of
    /// `H(x) + 1`, or zero when every point is periodic.
    pub fn max_tail_length(&self) -> u64 {
        self.height
            .iter()
            .zip(&self.periodic)
            .filter(|(_, &per)| !per)
            .map(|(&h, _)| h as u64 + 1)
            .max()
            .unwrap_or(0)
    }

    /// Every point has in-degree exactly one.
    pub fn is_bijection(&self) -> bool {
        self.sources == 0
    }
}

/// Reference image sizes by explicit forward image sets, `O(n_max · p)`.
pub fn naive_image_sizes(graph: &FunctionalGraph, n_max: usize) -> Vec<u64> {
    forward_image_sizes(graph, vec![true; graph.len()], n_max)
}

fn forward_image_sizes(graph: &FunctionalGraph, mut current: Vec<bool>, n_max: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let mut next = vec![false; graph.len()];
        for (i, &on) in current.iter().enumerate() {
            if on {
                next[graph.successor(i)] = true;
            }
        }
        out.push(next.iter().filter(|&&b| b).count() as u64);
        current = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapSpec;

    fn graph(s: &str) -> FunctionalGraph {
        build_graph(&s.parse::<MapSpec>().unwrap().build().unwrap()).unwrap()
    }

    #[test]
    fn x2_plus_1_mod_5() {
        let g = graph("p=5; num=1,0,1");
        assert_eq!(g.successors(), &[1, 2, 0, 0, 2, 5]);
        let per: Vec<_> = (0..6).filter(|&i| g.is_periodic(i)).collect();
        assert_eq!(per, vec![0, 1, 2, 5]);
        assert_eq!(g.periodic_count(), (4, &[3u64, 1][..]));
        assert_eq!(g.image_sizes(3).unwrap(), vec![4, 4, 4]);
        // 3 → 0 and 4 → 2 enter the 3-cycle after one step
        assert_eq!(g.max_tail_length(), 1);
        assert!(!g.is_bijection());
    }

    #[test]
    fn x2_plus_1_mod_7() {
        let g = graph("p=7; num=1,0,1");
        assert_eq!(g.periodic_count(), (3, &[1u64, 1, 1][..]));
        assert_eq!(g.image_sizes(3).unwrap(), vec![5, 4, 3]);
        assert_eq!(g.height(2), 2);
        assert_eq!(g.max_tail_length(), 3);
    }

    #[test]
    fn identity_and_bijections() {
        let id = graph("p=11; num=0,1");
        assert_eq!(id.periodic_count(), (12, &[1u64; 12][..]));
        assert_eq!(id.max_tail_length(), 0);
        assert!(id.is_bijection());
        let cube = graph("p=5; num=0,0,0,1");
        assert!(cube.is_bijection());
        assert_eq!(cube.image_sizes(4).unwrap(), vec![6; 4]);
        assert!(graph("p=13; num=1,1").is_bijection());
    }

    #[test]
    fn affine_counts() {
        // polynomial: ∞ is only hit from ∞
        let g = graph("p=7; num=1,0,1");
        let full = g.image_sizes(3).unwrap();
        let aff = g.affine_image_sizes(3).unwrap();
        assert_eq!(aff, full.iter().map(|s| s - 1).collect::<Vec<_>>());
        // 1/x sends 0 to ∞, so the affine image is all of P¹ minus φ(∞) = 0
        let inv = graph("p=7; num=1; den=0,1");
        assert_eq!(inv.affine_image_sizes(1).unwrap(), vec![7]);
        assert_eq!(inv.image_sizes(1).unwrap(), vec![8]);
        assert_eq!(inv.image_sizes(0), Err(DynamicsError::ZeroIterate));
    }
}
