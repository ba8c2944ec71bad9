use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::GroupError;

/// Largest explicit element list the enumerators will build.
pub const ENUMERATION_BUDGET: usize = 1_000_000;

/// A permutation of `{0, …, deg − 1}` in one-line form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        if n > 255 {
            return Err(GroupError::DegreeTooLarge(n));
        }
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(GroupError::Parse(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Self {
            images: images.into_iter().map(|i| i as u8).collect(),
        })
    }

    /// Builds a permutation of the given degree from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= degree {
                    return Err(GroupError::Parse(format!("point {a} outside 0..{degree}")));
                }
                if std::mem::replace(&mut touched[a], true) {
                    return Err(GroupError::Parse(format!("point {a} repeated in cycles")));
                }
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    /// Number of fixed points.
    pub fn trace(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i == x as usize)
            .count()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: other
                .images
                .iter()
                .map(|&j| self.images[j as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Self { images: inv }
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            let mut len = 0usize;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            transpositions += len.saturating_sub(1);
        }
        transpositions % 2 == 0
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Parses cycle notation `(0 1 2)(3 4)` or one-line notation `[1, 2, 0]`.
    /// Cycle notation takes its degree from the largest point unless `degree`
    /// is given.
    pub fn parse(s: &str, degree: Option<usize>) -> Result<Self, GroupError> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('[') {
            let body = body
                .strip_suffix(']')
                .ok_or_else(|| GroupError::Parse(format!("unterminated `{s}`")))?;
            let images = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| GroupError::Parse(format!("`{t}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let perm = Self::from_images(images)?;
            return match degree {
                Some(d) if d != perm.degree() => Err(GroupError::DegreeMismatch(d, perm.degree())),
                _ => Ok(perm),
            };
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| GroupError::Parse(format!("expected `(` in `{s}`")))?;
            let end = body
                .find(')')
                .ok_or_else(|| GroupError::Parse(format!("unterminated cycle in `{s}`")))?;
            let cycle = body[..end]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| GroupError::Parse(format!("`{t}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            cycles.push(cycle);
            rest = body[end + 1..].trim_start();
        }
        let needed = cycles.iter().flatten().map(|&a| a + 1).max().unwrap_or(0);
        let degree = degree.unwrap_or(needed.max(1));
        Self::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s, None)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.images.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Sd,
    Ad,
    Cd,
    Dd,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Sd => "S",
            Family::Ad => "A",
            Family::Cd => "C",
            Family::Dd => "D",
        }
    }
}

impl FromStr for Family {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "S" | "Sd" | "s" => Ok(Family::Sd),
            "A" | "Ad" | "a" => Ok(Family::Ad),
            "C" | "Cd" | "c" => Ok(Family::Cd),
            "D" | "Dd" | "d" => Ok(Family::Dd),
            other => Err(GroupError::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// Parses `S3`, `A4`, `C5`, `D6`, … into a family and degree.
pub fn parse_family_degree(s: &str) -> Result<(Family, usize), GroupError> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| GroupError::Parse(format!("`{s}` has no degree")))?;
    let family = s[..split].parse()?;
    let d = s[split..]
        .parse()
        .map_err(|e| GroupError::Parse(format!("`{s}`: {e}")))?;
    Ok((family, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    Group,
    Coset { tau: Permutation },
}

/// A finite list of distinct permutations of a common degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationSet {
    degree: usize,
    elements: Vec<Permutation>,
    kind: SetKind,
}

impl PermutationSet {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn is_group(&self) -> bool {
        self.kind == SetKind::Group
    }

    /// Same elements regardless of order and kind.
    pub fn same_elements(&self, other: &Self) -> bool {
        let a: HashSet<_> = self.elements.iter().collect();
        let b: HashSet<_> = other.elements.iter().collect();
        a == b
    }

    fn group(degree: usize, elements: Vec<Permutation>) -> Self {
        Self {
            degree,
            elements,
            kind: SetKind::Group,
        }
    }
}

fn factorial(d: usize) -> Option<usize> {
    (1..=d).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// All permutations of `0..d` in lexicographic order.
fn all_permutations(d: usize) -> Vec<Permutation> {
    let mut cur: Vec<u8> = (0..d as u8).collect();
    let mut out = vec![Permutation {
        images: cur.clone(),
    }];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Permutation {
            images: cur.clone(),
        });
    }
}

/// Explicit element list of `S_d`, `A_d`, `C_d` or `D_d` acting on `0..d`.
pub fn make_group(family: Family, d: usize) -> Result<PermutationSet, GroupError> {
    let min = if family == Family::Dd { 3 } else { 2 };
    if d < min {
        return Err(GroupError::ParameterOutOfRange(format!(
            "{}_{d} needs d ≥ {min}",
            family.name()
        )));
    }
    let elements = match family {
        Family::Sd | Family::Ad => {
            if factorial(d).is_none_or(|n| n > ENUMERATION_BUDGET) {
                return Err(GroupError::DegreeTooLarge(d));
            }
            let all = all_permutations(d);
            if family == Family::Ad {
                all.into_iter().filter(Permutation::is_even).collect()
            } else {
                all
            }
        }
        Family::Cd | Family::Dd => {
            if d > 255 {
                return Err(GroupError::DegreeTooLarge(d));
            }
            let rot = |k: usize| Permutation {
                images: (0..d).map(|i| ((i + k) % d) as u8).collect(),
            };
            let mut els: Vec<Permutation> = (0..d).map(rot).collect();
            if family == Family::Dd {
                els.extend((0..d).map(|k| Permutation {
                    images: (0..d).map(|i| ((k + d - i) % d) as u8).collect(),
                }));
            }
            els
        }
    };
    Ok(PermutationSet::group(d, elements))
}

/// Closure of the generators under composition, by breadth-first search.
pub fn generate_from(
    degree: usize,
    generators: &[Permutation],
) -> Result<PermutationSet, GroupError> {
    generate_with_budget(degree, generators, ENUMERATION_BUDGET)
}

pub fn generate_with_budget(
    degree: usize,
    generators: &[Permutation],
    budget: usize,
) -> Result<PermutationSet, GroupError> {
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(GroupError::DegreeMismatch(degree, g.degree()));
    }
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                if seen.len() > budget {
                    return Err(GroupError::ClosureBudgetExceeded(budget));
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(PermutationSet::group(degree, elements))
}

/// The coset `τG = {τ ∘ g}`.
pub fn make_coset(tau: &Permutation, group: &PermutationSet) -> Result<PermutationSet, GroupError> {
    if tau.degree() != group.degree() {
        return Err(GroupError::DegreeMismatch(group.degree(), tau.degree()));
    }
    if !group.is_group() {
        return Err(GroupError::ParameterOutOfRange(
            "coset base must be a group".into(),
        ));
    }
    Ok(PermutationSet {
        degree: group.degree(),
        elements: group.elements.iter().map(|g| tau.compose(g)).collect(),
        kind: SetKind::Coset { tau: tau.clone() },
    })
}

/// `G wr H` acting on `deg G · deg H` points: `(π; ρ_0, …)` sends block
/// point `(i, j)` to `(π(i), ρ_i(j))`, with `(i, j)` stored as `i·deg H + j`.
pub fn wreath_elements(
    g: &PermutationSet,
    h: &PermutationSet,
) -> Result<PermutationSet, GroupError> {
    if !(g.is_group() && h.is_group()) {
        return Err(GroupError::ParameterOutOfRange(
            "wreath factors must be groups".into(),
        ));
    }
    let (dg, dh) = (g.degree(), h.degree());
    let size = (0..dg).try_fold(g.len(), |acc, _| acc.checked_mul(h.len()));
    if size.is_none_or(|s| s > ENUMERATION_BUDGET) {
        return Err(GroupError::ClosureBudgetExceeded(ENUMERATION_BUDGET));
    }
    if dg * dh > 255 {
        return Err(GroupError::DegreeTooLarge(dg * dh));
    }
    let mut elements = Vec::with_capacity(size.unwrap());
    let mut choice = vec![0usize; dg];
    for pi in &g.elements {
        choice.iter_mut().for_each(|c| *c = 0);
        loop {
            let mut images = vec![0u8; dg * dh];
            for i in 0..dg {
                let rho = &h.elements[choice[i]];
                for j in 0..dh {
                    images[i * dh + j] = (pi.apply(i) * dh + rho.apply(j)) as u8;
                }
            }
            elements.push(Permutation { images });
            // odometer over (ρ_0, …, ρ_{dg−1})
            let Some(pos) = (0..dg).find(|&k| choice[k] + 1 < h.len()) else {
                break;
            };
            choice[pos] += 1;
            choice[..pos].iter_mut().for_each(|c| *c = 0);
        }
    }
    Ok(PermutationSet::group(dg * dh, elements))
}

/// Single orbit on `0..deg` under the elements of the set.
pub fn is_transitive(set: &PermutationSet) -> bool {
    let d = set.degree();
    if d == 0 {
        return true;
    }
    let mut reached = vec![false; d];
    reached[0] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for g in &set.elements {
            let y = g.apply(x);
            if !reached[y] {
                reached[y] = true;
                stack.push(y);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn traces(set: &PermutationSet) -> Vec<usize> {
        let mut t: Vec<_> = set.elements().iter().map(Permutation::trace).collect();
        t.sort_unstable();
        t
    }

    #[test]
    fn parsing() {
        let p = Permutation::parse("(0 1 2)(3 4)", None).unwrap();
        assert_eq!(p.images(), vec![1, 2, 0, 4, 3]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert_eq!(
            perm("[1, 2, 0]"),
            Permutation::parse("(0 1 2)", Some(3)).unwrap()
        );
        assert_eq!(Permutation::parse("(0 1)", Some(4)).unwrap().trace(), 2);
        assert!(Permutation::parse("(0 1)(1 2)", None).is_err());
        assert!(Permutation::parse("[0, 0]", None).is_err());
        assert!(Permutation::parse("(0 5)", Some(3)).is_err());
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }

    #[test]
    fn composition_and_parity() {
        let a = perm("(0 1 2)");
        let b = Permutation::parse("(0 1)", Some(3)).unwrap();
        // apply b first: 0 → 1 → 2
        assert_eq!(a.compose(&b).apply(0), 2);
        assert_eq!(a.compose(&a.inverse()), Permutation::identity(3));
        assert!(a.is_even());
        assert!(!b.is_even());
    }

    #[test]
    fn families() {
        let c4 = make_group(Family::Cd, 4).unwrap();
        assert_eq!(c4.len(), 4);
        assert_eq!(traces(&c4), vec![0, 0, 0, 4]);
        assert_eq!(make_group(Family::Sd, 3).unwrap().len(), 6);
        assert_eq!(make_group(Family::Dd, 4).unwrap().len(), 8);
        assert_eq!(make_group(Family::Ad, 5).unwrap().len(), 60);
        assert_eq!(make_group(Family::Sd, 9).unwrap().len(), 362_880);
        assert_eq!(
            make_group(Family::Sd, 10),
            Err(GroupError::DegreeTooLarge(10))
        );
        assert!(make_group(Family::Dd, 2).is_err());
        // D_5: reflections of an odd polygon fix exactly one vertex
        assert_eq!(
            traces(&make_group(Family::Dd, 5).unwrap()),
            vec![0, 0, 0, 0, 1, 1, 1, 1, 1, 5]
        );
    }

    #[test]
    fn generation() {
        let c3 = generate_from(3, &[perm("(0 1 2)")]).unwrap();
        assert!(c3.same_elements(&make_group(Family::Cd, 3).unwrap()));
        let s4 = generate_from(
            4,
            &[
                Permutation::parse("(0 1)", Some(4)).unwrap(),
                perm("(0 1 2 3)"),
            ],
        )
        .unwrap();
        assert_eq!(s4.len(), 24);
        let trivial = generate_from(5, &[]).unwrap();
        assert_eq!(trivial.elements(), &[Permutation::identity(5)]);
        assert_eq!(
            generate_with_budget(
                5,
                &[
                    perm("(0 1 2 3 4)"),
                    Permutation::parse("(0 1)", Some(5)).unwrap()
                ],
                50
            ),
            Err(GroupError::ClosureBudgetExceeded(50))
        );
        assert!(generate_from(3, &[perm("(0 1 2 3)")]).is_err());
    }

    #[test]
    fn cosets() {
        let a3 = make_group(Family::Ad, 3).unwrap();
        let tau = Permutation::parse("(0 1)", Some(3)).unwrap();
        let coset = make_coset(&tau, &a3).unwrap();
        assert_eq!(traces(&coset), vec![1, 1, 1]);
        assert!(coset.elements().iter().all(|g| !g.is_even()));
        assert!(make_coset(&Permutation::identity(3), &a3)
            .unwrap()
            .same_elements(&a3));
        assert!(make_coset(&perm("(0 2 1)"), &a3)
            .unwrap()
            .same_elements(&a3));
        assert!(make_coset(&perm("(0 1 2 3)"), &a3).is_err());
    }

    #[test]
    fn wreath() {
        let c2 = make_group(Family::Cd, 2).unwrap();
        let w = wreath_elements(&c2, &c2).unwrap();
        assert_eq!((w.len(), w.degree()), (8, 4));
        assert!(is_transitive(&w));
        let trivial = generate_from(1, &[]).unwrap();
        let s3 = make_group(Family::Sd, 3).unwrap();
        assert!(wreath_elements(&trivial, &s3).unwrap().same_elements(&s3));
        let s2 = make_group(Family::Sd, 2).unwrap();
        let w = wreath_elements(&s2, &s3).unwrap();
        assert_eq!((w.len(), w.degree()), (72, 6));
        // closed under composition
        let set: HashSet<_> = w.elements().iter().collect();
        for a in w.elements().iter().take(10) {
            for b in w.elements() {
                assert!(set.contains(&a.compose(b)));
            }
        }
        assert_eq!(wreath_elements(&s3, &s3).unwrap().len(), 1296);
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(&make_group(Family::Cd, 4).unwrap()));
        assert!(is_transitive(&make_group(Family::Sd, 3).unwrap()));
        assert!(!is_transitive(&generate_from(2, &[]).unwrap()));
        assert!(!is_transitive(&make_group(Family::Ad, 2).unwrap()));
    }

    #[test]
    fn family_names() {
        assert_eq!(parse_family_degree("S3").unwrap(), (Family::Sd, 3));
        assert_eq!(parse_family_degree("D10").unwrap(), (Family::Dd, 10));
        assert!(parse_family_degree("X3").is_err());
        assert!(parse_family_degree("S").is_err());
    }
}
