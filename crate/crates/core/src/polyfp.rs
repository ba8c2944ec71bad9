//! Dense univariate polynomials over a prime field.
//!
//! Coefficients are stored constant term first and kept trimmed, so the zero
//! polynomial is the empty vector. Root finding uses `gcd(h, x^p − x)` to
//! isolate the distinct linear factors followed by Cantor–Zassenhaus
//! splitting, which keeps it usable for moduli far beyond exhaustive range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ffield::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFp {
    coeffs: Vec<u64>,
}

impl PolyFp {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Takes already reduced coefficients, constant term first.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `x − r`
    pub fn linear_root(field: &PrimeField, r: u64) -> Self {
        Self::from_coeffs(vec![field.neg(r), 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, field: &PrimeField, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn derivative(&self, field: &PrimeField) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| field.mul(c, i as u64 % field.modulus()))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &Self, field: &PrimeField) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                field.add(a, b)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self, field: &PrimeField) -> Self {
        self.add(&other.scale(field.neg(1), field), field)
    }

    pub fn scale(&self, c: u64, field: &PrimeField) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, field: &PrimeField) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self, field: &PrimeField) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = field
            .inv(divisor.leading())
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = field.mul(rem[i], lead_inv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = field.sub(rem[k], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &Self, field: &PrimeField) -> Self {
        self.div_rem(divisor, field).1
    }

    pub fn monic(&self, field: &PrimeField) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = field
            .inv(self.leading())
            .expect("nonzero leading coefficient");
        self.scale(inv, field)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self, field: &PrimeField) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field);
            a = b;
            b = r;
        }
        a.monic(field)
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self, field: &PrimeField) -> Self {
        let mut base = self.rem(modulus, field);
        let mut acc = Self::constant(1).rem(modulus, field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field).rem(modulus, field);
            }
            base = base.mul(&base, field).rem(modulus, field);
            e >>= 1;
        }
        acc
    }

    /// Order of vanishing at `r`, by repeated synthetic division.
    /// Returns `None` for the zero polynomial.
    pub fn root_multiplicity(&self, field: &PrimeField, r: u64) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let mut cur = self.coeffs.clone();
        let mut mult = 0;
        loop {
            // Horner division by (x - r): quotient in place, remainder out.
            let mut carry = 0u64;
            let mut quot = vec![0u64; cur.len().saturating_sub(1)];
            for i in (0..cur.len()).rev() {
                let v = field.add(cur[i], field.mul(carry, r));
                if i == 0 {
                    carry = v;
                } else {
                    quot[i - 1] = v;
                    carry = v;
                }
            }
            if carry != 0 {
                return Some(mult);
            }
            mult += 1;
            cur = quot;
        }
    }

    /// Distinct roots in `F_p`, sorted ascending.
    pub fn roots(&self, field: &PrimeField) -> Vec<u64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let p = field.modulus();
        if p <= 64 {
            return (0..p).filter(|&x| self.eval(field, x) == 0).collect();
        }
        let f = self.monic(field);
        let x = Self::from_coeffs(vec![0, 1]);
        let xp = x.pow_mod(p, &f, field);
        let split = f.gcd(&xp.sub(&x, field), field);
        let mut out = Vec::new();
        // Fixed seed: results are a set, the seed only affects running time.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ p);
        split_linear(&split, field, &mut rng, &mut out);
        out.sort_unstable();
        out
    }
}

/// Splits a squarefree product of distinct linear factors.
fn split_linear(f: &PolyFp, field: &PrimeField, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            let c = f.monic(field).coeffs()[0];
            out.push(field.neg(c));
        }
        Some(_) => {
            let p = field.modulus();
            loop {
                let delta = rng.gen_range(0..p);
                let shifted = PolyFp::from_coeffs(vec![delta, 1]);
                let h = shifted
                    .pow_mod((p - 1) / 2, f, field)
                    .sub(&PolyFp::constant(1), field);
                let g = f.gcd(&h, field);
                let gd = g.degree().unwrap_or(0);
                if gd > 0 && Some(gd) < f.degree() {
                    let (q, _) = f.div_rem(&g, field);
                    split_linear(&g, field, rng, out);
                    split_linear(&q, field, rng, out);
                    return;
                }
            }
        }
    }
}
