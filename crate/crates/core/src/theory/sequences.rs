use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::interval::Interval;

/// `μ_0 = 1`, `μ_{n+1} = μ_n − μ_n²/2`.
///
/// Every `μ_n` with `n ≥ 1` is `a/2^k` with `a` odd, so the recursion runs on
/// the numerator and exponent alone. The denominator has `2ⁿ − 1` bits.
pub fn shao_mu(n: usize) -> BigRational {
    let mut a = BigInt::one();
    let mut k = 0usize;
    for _ in 0..n {
        // a/2^k − a²/2^(2k+1) = (a·2^(k+1) − a²)/2^(2k+1)
        a = (&a << (k + 1)) - &a * &a;
        k = 2 * k + 1;
    }
    // a stays odd, so the fraction is already reduced
    BigRational::new_raw(a, BigInt::one() << k)
}

/// `τ_n` for the random-mapping heuristic together with `1 − τ_n` and
/// `n(1 − τ_n)`, each as an enclosure.
#[derive(Debug, Clone)]
pub struct TauValue {
    pub n: usize,
    pub tau: Interval,
    pub one_minus: Interval,
    pub scaled: Interval,
}

/// `τ_0 = 0`, `τ_{n+1} = e^{τ_n − 1}`, at `precision` bits.
pub fn random_map_tau(n: usize, precision: usize) -> TauValue {
    let one = Interval::from_int(1).with_precision(precision);
    let mut tau = Interval::from_int(0).with_precision(precision);
    for _ in 0..n {
        tau = tau.sub(&one).exp();
    }
    let one_minus = one.sub(&tau);
    let scaled = one_minus.mul(&Interval::from_bigint(&BigInt::from(n), precision));
    TauValue {
        n,
        tau,
        one_minus,
        scaled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn mu_values() {
        assert_eq!(shao_mu(0), rat(1, 1));
        assert_eq!(shao_mu(1), rat(1, 2));
        assert_eq!(shao_mu(2), rat(3, 8));
        assert_eq!(shao_mu(3), rat(39, 128));
        let mut m = rat(1, 1);
        for n in 0..10 {
            assert_eq!(shao_mu(n), m);
            m = &m - &m * &m / BigInt::from(2);
        }
    }

    #[test]
    fn tau_values() {
        assert_eq!(random_map_tau(0, 64).tau.width_f64(), 0.0);
        let t1 = random_map_tau(1, 128);
        assert!((t1.tau.mid_f64() - (-1f64).exp()).abs() < 1e-15);
        let t2 = random_map_tau(2, 192);
        assert!(t2.tau.to_decimal(7).starts_with("0.531463"), "{}", t2.tau);
        assert!(t2.tau.width_f64() < 1e-50);
    }

    #[test]
    fn tau_asymptotics() {
        let t = random_map_tau(2000, 128);
        let s = t.scaled.mid_f64();
        assert!(s > 1.9 && s < 2.1, "{s}");
        assert!(t.scaled.width_f64() < 1e-20);
    }
}
