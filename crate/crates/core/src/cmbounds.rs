//! Divisibility constants for torsion on CM abelian varieties of dimension `g`.

use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, minkowski_bound, phi_preimage_divisors_factored, primes_upto, ArithError, FactoredInteger};
use crate::families::{FamilyProfile, P1Rule};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CmError {
    #[error("{0} must be a positive integer")]
    NotPositive(&'static str),
    #[error("mu = {0} is odd; the roots of unity always include -1")]
    OddMu(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, CmError>;

fn positive(v: u64, what: &'static str) -> Result<u64> {
    if v == 0 {
        Err(CmError::NotPositive(what))
    } else {
        Ok(v)
    }
}

/// `phi(e) | (mu / 2) dF`.
pub fn gr_check(e: u64, mu: u64, d_f: u64) -> Result<bool> {
    positive(e, "e")?;
    positive(mu, "mu")?;
    positive(d_f, "[F:Q]")?;
    if mu % 2 == 1 {
        return Err(CmError::OddMu(mu));
    }
    let rhs = ((mu / 2) as u128).checked_mul(d_f as u128).ok_or(ArithError::Overflow("mu dF"))?;
    Ok(rhs % euler_phi(e)? as u128 == 0)
}

/// Minkowski's bound at rank `2 g^2`.
pub fn h_bound(g: u32) -> Result<FactoredInteger> {
    positive(g as u64, "g")?;
    let rank = g.checked_mul(g).and_then(|v| v.checked_mul(2)).ok_or(ArithError::Overflow("rank"))?;
    Ok(minkowski_bound(rank)?)
}

/// `log_q` of the largest `q^k` with `phi(q^k) | n`.
fn root_exponent(q: u64, n: u64) -> u32 {
    let mut k = 0u32;
    let mut phi = q - 1;
    while n % phi == 0 {
        k += 1;
        phi = match phi.checked_mul(q) {
            Some(v) => v,
            None => break,
        };
    }
    k
}

/// Best total `q`-exponent over compositions of `total`.
fn best_composition_exponent(q: u64, total: u64) -> u32 {
    let mut best = vec![0u32; total as usize + 1];
    for s in 1..=total as usize {
        best[s] = (1..=s).map(|n| root_exponent(q, n as u64) + best[s - n]).max().expect("s >= 1");
    }
    best[total as usize]
}

/// Bound on the roots of unity in the centre of `End A`: a product of
/// fields of total degree `2g`, each with `phi(mu_i) | [F_i:Q]`.
pub fn mu_bound(g: u32) -> Result<FactoredInteger> {
    positive(g as u64, "g")?;
    let total = 2 * g as u64;
    let factors: Vec<(u64, u32)> = primes_upto(total + 1)
        .into_iter()
        .map(|q| (q, best_composition_exponent(q, total)))
        .filter(|&(_, e)| e > 0)
        .collect();
    Ok(FactoredInteger::from_factors(factors)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmBoundSet {
    pub g: u32,
    pub h: FactoredInteger,
    pub m: FactoredInteger,
    pub c: FactoredInteger,
}

impl CmBoundSet {
    pub fn c_u64(&self) -> Result<u64> {
        let v = self.c.value()?;
        Ok(u64::try_from(v).map_err(|_| ArithError::Overflow("c(g) as u64"))?)
    }
}

/// `c(g) = H(g) M(g) / 2`.
pub fn c_of_g(g: u32) -> Result<CmBoundSet> {
    let h = h_bound(g)?;
    let m = mu_bound(g)?;
    let c = h.mul(&m).div_prime(2)?;
    Ok(CmBoundSet { g, h, m, c })
}

/// `{N : phi(N) | c(g) d}`.
pub fn allowed_exponents(g: u32, d: u64) -> Result<Vec<u128>> {
    positive(d, "d")?;
    let cd = c_of_g(g)?.c.mul(&FactoredInteger::factorize(d as u128)?);
    Ok(phi_preimage_divisors_factored(&cd)?)
}

/// `N + ord_p(c(g)) + 1`.
pub fn cm_p1_exponent(g: u32, p: u64, big_n: u32) -> Result<u32> {
    positive(big_n as u64, "N")?;
    crate::arith::require_prime(p)?;
    Ok(big_n + c_of_g(g)?.c.ord(p) + 1)
}

pub fn cm_profile(g: u32) -> Result<FamilyProfile> {
    let c = c_of_g(g)?.c_u64()?;
    Ok(FamilyProfile {
        name: Some(format!("cm-g{g}")),
        p2_c: c,
        p1_rule: P1Rule::ValuationShift { c },
        merelian_b: None,
        dim_g: g,
        si_prime_cutoff: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::phi_preimage_divisors;
    use proptest::prelude::*;

    fn compositions(n: u64) -> Vec<Vec<u64>> {
        if n == 0 {
            return vec![vec![]];
        }
        (1..=n)
            .flat_map(|first| {
                compositions(n - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    /// Largest `mu` with `phi(mu) | n`, by scanning: `phi(mu) >= sqrt(mu / 2)`.
    fn largest_root_order(n: u64) -> u64 {
        (1..=2 * n * n).filter(|&m| n % euler_phi(m).unwrap() == 0).fold(1, num_integer::lcm)
    }

    fn mu_oracle(g: u32) -> u128 {
        compositions(2 * g as u64)
            .into_iter()
            .map(|parts| parts.iter().map(|&n| largest_root_order(n) as u128).product::<u128>())
            .fold(1, num_integer::lcm)
    }

    #[test]
    fn gr_examples() {
        assert!(gr_check(5, 2, 4).unwrap());
        assert!(!gr_check(7, 2, 3).unwrap());
        assert!(gr_check(1, 2, 1).unwrap());
        assert_eq!(gr_check(5, 3, 4), Err(CmError::OddMu(3)));
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_bound(1).unwrap().value().unwrap(), 24);
        let h2 = h_bound(2).unwrap();
        assert_eq!(h2.factors(), &[(2, 15), (3, 5), (5, 2), (7, 1)]);
        assert_eq!(h2.value().unwrap() % 24, 0);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_bound(1).unwrap().value().unwrap(), 12);
        let m2 = mu_bound(2).unwrap().value().unwrap();
        assert_eq!(m2, 720);
        assert_eq!(m2 % 144, 0);
        for g in 1..=10 {
            assert!(mu_bound(g).unwrap().ord(2) >= 1, "g = {g}");
            let support = mu_bound(g).unwrap().factors().iter().map(|&(q, _)| q).max().unwrap();
            assert!(support <= 2 * g as u64 + 1);
        }
    }

    #[test]
    fn mu_dp_matches_compositions() {
        for g in 1..=4 {
            assert_eq!(mu_bound(g).unwrap().value().unwrap(), mu_oracle(g), "g = {g}");
        }
    }

    #[test]
    fn c_examples() {
        let b = c_of_g(1).unwrap();
        assert_eq!(b.c.value().unwrap(), 144);
        let b2 = c_of_g(2).unwrap();
        assert_eq!(b2.c.value().unwrap() * 2, b2.h.value().unwrap() * b2.m.value().unwrap());
        for g in 1..=6 {
            assert!(c_of_g(g).is_ok());
        }
    }

    #[test]
    fn allowed_exponent_examples() {
        let a = allowed_exponents(1, 1).unwrap();
        assert_eq!(a, phi_preimage_divisors(144).unwrap());
        assert!(a.contains(&1) && a.contains(&2));
        assert!(*a.last().unwrap() <= 2 * 144 * 144);
        for &n in &a {
            assert!(gr_check(n as u64, 2 * 144, 1).unwrap());
        }
        let a3 = allowed_exponents(1, 3).unwrap();
        assert!(a.iter().all(|n| a3.contains(n)));
    }

    #[test]
    fn p1_examples() {
        assert_eq!(cm_p1_exponent(1, 7, 2).unwrap(), 3);
        assert_eq!(cm_p1_exponent(1, 2, 1).unwrap(), 6);
        assert_eq!(cm_p1_exponent(1, 3, 1).unwrap(), 4);
        assert!(cm_p1_exponent(1, 4, 1).is_err());
        let prof = cm_profile(1).unwrap();
        assert_eq!(prof.p2_c, 144);
        for p in [2, 3, 5, 7, 11] {
            for n in 1..5 {
                assert_eq!(prof.p1_exponent(p, n).unwrap(), cm_p1_exponent(1, p, n).unwrap());
                assert!(prof.p1_exponent(p, n + 1).unwrap() > prof.p1_exponent(p, n).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn gr_monotone_in_degree(e in 1u64..500, half_mu in 1u64..20, d in 1u64..200, k in 1u64..10) {
            if gr_check(e, 2 * half_mu, d).unwrap() {
                prop_assert!(gr_check(e, 2 * half_mu, k * d).unwrap());
            }
        }

        /// `phi(p^n) | c d` with `n = N + ord_p(c) + 1` forces `p^N | d`.
        #[test]
        fn p1_implication(pi in 0usize..5, big_n in 1u32..4, k in 1u64..1000) {
            let p = [2u64, 3, 5, 7, 13][pi];
            let n = cm_p1_exponent(1, p, big_n).unwrap();
            let phi = (p - 1) * p.pow(n - 1);
            // Every d with phi | 144 d is a multiple of this step.
            let d = k * (phi / num_integer::gcd(phi, 144));
            prop_assert_eq!((144 * d) % phi, 0);
            prop_assert_eq!(d % p.pow(big_n), 0);
        }
    }
}
