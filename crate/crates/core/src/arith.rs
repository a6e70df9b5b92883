//! Elementary number theory shared by the rest of the crate.
//!
//! Everything here works on fixed-width integers with checked arithmetic.
//! Overflow is surfaced as [`ArithError::Overflow`]; nothing wraps.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("{0} must be a positive integer")]
    NotPositive(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("invalid factorization: {0}")]
    BadFactorization(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
}

pub type Result<T> = std::result::Result<T, ArithError>;

/// Deterministic primality for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    primal::is_prime(n)
}

pub fn require_prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(ArithError::NotPrime(p))
    }
}

/// All primes `<= x`, ascending.
pub fn primes_upto(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let sieve = primal::Sieve::new(x as usize);
    sieve.primes_from(0).take_while(|&q| q as u64 <= x).map(|q| q as u64).collect()
}

/// `p`-adic valuation of `n`.
pub fn ord_p(n: u128, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(ArithError::NotPositive("n"));
    }
    require_prime(p)?;
    let p = p as u128;
    let mut n = n;
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    Ok(k)
}

pub fn checked_pow(base: u128, exp: u32, what: &'static str) -> Result<u128> {
    base.checked_pow(exp).ok_or(ArithError::Overflow(what))
}

/// A positive integer stored through its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self { factors: Vec::new() }
    }

    /// Builds from `(prime, exponent)` pairs; pairs must have strictly
    /// increasing primes and positive exponents.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(ArithError::BadFactorization(format!(
                    "primes not strictly increasing at {}",
                    w[1].0
                )));
            }
        }
        for &(q, e) in &factors {
            if e == 0 {
                return Err(ArithError::BadFactorization(format!("zero exponent on {q}")));
            }
            if !is_prime(q) {
                return Err(ArithError::BadFactorization(format!("{q} is not prime")));
            }
        }
        Ok(Self { factors })
    }

    /// Trial-division factorization. Inputs are expected to be desk-sized;
    /// anything with a prime factor above 2^32 is rejected by the cost guard.
    pub fn factorize(n: u128) -> Result<Self> {
        if n == 0 {
            return Err(ArithError::NotPositive("n"));
        }
        let mut n = n;
        let mut factors = Vec::new();
        let mut q: u128 = 2;
        while q * q <= n {
            if n % q == 0 {
                let mut e = 0;
                while n % q == 0 {
                    n /= q;
                    e += 1;
                }
                factors.push((q as u64, e));
            }
            q += if q == 2 { 1 } else { 2 };
            if q > (1u128 << 32) {
                return Err(ArithError::CostGuard(format!(
                    "trial division of {n} exceeds 2^32"
                )));
            }
        }
        if n > 1 {
            let last = u64::try_from(n)
                .map_err(|_| ArithError::CostGuard(format!("cofactor {n} exceeds 64 bits")))?;
            factors.push((last, 1));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn ord(&self, p: u64) -> u32 {
        self.factors.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn value(&self) -> Result<u128> {
        self.factors.iter().try_fold(1u128, |acc, &(q, e)| {
            checked_pow(q as u128, e, "factored value")?
                .checked_mul(acc)
                .ok_or(ArithError::Overflow("factored value"))
        })
    }

    pub fn value_big(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::from(1u32), |acc, &(q, e)| acc * BigUint::from(q).pow(e))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) if a == b => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
                (Some(&(a, ea)), Some(&(b, _))) if a < b => {
                    out.push((a, ea));
                    i += 1;
                }
                (Some(_), Some(&(b, eb))) => {
                    out.push((b, eb));
                    j += 1;
                }
                (Some(&f), None) => {
                    out.push(f);
                    i += 1;
                }
                (None, Some(&f)) => {
                    out.push(f);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self { factors: out }
    }

    /// Exact division by a prime `q`; fails when `q` does not divide.
    pub fn div_prime(&self, q: u64) -> Result<Self> {
        let mut factors = self.factors.clone();
        let pos = factors
            .iter()
            .position(|&(r, _)| r == q)
            .ok_or_else(|| ArithError::BadFactorization(format!("{q} does not divide")))?;
        factors[pos].1 -= 1;
        if factors[pos].1 == 0 {
            factors.remove(pos);
        }
        Ok(Self { factors })
    }

    /// All divisors, ascending. Guarded against blowup.
    pub fn divisors(&self, limit: usize) -> Result<Vec<u128>> {
        let count = self
            .factors
            .iter()
            .try_fold(1usize, |acc, &(_, e)| acc.checked_mul(e as usize + 1))
            .unwrap_or(usize::MAX);
        if count > limit {
            return Err(ArithError::CostGuard(format!(
                "{count} divisors exceeds the limit of {limit}"
            )));
        }
        let mut divs = vec![1u128];
        for &(q, e) in &self.factors {
            let base = divs.clone();
            let mut pw = 1u128;
            for _ in 0..e {
                pw = pw.checked_mul(q as u128).ok_or(ArithError::Overflow("divisor"))?;
                for &d in &base {
                    divs.push(d.checked_mul(pw).ok_or(ArithError::Overflow("divisor"))?);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(ArithError::NotPositive("n"));
    }
    let f = FactoredInteger::factorize(n as u128)?;
    Ok(f.factors.iter().fold(n, |acc, &(q, _)| acc / q * (q - 1)))
}

/// Largest divisor count `phi_preimage_divisors` will expand.
pub const PHI_PREIMAGE_DIVISOR_LIMIT: usize = 2_000_000;

/// `{N : phi(N) | m}`, ascending.
///
/// Since `phi(N) >= sqrt(N/2)`, every member satisfies `N <= 2 m^2`.
pub fn phi_preimage_divisors(m: u64) -> Result<Vec<u128>> {
    if m == 0 {
        return Err(ArithError::NotPositive("m"));
    }
    phi_preimage_divisors_factored(&FactoredInteger::factorize(m as u128)?)
}

/// Same as [`phi_preimage_divisors`] for an already-factored `m`.
///
/// Works prime by prime: `N = prod q^a` needs `(q-1) q^(a-1)` to multiply
/// into a divisor of `m`, so only primes with `q - 1 | m` can occur.
pub fn phi_preimage_divisors_factored(m: &FactoredInteger) -> Result<Vec<u128>> {
    let mval = m.value()?;
    let candidates: Vec<u128> = m
        .divisors(PHI_PREIMAGE_DIVISOR_LIMIT)?
        .into_iter()
        .filter_map(|d| d.checked_add(1))
        .filter(|&q| u64::try_from(q).map(is_prime).unwrap_or(false))
        .collect();

    fn walk(
        qs: &[u128],
        start: usize,
        n: u128,
        phi: u128,
        m: u128,
        out: &mut Vec<u128>,
    ) -> Result<()> {
        out.push(n);
        for (j, &q) in qs.iter().enumerate().skip(start) {
            let Some(mut f) = phi.checked_mul(q - 1) else { continue };
            if m % f != 0 {
                continue;
            }
            let mut nq = n.checked_mul(q).ok_or(ArithError::Overflow("phi preimage"))?;
            loop {
                walk(qs, j + 1, nq, f, m, out)?;
                match f.checked_mul(q) {
                    Some(next) if m % next == 0 => {
                        f = next;
                        nq = nq.checked_mul(q).ok_or(ArithError::Overflow("phi preimage"))?;
                    }
                    _ => break,
                }
            }
        }
        Ok(())
    }

    let mut out = Vec::new();
    walk(&candidates, 0, 1, 1, mval, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// `#GL_m(Z/p^n Z) = c * p^exponent` with `gcd(c, p) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlOrder {
    pub c: u128,
    pub exponent: u32,
}

impl GlOrder {
    pub fn total(&self, p: u64) -> Result<u128> {
        checked_pow(p as u128, self.exponent, "GL order")?
            .checked_mul(self.c)
            .ok_or(ArithError::Overflow("GL order"))
    }
}

/// Order of `GL_m(Z/p^n)`, split into its prime-to-`p` part and `p`-power.
///
/// `p^((n-1) m^2) * prod_{i<m} (p^m - p^i)`; the product contributes
/// `p^(m(m-1)/2)` and the coprime part `prod_{k=1..m} (p^k - 1)`.
pub fn glm_order(m: u32, p: u64, n: u32) -> Result<GlOrder> {
    if m == 0 {
        return Err(ArithError::NotPositive("m"));
    }
    if n == 0 {
        return Err(ArithError::NotPositive("n"));
    }
    require_prime(p)?;
    let exponent = (n - 1)
        .checked_mul(m * m)
        .and_then(|e| e.checked_add(m * (m - 1) / 2))
        .ok_or(ArithError::Overflow("GL exponent"))?;
    let mut c: u128 = 1;
    for k in 1..=m {
        let term = checked_pow(p as u128, k, "GL order")? - 1;
        c = c.checked_mul(term).ok_or(ArithError::Overflow("GL order"))?;
    }
    Ok(GlOrder { c, exponent })
}

/// Minkowski's bound: every finite subgroup of `GL_n(Z)` has order dividing
/// `prod_p p^(e_p)`, `e_p = sum_{k>=0} floor(n / (p^k (p-1)))`.
pub fn minkowski_bound(n: u32) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(ArithError::NotPositive("n"));
    }
    let n = n as u64;
    let mut factors = Vec::new();
    for q in primes_upto(n + 1) {
        let mut e = 0u64;
        let mut denom = q - 1;
        while denom <= n {
            e += n / denom;
            denom = match denom.checked_mul(q) {
                Some(d) => d,
                None => break,
            };
        }
        if e > 0 {
            factors.push((q, u32::try_from(e).map_err(|_| ArithError::Overflow("minkowski"))?));
        }
    }
    Ok(FactoredInteger { factors })
}
