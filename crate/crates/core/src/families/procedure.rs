use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::FamilyProfile;
use super::sets::{density_upto, Clause, DensityReport, IntegerSetSpec, ShiftTable};
use super::{FamilyError, Result};
use crate::arith::{primes_upto, ArithError};

pub(crate) fn check_epsilon(eps: Ratio<u64>) -> Result<()> {
    if *eps.numer() == 0 || eps > Ratio::from_integer(1) {
        return Err(FamilyError::BadEpsilon(eps.to_string()));
    }
    Ok(())
}

/// Parses `0.05`, `1/20` or `1` into an exact rational in `(0, 1]`.
pub fn parse_epsilon(s: &str) -> Result<Ratio<u64>> {
    let bad = || FamilyError::BadEpsilon(s.to_string());
    let s = s.trim();
    let eps = if let Some((a, b)) = s.split_once('/') {
        let den: u64 = b.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ratio::new(a.trim().parse().map_err(|_| bad())?, den)
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        Ratio::new(int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?, den)
    } else {
        Ratio::from_integer(s.parse().map_err(|_| bad())?)
    };
    check_epsilon(eps).map_err(|_| bad())?;
    Ok(eps)
}

/// Exact test of `sum_l l^-n <= bound`.
fn power_sum_at_most(primes: &[u64], n: u32, bound: Ratio<u64>) -> bool {
    let approx: f64 = primes.iter().map(|&l| (l as f64).powi(-(n as i32))).sum();
    let target = *bound.numer() as f64 / *bound.denom() as f64;
    if approx < target * (1.0 - 1e-9) {
        return true;
    }
    if approx > target * (1.0 + 1e-9) {
        return false;
    }
    let powers: Vec<BigUint> = primes.iter().map(|&l| BigUint::from(l).pow(n)).collect();
    let prod: BigUint = powers.iter().product();
    let sum: BigUint = powers.iter().map(|q| &prod / q).sum();
    sum * *bound.denom() <= prod * *bound.numer()
}

/// Least `N >= 1` with `sum_{l in primes} l^-N <= bound`.
pub fn union_bound_exponent(primes: &[u64], bound: Ratio<u64>) -> Result<u32> {
    check_epsilon(bound)?;
    (1..=u64::BITS)
        .find(|&n| power_sum_at_most(primes, n, bound))
        .ok_or_else(|| ArithError::CostGuard(format!("no exponent up to 64 reaches {bound}")).into())
}

/// Consecutive primes sharing one exponent `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentRun {
    pub first: u64,
    pub last: u64,
    pub primes: u64,
    pub n: u32,
}

fn runs_of(primes: &[u64], exps: &[u32]) -> Vec<ExponentRun> {
    let mut runs: Vec<ExponentRun> = Vec::new();
    for (&l, &n) in primes.iter().zip(exps) {
        match runs.last_mut() {
            Some(r) if r.n == n => {
                r.last = l;
                r.primes += 1;
            }
            _ => runs.push(ExponentRun { first: l, last: l, primes: 1, n }),
        }
    }
    runs
}

/// Largest bit length for which `B_eps` is expanded to decimal.
pub const B_EPS_DECIMAL_BITS: f64 = 4096.0;

/// `B_eps = 1 + prod_{l <= L} l^(n_l - 1)`, kept through its exponent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentBound {
    pub log2: f64,
    /// Present when `B_eps` has at most [`B_EPS_DECIMAL_BITS`] bits.
    pub decimal: Option<String>,
}

impl ExponentBound {
    fn from_runs(primes: &[u64], exps: &[u32]) -> Self {
        let log2: f64 = primes.iter().zip(exps).map(|(&l, &n)| (n - 1) as f64 * (l as f64).log2()).sum();
        let decimal = (log2 <= B_EPS_DECIMAL_BITS).then(|| {
            let prod: BigUint = primes.iter().zip(exps).map(|(&l, &n)| BigUint::from(l).pow(n - 1)).product();
            (prod + 1u32).to_string()
        });
        Self { log2, decimal }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureReport {
    pub profile: FamilyProfile,
    pub epsilon: String,
    pub x: u64,
    #[serde(rename = "C")]
    pub cutoff: u64,
    #[serde(rename = "L")]
    pub prime_bound: u64,
    #[serde(rename = "N")]
    pub exponent: u32,
    /// `l -> n_l` for every prime `l <= L`, run-length encoded.
    pub n_map: Vec<ExponentRun>,
    pub b_eps: ExponentBound,
    pub excluded: IntegerSetSpec,
    pub shift_density: DensityReport,
    pub excluded_density: DensityReport,
    pub certified: bool,
}

impl ProcedureReport {
    pub fn n_for(&self, l: u64) -> Option<u32> {
        let i = self.n_map.partition_point(|r| r.last < l);
        self.n_map.get(i).filter(|r| r.first <= l).map(|r| r.n)
    }

    /// Whether `B_eps` here is at most `other`'s, decided exactly when one
    /// exponent vector dominates the other pointwise.
    pub fn b_eps_at_most(&self, other: &Self) -> Option<bool> {
        if dominated(&self.n_map, &other.n_map) {
            return Some(true);
        }
        if dominated(&other.n_map, &self.n_map) {
            return Some(self.n_map == other.n_map);
        }
        match (&self.b_eps.decimal, &other.b_eps.decimal) {
            (Some(a), Some(b)) => {
                let (a, b): (BigUint, BigUint) = (a.parse().ok()?, b.parse().ok()?);
                Some(a <= b)
            }
            _ => None,
        }
    }
}

/// `n_a(l) - 1 <= n_b(l) - 1` for every prime, with exponent 0 outside a
/// report's range. Both run lists cover all primes up to their `L`.
fn dominated(a: &[ExponentRun], b: &[ExponentRun]) -> bool {
    let b_end = b.last().map_or(0, |r| r.last);
    a.iter().all(|ra| {
        let inside = b
            .iter()
            .filter(|rb| rb.first <= ra.last && rb.last >= ra.first)
            .all(|rb| ra.n <= rb.n);
        inside && (ra.last <= b_end || ra.n == 1)
    })
}

/// Builds the excluded degree set and the exponent bound for `eps`.
///
/// Steps: `C` from the shift sieve at `eps/2`; `L = C + 1`; the least `N`
/// with `sum_{l <= L} l^-N <= eps/2`; `n_l` from the profile; and
/// `B_eps = 1 + prod l^(n_l - 1)`. The excluded set's density is then
/// recomputed from its clauses by an independent sieve.
pub fn exclusion_procedure(profile: &FamilyProfile, eps: Ratio<u64>, x: u64) -> Result<ProcedureReport> {
    profile.validate()?;
    check_epsilon(eps)?;
    let half = eps / 2;
    let table = ShiftTable::new(profile.p2_c, x)?;
    let cutoff = table.least_cutoff(half)?;
    let prime_bound = cutoff + 1;
    let primes = primes_upto(prime_bound);
    let exponent = union_bound_exponent(&primes, half)?;
    let exps = primes
        .par_iter()
        .map(|&l| profile.exponent_for_prime(l, exponent))
        .collect::<Result<Vec<u32>>>()?;

    let excluded = IntegerSetSpec::new([
        Clause::PrimeShift { c: profile.p2_c, cutoff },
        Clause::PrimePower { prime_bound, exponent },
    ])?;
    let excluded_density = density_upto(&excluded, x)?;
    Ok(ProcedureReport {
        profile: profile.clone(),
        epsilon: eps.to_string(),
        x,
        cutoff,
        prime_bound,
        exponent,
        n_map: runs_of(&primes, &exps),
        b_eps: ExponentBound::from_runs(&primes, &exps),
        excluded,
        shift_density: table.report(cutoff),
        certified: excluded_density.at_most(eps),
        excluded_density,
    })
}

/// `e^(2g)`: the torsion order bound implied by an exponent bound.
pub fn exponent_to_order_bound(exp_bound: u128, g: u32) -> Result<u128> {
    if exp_bound == 0 {
        return Err(FamilyError::NotPositive("exponent bound"));
    }
    if g == 0 {
        return Err(FamilyError::NotPositive("g"));
    }
    let e = g.checked_mul(2).ok_or(ArithError::Overflow("order bound"))?;
    Ok(exp_bound.checked_pow(e).ok_or(ArithError::Overflow("order bound"))?)
}
