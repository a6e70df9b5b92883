use serde::{Deserialize, Serialize};

use super::{FamilyError, Result};
use crate::arith::{checked_pow, glm_order, require_prime, ArithError};

/// Closed-form `d -> B(d)` with nonnegative coefficients, hence monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthRule {
    Constant { value: u64 },
    /// `a d + b`.
    Linear { a: u64, b: u64 },
    /// `coef d^exp`.
    Power { coef: u64, exp: u32 },
}

impl GrowthRule {
    pub fn eval(&self, d: u128) -> Result<u128> {
        let overflow = || FamilyError::Arith(ArithError::Overflow("growth bound"));
        match *self {
            GrowthRule::Constant { value } => Ok(value as u128),
            GrowthRule::Linear { a, b } => {
                (a as u128).checked_mul(d).and_then(|v| v.checked_add(b as u128)).ok_or_else(overflow)
            }
            GrowthRule::Power { coef, exp } => {
                d.checked_pow(exp).and_then(|v| v.checked_mul(coef as u128)).ok_or_else(overflow)
            }
        }
    }
}

/// `(p, N) -> n`: a point of order `p^n` forces `p^N` to divide the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum P1Rule {
    Constant { n: u32 },
    /// `a N + b`.
    Linear { a: u32, b: u32 },
    /// `coef N^exp`.
    Power { coef: u32, exp: u32 },
    /// `N + ord_p(c) + 1`.
    ValuationShift { c: u64 },
    /// Through the Merelian bound at ground degree `d`.
    Merelian { d: u64 },
    /// Through the Merelian bound after a twist, over `Q(j)` of degree `d0`.
    JField { d0: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p2_c: u64,
    pub p1_rule: P1Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merelian_b: Option<GrowthRule>,
    pub dim_g: u32,
    /// Annotation only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub si_prime_cutoff: Option<u64>,
}

impl FamilyProfile {
    pub fn validate(&self) -> Result<()> {
        if self.p2_c == 0 {
            return Err(FamilyError::NotPositive("p2_c"));
        }
        if self.dim_g == 0 {
            return Err(FamilyError::NotPositive("dim_g"));
        }
        match self.p1_rule {
            P1Rule::Merelian { d: 0 } => return Err(FamilyError::NotPositive("d")),
            P1Rule::JField { d0: 0 } => return Err(FamilyError::NotPositive("d0")),
            P1Rule::ValuationShift { c: 0 } => return Err(FamilyError::NotPositive("c")),
            P1Rule::Merelian { .. } | P1Rule::JField { .. } if self.merelian_b.is_none() => {
                return Err(FamilyError::MissingMerelianBound)
            }
            _ => {}
        }
        Ok(())
    }

    pub fn p1_exponent(&self, p: u64, big_n: u32) -> Result<u32> {
        require_prime(p)?;
        self.exponent_for_prime(p, big_n)
    }

    /// [`Self::p1_exponent`] for a `p` already known to be prime.
    pub(crate) fn exponent_for_prime(&self, p: u64, big_n: u32) -> Result<u32> {
        if big_n == 0 {
            return Err(FamilyError::NotPositive("N"));
        }
        let overflow = || FamilyError::Arith(ArithError::Overflow("p1 exponent"));
        let n = match self.p1_rule {
            P1Rule::Constant { n } => n,
            P1Rule::Linear { a, b } => a.checked_mul(big_n).and_then(|v| v.checked_add(b)).ok_or_else(overflow)?,
            P1Rule::Power { coef, exp } => {
                big_n.checked_pow(exp).and_then(|v| v.checked_mul(coef)).ok_or_else(overflow)?
            }
            P1Rule::ValuationShift { c } => big_n + valuation(c, p) + 1,
            P1Rule::Merelian { d } => p1_exponent_merelian(self, p, big_n, d)?,
            P1Rule::JField { d0 } => p1_exponent_j_field(self, p, big_n, d0)?,
        };
        if n == 0 {
            return Err(FamilyError::NotPositive("p1 exponent"));
        }
        Ok(n)
    }
}

fn valuation(mut c: u64, p: u64) -> u32 {
    let mut k = 0;
    while c % p == 0 {
        c /= p;
        k += 1;
    }
    k
}

/// Least `n` with `p^n > B(d (c p^N - 1))`, `c` the prime-to-`p` part of
/// `#GL_{2g}(F_p)`.
pub fn p1_exponent_merelian(profile: &FamilyProfile, p: u64, big_n: u32, d: u64) -> Result<u32> {
    let b = profile.merelian_b.ok_or(FamilyError::MissingMerelianBound)?;
    if d == 0 {
        return Err(FamilyError::NotPositive("d"));
    }
    let c = glm_order(2 * profile.dim_g, p, 1)?.c;
    let overflow = || FamilyError::Arith(ArithError::Overflow("Merelian argument"));
    let arg = checked_pow(p as u128, big_n, "Merelian argument")?
        .checked_mul(c)
        .map(|v| v - 1)
        .and_then(|v| v.checked_mul(d as u128))
        .ok_or_else(overflow)?;
    let target = b.eval(arg)?;
    let mut n = 1u32;
    let mut pw = p as u128;
    while pw <= target {
        pw = pw.checked_mul(p as u128).ok_or_else(overflow)?;
        n += 1;
    }
    Ok(n)
}

/// The twist to a field of degree dividing 12 costs two powers of `p`.
pub fn p1_exponent_j_field(profile: &FamilyProfile, p: u64, big_n: u32, d0: u64) -> Result<u32> {
    p1_exponent_merelian(profile, p, big_n + 2, d0)
}
