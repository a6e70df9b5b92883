use std::sync::atomic::{AtomicU32, Ordering};

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FamilyError, Result};
use crate::arith::{is_prime, primes_upto, ArithError, FactoredInteger};

/// Largest cutoff any sieve here will allocate for.
pub const MAX_CUTOFF_X: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Clause {
    /// `{d : m | d}`.
    Div { m: u64 },
    /// `{d : some prime l has l - 1 > C and (l - 1) | c d}`.
    PrimeShift {
        c: u64,
        #[serde(rename = "C")]
        cutoff: u64,
    },
    /// `{d : l^N | d for some prime l <= L}`.
    PrimePower {
        #[serde(rename = "L")]
        prime_bound: u64,
        #[serde(rename = "N")]
        exponent: u32,
    },
}

impl Clause {
    /// Membership by trial over the divisors of `c d`.
    pub fn contains(&self, d: u64) -> Result<bool> {
        match *self {
            Clause::Div { m } => Ok(d % m == 0),
            Clause::PrimeShift { c, cutoff } => {
                let cd = (c as u128) * (d as u128);
                let divisors = FactoredInteger::factorize(cd)?.divisors(usize::MAX)?;
                Ok(divisors.into_iter().any(|t| t > cutoff as u128 && is_prime((t + 1) as u64)))
            }
            Clause::PrimePower { prime_bound, exponent } => Ok(FactoredInteger::factorize(d as u128)?
                .factors()
                .iter()
                .any(|&(q, e)| q <= prime_bound && e >= exponent)),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Clause::Div { m: 0 } => Err(FamilyError::NotPositive("m")),
            Clause::PrimeShift { c: 0, .. } => Err(FamilyError::NotPositive("c")),
            Clause::PrimePower { exponent: 0, .. } => Err(FamilyError::NotPositive("N")),
            _ => Ok(()),
        }
    }
}

/// A finite union of clauses, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct IntegerSetSpec {
    clauses: Vec<Clause>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    clauses: Vec<Clause>,
}

impl TryFrom<RawSpec> for IntegerSetSpec {
    type Error = FamilyError;

    fn try_from(raw: RawSpec) -> Result<Self> {
        Self::new(raw.clauses)
    }
}

impl IntegerSetSpec {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Result<Self> {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        for c in &clauses {
            c.validate()?;
        }
        clauses.sort_unstable();
        clauses.dedup();
        Ok(Self { clauses })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn contains(&self, d: u64) -> Result<bool> {
        for c in &self.clauses {
            if c.contains(d)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Membership flags for `0..=x` (index 0 unused).
    pub fn sieve(&self, x: u64) -> Result<Vec<bool>> {
        check_cutoff(x)?;
        let mut marks = vec![false; x as usize + 1];
        // Divisibility clauses first so the shift sieve can skip their multiples.
        for clause in &self.clauses {
            match *clause {
                Clause::Div { m } => mark_multiples(&mut marks, m),
                Clause::PrimePower { prime_bound, exponent } => {
                    for l in primes_upto(prime_bound.min(x)) {
                        match l.checked_pow(exponent) {
                            Some(m) if m <= x => mark_multiples(&mut marks, m),
                            _ => break,
                        }
                    }
                }
                Clause::PrimeShift { .. } => {}
            }
        }
        for clause in &self.clauses {
            if let Clause::PrimeShift { c, cutoff } = *clause {
                mark_prime_shift(&mut marks, c, cutoff)?;
            }
        }
        Ok(marks)
    }
}

fn check_cutoff(x: u64) -> Result<()> {
    if x == 0 {
        return Err(FamilyError::NotPositive("x"));
    }
    if x > MAX_CUTOFF_X {
        return Err(ArithError::CostGuard(format!("cutoff {x} exceeds {MAX_CUTOFF_X}")).into());
    }
    Ok(())
}

fn mark_multiples(marks: &mut [bool], step: u64) {
    let step = step as usize;
    if step < marks.len() && !marks[step] {
        for k in (step..marks.len()).step_by(step) {
            marks[k] = true;
        }
    }
}

/// Primes `l` with `cutoff < l - 1 <= bound - 1`, ascending.
fn shifted_primes(cutoff: u64, bound: u64) -> Vec<u64> {
    let lo = cutoff.saturating_add(2);
    if lo > bound {
        return Vec::new();
    }
    primal::Sieve::new(bound as usize)
        .primes_from(lo as usize)
        .map(|q| q as u64)
        .take_while(|&q| q <= bound)
        .collect()
}

fn shift_bound(c: u64, x: u64) -> Result<u64> {
    c.checked_mul(x)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= u32::MAX as u64)
        .ok_or_else(|| ArithError::CostGuard(format!("prime range c*x+1 with c = {c}, x = {x}")).into())
}

/// `(l - 1) | c d` iff `d` is a multiple of `(l - 1) / gcd(l - 1, c)`. A
/// step that is already marked has all its multiples marked.
fn mark_prime_shift(marks: &mut [bool], c: u64, cutoff: u64) -> Result<()> {
    let x = marks.len() as u64 - 1;
    for l in shifted_primes(cutoff, shift_bound(c, x)?) {
        let t = l - 1;
        mark_multiples(marks, t / t.gcd(&c));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub x: u64,
    pub count: u64,
    /// Reduced `count/x`.
    pub density: String,
    pub approx: f64,
}

impl DensityReport {
    pub fn new(x: u64, count: u64) -> Self {
        let r = Ratio::new(count, x);
        Self { x, count, density: format!("{}/{}", r.numer(), r.denom()), approx: count as f64 / x as f64 }
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.x)
    }

    pub fn at_most(&self, eps: Ratio<u64>) -> bool {
        density_at_most(self.count, self.x, eps)
    }
}

pub(crate) fn density_at_most(count: u64, x: u64, eps: Ratio<u64>) -> bool {
    count as u128 * *eps.denom() as u128 <= *eps.numer() as u128 * x as u128
}

pub fn density_upto(spec: &IntegerSetSpec, x: u64) -> Result<DensityReport> {
    let marks = spec.sieve(x)?;
    Ok(DensityReport::new(x, marks[1..].iter().filter(|&&b| b).count() as u64))
}

pub fn erdos_wagstaff_set(c: u64, cutoff: u64, x: u64) -> Result<(IntegerSetSpec, DensityReport)> {
    let spec = IntegerSetSpec::new([Clause::PrimeShift { c, cutoff }])?;
    let report = density_upto(&spec, x)?;
    Ok((spec, report))
}

/// For each `d <= x`, the largest `l - 1` over primes `l` with
/// `(l - 1) | c d`. Then `d` lies in the shift set with cutoff `C` exactly
/// when its entry exceeds `C`, so one sieve answers every cutoff.
pub struct ShiftTable {
    c: u64,
    x: u64,
    largest: Vec<u32>,
    sorted: Vec<u32>,
}

impl ShiftTable {
    pub fn new(c: u64, x: u64) -> Result<Self> {
        if c == 0 {
            return Err(FamilyError::NotPositive("c"));
        }
        check_cutoff(x)?;
        let primes = shifted_primes(0, shift_bound(c, x)?);
        let cells: Vec<AtomicU32> = (0..=x).map(|_| AtomicU32::new(0)).collect();
        primes.par_iter().for_each(|&l| {
            let t = l - 1;
            let step = (t / t.gcd(&c)) as usize;
            for k in (step..cells.len()).step_by(step) {
                cells[k].fetch_max(t as u32, Ordering::Relaxed);
            }
        });
        let largest: Vec<u32> = cells.into_iter().map(AtomicU32::into_inner).collect();
        let mut sorted = largest[1..].to_vec();
        sorted.par_sort_unstable();
        Ok(Self { c, x, largest, sorted })
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn largest_shift(&self, d: u64) -> u32 {
        self.largest[d as usize]
    }

    pub fn count_above(&self, cutoff: u64) -> u64 {
        let at_most = self.sorted.partition_point(|&v| v as u64 <= cutoff);
        (self.sorted.len() - at_most) as u64
    }

    pub fn report(&self, cutoff: u64) -> DensityReport {
        DensityReport::new(self.x, self.count_above(cutoff))
    }

    /// Least `C` whose shift set has density at most `eps`: doubling, then
    /// bisection. Density is nonincreasing in `C`, so this is the global least.
    pub fn least_cutoff(&self, eps: Ratio<u64>) -> Result<u64> {
        let ok = |cutoff: u64| density_at_most(self.count_above(cutoff), self.x, eps);
        if ok(0) {
            return Ok(0);
        }
        // Past c x every shift set is empty.
        let max_c = self.c * self.x;
        let mut hi = 1u64;
        while !ok(hi) {
            if hi > max_c {
                return Err(FamilyError::CutoffNotFound {
                    epsilon: eps.to_string(),
                    c: self.c,
                    x: self.x,
                    max_c,
                });
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

pub fn find_cutoff_c(eps: Ratio<u64>, c: u64, x: u64) -> Result<u64> {
    super::procedure::check_epsilon(eps)?;
    ShiftTable::new(c, x)?.least_cutoff(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_ew_count(c: u64, cutoff: u64, x: u64) -> u64 {
        (1..=x)
            .filter(|&d| (2..=c * d + 1).any(|l| is_prime(l) && l - 1 > cutoff && (c * d) % (l - 1) == 0))
            .count() as u64
    }

    #[test]
    fn divisibility_densities() {
        let two = IntegerSetSpec::new([Clause::Div { m: 2 }]).unwrap();
        assert_eq!(density_upto(&two, 1_000_000).unwrap().ratio(), Ratio::new(1, 2));
        let nine = IntegerSetSpec::new([Clause::Div { m: 9 }]).unwrap();
        let r = density_upto(&nine, 900_000).unwrap();
        assert_eq!((r.ratio(), r.density.as_str()), (Ratio::new(1, 9), "1/9"));
    }

    #[test]
    fn ew_matches_brute_force() {
        for (c, cutoff, x) in [(1, 1, 100), (2, 4, 100), (1, 10, 1000), (3, 0, 300), (12, 30, 1000)] {
            let (_, r) = erdos_wagstaff_set(c, cutoff, x).unwrap();
            assert_eq!(r.count, brute_ew_count(c, cutoff, x), "c={c} C={cutoff} x={x}");
        }
        let (_, r) = erdos_wagstaff_set(1, 1, 100).unwrap();
        assert!((2..=100).step_by(2).all(|d| Clause::PrimeShift { c: 1, cutoff: 1 }.contains(d).unwrap()));
        assert!(r.count >= 50);
        assert_eq!(erdos_wagstaff_set(1, 1_000_000, 10_000).unwrap().1.count, 0);
    }

    #[test]
    fn production_sieve_extends_brute_force() {
        let spec = IntegerSetSpec::new([Clause::PrimeShift { c: 1, cutoff: 10 }]).unwrap();
        let marks = spec.sieve(100_000).unwrap();
        for d in 1..=1000u64 {
            assert_eq!(marks[d as usize], spec.contains(d).unwrap());
        }
        let r = density_upto(&spec, 100_000).unwrap();
        let table = ShiftTable::new(1, 100_000).unwrap();
        assert_eq!(r.count, table.count_above(10));
    }

    #[test]
    fn sieve_matches_membership_loop() {
        let specs = [
            vec![Clause::Div { m: 6 }, Clause::PrimeShift { c: 2, cutoff: 20 }],
            vec![Clause::Div { m: 4 }, Clause::Div { m: 9 }],
            vec![Clause::PrimeShift { c: 144, cutoff: 500 }, Clause::Div { m: 49 }],
            vec![Clause::PrimePower { prime_bound: 7, exponent: 2 }, Clause::PrimeShift { c: 3, cutoff: 50 }],
            vec![Clause::PrimePower { prime_bound: 1000, exponent: 3 }],
            vec![],
        ];
        for clauses in specs {
            let spec = IntegerSetSpec::new(clauses).unwrap();
            let marks = spec.sieve(1000).unwrap();
            let naive = (1..=1000u64).filter(|&d| spec.contains(d).unwrap()).count() as u64;
            assert_eq!(density_upto(&spec, 1000).unwrap().count, naive, "{spec:?}");
            assert_eq!(marks[1..].iter().filter(|&&b| b).count() as u64, naive);
        }
    }

    #[test]
    fn table_agrees_with_direct_sieve() {
        for c in [1, 2, 6, 144] {
            let table = ShiftTable::new(c, 5000).unwrap();
            for cutoff in [0, 1, 5, 40, 300, 4000, 100_000] {
                let (_, r) = erdos_wagstaff_set(c, cutoff, 5000).unwrap();
                assert_eq!(table.count_above(cutoff), r.count, "c={c} C={cutoff}");
            }
        }
    }

    #[test]
    fn ew_monotone_in_cutoff_and_c() {
        let x = 20_000;
        for c in [1, 2, 4, 12] {
            let t = ShiftTable::new(c, x).unwrap();
            let counts: Vec<u64> = [0, 1, 10, 100, 1000, 10_000].iter().map(|&k| t.count_above(k)).collect();
            assert!(counts.windows(2).all(|w| w[0] >= w[1]), "c={c} {counts:?}");
        }
        for cutoff in [0, 10, 100, 1000] {
            let counts: Vec<u64> =
                [1, 2, 4, 12, 144].iter().map(|&c| erdos_wagstaff_set(c, cutoff, x).unwrap().1.count).collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]), "C={cutoff} {counts:?}");
        }
    }

    #[test]
    fn cutoff_search() {
        assert_eq!(find_cutoff_c(Ratio::new(1, 1), 7, 1000).unwrap(), 0);
        let x = 100_000;
        let eps = Ratio::new(2, 5);
        let cut = find_cutoff_c(eps, 1, x).unwrap();
        assert!(erdos_wagstaff_set(1, cut, x).unwrap().1.at_most(eps));
        assert!(cut == 0 || !erdos_wagstaff_set(1, cut - 1, x).unwrap().1.at_most(eps));
        let t = ShiftTable::new(2, x).unwrap();
        let a = t.least_cutoff(Ratio::new(1, 10)).unwrap();
        let b = t.least_cutoff(Ratio::new(1, 5)).unwrap();
        assert!(a >= b);
        assert!(find_cutoff_c(Ratio::new(0, 1), 1, 10).is_err());
    }

    #[test]
    fn spec_json_is_canonical() {
        let json = r#"{"clauses":[{"kind":"prime_shift","c":2,"C":5},{"kind":"div","m":3},{"kind":"div","m":3}]}"#;
        let spec: IntegerSetSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.clauses(), &[Clause::Div { m: 3 }, Clause::PrimeShift { c: 2, cutoff: 5 }]);
        assert!(serde_json::from_str::<IntegerSetSpec>(r#"{"clauses":[{"kind":"div","m":0}]}"#).is_err());
        let back: IntegerSetSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
