//! Genus of `X_1(N)`, Riemann-Roch degree thresholds and numerical
//! semigroups of point degrees.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, ArithError, FactoredInteger};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("{0} must be a positive integer")]
    NotPositive(&'static str),
    #[error("semigroup needs at least one generator")]
    NoGenerators,
    #[error("genus formula gave non-integral value {value} at N = {n}")]
    NonIntegralGenus { n: u64, value: String },
    #[error("generator {0} too large for the residue table")]
    GeneratorTooLarge(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, CurveError>;

/// Exact evaluation of the closed genus formula.
pub fn genus_x1(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(CurveError::NotPositive("N"));
    }
    if n <= 4 {
        return Ok(0);
    }
    let f = FactoredInteger::factorize(n as u128)?;
    let nn = n as i128;
    let mut main = Ratio::new(nn * nn, 24);
    for &(q, _) in f.factors() {
        let q = q as i128;
        main *= Ratio::new(q * q - 1, q * q);
    }
    let mut cusp_sum: i128 = 0;
    for d in f.divisors(usize::MAX)? {
        let d = d as u64;
        cusp_sum += (euler_phi(d)? * euler_phi(n / d)?) as i128;
    }
    let g = Ratio::from_integer(1) + main - Ratio::new(cusp_sum, 4);
    if !g.is_integer() || g < Ratio::from_integer(0) {
        return Err(CurveError::NonIntegralGenus { n, value: g.to_string() });
    }
    Ok(g.to_integer() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusRow {
    pub n: u64,
    pub genus: u64,
    pub min_guaranteed_degree: u64,
}

/// Rows for `1..=bound`, computed in parallel, ordered by `N`.
pub fn genus_table(bound: u64) -> Result<Vec<GenusRow>> {
    (1..=bound)
        .into_par_iter()
        .map(|n| {
            let genus = genus_x1(n)?;
            Ok(GenusRow { n, genus, min_guaranteed_degree: degree_from_genus(genus) })
        })
        .collect()
}

fn degree_from_genus(g: u64) -> u64 {
    (2 * g).max(1)
}

/// `max(1, 2 g(X_1(N)))`: every degree from here on carries a point.
pub fn min_guaranteed_degree(n: u64) -> Result<u64> {
    Ok(degree_from_genus(genus_x1(n)?))
}

pub fn torsion_reach_search_bound(d: u64) -> u64 {
    ((24 * d) as f64).sqrt().ceil() as u64 + 24
}

/// Largest `N` whose modular curve has points in every degree `>= d`.
pub fn torsion_reach(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(CurveError::NotPositive("d"));
    }
    let table = genus_table(torsion_reach_search_bound(d))?;
    Ok(torsion_reach_in(&table, d))
}

/// Same as [`torsion_reach`] against a precomputed table.
pub fn torsion_reach_in(table: &[GenusRow], d: u64) -> u64 {
    table.iter().filter(|r| r.min_guaranteed_degree <= d).map(|r| r.n).max().unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    generators: Vec<u64>,
    gcd: u64,
}

/// Largest generator the residue table accepts after scaling.
pub const MAX_SCALED_GENERATOR: u64 = 1 << 24;

impl SemigroupSpec {
    pub fn new(generators: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut generators: Vec<u64> = generators.into_iter().collect();
        if generators.contains(&0) {
            return Err(CurveError::NotPositive("generator"));
        }
        generators.sort_unstable();
        generators.dedup();
        let gcd = generators.iter().copied().reduce(|a, b| a.gcd(&b)).ok_or(CurveError::NoGenerators)?;
        if let Some(&g) = generators.iter().find(|&&g| g / gcd > MAX_SCALED_GENERATOR) {
            return Err(CurveError::GeneratorTooLarge(g));
        }
        Ok(Self { generators, gcd })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    /// Least representable value in each residue class mod the smallest
    /// scaled generator (shortest paths on the residue graph).
    fn residue_table(&self) -> Vec<u64> {
        let scaled: Vec<u64> = self.generators.iter().map(|g| g / self.gcd).collect();
        let a = scaled[0];
        let mut dist = vec![u64::MAX; a as usize];
        dist[0] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u64, 0u64))]);
        while let Some(Reverse((w, r))) = heap.pop() {
            if w > dist[r as usize] {
                continue;
            }
            for &s in &scaled[1..] {
                let (w2, r2) = (w + s, (r + s) % a);
                if w2 < dist[r2 as usize] {
                    dist[r2 as usize] = w2;
                    heap.push(Reverse((w2, r2)));
                }
            }
        }
        dist
    }
}

pub fn representable(target: u64, spec: &SemigroupSpec) -> bool {
    if target % spec.gcd != 0 {
        return false;
    }
    let t = target / spec.gcd;
    let table = spec.residue_table();
    table[(t % table.len() as u64) as usize] <= t
}

/// Least `M` such that every multiple of the gcd from `M` on is representable.
pub fn stable_bound(spec: &SemigroupSpec) -> u64 {
    let table = spec.residue_table();
    let a = table.len() as u64;
    if a == 1 {
        return 0;
    }
    let largest = table.iter().copied().max().expect("nonempty");
    // Frobenius number of the scaled set is `largest - a`.
    spec.gcd * (largest - a + 1)
}

/// `max(M, 2g - 1 + sum d_i)`; genus zero returns the gcd.
pub fn closed_point_degree_threshold(g: u64, spec: &SemigroupSpec) -> Result<u64> {
    if g == 0 {
        return Ok(spec.gcd);
    }
    let sum = spec
        .generators
        .iter()
        .try_fold(0u64, |s, &d| s.checked_add(d))
        .ok_or(ArithError::Overflow("generator sum"))?;
    let rr = (2 * g - 1).checked_add(sum).ok_or(ArithError::Overflow("threshold"))?;
    Ok(stable_bound(spec).max(rr))
}

/// Degree from which every degree is realized by a map to the line, for a
/// curve with a rational point.
pub fn rr_degree_bound(g: u64, weierstrass: bool) -> u64 {
    match (g, weierstrass) {
        (0, _) => 1,
        (g, true) => 2 * g,
        (g, false) => g + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Genus by Riemann-Hurwitz with index and cusp count obtained by
    /// brute force in `SL_2(Z/N)`, valid for `N >= 5`.
    fn genus_oracle(n: u64) -> u64 {
        let sl: Vec<[u64; 4]> = (0..n.pow(4))
            .map(|k| [k / n.pow(3), k / n.pow(2) % n, k / n % n, k % n])
            .filter(|[a, b, c, d]| (a * d + n * n - b * c % n) % n == 1 % n)
            .collect();
        let neg = |x: u64| (n - x) % n;
        let index = sl.len() as u64 / (2 * n);
        // Double cosets {±T^b} \ SL_2 / {±T^k}: the left action fixes the
        // bottom row up to sign, the right one shifts the top-right entry.
        let mut seen = std::collections::BTreeSet::new();
        let mut cusps = 0;
        for &[a, b, c, d] in &sl {
            if seen.contains(&[a, b, c, d]) {
                continue;
            }
            cusps += 1;
            for s in [false, true] {
                let [a, b, c, d] = if s { [neg(a), neg(b), neg(c), neg(d)] } else { [a, b, c, d] };
                for x in 0..n {
                    for k in 0..n {
                        // [[1,x],[0,1]] * m * [[1,k],[0,1]]
                        let (a2, c2) = ((a + x * c) % n, c);
                        let b2 = (a2 * k + b + x * d) % n;
                        let d2 = (c * k + d) % n;
                        seen.insert([a2, b2, c2, d2]);
                    }
                }
            }
        }
        (12 + index - 6 * cusps) / 12
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_x1(4).unwrap(), 0);
        assert_eq!(genus_x1(11).unwrap(), 1);
        assert_eq!(genus_x1(13).unwrap(), 2);
        assert_eq!(genus_x1(17).unwrap(), 5);
        let zeros: Vec<u64> = (1..=40).filter(|&n| genus_x1(n).unwrap() == 0).collect();
        assert_eq!(zeros, vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12]);
        assert_eq!(genus_x1(0), Err(CurveError::NotPositive("N")));
    }

    #[test]
    fn genus_matches_riemann_hurwitz_oracle() {
        for n in 5..=24 {
            assert_eq!(genus_x1(n).unwrap(), genus_oracle(n), "N = {n}");
        }
    }

    #[test]
    fn genus_upper_bound() {
        for row in genus_table(1000).unwrap() {
            assert!(24 * row.genus <= row.n * row.n + 24, "N = {}", row.n);
        }
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_guaranteed_degree(4).unwrap(), 1);
        assert_eq!(min_guaranteed_degree(11).unwrap(), 2);
        assert_eq!(min_guaranteed_degree(17).unwrap(), 10);
    }

    #[test]
    fn reach_examples() {
        assert_eq!(torsion_reach(1).unwrap(), 12);
        assert_eq!(torsion_reach(2).unwrap(), 15);
        assert_eq!(torsion_reach(4).unwrap(), 18);
    }

    #[test]
    fn reach_search_bound_is_wide_enough() {
        let wide = genus_table(4 * torsion_reach_search_bound(300)).unwrap();
        for d in 1..=300 {
            assert_eq!(torsion_reach(d).unwrap(), torsion_reach_in(&wide, d), "d = {d}");
        }
    }

    #[test]
    fn reach_grows_like_sqrt_12d() {
        let table = genus_table(torsion_reach_search_bound(10_000)).unwrap();
        for d in 3..=10_000u64 {
            let n = torsion_reach_in(&table, d);
            assert!(n * n >= 12 * (d - 2), "d = {d}, N = {n}");
        }
    }

    fn spec(g: &[u64]) -> SemigroupSpec {
        SemigroupSpec::new(g.iter().copied()).unwrap()
    }

    #[test]
    fn semigroup_examples() {
        assert!(!representable(7, &spec(&[3, 5])));
        assert!(representable(8, &spec(&[3, 5])));
        assert!((0..100).all(|k| representable(k, &spec(&[1]))));
        assert_eq!(stable_bound(&spec(&[3, 5])), 8);
        assert_eq!(stable_bound(&spec(&[2, 4])), 0);
        assert_eq!(stable_bound(&spec(&[6, 10, 15])), 30);
        assert_eq!(spec(&[4, 2, 4]).generators(), &[2, 4]);
        assert_eq!(SemigroupSpec::new([]), Err(CurveError::NoGenerators));
        assert!(SemigroupSpec::new([0, 3]).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(closed_point_degree_threshold(1, &spec(&[1])).unwrap(), 2);
        assert_eq!(closed_point_degree_threshold(2, &spec(&[3, 5])).unwrap(), 11);
        assert_eq!(closed_point_degree_threshold(3, &spec(&[2])).unwrap(), 7);
        assert_eq!(closed_point_degree_threshold(0, &spec(&[4, 6])).unwrap(), 2);
        assert_eq!(rr_degree_bound(0, false), 1);
        assert_eq!(rr_degree_bound(3, true), 6);
        assert_eq!(rr_degree_bound(3, false), 4);
    }

    fn reachable(t: u64, gens: &[u64]) -> bool {
        t == 0 || gens.iter().any(|&g| g <= t && reachable(t - g, gens))
    }

    fn generator_sets() -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for a in 2..=9u64 {
            out.push(vec![a]);
            for b in a + 1..=9 {
                out.push(vec![a, b]);
                for c in b + 1..=9 {
                    out.push(vec![a, b, c]);
                }
            }
        }
        out
    }

    #[test]
    fn representable_matches_recursion() {
        for gens in generator_sets() {
            let s = spec(&gens);
            let mut memo = vec![false; 201];
            memo[0] = true;
            for t in 1..=200usize {
                memo[t] = gens.iter().any(|&g| g as usize <= t && memo[t - g as usize]);
            }
            for t in 0..=200u64 {
                assert_eq!(representable(t, &s), memo[t as usize], "{gens:?} {t}");
            }
            for t in 0..=40u64 {
                assert_eq!(memo[t as usize], reachable(t, &gens));
            }
        }
    }

    #[test]
    fn stable_bound_is_sharp() {
        for gens in generator_sets() {
            let s = spec(&gens);
            let m = stable_bound(&s);
            let i = s.gcd();
            let top = m + 10 * gens.iter().max().unwrap();
            assert!((m..=top).filter(|k| k % i == 0).all(|k| representable(k, &s)), "{gens:?}");
            if m > 0 {
                assert!(!representable(m - i, &s), "{gens:?}");
            }
        }
    }

    #[test]
    fn adding_a_generator_never_raises_bound() {
        for gens in generator_sets() {
            let base = stable_bound(&spec(&gens));
            for extra in 1..=20 {
                let mut more = gens.clone();
                more.push(extra);
                let s = spec(&more);
                // A new generator can lower the gcd; compare on the common lattice.
                if s.gcd() == spec(&gens).gcd() {
                    assert!(stable_bound(&s) <= base, "{more:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn representable_closed_under_addition(
            gens in proptest::collection::vec(1u64..40, 1..4),
            x in 0u64..300,
            y in 0u64..300,
        ) {
            let s = spec(&gens);
            if representable(x, &s) && representable(y, &s) {
                prop_assert!(representable(x + y, &s));
            }
        }
    }
}
