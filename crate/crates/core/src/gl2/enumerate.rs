//! Conjugacy-class representatives of subgroups of `GL_2(F_p)`.
//!
//! Exhaustive mode grows the lattice bottom-up: every nontrivial subgroup is
//! `<H, g>` for some maximal subgroup `H`, so extending each representative
//! by one element at a time reaches every class. Extensions `<H, g>` and
//! `<H, n h g h' n^-1>` (with `h, h'` in `H`, `n` normalizing `H`) are
//! conjugate, so only one `g` per orbit of that action is tried.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::contains_sl2;
use super::element::{all_elements, check_prime, gl2_order, Gl2Element};
use super::subgroup::{closure_keys, Fingerprint, KeySet, Subgroup};
use super::{Gl2Error, Result};

pub const DEFAULT_EXHAUSTIVE_CEILING: u32 = 11;
pub const SAMPLED_PRIME_LIMIT: u32 = 97;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EnumerationMode {
    Exhaustive,
    Sampled { count: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationConfig {
    pub exhaustive_ceiling: u32,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { exhaustive_ceiling: DEFAULT_EXHAUSTIVE_CEILING }
    }
}

/// Finds `x` with `x a x^-1 = b`.
pub fn conjugating_element(a: &Subgroup, b: &Subgroup) -> Option<Gl2Element> {
    if a.p() != b.p() || a.order() != b.order() || a.fingerprint() != b.fingerprint() {
        return None;
    }
    if a == b {
        return Some(Gl2Element::identity(a.p()));
    }
    // Subgroups containing SL2 are normal and pinned down by their
    // determinant image, which the fingerprint already matched.
    if contains_sl2(a) && contains_sl2(b) {
        return (a == b).then(|| Gl2Element::identity(a.p()));
    }
    all_elements(a.p()).find(|x| {
        let xi = x.inv();
        a.generators().iter().all(|h| b.contains(&x.mul(h).mul(&xi)))
    })
}

pub fn are_conjugate(a: &Subgroup, b: &Subgroup) -> bool {
    conjugating_element(a, b).is_some()
}

/// Representatives bucketed by fingerprint.
#[derive(Default)]
struct ClassTable {
    reps: Vec<Subgroup>,
    by_print: HashMap<Fingerprint, Vec<usize>>,
}

impl ClassTable {
    fn find(&self, g: &Subgroup, limit: usize) -> Option<usize> {
        self.by_print
            .get(g.fingerprint())?
            .iter()
            .copied()
            .filter(|&i| i < limit)
            .find(|&i| are_conjugate(g, &self.reps[i]))
    }

    fn insert(&mut self, g: Subgroup) -> usize {
        let i = self.reps.len();
        self.by_print.entry(g.fingerprint().clone()).or_default().push(i);
        self.reps.push(g);
        i
    }

    /// Merges candidates in order. Lookups against reps that existed before
    /// this batch run in parallel; the rest are resolved sequentially, so
    /// the outcome is independent of scheduling.
    fn merge(&mut self, candidates: Vec<Subgroup>) -> Vec<usize> {
        let before = self.reps.len();
        let known: Vec<Option<usize>> = candidates
            .par_iter()
            .map(|c| {
                let _ = c.fingerprint();
                self.find(c, before)
            })
            .collect();
        let mut fresh = Vec::new();
        for (c, hit) in candidates.into_iter().zip(known) {
            if hit.is_some() {
                continue;
            }
            let dup = self
                .by_print
                .get(c.fingerprint())
                .into_iter()
                .flatten()
                .copied()
                .filter(|&i| i >= before)
                .any(|i| are_conjugate(&c, &self.reps[i]));
            if !dup {
                fresh.push(self.insert(c));
            }
        }
        fresh
    }

    fn into_sorted(self) -> Vec<Subgroup> {
        let mut reps = self.reps;
        reps.sort_by(|a, b| {
            (a.order(), a.fingerprint(), a.keys()).cmp(&(b.order(), b.fingerprint(), b.keys()))
        });
        reps
    }
}

fn normalizer(h: &Subgroup, all: &[Gl2Element]) -> Vec<Gl2Element> {
    let members: Vec<Gl2Element> = all
        .iter()
        .copied()
        .filter(|x| {
            let xi = x.inv();
            h.generators().iter().all(|g| h.contains(&x.mul(g).mul(&xi)))
        })
        .collect();
    // Greedy generating set, seeded with H's own generators.
    let p = h.p();
    let mut gens: Vec<Gl2Element> = h.generators().to_vec();
    let (_, mut seen) = closure_keys(p, &gens);
    for x in &members {
        if !seen.contains(x.key()) {
            gens.push(*x);
            seen = closure_keys(p, &gens).1;
        }
    }
    gens
}

/// One candidate `<H, g>` per orbit of `g` under left/right multiplication
/// by `H` and conjugation by `N(H)`.
fn extensions(h: &Subgroup, all: &[Gl2Element]) -> Vec<Subgroup> {
    let p = h.p();
    let norm_gens = normalizer(h, all);
    let mut seen = KeySet::new(p);
    for &k in h.keys() {
        seen.insert(k);
    }
    let norm_invs: Vec<Gl2Element> = norm_gens.iter().map(Gl2Element::inv).collect();
    let mut out: Vec<Subgroup> = Vec::new();
    let mut stack = Vec::new();
    for g in all {
        if !seen.insert(g.key()) {
            continue;
        }
        stack.push(*g);
        while let Some(x) = stack.pop() {
            let images = h
                .generators()
                .iter()
                .flat_map(|s| [s.mul(&x), x.mul(s)])
                .chain(norm_gens.iter().zip(&norm_invs).map(|(n, ni)| n.mul(&x).mul(ni)));
            for y in images {
                if seen.insert(y.key()) {
                    stack.push(y);
                }
            }
        }
        let mut gens = h.generators().to_vec();
        gens.push(*g);
        out.push(Subgroup::generated(p, gens));
    }
    out.sort_by(|a, b| a.keys().cmp(b.keys()));
    out.dedup_by(|a, b| a.keys() == b.keys());
    out
}

fn exhaustive(p: u32) -> Vec<Subgroup> {
    let all: Vec<Gl2Element> = all_elements(p).collect();
    let mut table = ClassTable::default();
    let root = table.insert(Subgroup::trivial(p));
    let mut pending = vec![root];
    while !pending.is_empty() {
        let batches: Vec<Vec<Subgroup>> =
            pending.par_iter().map(|&i| extensions(&table.reps[i], &all)).collect();
        pending = table.merge(batches.into_iter().flatten().collect());
    }
    table.into_sorted()
}

fn random_element(p: u32, rng: &mut ChaCha8Rng) -> Gl2Element {
    loop {
        let m = [0; 4].map(|_: u32| rng.gen_range(0..p));
        let g = Gl2Element::from_raw(p, m);
        if g.det() != 0 {
            return g;
        }
    }
}

fn sampled(p: u32, count: u32, seed: u64) -> Vec<Subgroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<[Gl2Element; 2]> =
        (0..count).map(|_| [random_element(p, &mut rng), random_element(p, &mut rng)]).collect();
    let mut table = ClassTable::default();
    for chunk in pairs.chunks(64) {
        let candidates: Vec<Subgroup> =
            chunk.par_iter().map(|pair| Subgroup::generated(p, pair.to_vec())).collect();
        table.merge(candidates);
    }
    table.into_sorted()
}

/// Conjugacy-class representatives, sorted by `(order, fingerprint, keys)`.
pub fn enumerate_subgroups(
    p: u32,
    mode: EnumerationMode,
    config: EnumerationConfig,
) -> Result<Vec<Subgroup>> {
    check_prime(p)?;
    match mode {
        EnumerationMode::Exhaustive => {
            if p > config.exhaustive_ceiling {
                let group_order = gl2_order(p);
                return Err(Gl2Error::CeilingExceeded {
                    p,
                    ceiling: config.exhaustive_ceiling,
                    group_order,
                    estimated_work: group_order.saturating_mul(group_order),
                });
            }
            Ok(exhaustive(p))
        }
        EnumerationMode::Sampled { count, seed } => {
            if p > SAMPLED_PRIME_LIMIT {
                return Err(Gl2Error::PrimeTooLarge { p, max: SAMPLED_PRIME_LIMIT });
            }
            Ok(sampled(p, count, seed))
        }
    }
}
