//! Action of subgroups of `GL_2(F_p)` on the nonzero vectors of `F_p^2`,
//! and finite checks of the orbit-size divisibilities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::gl2::classify::{analyze, pointwise_fixed_lines};
use crate::gl2::element::inv_mod;
use crate::gl2::standard::{nonsplit_normalizer, split_normalizer};
use crate::gl2::{DicksonClass, Gl2Element, Gl2Error, Line, ProjectiveType, Subgroup, Vector};

pub type Result<T> = std::result::Result<T, Gl2Error>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Lexicographically least member.
    pub representative: Vector,
    pub members: Vec<Vector>,
}

impl Orbit {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }
}

/// Orbits on `F_p^2 \ {0}`, ordered by representative.
pub fn orbit_partition(g: &Subgroup) -> Vec<Orbit> {
    let p = g.p();
    let mut seen = vec![false; (p * p) as usize];
    let mut out = Vec::new();
    for v in Vector::nonzero(p) {
        if seen[v.index(p)] {
            continue;
        }
        seen[v.index(p)] = true;
        let mut members = vec![v];
        let mut i = 0;
        while i < members.len() {
            let w = members[i];
            for h in g.generators() {
                let u = h.apply(w);
                if !seen[u.index(p)] {
                    seen[u.index(p)] = true;
                    members.push(u);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        out.push(Orbit { representative: v, members });
    }
    out
}

pub fn orbit_sizes(g: &Subgroup) -> Vec<u64> {
    let mut sizes: Vec<u64> = orbit_partition(g).iter().map(Orbit::size).collect();
    sizes.sort_unstable();
    sizes
}

pub fn stabilizer(g: &Subgroup, v: Vector) -> Subgroup {
    assert!(!v.is_zero(), "stabilizer of the zero vector");
    let fixed: Vec<Gl2Element> = g.elements().filter(|h| h.apply(v) == v).collect();
    Subgroup::from_elements(g.p(), fixed).expect("stabilizer is a subgroup")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation { vector: Vector, orbit_size: u64 },
    NotApplicable,
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Violation { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Violation { .. } => "violation",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

/// Arithmetic reading of the orbit sizes for a given `d0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corollary {
    pub d0: u64,
    pub c: u64,
    /// Whether `i | d0`, the arithmetic input the conclusion relies on.
    pub index_divides_d0: bool,
    /// Whether `(p - 1) | c * d0 * |orbit|` for every orbit.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub p: u32,
    pub subgroup_id: String,
    pub order: u64,
    pub class: DicksonClass,
    pub det_index: u64,
    pub orbit_sizes: Vec<u64>,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corollary: Option<Corollary>,
}

fn divisibility_target(class: DicksonClass) -> bool {
    matches!(
        class,
        DicksonClass::ContainsSL | DicksonClass::SplitNormalizer | DicksonClass::NonsplitNormalizer
    )
}

/// Checks `(p - 1) | 2 i [G : Stab(v)]` for the classes where it is claimed.
pub fn verify_case_divisibility(g: &Subgroup) -> Result<OrbitReport> {
    verify_case_divisibility_with(g, None)
}

pub fn verify_case_divisibility_with(g: &Subgroup, d0: Option<u64>) -> Result<OrbitReport> {
    let analysis = analyze(g)?;
    let p = g.p();
    let pm1 = p as u64 - 1;
    let i = analysis.det_index;
    let orbits = orbit_partition(g);
    let verdict = if divisibility_target(analysis.class) {
        orbits
            .iter()
            .find(|o| (2 * i * o.size()) % pm1 != 0)
            .map(|o| Verdict::Violation { vector: o.representative, orbit_size: o.size() })
            .unwrap_or(Verdict::Pass)
    } else {
        Verdict::NotApplicable
    };
    let corollary = d0.filter(|_| divisibility_target(analysis.class)).map(|d0| {
        let c = if analysis.class == DicksonClass::ContainsSL { 1 } else { 2 };
        Corollary {
            d0,
            c,
            index_divides_d0: d0 % i == 0,
            holds: orbits.iter().all(|o| (c * d0 * o.size()) % pm1 == 0),
        }
    });
    let mut orbit_sizes: Vec<u64> = orbits.iter().map(Orbit::size).collect();
    orbit_sizes.sort_unstable();
    Ok(OrbitReport {
        p,
        subgroup_id: g.id(),
        order: g.order(),
        class: analysis.class,
        det_index: i,
        orbit_sizes,
        verdict,
        corollary,
    })
}

/// Every subgroup of a small group, as joins of its cyclic subgroups.
fn all_subgroups(g: &Subgroup) -> Vec<Subgroup> {
    let p = g.p();
    let mut cyclic: Vec<Subgroup> = g.elements().map(|x| Subgroup::generated(p, vec![x])).collect();
    cyclic.sort_by(|a, b| a.keys().cmp(b.keys()));
    cyclic.dedup();
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    let trivial = Subgroup::trivial(p);
    found.insert(trivial.keys().to_vec());
    let mut out = vec![trivial];
    let mut i = 0;
    while i < out.len() {
        for c in &cyclic {
            if c.is_subgroup_of(&out[i]) {
                continue;
            }
            let mut gens = out[i].generators().to_vec();
            gens.extend_from_slice(c.generators());
            let joined = Subgroup::generated(p, gens);
            if found.insert(joined.keys().to_vec()) {
                out.push(joined);
            }
        }
        i += 1;
    }
    out.sort_by(|a, b| (a.order(), a.keys()).cmp(&(b.order(), b.keys())));
    out
}

fn pointwise_stabilizer(g: &Subgroup, line: &Line) -> Subgroup {
    stabilizer(g, line.representative)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitShape {
    Trivial,
    /// `{diag(1, b)}` fixing `<e1>`.
    FixesFirst,
    /// `{diag(a, 1)}` fixing `<e2>`.
    FixesSecond,
    /// `{I, antidiag(c, c^-1)}` fixing `<(c, 1)>`.
    Swap { c: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitLineCheck {
    pub line: Vector,
    pub stabilizer_order: u64,
    pub subgroups_checked: usize,
    pub shapes: Vec<SplitShape>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitLemmaReport {
    pub p: u32,
    pub lines: Vec<SplitLineCheck>,
    pub pass: bool,
}

fn split_shape(h: &Subgroup, line: &Line) -> Option<SplitShape> {
    let p = h.p();
    if h.order() == 1 {
        return Some(SplitShape::Trivial);
    }
    let all = |f: &dyn Fn([u32; 4]) -> bool| h.elements().all(|x| f(x.entries()));
    match line.representative {
        Vector(1, 0) if all(&|[a, b, c, _]| a == 1 && b == 0 && c == 0) => Some(SplitShape::FixesFirst),
        Vector(0, 1) if all(&|[_, b, c, d]| d == 1 && b == 0 && c == 0) => Some(SplitShape::FixesSecond),
        Vector(1, y) if y != 0 => {
            // <(1, y)> = <(c, 1)> with c = y^-1.
            let c = inv_mod(y, p);
            let swap = Gl2Element::antidiag(p, c, inv_mod(c, p));
            (h.order() == 2 && h.contains(&swap)).then_some(SplitShape::Swap { c })
        }
        _ => None,
    }
}

/// Every subgroup of the standard split normalizer fixing a line pointwise
/// has one of the three shapes.
pub fn verify_lemma_split(p: u32) -> Result<SplitLemmaReport> {
    let n = split_normalizer(p)?;
    let lines: Vec<SplitLineCheck> = Line::all(p)
        .iter()
        .map(|line| {
            let s = pointwise_stabilizer(&n, line);
            let subs = all_subgroups(&s);
            let shapes: Vec<Option<SplitShape>> = subs.iter().map(|h| split_shape(h, line)).collect();
            let pass = shapes.iter().all(Option::is_some)
                && subs.iter().all(|h| pointwise_fixed_lines(h).contains(line));
            let mut shapes: Vec<SplitShape> = shapes.into_iter().flatten().collect();
            shapes.dedup();
            SplitLineCheck {
                line: line.representative,
                stabilizer_order: s.order(),
                subgroups_checked: subs.len(),
                shapes,
                pass,
            }
        })
        .collect();
    let pass = lines.iter().all(|l| l.pass);
    Ok(SplitLemmaReport { p, lines, pass })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonsplitLemmaReport {
    pub p: u32,
    pub stabilizer_orders: Vec<u64>,
    pub max_order: u64,
    pub pass: bool,
}

/// Pointwise stabilizers of lines in the standard nonsplit normalizer have
/// order at most 2.
pub fn verify_lemma_nonsplit(p: u32) -> Result<NonsplitLemmaReport> {
    let n = nonsplit_normalizer(p)?;
    let stabilizer_orders: Vec<u64> =
        Line::all(p).iter().map(|l| pointwise_stabilizer(&n, l).order()).collect();
    let max_order = stabilizer_orders.iter().copied().max().unwrap_or(1);
    Ok(NonsplitLemmaReport { p, stabilizer_orders, max_order, pass: max_order <= 2 })
}

/// Largest prime compatible with an exceptional projective image over a
/// base field of degree `d0`.
pub fn exceptional_prime_bound(kind: ProjectiveType, d0: u64) -> Option<u64> {
    let k = match kind {
        ProjectiveType::A4 => 9,
        ProjectiveType::S4 => 12,
        ProjectiveType::A5 => 15,
        _ => return None,
    };
    d0.checked_mul(k)?.checked_add(1)
}
