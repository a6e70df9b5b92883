//! Dickson-style case assignment for subgroups of `GL_2(F_p)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::{least_nonresidue, mul_mod, sl2_order, Gl2Element, Line};
use super::subgroup::Subgroup;
use super::{Gl2Error, Result};

/// The five overlapping cases, resolved by the precedence
/// `ContainsSL > Borel > SplitNormalizer > NonsplitNormalizer > Exceptional`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DicksonClass {
    ContainsSL,
    Borel,
    SplitNormalizer,
    NonsplitNormalizer,
    ExceptionalA4,
    ExceptionalS4,
    ExceptionalA5,
}

impl DicksonClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ContainsSL => "ContainsSL",
            Self::Borel => "Borel",
            Self::SplitNormalizer => "SplitNormalizer",
            Self::NonsplitNormalizer => "NonsplitNormalizer",
            Self::ExceptionalA4 => "ExceptionalA4",
            Self::ExceptionalS4 => "ExceptionalS4",
            Self::ExceptionalA5 => "ExceptionalA5",
        }
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self, Self::ExceptionalA4 | Self::ExceptionalS4 | Self::ExceptionalA5)
    }
}

impl fmt::Display for DicksonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Isomorphism shape of the image in `PGL_2(F_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProjectiveType {
    Cyclic,
    Dihedral,
    A4,
    S4,
    A5,
    PSL2Full,
    PGL2Full,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupAnalysis {
    pub class: DicksonClass,
    pub det_image_order: u64,
    pub det_index: u64,
    pub projective_order: u64,
    pub projective_type: ProjectiveType,
}

/// Lines fixed setwise by every element.
pub fn stabilized_lines(g: &Subgroup) -> Vec<Line> {
    Line::all(g.p())
        .into_iter()
        .filter(|l| g.generators().iter().all(|h| l.image(h) == *l))
        .collect()
}

/// Lines fixed pointwise by every element.
pub fn pointwise_fixed_lines(g: &Subgroup) -> Vec<Line> {
    Line::all(g.p())
        .into_iter()
        .filter(|l| g.generators().iter().all(|h| h.apply(l.representative) == l.representative))
        .collect()
}

/// Permutation of [`Line::all`] induced by each generator.
fn line_permutations(g: &Subgroup) -> Vec<Vec<usize>> {
    let lines = Line::all(g.p());
    g.generators()
        .iter()
        .map(|h| lines.iter().map(|l| l.image(h).index()).collect())
        .collect()
}

/// An unordered pair of distinct lines preserved setwise, if any.
pub fn stabilized_line_pair(g: &Subgroup) -> Option<(Line, Line)> {
    let lines = Line::all(g.p());
    let perms = line_permutations(g);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ok = perms.iter().all(|perm| {
                let (a, b) = (perm[i], perm[j]);
                (a == i && b == j) || (a == j && b == i)
            });
            if ok {
                return Some((lines[i], lines[j]));
            }
        }
    }
    None
}

/// `F_{p^2} = F_p[w] / (w^2 - alpha w - beta)`.
#[derive(Clone, Copy, Debug)]
struct QuadraticField {
    p: u32,
    alpha: u32,
    beta: u32,
}

type Fp2 = (u32, u32);

impl QuadraticField {
    fn new(p: u32) -> Self {
        match least_nonresidue(p) {
            Some(eps) => Self { p, alpha: 0, beta: eps },
            // w^2 = w + 1 is irreducible over F_2.
            None => Self { p, alpha: 1, beta: 1 },
        }
    }

    fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        let vv = mul_mod(x.1, y.1, p);
        (
            (mul_mod(x.0, y.0, p) + mul_mod(self.beta, vv, p)) % p,
            (mul_mod(x.0, y.1, p) + mul_mod(x.1, y.0, p) + mul_mod(self.alpha, vv, p)) % p,
        )
    }

    fn scale(&self, s: u32, x: Fp2) -> Fp2 {
        (mul_mod(s, x.0, self.p), mul_mod(s, x.1, self.p))
    }

    fn pow(&self, mut x: Fp2, mut e: u64) -> Fp2 {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, x: Fp2) -> Fp2 {
        let q = self.p as u64 * self.p as u64;
        self.pow(x, q - 2)
    }

    fn frobenius(&self, x: Fp2) -> Fp2 {
        self.pow(x, self.p as u64)
    }

    /// Action of `g` on the line through `(t, 1)`.
    fn mobius(&self, g: &Gl2Element, t: Fp2) -> Fp2 {
        let [a, b, c, d] = g.entries();
        let num = self.add(self.scale(a, t), (b, 0));
        let den = self.add(self.scale(c, t), (d, 0));
        self.mul(num, self.inv(den))
    }
}

/// A Galois-conjugate pair `{t, t^p}` of `F_{p^2}`-lines, away from
/// `P^1(F_p)`, preserved setwise. Such a pair exists iff the subgroup sits
/// inside the normalizer of some nonsplit Cartan.
pub fn stabilized_conjugate_pair(g: &Subgroup) -> Option<(u32, u32)> {
    let p = g.p();
    let field = QuadraticField::new(p);
    for u in 0..p {
        for v in 1..p {
            let t = (u, v);
            let tbar = field.frobenius(t);
            if (tbar.0, tbar.1) < (u, v) {
                continue;
            }
            let ok = g.generators().iter().all(|h| {
                let image = field.mobius(h, t);
                image == t || image == tbar
            });
            if ok {
                return Some(t);
            }
        }
    }
    None
}

/// Conjugacy search: is there `x` with `x G x^-1` inside `target`?
pub fn contained_in_conjugate_of(g: &Subgroup, target: &Subgroup) -> Option<Gl2Element> {
    super::element::all_elements(g.p()).find(|x| {
        let xi = x.inv();
        g.generators().iter().all(|h| target.contains(&x.mul(h).mul(&xi)))
    })
}

pub fn contains_sl2(g: &Subgroup) -> bool {
    g.elements().filter(|x| x.det() == 1).count() as u64 == sl2_order(g.p())
}

pub fn det_image_order(g: &Subgroup) -> u64 {
    let mut seen = vec![false; g.p() as usize];
    for x in g.elements() {
        seen[x.det() as usize] = true;
    }
    seen.iter().filter(|&&b| b).count() as u64
}

/// `(p - 1) / #det(G)`.
pub fn det_index(g: &Subgroup) -> u64 {
    (g.p() as u64 - 1) / det_image_order(g)
}

/// Per-element projective orders, cached by conjugacy class.
fn projective_orders(g: &Subgroup) -> Vec<u64> {
    let mut cache: HashMap<(u32, u32, bool), u64> = HashMap::new();
    g.elements()
        .map(|x| *cache.entry(x.class_invariant()).or_insert_with(|| x.projective_order()))
        .collect()
}

pub fn projective_type(g: &Subgroup) -> ProjectiveType {
    let p = g.p() as u64;
    let scalars = g.scalar_count();
    let n = g.order() / scalars;
    if n == p * (p * p - 1) {
        return ProjectiveType::PGL2Full;
    }
    if p > 2 && n == p * (p * p - 1) / 2 {
        return ProjectiveType::PSL2Full;
    }
    let orders = projective_orders(g);
    // Counts in the quotient are counts in G divided by the scalar count.
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for &o in &orders {
        *hist.entry(o).or_default() += 1;
    }
    hist.values_mut().for_each(|c| *c /= scalars);

    if hist.contains_key(&n) {
        return ProjectiveType::Cyclic;
    }
    if is_dihedral(g, &orders, n) {
        return ProjectiveType::Dihedral;
    }
    match n {
        12 if !hist.contains_key(&6) => ProjectiveType::A4,
        24 if hist.contains_key(&4) && projective_center_trivial(g) => ProjectiveType::S4,
        60 if hist == BTreeMap::from([(1, 1), (2, 15), (3, 20), (5, 24)]) => ProjectiveType::A5,
        _ => ProjectiveType::Other,
    }
}

fn is_dihedral(g: &Subgroup, orders: &[u64], n: u64) -> bool {
    if n < 4 || n % 2 == 1 {
        return false;
    }
    if n == 4 {
        return orders.iter().all(|&o| o <= 2);
    }
    let k = n / 2;
    let Some(pos) = orders.iter().position(|&o| o == k) else {
        return false;
    };
    let r = Gl2Element::from_key(g.p(), g.keys()[pos]);
    let scalars: Vec<Gl2Element> = g.elements().filter(Gl2Element::is_scalar).collect();
    let mut rotation = std::collections::HashSet::new();
    let mut power = Gl2Element::identity(g.p());
    for _ in 0..k {
        for z in &scalars {
            rotation.insert(power.mul(z).key());
        }
        power = power.mul(&r);
    }
    g.keys()
        .iter()
        .zip(orders)
        .all(|(key, &o)| rotation.contains(key) || o == 2)
}

fn projective_center_trivial(g: &Subgroup) -> bool {
    g.elements().all(|x| {
        x.is_scalar()
            || g.generators().iter().any(|h| !x.mul(h).mul(&x.inv()).mul(&h.inv()).is_scalar())
    })
}

/// Applies the precedence order. Fails only when no case applies, which
/// cannot happen for `p >= 5`.
pub fn classify(g: &Subgroup) -> Result<DicksonClass> {
    if contains_sl2(g) {
        return Ok(DicksonClass::ContainsSL);
    }
    if !stabilized_lines(g).is_empty() {
        return Ok(DicksonClass::Borel);
    }
    if stabilized_line_pair(g).is_some() {
        return Ok(DicksonClass::SplitNormalizer);
    }
    if stabilized_conjugate_pair(g).is_some() {
        return Ok(DicksonClass::NonsplitNormalizer);
    }
    match (projective_type(g), g.p()) {
        (ProjectiveType::A4, _) => Ok(DicksonClass::ExceptionalA4),
        (ProjectiveType::S4, _) => Ok(DicksonClass::ExceptionalS4),
        (ProjectiveType::A5, _) => Ok(DicksonClass::ExceptionalA5),
        // PSL_2(F_3) = A4 and PGL_2(F_3) = S4.
        (ProjectiveType::PSL2Full, 3) => Ok(DicksonClass::ExceptionalA4),
        (ProjectiveType::PGL2Full, 3) => Ok(DicksonClass::ExceptionalS4),
        _ => Err(Gl2Error::Unclassifiable { p: g.p(), order: g.order(), id: g.id() }),
    }
}

/// Full analysis, cached on the subgroup.
pub fn analyze(g: &Subgroup) -> Result<SubgroupAnalysis> {
    if let Some(a) = g.cached_analysis().get() {
        return Ok(a.clone());
    }
    let det_image_order = det_image_order(g);
    let analysis = SubgroupAnalysis {
        class: classify(g)?,
        det_image_order,
        det_index: (g.p() as u64 - 1) / det_image_order,
        projective_order: g.order() / g.scalar_count(),
        projective_type: projective_type(g),
    };
    Ok(g.cached_analysis().get_or_init(|| analysis).clone())
}

#[cfg(test)]
mod tests {
    use super::super::standard::*;
    use super::super::subgroup::close_generators;
    use super::*;
    use crate::gl2::element::Vector;

    #[test]
    fn line_sets() {
        let t = Subgroup::trivial(5);
        assert_eq!(stabilized_lines(&t).len(), 6);
        assert_eq!(pointwise_fixed_lines(&t).len(), 6);

        let c = split_cartan(5).unwrap();
        let stab: Vec<_> = stabilized_lines(&c).iter().map(|l| l.representative).collect();
        assert_eq!(stab, vec![Vector(1, 0), Vector(0, 1)]);
        assert!(pointwise_fixed_lines(&c).is_empty());

        let s = sl2(5).unwrap();
        assert!(stabilized_lines(&s).is_empty());
        assert!(pointwise_fixed_lines(&s).is_empty());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&sl2(5).unwrap()).unwrap(), DicksonClass::ContainsSL);
        assert_eq!(classify(&split_cartan(7).unwrap()).unwrap(), DicksonClass::Borel);
        assert_eq!(classify(&split_normalizer(7).unwrap()).unwrap(), DicksonClass::SplitNormalizer);
        assert_eq!(
            classify(&nonsplit_normalizer(5).unwrap()).unwrap(),
            DicksonClass::NonsplitNormalizer
        );
        assert_eq!(classify(&nonsplit_cartan(11).unwrap()).unwrap(), DicksonClass::NonsplitNormalizer);
        assert_eq!(classify(&Subgroup::trivial(7)).unwrap(), DicksonClass::Borel);
        assert_eq!(classify(&borel(7).unwrap()).unwrap(), DicksonClass::Borel);
    }

    #[test]
    fn det_index_examples() {
        assert_eq!(det_index(&gl2(5).unwrap()), 1);
        assert_eq!(det_index(&sl2(7).unwrap()), 6);
        assert_eq!(det_index(&split_cartan(5).unwrap()), 1);
    }

    #[test]
    fn projective_type_examples() {
        assert_eq!(projective_type(&gl2(5).unwrap()), ProjectiveType::PGL2Full);
        assert_eq!(projective_type(&sl2(7).unwrap()), ProjectiveType::PSL2Full);
        let n = nonsplit_normalizer(7).unwrap();
        assert_eq!(projective_type(&n), ProjectiveType::Dihedral);
        assert_eq!(n.order() / n.scalar_count(), 16);
        assert_eq!(projective_type(&nonsplit_cartan(7).unwrap()), ProjectiveType::Cyclic);
        assert_eq!(projective_type(&split_normalizer(5).unwrap()), ProjectiveType::Dihedral);
        assert_eq!(projective_type(&borel(5).unwrap()), ProjectiveType::Other);
    }

    /// The binary octahedral lift in `SL_2(F_7)` has projective image S4;
    /// its index-2 subgroup (`SL_2(F_3)` shape) has image A4.
    #[test]
    fn exceptional_images() {
        // SL_2(F_5) has projective image A5 = PSL_2(F_5) but we need a proper
        // copy: inside SL_2(F_11), the binary icosahedral group.
        let p = 11;
        let sl = sl2(p).unwrap();
        let mut found = BTreeMap::new();
        // Search 2-generated subgroups with small generator pairs under a
        // fixed budget.
        let elems: Vec<_> = sl.elements().collect();
        'outer: for a in elems.iter().step_by(5) {
            for b in elems.iter().step_by(11) {
                let h = Subgroup::generated(p, vec![*a, *b]);
                if h.order() == sl.order() {
                    continue;
                }
                let t = projective_type(&h);
                if matches!(t, ProjectiveType::A4 | ProjectiveType::S4 | ProjectiveType::A5) {
                    found.entry(t).or_insert_with(|| classify(&h).unwrap());
                }
                if found.len() == 3 {
                    break 'outer;
                }
            }
        }
        assert_eq!(found.get(&ProjectiveType::A5), Some(&DicksonClass::ExceptionalA5));
        assert_eq!(found.get(&ProjectiveType::A4), Some(&DicksonClass::ExceptionalA4));
    }

    #[test]
    fn conjugate_pair_agrees_with_conjugacy_search() {
        let p = 5;
        let ns = nonsplit_normalizer(p).unwrap();
        let h = Gl2Element::new(p, [1, 2, 3, 4]).unwrap();
        let conj = ns.conjugate_by(&h);
        assert!(stabilized_conjugate_pair(&conj).is_some());
        assert!(contained_in_conjugate_of(&conj, &ns).is_some());
        let b = borel(p).unwrap();
        assert!(stabilized_conjugate_pair(&b).is_none());
        assert!(contained_in_conjugate_of(&b, &ns).is_none());
        let g = close_generators(p, &[[0, 1, 1, 0]]).unwrap();
        assert!(stabilized_conjugate_pair(&g).is_some());
    }

    #[test]
    fn analysis_fields_consistent() {
        let g = split_normalizer(7).unwrap();
        let a = analyze(&g).unwrap();
        assert_eq!(a.det_index * a.det_image_order, 6);
        assert_eq!(a.projective_order, g.order() / g.scalar_count());
        assert_eq!(analyze(&g).unwrap(), a);
    }
}
