//! The standard subgroups of `GL_2(F_p)` in a fixed basis.

use serde::Serialize;

use super::element::{all_elements, check_prime, least_nonresidue, mul_mod, Gl2Element};
use super::subgroup::Subgroup;
use super::{Gl2Error, Result};

fn require_odd(p: u32, what: &'static str) -> Result<()> {
    check_prime(p)?;
    if p == 2 {
        return Err(Gl2Error::CharacteristicTwo(what));
    }
    Ok(())
}

fn build(p: u32, elems: Vec<Gl2Element>) -> Subgroup {
    Subgroup::from_elements(p, elems).expect("standard subgroup is closed")
}

/// Diagonal matrices `diag(a, b)`.
pub fn split_cartan(p: u32) -> Result<Subgroup> {
    require_odd(p, "split Cartan")?;
    let elems = (1..p).flat_map(|a| (1..p).map(move |b| Gl2Element::diag(p, a, b))).collect();
    Ok(build(p, elems))
}

/// Diagonal plus antidiagonal matrices: the stabilizer of `{<e1>, <e2>}`.
pub fn split_normalizer(p: u32) -> Result<Subgroup> {
    require_odd(p, "split Cartan normalizer")?;
    let elems = (1..p)
        .flat_map(|a| (1..p).flat_map(move |b| [Gl2Element::diag(p, a, b), Gl2Element::antidiag(p, a, b)]))
        .collect();
    Ok(build(p, elems))
}

fn nonsplit_elements(p: u32) -> Vec<Gl2Element> {
    let eps = least_nonresidue(p).expect("odd prime");
    (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0))
        .map(|(a, b)| Gl2Element::from_raw(p, [a, mul_mod(eps, b, p), b, a]))
        .collect()
}

/// `{[[a, eps b], [b, a]]}` with `eps` the least non-residue: multiplication
/// on `F_p(sqrt eps)` in the basis `1, sqrt eps`.
pub fn nonsplit_cartan(p: u32) -> Result<Subgroup> {
    require_odd(p, "nonsplit Cartan")?;
    Ok(build(p, nonsplit_elements(p)))
}

/// The nonsplit Cartan together with its coset through `diag(1, -1)`.
pub fn nonsplit_normalizer(p: u32) -> Result<Subgroup> {
    require_odd(p, "nonsplit Cartan normalizer")?;
    let sigma = Gl2Element::diag(p, 1, p - 1);
    let cartan = nonsplit_elements(p);
    let coset: Vec<_> = cartan.iter().map(|g| g.mul(&sigma)).collect();
    Ok(build(p, cartan.into_iter().chain(coset).collect()))
}

/// Upper triangular matrices: the stabilizer of `<e1>`.
pub fn borel(p: u32) -> Result<Subgroup> {
    check_prime(p)?;
    let elems = (1..p)
        .flat_map(|a| (0..p).flat_map(move |b| (1..p).map(move |d| Gl2Element::from_raw(p, [a, b, 0, d]))))
        .collect();
    Ok(build(p, elems))
}

/// Generated by the two elementary transvections.
pub fn sl2(p: u32) -> Result<Subgroup> {
    check_prime(p)?;
    Ok(Subgroup::generated(
        p,
        vec![Gl2Element::from_raw(p, [1, 1, 0, 1]), Gl2Element::from_raw(p, [1, 0, 1, 1])],
    ))
}

/// The whole group.
pub fn gl2(p: u32) -> Result<Subgroup> {
    check_prime(p)?;
    let g = super::element::primitive_root(p);
    let gens = vec![
        Gl2Element::from_raw(p, [1, 1, 0, 1]),
        Gl2Element::from_raw(p, [1, 0, 1, 1]),
        Gl2Element::diag(p, g, 1),
    ];
    let out = Subgroup::generated(p, gens);
    debug_assert_eq!(out.order(), all_elements(p).count() as u64);
    Ok(out)
}

/// Result bundle of [`standard_subgroups`].
#[derive(Debug, Clone)]
pub struct StandardSubgroups {
    pub split_cartan: Subgroup,
    pub split_normalizer: Subgroup,
    pub nonsplit_cartan: Subgroup,
    pub nonsplit_normalizer: Subgroup,
    pub borel: Subgroup,
    pub sl2: Subgroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StandardOrders {
    pub split_cartan: u64,
    pub split_normalizer: u64,
    pub nonsplit_cartan: u64,
    pub nonsplit_normalizer: u64,
    pub borel: u64,
    pub sl2: u64,
}

impl StandardOrders {
    /// The closed-form counts.
    pub fn expected(p: u32) -> Self {
        let p = p as u64;
        Self {
            split_cartan: (p - 1).pow(2),
            split_normalizer: 2 * (p - 1).pow(2),
            nonsplit_cartan: p * p - 1,
            nonsplit_normalizer: 2 * (p * p - 1),
            borel: p * (p - 1).pow(2),
            sl2: p * (p * p - 1),
        }
    }
}

impl StandardSubgroups {
    pub fn orders(&self) -> StandardOrders {
        StandardOrders {
            split_cartan: self.split_cartan.order(),
            split_normalizer: self.split_normalizer.order(),
            nonsplit_cartan: self.nonsplit_cartan.order(),
            nonsplit_normalizer: self.nonsplit_normalizer.order(),
            borel: self.borel.order(),
            sl2: self.sl2.order(),
        }
    }
}

pub fn standard_subgroups(p: u32) -> Result<StandardSubgroups> {
    require_odd(p, "standard subgroups")?;
    Ok(StandardSubgroups {
        split_cartan: split_cartan(p)?,
        split_normalizer: split_normalizer(p)?,
        nonsplit_cartan: nonsplit_cartan(p)?,
        nonsplit_normalizer: nonsplit_normalizer(p)?,
        borel: borel(p)?,
        sl2: sl2(p)?,
    })
}
