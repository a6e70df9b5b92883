use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::classify::SubgroupAnalysis;
use super::element::{check_prime, gl2_order, Gl2Element};
use super::{Gl2Error, Result};

/// Bitset over the packed key space `0..p^4`.
#[derive(Clone)]
pub(crate) struct KeySet {
    words: Vec<u64>,
}

impl KeySet {
    pub(crate) fn new(p: u32) -> Self {
        let bits = (p as usize).pow(4);
        Self { words: vec![0; bits.div_ceil(64)] }
    }

    #[inline]
    pub(crate) fn contains(&self, key: u32) -> bool {
        self.words[(key >> 6) as usize] >> (key & 63) & 1 == 1
    }

    /// Returns true when the key was newly inserted.
    #[inline]
    pub(crate) fn insert(&mut self, key: u32) -> bool {
        let w = &mut self.words[(key >> 6) as usize];
        let bit = 1u64 << (key & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }
}

/// Breadth-first closure under right multiplication by the generators,
/// starting from the identity.
pub(crate) fn closure_keys(p: u32, gens: &[Gl2Element]) -> (Vec<u32>, KeySet) {
    let mut seen = KeySet::new(p);
    let id = Gl2Element::identity(p);
    seen.insert(id.key());
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y.key()) {
                elems.push(y);
            }
        }
        i += 1;
    }
    let mut keys: Vec<u32> = elems.iter().map(Gl2Element::key).collect();
    keys.sort_unstable();
    (keys, seen)
}

/// A subgroup of `GL_2(F_p)` held as an explicit, sorted element set.
#[derive(Clone)]
pub struct Subgroup {
    p: u32,
    keys: Vec<u32>,
    generators: Vec<Gl2Element>,
    analysis: OnceLock<SubgroupAnalysis>,
    fingerprint: OnceLock<Fingerprint>,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subgroup")
            .field("p", &self.p)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.keys == other.keys
    }
}

impl Eq for Subgroup {}

/// Closure of a list of raw integer matrices; each is reduced mod `p`.
pub fn close_generators(p: u32, gens: &[[i64; 4]]) -> Result<Subgroup> {
    check_prime(p)?;
    let gens = gens
        .iter()
        .map(|&m| Gl2Element::new(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Subgroup::generated(p, gens))
}

impl Subgroup {
    /// Smallest subgroup containing `gens`. All generators must live mod `p`.
    pub fn generated(p: u32, gens: Vec<Gl2Element>) -> Self {
        assert!(gens.iter().all(|g| g.p() == p), "generator modulus mismatch");
        let (keys, _) = closure_keys(p, &gens);
        Self::from_parts(p, keys, gens)
    }

    pub fn trivial(p: u32) -> Self {
        Self::generated(p, Vec::new())
    }

    pub(crate) fn from_parts(p: u32, keys: Vec<u32>, generators: Vec<Gl2Element>) -> Self {
        Self { p, keys, generators, analysis: OnceLock::new(), fingerprint: OnceLock::new() }
    }

    /// Wraps an explicit element set, checking closure and deriving a
    /// small generating set greedily in key order.
    pub fn from_elements(p: u32, elements: impl IntoIterator<Item = Gl2Element>) -> Result<Self> {
        check_prime(p)?;
        let mut keys: Vec<u32> = elements.into_iter().map(|g| g.key()).collect();
        keys.sort_unstable();
        keys.dedup();
        let mut gens = Vec::new();
        let (mut current, mut seen) = closure_keys(p, &gens);
        for &k in &keys {
            if !seen.contains(k) {
                gens.push(Gl2Element::from_key(p, k));
                (current, seen) = closure_keys(p, &gens);
            }
        }
        if current != keys {
            return Err(Gl2Error::NotClosed { p, size: keys.len() });
        }
        Ok(Self::from_parts(p, keys, gens))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u64 {
        self.keys.len() as u64
    }

    pub fn generators(&self) -> &[Gl2Element] {
        &self.generators
    }

    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    pub fn elements(&self) -> impl Iterator<Item = Gl2Element> + '_ {
        let p = self.p;
        self.keys.iter().map(move |&k| Gl2Element::from_key(p, k))
    }

    pub fn contains(&self, g: &Gl2Element) -> bool {
        g.p() == self.p && self.keys.binary_search(&g.key()).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.p == other.p && self.generators.iter().all(|g| other.contains(g))
    }

    /// `h G h^-1`.
    pub fn conjugate_by(&self, h: &Gl2Element) -> Subgroup {
        let hi = h.inv();
        let mut keys: Vec<u32> = self.elements().map(|g| h.mul(&g).mul(&hi).key()).collect();
        keys.sort_unstable();
        let gens = self.generators.iter().map(|g| g.conjugate_by(h)).collect();
        Self::from_parts(self.p, keys, gens)
    }

    pub fn scalar_count(&self) -> u64 {
        self.elements().filter(Gl2Element::is_scalar).count() as u64
    }

    pub(crate) fn cached_analysis(&self) -> &OnceLock<SubgroupAnalysis> {
        &self.analysis
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        self.fingerprint.get_or_init(|| Fingerprint::compute(self))
    }

    /// Stable identifier derived from the fingerprint.
    pub fn id(&self) -> String {
        self.fingerprint().id(self.p)
    }
}

/// Conjugation-invariant summary used to bucket subgroups before running
/// an explicit conjugacy search.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: u64,
    pub order_histogram: BTreeMap<u64, u64>,
    pub det_image_order: u64,
    pub projective_order: u64,
    /// Digest of the histogram of element conjugacy classes of `GL_2`.
    pub class_digest: u64,
}

impl Fingerprint {
    fn compute(g: &Subgroup) -> Self {
        let p = g.p;
        let mut classes: BTreeMap<(u32, u32, bool), u64> = BTreeMap::new();
        let mut dets = vec![false; p as usize];
        let mut scalars = 0u64;
        for x in g.elements() {
            *classes.entry(x.class_invariant()).or_default() += 1;
            dets[x.det() as usize] = true;
            if x.is_scalar() {
                scalars += 1;
            }
        }
        let mut order_cache: HashMap<(u32, u32, bool), u64> = HashMap::new();
        let mut order_histogram = BTreeMap::new();
        for x in g.elements() {
            let inv = x.class_invariant();
            let o = *order_cache.entry(inv).or_insert_with(|| x.order());
            *order_histogram.entry(o).or_default() += 1;
        }
        let mut hasher = Sha256::new();
        for ((t, d, s), n) in &classes {
            hasher.update(t.to_le_bytes());
            hasher.update(d.to_le_bytes());
            hasher.update([*s as u8]);
            hasher.update(n.to_le_bytes());
        }
        let digest = hasher.finalize();
        Self {
            order: g.order(),
            order_histogram,
            det_image_order: dets.iter().filter(|&&b| b).count() as u64,
            projective_order: g.order() / scalars,
            class_digest: u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")),
        }
    }

    pub fn id(&self, p: u32) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(self).expect("fingerprint serializes"));
        let digest = hasher.finalize();
        let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
        format!("p{p}-o{}-{hex}", self.order)
    }
}

/// Lagrange: every subgroup order divides `#GL_2(F_p)`.
pub fn order_divides_group(g: &Subgroup) -> bool {
    gl2_order(g.p) % g.order() == 0
}
