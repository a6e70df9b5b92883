use std::fmt;

use super::{Gl2Error, Result};

/// Largest modulus whose matrices still pack into a `u32` key.
pub const MAX_KEY_PRIME: u32 = 251;

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if !crate::arith::is_prime(p as u64) {
        return Err(Gl2Error::NotPrime(p as u64));
    }
    if p > MAX_KEY_PRIME {
        return Err(Gl2Error::PrimeTooLarge { p, max: MAX_KEY_PRIME });
    }
    Ok(())
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p as u64 - 2, p)
}

/// Least quadratic non-residue mod an odd prime.
pub fn least_nonresidue(p: u32) -> Option<u32> {
    if p == 2 {
        return None;
    }
    (2..p).find(|&e| pow_mod(e, (p as u64 - 1) / 2, p) == p - 1)
}

/// Least generator of `F_p^*`.
pub fn primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let order = p as u64 - 1;
    let primes: Vec<u64> = crate::arith::FactoredInteger::factorize(order as u128)
        .expect("p - 1 factors")
        .factors()
        .iter()
        .map(|&(q, _)| q)
        .collect();
    (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .expect("primitive root exists")
}

/// An invertible 2x2 matrix over `F_p`, row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl2Element {
    p: u32,
    m: [u32; 4],
}

impl fmt::Debug for Gl2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.p)
    }
}

impl Gl2Element {
    /// Reduces the entries mod `p` and rejects singular matrices.
    pub fn new(p: u32, entries: [i64; 4]) -> Result<Self> {
        check_prime(p)?;
        let m = entries.map(|e| e.rem_euclid(p as i64) as u32);
        let el = Self { p, m };
        if el.det() == 0 {
            return Err(Gl2Error::NonInvertible { p, entries });
        }
        Ok(el)
    }

    /// Caller guarantees `p` is a valid prime and the matrix is invertible.
    #[inline]
    pub(crate) fn from_raw(p: u32, m: [u32; 4]) -> Self {
        Self { p, m }
    }

    pub fn identity(p: u32) -> Self {
        Self { p, m: [1, 0, 0, 1] }
    }

    pub fn scalar(p: u32, s: u32) -> Self {
        let s = s % p;
        Self { p, m: [s, 0, 0, s] }
    }

    pub fn diag(p: u32, a: u32, d: u32) -> Self {
        Self { p, m: [a % p, 0, 0, d % p] }
    }

    pub fn antidiag(p: u32, b: u32, c: u32) -> Self {
        Self { p, m: [0, b % p, c % p, 0] }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> [u32; 4] {
        self.m
    }

    /// Packs as `a p^3 + b p^2 + c p + d`; numeric order is the canonical
    /// element order.
    #[inline]
    pub fn key(&self) -> u32 {
        let p = self.p;
        ((self.m[0] * p + self.m[1]) * p + self.m[2]) * p + self.m[3]
    }

    #[inline]
    pub fn from_key(p: u32, key: u32) -> Self {
        let d = key % p;
        let r = key / p;
        let c = r % p;
        let r = r / p;
        let b = r % p;
        let a = r / p;
        Self { p, m: [a, b, c, d] }
    }

    #[inline]
    pub fn det(&self) -> u32 {
        let p = self.p as u64;
        let [a, b, c, d] = self.m.map(|x| x as u64);
        ((a * d + p * p - b * c) % p) as u32
    }

    pub fn trace(&self) -> u32 {
        (self.m[0] + self.m[3]) % self.p
    }

    pub fn is_scalar(&self) -> bool {
        self.m[1] == 0 && self.m[2] == 0 && self.m[0] == self.m[3]
    }

    pub fn is_identity(&self) -> bool {
        self.m == [1, 0, 0, 1]
    }

    #[inline]
    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p as u64;
        let [a, b, c, d] = self.m.map(|x| x as u64);
        let [e, f, g, h] = rhs.m.map(|x| x as u64);
        Self {
            p: self.p,
            m: [
                ((a * e + b * g) % p) as u32,
                ((a * f + b * h) % p) as u32,
                ((c * e + d * g) % p) as u32,
                ((c * f + d * h) % p) as u32,
            ],
        }
    }

    pub fn inv(&self) -> Self {
        let p = self.p;
        let di = inv_mod(self.det(), p);
        let [a, b, c, d] = self.m;
        Self {
            p,
            m: [mul_mod(d, di, p), mul_mod((p - b) % p, di, p), mul_mod((p - c) % p, di, p), mul_mod(a, di, p)],
        }
    }

    /// `h * self * h^-1`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.mul(self).mul(&h.inv())
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = Self::identity(self.p);
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `self^k` satisfying `pred`, given that `pred`
    /// holds at `self^multiple` and the set of such exponents is closed
    /// under taking multiples.
    pub(crate) fn least_exponent(&self, multiple: u64, pred: impl Fn(&Self) -> bool) -> u64 {
        let mut k = multiple;
        let primes = crate::arith::FactoredInteger::factorize(multiple as u128).expect("small");
        for &(q, _) in primes.factors() {
            while k % q == 0 && pred(&self.pow(k / q)) {
                k /= q;
            }
        }
        k
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.least_exponent(gl2_order(self.p), Self::is_identity)
    }

    /// Order modulo scalar matrices.
    pub fn projective_order(&self) -> u64 {
        self.least_exponent(self.order(), Self::is_scalar)
    }

    pub fn apply(&self, v: Vector) -> Vector {
        let p = self.p as u64;
        let [a, b, c, d] = self.m.map(|x| x as u64);
        let (x, y) = (v.0 as u64, v.1 as u64);
        Vector(((a * x + b * y) % p) as u32, ((c * x + d * y) % p) as u32)
    }

    /// Conjugacy-class invariant; classes of `GL_2(F_p)` are determined by
    /// trace and determinant except for the scalar/non-scalar split.
    pub(crate) fn class_invariant(&self) -> (u32, u32, bool) {
        (self.trace(), self.det(), self.is_scalar())
    }
}

/// `#GL_2(F_p) = (p^2 - 1)(p^2 - p)`.
pub fn gl2_order(p: u32) -> u64 {
    let p = p as u64;
    (p * p - 1) * (p * p - p)
}

/// `#SL_2(F_p) = p (p^2 - 1)`.
pub fn sl2_order(p: u32) -> u64 {
    let p = p as u64;
    p * (p * p - 1)
}

/// Every element of `GL_2(F_p)` in canonical key order.
pub fn all_elements(p: u32) -> impl Iterator<Item = Gl2Element> {
    let space = p.pow(4);
    (0..space).map(move |k| Gl2Element::from_key(p, k)).filter(|g| g.det() != 0)
}

/// A vector of `F_p^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Vector(pub u32, pub u32);

impl Vector {
    pub fn is_zero(&self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    pub(crate) fn index(&self, p: u32) -> usize {
        (self.0 * p + self.1) as usize
    }

    /// Nonzero vectors in lexicographic order.
    pub fn nonzero(p: u32) -> impl Iterator<Item = Vector> {
        (0..p).flat_map(move |x| (0..p).map(move |y| Vector(x, y))).filter(|v| !v.is_zero())
    }
}

/// A one-dimensional subspace of `F_p^2`, stored by its representative
/// whose first nonzero coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Line {
    pub p: u32,
    pub representative: Vector,
}

impl Line {
    pub fn through(p: u32, v: Vector) -> Option<Self> {
        if v.is_zero() {
            return None;
        }
        let representative = if v.0 != 0 {
            let s = inv_mod(v.0, p);
            Vector(1, mul_mod(v.1, s, p))
        } else {
            Vector(0, 1)
        };
        Some(Self { p, representative })
    }

    /// The `p + 1` lines: `<(1, y)>` for `y` in `0..p`, then `<(0, 1)>`.
    pub fn all(p: u32) -> Vec<Line> {
        (0..p)
            .map(|y| Vector(1, y))
            .chain(std::iter::once(Vector(0, 1)))
            .map(|representative| Line { p, representative })
            .collect()
    }

    /// Position in [`Line::all`].
    pub fn index(&self) -> usize {
        match self.representative {
            Vector(1, y) => y as usize,
            _ => self.p as usize,
        }
    }

    pub fn image(&self, g: &Gl2Element) -> Line {
        Line::through(self.p, g.apply(self.representative)).expect("invertible map")
    }

    /// All nonzero points of the line.
    pub fn points(&self) -> impl Iterator<Item = Vector> + '_ {
        let p = self.p;
        let Vector(x, y) = self.representative;
        (1..p).map(move |s| Vector(mul_mod(x, s, p), mul_mod(y, s, p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_round_trip_and_order() {
        for p in [2u32, 3, 5, 97] {
            for g in [
                Gl2Element::identity(p),
                Gl2Element::antidiag(p, 1, 1),
                Gl2Element::new(p, [1, 1, 0, 1]).unwrap(),
            ] {
                assert_eq!(Gl2Element::from_key(p, g.key()), g);
            }
        }
        assert_eq!(gl2_order(5), 480);
        assert_eq!(all_elements(3).count(), 48);
    }

    #[test]
    fn singular_rejected_with_entries() {
        let err = Gl2Element::new(5, [1, 2, 2, 4]).unwrap_err();
        assert_eq!(err, Gl2Error::NonInvertible { p: 5, entries: [1, 2, 2, 4] });
        assert!(matches!(Gl2Element::new(4, [1, 0, 0, 1]), Err(Gl2Error::NotPrime(4))));
    }

    #[test]
    fn element_orders() {
        let p = 7;
        assert_eq!(Gl2Element::identity(p).order(), 1);
        assert_eq!(Gl2Element::new(p, [1, 1, 0, 1]).unwrap().order(), 7);
        assert_eq!(Gl2Element::scalar(p, 3).order(), 6);
        assert_eq!(Gl2Element::scalar(p, 3).projective_order(), 1);
        assert_eq!(Gl2Element::antidiag(p, 1, 1).projective_order(), 2);
        for g in all_elements(5).step_by(7) {
            let brute = (1..).find(|&k| g.pow(k).is_identity()).unwrap();
            assert_eq!(g.order(), brute);
            assert!(g.mul(&g.inv()).is_identity());
        }
    }

    #[test]
    fn field_helpers() {
        assert_eq!(least_nonresidue(5), Some(2));
        assert_eq!(least_nonresidue(7), Some(3));
        assert_eq!(least_nonresidue(2), None);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(inv_mod(2, 5), 3);
    }

    #[test]
    fn lines_normalized() {
        let ls = Line::all(5);
        assert_eq!(ls.len(), 6);
        assert_eq!(Line::through(5, Vector(2, 4)).unwrap().representative, Vector(1, 2));
        for (i, l) in ls.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(l.points().count(), 4);
        }
    }
}
