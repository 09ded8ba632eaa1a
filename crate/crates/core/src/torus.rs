//! Brute-force cohomology model for powers of an abelian surface.
//!
//! The surface is modelled as E x E' (a product of two elliptic curves),
//! whose cohomology is the exterior algebra on four degree-1 generators
//! e1..e4 with int_A e1e2e3e4 = 1. The polarisation is H = e1e2 + e3e4,
//! so H^2 = 2. A ring with k factors has 4k generators; a monomial is a
//! bit mask over them, stored in ascending order with the Koszul sign
//! absorbed into the coefficient.
//!
//! Exceptional-divisor classes on Hilbert schemes are not pulled back from
//! the product and are deliberately not representable here; every fact
//! about them lives in the formula engine instead.

use crate::rat::Rat;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Per-factor count of degree-1 generators (H^1 of an abelian surface).
const GENS_PER_FACTOR: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    /// Mixed-degree classes have no well-defined integral.
    #[error("DEGREE_MISMATCH: cannot integrate a mixed-degree class")]
    DegreeMismatch,
    #[error("factor index {index} out of range for a ring with {factors} factors")]
    FactorIndex { index: usize, factors: usize },
    #[error("class has {got} coordinates where the lattice has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
}

/// The cohomology ring of A^k in the E x E' model.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TorusRing {
    factors: usize,
}

/// Degree content of a ring element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Degree {
    /// The zero element carries every degree at once.
    Zero,
    Homogeneous(usize),
    Mixed,
}

/// Result of integration; `not_top` flags a homogeneous class below top
/// degree whose integral is reported as 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Integrated {
    pub value: Rat,
    pub not_top: bool,
}

/// An exact cohomology class: map from generator bit masks to coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingElement {
    factors: usize,
    terms: BTreeMap<u32, Rat>,
}

/// Maps between powers of A whose pullbacks the oracle implements.
///
/// Pullback acts linearly on degree-1 generators and extends as a ring
/// homomorphism.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Map {
    /// Projection A^k -> A onto factor `i` (0-based).
    Proj { i: usize },
    /// Pair projection A^k -> A^2 onto factors `j`, `k`.
    PairProj { j: usize, k: usize },
    /// Group law s: A^2 -> A.
    Sum2,
    /// Triple sum s3: A^3 -> A.
    Sum3,
    /// Inversion on A: pulls every generator to its negative.
    Iota,
    /// Inversion applied to one factor of A^k, identity on the rest.
    IotaFactor { i: usize, factors: usize },
    /// Diagonal embedding A^{k-1} -> A^k duplicating factor `j` into slot `k`.
    DiagEmbed { j: usize, k: usize, factors: usize },
}

impl Map {
    /// Validates factor indices against the ring the map is applied from.
    pub fn check(&self, domain: usize) -> Result<(), OracleError> {
        let bad = |index| OracleError::FactorIndex {
            index,
            factors: domain,
        };
        match *self {
            Map::Proj { i } => (i < domain).then_some(()).ok_or(bad(i)),
            Map::PairProj { j, k } => {
                if j >= domain {
                    return Err(bad(j));
                }
                if k >= domain {
                    return Err(bad(k));
                }
                Ok(())
            }
            Map::Sum2 => (domain == 2).then_some(()).ok_or(bad(2)),
            Map::Sum3 => (domain == 3).then_some(()).ok_or(bad(3)),
            Map::Iota => (domain == 1).then_some(()).ok_or(bad(1)),
            Map::IotaFactor { i, factors } => {
                (domain == factors && i < factors).then_some(()).ok_or(bad(i))
            }
            Map::DiagEmbed { j, k, factors } => {
                (domain + 1 == factors && j < k && k < factors)
                    .then_some(())
                    .ok_or(bad(k))
            }
        }
    }
}

impl TorusRing {
    pub fn new(factors: usize) -> Self {
        assert!(
            factors >= 1 && factors * GENS_PER_FACTOR <= 32,
            "torus ring supports 1..=8 abelian-surface factors"
        );
        TorusRing { factors }
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn generator_count(&self) -> usize {
        self.factors * GENS_PER_FACTOR
    }

    fn top_mask(&self) -> u32 {
        ((1u64 << self.generator_count()) - 1) as u32
    }

    // ---- Element constructors ----

    pub fn zero(&self) -> RingElement {
        RingElement {
            factors: self.factors,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, c: Rat) -> RingElement {
        let mut e = self.zero();
        e.add_term(0, c);
        e
    }

    pub fn one(&self) -> RingElement {
        self.scalar(Rat::one())
    }

    /// The degree-1 generator with global index `i` (factor i/4, slot i%4).
    pub fn generator(&self, i: usize) -> RingElement {
        assert!(i < self.generator_count(), "generator index out of range");
        let mut e = self.zero();
        e.add_term(1u32 << i, Rat::one());
        e
    }

    /// The polarisation H = e1e2 + e3e4 on the given factor; H^2 = 2.
    pub fn h_class(&self, factor: usize) -> RingElement {
        assert!(factor < self.factors, "factor index out of range");
        let base = factor * GENS_PER_FACTOR;
        let mut e = self.zero();
        e.add_term(0b0011 << base, Rat::one());
        e.add_term(0b1100 << base, Rat::one());
        e
    }

    /// Sum of the factor polarisations (H boxplus ... boxplus H).
    pub fn h_sum(&self) -> RingElement {
        let mut e = self.zero();
        for f in 0..self.factors {
            e = &e + &self.h_class(f);
        }
        e
    }

    /// The point class of one factor (its top monomial).
    pub fn point_class(&self, factor: usize) -> RingElement {
        assert!(factor < self.factors, "factor index out of range");
        let base = factor * GENS_PER_FACTOR;
        let mut e = self.zero();
        e.add_term(0b1111 << base, Rat::one());
        e
    }

    /// The point class of the product (top monomial of the whole ring).
    pub fn point_full(&self) -> RingElement {
        let mut e = self.zero();
        e.add_term(self.top_mask(), Rat::one());
        e
    }

    /// The Mumford-type difference class s_k^* H - (H boxplus ... boxplus H),
    /// defined for 2 or 3 factors.
    pub fn mumford_class(&self) -> RingElement {
        let s = match self.factors {
            2 => Map::Sum2,
            3 => Map::Sum3,
            _ => panic!("mumford class defined for 2 or 3 factors"),
        };
        let single = TorusRing::new(1);
        &self.pullback(s, &single.h_class(0)) - &self.h_sum()
    }

    // ---- Core operations ----

    /// Graded-commutative product with exact Koszul signs.
    pub fn wedge(&self, a: &RingElement, b: &RingElement) -> RingElement {
        assert_eq!(a.factors, self.factors, "ring mismatch");
        assert_eq!(b.factors, self.factors, "ring mismatch");
        let mut out = self.zero();
        for (&ma, ca) in &a.terms {
            for (&mb, cb) in &b.terms {
                if ma & mb != 0 {
                    continue;
                }
                let sign = koszul_sign(ma, mb);
                let mut c = ca * cb;
                if sign < 0 {
                    c = -c;
                }
                out.add_term(ma | mb, c);
            }
        }
        out
    }

    /// Wedge power a^n.
    pub fn wedge_pow(&self, a: &RingElement, n: usize) -> RingElement {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.wedge(&acc, a);
        }
        acc
    }

    /// Wedge of a list of elements, left to right.
    pub fn wedge_all(&self, xs: &[&RingElement]) -> RingElement {
        let mut acc = self.one();
        for x in xs {
            acc = self.wedge(&acc, x);
        }
        acc
    }

    /// Pullback along `f`, where `x` lives on the codomain and the result
    /// on `self` (the domain). Ring homomorphism by construction.
    pub fn pullback(&self, f: Map, x: &RingElement) -> RingElement {
        f.check(self.factors)
            .unwrap_or_else(|e| panic!("invalid map for pullback: {e}"));
        let images = self.generator_images(f, x.factors);
        let mut out = self.zero();
        for (&mask, c) in &x.terms {
            // The stored monomial is the ascending wedge of its generators;
            // pull each back and wedge in the same order.
            let mut acc = self.scalar(c.clone());
            for g in bits(mask) {
                acc = self.wedge(&acc, &images[g]);
                if acc.terms.is_empty() {
                    break;
                }
            }
            out = &out + &acc;
        }
        out
    }

    /// Images of the codomain generators under pullback along `f`.
    fn generator_images(&self, f: Map, codomain_factors: usize) -> Vec<RingElement> {
        let cod_gens = codomain_factors * GENS_PER_FACTOR;
        let mut images = Vec::with_capacity(cod_gens);
        for g in 0..cod_gens {
            let (t, s) = (g / GENS_PER_FACTOR, g % GENS_PER_FACTOR);
            let img = match f {
                Map::Proj { i } => {
                    assert_eq!(codomain_factors, 1, "projection targets one factor");
                    self.generator(i * GENS_PER_FACTOR + s)
                }
                Map::PairProj { j, k } => {
                    assert_eq!(codomain_factors, 2, "pair projection targets two factors");
                    let tgt = if t == 0 { j } else { k };
                    self.generator(tgt * GENS_PER_FACTOR + s)
                }
                Map::Sum2 | Map::Sum3 => {
                    assert_eq!(codomain_factors, 1, "sum maps target one factor");
                    let mut e = self.zero();
                    for d in 0..self.factors {
                        e = &e + &self.generator(d * GENS_PER_FACTOR + s);
                    }
                    e
                }
                Map::Iota => {
                    let mut e = self.generator(s);
                    e = -&e;
                    e
                }
                Map::IotaFactor { i, .. } => {
                    let e = self.generator(g);
                    if t == i {
                        -&e
                    } else {
                        e
                    }
                }
                Map::DiagEmbed { j, k, .. } => {
                    let dom_t = if t == k {
                        domain_slot(j, k)
                    } else {
                        domain_slot(t, k)
                    };
                    self.generator(dom_t * GENS_PER_FACTOR + s)
                }
            };
            images.push(img);
        }
        images
    }

    /// Integral over the product: coefficient of the oriented top monomial.
    /// Homogeneous classes below top degree integrate to 0 with a warning
    /// flag; mixed-degree input is rejected.
    pub fn integrate(&self, x: &RingElement) -> Result<Integrated, OracleError> {
        match x.degree() {
            Degree::Mixed => Err(OracleError::DegreeMismatch),
            Degree::Zero => Ok(Integrated {
                value: Rat::zero(),
                not_top: false,
            }),
            Degree::Homogeneous(d) => {
                let top = self.generator_count();
                if d == top {
                    let value = x
                        .terms
                        .get(&self.top_mask())
                        .cloned()
                        .unwrap_or_else(Rat::zero);
                    Ok(Integrated {
                        value,
                        not_top: false,
                    })
                } else {
                    Ok(Integrated {
                        value: Rat::zero(),
                        not_top: true,
                    })
                }
            }
        }
    }

    /// Pushforward along `f` (domain `self`), defined by the projection
    /// formula: the coefficient of a codomain basis monomial m in f_* z is
    /// the domain integral of z wedge f^*(dual m).
    pub fn pushforward(&self, f: Map, z: &RingElement, codomain: &TorusRing) -> RingElement {
        assert_eq!(z.factors, self.factors, "ring mismatch");
        let mut out = codomain.zero();
        let cod_top = codomain.top_mask();
        for m in 0..=cod_top {
            let dual = codomain.dual_monomial(m);
            let pulled = self.pullback(f, &dual);
            let prod = self.wedge(z, &pulled);
            let integral = self
                .integrate(&prod)
                .expect("pushforward pairing is degreewise homogeneous");
            if !integral.value.is_zero() {
                out.add_term(m, integral.value);
            }
        }
        out
    }

    /// The class of the partial diagonal {x_j = x_k} in A^factors, via the
    /// Kunneth expansion (pushforward of 1 along the diagonal embedding).
    pub fn diagonal_class(&self, j: usize, k: usize) -> Result<RingElement, OracleError> {
        if j >= self.factors {
            return Err(OracleError::FactorIndex {
                index: j,
                factors: self.factors,
            });
        }
        if k >= self.factors || j == k {
            return Err(OracleError::FactorIndex {
                index: k,
                factors: self.factors,
            });
        }
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        let dom = TorusRing::new(self.factors - 1);
        let f = Map::DiagEmbed {
            j,
            k,
            factors: self.factors,
        };
        Ok(dom.pushforward(f, &dom.one(), self))
    }

    /// Dual of a basis monomial: the unique +/- complementary monomial d
    /// with int m wedge d = 1.
    fn dual_monomial(&self, m: u32) -> RingElement {
        let comp = self.top_mask() & !m;
        let sign = koszul_sign(m, comp);
        let mut e = self.zero();
        e.add_term(comp, if sign < 0 { -Rat::one() } else { Rat::one() });
        e
    }
}

/// Remaining domain index for codomain factor `t` when slot `k` is removed.
fn domain_slot(t: usize, k: usize) -> usize {
    if t > k {
        t - 1
    } else {
        t
    }
}

/// Sign of reordering the concatenation (a, b) into ascending order, where
/// both masks are already ascending and disjoint.
fn koszul_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0u32;
    for i in bits(a) {
        let below = b & ((1u32 << i) - 1);
        inversions += below.count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1u32 << i) != 0)
}

impl RingElement {
    fn add_term(&mut self, mask: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(Rat::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mask: u32) -> Rat {
        self.terms.get(&mask).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> RingElement {
        if c.is_zero() {
            return RingElement {
                factors: self.factors,
                terms: BTreeMap::new(),
            };
        }
        RingElement {
            factors: self.factors,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn degree(&self) -> Degree {
        let mut seen: Option<u32> = None;
        for mask in self.terms.keys() {
            let d = mask.count_ones();
            match seen {
                None => seen = Some(d),
                Some(s) if s != d => return Degree::Mixed,
                _ => {}
            }
        }
        match seen {
            None => Degree::Zero,
            Some(d) => Degree::Homogeneous(d as usize),
        }
    }
}

impl std::ops::Add<&RingElement> for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        assert_eq!(self.factors, rhs.factors, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl std::ops::Sub<&RingElement> for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            factors: self.factors,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mask, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*", c)?;
            if *mask == 0 {
                write!(f, "1")?;
            } else {
                for i in bits(*mask) {
                    write!(f, "e{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> Rat {
        Rat::int(k)
    }

    #[test]
    fn generators_anticommute_and_square_to_zero() {
        let a = TorusRing::new(1);
        let e1 = a.generator(0);
        let e2 = a.generator(1);
        let ab = a.wedge(&e1, &e2);
        let ba = a.wedge(&e2, &e1);
        assert_eq!(ab, -&ba);
        assert!(a.wedge(&e1, &e1).is_zero());
    }

    #[test]
    fn koszul_sign_of_interleaved_monomials() {
        // e1e3 wedge e2e4 = -e1e2e3e4: one transposition moves e2 past e3.
        let a = TorusRing::new(1);
        let e13 = a.wedge(&a.generator(0), &a.generator(2));
        let e24 = a.wedge(&a.generator(1), &a.generator(3));
        let prod = a.wedge(&e13, &e24);
        assert_eq!(a.integrate(&prod).unwrap().value, int(-1));
    }

    #[test]
    fn polarization_squares_to_two_points() {
        let a = TorusRing::new(1);
        let h = a.h_class(0);
        let h2 = a.wedge(&h, &h);
        assert_eq!(a.integrate(&h2).unwrap().value, int(2));
        assert!(a.wedge(&h2, &h).is_zero());
    }

    #[test]
    fn pullback_is_a_ring_homomorphism() {
        let a = TorusRing::new(1);
        let a2 = TorusRing::new(2);
        let x = &a.h_class(0) + &a.generator(0);
        let y = &a.generator(1) + &a.wedge(&a.generator(2), &a.generator(3));
        for f in [Map::Sum2, Map::Proj { i: 1 }] {
            let lhs = a2.pullback(f, &a.wedge(&x, &y));
            let rhs = a2.wedge(&a2.pullback(f, &x), &a2.pullback(f, &y));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inversion_negates_odd_and_fixes_even_classes() {
        let a = TorusRing::new(1);
        assert_eq!(a.pullback(Map::Iota, &a.generator(0)), -&a.generator(0));
        assert_eq!(a.pullback(Map::Iota, &a.h_class(0)), a.h_class(0));
    }

    #[test]
    fn integrate_flags_low_degree_and_rejects_mixed() {
        let a = TorusRing::new(1);
        let low = a.integrate(&a.h_class(0)).unwrap();
        assert!(low.value.is_zero());
        assert!(low.not_top);
        let mixed = &a.h_class(0) + &a.generator(0);
        assert_eq!(a.integrate(&mixed), Err(OracleError::DegreeMismatch));
    }

    #[test]
    fn dual_monomials_pair_to_one() {
        let a = TorusRing::new(1);
        for m in 0..16u32 {
            let mut e = a.zero();
            e.add_term(m, Rat::one());
            let d = a.dual_monomial(m);
            assert_eq!(a.integrate(&a.wedge(&e, &d)).unwrap().value, int(1));
        }
    }

    #[test]
    fn diagonal_reproduces_the_intersection_pairing() {
        // int_{AxA} [Diag] (x tensor y) = int_A x y for all basis monomials.
        let a = TorusRing::new(1);
        let a2 = TorusRing::new(2);
        let diag = a2.diagonal_class(0, 1).unwrap();
        for mx in 0..16u32 {
            let mut x = a.zero();
            x.add_term(mx, Rat::one());
            for my in 0..16u32 {
                let mut y = a.zero();
                y.add_term(my, Rat::one());
                let lhs = a2.wedge_all(&[
                    &diag,
                    &a2.pullback(Map::Proj { i: 0 }, &x),
                    &a2.pullback(Map::Proj { i: 1 }, &y),
                ]);
                let lhs = a2.integrate(&lhs).unwrap().value;
                let rhs = a.integrate(&a.wedge(&x, &y)).unwrap().value;
                assert_eq!(lhs, rhs, "monomials {mx:#06b}, {my:#06b}");
            }
        }
    }

    #[test]
    fn diagonal_self_intersection_vanishes() {
        // Euler characteristic of an abelian surface is 0.
        let a2 = TorusRing::new(2);
        let diag = a2.diagonal_class(0, 1).unwrap();
        assert!(a2.wedge(&diag, &diag).is_zero());
    }

    #[test]
    fn diagonal_class_rejects_bad_indices() {
        let a2 = TorusRing::new(2);
        assert!(matches!(
            a2.diagonal_class(0, 2),
            Err(OracleError::FactorIndex { index: 2, .. })
        ));
        assert!(a2.diagonal_class(1, 1).is_err());
    }

    #[test]
    fn pushforward_of_a_point_is_a_point() {
        let a = TorusRing::new(1);
        let a2 = TorusRing::new(2);
        let pushed = a2.pushforward(Map::Sum2, &a2.point_full(), &a);
        assert_eq!(pushed, a.point_class(0));
    }
}
