//! Neron-Severi bookkeeping for surfaces, Hilbert schemes of points,
//! Kummer surfaces and the dimension-4 Kummer-type variety.
//!
//! Degrees against the polarisation families are asymptotic polynomials in
//! the family parameter N; coefficients the cited intersection tables do
//! not determine stay behind the NPoly validity floor instead of being
//! reported as zero. Kummer-surface degrees are exact.

use crate::npoly::NPoly;
use crate::rat::Rat;
use thiserror::Error;

pub const NODES: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("UNSUPPORTED: {what}; supported: {supported}")]
    Unsupported { what: String, supported: String },
    #[error("ZERO_RANK: slope requires rank >= 1")]
    ZeroRank,
    #[error("variety mismatch: {0}")]
    VarietyMismatch(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
}

fn invalid(msg: impl Into<String>) -> LatticeError {
    LatticeError::InvalidDescriptor(msg.into())
}

// ---- Surfaces ----

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SurfaceKind {
    K3,
    EllipticK3,
    RegularGeneric,
    AbelianStar,
}

/// A projective surface with a chosen Neron-Severi basis, Gram matrix and
/// ample class. The abelian case is pinned to a rank-1 lattice generated
/// by a principal polarisation of square 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SurfaceDesc {
    kind: SurfaceKind,
    ns_basis: Vec<String>,
    gram: Vec<Vec<i64>>,
    chi_o: i64,
    h: Vec<i64>,
}

impl SurfaceDesc {
    pub fn new(
        kind: SurfaceKind,
        ns_basis: Vec<String>,
        gram: Vec<Vec<i64>>,
        chi_o: i64,
        h: Vec<i64>,
    ) -> Result<Self, LatticeError> {
        let rank = ns_basis.len();
        if rank == 0 {
            return Err(invalid("empty Neron-Severi basis"));
        }
        if gram.len() != rank || gram.iter().any(|row| row.len() != rank) {
            return Err(invalid("gram matrix shape does not match the basis"));
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, x) in row.iter().enumerate().take(i) {
                if x != &gram[j][i] {
                    return Err(invalid("gram matrix must be symmetric"));
                }
            }
        }
        if h.len() != rank {
            return Err(invalid("ample class length does not match the basis"));
        }
        let desc = SurfaceDesc {
            kind,
            ns_basis,
            gram,
            chi_o,
            h,
        };
        if desc.pair_int(&desc.h, &desc.h) <= 0 {
            return Err(invalid("ample class must have positive square"));
        }
        match kind {
            SurfaceKind::AbelianStar => {
                if rank != 1 || desc.gram[0][0] != 2 || desc.h != vec![1] {
                    return Err(invalid(
                        "abelian surface must have a single principal generator of square 2",
                    ));
                }
                if desc.chi_o != 0 {
                    return Err(invalid("abelian surface has trivial Euler characteristic"));
                }
            }
            SurfaceKind::EllipticK3 => {
                if rank != 2 || desc.gram != vec![vec![-2, 1], vec![1, 0]] {
                    return Err(invalid(
                        "elliptic K3 needs the section-and-fibre basis with gram [[-2,1],[1,0]]",
                    ));
                }
                if desc.chi_o != 2 {
                    return Err(invalid("K3 surfaces have chi(O) = 2"));
                }
            }
            SurfaceKind::K3 => {
                if desc.chi_o != 2 {
                    return Err(invalid("K3 surfaces have chi(O) = 2"));
                }
            }
            SurfaceKind::RegularGeneric => {}
        }
        Ok(desc)
    }

    /// The (*) abelian surface: NS = Z H with H^2 = 2.
    pub fn abelian_star() -> Self {
        SurfaceDesc::new(
            SurfaceKind::AbelianStar,
            vec!["H".into()],
            vec![vec![2]],
            0,
            vec![1],
        )
        .expect("fixed descriptor is valid")
    }

    /// A K3 with a rank-1 lattice generated by an ample H of given square.
    pub fn k3_rank_one(h_square: i64) -> Result<Self, LatticeError> {
        SurfaceDesc::new(
            SurfaceKind::K3,
            vec!["H".into()],
            vec![vec![h_square]],
            2,
            vec![1],
        )
    }

    /// An elliptic K3 with section C and fibre E; the ample class is
    /// C + 3E of square 4.
    pub fn elliptic_k3() -> Self {
        SurfaceDesc::new(
            SurfaceKind::EllipticK3,
            vec!["C".into(), "E".into()],
            vec![vec![-2, 1], vec![1, 0]],
            2,
            vec![1, 3],
        )
        .expect("fixed descriptor is valid")
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.ns_basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.ns_basis
    }

    pub fn chi_o(&self) -> i64 {
        self.chi_o
    }

    pub fn h_coords(&self) -> Vec<Rat> {
        self.h.iter().map(|&c| Rat::int(c)).collect()
    }

    fn pair_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * self.gram[i][j] * yj;
            }
        }
        acc
    }

    /// Intersection pairing of two coordinate vectors.
    pub fn pair(&self, x: &[Rat], y: &[Rat]) -> Result<Rat, LatticeError> {
        let rank = self.rank();
        if x.len() != rank || y.len() != rank {
            return Err(invalid("coordinate length does not match the basis"));
        }
        let mut acc = Rat::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += &(xi * &Rat::int(self.gram[i][j]) * yj);
            }
        }
        Ok(acc)
    }

    /// Pairing of a class with the chosen ample class.
    pub fn degree(&self, x: &[Rat]) -> Result<Rat, LatticeError> {
        self.pair(x, &self.h_coords())
    }
}

// ---- Classes on the Hilbert scheme ----

/// A divisor class on X^[n]: a surface part, an optional coefficient of
/// the summation-map pullback (abelian case only) and a coefficient of
/// the half-exceptional class.
///
/// Level n = 1 is the surface itself and is allowed as the bottom of the
/// nested recursion; it carries no exceptional or summation part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HilbClass {
    pub n: usize,
    pub h_part: Vec<Rat>,
    pub m_part: Option<Rat>,
    pub d_part: Rat,
}

impl HilbClass {
    pub fn new(
        surface: &SurfaceDesc,
        n: usize,
        h_part: Vec<Rat>,
        m_part: Option<Rat>,
        d_part: Rat,
    ) -> Result<Self, LatticeError> {
        if n < 1 {
            return Err(invalid("Hilbert scheme classes need n >= 1"));
        }
        if n == 1 {
            if !d_part.is_zero() {
                return Err(invalid("level 1 has no exceptional class"));
            }
            if m_part.as_ref().is_some_and(|m| !m.is_zero()) {
                return Err(invalid("level 1 has no independent summation part"));
            }
        }
        if h_part.len() != surface.rank() {
            return Err(invalid("surface part length does not match the basis"));
        }
        let is_abelian = surface.kind() == SurfaceKind::AbelianStar;
        if m_part.is_some() != is_abelian {
            return Err(invalid(
                "the summation-map part exists exactly over the abelian surface",
            ));
        }
        Ok(HilbClass {
            n,
            h_part,
            m_part,
            d_part,
        })
    }

    /// The image of a surface class under the natural embedding.
    pub fn from_surface(
        surface: &SurfaceDesc,
        n: usize,
        coords: Vec<Rat>,
    ) -> Result<Self, LatticeError> {
        let m = (surface.kind() == SurfaceKind::AbelianStar).then(Rat::zero);
        HilbClass::new(surface, n, coords, m, Rat::zero())
    }

    /// The half-exceptional class delta_n.
    pub fn delta(surface: &SurfaceDesc, n: usize) -> Result<Self, LatticeError> {
        let m = (surface.kind() == SurfaceKind::AbelianStar).then(Rat::zero);
        HilbClass::new(surface, n, vec![Rat::zero(); surface.rank()], m, Rat::one())
    }

    /// The summation-map pullback of the polarisation (abelian only).
    pub fn m_class(surface: &SurfaceDesc, n: usize) -> Result<Self, LatticeError> {
        if surface.kind() != SurfaceKind::AbelianStar {
            return Err(LatticeError::VarietyMismatch(
                "the summation map exists only over the abelian surface".into(),
            ));
        }
        HilbClass::new(
            surface,
            n,
            vec![Rat::zero(); surface.rank()],
            Some(Rat::one()),
            Rat::zero(),
        )
    }

    fn m_coeff(&self) -> Rat {
        self.m_part.clone().unwrap_or_else(Rat::zero)
    }

    /// Classwise negation.
    pub fn negated(&self) -> HilbClass {
        HilbClass {
            n: self.n,
            h_part: self.h_part.iter().map(|c| -c).collect(),
            m_part: self.m_part.as_ref().map(|m| -m),
            d_part: -&self.d_part,
        }
    }

    /// Classwise sum; both classes must live at the same level with the
    /// same lattice shape.
    pub fn plus(&self, other: &HilbClass) -> Result<HilbClass, LatticeError> {
        if self.n != other.n
            || self.h_part.len() != other.h_part.len()
            || self.m_part.is_some() != other.m_part.is_some()
        {
            return Err(LatticeError::VarietyMismatch(
                "classes live on different Hilbert schemes".into(),
            ));
        }
        Ok(HilbClass {
            n: self.n,
            h_part: self
                .h_part
                .iter()
                .zip(&other.h_part)
                .map(|(a, b)| a + b)
                .collect(),
            m_part: self
                .m_part
                .as_ref()
                .map(|m| m + other.m_part.as_ref().expect("shape checked")),
            d_part: &self.d_part + &other.d_part,
        })
    }
}

/// A divisor class pulled back to the nested Hilbert scheme: the level
/// n-1 part, a surface part and a coefficient of the exceptional [D].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NestedClass {
    pub p_part: HilbClass,
    pub q_part: Vec<Rat>,
    pub d_coeff: Rat,
}

// ---- Classes on the Kummer surface ----

/// A class on the Kummer surface: a doubled image of a surface class plus
/// nodal-class coefficients. Half-integral nodal coefficients are legal
/// only as the common half of the 2-divisible sum of all sixteen nodes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KummerClass {
    pub alpha_part: Vec<Rat>,
    pub nodal: Vec<Rat>,
}

impl KummerClass {
    pub fn new(alpha_part: Vec<Rat>, nodal: Vec<Rat>) -> Result<Self, LatticeError> {
        if nodal.len() != NODES {
            return Err(invalid("a Kummer class carries exactly 16 nodal coefficients"));
        }
        let two = Rat::int(2);
        for nu in &nodal {
            if !(&two * nu).is_integer() {
                return Err(invalid("nodal coefficients live in (1/2) Z"));
            }
        }
        let first = nodal[0].clone();
        for nu in &nodal[1..] {
            if !(nu - &first).is_integer() {
                return Err(invalid(
                    "half-integral nodal parts must be shared by all sixteen nodes",
                ));
            }
        }
        Ok(KummerClass { alpha_part, nodal })
    }

    /// First Chern class of the restriction of a rank-r sheaf built from a
    /// surface class f: doubled f minus r/2 times the full nodal sum.
    pub fn restricted_sheaf_c1(
        surface: &SurfaceDesc,
        f: &[Rat],
        rank: u32,
    ) -> Result<Self, LatticeError> {
        check_abelian(surface)?;
        if f.len() != surface.rank() {
            return Err(invalid("surface part length does not match the basis"));
        }
        let half_r = Rat::new(-(rank as i64), 2);
        KummerClass::new(f.to_vec(), vec![half_r; NODES])
    }

    /// The class with double cover data b^* g + sum a_l E_l upstairs:
    /// half the doubled g plus half the nodal coefficients.
    pub fn from_cover_data(
        surface: &SurfaceDesc,
        g: &[Rat],
        a: &[Rat],
    ) -> Result<Self, LatticeError> {
        check_abelian(surface)?;
        if g.len() != surface.rank() {
            return Err(invalid("surface part length does not match the basis"));
        }
        if a.len() != NODES {
            return Err(invalid("cover data carries exactly 16 exceptional coefficients"));
        }
        let half = Rat::new(1, 2);
        let alpha = g.iter().map(|c| c * &half).collect();
        let nodal = a.iter().map(|c| c * &half).collect();
        KummerClass::new(alpha, nodal)
    }

    /// Intersection pairing on the Kummer surface: doubled surface pairing
    /// plus the nodal Gram matrix -2 * identity.
    pub fn pair(&self, other: &KummerClass, surface: &SurfaceDesc) -> Result<Rat, LatticeError> {
        check_abelian(surface)?;
        let mut acc = Rat::int(2) * &surface.pair(&self.alpha_part, &other.alpha_part)?;
        for (a, b) in self.nodal.iter().zip(&other.nodal) {
            acc += &(Rat::int(-2) * a * b);
        }
        Ok(acc)
    }

    /// Pairing of the pullbacks to the blown-up cover, where the doubled
    /// classes split into pulled-back surface classes and (-1)-curves.
    pub fn cover_pair(
        &self,
        other: &KummerClass,
        surface: &SurfaceDesc,
    ) -> Result<Rat, LatticeError> {
        check_abelian(surface)?;
        let two = Rat::int(2);
        let up_a: Vec<Rat> = self.alpha_part.iter().map(|c| c * &two).collect();
        let up_b: Vec<Rat> = other.alpha_part.iter().map(|c| c * &two).collect();
        let mut acc = surface.pair(&up_a, &up_b)?;
        for (a, b) in self.nodal.iter().zip(&other.nodal) {
            acc += &(-(&two * a) * &(&two * b));
        }
        Ok(acc)
    }
}

fn check_abelian(surface: &SurfaceDesc) -> Result<(), LatticeError> {
    if surface.kind() != SurfaceKind::AbelianStar {
        return Err(LatticeError::VarietyMismatch(
            "Kummer constructions start from the (*) abelian surface".into(),
        ));
    }
    Ok(())
}

// ---- Polarisation families and degrees ----

/// Polarisation families, all linear in a large parameter N.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolFamily {
    /// N * H_hilb - delta_n on a Hilbert scheme of a regular surface or on
    /// the abelian one (ignoring the summation part).
    HN,
    /// N * (H_hilb + m^* H) - delta_n, abelian case.
    HNm,
    /// N * alpha(H) - half the nodal sum, on the Kummer surface.
    HNKm,
    /// Restriction of the abelian n = 3 family to the 4-dimensional fibre.
    HNK,
}

/// A class paired against a polarisation family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VarietyClass {
    Hilb(HilbClass),
    Kummer(KummerClass),
}

/// All intersection numbers of monomials H_hilb^a (m-class)^b on the
/// abelian Hilbert scheme, normalised downstairs; zero entries are exact.
fn abelian_monomial(n: usize, a: usize, b: usize) -> Option<Rat> {
    let table: &[((usize, usize), i64)] = match n {
        2 => &[((4, 0), 12), ((3, 1), 12), ((2, 2), 8), ((1, 3), 0), ((0, 4), 0)],
        3 => &[
            ((6, 0), 120),
            ((5, 1), 120),
            ((4, 2), 72),
            ((3, 3), 0),
            ((2, 4), 0),
            ((1, 5), 0),
            ((0, 6), 0),
        ],
        _ => return None,
    };
    table
        .iter()
        .find(|((x, y), _)| *x == a && *y == b)
        .map(|(_, v)| Rat::int(*v))
}

fn binom_i64(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * ((n - i) as i64) / ((i + 1) as i64);
    }
    acc
}

/// Odd double factorial (2n-1)!!.
fn double_factorial_odd(n: usize) -> i64 {
    let mut acc = 1i64;
    let mut k = 2 * n as i64 - 1;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn unsupported(what: impl Into<String>) -> LatticeError {
    LatticeError::Unsupported {
        what: what.into(),
        supported: "regular surfaces with HN for n in 2..=5; the (*) abelian surface \
                    with HN or HNm for n in {2,3}; Kummer-surface classes with HNKm; \
                    abelian n = 3 classes with HNK"
            .into(),
    }
}

/// Intersection number of a divisor class with pol^(dim-1), as a
/// polynomial in the family parameter N.
///
/// Hilbert-scheme answers carry only their leading coefficient (floor at
/// the leading degree); lower orders are not determined by the supported
/// tables. Kummer-surface answers are exact.
pub fn degree_against_polarization(
    surface: &SurfaceDesc,
    class: &VarietyClass,
    pol: PolFamily,
) -> Result<NPoly, LatticeError> {
    match (class, pol) {
        (VarietyClass::Hilb(c), PolFamily::HN) => hilb_hn_degree(surface, c),
        (VarietyClass::Hilb(c), PolFamily::HNm) => hilb_hnm_degree(surface, c),
        (VarietyClass::Hilb(c), PolFamily::HNK) => genkummer_degree(surface, c),
        (VarietyClass::Kummer(c), PolFamily::HNKm) => kummer_degree(surface, c),
        (VarietyClass::Hilb(_), PolFamily::HNKm) => Err(LatticeError::VarietyMismatch(
            "the Kummer-surface family pairs with Kummer classes".into(),
        )),
        (VarietyClass::Kummer(_), _) => Err(LatticeError::VarietyMismatch(
            "Kummer classes pair with the HNKm family".into(),
        )),
    }
}

fn hilb_hn_degree(surface: &SurfaceDesc, c: &HilbClass) -> Result<NPoly, LatticeError> {
    let top = 2 * c.n as i64 - 1;
    match surface.kind() {
        SurfaceKind::K3 | SurfaceKind::EllipticK3 | SurfaceKind::RegularGeneric => {
            if !(2..=5).contains(&c.n) {
                return Err(unsupported(format!("regular surface with n = {}", c.n)));
            }
            // Leading term: (2n-1)!! (l.H) (H^2)^(n-1); the half-exceptional
            // class contributes nothing at this order.
            let lh = surface.degree(&c.h_part)?;
            let h2 = surface.pair(&surface.h_coords(), &surface.h_coords())?;
            let lead = Rat::int(double_factorial_odd(c.n)) * &lh * &h2.pow(c.n as u32 - 1);
            Ok(NPoly::monomial(lead, top).with_floor(top))
        }
        SurfaceKind::AbelianStar => {
            let (h_row, m_row) = abelian_rows(c.n, false)?;
            let lead = &h_row * &c.h_part[0] + &m_row * &c.m_coeff();
            Ok(NPoly::monomial(lead, top).with_floor(top))
        }
    }
}

fn hilb_hnm_degree(surface: &SurfaceDesc, c: &HilbClass) -> Result<NPoly, LatticeError> {
    if surface.kind() != SurfaceKind::AbelianStar {
        return Err(unsupported("the HNm family over a non-abelian surface"));
    }
    let top = 2 * c.n as i64 - 1;
    let (h_row, m_row) = abelian_rows(c.n, true)?;
    let lead = &h_row * &c.h_part[0] + &m_row * &c.m_coeff();
    Ok(NPoly::monomial(lead, top).with_floor(top))
}

/// Leading-order pairings of H_hilb and the m-class against pol^(2n-1),
/// for pol = H_hilb (+ m-class when `with_m`).
fn abelian_rows(n: usize, with_m: bool) -> Result<(Rat, Rat), LatticeError> {
    if !(2..=3).contains(&n) {
        return Err(unsupported(format!("abelian surface with n = {n}")));
    }
    let top = 2 * n - 1;
    let mut h_row = Rat::zero();
    let mut m_row = Rat::zero();
    for k in 0..=top {
        let weight = if with_m {
            Rat::int(binom_i64(top, k))
        } else if k == 0 {
            Rat::one()
        } else {
            continue;
        };
        if let Some(v) = abelian_monomial(n, top - k + 1, k) {
            h_row += &(&weight * &v);
        }
        if let Some(v) = abelian_monomial(n, top - k, k + 1) {
            m_row += &(&weight * &v);
        }
    }
    Ok((h_row, m_row))
}

fn kummer_degree(surface: &SurfaceDesc, c: &KummerClass) -> Result<NPoly, LatticeError> {
    check_abelian(surface)?;
    // c . (N alpha(H) - half nodal sum): the doubling contributes
    // 2N (x.H), each nodal class meets the half sum in +1.
    let xh = surface.pair(&c.alpha_part, &surface.h_coords())?;
    let mut nodal_sum = Rat::zero();
    for nu in &c.nodal {
        nodal_sum += nu;
    }
    Ok(NPoly::from_terms(&[
        (1, Rat::int(2) * &xh),
        (0, nodal_sum),
    ]))
}

fn genkummer_degree(surface: &SurfaceDesc, c: &HilbClass) -> Result<NPoly, LatticeError> {
    check_abelian(surface)?;
    if c.n != 3 {
        return Err(unsupported(format!(
            "the 4-dimensional Kummer-type variety sits inside level n = 3, not {}",
            c.n
        )));
    }
    // Restriction kills the summation part; the quartic number of the
    // restricted polarisation is 36 and the exceptional row leads with 0.
    let lead = Rat::int(36) * &c.h_part[0];
    Ok(NPoly::monomial(lead, 3).with_floor(3))
}

/// Slope: degree divided by the rank.
pub fn slope(
    surface: &SurfaceDesc,
    rank: u32,
    c1: &VarietyClass,
    pol: PolFamily,
) -> Result<NPoly, LatticeError> {
    if rank == 0 {
        return Err(LatticeError::ZeroRank);
    }
    let deg = degree_against_polarization(surface, c1, pol)?;
    Ok(deg.div_scalar(&Rat::int(rank as i64)))
}

/// One step of the nested-scheme pullback recursion: the surface part
/// survives at both levels, the half-exceptional class contributes the
/// boundary [D] and its level n-1 image.
pub fn nested_pullback(
    surface: &SurfaceDesc,
    c: &HilbClass,
) -> Result<NestedClass, LatticeError> {
    if c.n < 2 {
        return Err(unsupported(format!(
            "nested pullback from n = {} (needs n >= 2)",
            c.n
        )));
    }
    if let Some(m) = &c.m_part {
        if !m.is_zero() {
            return Err(unsupported(
                "nested pullback of the summation part (it leaves the modelled lattice)",
            ));
        }
    }
    // At the bottom of the recursion level 1 is the surface, which has no
    // exceptional class of its own.
    let lower_d = if c.n == 2 {
        Rat::zero()
    } else {
        c.d_part.clone()
    };
    let p_part = HilbClass::new(surface, c.n - 1, c.h_part.clone(), c.m_part.clone(), lower_d)?;
    Ok(NestedClass {
        p_part,
        q_part: c.h_part.clone(),
        d_coeff: c.d_part.clone(),
    })
}

/// Beauville-Bogomolov square q(l + a delta) = l.l + 2(1-n) a^2 for the
/// K3-type Hilbert schemes.
pub fn bb_square(surface: &SurfaceDesc, c: &HilbClass) -> Result<Rat, LatticeError> {
    match surface.kind() {
        SurfaceKind::K3 | SurfaceKind::EllipticK3 | SurfaceKind::RegularGeneric => {}
        SurfaceKind::AbelianStar => {
            return Err(unsupported(
                "the quadratic form is modelled for K3-type Hilbert schemes only",
            ))
        }
    }
    let ll = surface.pair(&c.h_part, &c.h_part)?;
    let delta_sq = Rat::int(2 * (1 - c.n as i64));
    Ok(ll + &(&delta_sq * &c.d_part.pow(2)))
}
