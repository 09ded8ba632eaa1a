//! Slope-stability rules engine for tautological-type sheaves.
//!
//! Three layers. Destabilising-condition predicates evaluate the printed
//! integer conditions exactly. Slope derivations tie those predicates
//! back to the intersection tables in `lattice`, comparing candidate and
//! sheaf slopes at leading order in the polarisation parameter. The case
//! analysis assigns every condition-satisfying candidate either a named
//! exclusion or a named exception, and the box search runs that analysis
//! exhaustively over bounded integer boxes. A separate verdict layer
//! checks the hypothesis list of the matching stability theorem.
//!
//! All candidate data is the integer shadow of a line bundle: exponents
//! of product, summation and boundary classes. Anything the lattice side
//! cannot see (continuous Picard data, actual isomorphisms) is resolved
//! conservatively, so a survivor means "not excluded by the case
//! analysis at this granularity", never "certified destabiliser".

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::lattice::{
    slope, HilbClass, KummerClass, LatticeError, PolFamily, SurfaceDesc, SurfaceKind,
    VarietyClass, NODES,
};
use crate::npoly::{LeadingOrder, NPoly};
use crate::rat::Rat;
use crate::taut::SheafDesc;
use crate::workers;

// ---- Errors ----

/// Errors from the stability engine.
#[derive(Debug, Error)]
pub enum StabError {
    /// Candidate parameters do not fit the setting.
    #[error("candidate shape does not match the setting: {0}")]
    ShapeMismatch(String),
    /// The sheaf descriptor lives on the wrong kind of surface.
    #[error("the setting needs {required}, but the surface kind is {found}")]
    SurfaceMismatch {
        required: &'static str,
        found: String,
    },
    /// A leading-order comparison could not be decided.
    #[error("INDETERMINATE: {0}")]
    Indeterminate(String),
    /// Structurally invalid input.
    #[error("invalid stability input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn invalid(msg: impl Into<String>) -> StabError {
    StabError::Invalid(msg.into())
}

// ---- Settings and candidates ----

/// Where a stability question is posed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Setting {
    /// Hilbert scheme of n points on a regular surface.
    RegularHilb { n: usize },
    /// Two points on the rank-one abelian surface.
    AbelianHilb2,
    /// Three points on the rank-one abelian surface.
    AbelianHilb3,
    /// The Kummer surface of the rank-one abelian surface.
    Kummer,
    /// The 4-dimensional fibre of the summation map at level three.
    GenKummer4,
}

impl Setting {
    /// The regular-surface setting; the level must lie in the supported
    /// range 2..=5.
    pub fn regular_hilb(n: usize) -> Result<Self, StabError> {
        if !(2..=5).contains(&n) {
            return Err(invalid(format!(
                "the regular-surface setting supports n in 2..=5, got {n}"
            )));
        }
        Ok(Setting::RegularHilb { n })
    }

    fn requires_abelian(self) -> bool {
        !matches!(self, Setting::RegularHilb { .. })
    }

    /// The polarisation family the setting's conditions are stated for.
    pub fn polarisation(self) -> PolFamily {
        match self {
            Setting::RegularHilb { .. } => PolFamily::HN,
            Setting::AbelianHilb2 | Setting::AbelianHilb3 => PolFamily::HNm,
            Setting::Kummer => PolFamily::HNKm,
            Setting::GenKummer4 => PolFamily::HNK,
        }
    }
}

/// A candidate destabilising line bundle, reduced to the integer data
/// the conditions actually see.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CandidateLine {
    /// Polarisation degree l.H and the boundary twist a.
    RegularHilb { lh: i64, a: i64 },
    /// Factor exponents a1, a2, summation exponent b, boundary twist c.
    AbelianHilb2 { a1: i64, a2: i64, b: i64, c: i64 },
    /// Diagonal exponent a and summation exponent b at level three.
    AbelianHilb3 { a: i64, b: i64 },
    /// Degree H.g of the descending class and the sixteen exceptional
    /// multiplicities of its cover data.
    Kummer { gh: i64, nodal: Vec<i64> },
    /// The single surviving pullback exponent on the summation fibre.
    GenKummer4 { l: i64 },
}

impl CandidateLine {
    /// Kummer candidate from cover data. Mixed-parity exceptional
    /// multiplicities never descend, so they are rejected up front.
    pub fn kummer(gh: i64, nodal: Vec<i64>) -> Result<Self, StabError> {
        if nodal.len() != NODES {
            return Err(StabError::ShapeMismatch(format!(
                "Kummer candidates carry {NODES} exceptional multiplicities, got {}",
                nodal.len()
            )));
        }
        let parity = nodal[0].rem_euclid(2);
        if nodal.iter().any(|x| x.rem_euclid(2) != parity) {
            return Err(invalid(
                "exceptional multiplicities of mixed parity do not descend",
            ));
        }
        Ok(CandidateLine::Kummer { gh, nodal })
    }
}

impl fmt::Display for CandidateLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateLine::RegularHilb { lh, a } => write!(f, "(l.H, a) = ({lh}, {a})"),
            CandidateLine::AbelianHilb2 { a1, a2, b, c } => {
                write!(f, "(a1, a2, b, c) = ({a1}, {a2}, {b}, {c})")
            }
            CandidateLine::AbelianHilb3 { a, b } => write!(f, "(a, b) = ({a}, {b})"),
            CandidateLine::Kummer { gh, nodal } => {
                let sum: i64 = nodal.iter().sum();
                write!(f, "(H.g = {gh}, exceptional sum = {sum})")
            }
            CandidateLine::GenKummer4 { l } => write!(f, "(l) = ({l})"),
        }
    }
}

fn check_shape(setting: Setting, cand: &CandidateLine) -> Result<(), StabError> {
    let ok = matches!(
        (setting, cand),
        (Setting::RegularHilb { .. }, CandidateLine::RegularHilb { .. })
            | (Setting::AbelianHilb2, CandidateLine::AbelianHilb2 { .. })
            | (Setting::AbelianHilb3, CandidateLine::AbelianHilb3 { .. })
            | (Setting::Kummer, CandidateLine::Kummer { .. })
            | (Setting::GenKummer4, CandidateLine::GenKummer4 { .. })
    );
    if ok {
        Ok(())
    } else {
        Err(StabError::ShapeMismatch(format!(
            "{setting:?} does not take {cand}"
        )))
    }
}

fn check_surface(setting: Setting, surface: &SurfaceDesc) -> Result<(), StabError> {
    let abelian = surface.kind() == SurfaceKind::AbelianStar;
    if setting.requires_abelian() == abelian {
        return Ok(());
    }
    Err(StabError::SurfaceMismatch {
        required: if setting.requires_abelian() {
            "the rank-one abelian surface"
        } else {
            "a regular surface"
        },
        found: format!("{:?}", surface.kind()),
    })
}

/// Right-hand side of the setting's condition: the polarisation degree
/// of c1 in the degree-valued settings, its H-coefficient in the
/// coefficient-valued abelian ones.
fn source_scale(setting: Setting, f: &SheafDesc) -> Result<Rat, StabError> {
    match setting {
        Setting::RegularHilb { .. } | Setting::Kummer => Ok(f.surface().degree(f.c1())?),
        Setting::AbelianHilb2 | Setting::AbelianHilb3 | Setting::GenKummer4 => {
            Ok(f.c1()[0].clone())
        }
    }
}

// ---- Exclusion cases and exceptions ----

/// Exclusion-case tags; each names the argument that removes a
/// condition-satisfying candidate.
pub mod kill {
    /// Positive candidate degree leaves no map to the trivial summand.
    pub const POSITIVE_DEGREE: &str = "positive-degree";
    /// A nonzero map into the stable source would break its slope bound.
    pub const SOURCE_STABILITY: &str = "source-stability";
    /// Boundary candidate carrying a nonzero half-exceptional twist;
    /// only the untwisted exception embeds.
    pub const BOUNDARY_TWIST: &str = "boundary-twist";
    /// Unequal factor exponents never descend from the product.
    pub const ASYMMETRIC_PAIR: &str = "asymmetric-pair";
    /// Positive degree along the exchange fibres kills all sections.
    pub const FIBRE_SECTIONS: &str = "fibre-sections";
    /// Sections supported on the diagonal cannot reach a torsion-free
    /// sheaf.
    pub const TORSION_SECTIONS: &str = "torsion-sections";
    /// Negative second factor exponent sharpens the condition past the
    /// stable slope of the source.
    pub const OVERFLOW_NEG_A2: &str = "strict-overflow-negative-a2";
    /// Negative summation exponent sharpens the condition past the
    /// stable slope of the source.
    pub const OVERFLOW_NEG_B: &str = "strict-overflow-negative-b";
    /// Negative diagonal exponent reduces to the two-point engine with a
    /// strict bound.
    pub const PAIR_ENGINE_NEG_A: &str = "pair-engine-negative-a";
    /// Negative summation exponent reduces to the two-point engine with
    /// a strict bound.
    pub const PAIR_ENGINE_NEG_B: &str = "pair-engine-negative-b";
    /// Negative pullback exponent reduces to the two-point engine with a
    /// strict bound.
    pub const PAIR_ENGINE_NEG_L: &str = "pair-engine-negative-l";
    /// Only symmetric classes descend to the quotient surface, and the
    /// source is not symmetric.
    pub const SYMMETRY_DESCENT: &str = "symmetry-descent";
}

/// Exception tags carried by surviving candidates.
pub mod exception {
    /// The identity-shaped embedding of the numerically trivial source.
    pub const TRIVIAL_SELF: &str = "trivial-self-embedding";
    /// A symmetric source reappearing inside its own restriction.
    pub const SYMMETRIC_RESTRICTION: &str = "symmetric-restriction";
}

/// Outcome of the case analysis for one candidate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Fate {
    /// Fails the destabilising condition; no threat to stability.
    NotACandidate,
    /// Meets the condition and is removed by the named exclusion case.
    Killed { case: &'static str },
    /// Meets the condition and no exclusion applies.
    Survives { exception: &'static str },
}

impl Fate {
    fn killed(case: &'static str) -> Fate {
        Fate::Killed { case }
    }

    fn survives(exception: &'static str) -> Fate {
        Fate::Survives { exception }
    }
}

// ---- Integer core ----

/// Exact integer core shared by the predicates and the box search. The
/// scale is p/q with q > 0, so every comparison is a cross-multiplied
/// integer inequality.
#[derive(Clone, Copy)]
struct Core {
    p: i128,
    q: i128,
    r: i128,
    symmetric: bool,
}

impl Core {
    fn new(setting: Setting, f: &SheafDesc) -> Result<Core, StabError> {
        check_surface(setting, f.surface())?;
        let scale = source_scale(setting, f)?;
        let p = i128::try_from(scale.numer())
            .map_err(|_| invalid("first Chern data exceeds the searchable range"))?;
        let q = i128::try_from(scale.denom())
            .map_err(|_| invalid("first Chern data exceeds the searchable range"))?;
        Ok(Core {
            p,
            q,
            r: i128::from(f.rank()),
            symmetric: f.flags().symmetric,
        })
    }

    /// Weighted condition w * s >= p/q, cross-multiplied.
    fn destab_weighted(&self, w: i128, s: i128) -> bool {
        self.q * w * s >= self.p
    }

    /// Numeric identity with the rank-one source: x == p/q.
    fn iso(&self, x: i128) -> bool {
        self.r == 1 && self.q * x == self.p
    }

    fn regular_fate(&self, n: i128, lh: i128, a: i128) -> Fate {
        if !self.destab_weighted(n * self.r, lh) {
            return Fate::NotACandidate;
        }
        if lh > 0 {
            // Maps to the trivial summand need nonpositive degree.
            Fate::killed(kill::POSITIVE_DEGREE)
        } else if !self.iso(lh) {
            Fate::killed(kill::SOURCE_STABILITY)
        } else if a != 0 {
            Fate::killed(kill::BOUNDARY_TWIST)
        } else {
            Fate::survives(exception::TRIVIAL_SELF)
        }
    }

    fn ab2_fate(&self, a1: i128, a2: i128, b: i128, c: i128) -> Fate {
        if !self.destab_weighted(self.r, a1 + a2 + b) {
            return Fate::NotACandidate;
        }
        if a1 != a2 {
            Fate::killed(kill::ASYMMETRIC_PAIR)
        } else if a2 + b > 0 {
            Fate::killed(kill::FIBRE_SECTIONS)
        } else if a2 + b == 0 {
            if b != 0 {
                Fate::killed(kill::TORSION_SECTIONS)
            } else if !self.iso(a1) {
                // a2 = b = 0 leaves a map straight into the source.
                Fate::killed(kill::SOURCE_STABILITY)
            } else if c != 0 {
                Fate::killed(kill::BOUNDARY_TWIST)
            } else {
                Fate::survives(exception::TRIVIAL_SELF)
            }
        } else if a2 < 0 {
            Fate::killed(kill::OVERFLOW_NEG_A2)
        } else {
            Fate::killed(kill::OVERFLOW_NEG_B)
        }
    }

    fn ab3_fate(&self, a: i128, b: i128) -> Fate {
        if !self.destab_weighted(self.r, 3 * a + b) {
            return Fate::NotACandidate;
        }
        if 2 * a + b >= 0 {
            if (a, b) != (0, 0) {
                Fate::killed(kill::FIBRE_SECTIONS)
            } else if !self.iso(0) {
                Fate::killed(kill::SOURCE_STABILITY)
            } else {
                Fate::survives(exception::TRIVIAL_SELF)
            }
        } else if a < 0 {
            Fate::killed(kill::PAIR_ENGINE_NEG_A)
        } else {
            Fate::killed(kill::PAIR_ENGINE_NEG_B)
        }
    }

    fn kummer_fate(&self, gh: i128) -> Fate {
        if !self.destab_weighted(self.r, gh) {
            return Fate::NotACandidate;
        }
        if !self.iso(gh) {
            Fate::killed(kill::SOURCE_STABILITY)
        } else if !self.symmetric {
            Fate::killed(kill::SYMMETRY_DESCENT)
        } else {
            Fate::survives(exception::SYMMETRIC_RESTRICTION)
        }
    }

    fn genkum_fate(&self, l: i128) -> Fate {
        if !self.destab_weighted(3 * self.r, l) {
            return Fate::NotACandidate;
        }
        if l >= 0 {
            if self.iso(0) && l == 0 {
                Fate::survives(exception::TRIVIAL_SELF)
            } else {
                Fate::killed(kill::SOURCE_STABILITY)
            }
        } else {
            Fate::killed(kill::PAIR_ENGINE_NEG_L)
        }
    }

    fn fate(&self, setting: Setting, cand: &CandidateLine) -> Fate {
        match (setting, cand) {
            (Setting::RegularHilb { n }, CandidateLine::RegularHilb { lh, a }) => {
                self.regular_fate(n as i128, i128::from(*lh), i128::from(*a))
            }
            (Setting::AbelianHilb2, CandidateLine::AbelianHilb2 { a1, a2, b, c }) => self
                .ab2_fate(
                    i128::from(*a1),
                    i128::from(*a2),
                    i128::from(*b),
                    i128::from(*c),
                ),
            (Setting::AbelianHilb3, CandidateLine::AbelianHilb3 { a, b }) => {
                self.ab3_fate(i128::from(*a), i128::from(*b))
            }
            (Setting::Kummer, CandidateLine::Kummer { gh, .. }) => {
                self.kummer_fate(i128::from(*gh))
            }
            (Setting::GenKummer4, CandidateLine::GenKummer4 { l }) => {
                self.genkum_fate(i128::from(*l))
            }
            _ => unreachable!("shape checked before the core runs"),
        }
    }
}

// ---- Destabilising conditions and case analysis ----

/// The setting's destabilising condition, evaluated exactly. True means
/// the candidate would destabilise if it embedded; the case analysis
/// decides whether it can.
pub fn destab_condition(
    setting: Setting,
    cand: &CandidateLine,
    f: &SheafDesc,
) -> Result<bool, StabError> {
    check_shape(setting, cand)?;
    let core = Core::new(setting, f)?;
    Ok(core.fate(setting, cand) != Fate::NotACandidate)
}

/// Runs the matching case analysis on one candidate: it either fails the
/// destabilising condition, or the fate names the exclusion that kills
/// it, or the exception that lets it through.
pub fn candidate_fate(
    setting: Setting,
    cand: &CandidateLine,
    f: &SheafDesc,
) -> Result<Fate, StabError> {
    check_shape(setting, cand)?;
    let core = Core::new(setting, f)?;
    Ok(core.fate(setting, cand))
}

// ---- Slope derivations ----

/// A leading-order slope comparison together with the integer condition
/// it reproduces.
#[derive(Clone, Debug)]
pub struct SlopeDerivation {
    /// Slope of the candidate line bundle as a polynomial in N.
    pub candidate_slope: NPoly,
    /// Slope of the tautological-type sheaf it would destabilise.
    pub taut_slope: NPoly,
    /// Full degreewise comparison, validity floors included.
    pub order: LeadingOrder,
    /// Weak inequality candidate >= sheaf at the top order in N.
    pub holds: bool,
    /// The reproduced integer condition with values substituted.
    pub derived: String,
}

/// Top degree in N of the setting's slope polynomials: one less than
/// the real dimension of the variety.
fn family_degree(setting: Setting) -> i64 {
    match setting {
        Setting::RegularHilb { n } => 2 * n as i64 - 1,
        Setting::AbelianHilb2 => 3,
        Setting::AbelianHilb3 => 5,
        Setting::Kummer => 1,
        Setting::GenKummer4 => 3,
    }
}

/// Compares two slope polynomials at the family's top order. The top
/// coefficient may be a dropped zero; anything below the top is
/// immaterial for large N.
fn top_compare(top: i64, a: &NPoly, b: &NPoly) -> Result<std::cmp::Ordering, StabError> {
    match (a.coeff(top), b.coeff(top)) {
        (Some(x), Some(y)) => Ok(x.cmp(&y)),
        _ => Err(StabError::Indeterminate(
            "a validity floor hides the top-order slope coefficient".into(),
        )),
    }
}

/// Derives the setting's integer condition from the slope tables: the
/// candidate slope meets the sheaf slope at leading order exactly when
/// the printed condition holds. Asymmetric pair exponents enter through
/// their rational symmetrisation, which has the same pairing numbers.
pub fn slope_implies_condition(
    setting: Setting,
    cand: &CandidateLine,
    f: &SheafDesc,
    pol: PolFamily,
) -> Result<SlopeDerivation, StabError> {
    check_shape(setting, cand)?;
    check_surface(setting, f.surface())?;
    if pol != setting.polarisation() {
        return Err(invalid(format!(
            "the {setting:?} conditions are stated for {:?}, not {pol:?}",
            setting.polarisation()
        )));
    }
    let surface = f.surface();
    let r = i64::from(f.rank());
    let scale = source_scale(setting, f)?;

    let (candidate_slope, taut_slope, derived) = match (setting, cand) {
        (Setting::RegularHilb { n }, CandidateLine::RegularHilb { lh, a }) => {
            let h2 = surface.pair(&surface.h_coords(), &surface.h_coords())?;
            if h2.is_zero() {
                return Err(invalid("the polarisation square must be nonzero"));
            }
            let coords: Vec<Rat> = surface
                .h_coords()
                .iter()
                .map(|x| x * &(Rat::int(*lh) * &h2.recip()))
                .collect();
            let cand_class = HilbClass::new(surface, n, coords, None, Rat::int(*a))?;
            let taut_class =
                HilbClass::new(surface, n, f.c1().to_vec(), None, Rat::int(-r))?;
            let lhs = slope(surface, 1, &VarietyClass::Hilb(cand_class), pol)?;
            let rhs = slope(
                surface,
                f.rank() * n as u32,
                &VarietyClass::Hilb(taut_class),
                pol,
            )?;
            let bound = &scale * &Rat::int(n as i64 * r).recip();
            let derived = format!("l.H >= f.H/(n r): {lh} >= {bound}");
            (lhs, rhs, derived)
        }
        (Setting::AbelianHilb2, CandidateLine::AbelianHilb2 { a1, a2, b, c }) => {
            let half_sum = Rat::new(*a1 + *a2, 2);
            let cand_class = HilbClass::new(
                surface,
                2,
                vec![half_sum],
                Some(Rat::int(*b)),
                Rat::int(*c),
            )?;
            let taut_class = HilbClass::new(
                surface,
                2,
                f.c1().to_vec(),
                Some(Rat::zero()),
                Rat::int(-r),
            )?;
            let lhs = slope(surface, 1, &VarietyClass::Hilb(cand_class), pol)?;
            let rhs = slope(surface, 2 * f.rank(), &VarietyClass::Hilb(taut_class), pol)?;
            let bound = &scale * &Rat::int(r).recip();
            let derived = format!("a1+a2+b >= f/r: {} >= {bound}", a1 + a2 + b);
            (lhs, rhs, derived)
        }
        (Setting::AbelianHilb3, CandidateLine::AbelianHilb3 { a, b }) => {
            let cand_class = HilbClass::new(
                surface,
                3,
                vec![Rat::int(*a)],
                Some(Rat::int(*b)),
                Rat::zero(),
            )?;
            let taut_class = HilbClass::new(
                surface,
                3,
                f.c1().to_vec(),
                Some(Rat::zero()),
                Rat::int(-r),
            )?;
            let lhs = slope(surface, 1, &VarietyClass::Hilb(cand_class), pol)?;
            let rhs = slope(surface, 3 * f.rank(), &VarietyClass::Hilb(taut_class), pol)?;
            let bound = &scale * &Rat::int(r).recip();
            let derived = format!("3a+b >= f/r: {} >= {bound}", 3 * *a + *b);
            (lhs, rhs, derived)
        }
        (Setting::Kummer, CandidateLine::Kummer { gh, nodal }) => {
            let g = vec![Rat::new(*gh, 2)];
            let a: Vec<Rat> = nodal.iter().map(|x| Rat::int(*x)).collect();
            let cand_class = KummerClass::from_cover_data(surface, &g, &a)?;
            let taut_class = KummerClass::restricted_sheaf_c1(surface, f.c1(), f.rank())?;
            let lhs = slope(surface, 1, &VarietyClass::Kummer(cand_class), pol)?;
            let rhs = slope(surface, 2 * f.rank(), &VarietyClass::Kummer(taut_class), pol)?;
            let bound = &scale * &Rat::int(r).recip();
            let derived = format!("H.g >= H.f/r: {gh} >= {bound}");
            (lhs, rhs, derived)
        }
        (Setting::GenKummer4, CandidateLine::GenKummer4 { l }) => {
            let cand_class = HilbClass::new(
                surface,
                3,
                vec![Rat::int(*l)],
                Some(Rat::zero()),
                Rat::zero(),
            )?;
            let taut_class = HilbClass::new(
                surface,
                3,
                f.c1().to_vec(),
                Some(Rat::zero()),
                Rat::int(-r),
            )?;
            let lhs = slope(surface, 1, &VarietyClass::Hilb(cand_class), pol)?;
            let rhs = slope(surface, 3 * f.rank(), &VarietyClass::Hilb(taut_class), pol)?;
            let bound = &scale * &Rat::int(3 * r).recip();
            let derived = format!("l >= f/(3 r): {l} >= {bound}");
            (lhs, rhs, derived)
        }
        _ => unreachable!("shape checked above"),
    };

    let holds = top_compare(family_degree(setting), &candidate_slope, &taut_slope)?
        != std::cmp::Ordering::Less;
    let order = candidate_slope.compare_leading(&taut_slope);
    Ok(SlopeDerivation {
        candidate_slope,
        taut_slope,
        order,
        holds,
        derived,
    })
}

// ---- Box search ----

/// Outcome of an exhaustive box search.
#[derive(Clone, Debug)]
pub struct SearchReport {
    /// Condition-satisfying candidates no exclusion removes, in
    /// lexicographic parameter order.
    pub survivors: Vec<CandidateLine>,
    /// How many candidates each exclusion case removed.
    pub kills: BTreeMap<&'static str, u64>,
    /// Size of the enumerated parameter box.
    pub examined: u64,
    /// Tuples meeting the destabilising condition.
    pub matched: u64,
}

#[derive(Default)]
struct Acc {
    survivors: Vec<CandidateLine>,
    kills: BTreeMap<&'static str, u64>,
    matched: u64,
}

impl Acc {
    fn absorb(&mut self, fate: Fate, weight: u64, cand: impl FnOnce() -> CandidateLine) {
        match fate {
            Fate::NotACandidate => {}
            Fate::Killed { case } => {
                self.matched += weight;
                *self.kills.entry(case).or_insert(0) += weight;
            }
            Fate::Survives { .. } => {
                self.matched += weight;
                self.survivors.push(cand());
            }
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.survivors.extend(other.survivors);
        for (k, v) in other.kills {
            *self.kills.entry(k).or_insert(0) += v;
        }
        self.matched += other.matched;
        self
    }
}

/// Exhaustively classifies every candidate tuple with all parameters in
/// [-B, B]: survivors are returned in lexicographic order and every kill
/// is attributed to its exclusion case.
///
/// Two box reductions keep this exact and finite. The two-point boundary
/// twist c only matters on exception-shaped tuples, so the c-axis is
/// enumerated analytically rather than looped. The Kummer conditions
/// never see the exceptional multiplicities, so that box is quotiented
/// to its degree axis and survivors carry the zero representative.
pub fn destabilizer_search(
    f: &SheafDesc,
    setting: Setting,
    bound: i64,
) -> Result<SearchReport, StabError> {
    destabilizer_search_with_workers(f, setting, bound, workers::worker_count())
}

/// `destabilizer_search` with an explicit worker count; results are
/// identical for every count.
pub fn destabilizer_search_with_workers(
    f: &SheafDesc,
    setting: Setting,
    bound: i64,
    worker_count: usize,
) -> Result<SearchReport, StabError> {
    if bound < 1 {
        return Err(invalid("the search bound must be at least 1"));
    }
    let core = Core::new(setting, f)?;
    let side = (2 * bound + 1) as u64;
    let rows = side as usize;
    let at = |i: usize| i as i64 - bound;

    let (examined, acc) = match setting {
        Setting::RegularHilb { n } => {
            let chunks = workers::map_ranges(rows, worker_count, |range| {
                let mut acc = Acc::default();
                for i in range {
                    let lh = at(i);
                    for a in -bound..=bound {
                        let fate = core.regular_fate(n as i128, lh.into(), a.into());
                        acc.absorb(fate, 1, || CandidateLine::RegularHilb { lh, a });
                    }
                }
                acc
            });
            let acc = chunks.into_iter().fold(Acc::default(), Acc::merge);
            (side.saturating_pow(2), acc)
        }
        Setting::AbelianHilb2 => {
            let chunks = workers::map_ranges(rows, worker_count, |range| {
                let mut acc = Acc::default();
                for i in range {
                    let a1 = at(i);
                    for a2 in -bound..=bound {
                        for b in -bound..=bound {
                            // Representative c = 0; the twist only splits
                            // the exception-shaped tuples.
                            match core.ab2_fate(a1.into(), a2.into(), b.into(), 0) {
                                Fate::NotACandidate => {}
                                Fate::Killed { case } => {
                                    acc.absorb(Fate::killed(case), side, || unreachable!())
                                }
                                Fate::Survives { exception } => {
                                    acc.absorb(
                                        Fate::killed(kill::BOUNDARY_TWIST),
                                        side - 1,
                                        || unreachable!(),
                                    );
                                    acc.absorb(Fate::survives(exception), 1, || {
                                        CandidateLine::AbelianHilb2 { a1, a2, b, c: 0 }
                                    });
                                }
                            }
                        }
                    }
                }
                acc
            });
            let acc = chunks.into_iter().fold(Acc::default(), Acc::merge);
            (side.saturating_pow(4), acc)
        }
        Setting::AbelianHilb3 => {
            let chunks = workers::map_ranges(rows, worker_count, |range| {
                let mut acc = Acc::default();
                for i in range {
                    let a = at(i);
                    for b in -bound..=bound {
                        let fate = core.ab3_fate(a.into(), b.into());
                        acc.absorb(fate, 1, || CandidateLine::AbelianHilb3 { a, b });
                    }
                }
                acc
            });
            let acc = chunks.into_iter().fold(Acc::default(), Acc::merge);
            (side.saturating_pow(2), acc)
        }
        Setting::Kummer => {
            let mut acc = Acc::default();
            for i in 0..rows {
                let gh = at(i);
                let fate = core.kummer_fate(gh.into());
                acc.absorb(fate, 1, || CandidateLine::Kummer {
                    gh,
                    nodal: vec![0; NODES],
                });
            }
            (side, acc)
        }
        Setting::GenKummer4 => {
            let mut acc = Acc::default();
            for i in 0..rows {
                let l = at(i);
                let fate = core.genkum_fate(l.into());
                acc.absorb(fate, 1, || CandidateLine::GenKummer4 { l });
            }
            (side, acc)
        }
    };

    Ok(SearchReport {
        survivors: acc.survivors,
        kills: acc.kills,
        examined,
        matched: acc.matched,
    })
}

// ---- Verdicts ----

/// Stability target attached to a level-n construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Target {
    /// The tautological sheaf on the Hilbert scheme itself.
    Hilb,
    /// Its pushdown to the Kummer surface (level two).
    Kummer,
    /// Its restriction to the 4-dimensional summation fibre (level
    /// three).
    GenKummer,
}

/// How a verdict was reached.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    /// Every hypothesis of the cited theorem holds.
    StableByTheorem,
    /// Exactly the determinant-nontriviality hypothesis fails: the
    /// sheaf sits in the exclusion case the case analyses carve out.
    ExcludedCase,
    /// Some other hypothesis fails; stability is unproven here.
    HypothesisFails,
    /// No registry row covers the shape.
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::StableByTheorem => "STABLE_BY_THEOREM",
            Outcome::ExcludedCase => "EXCLUDED_CASE",
            Outcome::HypothesisFails => "HYPOTHESIS_FAILS",
            Outcome::Unknown => "UNKNOWN",
        };
        f.write_str(s)
    }
}

/// One checked hypothesis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypothesis {
    pub name: &'static str,
    pub holds: bool,
}

/// A stability verdict: the outcome, the registry citation, the checked
/// hypothesis trail and the evaluated numeric side conditions.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub citation: Option<&'static str>,
    pub trail: Vec<Hypothesis>,
    pub inequalities: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DetNeed {
    Nontrivial,
    NotSymmetric,
}

struct TheoremRow {
    tag: &'static str,
    regular: bool,
    target: Target,
    n: usize,
    rank: u32,
    needs_mu_stable: bool,
    needs_torsion_free: bool,
    det: DetNeed,
    dual_route: bool,
}

const DET_HYP: &str = "the determinant is nontrivial";
const DET_DUAL_HYP: &str = "the dual determinant is nontrivial (rank-two subsheaves route through the dual)";
const DET_SYM_HYP: &str = "the determinant is not symmetric";

/// The theorem registry: one row per proved stability statement.
const REGISTRY: &[TheoremRow] = &[
    TheoremRow {
        tag: "regular-rank-two",
        regular: true,
        target: Target::Hilb,
        n: 2,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
    TheoremRow {
        tag: "regular-rank-four",
        regular: true,
        target: Target::Hilb,
        n: 2,
        rank: 2,
        needs_mu_stable: true,
        needs_torsion_free: false,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
    TheoremRow {
        tag: "regular-rank-three",
        regular: true,
        target: Target::Hilb,
        n: 3,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::Nontrivial,
        dual_route: true,
    },
    TheoremRow {
        tag: "abelian-rank-two",
        regular: false,
        target: Target::Hilb,
        n: 2,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
    TheoremRow {
        tag: "abelian-rank-four",
        regular: false,
        target: Target::Hilb,
        n: 2,
        rank: 2,
        needs_mu_stable: true,
        needs_torsion_free: false,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
    TheoremRow {
        tag: "abelian-rank-three",
        regular: false,
        target: Target::Hilb,
        n: 3,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
    TheoremRow {
        tag: "kummer-rank-two",
        regular: false,
        target: Target::Kummer,
        n: 2,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::NotSymmetric,
        dual_route: false,
    },
    TheoremRow {
        tag: "kummer-rank-four",
        regular: false,
        target: Target::Kummer,
        n: 2,
        rank: 2,
        needs_mu_stable: true,
        needs_torsion_free: false,
        det: DetNeed::NotSymmetric,
        dual_route: false,
    },
    TheoremRow {
        tag: "genkummer-rank-three",
        regular: false,
        target: Target::GenKummer,
        n: 3,
        rank: 1,
        needs_mu_stable: false,
        needs_torsion_free: true,
        det: DetNeed::Nontrivial,
        dual_route: false,
    },
];

/// Looks up the theorem covering the descriptor's shape, checks its
/// hypothesis list and reports the outcome with the full trail.
pub fn stability_verdict(f: &SheafDesc, n: usize, target: Target) -> Verdict {
    let regular = f.surface().kind() != SurfaceKind::AbelianStar;
    let row = REGISTRY.iter().find(|row| {
        row.regular == regular && row.target == target && row.n == n && row.rank == f.rank()
    });
    let Some(row) = row else {
        return Verdict {
            outcome: Outcome::Unknown,
            citation: None,
            trail: Vec::new(),
            inequalities: vec![format!(
                "no registry row covers rank {} at level {n} for {target:?}",
                f.rank()
            )],
        };
    };

    let flags = f.flags();
    let mut trail = Vec::new();
    if row.needs_torsion_free {
        trail.push(Hypothesis {
            name: "the source is torsion-free",
            holds: flags.torsion_free,
        });
    }
    if row.needs_mu_stable {
        trail.push(Hypothesis {
            name: "the source is slope-stable",
            holds: flags.mu_stable,
        });
    }
    match row.det {
        DetNeed::Nontrivial => trail.push(Hypothesis {
            name: DET_HYP,
            holds: !flags.det_trivial,
        }),
        DetNeed::NotSymmetric => trail.push(Hypothesis {
            name: DET_SYM_HYP,
            holds: !flags.symmetric,
        }),
    }
    if row.dual_route {
        // Duality negates c1, which preserves (non)triviality, so the
        // rank-two exclusion inherits the same hypothesis value.
        trail.push(Hypothesis {
            name: DET_DUAL_HYP,
            holds: !flags.det_trivial,
        });
    }

    let mut inequalities = vec![format!("rank = {}", f.rank())];
    if let Ok(deg) = f.surface().degree(f.c1()) {
        inequalities.push(format!("c1 . H = {deg}"));
    }
    inequalities.push(match row.det {
        DetNeed::Nontrivial => format!("trivial-determinant flag = {}", flags.det_trivial),
        DetNeed::NotSymmetric => format!("symmetric flag = {}", flags.symmetric),
    });

    let det_class = [DET_HYP, DET_DUAL_HYP];
    let failed: Vec<&Hypothesis> = trail.iter().filter(|h| !h.holds).collect();
    let outcome = if failed.is_empty() {
        Outcome::StableByTheorem
    } else if failed.iter().all(|h| det_class.contains(&h.name)) {
        Outcome::ExcludedCase
    } else {
        Outcome::HypothesisFails
    };

    Verdict {
        outcome,
        citation: Some(row.tag),
        trail,
        inequalities,
    }
}
