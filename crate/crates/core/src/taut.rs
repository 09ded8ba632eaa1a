//! Descriptor calculus for induced sheaves on Hilbert schemes: rank and
//! first Chern class bookkeeping, duals and their exceptional twist,
//! induced cohomology and extension dimensions, Mukai vectors and the
//! restriction to the Kummer surface.
//!
//! Cohomological data is caller-supplied dimension vectors, never computed
//! from geometry. The helpers stop at line-bundle Euler characteristics on
//! surfaces with trivial canonical class and at the fibre-power dimensions
//! on the elliptic surface.

use crate::graded::{graded_sum, graded_tensor, super_sym_power, GradedDims};
use crate::lattice::{HilbClass, KummerClass, LatticeError, SurfaceDesc, SurfaceKind};
use crate::rat::Rat;
use std::fmt;
use thiserror::Error;

// ---- Errors ----

#[derive(Debug, Error)]
pub enum TautError {
    #[error("NOT_LOCALLY_FREE: duality is defined only for locally free sources")]
    NotLocallyFree,
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn invalid(msg: impl Into<String>) -> TautError {
    TautError::Invalid(msg.into())
}

fn trivial_canonical(kind: SurfaceKind) -> bool {
    matches!(
        kind,
        SurfaceKind::K3 | SurfaceKind::EllipticK3 | SurfaceKind::AbelianStar
    )
}

// ---- Sheaf descriptors on the surface ----

/// Qualitative flags carried by a sheaf descriptor.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SheafFlags {
    pub mu_stable: bool,
    pub torsion_free: bool,
    pub locally_free: bool,
    pub symmetric: bool,
    pub det_trivial: bool,
}

impl SheafFlags {
    /// Every flag set; fits structure sheaves.
    pub fn all() -> Self {
        SheafFlags {
            mu_stable: true,
            torsion_free: true,
            locally_free: true,
            symmetric: true,
            det_trivial: true,
        }
    }
}

/// A coherent sheaf on a fixed surface described by numerical data: rank,
/// first Chern class coordinates, optional cohomology and self-extension
/// dimensions, and qualitative flags.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SheafDesc {
    surface: SurfaceDesc,
    rank: u32,
    c1: Vec<Rat>,
    coh: Option<GradedDims>,
    ext_self: Option<GradedDims>,
    flags: SheafFlags,
}

impl SheafDesc {
    pub fn new(
        surface: &SurfaceDesc,
        rank: u32,
        c1: Vec<Rat>,
        coh: Option<GradedDims>,
        ext_self: Option<GradedDims>,
        flags: SheafFlags,
    ) -> Result<Self, TautError> {
        if rank == 0 {
            return Err(invalid("sheaf descriptors need rank >= 1"));
        }
        if c1.len() != surface.rank() {
            return Err(invalid("first Chern class length does not match the basis"));
        }
        for dims in [&coh, &ext_self].into_iter().flatten() {
            if dims.dims().len() != 3 {
                return Err(invalid("surface dimension vectors have exactly 3 entries"));
            }
        }
        // Only one direction: a degree-zero class can still carry a
        // nontrivial determinant (the continuous part of the Picard
        // group is invisible to the lattice data).
        if flags.det_trivial && !c1.iter().all(Rat::is_zero) {
            return Err(invalid(
                "det_trivial requires a vanishing first Chern class",
            ));
        }
        if (flags.locally_free || flags.mu_stable) && !flags.torsion_free {
            return Err(invalid(
                "locally free or stable sheaves are torsion free",
            ));
        }
        let desc = SheafDesc {
            surface: surface.clone(),
            rank,
            c1,
            coh,
            ext_self,
            flags,
        };
        // Stability forces a vanishing on K3 surfaces away from degree
        // zero: positive slope admits no map to the trivial bundle and
        // negative slope admits no section. Degree zero stays free, so
        // the structure sheaf keeps both of its outer cohomologies.
        if flags.mu_stable
            && matches!(
                desc.surface.kind(),
                SurfaceKind::K3 | SurfaceKind::EllipticK3
            )
        {
            if let Some(coh) = &desc.coh {
                let deg = desc.surface.degree(&desc.c1)?;
                if deg.is_negative() && coh.dim(0) != 0 {
                    return Err(invalid(
                        "a stable sheaf of negative degree has no sections",
                    ));
                }
                if !deg.is_negative() && !deg.is_zero() && coh.dim(2) != 0 {
                    return Err(invalid(
                        "a stable sheaf of positive degree has vanishing h2",
                    ));
                }
            }
        }
        Ok(desc)
    }

    /// The structure sheaf with its cohomology and self-extensions.
    pub fn structure_sheaf(surface: &SurfaceDesc) -> Result<Self, TautError> {
        let coh = match surface.kind() {
            SurfaceKind::AbelianStar => GradedDims::new(&[1, 2, 1]),
            _ => {
                let h2 = surface.chi_o() - 1;
                if h2 < 0 {
                    return Err(invalid(
                        "chi(O) < 1 leaves no room for the constant section",
                    ));
                }
                GradedDims::new(&[1, 0, h2 as u64])
            }
        };
        SheafDesc::new(
            surface,
            1,
            vec![Rat::zero(); surface.rank()],
            Some(coh.clone()),
            Some(coh),
            SheafFlags::all(),
        )
    }

    /// The k-th power of the fibre class on the elliptic surface, k >= 1.
    pub fn elliptic_fibre_power(k: u64) -> Result<Self, TautError> {
        if k == 0 {
            return Err(invalid("fibre powers start at k = 1"));
        }
        let surface = SurfaceDesc::elliptic_k3();
        SheafDesc::new(
            &surface,
            1,
            vec![Rat::zero(), Rat::int(k as i64)],
            Some(elliptic_fibre_coh(k)),
            Some(GradedDims::new(&[1, 0, 1])),
            SheafFlags {
                mu_stable: true,
                torsion_free: true,
                locally_free: true,
                symmetric: false,
                det_trivial: false,
            },
        )
    }

    /// The point-ideal twist of the section-plus-k-fibres bundle on the
    /// elliptic surface, with the twisting point on the section. The
    /// section stays a base component for k >= 2, so the point imposes
    /// no condition: h0 = k+1, h1 = 1.
    pub fn base_point_ideal_twist(k: u64) -> Result<Self, TautError> {
        if k < 2 {
            return Err(invalid(
                "the base-component shape needs k >= 2 fibres",
            ));
        }
        let surface = SurfaceDesc::elliptic_k3();
        SheafDesc::new(
            &surface,
            1,
            vec![Rat::one(), Rat::int(k as i64)],
            Some(GradedDims::new(&[k + 1, 1, 0])),
            Some(GradedDims::new(&[1, 2, 1])),
            SheafFlags {
                mu_stable: true,
                torsion_free: true,
                locally_free: false,
                symmetric: false,
                det_trivial: false,
            },
        )
    }

    /// The dual sheaf's descriptor. Requires a locally free sheaf; the
    /// cohomology flips by Serre duality when the canonical class is
    /// trivial and is dropped otherwise.
    pub fn dualized(&self) -> Result<SheafDesc, TautError> {
        if !self.flags.locally_free {
            return Err(TautError::NotLocallyFree);
        }
        let coh = if trivial_canonical(self.surface.kind()) {
            self.coh.as_ref().map(serre_flip)
        } else {
            None
        };
        SheafDesc::new(
            &self.surface,
            self.rank,
            self.c1.iter().map(|c| -c).collect(),
            coh,
            self.ext_self.clone(),
            self.flags,
        )
    }

    pub fn surface(&self) -> &SurfaceDesc {
        &self.surface
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn c1(&self) -> &[Rat] {
        &self.c1
    }

    pub fn coh(&self) -> Option<&GradedDims> {
        self.coh.as_ref()
    }

    pub fn ext_self(&self) -> Option<&GradedDims> {
        self.ext_self.as_ref()
    }

    pub fn flags(&self) -> SheafFlags {
        self.flags
    }
}

// ---- Induced sheaves on the Hilbert scheme ----

/// The induced sheaf on the length-n Hilbert scheme of the source
/// surface, possibly twisted by a power of the half-exceptional line
/// bundle. Invariant:
/// c1 = (source c1) - (source rank) delta + rank * delta_twist * delta.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TautDesc {
    pub n: usize,
    pub rank: u32,
    pub c1: HilbClass,
    pub source: SheafDesc,
    pub delta_twist: i64,
    /// Set when this descriptor came out of `dualize` with a Chern class
    /// that is not the negated input class, which happens at n >= 3.
    pub convention_tension: bool,
}

fn induced_c1(source: &SheafDesc, n: usize, twist: i64) -> Result<HilbClass, TautError> {
    let r = source.rank() as i64;
    let d = Rat::int(-r) + &Rat::int(twist * n as i64 * r);
    let m = (source.surface().kind() == SurfaceKind::AbelianStar).then(Rat::zero);
    Ok(HilbClass::new(source.surface(), n, source.c1().to_vec(), m, d)?)
}

/// The induced sheaf of a surface sheaf: rank nr and first Chern class
/// (source c1) - (source rank) delta.
pub fn tautologize(source: &SheafDesc, n: usize) -> Result<TautDesc, TautError> {
    if n < 2 {
        return Err(invalid("induced sheaves live on Hilbert schemes with n >= 2"));
    }
    let rank = u32::try_from(n)
        .ok()
        .and_then(|n| n.checked_mul(source.rank()))
        .ok_or_else(|| invalid("rank overflow"))?;
    Ok(TautDesc {
        n,
        rank,
        c1: induced_c1(source, n, 0)?,
        source: source.clone(),
        delta_twist: 0,
        convention_tension: false,
    })
}

/// The dual of an induced sheaf: the induced sheaf of the dual source
/// twisted by one power of the half-exceptional line bundle, so its
/// first Chern class is (-f) - r delta + nr delta. At n = 2 this is the
/// plain negation; at n >= 3 it is not, and the result says so.
pub fn dualize(t: &TautDesc) -> Result<TautDesc, TautError> {
    let source = t.source.dualized()?;
    let delta_twist = 1 - t.delta_twist;
    let c1 = induced_c1(&source, t.n, delta_twist)?;
    let convention_tension = c1 != t.c1.negated();
    Ok(TautDesc {
        n: t.n,
        rank: t.rank,
        c1,
        source,
        delta_twist,
        convention_tension,
    })
}

// ---- Induced cohomology and extension dimensions ----

/// Serre-duality flip of a surface dimension vector: degree i goes to
/// degree 2 - i. Valid when the canonical class is trivial.
pub fn serre_flip(d: &GradedDims) -> GradedDims {
    assert!(d.dims().len() <= 3, "surface cohomology stops in degree 2");
    let mut v = d.dims().to_vec();
    v.resize(3, 0);
    v.reverse();
    GradedDims::new(&v)
}

/// Cohomology dimensions of the k-th fibre-class power on the elliptic
/// surface: (k+1, k-1, 0) for k >= 1.
pub fn elliptic_fibre_coh(k: u64) -> GradedDims {
    assert!(k >= 1, "fibre powers start at k = 1");
    GradedDims::new(&[k + 1, k - 1, 0])
}

/// Euler characteristic of a line bundle on a surface with trivial
/// canonical class: chi(O) + c1^2 / 2.
pub fn line_bundle_chi(surface: &SurfaceDesc, c1: &[Rat]) -> Result<Rat, TautError> {
    if !trivial_canonical(surface.kind()) {
        return Err(invalid(
            "Euler characteristics need a trivial canonical class",
        ));
    }
    let square = surface.pair(c1, c1)?;
    Ok(Rat::int(surface.chi_o()) + &(square * &Rat::new(1, 2)))
}

/// Cohomology dimensions of an induced sheaf twisted by an induced line
/// bundle: the twisted source cohomology tensored with the (n-1)-st
/// super symmetric power of the line bundle cohomology.
pub fn taut_cohomology_dims(coh_fl: &GradedDims, coh_l: &GradedDims, n: usize) -> GradedDims {
    assert!(n >= 1, "induced sheaves need n >= 1");
    graded_tensor(coh_fl, &super_sym_power(coh_l, n as u64 - 1))
}

/// Graded extension dimensions between two twisted induced sheaves: the
/// principal convolution plus the correction term with one symmetric
/// power less.
pub fn taut_ext_dims(
    ext_ef: &GradedDims,
    ext_lm: &GradedDims,
    ext_el_m: &GradedDims,
    ext_l_fm: &GradedDims,
    n: usize,
) -> GradedDims {
    assert!(n >= 2, "the extension formula needs n >= 2");
    let principal = graded_tensor(ext_ef, &super_sym_power(ext_lm, n as u64 - 1));
    let correction = graded_tensor(
        &graded_tensor(ext_el_m, ext_l_fm),
        &super_sym_power(ext_lm, n as u64 - 2),
    );
    graded_sum(&principal, &correction)
}

// ---- Mukai vectors ----

/// The divisor slot of a Mukai vector: surface coordinates, or a class
/// on the Kummer surface carried by the underlying abelian descriptor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MukaiCurve {
    Surface(Vec<Rat>),
    Kummer(KummerClass),
}

/// A Mukai vector (r, c1, s), with s = chi - r on K3-type surfaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MukaiVector {
    pub r: i64,
    pub c1: MukaiCurve,
    pub s: i64,
}

/// Builds the Mukai vector of a sheaf class with Euler characteristic
/// chi. Kummer-surface classes pair through the abelian descriptor.
pub fn mukai_vector(
    surface: &SurfaceDesc,
    r: i64,
    c1: MukaiCurve,
    chi: i64,
) -> Result<MukaiVector, TautError> {
    match &c1 {
        MukaiCurve::Surface(coords) => {
            if !matches!(surface.kind(), SurfaceKind::K3 | SurfaceKind::EllipticK3) {
                return Err(invalid("Mukai vectors live on K3-type surfaces"));
            }
            if coords.len() != surface.rank() {
                return Err(invalid("first Chern class length does not match the basis"));
            }
        }
        MukaiCurve::Kummer(_) => {
            if surface.kind() != SurfaceKind::AbelianStar {
                return Err(invalid(
                    "Kummer-surface Mukai vectors need the abelian descriptor",
                ));
            }
        }
    }
    Ok(MukaiVector { r, c1, s: chi - r })
}

/// Mukai pairing <(r,l,s),(r',l',s')> = l.l' - rs' - r's.
pub fn mukai_pair(
    surface: &SurfaceDesc,
    v: &MukaiVector,
    w: &MukaiVector,
) -> Result<Rat, TautError> {
    let ll = match (&v.c1, &w.c1) {
        (MukaiCurve::Surface(a), MukaiCurve::Surface(b)) => surface.pair(a, b)?,
        (MukaiCurve::Kummer(a), MukaiCurve::Kummer(b)) => a.pair(b, surface)?,
        _ => {
            return Err(invalid("Mukai vectors live on different surfaces"));
        }
    };
    Ok(ll - &Rat::int(v.r * w.s) - &Rat::int(w.r * v.s))
}

/// The Mukai self-pairing v^2.
pub fn mukai_square(surface: &SurfaceDesc, v: &MukaiVector) -> Result<Rat, TautError> {
    mukai_pair(surface, v, v)
}

/// The expected dimension v^2 + 2 of the first self-extension space,
/// with a warning for classes no sheaf realises.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ext1Report {
    pub dim: Rat,
    pub not_a_sheaf_class: bool,
}

impl fmt::Display for Ext1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dim)?;
        if self.not_a_sheaf_class {
            write!(f, " (NOT_A_SHEAF_CLASS)")?;
        }
        Ok(())
    }
}

/// First self-extension dimension attached to a Mukai vector.
pub fn ext1_dim(surface: &SurfaceDesc, v: &MukaiVector) -> Result<Ext1Report, TautError> {
    let dim = mukai_square(surface, v)? + &Rat::int(2);
    let not_a_sheaf_class = dim.is_negative();
    Ok(Ext1Report {
        dim,
        not_a_sheaf_class,
    })
}

// ---- Restriction to the Kummer surface ----

/// The restriction of an induced rank-2r sheaf to the Kummer surface:
/// doubled rank, first Chern class with a uniform nodal part -r/2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KummerSheafDesc {
    pub rank: u32,
    pub c1: KummerClass,
    pub source: SheafDesc,
}

/// Restricts the induced sheaf of an abelian-surface sheaf to the Kummer
/// surface inside the second Hilbert scheme.
pub fn kummer_restrict(source: &SheafDesc) -> Result<KummerSheafDesc, TautError> {
    let c1 = KummerClass::restricted_sheaf_c1(source.surface(), source.c1(), source.rank())?;
    let rank = source
        .rank()
        .checked_mul(2)
        .ok_or_else(|| invalid("rank overflow"))?;
    Ok(KummerSheafDesc {
        rank,
        c1,
        source: source.clone(),
    })
}

// ---- Tests ----

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{slope, PolFamily, VarietyClass, NODES};
    use crate::npoly::NPoly;

    fn k3() -> SurfaceDesc {
        SurfaceDesc::k3_rank_one(2).expect("valid surface")
    }

    fn line_bundle(surface: &SurfaceDesc, c1: Vec<Rat>, coh: Option<GradedDims>) -> SheafDesc {
        let det_trivial = c1.iter().all(Rat::is_zero);
        SheafDesc::new(
            surface,
            1,
            c1,
            coh,
            None,
            SheafFlags {
                mu_stable: false,
                torsion_free: true,
                locally_free: true,
                symmetric: false,
                det_trivial,
            },
        )
        .expect("valid descriptor")
    }

    #[test]
    fn builder_rejects_incoherent_descriptors() {
        let s = k3();
        let flags = SheafFlags::all();
        assert!(SheafDesc::new(&s, 0, vec![Rat::zero()], None, None, flags).is_err());
        assert!(SheafDesc::new(&s, 1, vec![], None, None, flags).is_err());
        let err = SheafDesc::new(&s, 1, vec![Rat::one()], None, None, flags).unwrap_err();
        assert!(err.to_string().contains("det_trivial"));
        let loose = SheafFlags {
            torsion_free: false,
            mu_stable: false,
            ..flags
        };
        assert!(SheafDesc::new(&s, 1, vec![Rat::zero()], None, None, loose).is_err());
    }

    #[test]
    fn stable_descriptors_respect_degree_signed_vanishing() {
        let s = k3();
        let stable = |c: i64, coh: &[u64]| {
            SheafDesc::new(
                &s,
                1,
                vec![Rat::int(c)],
                Some(GradedDims::new(coh)),
                None,
                SheafFlags {
                    mu_stable: true,
                    torsion_free: true,
                    locally_free: true,
                    symmetric: false,
                    det_trivial: c == 0,
                },
            )
        };
        assert!(stable(1, &[3, 0, 1]).is_err());
        assert!(stable(1, &[3, 0, 0]).is_ok());
        assert!(stable(-1, &[1, 0, 2]).is_err());
        assert!(stable(-1, &[0, 0, 2]).is_ok());
        assert!(stable(0, &[1, 0, 1]).is_ok());
    }

    #[test]
    fn structure_sheaves_carry_their_euler_characteristics() {
        let k3_o = SheafDesc::structure_sheaf(&k3()).expect("valid");
        assert_eq!(k3_o.coh().unwrap().dims(), &[1, 0, 1]);
        assert_eq!(k3_o.ext_self().unwrap().dims(), &[1, 0, 1]);
        let ab_o = SheafDesc::structure_sheaf(&SurfaceDesc::abelian_star()).expect("valid");
        assert_eq!(ab_o.coh().unwrap().dims(), &[1, 2, 1]);
        let ell_o = SheafDesc::structure_sheaf(&SurfaceDesc::elliptic_k3()).expect("valid");
        assert_eq!(ell_o.coh().unwrap().dims(), &[1, 0, 1]);
    }

    #[test]
    fn tautologize_tracks_rank_and_chern_class() {
        let s = k3();
        let h = line_bundle(&s, vec![Rat::one()], None);
        let t = tautologize(&h, 2).expect("valid");
        assert_eq!(t.rank, 2);
        assert_eq!(t.c1.h_part, vec![Rat::one()]);
        assert_eq!(t.c1.d_part, Rat::int(-1));

        let o3 = tautologize(&SheafDesc::structure_sheaf(&s).expect("valid"), 3).expect("valid");
        assert_eq!(o3.rank, 3);
        assert_eq!(o3.c1.h_part, vec![Rat::zero()]);
        assert_eq!(o3.c1.d_part, Rat::int(-1));

        let f = SheafDesc::new(
            &s,
            2,
            vec![Rat::int(5)],
            None,
            None,
            SheafFlags {
                mu_stable: true,
                torsion_free: true,
                locally_free: true,
                symmetric: false,
                det_trivial: false,
            },
        )
        .expect("valid");
        let t4 = tautologize(&f, 2).expect("valid");
        assert_eq!(t4.rank, 4);
        assert_eq!(t4.c1.h_part, vec![Rat::int(5)]);
        assert_eq!(t4.c1.d_part, Rat::int(-2));

        assert!(tautologize(&h, 1).is_err());
    }

    #[test]
    fn dual_negates_at_level_two() {
        let s = k3();
        let h = line_bundle(&s, vec![Rat::one()], None);
        let t = tautologize(&h, 2).expect("valid");
        let d = dualize(&t).expect("locally free");
        assert_eq!(d.c1, t.c1.negated());
        assert_eq!(d.c1.h_part, vec![Rat::int(-1)]);
        assert_eq!(d.c1.d_part, Rat::one());
        assert!(!d.convention_tension);

        let o2 = tautologize(&SheafDesc::structure_sheaf(&s).expect("valid"), 2).expect("valid");
        assert_eq!(o2.c1.d_part, Rat::int(-1));
        assert_eq!(dualize(&o2).expect("locally free").c1.d_part, Rat::one());
    }

    #[test]
    fn dual_at_level_three_picks_up_the_twist() {
        let s = k3();
        let h = line_bundle(&s, vec![Rat::one()], None);
        let t = tautologize(&h, 3).expect("valid");
        let d = dualize(&t).expect("locally free");
        assert_eq!(d.c1.h_part, vec![Rat::int(-1)]);
        assert_eq!(d.c1.d_part, Rat::int(2));
        assert_ne!(d.c1, t.c1.negated());
        assert!(d.convention_tension);
        assert_eq!(d.delta_twist, 1);
    }

    #[test]
    fn double_dual_returns_the_original_data() {
        let s = k3();
        for n in [2usize, 3, 4] {
            let f = SheafDesc::new(
                &s,
                2,
                vec![Rat::int(3)],
                Some(GradedDims::new(&[7, 1, 0])),
                Some(GradedDims::new(&[1, 4, 1])),
                SheafFlags {
                    mu_stable: true,
                    torsion_free: true,
                    locally_free: true,
                    symmetric: false,
                    det_trivial: false,
                },
            )
            .expect("valid");
            let t = tautologize(&f, n).expect("valid");
            let dd = dualize(&dualize(&t).expect("dual")).expect("double dual");
            assert_eq!(dd.c1, t.c1);
            assert_eq!(dd.source, t.source);
            assert_eq!(dd.delta_twist, 0);
            if n == 2 {
                assert_eq!(dd, t);
            }
        }
    }

    #[test]
    fn dualize_requires_a_locally_free_source() {
        let s = SurfaceDesc::elliptic_k3();
        let ideal_twist = SheafDesc::new(
            &s,
            1,
            vec![Rat::one(), Rat::int(2)],
            None,
            None,
            SheafFlags {
                mu_stable: true,
                torsion_free: true,
                locally_free: false,
                symmetric: false,
                det_trivial: false,
            },
        )
        .expect("valid");
        let t = tautologize(&ideal_twist, 2).expect("valid");
        let err = dualize(&t).unwrap_err();
        assert!(err.to_string().contains("NOT_LOCALLY_FREE"));
    }

    #[test]
    fn cohomology_dims_follow_the_convolution() {
        let o = GradedDims::new(&[1, 0, 1]);
        assert_eq!(taut_cohomology_dims(&o, &o, 2).dims(), &[1, 0, 2, 0, 1]);
        let g2 = elliptic_fibre_coh(2);
        assert_eq!(taut_cohomology_dims(&g2, &o, 2).dims(), &[3, 1, 3, 1, 0]);
        let none = GradedDims::new(&[0, 0, 0]);
        assert_eq!(taut_cohomology_dims(&o, &none, 2).dims(), &[0, 0, 0, 0, 0]);
    }

    #[test]
    fn ext_dims_match_the_two_summands_on_a_grid() {
        let o = GradedDims::new(&[1, 0, 1]);
        for a in 0..=5u64 {
            for b in 0..=5u64 {
                for e in [0u64, 1, 4] {
                    let ext_ff = GradedDims::new(&[1, e, 1]);
                    let coh_f = GradedDims::new(&[a, b, 0]);
                    let got = taut_ext_dims(&ext_ff, &o, &serre_flip(&coh_f), &coh_f, 2);
                    let principal = graded_tensor(&ext_ff, &o);
                    let correction = graded_tensor(&serre_flip(&coh_f), &coh_f);
                    assert_eq!(got, graded_sum(&principal, &correction));
                    assert_eq!(principal.dim(1), e);
                    assert_eq!(correction.dim(1), a * b);
                    assert_eq!(got.dim(1), e + a * b);
                    assert_eq!(got.dim(2), 2 + a * a + b * b);
                }
            }
        }
    }

    #[test]
    fn fibre_powers_give_square_minus_one_in_degree_one() {
        let o = GradedDims::new(&[1, 0, 1]);
        for k in 1..=5u64 {
            let coh = elliptic_fibre_coh(k);
            let got = taut_ext_dims(&o, &o, &serre_flip(&coh), &coh, 2);
            assert_eq!(got.dim(1), k * k - 1);
        }
        let coh3 = elliptic_fibre_coh(3);
        assert_eq!(taut_ext_dims(&o, &o, &serre_flip(&coh3), &coh3, 2).dim(1), 8);
    }

    #[test]
    fn serre_flip_reverses_and_involutes() {
        let v = GradedDims::new(&[4, 2, 0]);
        assert_eq!(serre_flip(&v).dims(), &[0, 2, 4]);
        assert_eq!(serre_flip(&serre_flip(&v)), v);
        assert_eq!(serre_flip(&GradedDims::new(&[1])).dims(), &[0, 0, 1]);
    }

    #[test]
    fn mukai_vectors_pair_by_the_hyperbolic_rule() {
        let s = k3();
        let v = mukai_vector(&s, 1, MukaiCurve::Surface(vec![Rat::zero()]), 2).expect("valid");
        assert_eq!(v.s, 1);
        assert_eq!(mukai_square(&s, &v).expect("valid"), Rat::int(-2));
        let report = ext1_dim(&s, &v).expect("valid");
        assert_eq!(report.dim, Rat::zero());
        assert!(!report.not_a_sheaf_class);
        assert_eq!(report.to_string(), "0");
    }

    #[test]
    fn point_ideal_twists_are_isotropic_on_the_elliptic_surface() {
        let s = SurfaceDesc::elliptic_k3();
        for k in 1..=4i64 {
            let c1 = MukaiCurve::Surface(vec![Rat::one(), Rat::int(k)]);
            let chi = line_bundle_chi(&s, &[Rat::one(), Rat::int(k)]).expect("valid")
                - &Rat::one();
            assert_eq!(chi, Rat::int(k));
            let v = mukai_vector(&s, 1, c1, k).expect("valid");
            assert_eq!(v.s, k - 1);
            assert_eq!(mukai_square(&s, &v).expect("valid"), Rat::zero());
            assert_eq!(ext1_dim(&s, &v).expect("valid").dim, Rat::int(2));
        }
    }

    #[test]
    fn kummer_vector_of_the_restricted_bundle_is_isotropic() {
        let s = SurfaceDesc::abelian_star();
        let o = line_bundle(&s, vec![Rat::zero()], None);
        let restricted = kummer_restrict(&o).expect("abelian");
        assert_eq!(restricted.rank, 2);
        let v = mukai_vector(&s, 2, MukaiCurve::Kummer(restricted.c1.clone()), 0).expect("valid");
        assert_eq!(v.s, -2);
        assert_eq!(mukai_square(&s, &v).expect("valid"), Rat::zero());
        assert_eq!(ext1_dim(&s, &v).expect("valid").dim, Rat::int(2));
    }

    #[test]
    fn negative_expected_dimension_raises_the_warning() {
        let s = k3();
        let v = mukai_vector(&s, 2, MukaiCurve::Surface(vec![Rat::zero()]), 4).expect("valid");
        let report = ext1_dim(&s, &v).expect("valid");
        assert_eq!(report.dim, Rat::int(-6));
        assert!(report.not_a_sheaf_class);
        assert!(report.to_string().contains("NOT_A_SHEAF_CLASS"));
    }

    #[test]
    fn kummer_restriction_doubles_rank_and_halves_nodes() {
        let s = SurfaceDesc::abelian_star();
        let line = line_bundle(&s, vec![Rat::int(2)], None);
        let r1 = kummer_restrict(&line).expect("abelian");
        assert_eq!(r1.rank, 2);
        assert_eq!(r1.c1.alpha_part, vec![Rat::int(2)]);
        assert!(r1.c1.nodal.iter().all(|nu| *nu == Rat::new(-1, 2)));

        let f2 = SheafDesc::new(
            &s,
            2,
            vec![Rat::one()],
            None,
            None,
            SheafFlags {
                mu_stable: true,
                torsion_free: true,
                locally_free: true,
                symmetric: true,
                det_trivial: false,
            },
        )
        .expect("valid");
        let r2 = kummer_restrict(&f2).expect("abelian");
        assert_eq!(r2.rank, 4);
        assert!(r2.c1.nodal.iter().all(|nu| *nu == Rat::int(-1)));

        let on_k3 = line_bundle(&k3(), vec![Rat::one()], None);
        assert!(kummer_restrict(&on_k3).is_err());
    }

    #[test]
    fn restricted_slope_is_linear_with_constant_minus_four() {
        let s = SurfaceDesc::abelian_star();
        for r in 1..=4u32 {
            for f in -10..=10i64 {
                let desc = SheafDesc::new(
                    &s,
                    r,
                    vec![Rat::int(f)],
                    None,
                    None,
                    SheafFlags {
                        mu_stable: false,
                        torsion_free: true,
                        locally_free: true,
                        symmetric: false,
                        det_trivial: f == 0,
                    },
                )
                .expect("valid");
                let restricted = kummer_restrict(&desc).expect("abelian");
                let mu = slope(
                    &s,
                    restricted.rank,
                    &VarietyClass::Kummer(restricted.c1.clone()),
                    PolFamily::HNKm,
                )
                .expect("supported");
                let expected = NPoly::from_terms(&[
                    (1, Rat::new(2 * f, r as i64)),
                    (0, Rat::int(-4)),
                ]);
                assert_eq!(mu, expected);
            }
        }
    }

    #[test]
    fn chern_class_of_a_direct_sum_adds() {
        let s = SurfaceDesc::abelian_star();
        let f = line_bundle(&s, vec![Rat::int(2)], None);
        let g = SheafDesc::new(
            &s,
            2,
            vec![Rat::int(-1)],
            None,
            None,
            SheafFlags {
                mu_stable: false,
                torsion_free: true,
                locally_free: true,
                symmetric: false,
                det_trivial: false,
            },
        )
        .expect("valid");
        let sum = SheafDesc::new(
            &s,
            3,
            vec![Rat::one()],
            None,
            None,
            SheafFlags {
                mu_stable: false,
                torsion_free: true,
                locally_free: true,
                symmetric: false,
                det_trivial: false,
            },
        )
        .expect("valid");
        for n in [2usize, 3] {
            let lhs = tautologize(&sum, n).expect("valid");
            let t_f = tautologize(&f, n).expect("valid");
            let t_g = tautologize(&g, n).expect("valid");
            assert_eq!(lhs.rank, t_f.rank + t_g.rank);
            assert_eq!(lhs.c1, t_f.c1.plus(&t_g.c1).expect("same level"));
        }
    }

    #[test]
    fn declared_cohomology_matches_riemann_roch() {
        let s = SurfaceDesc::elliptic_k3();
        for k in 1..=5u64 {
            let desc = SheafDesc::elliptic_fibre_power(k).expect("valid");
            let coh = desc.coh().unwrap();
            let chi = coh.dim(0) as i64 - coh.dim(1) as i64 + coh.dim(2) as i64;
            assert_eq!(Rat::int(chi), line_bundle_chi(&s, desc.c1()).expect("valid"));
        }
        let ample = [Rat::one(), Rat::int(3)];
        assert_eq!(line_bundle_chi(&s, &ample).expect("valid"), Rat::int(4));
        let generic = SurfaceDesc::new(
            SurfaceKind::RegularGeneric,
            vec!["A".into()],
            vec![vec![4]],
            1,
            vec![1],
        )
        .expect("valid");
        assert!(line_bundle_chi(&generic, &[Rat::one()]).is_err());
    }

    #[test]
    fn nodal_slot_count_matches_the_kummer_configuration() {
        let s = SurfaceDesc::abelian_star();
        let o = line_bundle(&s, vec![Rat::zero()], None);
        let restricted = kummer_restrict(&o).expect("abelian");
        assert_eq!(restricted.c1.nodal.len(), NODES);
        let pairing = restricted
            .c1
            .pair(&restricted.c1, &s)
            .expect("abelian");
        assert_eq!(pairing, Rat::int(-8));
    }
}
