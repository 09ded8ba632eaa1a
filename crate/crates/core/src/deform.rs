//! Deformation bookkeeping for induced sheaves at low levels: the split
//! of first-order deformations into source directions and additional
//! ones, the quadratic Kuranishi targets behind the singular moduli
//! example, and the obstruction-trace hyperplane for the directions
//! that do not come from the surface.
//!
//! Everything here is dimension ledger work over already-declared
//! cohomology data. Nothing constructs a Kuranishi space; the one
//! genuinely geometric input (a nonvanishing pairing of sections
//! against extensions) is carried as a flagged assumption.

use std::fmt;

use thiserror::Error;

use crate::rat::Rat;
use crate::taut::SheafDesc;

// ---- Errors ----

/// Errors from the deformation ledger.
#[derive(Debug, Error)]
pub enum DeformError {
    /// The descriptor lacks the declared dimensions the ledger needs.
    #[error("MISSING_DATA: the descriptor declares no {0}")]
    MissingData(&'static str),
    /// The split formula needs a vanishing degree-two cohomology.
    #[error("H2_NONZERO: h2 = {0} must vanish for the deformation split")]
    H2Nonzero(u64),
    /// The singular example needs the section as a base component.
    #[error("K_TOO_SMALL: the base-component shape needs k >= 2, got {0}")]
    KTooSmall(u64),
    /// Structurally invalid input.
    #[error("invalid deformation input: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> DeformError {
    DeformError::Invalid(msg.into())
}

// ---- First-order split ----

/// First-order deformations of the level-two induced sheaf, split into
/// deformations of the source and the extra directions coming from
/// sections. Invariant: total = surface_dim + additional_dim.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DeformSplit {
    /// Deformations of the source sheaf itself: ext1(F, F).
    pub surface_dim: u64,
    /// Additional directions: h0(F) * h1(F).
    pub additional_dim: u64,
    /// All first-order deformations of the induced sheaf.
    pub total: u64,
}

impl fmt::Display for DeformSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} surface + {} additional = {}",
            self.surface_dim, self.additional_dim, self.total
        )
    }
}

fn declared_coh(f: &SheafDesc) -> Result<&crate::graded::GradedDims, DeformError> {
    f.coh()
        .ok_or(DeformError::MissingData("cohomology dimensions"))
}

fn declared_ext(f: &SheafDesc) -> Result<&crate::graded::GradedDims, DeformError> {
    f.ext_self()
        .ok_or(DeformError::MissingData("self-extension dimensions"))
}

/// Splits the first-order deformations of the induced sheaf at level
/// two. Needs declared cohomology and self-extension dimensions with
/// h2 = 0; the total then matches the degree-one convolution output.
pub fn deformation_split(f: &SheafDesc) -> Result<DeformSplit, DeformError> {
    let coh = declared_coh(f)?;
    let ext = declared_ext(f)?;
    let h2 = coh.dim(2);
    if h2 != 0 {
        return Err(DeformError::H2Nonzero(h2));
    }
    let surface_dim = ext.dim(1);
    let additional_dim = coh.dim(0) * coh.dim(1);
    Ok(DeformSplit {
        surface_dim,
        additional_dim,
        total: surface_dim + additional_dim,
    })
}

// ---- Quadratic Kuranishi targets ----

/// Dimensions of the two quadratic target summands of the level-two
/// Kuranishi map: (h0(F)^2, h1(F)^2). The self-extension component
/// drops out because the square of the universal extension class
/// vanishes, which needs h2 = 0.
pub fn kuranishi_quadratic_targets(f: &SheafDesc) -> Result<(u64, u64), DeformError> {
    let coh = declared_coh(f)?;
    declared_ext(f)?;
    let h2 = coh.dim(2);
    if h2 != 0 {
        return Err(DeformError::H2Nonzero(h2));
    }
    let h0 = coh.dim(0);
    let h1 = coh.dim(1);
    Ok((h0 * h0, h1 * h1))
}

// ---- The singular moduli example ----

/// The catalogued singular examples.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SingularExample {
    /// Point-ideal twist of the section-plus-k-fibres bundle; the
    /// section stays a base component for k >= 2.
    BasePointIdeal { k: u64 },
}

/// Dimension ledger of a singular moduli point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SingularityReport {
    pub k: u64,
    pub h0: u64,
    pub h1: u64,
    pub ext1: u64,
    /// Zariski tangent dimension at the induced moduli point.
    pub tangent: u64,
    /// The pairing of sections against extensions is nonzero by a
    /// geometric argument, not a computation; reports carry it as an
    /// assumption.
    pub assumes_nonvanishing_pairing: bool,
}

impl fmt::Display for SingularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k = {}: h0 = {}, h1 = {}, ext1 = {}, tangent = {}{}",
            self.k,
            self.h0,
            self.h1,
            self.ext1,
            self.tangent,
            if self.assumes_nonvanishing_pairing {
                " (assumes the section pairing does not vanish)"
            } else {
                ""
            }
        )
    }
}

/// Full dimension ledger for a singular example. The tangent dimension
/// is k + 3; the singularity itself rests on the flagged pairing
/// assumption.
pub fn singularity_report(example: SingularExample) -> Result<SingularityReport, DeformError> {
    let SingularExample::BasePointIdeal { k } = example;
    if k < 2 {
        return Err(DeformError::KTooSmall(k));
    }
    Ok(SingularityReport {
        k,
        h0: k + 1,
        h1: 1,
        ext1: 2,
        tangent: k + 3,
        assumes_nonvanishing_pairing: true,
    })
}

// ---- Obstruction traces ----

/// A deformation direction that does not come from the surface, reduced
/// to the data the trace formula reads: the pairing of the direction
/// against c1(F), the source rank, the level and the component along
/// the half-exceptional class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObstructionInput {
    kappa_dot_c1: Rat,
    r: u32,
    n: usize,
    a: Rat,
}

impl ObstructionInput {
    /// The trace formula lives on levels n >= 2 with a positive rank.
    pub fn new(kappa_dot_c1: Rat, r: u32, n: usize, a: Rat) -> Result<Self, DeformError> {
        if r == 0 {
            return Err(invalid("obstruction inputs need rank >= 1"));
        }
        if n < 2 {
            return Err(invalid("the obstruction trace lives on levels n >= 2"));
        }
        Ok(ObstructionInput {
            kappa_dot_c1,
            r,
            n,
            a,
        })
    }

    pub fn kappa_dot_c1(&self) -> &Rat {
        &self.kappa_dot_c1
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }
}

/// Trace of the obstruction class of the direction: the pairing value
/// minus 2(1-n) r a. Affine-linear in (pairing, a); its zero set is
/// the obstruction hyperplane.
pub fn obstruction_trace(input: &ObstructionInput) -> Rat {
    let shift =
        Rat::int(2 * (1 - input.n as i64)) * &Rat::int(i64::from(input.r)) * &input.a;
    &input.kappa_dot_c1 - &shift
}

/// One-directional deformation answer. A nonzero trace obstructs; a
/// vanishing trace leaves the question open, so there is no YES.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeformAnswer {
    No,
    Undecided,
}

impl fmt::Display for DeformAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeformAnswer::No => "NO",
            DeformAnswer::Undecided => "UNDECIDED",
        })
    }
}

/// Whether the induced sheaf deforms along the direction: NO when the
/// trace obstructs, UNDECIDED on the hyperplane.
pub fn deforms_along(input: &ObstructionInput) -> DeformAnswer {
    if obstruction_trace(input).is_zero() {
        DeformAnswer::Undecided
    } else {
        DeformAnswer::No
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedDims;
    use crate::taut::{serre_flip, taut_ext_dims};

    fn fibre(k: u64) -> SheafDesc {
        SheafDesc::elliptic_fibre_power(k).expect("valid preset")
    }

    fn ideal(k: u64) -> SheafDesc {
        SheafDesc::base_point_ideal_twist(k).expect("valid preset")
    }

    fn obstruction(kappa: i64, r: u32, n: usize, a: i64) -> ObstructionInput {
        ObstructionInput::new(Rat::int(kappa), r, n, Rat::int(a)).expect("valid input")
    }

    #[test]
    fn split_reproduces_the_fibre_power_table() {
        let split = deformation_split(&fibre(4)).unwrap();
        assert_eq!(split.surface_dim, 0);
        assert_eq!(split.additional_dim, 15);
        assert_eq!(split.total, 15);
        for k in 1..=5 {
            let split = deformation_split(&fibre(k)).unwrap();
            assert_eq!(split.total, k * k - 1);
            assert_eq!(split.total, split.surface_dim + split.additional_dim);
        }
    }

    #[test]
    fn split_of_the_point_ideal_twist() {
        let split = deformation_split(&ideal(2)).unwrap();
        assert_eq!(split.surface_dim, 2);
        assert_eq!(split.additional_dim, 3);
        assert_eq!(split.total, 5);
        assert_eq!(deformation_split(&ideal(5)).unwrap().total, 8);
        assert_eq!(split.to_string(), "2 surface + 3 additional = 5");
    }

    #[test]
    fn split_with_no_middle_cohomology_is_purely_surface() {
        // k = 1 has h1 = 0, so the induced moduli agree with the
        // source moduli at first order.
        let split = deformation_split(&fibre(1)).unwrap();
        assert_eq!(split.additional_dim, 0);
        assert_eq!(split.total, split.surface_dim);
    }

    #[test]
    fn split_requires_data_and_vanishing_h2() {
        let surface = crate::lattice::SurfaceDesc::elliptic_k3();
        let bare = SheafDesc::new(
            &surface,
            1,
            vec![Rat::zero(), Rat::one()],
            None,
            None,
            crate::taut::SheafFlags {
                mu_stable: false,
                torsion_free: true,
                locally_free: false,
                symmetric: false,
                det_trivial: false,
            },
        )
        .unwrap();
        assert!(matches!(
            deformation_split(&bare),
            Err(DeformError::MissingData(_))
        ));
        let ox = SheafDesc::structure_sheaf(&surface).unwrap();
        assert!(matches!(
            deformation_split(&ox),
            Err(DeformError::H2Nonzero(1))
        ));
        assert!(matches!(
            kuranishi_quadratic_targets(&ox),
            Err(DeformError::H2Nonzero(1))
        ));
    }

    #[test]
    fn split_matches_the_convolution_route() {
        let o = GradedDims::new(&[1, 0, 1]);
        for k in 1..=5 {
            for f in [fibre(k), ideal(k.max(2))] {
                let split = deformation_split(&f).unwrap();
                let coh = f.coh().unwrap();
                let ext = taut_ext_dims(f.ext_self().unwrap(), &o, &serre_flip(coh), coh, 2);
                assert_eq!(split.total, ext.dim(1));
            }
        }
    }

    #[test]
    fn kuranishi_targets_square_the_cohomology() {
        assert_eq!(kuranishi_quadratic_targets(&fibre(2)).unwrap(), (9, 1));
        assert_eq!(kuranishi_quadratic_targets(&ideal(2)).unwrap(), (9, 1));
        // h1 = 0 kills the extension-dependent summand outright.
        assert_eq!(kuranishi_quadratic_targets(&fibre(1)).unwrap(), (4, 0));
    }

    #[test]
    fn kuranishi_targets_complete_the_degree_two_count() {
        let o = GradedDims::new(&[1, 0, 1]);
        for k in 1..=5 {
            for f in [fibre(k), ideal(k.max(2))] {
                let (q0, q1) = kuranishi_quadratic_targets(&f).unwrap();
                let coh = f.coh().unwrap();
                let ext = taut_ext_dims(f.ext_self().unwrap(), &o, &serre_flip(coh), coh, 2);
                // The two squares plus the paired outer summands of the
                // self-extension convolution.
                assert_eq!(1 + q0 + q1 + 1, ext.dim(2));
            }
        }
    }

    #[test]
    fn singular_ledger_matches_the_split() {
        let report =
            singularity_report(SingularExample::BasePointIdeal { k: 2 }).unwrap();
        assert_eq!(report.h0, 3);
        assert_eq!(report.h1, 1);
        assert_eq!(report.ext1, 2);
        assert_eq!(report.tangent, 5);
        assert!(report.assumes_nonvanishing_pairing);
        assert_eq!(
            singularity_report(SingularExample::BasePointIdeal { k: 5 })
                .unwrap()
                .tangent,
            8
        );
        assert!(matches!(
            singularity_report(SingularExample::BasePointIdeal { k: 1 }),
            Err(DeformError::KTooSmall(1))
        ));
        for k in 2..=6 {
            let report =
                singularity_report(SingularExample::BasePointIdeal { k }).unwrap();
            let split = deformation_split(&ideal(k)).unwrap();
            assert_eq!(report.tangent, split.total);
            assert_eq!(report.h0, ideal(k).coh().unwrap().dim(0));
        }
    }

    #[test]
    fn trace_evaluates_the_frozen_examples() {
        assert_eq!(obstruction_trace(&obstruction(0, 3, 4, 0)), Rat::zero());
        assert_eq!(obstruction_trace(&obstruction(-2, 1, 2, 1)), Rat::zero());
        assert_eq!(obstruction_trace(&obstruction(0, 2, 3, 1)), Rat::int(8));
        assert_eq!(deforms_along(&obstruction(0, 2, 3, 1)), DeformAnswer::No);
        assert_eq!(
            deforms_along(&obstruction(-2, 1, 2, 1)),
            DeformAnswer::Undecided
        );
        assert_eq!(DeformAnswer::No.to_string(), "NO");
        assert_eq!(DeformAnswer::Undecided.to_string(), "UNDECIDED");
    }

    #[test]
    fn trace_is_affine_on_direction_data() {
        let at = |kappa: Rat, a: Rat| {
            obstruction_trace(&ObstructionInput::new(kappa, 2, 3, a).unwrap())
        };
        let p0 = (Rat::int(-3), Rat::int(2));
        let p1 = (Rat::new(7, 2), Rat::int(-1));
        let mid = (
            &(&p0.0 + &p1.0) * &Rat::new(1, 2),
            &(&p0.1 + &p1.1) * &Rat::new(1, 2),
        );
        let lhs = at(mid.0, mid.1);
        let rhs = &(&at(p0.0, p0.1) + &at(p1.0, p1.1)) * &Rat::new(1, 2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn answer_is_never_yes_and_tracks_the_hyperplane() {
        for kappa in -6..=6 {
            for a in -2..=2 {
                for r in 1..=2u32 {
                    for n in 2..=4 {
                        let input = obstruction(kappa, r, n, a);
                        let on_plane =
                            kappa == 2 * (1 - n as i64) * i64::from(r) * a;
                        let expected = if on_plane {
                            DeformAnswer::Undecided
                        } else {
                            DeformAnswer::No
                        };
                        assert_eq!(deforms_along(&input), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn obstruction_inputs_reject_degenerate_shapes() {
        assert!(ObstructionInput::new(Rat::zero(), 0, 2, Rat::zero()).is_err());
        assert!(ObstructionInput::new(Rat::zero(), 1, 1, Rat::zero()).is_err());
    }
}
