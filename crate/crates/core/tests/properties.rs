//! Randomised invariants: algebraic laws the exact kernels must satisfy
//! on every input, not just on the frozen tables. Each property either
//! pits an engine against a brute-force oracle or checks a structural
//! law (linearity, homomorphism, soundness of validity floors).

use proptest::prelude::*;

use hilbtaut_core::deform::{deforms_along, obstruction_trace, DeformAnswer, ObstructionInput};
use hilbtaut_core::even::{EvenRing, Normalization};
use hilbtaut_core::graded::{super_sym_power, GradedDims};
use hilbtaut_core::lattice::{
    degree_against_polarization, HilbClass, PolFamily, SurfaceDesc, VarietyClass, NODES,
};
use hilbtaut_core::npoly::{LeadingOrder, NPoly};
use hilbtaut_core::rat::Rat;
use hilbtaut_core::stability::{
    destab_condition, slope_implies_condition, CandidateLine, Setting,
};
use hilbtaut_core::taut::{SheafDesc, SheafFlags};
use hilbtaut_core::torus::{Map, RingElement, TorusRing};

// ---- Strategies and helpers ----

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rat::new(n, d))
}

fn q(n: i64) -> Rat {
    Rat::int(n)
}

/// Builds a ring element from `(generator mask, integer coefficient)`
/// pairs, wedging generators in increasing index order.
fn element(ring: &TorusRing, terms: &[(u32, i64)]) -> RingElement {
    let mut acc = ring.zero();
    for &(mask, c) in terms {
        let gens: Vec<RingElement> = (0..ring.generator_count())
            .filter(|i| mask & (1u32 << i) != 0)
            .map(|i| ring.generator(i))
            .collect();
        let refs: Vec<&RingElement> = gens.iter().collect();
        acc = &acc + &ring.wedge_all(&refs).scale(&q(c));
    }
    acc
}

fn stable_sheaf(surface: &SurfaceDesc, r: u32, c: i64, symmetric: bool) -> SheafDesc {
    let mut c1 = vec![Rat::zero(); surface.rank()];
    c1[0] = q(c);
    let flags = SheafFlags {
        mu_stable: true,
        torsion_free: true,
        locally_free: true,
        symmetric,
        det_trivial: false,
    };
    SheafDesc::new(surface, r, c1, None, None, flags).expect("valid descriptor")
}

fn ab_lead(n: usize, h: i64, m: i64, a: i64, pol: PolFamily) -> Rat {
    let surface = SurfaceDesc::abelian_star();
    let class = HilbClass::new(&surface, n, vec![q(h)], Some(q(m)), q(a)).expect("valid class");
    degree_against_polarization(&surface, &VarietyClass::Hilb(class), pol)
        .expect("degree")
        .coeff(2 * n as i64 - 1)
        .expect("known leading coefficient")
}

/// Brute-force graded dimensions of the k-th symmetric power with odd
/// generators squaring to zero: multisets of basis vectors, capped at
/// one per odd generator, counted by total degree.
fn enumerate_sym(dims: &[u64], k: u64) -> Vec<u64> {
    let mut basis: Vec<(usize, u64)> = Vec::new();
    for (d, &m) in dims.iter().enumerate() {
        for _ in 0..m {
            basis.push((d, if d % 2 == 1 { 1 } else { k }));
        }
    }
    let top = dims.len().saturating_sub(1) * k as usize;
    let mut counts = vec![0u64; top + 1];
    fn rec(basis: &[(usize, u64)], i: usize, left: u64, deg: usize, counts: &mut [u64]) {
        if left == 0 {
            counts[deg] += 1;
            return;
        }
        if i == basis.len() {
            return;
        }
        let (d, cap) = basis[i];
        for take in 0..=cap.min(left) {
            rec(basis, i + 1, left - take, deg + d * take as usize, counts);
        }
    }
    rec(&basis, 0, k, 0, &mut counts);
    counts
}

// ---- Exact scalars ----

proptest! {
    #[test]
    fn rational_arithmetic_satisfies_the_field_laws(
        a in arb_rat(),
        b in arb_rat(),
        c in arb_rat(),
    ) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rat::zero());
        prop_assert_eq!(&a + &Rat::zero(), a.clone());
        prop_assert_eq!(&a * &Rat::one(), a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&b * &b.recip(), Rat::one());
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }
}

// ---- Validity floors ----

/// Splits raw terms into the part above the floor and a low completion,
/// then builds the floored polynomial that forgets the completion.
fn floored_parts(
    floor: i64,
    high: &[(i64, i64)],
    low: &[(i64, i64)],
) -> (NPoly, Vec<(i64, Rat)>) {
    let mut terms: Vec<(i64, Rat)> = high
        .iter()
        .map(|&(d, c)| (floor + d, q(c)))
        .collect();
    let known = terms.clone();
    terms.extend(low.iter().map(|&(d, c)| (d.min(floor - 1).max(0), q(c))));
    (NPoly::from_terms(&terms).with_floor(floor), known)
}

proptest! {
    /// A verdict of Less or Greater from a floored comparison must keep
    /// holding for every completion of the forgotten coefficients: the
    /// decision may only use coefficients above the floor.
    #[test]
    fn floored_verdicts_survive_any_completion(
        floor in 1i64..=4,
        high in prop::collection::vec((0i64..=4, -9i64..=9), 0..=4),
        low in prop::collection::vec((0i64..=3, -9i64..=9), 0..=3),
        other_low in prop::collection::vec((0i64..=3, -9i64..=9), 0..=3),
        b_terms in prop::collection::vec((0i64..=7, -9i64..=9), 0..=4),
    ) {
        let (floored, known) = floored_parts(floor, &high, &low);
        let b: NPoly = NPoly::from_terms(
            &b_terms.iter().map(|&(d, c)| (d, q(c))).collect::<Vec<_>>(),
        );
        let verdict = floored.compare_leading(&b);
        let mut completed = known;
        completed.extend(
            other_low
                .iter()
                .map(|&(d, c)| (d.min(floor - 1).max(0), q(c))),
        );
        let exact = NPoly::from_terms(&completed);
        match verdict {
            LeadingOrder::Less => {
                prop_assert_eq!(exact.compare_leading(&b), LeadingOrder::Less);
            }
            LeadingOrder::Greater => {
                prop_assert_eq!(exact.compare_leading(&b), LeadingOrder::Greater);
            }
            LeadingOrder::EqualAtKnownOrder | LeadingOrder::Indeterminate => {}
        }
    }

    /// An Indeterminate verdict against an exact polynomial is honest:
    /// two completions of the floored side order both ways.
    #[test]
    fn indeterminate_verdicts_admit_completions_both_ways(
        floor in 1i64..=4,
        high in prop::collection::vec((0i64..=4, -9i64..=9), 0..=4),
        low in prop::collection::vec((0i64..=3, -9i64..=9), 0..=3),
        b_terms in prop::collection::vec((0i64..=7, -9i64..=9), 0..=4),
    ) {
        let (floored, known) = floored_parts(floor, &high, &low);
        let b: NPoly = NPoly::from_terms(
            &b_terms.iter().map(|&(d, c)| (d, q(c))).collect::<Vec<_>>(),
        );
        if floored.compare_leading(&b) != LeadingOrder::Indeterminate {
            return Ok(());
        }
        // The walk tied at every known degree, so a completion placed at
        // the top forgotten degree decides the exact comparison alone.
        let pivot = floor - 1;
        let at_pivot = b.coeff(pivot).expect("exact polynomial");
        let mut above = known.clone();
        above.push((pivot, &at_pivot + &Rat::one()));
        let mut below = known;
        below.push((pivot, &at_pivot - &Rat::one()));
        prop_assert_eq!(
            NPoly::from_terms(&above).compare_leading(&b),
            LeadingOrder::Greater
        );
        prop_assert_eq!(
            NPoly::from_terms(&below).compare_leading(&b),
            LeadingOrder::Less
        );
    }

    /// Exact polynomials always compare decisively.
    #[test]
    fn exact_comparisons_are_never_indeterminate(
        a_terms in prop::collection::vec((0i64..=7, -9i64..=9), 0..=5),
        b_terms in prop::collection::vec((0i64..=7, -9i64..=9), 0..=5),
    ) {
        let a = NPoly::from_terms(
            &a_terms.iter().map(|&(d, c)| (d, q(c))).collect::<Vec<_>>(),
        );
        let b = NPoly::from_terms(
            &b_terms.iter().map(|&(d, c)| (d, q(c))).collect::<Vec<_>>(),
        );
        let verdict = a.compare_leading(&b);
        prop_assert_ne!(verdict, LeadingOrder::Indeterminate);
        if a == b {
            prop_assert_eq!(verdict, LeadingOrder::EqualAtKnownOrder);
        }
    }
}

// ---- Graded dimension counts ----

proptest! {
    /// The closed-form symmetric power with sign rules agrees with
    /// brute-force multiset enumeration in every degree.
    #[test]
    fn symmetric_powers_match_multiset_enumeration(
        dims in prop::collection::vec(0u64..=2, 1..=3),
        k in 0u64..=3,
    ) {
        let engine = super_sym_power(&GradedDims::new(&dims), k);
        let brute = enumerate_sym(&dims, k);
        let top = brute.len().max(engine.dims().len());
        for d in 0..top {
            prop_assert_eq!(
                engine.dim(d),
                brute.get(d).copied().unwrap_or(0),
                "degree {} of power {} of {:?}",
                d, k, dims
            );
        }
        let zeroth = super_sym_power(&GradedDims::new(&dims), 0);
        prop_assert_eq!(zeroth.total(), 1);
        prop_assert_eq!(zeroth.dim(0), 1);
    }
}

// ---- Torus oracle ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]
    /// Pullback along each implemented map is a ring homomorphism:
    /// additive, multiplicative and unital on random classes.
    #[test]
    fn pullbacks_are_ring_homomorphisms(
        x_terms in prop::collection::vec((0u32..4096, -5i64..=5), 0..=3),
        y_terms in prop::collection::vec((0u32..4096, -5i64..=5), 0..=3),
    ) {
        let cases: [(usize, usize, Map); 7] = [
            (2, 1, Map::Sum2),
            (3, 1, Map::Sum3),
            (1, 1, Map::Iota),
            (2, 1, Map::Proj { i: 1 }),
            (2, 2, Map::IotaFactor { i: 0, factors: 2 }),
            (2, 3, Map::DiagEmbed { j: 0, k: 2, factors: 3 }),
            (3, 2, Map::PairProj { j: 2, k: 0 }),
        ];
        for (domain_factors, codomain_factors, map) in cases {
            let domain = TorusRing::new(domain_factors);
            let codomain = TorusRing::new(codomain_factors);
            let cut = (1u32 << (4 * codomain_factors)) - 1;
            let restrict = |terms: &[(u32, i64)]| -> Vec<(u32, i64)> {
                terms.iter().map(|&(m, c)| (m & cut, c)).collect()
            };
            let x = element(&codomain, &restrict(&x_terms));
            let y = element(&codomain, &restrict(&y_terms));
            let px = domain.pullback(map, &x);
            let py = domain.pullback(map, &y);
            prop_assert_eq!(
                domain.pullback(map, &codomain.wedge(&x, &y)),
                domain.wedge(&px, &py),
                "products under {:?}", map
            );
            prop_assert_eq!(
                domain.pullback(map, &(&x + &y)),
                &px + &py,
                "sums under {:?}", map
            );
            prop_assert_eq!(
                domain.pullback(map, &codomain.one()),
                domain.one(),
                "unit under {:?}", map
            );
            prop_assert_eq!(
                domain.pullback(map, &x.scale(&q(-7))),
                px.scale(&q(-7)),
                "scalars under {:?}", map
            );
        }
    }
}

// ---- Lattice degrees ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]
    /// The leading degree coefficient is linear in the class data on
    /// the rank-one abelian surface, against both polarisation families.
    #[test]
    fn leading_degrees_are_linear_in_the_class(
        n in 2usize..=3,
        h1 in -4i64..=4, m1 in -4i64..=4, a1 in -4i64..=4,
        h2 in -4i64..=4, m2 in -4i64..=4, a2 in -4i64..=4,
        scale in -3i64..=3,
    ) {
        for pol in [PolFamily::HNm, PolFamily::HN] {
            let joint = ab_lead(n, h1 + h2, m1 + m2, a1 + a2, pol);
            let split = &ab_lead(n, h1, m1, a1, pol) + &ab_lead(n, h2, m2, a2, pol);
            prop_assert_eq!(joint, split, "additivity against {:?}", pol);
            let scaled = ab_lead(n, scale * h1, scale * m1, scale * a1, pol);
            prop_assert_eq!(
                scaled,
                &q(scale) * &ab_lead(n, h1, m1, a1, pol),
                "homogeneity against {:?}", pol
            );
        }
    }

    /// On the elliptic lattice at two points the engine's leading
    /// coefficient reproduces the symmetrised product oracle and the
    /// double-factorial closed form.
    #[test]
    fn leading_degrees_match_the_product_oracle(
        x in -4i64..=4,
        y in -4i64..=4,
    ) {
        let surface = SurfaceDesc::elliptic_k3();
        let l = vec![q(x), q(y)];
        let class = HilbClass::new(&surface, 2, l.clone(), None, Rat::zero()).expect("class");
        let engine = degree_against_polarization(
            &surface,
            &VarietyClass::Hilb(class),
            PolFamily::HN,
        )
        .expect("degree")
        .coeff(3)
        .expect("known leading coefficient");
        let gram = vec![vec![q(-2), q(1)], vec![q(1), q(0)]];
        let ring = EvenRing::new(2, gram);
        let h = ring.box_class(&[q(1), q(3)]).expect("box class");
        let classes = vec![
            ring.box_class(&l).expect("box class"),
            h.clone(),
            h.clone(),
            h,
        ];
        let raw = ring
            .even_intersection(&classes, Normalization::Raw)
            .expect("top intersection");
        let oracle = &raw / &q(2);
        prop_assert_eq!(engine.clone(), oracle, "engine vs oracle at l = ({}, {})", x, y);
        prop_assert_eq!(engine, &q(3 * (x + y)) * &q(4), "closed form at l = ({}, {})", x, y);
    }
}

// ---- Stability conditions ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    /// The slope-table derivation and the direct integer condition
    /// agree on Hilbert schemes of a regular surface.
    #[test]
    fn slope_derivation_matches_condition_on_hilbert_schemes(
        n in 2usize..=3,
        lh in -6i64..=6,
        a in -4i64..=4,
        r in 1u32..=3,
        c in -3i64..=3,
    ) {
        let surface = SurfaceDesc::k3_rank_one(2).expect("surface");
        let f = stable_sheaf(&surface, r, c, false);
        let setting = Setting::regular_hilb(n).expect("setting");
        let cand = CandidateLine::RegularHilb { lh, a };
        let direct = destab_condition(setting, &cand, &f).expect("condition");
        let derived =
            slope_implies_condition(setting, &cand, &f, setting.polarisation())
                .expect("derivation");
        prop_assert_eq!(direct, derived.holds, "candidate {}", cand);
    }

    /// The same agreement on products of the abelian surface at two
    /// and three points.
    #[test]
    fn slope_derivation_matches_condition_on_abelian_products(
        a1 in -4i64..=4,
        a2 in -4i64..=4,
        b in -4i64..=4,
        c in -4i64..=4,
        r in 1u32..=3,
        d in -3i64..=3,
    ) {
        let surface = SurfaceDesc::abelian_star();
        let f = stable_sheaf(&surface, r, d, false);
        for (setting, cand) in [
            (Setting::AbelianHilb2, CandidateLine::AbelianHilb2 { a1, a2, b, c }),
            (Setting::AbelianHilb3, CandidateLine::AbelianHilb3 { a: a1, b }),
        ] {
            let direct = destab_condition(setting, &cand, &f).expect("condition");
            let derived =
                slope_implies_condition(setting, &cand, &f, setting.polarisation())
                    .expect("derivation");
            prop_assert_eq!(direct, derived.holds, "candidate {} in {:?}", cand, setting);
        }
    }

    /// The same agreement on both quotient targets. Exceptional
    /// multiplicities descend only with uniform parity, so the
    /// candidates are built that way.
    #[test]
    fn slope_derivation_matches_condition_on_quotients(
        gh in -5i64..=5,
        parity in 0i64..=1,
        halves in prop::collection::vec(-2i64..=2, NODES),
        l in -6i64..=6,
        r in 1u32..=3,
        d in -3i64..=3,
    ) {
        let surface = SurfaceDesc::abelian_star();
        let f = stable_sheaf(&surface, r, d, false);
        let nodal: Vec<i64> = halves.iter().map(|t| 2 * t + parity).collect();
        let kummer = CandidateLine::kummer(gh, nodal).expect("uniform parity");
        for (setting, cand) in [
            (Setting::Kummer, kummer),
            (Setting::GenKummer4, CandidateLine::GenKummer4 { l }),
        ] {
            let direct = destab_condition(setting, &cand, &f).expect("condition");
            let derived =
                slope_implies_condition(setting, &cand, &f, setting.polarisation())
                    .expect("derivation");
            prop_assert_eq!(direct, derived.holds, "candidate {} in {:?}", cand, setting);
        }
    }
}

// ---- Obstruction traces ----

proptest! {
    /// The obstruction trace is linear in the pairing and twist data,
    /// its zero set is the hyperplane spanned by two probes, and the
    /// deformation answer flips exactly there.
    #[test]
    fn obstruction_traces_are_linear_with_hyperplane_zero_set(
        kappa1 in arb_rat(), a1 in arb_rat(),
        kappa2 in arb_rat(), a2 in arb_rat(),
        scale in arb_rat(),
        r in 1u32..=5,
        n in 2usize..=5,
    ) {
        let trace = |kappa: &Rat, a: &Rat| -> Rat {
            let input = ObstructionInput::new(kappa.clone(), r, n, a.clone())
                .expect("valid input");
            obstruction_trace(&input)
        };
        let joint = trace(&(&kappa1 + &kappa2), &(&a1 + &a2));
        prop_assert_eq!(joint, &trace(&kappa1, &a1) + &trace(&kappa2, &a2));
        prop_assert_eq!(
            trace(&(&scale * &kappa1), &(&scale * &a1)),
            &scale * &trace(&kappa1, &a1)
        );
        // Probe coefficients: trace(k, a) = k p + a q with p = 1.
        let p = trace(&Rat::one(), &Rat::zero());
        let from_probes = &(&kappa1 * &p) + &(&a1 * &trace(&Rat::zero(), &Rat::one()));
        prop_assert_eq!(p, Rat::one());
        prop_assert_eq!(trace(&kappa1, &a1), from_probes);
        // The zero set is the graph kappa = -q a, and only there does
        // the answer stay undecided.
        let on_plane = &(-&trace(&Rat::zero(), &Rat::one())) * &a1;
        let zero_input = ObstructionInput::new(on_plane, r, n, a1.clone())
            .expect("valid input");
        prop_assert!(obstruction_trace(&zero_input).is_zero());
        prop_assert_eq!(deforms_along(&zero_input), DeformAnswer::Undecided);
        let input = ObstructionInput::new(kappa1.clone(), r, n, a1.clone())
            .expect("valid input");
        let expected = if obstruction_trace(&input).is_zero() {
            DeformAnswer::Undecided
        } else {
            DeformAnswer::No
        };
        prop_assert_eq!(deforms_along(&input), expected);
    }
}
