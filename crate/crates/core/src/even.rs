//! Intersection oracle for powers of a regular surface (h^1 = 0).
//!
//! Only even classes pulled back from the factors occur, so a class is a
//! per-factor vector of Neron-Severi coordinates and intersection numbers
//! reduce to a multinomial expansion: every factor must absorb exactly two
//! degree-2 classes, paired through the Gram matrix, and any distribution
//! overloading a factor contributes nothing.

use crate::rat::Rat;
use crate::torus::OracleError;

/// Whether to divide an intersection number on X^n by n!.
///
/// Raw numbers are integrals over the ordered product; the quotient mode
/// accounts for the symmetric group when comparing against classes that
/// live downstairs on the symmetric power.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Normalization {
    Raw,
    SymmetricQuotient,
}

/// The even cohomology of X^n for a regular surface X with a fixed
/// Neron-Severi basis and Gram matrix, shared by all factors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvenRing {
    factors: usize,
    rank: usize,
    gram: Vec<Vec<Rat>>,
}

/// A sum of degree-2 pullbacks, one Neron-Severi vector per factor.
/// The box-sum l ⊞ ... ⊞ l has the same vector on every factor; a plain
/// pullback from factor i is zero on all other factors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoxClass {
    per_factor: Vec<Vec<Rat>>,
}

impl EvenRing {
    /// Builds the ring; the Gram matrix must be square and symmetric.
    pub fn new(factors: usize, gram: Vec<Vec<Rat>>) -> Self {
        assert!(factors >= 1, "ring needs at least one factor");
        let rank = gram.len();
        assert!(rank >= 1, "lattice needs positive rank");
        for row in &gram {
            assert_eq!(row.len(), rank, "gram matrix must be square");
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, x) in row.iter().enumerate().take(i) {
                assert_eq!(x, &gram[j][i], "gram matrix must be symmetric");
            }
        }
        EvenRing {
            factors,
            rank,
            gram,
        }
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Lattice pairing v . w through the Gram matrix.
    pub fn pair(&self, v: &[Rat], w: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                acc += &(vi * &self.gram[i][j] * wj);
            }
        }
        acc
    }

    fn check_vector(&self, v: &[Rat]) -> Result<(), OracleError> {
        if v.len() != self.rank {
            return Err(OracleError::RankMismatch {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// The box-sum class carrying `v` on every factor.
    pub fn box_class(&self, v: &[Rat]) -> Result<BoxClass, OracleError> {
        self.check_vector(v)?;
        Ok(BoxClass {
            per_factor: vec![v.to_vec(); self.factors],
        })
    }

    /// The pullback of `v` from factor `i` alone.
    pub fn factor_class(&self, i: usize, v: &[Rat]) -> Result<BoxClass, OracleError> {
        if i >= self.factors {
            return Err(OracleError::FactorIndex {
                index: i,
                factors: self.factors,
            });
        }
        self.check_vector(v)?;
        let mut per_factor = vec![vec![Rat::zero(); self.rank]; self.factors];
        per_factor[i] = v.to_vec();
        Ok(BoxClass { per_factor })
    }

    /// A class with an explicit vector on each factor.
    pub fn class_from_parts(&self, parts: &[Vec<Rat>]) -> Result<BoxClass, OracleError> {
        if parts.len() != self.factors {
            return Err(OracleError::FactorIndex {
                index: parts.len(),
                factors: self.factors,
            });
        }
        for p in parts {
            self.check_vector(p)?;
        }
        Ok(BoxClass {
            per_factor: parts.to_vec(),
        })
    }

    /// Integral over X^n of a wedge of degree-2 classes.
    ///
    /// Requires 2 * classes.len() = 4n, the top degree; otherwise the
    /// integrand cannot be top-dimensional and the call is rejected.
    pub fn even_intersection(
        &self,
        classes: &[BoxClass],
        norm: Normalization,
    ) -> Result<Rat, OracleError> {
        if 2 * classes.len() != 4 * self.factors {
            return Err(OracleError::DegreeMismatch);
        }
        for c in classes {
            if c.per_factor.len() != self.factors {
                return Err(OracleError::FactorIndex {
                    index: c.per_factor.len(),
                    factors: self.factors,
                });
            }
            for p in &c.per_factor {
                self.check_vector(p)?;
            }
        }
        // Gram pairings and vanishing flags per class pair and factor,
        // computed once; the recursion only looks them up.
        let n = classes.len();
        let mut nonzero = vec![vec![false; self.factors]; n];
        for (i, c) in classes.iter().enumerate() {
            for (flag, part) in nonzero[i].iter_mut().zip(&c.per_factor) {
                *flag = !part.iter().all(Rat::is_zero);
            }
        }
        let mut pairs = vec![vec![vec![Rat::zero(); self.factors]; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                for f in 0..self.factors {
                    if nonzero[i][f] && nonzero[j][f] {
                        let p = self.pair(&classes[i].per_factor[f], &classes[j].per_factor[f]);
                        pairs[i][j][f] = p.clone();
                        pairs[j][i][f] = p;
                    }
                }
            }
        }
        let tables = Tables { nonzero, pairs };
        let mut counts = vec![0u8; self.factors];
        let mut pending: Vec<Option<usize>> = vec![None; self.factors];
        let total = self.expand(&tables, n, 0, &mut counts, &mut pending, &Rat::one());
        Ok(match norm {
            Normalization::Raw => total,
            Normalization::SymmetricQuotient => total / factorial(self.factors),
        })
    }

    /// Distributes classes over factors; each factor holds at most two, and
    /// a completed pair multiplies in its Gram pairing.
    #[allow(clippy::too_many_arguments)]
    fn expand(
        &self,
        tables: &Tables,
        total_classes: usize,
        idx: usize,
        counts: &mut [u8],
        pending: &mut [Option<usize>],
        acc: &Rat,
    ) -> Rat {
        if idx == total_classes {
            return acc.clone();
        }
        let mut total = Rat::zero();
        for f in 0..self.factors {
            if counts[f] == 2 {
                continue;
            }
            if !tables.nonzero[idx][f] {
                continue;
            }
            match pending[f] {
                None => {
                    counts[f] = 1;
                    pending[f] = Some(idx);
                    total += &self.expand(tables, total_classes, idx + 1, counts, pending, acc);
                    pending[f] = None;
                    counts[f] = 0;
                }
                Some(w) => {
                    let p = &tables.pairs[w][idx][f];
                    if !p.is_zero() {
                        counts[f] = 2;
                        let next = acc * p;
                        total +=
                            &self.expand(tables, total_classes, idx + 1, counts, pending, &next);
                        counts[f] = 1;
                    }
                }
            }
        }
        total
    }
}

/// Precomputed pairing data for one intersection run.
struct Tables {
    /// Whether class i is nonzero on factor f.
    nonzero: Vec<Vec<bool>>,
    /// Gram pairing of classes i and j on factor f.
    pairs: Vec<Vec<Vec<Rat>>>,
}

fn factorial(n: usize) -> Rat {
    let mut acc = Rat::one();
    for k in 2..=n {
        acc *= &Rat::int(k as i64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_one_h2_is_2() -> EvenRing {
        EvenRing::new(2, vec![vec![Rat::int(2)]])
    }

    #[test]
    fn all_h_classes_on_the_square() {
        // (H boxplus H)^4 distributes 4 classes into 2+2 per factor in
        // C(4,2) = 6 ways, each contributing (H^2)^2 = 4.
        let ring = rank_one_h2_is_2();
        let h = ring.box_class(&[Rat::one()]).unwrap();
        let classes = vec![h.clone(), h.clone(), h.clone(), h];
        let raw = ring
            .even_intersection(&classes, Normalization::Raw)
            .unwrap();
        assert_eq!(raw, Rat::int(24));
        let sym = ring
            .even_intersection(&classes, Normalization::SymmetricQuotient)
            .unwrap();
        assert_eq!(sym, Rat::int(12));
    }

    #[test]
    fn all_h_classes_on_the_cube() {
        // 6 classes into 3 ordered pairs: 6!/2^3 = 90 distributions, each
        // (H^2)^3 = 8.
        let ring = EvenRing::new(3, vec![vec![Rat::int(2)]]);
        let h = ring.box_class(&[Rat::one()]).unwrap();
        let classes = vec![h; 6];
        let raw = ring
            .even_intersection(&classes, Normalization::Raw)
            .unwrap();
        assert_eq!(raw, Rat::int(720));
        let sym = ring
            .even_intersection(&classes, Normalization::SymmetricQuotient)
            .unwrap();
        assert_eq!(sym, Rat::int(120));
    }

    #[test]
    fn factor_pullbacks_respect_capacity() {
        let ring = rank_one_h2_is_2();
        let p1 = ring.factor_class(0, &[Rat::one()]).unwrap();
        let p2 = ring.factor_class(1, &[Rat::one()]).unwrap();
        // Three classes forced onto factor 1 overload it.
        let overloaded = vec![p1.clone(), p1.clone(), p1.clone(), p2.clone()];
        assert_eq!(
            ring.even_intersection(&overloaded, Normalization::Raw)
                .unwrap(),
            Rat::zero()
        );
        // Two on each factor give (H^2)^2.
        let balanced = vec![p1.clone(), p1, p2.clone(), p2];
        assert_eq!(
            ring.even_intersection(&balanced, Normalization::Raw)
                .unwrap(),
            Rat::int(4)
        );
    }

    #[test]
    fn linearity_in_each_argument() {
        let gram = vec![
            vec![Rat::int(-2), Rat::one()],
            vec![Rat::one(), Rat::zero()],
        ];
        let ring = EvenRing::new(2, gram);
        let c = ring.box_class(&[Rat::one(), Rat::zero()]).unwrap();
        let f = ring.box_class(&[Rat::zero(), Rat::one()]).unwrap();
        let sum = ring.box_class(&[Rat::one(), Rat::one()]).unwrap();
        let rest = [c.clone(), f.clone(), sum.clone()];
        let with = |first: BoxClass| {
            let mut cs = vec![first];
            cs.extend(rest.iter().cloned());
            ring.even_intersection(&cs, Normalization::Raw).unwrap()
        };
        assert_eq!(with(sum.clone()), with(c.clone()) + with(f.clone()));
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let ring = rank_one_h2_is_2();
        let h = ring.box_class(&[Rat::one()]).unwrap();
        let short = vec![h.clone(), h.clone(), h];
        assert_eq!(
            ring.even_intersection(&short, Normalization::Raw),
            Err(OracleError::DegreeMismatch)
        );
    }

    #[test]
    fn coordinate_rank_is_checked() {
        let ring = rank_one_h2_is_2();
        assert!(matches!(
            ring.box_class(&[Rat::one(), Rat::one()]),
            Err(OracleError::RankMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn single_factor_pairs_through_gram() {
        let gram = vec![
            vec![Rat::int(-2), Rat::one()],
            vec![Rat::one(), Rat::zero()],
        ];
        let ring = EvenRing::new(1, gram);
        let c = ring.box_class(&[Rat::one(), Rat::zero()]).unwrap();
        let f = ring.box_class(&[Rat::zero(), Rat::one()]).unwrap();
        assert_eq!(
            ring.even_intersection(&[c, f], Normalization::Raw).unwrap(),
            Rat::one()
        );
    }
}
