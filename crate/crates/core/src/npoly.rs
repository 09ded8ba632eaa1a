//! Polynomials in the formal polarisation parameter N with a validity floor.
//!
//! Slope expansions are only ever known down to some degree: a leading term
//! plus an `O(N^k)` tail. `NPoly` stores exact coefficients for the known
//! degrees and an explicit `floor`, the lowest degree whose coefficient is
//! known. Below the floor nothing is asserted, and comparisons that would
//! have to look there come back [`LeadingOrder::Indeterminate`] instead of
//! silently assuming zero.
//!
//! Canonical form: known zero coefficients are not stored, every stored
//! degree is >= the floor, and a floor <= 0 (nothing unknown) is represented
//! as `None`, i.e. the polynomial is exact.

use crate::rat::Rat;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in N, exact at degrees >= `floor`, unknown below.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NPoly {
    coeffs: BTreeMap<i64, Rat>,
    floor: Option<i64>,
}

/// Outcome of a leading-order comparison of two `NPoly`s.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LeadingOrder {
    Less,
    EqualAtKnownOrder,
    Greater,
    /// All known coefficients tie and a validity floor blocks the rest.
    Indeterminate,
}

impl NPoly {
    // ---- Constructors ----

    /// The exact zero polynomial.
    pub fn zero() -> Self {
        NPoly {
            coeffs: BTreeMap::new(),
            floor: None,
        }
    }

    /// An exact constant.
    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    /// The exact monomial `c * N^deg`.
    pub fn monomial(c: Rat, deg: i64) -> Self {
        assert!(deg >= 0, "negative degree in N-polynomial");
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(deg, c);
        }
        NPoly {
            coeffs,
            floor: None,
        }
    }

    /// Exact polynomial from `(degree, coefficient)` pairs.
    pub fn from_terms(terms: &[(i64, Rat)]) -> Self {
        let mut p = NPoly::zero();
        for (d, c) in terms {
            p = p + NPoly::monomial(c.clone(), *d);
        }
        p
    }

    /// Forgets every coefficient below `floor`, turning them unknown.
    /// `72N^3 + O(N^2)` is `monomial(72, 3).with_floor(3)`.
    pub fn with_floor(mut self, floor: i64) -> Self {
        if floor > 0 {
            self.coeffs.retain(|d, _| *d >= floor);
            self.floor = Some(match self.floor {
                Some(f) => f.max(floor),
                None => floor,
            });
        }
        self
    }

    // ---- Queries ----

    /// Lowest degree whose coefficient is known, or `None` when exact.
    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// The coefficient of `N^deg`: `Some` if known (zero included),
    /// `None` if the degree lies below the validity floor.
    pub fn coeff(&self, deg: i64) -> Option<Rat> {
        match self.floor {
            Some(f) if deg < f => None,
            _ => Some(self.coeffs.get(&deg).cloned().unwrap_or_else(Rat::zero)),
        }
    }

    /// Highest degree with a known nonzero coefficient.
    pub fn known_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Leading known term `(degree, coefficient)`, if any is nonzero.
    pub fn leading(&self) -> Option<(i64, Rat)> {
        self.known_degree().map(|d| (d, self.coeffs[&d].clone()))
    }

    /// True when no coefficient is known nonzero and nothing is unknown.
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.is_none()
    }

    // ---- Arithmetic helpers ----

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            // Scaling by exact zero erases the unknown tail as well.
            return NPoly::zero();
        }
        NPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, a)| (*d, a * c))
                .collect(),
            floor: self.floor,
        }
    }

    /// Exact division by a nonzero scalar (used for slope = degree / rank).
    pub fn div_scalar(&self, c: &Rat) -> Self {
        self.scale(&c.recip())
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        if let Some(f) = self.floor {
            if f <= 0 {
                self.floor = None;
            } else {
                self.coeffs.retain(|d, _| *d >= f);
            }
        }
        self
    }

    /// Compares leading behaviour for N large, degree by degree downward.
    pub fn compare_leading(&self, other: &NPoly) -> LeadingOrder {
        let top = self
            .known_degree()
            .into_iter()
            .chain(other.known_degree())
            .max();
        let start = match top {
            Some(d) => d,
            // No known nonzero coefficient on either side.
            None => {
                return if self.floor.is_none() && other.floor.is_none() {
                    LeadingOrder::EqualAtKnownOrder
                } else {
                    LeadingOrder::Indeterminate
                };
            }
        };
        for d in (0..=start).rev() {
            match (self.coeff(d), other.coeff(d)) {
                (Some(a), Some(b)) => {
                    if a < b {
                        return LeadingOrder::Less;
                    }
                    if a > b {
                        return LeadingOrder::Greater;
                    }
                }
                // A floor blocks the comparison at this order.
                _ => return LeadingOrder::Indeterminate,
            }
        }
        LeadingOrder::EqualAtKnownOrder
    }
}

impl Add for NPoly {
    type Output = NPoly;
    fn add(self, rhs: NPoly) -> NPoly {
        &self + &rhs
    }
}

impl Add<&NPoly> for &NPoly {
    type Output = NPoly;
    fn add(self, rhs: &NPoly) -> NPoly {
        let mut coeffs = self.coeffs.clone();
        for (d, c) in &rhs.coeffs {
            let entry = coeffs.entry(*d).or_insert_with(Rat::zero);
            *entry += c;
        }
        let floor = match (self.floor, rhs.floor) {
            (None, f) | (f, None) => f,
            (Some(a), Some(b)) => Some(a.max(b)),
        };
        NPoly { coeffs, floor }.normalized()
    }
}

impl Sub for NPoly {
    type Output = NPoly;
    fn sub(self, rhs: NPoly) -> NPoly {
        &self + &(-&rhs)
    }
}

impl Sub<&NPoly> for &NPoly {
    type Output = NPoly;
    fn sub(self, rhs: &NPoly) -> NPoly {
        self + &(-rhs)
    }
}

impl Neg for &NPoly {
    type Output = NPoly;
    fn neg(self) -> NPoly {
        NPoly {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
            floor: self.floor,
        }
    }
}

impl Neg for NPoly {
    type Output = NPoly;
    fn neg(self) -> NPoly {
        -&self
    }
}

impl Mul for NPoly {
    type Output = NPoly;
    fn mul(self, rhs: NPoly) -> NPoly {
        &self * &rhs
    }
}

impl Mul<&NPoly> for &NPoly {
    type Output = NPoly;
    fn mul(self, rhs: &NPoly) -> NPoly {
        let mut coeffs: BTreeMap<i64, Rat> = BTreeMap::new();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                let entry = coeffs.entry(da + db).or_insert_with(Rat::zero);
                *entry += &(ca * cb);
            }
        }
        // A product coefficient is known only when every contributing pair
        // is known. Unknown tails reach up to known_degree + floor - 1 of
        // the cross terms and floor_a + floor_b - 2 of the tail product.
        let mut floor: Option<i64> = None;
        let mut raise = |f: i64| {
            floor = Some(match floor {
                Some(g) => g.max(f),
                None => f,
            });
        };
        if let Some(fb) = rhs.floor {
            if let Some(da) = self.known_degree() {
                raise(da + fb);
            }
        }
        if let Some(fa) = self.floor {
            if let Some(db) = rhs.known_degree() {
                raise(fa + db);
            }
        }
        if let (Some(fa), Some(fb)) = (self.floor, rhs.floor) {
            raise(fa + fb - 1);
        }
        NPoly { coeffs, floor }.normalized()
    }
}

/// Renders like the slope expansions: `72N^3 + O(N^2)`, `2N - 8`, `0`.
impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let unit = mag == Rat::one();
            match (*d, unit) {
                (0, _) => write!(f, "{}", mag)?,
                (1, true) => write!(f, "N")?,
                (1, false) => write!(f, "{}N", mag)?,
                (_, true) => write!(f, "N^{}", d)?,
                (_, false) => write!(f, "{}N^{}", mag, d)?,
            }
        }
        match self.floor {
            Some(fl) => {
                if first {
                    match fl - 1 {
                        0 => write!(f, "O(1)"),
                        1 => write!(f, "O(N)"),
                        k => write!(f, "O(N^{})", k),
                    }
                } else {
                    match fl - 1 {
                        0 => write!(f, " + O(1)"),
                        1 => write!(f, " + O(N)"),
                        k => write!(f, " + O(N^{})", k),
                    }
                }
            }
            None => {
                if first {
                    write!(f, "0")
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truncated(c: i64, d: i64) -> NPoly {
        NPoly::monomial(Rat::int(c), d).with_floor(d)
    }

    #[test]
    fn add_keeps_floor() {
        // (3N^3 + O(N^2)) + (-N^3 + O(N^2)) = 2N^3 + O(N^2)
        let sum = truncated(3, 3) + truncated(-1, 3);
        assert_eq!(sum, truncated(2, 3));
        assert_eq!(sum.to_string(), "2N^3 + O(N^2)");
    }

    #[test]
    fn mul_propagates_floor() {
        // (N + O(1))^2 = N^2 + O(N)
        let p = NPoly::monomial(Rat::one(), 1).with_floor(1);
        let sq = &p * &p;
        assert_eq!(sq.coeff(2), Some(Rat::int(1)));
        assert_eq!(sq.coeff(1), None);
        assert_eq!(sq.to_string(), "N^2 + O(N)");
    }

    #[test]
    fn truncated_slope_sum() {
        // 72N^3 and -36N^3 with O(N^2) tails sum to 36N^3 + O(N^2).
        let sum = truncated(72, 3) + truncated(-36, 3);
        assert_eq!(sum, truncated(36, 3));
        assert_eq!(sum.to_string(), "36N^3 + O(N^2)");
    }

    #[test]
    fn compare_leading_basic() {
        assert_eq!(
            truncated(72, 3).compare_leading(&truncated(36, 3)),
            LeadingOrder::Greater
        );
        assert_eq!(
            truncated(36, 3).compare_leading(&truncated(72, 3)),
            LeadingOrder::Less
        );
    }

    #[test]
    fn compare_zero_tails_indeterminate() {
        // 0 + O(N^2) vs 0 + O(N^2): nothing known distinguishes them.
        let zt = NPoly::zero().with_floor(3);
        assert_eq!(zt.compare_leading(&zt), LeadingOrder::Indeterminate);
        assert_eq!(zt.to_string(), "O(N^2)");
    }

    #[test]
    fn floor_blocks_comparison_against_exact() {
        // N^3 + O(N^2) vs exact N^3 - 5N^2: tie at N^3, unknown at N^2.
        let p = truncated(1, 3);
        let q = NPoly::from_terms(&[(3, Rat::int(1)), (2, Rat::int(-5))]);
        assert_eq!(p.compare_leading(&q), LeadingOrder::Indeterminate);
    }

    #[test]
    fn exact_polys_compare_fully() {
        let p = NPoly::from_terms(&[(3, Rat::int(1)), (2, Rat::int(-5))]);
        assert_eq!(p.compare_leading(&p.clone()), LeadingOrder::EqualAtKnownOrder);
        let q = NPoly::from_terms(&[(3, Rat::int(1))]);
        assert_eq!(p.compare_leading(&q), LeadingOrder::Less);
        // Known zero above a floor still decides against a higher power.
        let tail = NPoly::zero().with_floor(3);
        let big = NPoly::monomial(Rat::one(), 5);
        assert_eq!(tail.compare_leading(&big), LeadingOrder::Less);
    }

    #[test]
    fn display_shapes() {
        assert_eq!(NPoly::zero().to_string(), "0");
        assert_eq!(
            NPoly::from_terms(&[(1, Rat::int(2)), (0, Rat::int(-8))]).to_string(),
            "2N - 8"
        );
        assert_eq!(
            NPoly::monomial(Rat::new(1, 2), 1).with_floor(1).to_string(),
            "1/2N + O(1)"
        );
    }

    #[test]
    fn scaling_by_zero_is_exact() {
        let p = truncated(72, 3);
        assert!(p.scale(&Rat::zero()).is_exact_zero());
    }
}
