//! Dimension vectors of graded super vector spaces.
//!
//! `GradedDims` records one non-negative dimension per cohomological degree.
//! Parity of the degree is the super-parity: even degrees commute, odd
//! degrees anticommute. Tensor products convolve; symmetric powers follow
//! the Koszul rule (symmetric on the even part, exterior on the odd part).

use std::fmt;

/// Dimensions of a graded super vector space, indexed by degree from 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedDims(Vec<u64>);

impl GradedDims {
    pub fn new(dims: &[u64]) -> Self {
        GradedDims(dims.to_vec())
    }

    /// The unit: one dimension in degree 0.
    pub fn unit() -> Self {
        GradedDims(vec![1])
    }

    pub fn dims(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self, degree: usize) -> u64 {
        self.0.get(degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Highest degree carried (length - 1), or `None` for the empty vector.
    pub fn top_degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Reverses the degree order: degree i becomes degree (top - i).
    /// Realises a two-dimensional Serre duality flip for length-3 vectors.
    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        GradedDims(v)
    }

    /// Drops trailing zero degrees; useful for canonical comparisons.
    pub fn trimmed(&self) -> Self {
        let mut v = self.0.clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        GradedDims(v)
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d)?;
        }
        write!(f, ")")
    }
}

/// Degreewise direct sum: componentwise addition, padding with zeros.
pub fn graded_sum(u: &GradedDims, v: &GradedDims) -> GradedDims {
    let len = u.0.len().max(v.0.len());
    let mut out = vec![0u64; len];
    for (d, slot) in out.iter_mut().enumerate() {
        *slot = u
            .dim(d)
            .checked_add(v.dim(d))
            .expect("dimension overflow");
    }
    GradedDims(out)
}

/// Degreewise tensor product: `c_d = sum_i u_i * v_{d-i}`.
pub fn graded_tensor(u: &GradedDims, v: &GradedDims) -> GradedDims {
    if u.0.is_empty() || v.0.is_empty() {
        return GradedDims(Vec::new());
    }
    let mut out = vec![0u64; u.0.len() + v.0.len() - 1];
    for (i, a) in u.0.iter().enumerate() {
        for (j, b) in v.0.iter().enumerate() {
            out[i + j] = out[i + j]
                .checked_add(a.checked_mul(*b).expect("dimension overflow"))
                .expect("dimension overflow");
        }
    }
    GradedDims(out)
}

/// Binomial coefficient with overflow checks; dimensions stay modest here.
fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("dimension overflow")
}

/// Dimensions of the k-th symmetric power in the super (Koszul) sense:
/// the z^k coefficient of
/// `prod_{i even} (1 - t^i z)^{-v_i} * prod_{i odd} (1 + t^i z)^{v_i}`.
///
/// Even degrees contribute a symmetric algebra, odd degrees an exterior one.
pub fn super_sym_power(v: &GradedDims, k: u64) -> GradedDims {
    let k = usize::try_from(k).expect("symmetric power order overflow");
    // series[m] = coefficient of z^m, a polynomial in t (ascending degrees).
    let mut series: Vec<Vec<u64>> = vec![Vec::new(); k + 1];
    series[0] = vec![1];

    let mul_into = |series: &mut Vec<Vec<u64>>, factor: &[(usize, Vec<u64>)]| {
        // factor: list of (z-power, t-polynomial) with z-power >= 1 terms
        // plus the implicit leading 1.
        let mut next: Vec<Vec<u64>> = vec![Vec::new(); series.len()];
        for (m, tp) in series.iter().enumerate() {
            if tp.is_empty() {
                continue;
            }
            add_poly(&mut next[m], tp, &[1]);
            for (dz, fp) in factor {
                if m + dz < next.len() {
                    let m2 = m + dz;
                    add_poly(&mut next[m2], tp, fp);
                }
            }
        }
        *series = next;
    };

    for (i, &vi) in v.0.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        let mut factor: Vec<(usize, Vec<u64>)> = Vec::new();
        if i % 2 == 0 {
            // (1 - t^i z)^{-vi} = sum_m C(vi-1+m, m) t^{im} z^m
            for m in 1..=k {
                let c = binom(vi - 1 + m as u64, m as u64);
                factor.push((m, t_monomial(c, i * m)));
            }
        } else {
            // (1 + t^i z)^{vi} = sum_m C(vi, m) t^{im} z^m
            for m in 1..=(vi as usize).min(k) {
                let c = binom(vi, m as u64);
                factor.push((m, t_monomial(c, i * m)));
            }
        }
        mul_into(&mut series, &factor);
    }

    // Pad to the nominal top degree k * top(v) so output shapes depend
    // only on the input shape, not on which entries happen to vanish.
    let mut out = std::mem::take(&mut series[k]);
    let nominal = match v.top_degree() {
        Some(top) if k > 0 => k * top + 1,
        _ => 1,
    };
    if out.len() < nominal {
        out.resize(nominal, 0);
    }
    GradedDims(out)
}

fn t_monomial(c: u64, deg: usize) -> Vec<u64> {
    let mut p = vec![0; deg + 1];
    p[deg] = c;
    p
}

/// `acc += a * b` on ascending-degree t-polynomials.
fn add_poly(acc: &mut Vec<u64>, a: &[u64], b: &[u64]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    let len = a.len() + b.len() - 1;
    if acc.len() < len {
        acc.resize(len, 0);
    }
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            acc[i + j] = acc[i + j]
                .checked_add(x.checked_mul(*y).expect("dimension overflow"))
                .expect("dimension overflow");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_square_of_structure_sheaf_cohomology() {
        // (1,0,1) tensor (1,0,1) = (1,0,2,0,1)
        let v = GradedDims::new(&[1, 0, 1]);
        assert_eq!(graded_tensor(&v, &v), GradedDims::new(&[1, 0, 2, 0, 1]));
    }

    #[test]
    fn tensor_with_unit_is_identity() {
        let v = GradedDims::new(&[3, 2, 0]);
        assert_eq!(graded_tensor(&v, &GradedDims::unit()).trimmed(), v.trimmed());
        assert_eq!(graded_tensor(&GradedDims::unit(), &v).trimmed(), v.trimmed());
    }

    #[test]
    fn tensor_general_shape() {
        // (a,b,0) tensor (1,0,1) = (a,b,a,b,0) checked at a=3, b=2.
        let u = GradedDims::new(&[3, 2, 0]);
        let v = GradedDims::new(&[1, 0, 1]);
        assert_eq!(graded_tensor(&u, &v), GradedDims::new(&[3, 2, 3, 2, 0]));
    }

    #[test]
    fn sym_power_one_is_identity() {
        let v = GradedDims::new(&[2, 3, 1]);
        assert_eq!(super_sym_power(&v, 1).trimmed(), v.trimmed());
    }

    #[test]
    fn sym_square_even_generators() {
        // Generators in degrees 0 and 2 (both even): plain symmetric square.
        let v = GradedDims::new(&[1, 0, 1]);
        assert_eq!(super_sym_power(&v, 2), GradedDims::new(&[1, 0, 1, 0, 1]));
    }

    #[test]
    fn sym_square_with_odd_generators() {
        // Two odd degree-1 generators multiply exterior-style: b1*b2 only.
        let v = GradedDims::new(&[1, 2, 1]);
        assert_eq!(super_sym_power(&v, 2), GradedDims::new(&[1, 2, 2, 2, 1]));
    }

    #[test]
    fn sym_zero_is_unit() {
        let v = GradedDims::new(&[4, 1]);
        assert_eq!(super_sym_power(&v, 0), GradedDims::unit());
    }

    #[test]
    fn serre_reversal() {
        assert_eq!(
            GradedDims::new(&[5, 3, 0]).reversed(),
            GradedDims::new(&[0, 3, 5])
        );
    }
}
