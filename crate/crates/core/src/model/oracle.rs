//! Instanton numbers of the projective plane from associativity alone.
//!
//! The quantum part of the potential is written as
//! `Φ = Σ_d N_d q^d t3^(3d-1)/(3d-1)!` with `q = e^{t2}`; associativity of the
//! rank-3 product reduces to the single equation
//! `Φ_333 + Φ_222 Φ_233 − Φ_223² = 0`, solved degree by degree in `q`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Truncated series in `(q, t3)`: `(d, n) ↦ coefficient of q^d t3^n`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Series(BTreeMap<(u32, u32), BigRational>);

impl Series {
    pub fn coeff(&self, d: u32, n: u32) -> BigRational {
        self.0.get(&(d, n)).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, d: u32, n: u32, value: BigRational) {
        if value.is_zero() {
            return;
        }
        let slot = self.0.entry((d, n)).or_insert_with(BigRational::zero);
        *slot += value;
        if slot.is_zero() {
            self.0.remove(&(d, n));
        }
    }

    /// `∂/∂t2` (multiplies by `d`).
    pub fn d2(&self) -> Series {
        let mut out = Series::default();
        for (&(d, n), v) in &self.0 {
            out.add_term(d, n, v * BigRational::from_integer(BigInt::from(d)));
        }
        out
    }

    /// `∂/∂t3`.
    pub fn d3(&self) -> Series {
        let mut out = Series::default();
        for (&(d, n), v) in &self.0 {
            if n > 0 {
                out.add_term(d, n - 1, v * BigRational::from_integer(BigInt::from(n)));
            }
        }
        out
    }

    /// Product, dropping `q` powers above `max_degree`.
    pub fn mul(&self, other: &Series, max_degree: u32) -> Series {
        let mut out = Series::default();
        for (&(d1, n1), a) in &self.0 {
            for (&(d2, n2), b) in &other.0 {
                if d1 + d2 <= max_degree {
                    out.add_term(d1 + d2, n1 + n2, a * b);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (&(d, n), v) in &other.0 {
            out.add_term(d, n, -v.clone());
        }
        out
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (&(d, n), v) in &other.0 {
            out.add_term(d, n, v.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Terms of total `q`-degree `d`.
    pub fn degree_part(&self, d: u32) -> Vec<(u32, BigRational)> {
        self.0
            .iter()
            .filter(|((dd, _), _)| *dd == d)
            .map(|(&(_, n), v)| (n, v.clone()))
            .collect()
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The quantum part `Φ` built from `ns[d-1] = N_d`.
pub fn quantum_series(ns: &[BigRational]) -> Series {
    let mut phi = Series::default();
    for (idx, n_d) in ns.iter().enumerate() {
        let d = idx as u32 + 1;
        let n = 3 * d - 1;
        phi.add_term(d, n, n_d / BigRational::from_integer(factorial(n)));
    }
    phi
}

/// `Φ_333 + Φ_222 Φ_233 − Φ_223²`, truncated at `q^max_degree`.
pub fn associativity_defect(ns: &[BigRational], max_degree: u32) -> Series {
    let phi = quantum_series(ns);
    let phi_222 = phi.d2().d2().d2();
    let phi_223 = phi.d2().d2().d3();
    let phi_233 = phi.d2().d3().d3();
    let phi_333 = phi.d3().d3().d3();
    phi_333
        .add(&phi_222.mul(&phi_233, max_degree))
        .sub(&phi_223.mul(&phi_223, max_degree))
}

/// `N_1..N_max_degree`, seeded only by `N_1 = 1`.
///
/// At order `q^d` the linear term `Φ_333` contributes `N_d t3^(3d-4)/(3d-4)!`
/// and every quadratic term involves only lower degrees, so each `N_d` is
/// read off one coefficient; the remaining coefficients at that order are
/// checked to vanish.
pub fn instanton_numbers(max_degree: u32) -> Vec<BigInt> {
    let mut ns = vec![BigRational::one()];
    for d in 2..=max_degree {
        let known = associativity_defect(&ns, d);
        let exponent = 3 * d - 4;
        let c = known.coeff(d, exponent);
        let n_d = -c * BigRational::from_integer(factorial(exponent));
        ns.push(n_d);
        let check = associativity_defect(&ns, d);
        assert!(
            check.degree_part(d).is_empty(),
            "associativity not solvable at degree {d}"
        );
    }
    ns.into_iter()
        .map(|q| {
            assert!(q.is_integer(), "non-integral instanton number {q}");
            q.to_integer()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_values() {
        let ns = instanton_numbers(4);
        let expected: Vec<BigInt> = [1, 1, 12, 620].iter().map(|&n| BigInt::from(n)).collect();
        assert_eq!(ns, expected);
    }

    #[test]
    fn defect_vanishes_through_truncation() {
        let ns: Vec<BigRational> = instanton_numbers(6)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        assert!(associativity_defect(&ns, 6).is_zero());
    }

    #[test]
    fn wrong_value_is_detected() {
        let ns: Vec<BigRational> = [1, 2]
            .iter()
            .map(|&n| BigRational::from_integer(BigInt::from(n)))
            .collect();
        assert!(!associativity_defect(&ns, 2).is_zero());
    }
}
