//! Exact representation of a genus-0 potential as a finite sum of
//! `c · t^m · exp(L(t))` terms, with symbolic differentiation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{rational_to_f64, C64};

/// Complex number with exact rational parts.
pub type QComplex = Complex<BigRational>;

pub fn q_complex(re: BigRational, im: BigRational) -> QComplex {
    Complex::new(re, im)
}

pub fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn q_to_c64(z: &QComplex) -> C64 {
    C64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: QComplex,
    pub exponents: Vec<u32>,
    pub exp_form: Vec<BigRational>,
}

impl Term {
    pub fn new(coeff: QComplex, exponents: Vec<u32>, exp_form: Vec<BigRational>) -> Self {
        Self {
            coeff,
            exponents,
            exp_form,
        }
    }

    /// Real rational coefficient, polynomial part only.
    pub fn monomial(coeff: BigRational, exponents: Vec<u32>) -> Self {
        let dim = exponents.len();
        Self::new(
            q_complex(coeff, BigRational::zero()),
            exponents,
            vec![BigRational::zero(); dim],
        )
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn has_exponential(&self) -> bool {
        self.exp_form.iter().any(|l| !l.is_zero())
    }

    fn derivative(&self, k: usize) -> Vec<Term> {
        let mut out = Vec::with_capacity(2);
        if self.exponents[k] > 0 {
            let m = self.exponents[k];
            let mut exponents = self.exponents.clone();
            exponents[k] -= 1;
            let factor = q_int(m as i64);
            out.push(Term::new(
                scale(&self.coeff, &factor),
                exponents,
                self.exp_form.clone(),
            ));
        }
        if !self.exp_form[k].is_zero() {
            out.push(Term::new(
                scale(&self.coeff, &self.exp_form[k]),
                self.exponents.clone(),
                self.exp_form.clone(),
            ));
        }
        out
    }
}

fn scale(z: &QComplex, s: &BigRational) -> QComplex {
    Complex::new(&z.re * s, &z.im * s)
}

/// Finite sum of terms over `dim` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialExpr {
    dim: usize,
    terms: Vec<Term>,
}

impl PotentialExpr {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for (idx, term) in terms.iter().enumerate() {
            if term.exponents.len() != dim || term.exp_form.len() != dim {
                return Err(Error::Schema(format!(
                    "term {idx} has {} exponents and {} exponential coefficients, expected {dim}",
                    term.exponents.len(),
                    term.exp_form.len()
                )));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Merges like terms and drops zeros; terms come out in a fixed order.
    pub fn canonical(&self) -> PotentialExpr {
        let mut merged: BTreeMap<(Vec<u32>, Vec<BigRational>), QComplex> = BTreeMap::new();
        for term in &self.terms {
            let key = (term.exponents.clone(), term.exp_form.clone());
            let slot = merged.entry(key).or_insert_with(QComplex::zero);
            *slot = &*slot + &term.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, coeff)| !coeff.is_zero())
            .map(|((exponents, exp_form), coeff)| Term::new(coeff, exponents, exp_form))
            .collect();
        PotentialExpr {
            dim: self.dim,
            terms,
        }
    }

    pub fn derivative(&self, k: usize) -> PotentialExpr {
        let terms = self.terms.iter().flat_map(|t| t.derivative(k)).collect();
        PotentialExpr {
            dim: self.dim,
            terms,
        }
        .canonical()
    }

    pub fn derivative_multi(&self, indices: &[usize]) -> PotentialExpr {
        indices
            .iter()
            .fold(self.canonical(), |expr, &k| expr.derivative(k))
    }

    /// The value when the (canonical) expression is a constant.
    pub fn constant_value(&self) -> Option<QComplex> {
        let canon = self.canonical();
        match canon.terms.as_slice() {
            [] => Some(QComplex::zero()),
            [only] if only.degree() == 0 && !only.has_exponential() => Some(only.coeff.clone()),
            _ => None,
        }
    }

    pub fn evaluate(&self, t: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|term| {
                let mut value = q_to_c64(&term.coeff);
                let mut exponent = C64::zero();
                for k in 0..self.dim {
                    value *= t[k].powu(term.exponents[k]);
                    exponent += t[k] * rational_to_f64(&term.exp_form[k]);
                }
                value * exponent.exp()
            })
            .sum()
    }

    pub fn compile(&self) -> CompiledPotential {
        CompiledPotential {
            dim: self.dim,
            terms: self
                .canonical()
                .terms
                .iter()
                .map(|term| CompiledTerm {
                    coeff: q_to_c64(&term.coeff),
                    exponents: term.exponents.clone(),
                    exp_form: term.exp_form.iter().map(rational_to_f64).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: C64,
    exponents: Vec<u32>,
    exp_form: Vec<f64>,
}

/// Floating-point view of a potential that evaluates any mixed partial
/// derivative in closed form (Leibniz rule per variable).
#[derive(Debug, Clone)]
pub struct CompiledPotential {
    dim: usize,
    terms: Vec<CompiledTerm>,
}

impl CompiledPotential {
    /// `∂^{counts} F (t)` where `counts[k]` is the number of derivatives in `t_k`.
    pub fn derivative_at(&self, t: &[C64], counts: &[u32]) -> C64 {
        let mut total = C64::zero();
        for term in &self.terms {
            let mut value = term.coeff;
            let mut exponent = C64::zero();
            for k in 0..self.dim {
                exponent += t[k] * term.exp_form[k];
                let factor = leibniz_factor(t[k], term.exponents[k], term.exp_form[k], counts[k]);
                if factor == C64::zero() {
                    value = C64::zero();
                    break;
                }
                value *= factor;
            }
            if value != C64::zero() {
                total += value * exponent.exp();
            }
        }
        total
    }
}

/// `e^{-l x} ∂_x^n (x^m e^{l x})`.
fn leibniz_factor(x: C64, m: u32, l: f64, n: u32) -> C64 {
    let mut acc = C64::zero();
    let mut binom = 1.0f64;
    let mut falling = 1.0f64;
    for beta in 0..=n.min(m) {
        if beta > 0 {
            binom = binom * (n - beta + 1) as f64 / beta as f64;
            falling *= (m - beta + 1) as f64;
        }
        let l_pow = l.powi((n - beta) as i32);
        if l_pow == 0.0 {
            continue;
        }
        acc += x.powu(m - beta) * (binom * falling * l_pow);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1_potential() -> PotentialExpr {
        let half = q_frac(1, 2);
        PotentialExpr::new(
            2,
            vec![
                Term::monomial(half, vec![2, 1]),
                Term::new(
                    q_complex(q_int(1), q_int(0)),
                    vec![0, 0],
                    vec![q_int(0), q_int(1)],
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn third_derivative_is_exact() {
        let f = p1_potential();
        let d = f.derivative_multi(&[0, 0, 1]);
        assert_eq!(d.constant_value().unwrap(), q_complex(q_int(1), q_int(0)));
        let d = f.derivative_multi(&[0, 1, 1, 1]);
        assert!(d.terms().is_empty());
        let d = f.derivative_multi(&[1, 1, 1]);
        assert_eq!(d.terms().len(), 1);
        assert!(d.terms()[0].has_exponential());
    }

    #[test]
    fn compiled_matches_symbolic() {
        let f = p1_potential();
        let compiled = f.compile();
        let t = [C64::new(0.3, -0.1), C64::new(-0.7, 0.25)];
        for idx in [vec![0, 0, 1], vec![1, 1, 1, 1, 1], vec![0, 1], vec![0, 0, 0]] {
            let mut counts = vec![0u32; 2];
            for &k in &idx {
                counts[k] += 1;
            }
            let fast = compiled.derivative_at(&t, &counts);
            let slow = f.derivative_multi(&idx).evaluate(&t);
            assert!((fast - slow).norm() < 1e-14, "{idx:?}: {fast} vs {slow}");
        }
    }

    #[test]
    fn canonical_merges_like_terms() {
        let a = Term::monomial(q_int(2), vec![1, 0]);
        let b = Term::monomial(q_int(-2), vec![1, 0]);
        let c = Term::monomial(q_int(3), vec![0, 1]);
        let f = PotentialExpr::new(2, vec![a, c.clone(), b]).unwrap();
        assert_eq!(f.canonical().terms(), &[c]);
    }

    #[test]
    fn leibniz_against_repeated_rule() {
        // ∂^3 (x^2 e^{2x}) = e^{2x} (8x^2 + 24x + 12)
        let x = C64::new(0.4, 0.2);
        let expected = 8.0 * x * x + 24.0 * x + 12.0;
        assert!((leibniz_factor(x, 2, 2.0, 3) - expected).norm() < 1e-13);
    }
}
