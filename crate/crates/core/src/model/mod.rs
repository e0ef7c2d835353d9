//! Frobenius-manifold models: metric, grading, Euler data and potential.

pub mod catalog;
pub mod file;
pub mod oracle;
pub mod potential;
pub mod wdvv;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rational_to_f64, CMatrix, C64};

pub use catalog::{builtin_catalog, catalog_names, catalog_summary, DEFAULT_TRUNCATION};
pub use file::{emit_model, load_model, load_model_file};
pub use potential::{CompiledPotential, PotentialExpr, QComplex, Term};
pub use wdvv::{validate_wdvv, wdvv_residual, WdvvReport};

/// An immutable, validated model. Index 0 is the unit class.
#[derive(Debug, Clone)]
pub struct FrobeniusModel {
    name: String,
    dim: usize,
    eta_exact: Vec<Vec<QComplex>>,
    eta: CMatrix,
    eta_inv: CMatrix,
    b: Vec<BigRational>,
    b_f64: Vec<f64>,
    c_matrix: Vec<Vec<BigRational>>,
    potential: PotentialExpr,
    compiled: CompiledPotential,
    truncation_degree: usize,
}

impl FrobeniusModel {
    /// Builds a model and checks every point-independent invariant.
    pub fn new(
        name: impl Into<String>,
        eta_exact: Vec<Vec<QComplex>>,
        b: Vec<BigRational>,
        c_matrix: Vec<Vec<BigRational>>,
        potential: PotentialExpr,
        truncation_degree: usize,
    ) -> Result<Self> {
        let dim = eta_exact.len();
        if dim < 2 {
            return Err(Error::Schema(format!("dim must be at least 2, got {dim}")));
        }
        if eta_exact.iter().any(|row| row.len() != dim) {
            return Err(Error::Schema("eta must be a square matrix".into()));
        }
        if b.len() != dim {
            return Err(Error::Schema(format!("b has length {}, expected {dim}", b.len())));
        }
        if c_matrix.len() != dim || c_matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::Schema("c_matrix must be dim × dim".into()));
        }
        if potential.dim() != dim {
            return Err(Error::Schema(format!(
                "potential has {} variables, expected {dim}",
                potential.dim()
            )));
        }

        for row in 0..dim {
            for col in row + 1..dim {
                if eta_exact[row][col] != eta_exact[col][row] {
                    return Err(Error::EtaNotSymmetric { row, col });
                }
            }
        }
        let eta = CMatrix::from_fn(dim, dim, |r, c| potential::q_to_c64(&eta_exact[r][c]));
        let eta_inv = eta.clone().try_inverse().ok_or(Error::EtaSingular)?;
        let deviation = (&eta * &eta_inv - CMatrix::identity(dim, dim))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if !deviation.is_finite() {
            return Err(Error::EtaSingular);
        }
        if deviation > 1e-12 {
            return Err(Error::EtaInverseMismatch(deviation));
        }

        for alpha in 0..dim {
            for beta in alpha..dim {
                if !eta_exact[alpha][beta].is_zero() && &b[alpha] + &b[beta] != BigRational::one() {
                    return Err(Error::GradingPairing { alpha, beta });
                }
            }
        }

        check_unit_direction(&potential)?;
        for alpha in 0..dim {
            for beta in alpha..dim {
                let third = potential.derivative_multi(&[0, alpha, beta]);
                match third.constant_value() {
                    Some(v) if v == eta_exact[alpha][beta] => {}
                    _ => return Err(Error::IdentityAxiom { alpha, beta }),
                }
            }
        }

        let b_f64 = b.iter().map(rational_to_f64).collect();
        let compiled = potential.compile();
        Ok(Self {
            name: name.into(),
            dim,
            eta_exact,
            eta,
            eta_inv,
            b,
            b_f64,
            c_matrix,
            potential,
            compiled,
            truncation_degree,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta(&self) -> &CMatrix {
        &self.eta
    }

    pub fn eta_exact(&self) -> &[Vec<QComplex>] {
        &self.eta_exact
    }

    pub fn eta_inv(&self) -> &CMatrix {
        &self.eta_inv
    }

    pub fn b(&self) -> &[BigRational] {
        &self.b
    }

    pub fn b_f64(&self) -> &[f64] {
        &self.b_f64
    }

    pub fn c_matrix(&self) -> &[Vec<BigRational>] {
        &self.c_matrix
    }

    pub fn potential(&self) -> &PotentialExpr {
        &self.potential
    }

    pub fn compiled(&self) -> &CompiledPotential {
        &self.compiled
    }

    pub fn truncation_degree(&self) -> usize {
        self.truncation_degree
    }

    /// `C_1^α` as floats (the constant part of the Euler field on the slice).
    pub fn c_first_row(&self) -> Vec<C64> {
        self.c_matrix[0]
            .iter()
            .map(|q| C64::new(rational_to_f64(q), 0.0))
            .collect()
    }

    /// Structural equality up to term ordering.
    pub fn same_as(&self, other: &FrobeniusModel) -> bool {
        self.name == other.name
            && self.eta_exact == other.eta_exact
            && self.b == other.b
            && self.c_matrix == other.c_matrix
            && self.truncation_degree == other.truncation_degree
            && self.potential.canonical() == other.potential.canonical()
    }
}

/// `t_1` may enter only through exponential-free monomials of total degree ≤ 3.
fn check_unit_direction(potential: &PotentialExpr) -> Result<()> {
    for (term_idx, term) in potential.terms().iter().enumerate() {
        if !term.exp_form[0].is_zero() {
            return Err(Error::UnitDirection {
                term: term_idx,
                reason: "exponential depends on t_1".into(),
            });
        }
        if term.exponents[0] > 0 {
            if term.has_exponential() {
                return Err(Error::UnitDirection {
                    term: term_idx,
                    reason: "t_1 multiplies an exponential".into(),
                });
            }
            if term.degree() > 3 {
                return Err(Error::UnitDirection {
                    term: term_idx,
                    reason: format!("t_1 appears in total degree {}", term.degree()),
                });
            }
        }
    }
    Ok(())
}
