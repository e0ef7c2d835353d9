//! Built-in models.
//!
//! `C_α^β` is stored row-major with `c_1 ∪ γ_α = Σ_β C[α][β] γ_β`, in the
//! basis `γ_1 = 1, γ_2 = H, ...`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::oracle::{factorial, instanton_numbers};
use super::potential::{q_complex, q_frac, q_int, PotentialExpr, QComplex, Term};
use super::FrobeniusModel;
use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 5;

pub fn catalog_names() -> &'static [&'static str] {
    &["P1", "P2", "poly2d"]
}

pub fn builtin_catalog(name: &str, truncation: usize) -> Result<FrobeniusModel> {
    if truncation < 1 {
        return Err(Error::BadTruncation(truncation));
    }
    match name {
        "P1" => p1(truncation),
        "P2" => p2(truncation),
        "poly2d" => poly2d(truncation),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// One-line description for `catalog list`.
pub fn catalog_summary(name: &str) -> Option<&'static str> {
    match name {
        "P1" => Some("projective line: F = t1^2 t2/2 + exp(t2)"),
        "P2" => Some("projective plane with instanton series up to the truncation degree"),
        "poly2d" => Some("polynomial rank-2 model: F = t1^2 t2/2 + t2^4/4"),
        _ => None,
    }
}

fn real(q: BigRational) -> QComplex {
    q_complex(q, BigRational::zero())
}

fn antidiagonal(n: usize) -> Vec<Vec<QComplex>> {
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| real(if r + c == n - 1 { q_int(1) } else { q_int(0) }))
                .collect()
        })
        .collect()
}

fn zeros(n: usize) -> Vec<BigRational> {
    vec![BigRational::zero(); n]
}

fn p1(truncation: usize) -> Result<FrobeniusModel> {
    let terms = vec![
        Term::monomial(q_frac(1, 2), vec![2, 1]),
        Term::new(real(q_int(1)), vec![0, 0], vec![q_int(0), q_int(1)]),
    ];
    FrobeniusModel::new(
        "P1",
        antidiagonal(2),
        vec![q_int(0), q_int(1)],
        vec![vec![q_int(0), q_int(2)], zeros(2)],
        PotentialExpr::new(2, terms)?,
        truncation,
    )
}

fn p2(truncation: usize) -> Result<FrobeniusModel> {
    let mut terms = vec![
        Term::monomial(q_frac(1, 2), vec![2, 0, 1]),
        Term::monomial(q_frac(1, 2), vec![1, 2, 0]),
    ];
    for (idx, n_d) in instanton_numbers(truncation as u32).into_iter().enumerate() {
        let d = idx as u32 + 1;
        let power = 3 * d - 1;
        let coeff = BigRational::new(n_d, factorial(power));
        terms.push(Term::new(
            real(coeff),
            vec![0, 0, power],
            vec![q_int(0), BigRational::from_integer(BigInt::from(d)), q_int(0)],
        ));
    }
    FrobeniusModel::new(
        "P2",
        antidiagonal(3),
        vec![q_frac(-1, 2), q_frac(1, 2), q_frac(3, 2)],
        vec![
            vec![q_int(0), q_int(3), q_int(0)],
            vec![q_int(0), q_int(0), q_int(3)],
            zeros(3),
        ],
        PotentialExpr::new(3, terms)?,
        truncation,
    )
}

fn poly2d(truncation: usize) -> Result<FrobeniusModel> {
    let terms = vec![
        Term::monomial(q_frac(1, 2), vec![2, 1]),
        Term::monomial(q_frac(1, 4), vec![0, 4]),
    ];
    FrobeniusModel::new(
        "poly2d",
        antidiagonal(2),
        vec![q_frac(1, 3), q_frac(2, 3)],
        vec![zeros(2), zeros(2)],
        PotentialExpr::new(2, terms)?,
        truncation,
    )
}

/// `N_d` read back from a P2-shaped potential (coefficient of `e^{d t2} t3^(3d-1)`).
pub fn p2_coefficients(model: &FrobeniusModel) -> Vec<(u32, BigRational)> {
    let mut out: Vec<(u32, BigRational)> = model
        .potential()
        .terms()
        .iter()
        .filter(|t| t.has_exponential())
        .filter_map(|t| {
            let d = &t.exp_form[1];
            if !d.is_integer() {
                return None;
            }
            let d: u32 = d.to_integer().try_into().ok()?;
            let power = 3 * d - 1;
            Some((d, &t.coeff.re * BigRational::from_integer(factorial(power))))
        })
        .collect();
    out.sort_by_key(|(d, _)| *d);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::C64;

    #[test]
    fn every_catalog_model_loads() {
        for name in catalog_names() {
            let model = builtin_catalog(name, 3).unwrap();
            assert_eq!(model.name(), *name);
        }
    }

    #[test]
    fn p1_third_derivative_in_t2() {
        let model = builtin_catalog("P1", 1).unwrap();
        let d = model.potential().derivative_multi(&[1, 1, 1]);
        let t = [C64::new(0.1, 0.0), C64::new(0.7, -0.2)];
        assert!((d.evaluate(&t) - t[1].exp()).norm() < 1e-14);
    }

    #[test]
    fn p2_low_degrees() {
        let model = builtin_catalog("P2", 3).unwrap();
        let ns: Vec<_> = p2_coefficients(&model).into_iter().map(|(_, n)| n).collect();
        assert_eq!(ns, vec![q_int(1), q_int(1), q_int(12)]);
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(
            builtin_catalog("P1", 0).unwrap_err(),
            Error::BadTruncation(0)
        );
        assert!(matches!(
            builtin_catalog("P9", 2).unwrap_err(),
            Error::UnknownModel(_)
        ));
    }
}
