//! Associativity of the quantum product at sample points.

use serde::Serialize;

use super::FrobeniusModel;
use crate::calculus::{EvalPoint, QuantumProduct};
use crate::error::Result;
use crate::numeric::unit_vector;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WdvvReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub worst_point: Option<usize>,
    pub tol: f64,
    pub pass: bool,
}

/// `max |(γ_α∘γ_β)∘γ_μ − γ_α∘(γ_β∘γ_μ)|` over all indices and components.
pub fn wdvv_residual(model: &FrobeniusModel, point: &EvalPoint) -> Result<f64> {
    let q = QuantumProduct::at(model, point)?;
    let n = model.dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for m in 0..n {
                let left = q.product(q.basis_product(a, b), &unit_vector(n, m));
                let right = q.product(&unit_vector(n, a), q.basis_product(b, m));
                for (x, y) in left.iter().zip(&right) {
                    worst = worst.max((x - y).norm());
                }
            }
        }
    }
    Ok(worst)
}

pub fn validate_wdvv(model: &FrobeniusModel, points: &[EvalPoint], tol: f64) -> Result<WdvvReport> {
    let residuals = points
        .iter()
        .map(|p| wdvv_residual(model, p))
        .collect::<Result<Vec<_>>>()?;
    let mut max_residual = 0.0f64;
    let mut worst_point = None;
    for (k, &r) in residuals.iter().enumerate() {
        if worst_point.is_none() || r > max_residual {
            max_residual = r;
            worst_point = Some(k);
        }
    }
    Ok(WdvvReport {
        pass: max_residual <= tol,
        residuals,
        max_residual,
        worst_point,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_catalog;

    #[test]
    fn line_is_exactly_associative() {
        let m = builtin_catalog("P1", 1).unwrap();
        assert_eq!(wdvv_residual(&m, &EvalPoint::origin(2)).unwrap(), 0.0);
    }

    #[test]
    fn plane_truncation_effect() {
        let p = EvalPoint::from_real(&[0.0, 0.0, 0.5]);
        let low = builtin_catalog("P2", 1).unwrap();
        let high = builtin_catalog("P2", 6).unwrap();
        let r_low = wdvv_residual(&low, &p).unwrap();
        let r_high = wdvv_residual(&high, &p).unwrap();
        assert!(r_low > 1e-3, "{r_low}");
        assert!(r_high < 1e-8, "{r_high}");
    }
}
