//! Primary correlators and the quantum product at a point of the small slice.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::FrobeniusModel;
use crate::numeric::{CMatrix, C64};

/// Small-slice coordinates `t^1..t^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    t: Vec<C64>,
}

impl EvalPoint {
    pub fn new(t: Vec<C64>) -> Result<Self> {
        if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Overflow("point coordinates".into()));
        }
        Ok(Self { t })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            t: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_real(t: &[f64]) -> Self {
        Self {
            t: t.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn coords(&self) -> &[C64] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    /// `t + s·direction`.
    pub fn displaced(&self, direction: &[C64], s: C64) -> EvalPoint {
        EvalPoint {
            t: self.t.iter().zip(direction).map(|(a, d)| a + s * d).collect(),
        }
    }

    pub fn check_dim(&self, model: &FrobeniusModel) -> Result<()> {
        if self.t.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                got: self.t.len(),
            });
        }
        Ok(())
    }
}

/// `∂^k F_0 / ∂t^{α_1}…∂t^{α_k}` at the point (0-based indices).
pub fn correlator(model: &FrobeniusModel, point: &EvalPoint, indices: &[usize]) -> Result<C64> {
    if indices.len() < 2 {
        return Err(Error::TooFewInsertions {
            min: 2,
            got: indices.len(),
        });
    }
    point.check_dim(model)?;
    let mut counts = vec![0u32; model.dim()];
    for &idx in indices {
        if idx >= model.dim() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                dim: model.dim(),
            });
        }
        counts[idx] += 1;
    }
    let value = model.compiled().derivative_at(point.coords(), &counts);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Overflow(format!("correlator {indices:?}")));
    }
    Ok(value)
}

/// Dense symmetric `k`-index array, stored flat in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTensor {
    order: usize,
    dim: usize,
    data: Vec<C64>,
}

impl CorrelatorTensor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, indices: &[usize]) -> C64 {
        debug_assert_eq!(indices.len(), self.order);
        self.data[indices.iter().fold(0, |acc, &i| acc * self.dim + i)]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Contracts the last slot with `v`; the result stays symmetric.
    pub fn contract_last(&self, v: &[C64]) -> CorrelatorTensor {
        let n = self.dim;
        let data = self
            .data
            .chunks(n)
            .map(|chunk| chunk.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        CorrelatorTensor {
            order: self.order - 1,
            dim: n,
            data,
        }
    }

    /// Full contraction with one vector per slot.
    pub fn contract(&self, vectors: &[&[C64]]) -> C64 {
        assert_eq!(vectors.len(), self.order, "one vector per slot");
        let mut t = self.clone();
        for v in vectors.iter().rev() {
            t = t.contract_last(v);
        }
        t.data[0]
    }

    /// Contracts all but the last slot, leaving a covector.
    pub fn contract_all_but_last(&self, vectors: &[&[C64]]) -> Vec<C64> {
        assert_eq!(vectors.len() + 1, self.order);
        let n = self.dim;
        (0..n)
            .map(|a| {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[a] = C64::new(1.0, 0.0);
                let mut all: Vec<&[C64]> = vectors.to_vec();
                all.push(&e);
                self.contract(&all)
            })
            .collect()
    }
}

/// All `k`-th derivatives at the point, `2 ≤ k ≤ 6`.
pub fn correlator_tensor(
    model: &FrobeniusModel,
    point: &EvalPoint,
    k: usize,
) -> Result<CorrelatorTensor> {
    if !(2..=6).contains(&k) {
        return Err(Error::TensorOrder(k));
    }
    point.check_dim(model)?;
    let n = model.dim();
    let total = n.pow(k as u32);
    let mut data = vec![C64::new(0.0, 0.0); total];
    let mut cache = std::collections::HashMap::new();
    let mut counts = vec![0u32; n];
    for (flat, slot) in data.iter_mut().enumerate() {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut rest = flat;
        for _ in 0..k {
            counts[rest % n] += 1;
            rest /= n;
        }
        let value = match cache.get(&counts) {
            Some(&v) => v,
            None => {
                let v = model.compiled().derivative_at(point.coords(), &counts);
                cache.insert(counts.clone(), v);
                v
            }
        };
        *slot = value;
    }
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Overflow(format!("{k}-point tensor")));
    }
    Ok(CorrelatorTensor { order: k, dim: n, data })
}

/// Structure constants `c_{αβ}^μ` of the quantum product at one point.
#[derive(Debug, Clone)]
pub struct QuantumProduct {
    dim: usize,
    // consts[α][β] is the vector γ_α∘γ_β
    consts: Vec<Vec<Vec<C64>>>,
}

impl QuantumProduct {
    pub fn at(model: &FrobeniusModel, point: &EvalPoint) -> Result<Self> {
        let c3 = correlator_tensor(model, point, 3)?;
        Ok(Self::from_tensor(&c3, model.eta_inv()))
    }

    pub fn from_tensor(c3: &CorrelatorTensor, eta_inv: &CMatrix) -> Self {
        let n = c3.dim();
        let consts = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|mu| (0..n).map(|nu| c3.get(&[a, b, nu]) * eta_inv[(nu, mu)]).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { dim: n, consts }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_product(&self, a: usize, b: usize) -> &[C64] {
        &self.consts[a][b]
    }

    pub fn product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (alpha, &x) in a.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (beta, &y) in b.iter().enumerate() {
                let w = x * y;
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(&self.consts[alpha][beta]) {
                    *o += w * c;
                }
            }
        }
        out
    }

    /// Matrix of `v ↦ a∘v`; column `β` is `a∘γ_β`.
    pub fn multiplication_matrix(&self, a: &[C64]) -> CMatrix {
        let n = self.dim;
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for beta in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[beta] = C64::new(1.0, 0.0);
            let col = self.product(a, &e);
            for mu in 0..n {
                m[(mu, beta)] = col[mu];
            }
        }
        m
    }
}

pub fn quantum_product(
    model: &FrobeniusModel,
    point: &EvalPoint,
    a: &[C64],
    b: &[C64],
) -> Result<Vec<C64>> {
    Ok(QuantumProduct::at(model, point)?.product(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_catalog;
    use crate::numeric::{c, unit_vector};

    #[test]
    fn p1_origin_values() {
        let m = builtin_catalog("P1", 1).unwrap();
        let p = EvalPoint::origin(2);
        assert_eq!(correlator(&m, &p, &[1, 1, 1]).unwrap(), c(1.0));
        assert_eq!(correlator(&m, &p, &[0, 0, 1]).unwrap(), c(1.0));
        assert_eq!(correlator(&m, &p, &[0, 0, 0]).unwrap(), c(0.0));
        assert_eq!(correlator(&m, &p, &[0, 1, 1, 1]).unwrap(), c(0.0));
        assert!(matches!(
            correlator(&m, &p, &[1]),
            Err(Error::TooFewInsertions { .. })
        ));
        let t5 = correlator_tensor(&m, &p, 5).unwrap();
        for (flat, v) in t5.data().iter().enumerate() {
            let expected = if flat == 31 { 1.0 } else { 0.0 };
            assert_eq!(*v, c(expected));
        }
        assert!(matches!(
            correlator_tensor(&m, &p, 7),
            Err(Error::TensorOrder(7))
        ));
    }

    #[test]
    fn unit_and_square() {
        let m = builtin_catalog("P1", 1).unwrap();
        let p = EvalPoint::origin(2);
        let q = QuantumProduct::at(&m, &p).unwrap();
        assert_eq!(q.product(&unit_vector(2, 1), &unit_vector(2, 1)), vec![c(1.0), c(0.0)]);
        let v = [C64::new(0.3, 1.0), C64::new(-2.0, 0.5)];
        assert_eq!(q.product(&unit_vector(2, 0), &v), v.to_vec());
    }

    #[test]
    fn tensor_contraction_matches_entries() {
        let m = builtin_catalog("P2", 2).unwrap();
        let p = EvalPoint::from_real(&[0.0, 0.1, 0.2]);
        let t4 = correlator_tensor(&m, &p, 4).unwrap();
        let e: Vec<Vec<C64>> = (0..3).map(|k| unit_vector(3, k)).collect();
        let direct = correlator(&m, &p, &[2, 1, 2, 0]).unwrap();
        assert_eq!(t4.contract(&[&e[2], &e[1], &e[2], &e[0]]), direct);
    }
}
