//! Canonical idempotent frames and rotation coefficients.

mod derivative;
mod fields;
mod matching;

use nalgebra::Schur;

use crate::calculus::{correlator_tensor, CorrelatorTensor, EvalPoint, QuantumProduct};
use crate::error::{Error, Result};
use crate::model::FrobeniusModel;
use crate::numeric::{bilinear, unit_vector, CMatrix, C64};

pub use derivative::{
    combine_rates, directional_derivative, directional_derivative_from, directional_derivative_with,
    frame_rates, FdEstimate, FrameRates, Quantity,
};
pub use fields::{euler_field, f_vector, gstar, gstar_primary, FieldRoutes, GStarRoutes};
pub use matching::{match_frames, relabel, FrameMatch};

#[derive(Debug, Clone)]
pub enum BranchPolicy {
    /// Principal square roots, eigenvalues sorted.
    Principal,
    /// Labels and square-root signs continued from a nearby frame.
    ContinueFrom(Box<CanonicalFrame>),
}

#[derive(Debug, Clone)]
pub struct FrameOptions {
    pub tol_frame: f64,
    /// Relative: a point is rejected when `min |u_i − u_j| ≤ tol_semisimple · max |u|`.
    pub tol_semisimple: f64,
    pub tol_cross: f64,
    pub branch: BranchPolicy,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            tol_frame: 1e-9,
            tol_semisimple: 1e-8,
            tol_cross: 1e-10,
            branch: BranchPolicy::Principal,
        }
    }
}

impl FrameOptions {
    pub fn continuing(reference: &CanonicalFrame) -> Self {
        Self {
            branch: BranchPolicy::ContinueFrom(Box::new(reference.clone())),
            ..Self::default()
        }
    }
}

/// Frame data at one point. Row `i` of `j` holds the components of `E_i`.
#[derive(Debug, Clone)]
pub struct CanonicalFrame {
    pub point: EvalPoint,
    pub j: CMatrix,
    pub u: Vec<C64>,
    pub g: Vec<C64>,
    pub sqrt_g: Vec<C64>,
    pub psi: CMatrix,
    pub v: CMatrix,
    pub gamma: CMatrix,
}

impl CanonicalFrame {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn idempotent(&self, i: usize) -> Vec<C64> {
        self.j.row(i).iter().copied().collect()
    }

    pub fn idempotents(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|i| self.idempotent(i)).collect()
    }

    pub fn r(&self, i: usize, k: usize) -> C64 {
        self.gamma[(i, k)]
    }

    pub fn min_gap(&self) -> f64 {
        min_gap(&self.u)
    }
}

fn min_gap(u: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for a in 0..u.len() {
        for b in a + 1..u.len() {
            gap = gap.min((u[a] - u[b]).norm());
        }
    }
    gap
}

/// Descending real part, then descending imaginary part; near-equal real
/// parts are compared by imaginary part.
fn order_eigenvalues(u: &mut [C64]) {
    let scale = u.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    u.sort_by(|a, b| {
        if (a.re - b.re).abs() > 1e-9 * scale {
            b.re.total_cmp(&a.re)
        } else {
            b.im.total_cmp(&a.im)
        }
    });
}

fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Newton step towards the nearest idempotent: `E ← 3E² − 2E³`.
fn polish(q: &QuantumProduct, e: &[C64]) -> Vec<C64> {
    let e2 = q.product(e, e);
    let e3 = q.product(&e2, e);
    e2.iter().zip(&e3).map(|(a, b)| 3.0 * a - 2.0 * b).collect()
}

/// Tensors reused by several frame computations at the same point.
#[derive(Debug, Clone)]
pub struct PointTensors {
    pub c3: CorrelatorTensor,
    pub c4: CorrelatorTensor,
    pub product: QuantumProduct,
}

impl PointTensors {
    pub fn at(model: &FrobeniusModel, point: &EvalPoint) -> Result<Self> {
        let c3 = correlator_tensor(model, point, 3)?;
        let c4 = correlator_tensor(model, point, 4)?;
        let product = QuantumProduct::from_tensor(&c3, model.eta_inv());
        Ok(Self { c3, c4, product })
    }
}

pub fn canonical_frame(
    model: &FrobeniusModel,
    point: &EvalPoint,
    opts: &FrameOptions,
) -> Result<CanonicalFrame> {
    point.check_dim(model)?;
    let tensors = PointTensors::at(model, point)?;
    let frame = principal_frame(model, point, &tensors, opts)?;
    match &opts.branch {
        BranchPolicy::Principal => Ok(frame),
        BranchPolicy::ContinueFrom(reference) => Ok(match_frames(reference, &frame)?.frame),
    }
}

fn principal_frame(
    model: &FrobeniusModel,
    point: &EvalPoint,
    tensors: &PointTensors,
    opts: &FrameOptions,
) -> Result<CanonicalFrame> {
    let n = model.dim();
    let q = &tensors.product;
    let x = euler_field(model, point);
    let m = q.multiplication_matrix(&x);

    let mut u = eigenvalues(&m)?;
    let scale = u.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let tol = opts.tol_semisimple * scale;
    let gap = min_gap(&u);
    if !(gap > tol) {
        return Err(Error::NonSemisimple { gap, tol });
    }
    order_eigenvalues(&mut u);

    // Lagrange projectors applied to the unit give the idempotents directly.
    let unit = unit_vector(n, 0);
    let mut j = CMatrix::zeros(n, n);
    for i in 0..n {
        let mut e = unit.clone();
        for k in 0..n {
            if k == i {
                continue;
            }
            let me = crate::numeric::mat_vec(&m, &e);
            let denom = u[i] - u[k];
            e = me.iter().zip(&e).map(|(a, b)| (a - u[k] * b) / denom).collect();
        }
        let ee = q.product(&e, &e);
        let norm2: f64 = e.iter().map(|z| z.norm_sqr()).sum();
        let lambda: C64 = ee.iter().zip(&e).map(|(a, b)| a * b.conj()).sum::<C64>() / norm2;
        if !(lambda.norm() > 1e-12) || !norm2.is_finite() {
            return Err(Error::ZeroNorm(i));
        }
        e.iter_mut().for_each(|z| *z /= lambda);
        for _ in 0..2 {
            e = polish(q, &e);
        }
        for (col, z) in e.iter().enumerate() {
            j[(i, col)] = *z;
        }
    }

    assemble(model, point.clone(), j, u, tensors)
}

/// Builds `g, √g, ψ, V, Γ` from idempotents and eigenvalues.
fn assemble(
    model: &FrobeniusModel,
    point: EvalPoint,
    j: CMatrix,
    u: Vec<C64>,
    tensors: &PointTensors,
) -> Result<CanonicalFrame> {
    let n = model.dim();
    let eta = model.eta();
    let rows: Vec<Vec<C64>> = (0..n).map(|i| j.row(i).iter().copied().collect()).collect();
    let g: Vec<C64> = rows.iter().map(|e| bilinear(eta, e, e)).collect();
    for (i, gi) in g.iter().enumerate() {
        if !(gi.norm() > 1e-300) {
            return Err(Error::ZeroNorm(i));
        }
    }
    let sqrt_g: Vec<C64> = g.iter().map(|gi| gi.sqrt()).collect();

    let lowered = &j * eta;
    let psi = CMatrix::from_fn(n, n, |i, a| lowered[(i, a)] / sqrt_g[i]);
    let shift = CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            C64::new(model.b_f64()[a] - 0.5, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = &psi * shift * model.eta_inv() * psi.transpose();

    let mut gamma = CMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            gamma[(i, k)] = if i == k {
                let e = &rows[i];
                -tensors.c4.contract(&[e, e, e, e]) / g[i]
            } else {
                v[(i, k)] / (u[k] - u[i])
            };
        }
    }
    Ok(CanonicalFrame {
        point,
        j,
        u,
        g,
        sqrt_g,
        psi,
        v,
        gamma,
    })
}

/// `Γ` from four-point functions only: `r_ij = −⟨⟨E_j E_i E_i E_i⟩⟩/(√g_i √g_j)`
/// off the diagonal and `r_ii = −⟨⟨E_i E_i E_i E_i⟩⟩/g_i`.
pub fn rotation_four_point(model: &FrobeniusModel, frame: &CanonicalFrame) -> Result<CMatrix> {
    let c4 = correlator_tensor(model, &frame.point, 4)?;
    let n = frame.dim();
    let e = frame.idempotents();
    Ok(CMatrix::from_fn(n, n, |i, k| {
        let value = c4.contract(&[&e[k], &e[i], &e[i], &e[i]]);
        if i == k {
            -value / frame.g[i]
        } else {
            -value / (frame.sqrt_g[i] * frame.sqrt_g[k])
        }
    }))
}

/// Largest entrywise gap between the stored `Γ` and the four-point route.
pub fn rotation_cross_check(model: &FrobeniusModel, frame: &CanonicalFrame) -> Result<f64> {
    let four = rotation_four_point(model, frame)?;
    Ok(frame
        .gamma
        .iter()
        .zip(four.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_catalog;
    use crate::numeric::{c, I};

    fn p1_origin() -> (FrobeniusModel, CanonicalFrame) {
        let m = builtin_catalog("P1", 1).unwrap();
        let f = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap();
        (m, f)
    }

    #[test]
    fn p1_golden_frame() {
        let (m, f) = p1_origin();
        let close = |a: C64, b: C64| (a - b).norm() < 1e-12;
        assert!(close(f.u[0], c(2.0)) && close(f.u[1], c(-2.0)));
        assert!(close(f.g[0], c(0.5)) && close(f.g[1], c(-0.5)));
        assert!(close(f.j[(0, 0)], c(0.5)) && close(f.j[(0, 1)], c(0.5)));
        assert!(close(f.j[(1, 0)], c(0.5)) && close(f.j[(1, 1)], c(-0.5)));
        assert!(close(f.gamma[(0, 1)], -I / 8.0));
        assert!(close(f.gamma[(0, 0)], c(-0.125)));
        assert!(close(f.gamma[(1, 1)], c(0.125)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(f.psi[(0, 0)], c(s)) && close(f.psi[(0, 1)], c(s)));
        assert!(close(f.psi[(1, 0)], I * s) && close(f.psi[(1, 1)], -I * s));
        assert!(rotation_cross_check(&m, &f).unwrap() < 1e-12);
    }

    #[test]
    fn degenerate_point_is_rejected() {
        let m = builtin_catalog("poly2d", 1).unwrap();
        let err = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonSemisimple { .. }));
    }

    #[test]
    fn plane_frame_is_consistent() {
        let m = builtin_catalog("P2", 5).unwrap();
        let p = EvalPoint::from_real(&[0.0, 0.1, 0.1]);
        let f = canonical_frame(&m, &p, &FrameOptions::default()).unwrap();
        assert!(rotation_cross_check(&m, &f).unwrap() < 1e-10);
        for i in 0..3 {
            for k in 0..3 {
                assert!((f.gamma[(i, k)] - f.gamma[(k, i)]).norm() < 1e-10);
            }
        }
    }
}
