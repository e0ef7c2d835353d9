//! Genus-1 one-point functions in the canonical frame, the genus-0 tensor
//! `G_0`, Getzler's relation along idempotents, and the `L_1` check.

use itertools::Itertools;

use crate::calculus::{correlator_tensor, CorrelatorTensor, EvalPoint};
use crate::calculus::QuantumProduct;
use crate::descendants::{bar, t_op, Expr, Reducer};
use crate::error::Result;
use crate::frame::{
    directional_derivative_from, directional_derivative_with, euler_field, CanonicalFrame, Quantity,
};
use crate::model::FrobeniusModel;
use crate::numeric::{axpy, mat_vec, max_abs_diff, unit_vector, CMatrix, C64};

/// `φ_i = ⟨⟨E_i⟩⟩_1` from
/// `24 φ_i = 12 Σ_j (u_i − u_j) r_ij² − Σ_j (√g_i/√g_j) r_ij`.
pub fn phi(frame: &CanonicalFrame) -> Vec<C64> {
    let n = frame.dim();
    (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                let r = frame.gamma[(i, j)];
                acc += 12.0 * (frame.u[i] - frame.u[j]) * r * r;
                acc -= frame.sqrt_g[i] / frame.sqrt_g[j] * r;
            }
            acc / 24.0
        })
        .collect()
}

/// `φ` together with the genus-0 route used as a cross-check.
#[derive(Debug, Clone)]
pub struct GenusOneData {
    pub phi: Vec<C64>,
    pub phi_genus0: Vec<C64>,
    pub cross_residual: f64,
}

pub fn genus_one_data(model: &FrobeniusModel, frame: &CanonicalFrame) -> Result<GenusOneData> {
    let phi = phi(frame);
    let phi_genus0 = phi_from_genus0(model, frame)?;
    let cross_residual = phi
        .iter()
        .zip(&phi_genus0)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Ok(GenusOneData {
        phi,
        phi_genus0,
        cross_residual,
    })
}

/// Correlator tensors of orders 3, 4, 5 and their `γ_β γ^β` traces.
pub struct G0Context {
    dim: usize,
    eta_inv: CMatrix,
    c4: CorrelatorTensor,
    c5: CorrelatorTensor,
    /// `Σ_β ⟨⟨γ_α γ_β γ^β⟩⟩`
    trace3: Vec<C64>,
    /// `Σ_β ⟨⟨γ_α γ_μ γ_β γ^β⟩⟩`
    trace4: CMatrix,
}

impl G0Context {
    pub fn new(model: &FrobeniusModel, point: &EvalPoint) -> Result<Self> {
        let n = model.dim();
        let eta_inv = model.eta_inv().clone();
        let c3 = correlator_tensor(model, point, 3)?;
        let c4 = correlator_tensor(model, point, 4)?;
        let c5 = correlator_tensor(model, point, 5)?;
        let trace3 = (0..n)
            .map(|a| {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..n {
                    for r in 0..n {
                        acc += c3.get(&[a, b, r]) * eta_inv[(b, r)];
                    }
                }
                acc
            })
            .collect();
        let trace4 = CMatrix::from_fn(n, n, |a, m| {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                for r in 0..n {
                    acc += c4.get(&[a, m, b, r]) * eta_inv[(b, r)];
                }
            }
            acc
        });
        Ok(Self {
            dim: n,
            eta_inv,
            c4,
            c5,
            trace3,
            trace4,
        })
    }

    /// The symmetrized sum over all 24 orderings of the four slots.
    pub fn g0(&self, v: [&[C64]; 4]) -> C64 {
        let n = self.dim;
        let mut total = C64::new(0.0, 0.0);
        for g in (0..4).permutations(4) {
            let (a, b, c, d) = (v[g[0]], v[g[1]], v[g[2]], v[g[3]]);

            let low = self.c4.contract_all_but_last(&[a, b, c]);
            let up = mat_vec(&self.eta_inv, &low);
            let t4d = mat_vec(&self.trace4, d);
            let first: C64 = up.iter().zip(&t4d).map(|(x, y)| x * y).sum();

            let low5 = self.c5.contract_all_but_last(&[a, b, c, d]);
            let up5 = mat_vec(&self.eta_inv, &low5);
            let second: C64 = up5.iter().zip(&self.trace3).map(|(x, y)| x * y).sum();

            let left = self.c4.contract_last(b).contract_last(a);
            let right = self.c4.contract_last(d).contract_last(c);
            let left_up = &self.eta_inv * to_matrix(&left, n) * &self.eta_inv;
            let right_m = to_matrix(&right, n);
            let third: C64 = left_up
                .iter()
                .zip(right_m.iter())
                .map(|(x, y)| x * y)
                .sum();

            total += first / 6.0 + second / 24.0 - third / 4.0;
        }
        total
    }
}

fn to_matrix(t: &CorrelatorTensor, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |a, b| t.get(&[a, b]))
}

pub fn g0_tensor(
    model: &FrobeniusModel,
    point: &EvalPoint,
    v1: &[C64],
    v2: &[C64],
    v3: &[C64],
    v4: &[C64],
) -> Result<C64> {
    Ok(G0Context::new(model, point)?.g0([v1, v2, v3, v4]))
}

/// `φ_i = (1/24)(⟨⟨E_i τ_−(L_0) γ_α γ^α⟩⟩ − G_0(E_i, E_i, E_i, X̄))`.
pub fn phi_from_genus0(model: &FrobeniusModel, frame: &CanonicalFrame) -> Result<Vec<C64>> {
    let n = model.dim();
    let reducer = Reducer::new(model, &frame.point, Some(frame))?;
    let x_bar = reducer.expand(&bar(Expr::X))?.primary_part()?;
    let ctx = G0Context::new(model, &frame.point)?;
    let eta_inv = model.eta_inv();
    let l0_minus = Expr::L0.tau_minus();
    (0..n)
        .map(|i| {
            let mut contracted = C64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    let w = eta_inv[(a, b)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    contracted += w * reducer.correlator(&[
                        Expr::idempotent(i),
                        l0_minus.clone(),
                        Expr::gamma(a),
                        Expr::gamma(b),
                    ])?;
                }
            }
            let e = frame.idempotent(i);
            let g0 = ctx.g0([&e, &e, &e, &x_bar]);
            Ok((contracted - g0) / 24.0)
        })
        .collect()
}

/// Both sides of `E_j φ_i = (1/24) G_0(E_i, E_i, E_i, E_j)`.
#[derive(Debug, Clone)]
pub struct GetzlerCheck {
    pub derivative: C64,
    pub g0_side: C64,
    pub fd_error: f64,
    pub residual: f64,
}

pub fn getzler_check(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    i: usize,
    j: usize,
    h: f64,
) -> Result<GetzlerCheck> {
    let ctx = G0Context::new(model, &frame.point)?;
    getzler_check_with(model, frame, &ctx, i, j, h)
}

pub fn getzler_check_with(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    ctx: &G0Context,
    i: usize,
    j: usize,
    h: f64,
) -> Result<GetzlerCheck> {
    let fd = directional_derivative_from(model, frame, &frame.idempotent(j), Quantity::Phi, h)?;
    let e_i = frame.idempotent(i);
    let e_j = frame.idempotent(j);
    let g0_side = ctx.g0([&e_i, &e_i, &e_i, &e_j]) / 24.0;
    let derivative = fd.value[i];
    Ok(GetzlerCheck {
        derivative,
        g0_side,
        fd_error: fd.error,
        residual: (derivative - g0_side).norm(),
    })
}

#[derive(Debug, Clone)]
pub struct VirasoroCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    /// `|Σ 6(u_i+u_j)(u_i−u_j)² r_ij² − Σ 12 u_i²(u_i−u_j) r_ij²|`
    pub symmetrization_residual: f64,
}

/// `24 Σ u_i² φ_i` against `Σ_{i,j} [6(u_i+u_j)(u_i−u_j)² r_ij² − u_i² r_ij √g_i/√g_j]`.
pub fn virasoro_l1_check(frame: &CanonicalFrame) -> VirasoroCheck {
    let n = frame.dim();
    let u = &frame.u;
    let phi = phi(frame);
    let lhs: C64 = 24.0 * (0..n).map(|i| u[i] * u[i] * phi[i]).sum::<C64>();
    let mut rhs = C64::new(0.0, 0.0);
    let mut sym_left = C64::new(0.0, 0.0);
    let mut sym_right = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let r = frame.gamma[(i, j)];
            let d = u[i] - u[j];
            sym_left += 6.0 * (u[i] + u[j]) * d * d * r * r;
            sym_right += 12.0 * u[i] * u[i] * d * r * r;
            rhs -= u[i] * u[i] * r * frame.sqrt_g[i] / frame.sqrt_g[j];
        }
    }
    rhs += sym_left;
    VirasoroCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        symmetrization_residual: (sym_left - sym_right).norm(),
    }
}

/// `⟨⟨γ_α⟩⟩_1 = Σ_i (ψ_iα/√g_i) φ_i`.
pub fn genus1_onepoint(frame: &CanonicalFrame, alpha: usize) -> C64 {
    genus1_primary(frame, &crate::numeric::unit_vector(frame.dim(), alpha))
}

/// `⟨⟨v⟩⟩_1` for a primary field `v = Σ v^α γ_α`.
pub fn genus1_primary(frame: &CanonicalFrame, v: &[C64]) -> C64 {
    let phi = phi(frame);
    let n = frame.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let c: C64 = (0..n)
            .map(|a| v[a] * frame.psi[(i, a)] / frame.sqrt_g[i])
            .sum();
        acc += c * phi[i];
    }
    acc
}

/// `⟨⟨W⟩⟩_1` through the standard decomposition
/// `⟨⟨W⟩⟩_1 = ⟨⟨W̄⟩⟩_1 + (1/24) ⟨⟨τ_−(W) γ^μ γ_μ⟩⟩`.
pub fn genus1_expr(model: &FrobeniusModel, frame: &CanonicalFrame, w: &Expr) -> Result<C64> {
    let reducer = Reducer::new(model, &frame.point, Some(frame))?;
    let w_bar = reducer.expand(&bar(w.clone()))?.primary_part()?;
    let primary = genus1_primary(frame, &w_bar);
    let lowered = w.clone().tau_minus();
    if reducer.expand(&lowered)?.is_zero() {
        return Ok(primary);
    }
    let n = model.dim();
    let eta_inv = model.eta_inv();
    let mut trr = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let weight = eta_inv[(a, b)];
            if weight == C64::new(0.0, 0.0) {
                continue;
            }
            trr += weight * reducer.correlator(&[lowered.clone(), Expr::gamma(a), Expr::gamma(b)])?;
        }
    }
    Ok(primary + trr / 24.0)
}

/// `|E_j φ_i − E_i φ_j|` by finite differences.
pub fn integrability_residual(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    h: f64,
) -> Result<f64> {
    let n = frame.dim();
    let derivs: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            directional_derivative_from(model, frame, &frame.idempotent(j), Quantity::Phi, h)
                .map(|d| d.value)
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((derivs[j][i] - derivs[i][j]).norm());
        }
    }
    Ok(worst)
}

fn trace_correlator(model: &FrobeniusModel, point: &EvalPoint, fixed: &[&[C64]]) -> Result<C64> {
    let k = fixed.len() + 2;
    let t = correlator_tensor(model, point, k)?;
    let mut rest = t;
    for v in fixed.iter().rev() {
        rest = rest.contract_last(v);
    }
    let eta_inv = model.eta_inv();
    let n = model.dim();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            acc += rest.get(&[a, b]) * eta_inv[(a, b)];
        }
    }
    Ok(acc)
}

/// `|γ_b⟨⟨T(γ_a)⟩⟩_1 − (1/24)⟨⟨γ_a γ_b γ^μ γ_μ⟩⟩|`, where the left side is a
/// finite difference of the decomposition route. On the slice this is the
/// first derivative of the genus-1 recursion after removing the covariant
/// term `⟨⟨γ_a∘γ_b⟩⟩_1` from both sides.
pub fn trr_derivative_check(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    a: usize,
    b: usize,
    h: f64,
) -> Result<f64> {
    let n = model.dim();
    let w = t_op(Expr::gamma(a));
    let dir = unit_vector(n, b);
    let fd = directional_derivative_with(model, frame, &dir, h, |f| {
        Ok(vec![genus1_expr(model, f, &w)?])
    })?;
    let ga = unit_vector(n, a);
    let rhs = trace_correlator(model, &frame.point, &[&ga, &dir])? / 24.0;
    Ok((fd.value[0] - rhs).norm())
}

/// Residuals of `X̄√g_i = Σ_j u_j √g_j r_ij` and `X̄ r_ij = −r_ij` (i ≠ j).
pub fn euler_lemma_residuals(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    h: f64,
) -> Result<(f64, f64)> {
    let n = frame.dim();
    let x = euler_field(model, &frame.point);
    let dsq = directional_derivative_from(model, frame, &x, Quantity::SqrtG, h)?;
    let dr = directional_derivative_from(model, frame, &x, Quantity::Gamma, h)?;
    let mut sq = 0.0f64;
    let mut rr = 0.0f64;
    for i in 0..n {
        let expected: C64 = (0..n)
            .map(|j| frame.u[j] * frame.sqrt_g[j] * frame.gamma[(i, j)])
            .sum();
        sq = sq.max((dsq.value[i] - expected).norm());
        for j in 0..n {
            if i != j {
                rr = rr.max((dr.value[i * n + j] + frame.gamma[(i, j)]).norm());
            }
        }
    }
    Ok((sq, rr))
}

/// `Q(γ_α, γ^α, …) = Σ_i Q(E_i, E_i, …)/g_i` for the 3- and 4-point tensors,
/// plus `Δ = Σ_i E_i/g_i`.
pub fn contraction_residual(model: &FrobeniusModel, frame: &CanonicalFrame) -> Result<f64> {
    let n = model.dim();
    let q = QuantumProduct::at(model, &frame.point)?;
    let eta_inv = model.eta_inv();
    let mut delta = vec![C64::new(0.0, 0.0); n];
    for a in 0..n {
        for b in 0..n {
            let w = eta_inv[(a, b)];
            if w != C64::new(0.0, 0.0) {
                axpy(w, q.basis_product(a, b), &mut delta);
            }
        }
    }
    let mut idem = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        axpy(C64::new(1.0, 0.0) / frame.g[i], &frame.idempotent(i), &mut idem);
    }
    let mut worst = max_abs_diff(&delta, &idem);
    let c3 = correlator_tensor(model, &frame.point, 3)?;
    let c4 = correlator_tensor(model, &frame.point, 4)?;
    for m in 0..n {
        let gm = unit_vector(n, m);
        let lhs = trace_correlator(model, &frame.point, &[&gm])?;
        let rhs: C64 = (0..n)
            .map(|i| {
                let e = frame.idempotent(i);
                c3.contract(&[&e, &e, &gm]) / frame.g[i]
            })
            .sum();
        worst = worst.max((lhs - rhs).norm());
        for l in 0..n {
            let gl = unit_vector(n, l);
            let lhs = trace_correlator(model, &frame.point, &[&gm, &gl])?;
            let rhs: C64 = (0..n)
                .map(|i| {
                    let e = frame.idempotent(i);
                    c4.contract(&[&e, &e, &gm, &gl]) / frame.g[i]
                })
                .sum();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_frame, FrameOptions};
    use crate::model::builtin_catalog;
    use crate::numeric::c;

    #[test]
    fn line_at_origin() {
        let m = builtin_catalog("P1", 1).unwrap();
        let f = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap();
        let p = phi(&f);
        assert!((p[0] - c(-1.0 / 48.0)).norm() < 1e-14);
        assert!((p[1] - c(1.0 / 48.0)).norm() < 1e-14);
        assert!(genus1_onepoint(&f, 0).norm() < 1e-14);
        assert!((genus1_onepoint(&f, 1) - c(-1.0 / 24.0)).norm() < 1e-14);
        assert!(virasoro_l1_check(&f).residual < 1e-12);
        let data = genus_one_data(&m, &f).unwrap();
        assert!(data.cross_residual < 1e-12, "{}", data.cross_residual);
    }

    fn plane_frame(point: &[f64]) -> (FrobeniusModel, CanonicalFrame) {
        let m = builtin_catalog("P2", 5).unwrap();
        let f = canonical_frame(&m, &EvalPoint::from_real(point), &FrameOptions::default()).unwrap();
        (m, f)
    }

    #[test]
    fn plane_g0_lemma() {
        let (m, f) = plane_frame(&[0.1, -0.2, 0.05]);
        let ctx = G0Context::new(&m, &f.point).unwrap();
        let e: Vec<Vec<C64>> = (0..3).map(|i| f.idempotent(i)).collect();
        for a in 0..3 {
            let w = crate::numeric::unit_vector(3, a);
            assert!(ctx.g0([&w, &e[0], &e[1], &e[2]]).norm() < 1e-9);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let x = ctx.g0([&e[i], &e[i], &e[i], &e[j]]);
                    let y = ctx.g0([&e[i], &e[i], &e[j], &e[j]]);
                    assert!((x + y).norm() < 1e-9, "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn plane_getzler_and_genus0_route() {
        let (m, f) = plane_frame(&[0.1, -0.2, 0.05]);
        for i in 0..3 {
            for j in 0..3 {
                let g = getzler_check(&m, &f, i, j, 1e-4).unwrap();
                assert!(g.residual < 1e-5, "({i},{j}) {g:?}");
            }
        }
        let data = genus_one_data(&m, &f).unwrap();
        assert!(data.cross_residual < 1e-9, "{data:?}");
        let v = virasoro_l1_check(&f);
        assert!(v.residual < 1e-9 && v.symmetrization_residual < 1e-9, "{v:?}");
    }

    #[test]
    fn plane_derived_identities() {
        let (m, f) = plane_frame(&[0.2, 0.1, -0.1]);
        assert!(integrability_residual(&m, &f, 1e-4).unwrap() < 1e-6);
        let (sq, rr) = euler_lemma_residuals(&m, &f, 1e-4).unwrap();
        assert!(sq < 1e-6 && rr < 1e-6, "{sq} {rr}");
        assert!(contraction_residual(&m, &f).unwrap() < 1e-10);
        for a in 0..3 {
            for b in 0..3 {
                let r = trr_derivative_check(&m, &f, a, b, 1e-4).unwrap();
                assert!(r < 1e-5, "({a},{b}) {r}");
            }
        }
    }

    #[test]
    fn desymmetrized_rotation_breaks_virasoro() {
        let (_, mut f) = plane_frame(&[0.1, 0.0, 0.0]);
        f.gamma[(0, 1)] += C64::new(0.3, 0.0);
        assert!(virasoro_l1_check(&f).residual > 1e-3);
    }

    #[test]
    fn t_headed_onepoint_on_the_line() {
        let m = builtin_catalog("P1", 1).unwrap();
        let f = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap();
        let via_decomposition = genus1_expr(&m, &f, &t_op(Expr::gamma(1))).unwrap();
        let c3 = correlator_tensor(&m, &f.point, 3).unwrap();
        let g2 = unit_vector(2, 1);
        let expected: C64 = (0..2)
            .map(|i| {
                let e = f.idempotent(i);
                c3.contract(&[&g2, &e, &e]) / f.g[i]
            })
            .sum::<C64>()
            / 24.0;
        assert!((via_decomposition - expected).norm() < 1e-12);
        assert!((genus1_expr(&m, &f, &Expr::gamma(1)).unwrap() - c(-1.0 / 24.0)).norm() < 1e-12);
    }
}
