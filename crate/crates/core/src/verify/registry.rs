use itertools::iproduct;

use super::context::PointContext;
use crate::descendants::{bar, t_op, Expr, RewriteMode};
use crate::error::Result;
use crate::frame::{combine_rates, euler_field, gstar, rotation_cross_check};
use crate::genus1::{contraction_residual, phi, phi_from_genus0, trr_derivative_check, virasoro_l1_check};
use crate::numeric::{bilinear, max_abs_diff, unit_vector, CMatrix, C64};

pub type Check = fn(&PointContext) -> Result<f64>;

/// A named numerical identity with its formula and default tolerance.
#[derive(Clone, Copy)]
pub struct Identity {
    pub id: &'static str,
    pub anchor: &'static str,
    pub tol: f64,
    pub check: Check,
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("tol", &self.tol)
            .finish()
    }
}

pub const TOL_FRAME: f64 = 1e-9;
pub const TOL_FD: f64 = 1e-6;
pub const TOL_GETZLER: f64 = 1e-5;
pub const TOL_G0: f64 = 1e-9;
pub const TOL_VIRASORO: f64 = 1e-9;
pub const TOL_DESCENDANTS: f64 = 1e-10;
pub const TOL_WDVV: f64 = 1e-8;

/// Identity ids that never need a canonical frame.
pub const FRAMELESS: &[&str] = &["wdvv-associativity"];

macro_rules! identity {
    ($id:expr, $anchor:expr, $tol:expr, $check:expr) => {
        Identity {
            id: $id,
            anchor: $anchor,
            tol: $tol,
            check: $check,
        }
    };
}

pub fn registry() -> Vec<Identity> {
    vec![
        identity!(
            "wdvv-associativity",
            "Σ_{μν} F_{αβμ} η^{μν} F_{νγδ} = Σ_{μν} F_{αγμ} η^{μν} F_{νβδ}",
            TOL_WDVV,
            |c| crate::model::wdvv_residual(c.model, &c.frame.point)
        ),
        identity!("idempotency", "E_i ∘ E_j = δ_ij E_i", TOL_FRAME, idempotency),
        identity!("partition-of-unity", "Σ_i E_i = γ_1", TOL_FRAME, partition_of_unity),
        identity!("euler-eigen", "X ∘ E_i = u_i E_i", TOL_FRAME, euler_eigen),
        identity!("psi-orthogonality", "ψ^T ψ = η", TOL_FRAME, psi_orthogonality),
        identity!("v-antisymmetry", "V^T = −V", TOL_FRAME, |c| {
            Ok(matrix_gap(&c.frame.v, &(-c.frame.v.transpose())))
        }),
        identity!("v-eigenvectors", "V ψ_α = (b_α − ½) ψ_α", TOL_FRAME, v_eigenvectors),
        identity!("gamma-symmetry", "r_ij = r_ji", TOL_FRAME, |c| {
            Ok(matrix_gap(&c.frame.gamma, &c.frame.gamma.transpose()))
        }),
        identity!(
            "gamma-routes",
            "(u_j − u_i) r_ij = V_ij and r_ij = −⟨⟨E_j E_i E_i E_i⟩⟩/√(g_i g_j)",
            TOL_FRAME,
            |c| rotation_cross_check(c.model, c.frame)
        ),
        identity!(
            "three-point-diagonal",
            "⟨⟨E_i E_j E_k⟩⟩ = δ_ij δ_ik g_i",
            TOL_FRAME,
            three_point_diagonal
        ),
        identity!(
            "three-point-basis",
            "⟨⟨γ_α γ_β γ_μ⟩⟩ = Σ_i ψ_iα ψ_iβ ψ_iμ / √g_i",
            TOL_FRAME,
            three_point_basis
        ),
        identity!(
            "four-point-pair",
            "⟨⟨E_j E_i E_i E_i⟩⟩ = −⟨⟨E_j E_j E_i E_i⟩⟩ = −√(g_i g_j) r_ij",
            TOL_FRAME,
            four_point_pair
        ),
        identity!(
            "four-point-distinct",
            "⟨⟨E_i E_j E_k γ_α⟩⟩ = 0 for distinct i, j, k",
            TOL_FRAME,
            four_point_distinct
        ),
        identity!("slice-sum", "Σ_j √g_j r_ij = 0", TOL_FRAME, |c| {
            let f = c.frame;
            Ok((0..c.n()).fold(0.0, |m, i| {
                m.max((0..c.n()).map(|j| f.sqrt_g[j] * f.gamma[(i, j)]).sum::<C64>().norm())
            }))
        }),
        identity!(
            "slice-euler-sum",
            "Σ_j u_j √g_j r_ij = (b_1 − ½) √g_i",
            TOL_FRAME,
            |c| {
                let f = c.frame;
                let b1 = c.model.b_f64()[0];
                Ok((0..c.n()).fold(0.0, |m, i| {
                    let s: C64 = (0..c.n()).map(|j| f.u[j] * f.sqrt_g[j] * f.gamma[(i, j)]).sum();
                    m.max((s - (b1 - 0.5) * f.sqrt_g[i]).norm())
                }))
            }
        ),
        identity!(
            "f-vector-routes",
            "⟨⟨E_i E_i E_i γ^α⟩⟩ γ_α = −Σ_j r_ij √(g_i/g_j) E_j",
            TOL_FRAME,
            |c| {
                let mut worst = 0.0f64;
                for i in 0..c.n() {
                    worst = worst
                        .max(crate::frame::f_vector(c.model, c.frame, i, f64::INFINITY)?.residual);
                }
                Ok(worst)
            }
        ),
        identity!("f-sum", "Σ_i F_i = 0", TOL_FRAME, |c| {
            let f = c.f_vectors()?;
            let mut sum = vec![C64::new(0.0, 0.0); c.n()];
            for v in f {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
            }
            Ok(sum.iter().fold(0.0, |m, z| m.max(z.norm())))
        }),
        identity!(
            "gstar-routes",
            "G*E_i = ½E_i + Σ_j (u_i − u_j) r_ij √(g_i/g_j) E_j = ½E_i − u_i F_i + X∘F_i",
            TOL_FRAME,
            |c| {
                let mut worst = 0.0f64;
                for i in 0..c.n() {
                    worst = worst.max(gstar(c.model, c.frame, i, f64::INFINITY)?.residual);
                }
                Ok(worst)
            }
        ),
        identity!(
            "gstar-pairing",
            "⟨G*v, w⟩ + ⟨v, G*w⟩ = ⟨v, w⟩ and ⟨G*E_i, E_i⟩ = ½ g_i",
            TOL_FRAME,
            gstar_pairing
        ),
        identity!(
            "delta-contraction",
            "Q(γ_α, γ^α, …) = Σ_i Q(E_i, E_i, …)/g_i and Δ = γ_α∘γ^α = Σ_i E_i/g_i",
            TOL_FRAME,
            |c| contraction_residual(c.model, c.frame)
        ),
        // derivative laws
        identity!("canonical-coordinates", "E_j u_i = δ_ij", TOL_FD, |c| {
            let rates = c.along_e()?;
            Ok(iproduct!(0..c.n(), 0..c.n()).fold(0.0, |m, (i, j)| {
                let want = if i == j { 1.0 } else { 0.0 };
                m.max((rates[j].u[i] - want).norm())
            }))
        }),
        identity!(
            "sqrt-g-derivative",
            "E_j √g_i = √g_j r_ij",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                Ok(iproduct!(0..c.n(), 0..c.n()).fold(0.0, |m, (i, j)| {
                    m.max((rates[j].sqrt_g[i] - f.sqrt_g[j] * f.gamma[(i, j)]).norm())
                }))
            }
        ),
        identity!("euler-g", "X g_i = (2b_1 − 1) g_i", TOL_FD, |c| {
            let x = c.along_x()?;
            let b1 = c.model.b_f64()[0];
            Ok((0..c.n()).fold(0.0, |m, i| {
                m.max((x.g[i] - (2.0 * b1 - 1.0) * c.frame.g[i]).norm())
            }))
        }),
        identity!(
            "euler-sqrt-g",
            "X √g_i = Σ_j u_j √g_j r_ij",
            TOL_FD,
            |c| {
                let x = c.along_x()?;
                let f = c.frame;
                Ok((0..c.n()).fold(0.0, |m, i| {
                    let s: C64 = (0..c.n()).map(|j| f.u[j] * f.sqrt_g[j] * f.gamma[(i, j)]).sum();
                    m.max((x.sqrt_g[i] - s).norm())
                }))
            }
        ),
        identity!("euler-r", "X r_ij = −r_ij for i ≠ j", TOL_FD, |c| {
            let x = c.along_x()?;
            Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                m.max((x.gamma[(i, j)] + c.frame.gamma[(i, j)]).norm())
            }))
        }),
        identity!("string-r", "S r_ij = 0 for i ≠ j", TOL_FD, |c| {
            let rates = c.along_e()?;
            Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                m.max(rates.iter().map(|r| r.gamma[(i, j)]).sum::<C64>().norm())
            }))
        }),
        identity!("idempotent-bracket", "[E_i, E_j] = 0", TOL_FD, |c| {
            let rates = c.along_e()?;
            let n = c.n();
            Ok(iproduct!(0..n, 0..n, 0..n).fold(0.0, |m, (i, j, a)| {
                m.max((rates[i].j[(j, a)] - rates[j].j[(i, a)]).norm())
            }))
        }),
        identity!(
            "idempotent-connection",
            "∇_{E_j} E_i = δ_ij F_j − F_j∘E_i − F_i∘E_j",
            TOL_FD,
            idempotent_connection
        ),
        identity!(
            "rotation-triple",
            "E_k r_ij = r_ik r_jk for distinct i, j, k",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let r = &c.frame.gamma;
                let n = c.n();
                Ok(iproduct!(0..n, 0..n, 0..n)
                    .filter(|(i, j, k)| i != j && j != k && i != k)
                    .fold(0.0, |m, (i, j, k)| {
                        m.max((rates[k].gamma[(i, j)] - r[(i, k)] * r[(j, k)]).norm())
                    }))
            }
        ),
        identity!(
            "rotation-own",
            "E_i r_ij = (r_ij + Σ_{k≠i,j} (u_k − u_j) r_ik r_jk)/(u_j − u_i)",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                    m.max((rates[i].gamma[(i, j)] - rotation_own(f, i, j)).norm())
                }))
            }
        ),
        identity!(
            "rotation-diagonal-cross",
            "E_j r_ii = r_ij² + √(g_j/g_i) (E_i r_ij − r_ii r_ij)",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                let r = &f.gamma;
                Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                    let want = r[(i, j)] * r[(i, j)]
                        + f.sqrt_g[j] / f.sqrt_g[i]
                            * (rates[i].gamma[(i, j)] - r[(i, i)] * r[(i, j)]);
                    m.max((rates[j].gamma[(i, i)] - want).norm())
                }))
            }
        ),
        identity!(
            "rotation-diagonal-own",
            "E_i r_ii = −r_ii² − Σ_{j≠i} {2 r_ij² + √(g_j/g_i) r_ij r_jj − √(g_j/g_i) E_j r_ij}",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                let r = &f.gamma;
                Ok((0..c.n()).fold(0.0, |m, i| {
                    let mut want = -r[(i, i)] * r[(i, i)];
                    for j in (0..c.n()).filter(|&j| j != i) {
                        let w = f.sqrt_g[j] / f.sqrt_g[i];
                        want -= 2.0 * r[(i, j)] * r[(i, j)] + w * r[(i, j)] * r[(j, j)]
                            - w * rates[j].gamma[(i, j)];
                    }
                    m.max((rates[i].gamma[(i, i)] - want).norm())
                }))
            }
        ),
        identity!("v-derivative", "E_k V = [V, [E_k, Γ]]", TOL_FD, |c| {
            let rates = c.along_e()?;
            let f = c.frame;
            let n = c.n();
            let mut worst = 0.0f64;
            for k in 0..n {
                let ek = CMatrix::from_fn(n, n, |a, b| {
                    if a == k && b == k {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let inner = &ek * &f.gamma - &f.gamma * &ek;
                let want = &f.v * &inner - &inner * &f.v;
                worst = worst.max(matrix_gap(&rates[k].v, &want));
            }
            Ok(worst)
        }),
        identity!(
            "psi-derivative",
            "E_k ψ_iα = r_ki ψ_kα for k ≠ i and E_i ψ_iα = −Σ_{j≠i} r_ij ψ_jα",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                let n = c.n();
                Ok(iproduct!(0..n, 0..n, 0..n).fold(0.0, |m, (k, i, a)| {
                    let want = if k != i {
                        f.gamma[(k, i)] * f.psi[(k, a)]
                    } else {
                        -(0..n)
                            .filter(|&j| j != i)
                            .map(|j| f.gamma[(i, j)] * f.psi[(j, a)])
                            .sum::<C64>()
                    };
                    m.max((rates[k].psi[(i, a)] - want).norm())
                }))
            }
        ),
        identity!(
            "psi-primary-derivative",
            "γ_β ψ_iα = Σ_j r_ij ψ_jα (ψ_jβ/√g_j − ψ_iβ/√g_i)",
            TOL_FD,
            |c| {
                let rates = c.along_e()?;
                let f = c.frame;
                let n = c.n();
                let mut worst = 0.0f64;
                for beta in 0..n {
                    let parts: Vec<(C64, &_)> = (0..n)
                        .map(|j| (f.psi[(j, beta)] / f.sqrt_g[j], &rates[j]))
                        .collect();
                    let along = combine_rates(&parts);
                    for (i, a) in iproduct!(0..n, 0..n) {
                        let want: C64 = (0..n)
                            .map(|j| {
                                f.gamma[(i, j)]
                                    * f.psi[(j, a)]
                                    * (f.psi[(j, beta)] / f.sqrt_g[j] - f.psi[(i, beta)] / f.sqrt_g[i])
                            })
                            .sum();
                        worst = worst.max((along.psi[(i, a)] - want).norm());
                    }
                }
                Ok(worst)
            }
        ),
        // genus one
        identity!(
            "getzler",
            "E_j φ_i = (1/24) G_0(E_i, E_i, E_i, E_j)",
            TOL_GETZLER,
            |c| {
                let rates = c.along_e()?;
                let ctx = c.g0()?;
                let e = c.frame.idempotents();
                Ok(iproduct!(0..c.n(), 0..c.n()).fold(0.0, |m, (i, j)| {
                    let g0 = ctx.g0([&e[i], &e[i], &e[i], &e[j]]) / 24.0;
                    m.max((rates[j].phi[i] - g0).norm())
                }))
            }
        ),
        identity!(
            "g0-distinct",
            "G_0(W, E_i, E_j, E_k) = 0 for distinct i, j, k",
            TOL_G0,
            |c| {
                let ctx = c.g0()?;
                let e = c.frame.idempotents();
                let n = c.n();
                let mut worst = 0.0f64;
                for (i, j, k) in iproduct!(0..n, 0..n, 0..n) {
                    if i < j && j < k {
                        for a in 0..n {
                            let w = unit_vector(n, a);
                            worst = worst.max(ctx.g0([&w, &e[i], &e[j], &e[k]]).norm());
                        }
                    }
                }
                Ok(worst)
            }
        ),
        identity!(
            "g0-pair",
            "G_0(E_i, E_i, E_i, E_j) = −G_0(E_i, E_i, E_j, E_j) for i ≠ j",
            TOL_G0,
            |c| {
                let ctx = c.g0()?;
                let e = c.frame.idempotents();
                Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                    let x = ctx.g0([&e[i], &e[i], &e[i], &e[j]]);
                    let y = ctx.g0([&e[i], &e[i], &e[j], &e[j]]);
                    m.max((x + y).norm())
                }))
            }
        ),
        identity!("phi-integrability", "E_j φ_i = E_i φ_j", TOL_FD, |c| {
            let rates = c.along_e()?;
            Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
                m.max((rates[j].phi[i] - rates[i].phi[j]).norm())
            }))
        }),
        identity!(
            "virasoro-l1",
            "24 Σ_i u_i² φ_i = Σ_{i,j} [6(u_i + u_j)(u_i − u_j)² r_ij² − u_i² r_ij √(g_i/g_j)]",
            TOL_VIRASORO,
            |c| Ok(virasoro_l1_check(c.frame).residual)
        ),
        identity!(
            "virasoro-symmetrization",
            "Σ_{i,j} 6(u_i + u_j)(u_i − u_j)² r_ij² = Σ_{i,j} 12 u_i² (u_i − u_j) r_ij²",
            TOL_VIRASORO,
            |c| Ok(virasoro_l1_check(c.frame).symmetrization_residual)
        ),
        identity!(
            "phi-genus0-route",
            "24 φ_i = ⟨⟨E_i τ_−(L_0) γ_α γ^α⟩⟩ − G_0(E_i, E_i, E_i, X̄)",
            TOL_G0,
            |c| {
                let closed = phi(c.frame);
                let route = phi_from_genus0(c.model, c.frame)?;
                Ok(max_abs_diff(&closed, &route))
            }
        ),
        identity!("genus1-string", "⟨⟨γ_1⟩⟩_1 = Σ_i φ_i = 0", TOL_FRAME, |c| {
            Ok(phi(c.frame).iter().sum::<C64>().norm())
        }),
        identity!(
            "genus1-trr-derivative",
            "γ_b ⟨⟨T(γ_a)⟩⟩_1 = (1/24) ⟨⟨γ_a γ_b γ^μ γ_μ⟩⟩",
            TOL_GETZLER,
            |c| {
                let mut worst = 0.0f64;
                for (a, b) in iproduct!(0..c.n(), 0..c.n()) {
                    worst = worst.max(trr_derivative_check(c.model, c.frame, a, b, c.h)?);
                }
                Ok(worst)
            }
        ),
        // descendants
        identity!(
            "t-product",
            "⟨⟨T(γ_a) γ_b γ_c γ_d⟩⟩ = ⟨⟨(γ_a∘γ_b) γ_c γ_d⟩⟩",
            TOL_DESCENDANTS,
            t_product
        ),
        identity!("t-degenerate", "⟨T(W), V⟩ = ⟨⟨S T(W) V⟩⟩ = 0", TOL_DESCENDANTS, |c| {
            let r = c.reducer(RewriteMode::ExpansionOnly)?;
            let mut worst = 0.0f64;
            for (a, b) in iproduct!(0..c.n(), 0..c.n()) {
                worst = worst.max(r.inner(&t_op(Expr::gamma(a)), &Expr::gamma(b))?.norm());
                worst = worst.max(
                    r.inner(&t_op(Expr::gamma(a)), &Expr::idempotent(b))?
                        .norm(),
                );
            }
            Ok(worst)
        }),
        identity!(
            "metric",
            "⟨γ_α, γ_β⟩ = η_αβ and ⟨E_i, E_j⟩ = δ_ij g_i",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::ExpansionOnly)?;
                let mut worst = 0.0f64;
                for (a, b) in iproduct!(0..c.n(), 0..c.n()) {
                    let eta = c.model.eta()[(a, b)];
                    worst = worst.max((r.inner(&Expr::gamma(a), &Expr::gamma(b))? - eta).norm());
                    let want = if a == b { c.frame.g[a] } else { C64::new(0.0, 0.0) };
                    worst = worst.max(
                        (r.inner(&Expr::idempotent(a), &Expr::idempotent(b))? - want).norm(),
                    );
                }
                Ok(worst)
            }
        ),
        identity!(
            "string-routes",
            "⟨⟨S W V⟩⟩ = ⟨W̄, V⟩ = ⟨⟨S S (W∘V)⟩⟩",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::ExpansionOnly)?;
                let mut worst = 0.0f64;
                for (a, b) in iproduct!(0..c.n(), 0..c.n()) {
                    let w = Expr::gamma(a).add(Expr::X);
                    let v = Expr::idempotent(b);
                    let direct = r.correlator(&[Expr::S, w.clone(), v.clone()])?;
                    let barred = r.inner(&bar(w.clone()), &v)?;
                    let product = r.correlator(&[Expr::S, Expr::S, w.prod(v)])?;
                    worst = worst.max((direct - barred).norm()).max((direct - product).norm());
                }
                Ok(worst)
            }
        ),
        identity!(
            "standard-decomposition",
            "W = T²(τ_−²W) + T(bar(τ_−W)) + bar(W) for W ∈ {X, L_0, T(T(γ_α))}",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::Rules)?;
                let mut fields = vec![Expr::X, Expr::L0];
                fields.extend((0..c.n()).map(|a| t_op(t_op(Expr::gamma(a)))));
                let mut worst = 0.0f64;
                for w in fields {
                    let whole = r.expand(&w)?;
                    let parts = r.expand(
                        &t_op(t_op(w.clone().tau_minus().tau_minus()))
                            .add(t_op(bar(w.clone().tau_minus())))
                            .add(bar(w)),
                    )?;
                    worst = worst.max(whole.max_diff(&parts));
                }
                Ok(worst)
            }
        ),
        identity!(
            "l0-lowering",
            "τ_−(L_0) = −(b_1 + 1) γ_1 and τ_−²(L_0) = 0",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::Rules)?;
                let b1 = c.model.b_f64()[0];
                let once = r.expand(&Expr::L0.tau_minus())?;
                let want = r.expand(&Expr::gamma(0).scale(C64::new(-(b1 + 1.0), 0.0)))?;
                let twice = r.expand(&Expr::L0.tau_minus().tau_minus())?;
                let zero = crate::descendants::Expansion::zero(c.n());
                Ok(once.max_diff(&want).max(twice.max_diff(&zero)))
            }
        ),
        identity!(
            "string-idempotent-pair",
            "⟨⟨S W E_i E_j⟩⟩ = 0 for i ≠ j",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::Rules)?;
                let mut worst = 0.0f64;
                for (i, j) in off_diagonal(c.n()) {
                    for a in 0..c.n() {
                        let v = r.correlator(&[
                            Expr::S,
                            Expr::gamma(a),
                            Expr::idempotent(i),
                            Expr::idempotent(j),
                        ])?;
                        worst = worst.max(v.norm());
                    }
                }
                Ok(worst)
            }
        ),
        identity!(
            "four-point-antisymmetry",
            "⟨⟨W E_i E_i E_j⟩⟩ = −⟨⟨W E_j E_j E_i⟩⟩ for i ≠ j, W ∈ {γ_α, T(γ_α)}",
            TOL_DESCENDANTS,
            |c| {
                let r = c.reducer(RewriteMode::Rules)?;
                let mut worst = 0.0f64;
                for (i, j) in off_diagonal(c.n()) {
                    for a in 0..c.n() {
                        for w in [Expr::gamma(a), t_op(Expr::gamma(a))] {
                            let (ei, ej) = (Expr::idempotent(i), Expr::idempotent(j));
                            let x = r.correlator(&[w.clone(), ei.clone(), ei.clone(), ej.clone()])?;
                            let y = r.correlator(&[w, ej.clone(), ej, ei])?;
                            worst = worst.max((x + y).norm());
                        }
                    }
                }
                Ok(worst)
            }
        ),
        identity!(
            "rotation-four-point-lemma",
            "−(r_ii + X̄ r_ii) + Σ_{j,k} {−√(g_j/g_k) u_j r_ij r_ik + (√(g_i g_j)/g_k) u_j r_ik r_jk} = 0",
            TOL_G0,
            |c| {
                let x = c.along_x()?;
                let f = c.frame;
                let n = c.n();
                Ok((0..n).fold(0.0, |m, i| {
                    let mut acc = -(f.gamma[(i, i)] + x.gamma[(i, i)]);
                    for (j, k) in iproduct!(0..n, 0..n) {
                        acc -= f.sqrt_g[j] / f.sqrt_g[k] * f.u[j] * f.gamma[(i, j)] * f.gamma[(i, k)];
                        acc += f.sqrt_g[i] * f.sqrt_g[j] / f.g[k]
                            * f.u[j]
                            * f.gamma[(i, k)]
                            * f.gamma[(j, k)];
                    }
                    m.max(acc.norm())
                }))
            }
        ),
    ]
}

fn off_diagonal(n: usize) -> impl Iterator<Item = (usize, usize)> {
    iproduct!(0..n, 0..n).filter(|(i, j)| i != j)
}

fn matrix_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn idempotency(c: &PointContext) -> Result<f64> {
    let q = &c.tensors()?.product;
    let e = c.frame.idempotents();
    let mut worst = 0.0f64;
    for (i, j) in iproduct!(0..c.n(), 0..c.n()) {
        let p = q.product(&e[i], &e[j]);
        let want: Vec<C64> = if i == j {
            e[i].clone()
        } else {
            vec![C64::new(0.0, 0.0); c.n()]
        };
        worst = worst.max(max_abs_diff(&p, &want));
    }
    Ok(worst)
}

fn partition_of_unity(c: &PointContext) -> Result<f64> {
    let mut sum = vec![C64::new(0.0, 0.0); c.n()];
    for e in c.frame.idempotents() {
        for (s, x) in sum.iter_mut().zip(&e) {
            *s += x;
        }
    }
    Ok(max_abs_diff(&sum, &unit_vector(c.n(), 0)))
}

fn euler_eigen(c: &PointContext) -> Result<f64> {
    let q = &c.tensors()?.product;
    let x = euler_field(c.model, &c.frame.point);
    let mut worst = 0.0f64;
    for (i, e) in c.frame.idempotents().iter().enumerate() {
        let xe = q.product(&x, e);
        let ue: Vec<C64> = e.iter().map(|z| c.frame.u[i] * z).collect();
        worst = worst.max(max_abs_diff(&xe, &ue));
    }
    Ok(worst)
}

fn psi_orthogonality(c: &PointContext) -> Result<f64> {
    let p = &c.frame.psi;
    Ok(matrix_gap(&(p.transpose() * p), c.model.eta()))
}

fn v_eigenvectors(c: &PointContext) -> Result<f64> {
    let f = c.frame;
    let b = c.model.b_f64();
    let mut worst = 0.0f64;
    for a in 0..c.n() {
        let col = f.psi.column(a).into_owned();
        let lhs = &f.v * &col;
        let rhs = &col * C64::new(b[a] - 0.5, 0.0);
        worst = worst.max((lhs - rhs).iter().fold(0.0, |m, z| m.max(z.norm())));
    }
    Ok(worst)
}

fn three_point_diagonal(c: &PointContext) -> Result<f64> {
    let t = &c.tensors()?.c3;
    let e = c.frame.idempotents();
    let n = c.n();
    Ok(iproduct!(0..n, 0..n, 0..n).fold(0.0, |m, (i, j, k)| {
        let want = if i == j && j == k {
            c.frame.g[i]
        } else {
            C64::new(0.0, 0.0)
        };
        m.max((t.contract(&[&e[i], &e[j], &e[k]]) - want).norm())
    }))
}

fn three_point_basis(c: &PointContext) -> Result<f64> {
    let t = &c.tensors()?.c3;
    let f = c.frame;
    let n = c.n();
    Ok(iproduct!(0..n, 0..n, 0..n).fold(0.0, |m, (a, b, mu)| {
        let want: C64 = (0..n)
            .map(|i| f.psi[(i, a)] * f.psi[(i, b)] * f.psi[(i, mu)] / f.sqrt_g[i])
            .sum();
        m.max((t.get(&[a, b, mu]) - want).norm())
    }))
}

fn four_point_pair(c: &PointContext) -> Result<f64> {
    let t = &c.tensors()?.c4;
    let f = c.frame;
    let e = f.idempotents();
    Ok(off_diagonal(c.n()).fold(0.0, |m, (i, j)| {
        let x = t.contract(&[&e[j], &e[i], &e[i], &e[i]]);
        let y = t.contract(&[&e[j], &e[j], &e[i], &e[i]]);
        let r = f.sqrt_g[i] * f.sqrt_g[j] * f.gamma[(i, j)];
        m.max((x + y).norm()).max((x + r).norm())
    }))
}

fn four_point_distinct(c: &PointContext) -> Result<f64> {
    let t = &c.tensors()?.c4;
    let e = c.frame.idempotents();
    let n = c.n();
    let mut worst = 0.0f64;
    for (i, j, k) in iproduct!(0..n, 0..n, 0..n) {
        if i < j && j < k {
            for a in 0..n {
                let w = unit_vector(n, a);
                worst = worst.max(t.contract(&[&e[i], &e[j], &e[k], &w]).norm());
            }
        }
    }
    Ok(worst)
}

fn gstar_pairing(c: &PointContext) -> Result<f64> {
    let n = c.n();
    let eta = c.model.eta();
    let b = c.model.b_f64();
    let mut worst = 0.0f64;
    for (a, bb) in iproduct!(0..n, 0..n) {
        worst = worst.max(((b[a] + b[bb] - 1.0) * eta[(a, bb)]).norm());
    }
    for (i, e) in c.frame.idempotents().iter().enumerate() {
        let ge = crate::frame::gstar_primary(c.model, e);
        worst = worst.max((bilinear(eta, &ge, e) - 0.5 * c.frame.g[i]).norm());
    }
    Ok(worst)
}

fn idempotent_connection(c: &PointContext) -> Result<f64> {
    let rates = c.along_e()?;
    let q = &c.tensors()?.product;
    let f = c.f_vectors()?;
    let e = c.frame.idempotents();
    let n = c.n();
    let mut worst = 0.0f64;
    for (i, j) in iproduct!(0..n, 0..n) {
        let a = q.product(&f[j], &e[i]);
        let b = q.product(&f[i], &e[j]);
        for al in 0..n {
            let mut want = -a[al] - b[al];
            if i == j {
                want += f[j][al];
            }
            worst = worst.max((rates[j].j[(i, al)] - want).norm());
        }
    }
    Ok(worst)
}

fn rotation_own(f: &crate::frame::CanonicalFrame, i: usize, j: usize) -> C64 {
    let r = &f.gamma;
    let mut acc = r[(i, j)];
    for k in 0..f.dim() {
        if k != i && k != j {
            acc += (f.u[k] - f.u[j]) * r[(i, k)] * r[(j, k)];
        }
    }
    acc / (f.u[j] - f.u[i])
}

fn t_product(c: &PointContext) -> Result<f64> {
    let n = c.n();
    let mut worst = 0.0f64;
    for mode in [RewriteMode::Rules, RewriteMode::ExpansionOnly] {
        let r = c.reducer(mode)?;
        for (a, b, cc, d) in iproduct!(0..n, 0..n, 0..n, 0..n) {
            let lhs = r.correlator(&[
                t_op(Expr::gamma(a)),
                Expr::gamma(b),
                Expr::gamma(cc),
                Expr::gamma(d),
            ])?;
            let rhs = r.correlator(&[
                Expr::gamma(a).prod(Expr::gamma(b)),
                Expr::gamma(cc),
                Expr::gamma(d),
            ])?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Suite name → identity ids.
pub fn suite_ids(suite: &str) -> Option<Vec<&'static str>> {
    let ids: Vec<&'static str> = match suite {
        "wdvv" => vec!["wdvv-associativity"],
        "frame-core" => vec![
            "idempotency",
            "partition-of-unity",
            "euler-eigen",
            "psi-orthogonality",
            "v-antisymmetry",
            "v-eigenvectors",
            "gamma-symmetry",
            "gamma-routes",
            "three-point-diagonal",
            "three-point-basis",
            "four-point-pair",
            "four-point-distinct",
            "slice-sum",
            "slice-euler-sum",
            "f-vector-routes",
            "f-sum",
            "gstar-routes",
            "gstar-pairing",
            "delta-contraction",
        ],
        "rotation-derivatives" => vec![
            "canonical-coordinates",
            "sqrt-g-derivative",
            "euler-g",
            "euler-sqrt-g",
            "euler-r",
            "string-r",
            "idempotent-bracket",
            "idempotent-connection",
            "rotation-triple",
            "rotation-own",
            "rotation-diagonal-cross",
            "rotation-diagonal-own",
            "v-derivative",
            "psi-derivative",
            "psi-primary-derivative",
        ],
        "getzler" => vec!["getzler", "g0-distinct", "g0-pair", "phi-integrability"],
        "virasoro" => vec!["virasoro-l1", "virasoro-symmetrization"],
        "descendants" => vec![
            "t-product",
            "t-degenerate",
            "metric",
            "string-routes",
            "standard-decomposition",
            "f-sum",
            "l0-lowering",
            "string-idempotent-pair",
            "four-point-antisymmetry",
            "rotation-four-point-lemma",
        ],
        "genus1" => vec![
            "phi-genus0-route",
            "genus1-string",
            "genus1-trr-derivative",
            "phi-integrability",
        ],
        "all" => {
            let mut all = Vec::new();
            for s in SUITES.iter().filter(|s| **s != "all") {
                for id in suite_ids(s).expect("listed suite") {
                    if !all.contains(&id) {
                        all.push(id);
                    }
                }
            }
            all
        }
        _ => return None,
    };
    Some(ids)
}

pub const SUITES: &[&str] = &[
    "wdvv",
    "frame-core",
    "rotation-derivatives",
    "getzler",
    "virasoro",
    "descendants",
    "genus1",
    "all",
];

pub fn lookup(id: &str) -> Option<Identity> {
    registry().into_iter().find(|i| i.id == id)
}
