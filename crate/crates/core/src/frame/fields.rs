use super::CanonicalFrame;
use crate::calculus::{correlator_tensor, EvalPoint, QuantumProduct};
use crate::error::{Error, Result};
use crate::model::FrobeniusModel;
use crate::numeric::{max_abs, max_abs_diff, mat_vec, C64};

/// Euler field on the slice: `X^α = −(b_α − b_1 − 1) t^α + C_1^α`.
pub fn euler_field(model: &FrobeniusModel, point: &EvalPoint) -> Vec<C64> {
    let b = model.b_f64();
    let constant = model.c_first_row();
    point
        .coords()
        .iter()
        .enumerate()
        .map(|(a, t)| -(b[a] - b[0] - 1.0) * t + constant[a])
        .collect()
}

/// A vector field computed along two independent routes.
#[derive(Debug, Clone)]
pub struct FieldRoutes {
    pub direct: Vec<C64>,
    pub closed: Vec<C64>,
    pub residual: f64,
}

fn agree(what: &str, a: &[C64], b: &[C64], tol: f64) -> Result<f64> {
    let residual = max_abs_diff(a, b);
    let scale = 1.0f64.max(max_abs(a));
    if residual > tol * scale {
        return Err(Error::CrossCheck {
            what: what.to_string(),
            residual,
            tol: tol * scale,
        });
    }
    Ok(residual)
}

/// `F_i = ⟨⟨E_i E_i E_i γ^α⟩⟩ γ_α`, checked against `−Σ_k r_ik (√g_i/√g_k) E_k`.
pub fn f_vector(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    i: usize,
    tol: f64,
) -> Result<FieldRoutes> {
    let c4 = correlator_tensor(model, &frame.point, 4)?;
    let e = frame.idempotent(i);
    let lowered = c4.contract_all_but_last(&[&e, &e, &e]);
    let direct = mat_vec(model.eta_inv(), &lowered);
    let closed = closed_f(frame, i);
    let residual = agree(&format!("F_{i}"), &direct, &closed, tol)?;
    Ok(FieldRoutes {
        direct,
        closed,
        residual,
    })
}

fn closed_f(frame: &CanonicalFrame, i: usize) -> Vec<C64> {
    let n = frame.dim();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let w = -frame.gamma[(i, k)] * frame.sqrt_g[i] / frame.sqrt_g[k];
        for a in 0..n {
            out[a] += w * frame.j[(k, a)];
        }
    }
    out
}

/// `(G*v)^α = b_α v^α` for a primary field.
pub fn gstar_primary(model: &FrobeniusModel, v: &[C64]) -> Vec<C64> {
    v.iter().zip(model.b_f64()).map(|(z, b)| z * *b).collect()
}

#[derive(Debug, Clone)]
pub struct GStarRoutes {
    /// `b_α J_iα`
    pub direct: Vec<C64>,
    /// `½E_i + Σ_j (u_i − u_j) r_ij √(g_i/g_j) E_j`
    pub rotation: Vec<C64>,
    /// `½E_i − u_i F_i + X∘F_i`
    pub product: Vec<C64>,
    pub residual: f64,
}

pub fn gstar(
    model: &FrobeniusModel,
    frame: &CanonicalFrame,
    i: usize,
    tol: f64,
) -> Result<GStarRoutes> {
    let n = frame.dim();
    let e = frame.idempotent(i);
    let direct = gstar_primary(model, &e);

    let mut rotation: Vec<C64> = e.iter().map(|z| 0.5 * z).collect();
    for k in 0..n {
        let w = (frame.u[i] - frame.u[k]) * frame.gamma[(i, k)] * frame.sqrt_g[i] / frame.sqrt_g[k];
        for a in 0..n {
            rotation[a] += w * frame.j[(k, a)];
        }
    }

    let f = f_vector(model, frame, i, tol)?.direct;
    let q = QuantumProduct::at(model, &frame.point)?;
    let xf = q.product(&euler_field(model, &frame.point), &f);
    let product: Vec<C64> = (0..n)
        .map(|a| 0.5 * e[a] - frame.u[i] * f[a] + xf[a])
        .collect();

    let r1 = agree(&format!("G*E_{i} rotation form"), &direct, &rotation, tol)?;
    let r2 = agree(&format!("G*E_{i} product form"), &direct, &product, tol)?;
    Ok(GStarRoutes {
        direct,
        rotation,
        product,
        residual: r1.max(r2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_frame, FrameOptions};
    use crate::model::builtin_catalog;
    use crate::numeric::c;

    #[test]
    fn euler_field_examples() {
        let p1 = builtin_catalog("P1", 1).unwrap();
        let x = euler_field(&p1, &EvalPoint::from_real(&[0.3, -0.2]));
        assert_eq!(x, vec![c(0.3), c(2.0)]);
        let p2 = builtin_catalog("P2", 2).unwrap();
        assert_eq!(
            euler_field(&p2, &EvalPoint::origin(3)),
            vec![c(0.0), c(3.0), c(0.0)]
        );
        let poly = builtin_catalog("poly2d", 1).unwrap();
        assert_eq!(euler_field(&poly, &EvalPoint::origin(2)), vec![c(0.0), c(0.0)]);
    }

    #[test]
    fn p1_fields_at_origin() {
        let m = builtin_catalog("P1", 1).unwrap();
        let f = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap();
        let f0 = f_vector(&m, &f, 0, 1e-12).unwrap();
        let f1 = f_vector(&m, &f, 1, 1e-12).unwrap();
        for a in 0..2 {
            assert!((f0.direct[a] + f1.direct[a]).norm() < 1e-14);
        }
        let g = gstar(&m, &f, 0, 1e-12).unwrap();
        assert!((g.direct[0] - c(0.0)).norm() < 1e-15);
        assert!((g.direct[1] - c(0.5)).norm() < 1e-15);
    }
}
