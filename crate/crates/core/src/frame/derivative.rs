use super::{canonical_frame, match_frames, CanonicalFrame, FrameOptions};
use crate::calculus::EvalPoint;
use crate::error::Result;
use crate::model::FrobeniusModel;
use crate::numeric::{CMatrix, C64};

/// Frame quantity to differentiate. Matrix quantities are flattened row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    U,
    G,
    SqrtG,
    Gamma,
    J,
    Psi,
    V,
    Phi,
}

impl Quantity {
    pub fn extract(self, frame: &CanonicalFrame) -> Vec<C64> {
        match self {
            Quantity::U => frame.u.clone(),
            Quantity::G => frame.g.clone(),
            Quantity::SqrtG => frame.sqrt_g.clone(),
            Quantity::Gamma => row_major(&frame.gamma),
            Quantity::J => row_major(&frame.j),
            Quantity::Psi => row_major(&frame.psi),
            Quantity::V => row_major(&frame.v),
            Quantity::Phi => crate::genus1::phi(frame),
        }
    }
}

fn row_major(m: &CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// Central-difference estimate with `|D(h) − D(h/2)|` as error proxy.
#[derive(Debug, Clone)]
pub struct FdEstimate {
    pub value: Vec<C64>,
    pub error: f64,
}

pub fn directional_derivative(
    model: &FrobeniusModel,
    point: &EvalPoint,
    direction: &[C64],
    quantity: Quantity,
    h: f64,
) -> Result<FdEstimate> {
    let base = canonical_frame(model, point, &FrameOptions::default())?;
    directional_derivative_from(model, &base, direction, quantity, h)
}

pub fn directional_derivative_from(
    model: &FrobeniusModel,
    base: &CanonicalFrame,
    direction: &[C64],
    quantity: Quantity,
    h: f64,
) -> Result<FdEstimate> {
    directional_derivative_with(model, base, direction, h, |f| Ok(quantity.extract(f)))
}

/// Differentiates an arbitrary frame functional; displaced frames are
/// matched to `base` before `f` sees them.
pub fn directional_derivative_with<F>(
    model: &FrobeniusModel,
    base: &CanonicalFrame,
    direction: &[C64],
    h: f64,
    f: F,
) -> Result<FdEstimate>
where
    F: Fn(&CanonicalFrame) -> Result<Vec<C64>>,
{
    let opts = FrameOptions::default();
    let at = |s: f64| -> Result<Vec<C64>> {
        let p = base.point.displaced(direction, C64::new(s, 0.0));
        let frame = canonical_frame(model, &p, &opts)?;
        f(&match_frames(base, &frame)?.frame)
    };
    let central = |step: f64| -> Result<Vec<C64>> {
        let plus = at(step)?;
        let minus = at(-step)?;
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let full = central(h)?;
    let half = central(h / 2.0)?;
    let error = full
        .iter()
        .zip(&half)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Ok(FdEstimate { value: full, error })
}

/// Directional derivatives of every frame quantity along one direction.
#[derive(Debug, Clone)]
pub struct FrameRates {
    pub u: Vec<C64>,
    pub g: Vec<C64>,
    pub sqrt_g: Vec<C64>,
    pub gamma: CMatrix,
    pub j: CMatrix,
    pub psi: CMatrix,
    pub v: CMatrix,
    pub phi: Vec<C64>,
    pub fd_error: f64,
}

const BUNDLE: [Quantity; 8] = [
    Quantity::U,
    Quantity::G,
    Quantity::SqrtG,
    Quantity::Gamma,
    Quantity::J,
    Quantity::Psi,
    Quantity::V,
    Quantity::Phi,
];

pub fn frame_rates(
    model: &FrobeniusModel,
    base: &CanonicalFrame,
    direction: &[C64],
    h: f64,
) -> Result<FrameRates> {
    let n = base.dim();
    let fd = directional_derivative_with(model, base, direction, h, |f| {
        Ok(BUNDLE.iter().flat_map(|q| q.extract(f)).collect())
    })?;
    let mut rest = fd.value.as_slice();
    let mut take = |len: usize| {
        let (head, tail) = rest.split_at(len);
        rest = tail;
        head.to_vec()
    };
    let square = |v: Vec<C64>| CMatrix::from_row_slice(n, n, &v);
    Ok(FrameRates {
        u: take(n),
        g: take(n),
        sqrt_g: take(n),
        gamma: square(take(n * n)),
        j: square(take(n * n)),
        psi: square(take(n * n)),
        v: square(take(n * n)),
        phi: take(n),
        fd_error: fd.error,
    })
}

/// Rates along a linear combination of directions whose rates are known.
pub fn combine_rates(parts: &[(C64, &FrameRates)]) -> FrameRates {
    let first = parts[0].1;
    let scale_vec = |get: &dyn Fn(&FrameRates) -> &Vec<C64>| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); get(first).len()];
        for (w, r) in parts {
            for (o, x) in out.iter_mut().zip(get(r)) {
                *o += w * x;
            }
        }
        out
    };
    let scale_mat = |get: &dyn Fn(&FrameRates) -> &CMatrix| -> CMatrix {
        let mut out = CMatrix::zeros(get(first).nrows(), get(first).ncols());
        for (w, r) in parts {
            out += get(r) * *w;
        }
        out
    };
    FrameRates {
        u: scale_vec(&|r| &r.u),
        g: scale_vec(&|r| &r.g),
        sqrt_g: scale_vec(&|r| &r.sqrt_g),
        gamma: scale_mat(&|r| &r.gamma),
        j: scale_mat(&|r| &r.j),
        psi: scale_mat(&|r| &r.psi),
        v: scale_mat(&|r| &r.v),
        phi: scale_vec(&|r| &r.phi),
        fd_error: parts
            .iter()
            .fold(0.0f64, |m, (w, r)| m.max(w.norm() * r.fd_error)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_catalog;

    #[test]
    fn canonical_coordinates() {
        let m = builtin_catalog("P1", 1).unwrap();
        let base = canonical_frame(&m, &EvalPoint::origin(2), &FrameOptions::default()).unwrap();
        for j in 0..2 {
            let d = directional_derivative_from(&m, &base, &base.idempotent(j), Quantity::U, 1e-5)
                .unwrap();
            for i in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((d.value[i] - expected).norm() < 1e-8, "{:?}", d.value);
            }
        }
    }
}
