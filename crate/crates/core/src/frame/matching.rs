use itertools::Itertools;

use super::CanonicalFrame;
use crate::error::{Error, Result};
use crate::numeric::{CMatrix, C64};

/// Relabeling of a frame onto a reference: `frame` row `i` is row
/// `permutation[i]` of the input, multiplied by `signs[i]` where signs apply.
#[derive(Debug, Clone)]
pub struct FrameMatch {
    pub permutation: Vec<usize>,
    pub signs: Vec<f64>,
    pub cost: f64,
    pub frame: CanonicalFrame,
}

/// Matches `b` onto `a` by eigenvalue proximity, then aligns `√g_i` signs.
pub fn match_frames(a: &CanonicalFrame, b: &CanonicalFrame) -> Result<FrameMatch> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.dim(),
        });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut runner_up = f64::INFINITY;
    for perm in (0..n).permutations(n) {
        let cost: f64 = perm
            .iter()
            .enumerate()
            .map(|(i, &k)| (a.u[i] - b.u[k]).norm())
            .sum();
        match &best {
            Some((c, _)) if cost >= *c => runner_up = runner_up.min(cost),
            Some((c, _)) => {
                runner_up = *c;
                best = Some((cost, perm));
            }
            None => best = Some((cost, perm)),
        }
    }
    let (cost, permutation) = best.expect("at least one permutation");
    if n > 1 && runner_up < 2.0 * cost {
        return Err(Error::AmbiguousMatch(format!(
            "best pairing cost {cost:e}, runner-up {runner_up:e}"
        )));
    }
    let signs: Vec<f64> = (0..n)
        .map(|i| {
            let s = b.sqrt_g[permutation[i]];
            if (s + a.sqrt_g[i]).norm() < (s - a.sqrt_g[i]).norm() {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let frame = relabel(b, &permutation, &signs);
    Ok(FrameMatch {
        permutation,
        signs,
        cost,
        frame,
    })
}

/// Applies a permutation and square-root sign flips without recomputing anything.
pub fn relabel(frame: &CanonicalFrame, permutation: &[usize], signs: &[f64]) -> CanonicalFrame {
    let n = frame.dim();
    let p = permutation;
    CanonicalFrame {
        point: frame.point.clone(),
        j: CMatrix::from_fn(n, n, |i, a| frame.j[(p[i], a)]),
        u: p.iter().map(|&k| frame.u[k]).collect(),
        g: p.iter().map(|&k| frame.g[k]).collect(),
        sqrt_g: (0..n).map(|i| frame.sqrt_g[p[i]] * signs[i]).collect(),
        psi: CMatrix::from_fn(n, n, |i, a| frame.psi[(p[i], a)] * signs[i]),
        v: CMatrix::from_fn(n, n, |i, k| frame.v[(p[i], p[k])] * (signs[i] * signs[k])),
        gamma: CMatrix::from_fn(n, n, |i, k| {
            let s = if i == k { 1.0 } else { signs[i] * signs[k] };
            frame.gamma[(p[i], p[k])] * C64::new(s, 0.0)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::EvalPoint;
    use crate::frame::{canonical_frame, FrameOptions};
    use crate::model::builtin_catalog;

    #[test]
    fn identity_and_swap() {
        let m = builtin_catalog("P1", 1).unwrap();
        let opts = FrameOptions::default();
        let a = canonical_frame(&m, &EvalPoint::origin(2), &opts).unwrap();
        let same = match_frames(&a, &a).unwrap();
        assert_eq!(same.permutation, vec![0, 1]);

        let near = canonical_frame(&m, &EvalPoint::from_real(&[0.0, 1e-4]), &opts).unwrap();
        let matched = match_frames(&a, &near).unwrap();
        assert_eq!(matched.permutation, vec![0, 1]);
        for i in 0..2 {
            let du = (matched.frame.u[i] - a.u[i]).norm();
            assert!(du > 5e-5 && du < 2e-4, "{du}");
        }

        let swapped = relabel(&a, &[1, 0], &[1.0, -1.0]);
        let back = match_frames(&a, &swapped).unwrap();
        assert_eq!(back.permutation, vec![1, 0]);
        assert_eq!(back.signs, vec![-1.0, 1.0]);
        assert!((back.frame.gamma[(0, 1)] - a.gamma[(0, 1)]).norm() < 1e-15);
    }
}
