use frobenius_forge::calculus::EvalPoint;
use frobenius_forge::genus1::{genus_one_data, getzler_check, virasoro_l1_check, G0Context};
use frobenius_forge::model::builtin_catalog;
use frobenius_forge::numeric::unit_vector;
use frobenius_forge::{canonical_frame, genus1_onepoint, phi, FrameOptions, C64};
use proptest::prelude::*;

fn plane(t: &[f64]) -> (frobenius_forge::FrobeniusModel, frobenius_forge::CanonicalFrame) {
    let m = builtin_catalog("P2", 5).unwrap();
    let f = canonical_frame(&m, &EvalPoint::from_real(t), &FrameOptions::default()).unwrap();
    (m, f)
}

// Off the t3 = 0 locus every elliptic correction carries a power of t3, so the
// only surviving term is the first Chern class part −(3/24) t2, and the string
// constraint kills ⟨⟨γ1⟩⟩_1.
#[test]
fn plane_onepoint_on_the_t2_axis() {
    for t2 in [-0.4, -0.1, 0.0, 0.25, 0.6] {
        for t1 in [0.0, 0.3] {
            let (_, f) = plane(&[t1, t2, 0.0]);
            let want = [0.0, -1.0 / 8.0, 0.0];
            for (a, w) in want.iter().enumerate() {
                let got = genus1_onepoint(&f, a);
                assert!((got - C64::new(*w, 0.0)).norm() < 1e-10, "t=({t1},{t2}) a={a}: {got}");
            }
        }
    }
}

#[test]
fn line_onepoint_is_constant() {
    let m = builtin_catalog("P1", 5).unwrap();
    for t in [[0.0, 0.0], [0.4, -0.3], [-1.0, 0.7]] {
        let f = canonical_frame(&m, &EvalPoint::from_real(&t), &FrameOptions::default()).unwrap();
        assert!(genus1_onepoint(&f, 0).norm() < 1e-12);
        assert!((genus1_onepoint(&f, 1) + C64::new(1.0 / 24.0, 0.0)).norm() < 1e-12);
        let p = phi(&f);
        assert!((p[0] + p[1]).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn g0_is_symmetric(t1 in -0.5f64..0.5, t2 in -0.5f64..0.5, t3 in -0.3f64..0.3, perm in 0usize..24) {
        let (m, f) = plane(&[t1, t2, t3]);
        let ctx = G0Context::new(&m, &f.point).unwrap();
        let v: Vec<Vec<C64>> = vec![
            f.idempotent(0),
            unit_vector(3, 1),
            f.idempotent(2),
            vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(1.0, 0.5)],
        ];
        let mut order = [0usize, 1, 2, 3];
        let mut k = perm;
        for i in (1..4).rev() {
            order.swap(i, k % (i + 1));
            k /= i + 1;
        }
        let base = ctx.g0([&v[0], &v[1], &v[2], &v[3]]);
        let permuted = ctx.g0([&v[order[0]], &v[order[1]], &v[order[2]], &v[order[3]]]);
        prop_assert!((base - permuted).norm() < 1e-9 * (1.0 + base.norm()));
    }

    #[test]
    fn genus0_route_and_virasoro(t1 in -0.5f64..0.5, t2 in -0.5f64..0.5, t3 in -0.3f64..0.3) {
        let (m, f) = plane(&[t1, t2, t3]);
        let data = genus_one_data(&m, &f).unwrap();
        prop_assert!(data.cross_residual < 1e-9, "{}", data.cross_residual);
        prop_assert!(virasoro_l1_check(&f).residual < 1e-9);
    }

    #[test]
    fn getzler_along_idempotents(t2 in -0.4f64..0.4, t3 in -0.2f64..0.2, i in 0usize..3, j in 0usize..3) {
        let (m, f) = plane(&[0.0, t2, t3]);
        let check = getzler_check(&m, &f, i, j, 1e-5).unwrap();
        prop_assert!(check.residual < 1e-5, "{}", check.residual);
    }
}
