use frobenius_forge::descendants::{bar, t_op, Expr, Reducer, RewriteMode};
use frobenius_forge::frame::{directional_derivative_from, euler_field, Quantity};
use frobenius_forge::numeric::c;
use itertools::iproduct;
use frobenius_forge::{builtin_catalog, canonical_frame, CanonicalFrame, EvalPoint, FrameOptions, FrobeniusModel, C64};
use proptest::prelude::*;

fn setup(name: &str, point: &[f64]) -> (FrobeniusModel, CanonicalFrame) {
    let m = builtin_catalog(name, 5).unwrap();
    let f = canonical_frame(&m, &EvalPoint::from_real(point), &FrameOptions::default()).unwrap();
    (m, f)
}

fn both_modes<'a>(m: &'a FrobeniusModel, f: &'a CanonicalFrame) -> [Reducer<'a>; 2] {
    [
        Reducer::new(m, &f.point, Some(f)).unwrap(),
        Reducer::new(m, &f.point, Some(f))
            .unwrap()
            .with_mode(RewriteMode::ExpansionOnly),
    ]
}

#[test]
fn property_ii_on_the_line() {
    let (m, f) = setup("P1", &[0.0, 0.0]);
    for r in both_modes(&m, &f) {
        for (a, b, cc, d) in iproduct!(0..2, 0..2, 0..2, 0..2) {
            let lhs = r
                .correlator(&[t_op(Expr::gamma(a)), Expr::gamma(b), Expr::gamma(cc), Expr::gamma(d)])
                .unwrap();
            let rhs = r
                .correlator(&[Expr::gamma(a).prod(Expr::gamma(b)), Expr::gamma(cc), Expr::gamma(d)])
                .unwrap();
            assert!((lhs - rhs).norm() < 1e-12, "{:?} {a}{b}{cc}{d}", r.mode());
        }
    }
}

#[test]
fn bar_examples() {
    let (m, f) = setup("P1", &[0.0, 0.0]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    let s_bar = r.expand(&bar(Expr::S)).unwrap().primary_part().unwrap();
    assert!((s_bar[0] - c(1.0)).norm() < 1e-14 && s_bar[1].norm() < 1e-14);
    let x_bar = r.expand(&bar(Expr::X)).unwrap().primary_part().unwrap();
    assert!(x_bar[0].norm() < 1e-14 && (x_bar[1] - c(2.0)).norm() < 1e-14);
    let u_sum: Vec<C64> = (0..2)
        .map(|a| (0..2).map(|i| f.u[i] * f.idempotent(i)[a]).sum())
        .collect();
    assert!((u_sum[1] - c(2.0)).norm() < 1e-12);
    for a in 0..2 {
        assert!(r.expand(&bar(t_op(Expr::gamma(a)))).unwrap().is_zero());
        let back = r.expand(&t_op(Expr::gamma(a)).tau_minus()).unwrap();
        assert!(back.max_diff(&r.expand(&Expr::gamma(a)).unwrap()) < 1e-14);
    }
}

#[test]
fn dilaton_expansion() {
    let (m, f) = setup("P2", &[0.1, 0.2, -0.1]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    let d = r.expand(&t_op(Expr::S)).unwrap();
    assert_eq!(d.top_level(), Some(1));
    assert!((d.coeff(1, 0).value().unwrap() - c(1.0)).norm() < 1e-14);
    for a in 1..3 {
        assert!(d.coeff(1, a).value().unwrap().norm() < 1e-14);
    }
    assert!(r.expand(&bar(t_op(Expr::S))).unwrap().is_zero());
}

#[test]
fn string_routes_and_metric() {
    let (m, f) = setup("P2", &[0.1, -0.2, 0.05]);
    for r in both_modes(&m, &f) {
        for a in 0..3 {
            for b in 0..3 {
                let eta = m.eta()[(a, b)];
                assert!((r.inner(&Expr::gamma(a), &Expr::gamma(b)).unwrap() - eta).norm() < 1e-12);
                let w = Expr::gamma(a).add(Expr::gamma(b).scale(c(0.5)));
                let v = Expr::gamma(b);
                let direct = r.correlator(&[Expr::S, w.clone(), v.clone()]).unwrap();
                let via_product = r.correlator(&[Expr::S, Expr::S, w.clone().prod(v.clone())]).unwrap();
                assert!((direct - via_product).norm() < 1e-10);
                let dead = r.correlator(&[Expr::S, t_op(Expr::gamma(a)), v]).unwrap();
                assert!(dead.norm() < 1e-10, "{dead}");
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let g = r.inner(&Expr::idempotent(i), &Expr::idempotent(j)).unwrap();
                let want = if i == j { f.g[i] } else { c(0.0) };
                assert!((g - want).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn k2_decomposition() {
    let (m, f) = setup("P2", &[0.3, 0.1, -0.2]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    let fields = [
        Expr::X,
        Expr::L0,
        t_op(t_op(Expr::gamma(0))),
        t_op(t_op(Expr::gamma(2))),
    ];
    for w in fields {
        let whole = r.expand(&w).unwrap();
        let pieces = t_op(t_op(w.clone().tau_minus().tau_minus()))
            .add(t_op(bar(w.clone().tau_minus())))
            .add(bar(w.clone()));
        let parts = r.expand(&pieces).unwrap();
        assert!(whole.max_diff(&parts) < 1e-12, "{w:?}");
    }
}

#[test]
fn l0_lowering() {
    let (m, f) = setup("P2", &[0.2, -0.1, 0.1]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    let b1 = m.b_f64()[0];
    let once = r.expand(&Expr::L0.tau_minus()).unwrap();
    let want = r.expand(&Expr::gamma(0).scale(c(-(b1 + 1.0)))).unwrap();
    assert!(once.max_diff(&want) < 1e-14);
    assert!(r.expand(&Expr::L0.tau_minus().tau_minus()).unwrap().is_zero());
    for i in 0..3 {
        let mut acc = c(0.0);
        for a in 0..3 {
            for b in 0..3 {
                let w = m.eta_inv()[(a, b)];
                if w.norm() > 0.0 {
                    acc += w * r
                        .correlator(&[
                            Expr::idempotent(i),
                            Expr::L0.tau_minus(),
                            Expr::gamma(a),
                            Expr::gamma(b),
                        ])
                        .unwrap();
                }
            }
        }
        assert!(acc.norm() < 1e-10);
    }
}

/// `−(r_ii + X̄ r_ii) + Σ_{j,k} {−√(g_j/g_k) u_j r_ij r_ik + (√(g_i g_j)/g_k) u_j r_ik r_jk} = 0`.
#[test]
fn rotation_identity_from_four_point_lemma() {
    for (name, point) in [("P1", vec![0.1, -0.3]), ("P2", vec![0.1, 0.2, -0.1])] {
        let (m, f) = setup(&name, &point);
        let n = m.dim();
        let x = euler_field(&m, &f.point);
        let dr = directional_derivative_from(&m, &f, &x, Quantity::Gamma, 1e-4).unwrap();
        for i in 0..n {
            let mut acc = -(f.gamma[(i, i)] + dr.value[i * n + i]);
            for j in 0..n {
                for k in 0..n {
                    acc -= f.sqrt_g[j] / f.sqrt_g[k] * f.u[j] * f.gamma[(i, j)] * f.gamma[(i, k)];
                    acc += f.sqrt_g[i] * f.sqrt_g[j] / f.g[k]
                        * f.u[j]
                        * f.gamma[(i, k)]
                        * f.gamma[(j, k)];
                }
            }
            assert!(acc.norm() < 1e-7, "{name} {i} {acc}");
        }
    }
}

#[test]
fn four_point_lemma_items() {
    let (m, f) = setup("P2", &[0.1, 0.2, -0.1]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    for a in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let s = r
                    .correlator(&[Expr::S, Expr::gamma(a), Expr::idempotent(i), Expr::idempotent(j)])
                    .unwrap();
                assert!(s.norm() < 1e-10);
                for w in [Expr::gamma(a), t_op(Expr::gamma(a))] {
                    let x = r
                        .correlator(&[w.clone(), Expr::idempotent(i), Expr::idempotent(i), Expr::idempotent(j)])
                        .unwrap();
                    let y = r
                        .correlator(&[w, Expr::idempotent(j), Expr::idempotent(j), Expr::idempotent(i)])
                        .unwrap();
                    assert!((x + y).norm() < 1e-10, "{x} {y}");
                }
            }
        }
    }
}

#[test]
fn too_few_slots_and_level_cap() {
    let (m, f) = setup("P1", &[0.0, 0.0]);
    let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
    assert!(r.correlator(&[Expr::gamma(0), Expr::gamma(1)]).is_err());
    let deep = t_op(t_op(t_op(Expr::gamma(1))));
    assert!(r.expand(&deep).is_err());
    let r3 = Reducer::new(&m, &f.point, Some(&f)).unwrap().with_max_level(3);
    assert!(r3.expand(&deep).is_ok());
}

fn atom(code: u8, a: usize) -> Expr {
    match code % 4 {
        0 => Expr::gamma(a),
        1 => t_op(Expr::gamma(a)),
        2 => Expr::S,
        _ => Expr::X,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rules_agree_with_plain_expansion(
        t in prop::collection::vec(-0.4f64..0.4, 3),
        codes in prop::collection::vec((0u8..4, 0usize..3), 4),
    ) {
        let (m, f) = setup("P2", &t);
        let [rules, plain] = both_modes(&m, &f);
        let args: Vec<Expr> = codes.iter().map(|(k, a)| atom(*k, *a)).collect();
        let x = rules.correlator(&args);
        let y = plain.correlator(&args);
        match (x, y) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).norm() < 1e-9 * (1.0 + x.norm())),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{x:?} vs {y:?}"),
        }
    }

    #[test]
    fn lowering_inverts_raising(coeffs in prop::collection::vec(-2.0f64..2.0, 3), level in 0u32..2) {
        let (m, f) = setup("P2", &[0.0, 0.0, 0.0]);
        let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
        let mut w = Expr::primary(coeffs.iter().map(|x| c(*x)).collect());
        for _ in 0..level {
            w = t_op(w);
        }
        let up_down = r.expand(&w.clone().tau_plus().tau_minus()).unwrap();
        prop_assert!(up_down.max_diff(&r.expand(&w).unwrap()) < 1e-14);
    }

    #[test]
    fn inner_is_symmetric(a in 0usize..3, b in 0usize..3, s in -1.0f64..1.0) {
        let (m, f) = setup("P2", &[s, 0.1, 0.0]);
        let r = Reducer::new(&m, &f.point, Some(&f)).unwrap();
        let wa = Expr::gamma(a).add(Expr::X.scale(c(s)));
        let vb = Expr::gamma(b);
        let x = r.inner(&wa, &vb).unwrap();
        let y = r.inner(&vb, &wa).unwrap();
        prop_assert!((x - y).norm() < 1e-12);
    }
}
