use ccr_krein::scalar::{Exact, One, Scalar, Zero};
use ccr_krein::sl2::{
    adjoint_action, adjoint_by_matrix, classify_orbit, classify_orbit_exact, compose_params, conjugation_from_v,
    is_bogoliubov, Mat2, OrbitKind, SlVector,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn conjugation_examples() {
    assert_eq!(conjugation_from_v(&Mat2::<Exact>::identity(), 0.0).unwrap(), Mat2::sigma1());
    assert_eq!(conjugation_from_v(&Mat2::<Exact>::schroedinger(), 0.0).unwrap(), Mat2::sigma3());
    let numeric = conjugation_from_v(&Mat2::schroedinger_c64(), 1e-12).unwrap();
    assert!(numeric.near(&Mat2::sigma3(), 1e-15));
}

#[test]
fn bogoliubov_examples() {
    let s1 = Mat2::<Complex64>::sigma1();
    assert!(is_bogoliubov(&Mat2::identity(), &s1, 1e-12));
    assert!(is_bogoliubov(&Mat2::<Complex64>::identity(), &Mat2::sigma3(), 1e-12));
    let u = Mat2::new([[c(0.0, 0.4).exp(), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -0.4).exp()]]);
    assert!(is_bogoliubov(&u, &s1, 1e-12));
    let scaling = Mat2::new([[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
    assert!(!is_bogoliubov(&scaling, &s1, 1e-12));
}

#[test]
fn adjoint_action_examples() {
    let n = SlVector::from_f64(0.3, -1.2, 2.0);
    assert_eq!(adjoint_action(c(0.0, 0.0), c(0.0, 0.0), &n), n);
    let (a, b) = (c(0.2, -0.7), c(1.1, 0.4));
    let e2a = (2.0 * a).exp();
    let got = adjoint_action(a, b, &SlVector::from_f64(0.0, 1.0, 1.0));
    let want = SlVector::new(b, e2a * (1.0 - b * b), 1.0 / e2a);
    assert!(got.max_abs_diff(&want) < 1e-14);
    let got = adjoint_action(a, b, &SlVector::from_f64(0.0, 0.0, 1.0));
    let want = SlVector::new(b, -e2a * b * b, 1.0 / e2a);
    assert!(got.max_abs_diff(&want) < 1e-14);
}

#[test]
fn adjoint_action_is_matrix_conjugation() {
    let (a, b) = (c(0.3, 0.2), c(-0.5, 0.9));
    let n = SlVector::from_f64(0.7, 0.1, -1.3);
    let by_matrix = adjoint_by_matrix(&Mat2::s_exp(a, b), &n).unwrap();
    assert!(by_matrix.max_abs_diff(&adjoint_action(a, b, &n)) < 1e-13);
}

#[test]
fn classification_examples() {
    let cases = [
        ((0.0, 1.0, 0.0), OrbitKind::SigmaPlus),
        ((1.0, 5.0, 0.0), OrbitKind::SigmaThree),
        ((0.0, 1.0, 1.0), OrbitKind::SigmaOne),
        ((1.0, -1.0, 1.0), OrbitKind::SigmaMinus),
    ];
    for ((n3, nm, np), kind) in cases {
        let n = SlVector::from_f64(n3, nm, np);
        let t = classify_orbit(&n).unwrap();
        assert_eq!(t.kind, kind);
        let w = t.witness.unwrap();
        assert!(w.reproduce(kind).max_abs_diff(&n) < 1e-12, "{kind:?}");
        let ex = SlVector::new(Exact::from_i64(n3 as i64), Exact::from_i64(nm as i64), Exact::from_i64(np as i64));
        assert_eq!(classify_orbit_exact(&ex).unwrap(), kind);
    }
    assert_eq!(classify_orbit(&SlVector::from_f64(0.0, 1.0, 1.0)).unwrap().q, c(1.0, 0.0));
    assert_eq!(classify_orbit(&SlVector::from_f64(1.0, -1.0, 1.0)).unwrap().q, c(0.0, 0.0));
    assert!(OrbitKind::SigmaMinus.is_degenerate() && !OrbitKind::SigmaOne.is_degenerate());
}

#[test]
fn zero_vector_is_rejected() {
    assert_eq!(classify_orbit(&SlVector::from_f64(0.0, 0.0, 0.0)).unwrap_err().code(), "ZeroVector");
    let z = Exact::from_i64(0);
    assert!(classify_orbit_exact(&SlVector::new(z.clone(), z.clone(), z)).is_err());
}

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn vector() -> impl Strategy<Value = SlVector> {
    (complex(2.0), complex(2.0), complex(2.0))
        .prop_filter("nonzero", |(a, b, d)| a.norm() + b.norm() + d.norm() > 0.1)
        .prop_map(|(a, b, d)| SlVector::new(a, b, d))
}

fn gauss() -> impl Strategy<Value = Exact> {
    let q = (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)));
    (q.clone(), q).prop_map(|(re, im)| Exact::gaussian(re, im))
}

fn unimodular_exact() -> impl Strategy<Value = Mat2<Exact>> {
    (gauss(), gauss(), gauss()).prop_filter_map("a = 0", |(a, b, c)| {
        let d = (Exact::one() + b.clone() * c.clone()).checked_div(&a)?;
        Some(Mat2::new([[a, b], [c, d]]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn adjoint_action_composes(a1 in complex(0.5), b1 in complex(1.0), a2 in complex(0.5), b2 in complex(1.0), n in vector()) {
        let twice = adjoint_action(a2, b2, &adjoint_action(a1, b1, &n));
        let (a, b) = compose_params((a1, b1), (a2, b2));
        let once = adjoint_action(a, b, &n);
        prop_assert!(twice.max_abs_diff(&once) < 1e-8 * (1.0 + once.norm()));
    }

    #[test]
    fn classification_is_invariant(a in complex(0.5), b in complex(1.0), n in vector()) {
        let before = classify_orbit(&n).unwrap();
        let after = classify_orbit(&adjoint_action(a, b, &n)).unwrap();
        prop_assert_eq!(before.kind, after.kind);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn q_is_exactly_invariant(t in gauss(), b in gauss(), n3 in gauss(), nm in gauss(), np in gauss()) {
        prop_assume!(!t.is_zero());
        let n = SlVector::new(n3, nm, np);
        let moved = n.act_scaled(&t, &b).unwrap();
        prop_assert_eq!(moved.q(), n.q());
    }

    #[test]
    fn bogoliubov_iff_conjugation_unchanged(v in unimodular_exact(), t in unimodular_exact()) {
        let cm = conjugation_from_v(&v, 0.0).unwrap();
        let moved = conjugation_from_v(&v.mul(&t), 0.0).unwrap();
        prop_assert_eq!(is_bogoliubov(&t, &cm, 0.0), moved == cm);
    }

    #[test]
    fn conjugated_unitaries_are_bogoliubov(v in unimodular_exact(), p in gauss()) {
        // T₀ = diag(u, ū) with |u| = 1 commutes with σ₁ up to conjugation
        let one = BigRational::one();
        let s = p.re.rat.clone();
        let den = &one + &s * &s;
        let u = Exact::gaussian((&one - &s * &s) / &den, BigRational::from_integer(2.into()) * &s / &den);
        let zero = Exact::from_i64(0);
        let t0 = Mat2::new([[u.clone(), zero.clone()], [zero, u.conj()]]);
        let t = v.inverse().unwrap().mul(&t0).mul(&v);
        let cm = conjugation_from_v(&v, 0.0).unwrap();
        prop_assert!(is_bogoliubov(&t, &cm, 0.0));
        prop_assert_eq!(conjugation_from_v(&v.mul(&t), 0.0).unwrap(), cm);
    }
}
