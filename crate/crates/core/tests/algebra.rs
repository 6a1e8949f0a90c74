use std::collections::BTreeMap;

use ccr_krein::algebra::{
    apply_involution, apply_isomorphism, commutator, gauge_transform, is_normal_ordered, normal_order, AlgebraElement,
    EtaSignature, Generator, GeneratorSet, Involution,
};
use ccr_krein::expr::parse_element;
use ccr_krein::scalar::{Exact, One, Scalar, Zero};
use ccr_krein::sl2::{conjugation_from_v, Mat2};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn el(text: &str) -> AlgebraElement {
    parse_element(text, None).unwrap()
}

fn el_eta(text: &str, eta: &EtaSignature) -> AlgebraElement {
    parse_element(text, Some(eta)).unwrap()
}

fn gen(g: Generator) -> AlgebraElement {
    AlgebraElement::gen(GeneratorSet::Holomorphic, g)
}

fn mul(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    x.checked_mul(y).unwrap()
}

#[test]
fn normal_order_examples() {
    let (z, d) = (gen(Generator::Z), gen(Generator::D));
    assert_eq!(normal_order(&mul(&d, &z)), el("z d + 1"));
    let dz = mul(&d, &z);
    assert_eq!(normal_order(&mul(&dz, &dz)), el("z^2 d^2 + 3 z d + 1"));

    let eta = EtaSignature::new(vec![1, -1]).unwrap();
    let set = GeneratorSet::MultiMode(eta.clone());
    let a1 = AlgebraElement::gen(set.clone(), Generator::mode(1));
    let a2s = AlgebraElement::gen(set.clone(), Generator::mode_star(2));
    assert_eq!(normal_order(&mul(&a1, &a2s)), el_eta("a_2* a_1", &eta));

    let neg = EtaSignature::new(vec![-1]).unwrap();
    let set = GeneratorSet::MultiMode(neg.clone());
    let a = AlgebraElement::gen(set.clone(), Generator::mode(1));
    let astar = AlgebraElement::gen(set, Generator::mode_star(1));
    assert_eq!(normal_order(&mul(&a, &astar)), el_eta("a_1* a_1 - 1", &neg));
}

#[test]
fn commutator_examples() {
    let heis = GeneratorSet::Heisenberg;
    let a = AlgebraElement::gen(heis.clone(), Generator::A);
    let astar = AlgebraElement::gen(heis.clone(), Generator::AStar);
    assert_eq!(commutator(&a, &astar).unwrap(), AlgebraElement::one(heis));
    let z = gen(Generator::Z);
    assert!(commutator(&z, &z).unwrap().is_zero());
    assert_eq!(commutator(&el("z d"), &z).unwrap(), z);
}

#[test]
fn mixed_sets_are_rejected() {
    let a = AlgebraElement::gen(GeneratorSet::Heisenberg, Generator::A);
    let z = gen(Generator::Z);
    assert_eq!(z.checked_mul(&a).unwrap_err().code(), "IncompatibleAlgebras");
    assert_eq!(commutator(&z, &a).unwrap_err().code(), "IncompatibleAlgebras");
    assert!(AlgebraElement::<Exact>::generator(GeneratorSet::Holomorphic, Generator::A).is_err());
}

#[test]
fn involution_examples() {
    let k1 = Involution::new(Mat2::<Exact>::sigma1(), 0.0).unwrap();
    assert_eq!(apply_involution(&k1, &el("z")).unwrap(), el("d"));
    // K(z d) = K(d) K(z) = z d
    assert_eq!(apply_involution(&k1, &el("z d")).unwrap(), el("z d"));
    let k3 = Involution::new(Mat2::<Exact>::sigma3(), 0.0).unwrap();
    assert_eq!(apply_involution(&k3, &el("i z")).unwrap(), el("-i z"));
    assert_eq!(apply_involution(&k3, &el("d")).unwrap(), el("-d"));
}

#[test]
fn involution_rejects_bad_matrices() {
    let bad = Mat2::new([[Exact::from_i64(2), Exact::zero()], [Exact::zero(), Exact::one()]]);
    assert_eq!(Involution::new(bad, 0.0).unwrap_err().code(), "InvalidInvolution");
    // conj(C) C = 1 but det C = +1
    assert!(Involution::new(Mat2::<Exact>::identity(), 0.0).is_err());
}

#[test]
fn isomorphism_examples() {
    let heis = GeneratorSet::Heisenberg;
    let number = el("a* a");
    assert_eq!(number.set(), &heis);
    assert_eq!(apply_isomorphism(&Mat2::identity(), &number, 0.0).unwrap(), el("z d"));
    let schroedinger = apply_isomorphism(&Mat2::<Exact>::schroedinger(), &number, 0.0).unwrap();
    assert_eq!(schroedinger, el("(1/2)(z^2 - d^2 - 1)"));
    let bracket = commutator(&el("a"), &el("a*")).unwrap();
    assert_eq!(apply_isomorphism(&Mat2::identity(), &bracket, 0.0).unwrap(), el("1"));
    let sheared = Mat2::new([[Exact::one(), Exact::one()], [Exact::one(), Exact::one()]]);
    assert_eq!(apply_isomorphism(&sheared, &number, 0.0).unwrap_err().code(), "NotUnimodular");
}

#[test]
fn gauge_transform_scales_modes() {
    let u = Exact::gaussian(BigRational::new(3.into(), 5.into()), BigRational::new(4.into(), 5.into()));
    let x = el("a* a + a");
    let y = gauge_transform(&x, &u).unwrap();
    assert_eq!(y.coeff(&[Generator::AStar, Generator::A]), u.conj() * u.clone());
    assert_eq!(y.coeff(&[Generator::A]), u);
}

#[test]
fn bracket_table() {
    let eta = EtaSignature::new(vec![1, -1, 1]).unwrap();
    let set = GeneratorSet::MultiMode(eta);
    let gens: Vec<Generator> = (1..=3).flat_map(|i| [Generator::mode(i), Generator::mode_star(i)]).collect();
    for &x in &gens {
        for &y in &gens {
            assert_eq!(set.bracket(x, y), -set.bracket(y, x));
            if x.is_creation() == y.is_creation() {
                assert_eq!(set.bracket(x, y), 0);
            }
        }
    }
    assert_eq!(set.bracket(Generator::mode(2), Generator::mode_star(2)), -1);
    assert_eq!(set.bracket(Generator::mode(1), Generator::mode_star(3)), 0);
    assert!(EtaSignature::new(vec![1, 0]).is_err());
}

// exact action on polynomials, independent of the rewriting engine

type Poly = BTreeMap<u32, BigRational>;

fn act_word(word: &[Generator], p: &Poly) -> Poly {
    let mut cur = p.clone();
    for g in word.iter().rev() {
        let mut next = Poly::new();
        for (k, v) in &cur {
            match g {
                Generator::Z => *next.entry(k + 1).or_insert_with(BigRational::zero) += v,
                Generator::D if *k > 0 => {
                    *next.entry(k - 1).or_insert_with(BigRational::zero) += v * BigRational::from_integer((*k).into())
                }
                _ => {}
            }
        }
        next.retain(|_, v| !v.is_zero());
        cur = next;
    }
    cur
}

fn rational(x: &Exact) -> BigRational {
    assert!(x.im.rat.is_zero() && x.im.irr.is_zero() && x.re.irr.is_zero());
    x.re.rat.clone()
}

fn act(x: &AlgebraElement, p: &Poly) -> Poly {
    let mut out = Poly::new();
    for (w, c) in x.terms() {
        let q = rational(c);
        for (k, v) in act_word(w, p) {
            *out.entry(k).or_insert_with(BigRational::zero) += v * &q;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn words() -> impl Strategy<Value = Vec<(Vec<bool>, i64, i64)>> {
    prop::collection::vec((prop::collection::vec(any::<bool>(), 0..5), -5i64..=5, 1i64..=4), 0..5)
}

fn element(terms: &[(Vec<bool>, i64, i64)]) -> AlgebraElement {
    AlgebraElement::from_terms(
        GeneratorSet::Holomorphic,
        terms.iter().map(|(w, n, d)| {
            (w.iter().map(|&b| if b { Generator::Z } else { Generator::D }).collect(), Exact::from_ratio(*n, *d))
        }),
    )
    .unwrap()
}

fn gauss_element(terms: &[(Vec<bool>, i64, i64)]) -> AlgebraElement {
    AlgebraElement::from_terms(
        GeneratorSet::Holomorphic,
        terms.iter().map(|(w, n, d)| {
            let c = Exact::gaussian(BigRational::new((*n).into(), 1.into()), BigRational::new((*d).into(), 3.into()));
            (w.iter().map(|&b| if b { Generator::Z } else { Generator::D }).collect(), c)
        }),
    )
    .unwrap()
}

fn unimodular() -> impl Strategy<Value = Mat2<Exact>> {
    let q = (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)));
    let g = (q.clone(), q).prop_map(|(re, im)| Exact::gaussian(re, im));
    (g.clone(), g.clone(), g).prop_filter_map("a = 0", |(a, b, c)| {
        let d = (Exact::one() + b.clone() * c.clone()).checked_div(&a)?;
        Some(Mat2::new([[a, b], [c, d]]))
    })
}

proptest! {
    #[test]
    fn normal_order_is_idempotent_and_linear(x in words(), y in words(), n in -4i64..4) {
        let (x, y) = (element(&x), element(&y));
        let nx = normal_order(&x);
        prop_assert!(is_normal_ordered(&nx));
        prop_assert_eq!(normal_order(&nx), nx.clone());
        let sum = normal_order(&x.checked_add(&y).unwrap());
        prop_assert_eq!(sum, nx.checked_add(&normal_order(&y)).unwrap());
        let s = Exact::from_i64(n);
        prop_assert_eq!(normal_order(&x.scale(&s)), nx.scale(&s));
        prop_assert!(nx.terms().values().all(|c| !c.is_zero()));
    }

    #[test]
    fn product_matches_composed_action(x in words(), y in words()) {
        let (x, y) = (element(&x), element(&y));
        let prod = normal_order(&x.checked_mul(&y).unwrap());
        for n in 0..=10u32 {
            let mono: Poly = [(n, BigRational::one())].into_iter().collect();
            prop_assert_eq!(act(&prod, &mono), act(&x, &act(&y, &mono)));
        }
    }

    #[test]
    fn involutions_square_to_identity_and_reverse_products(v in unimodular(), x in words(), y in words()) {
        let k = Involution::new(conjugation_from_v(&v, 0.0).unwrap(), 0.0).unwrap();
        let (x, y) = (gauss_element(&x), gauss_element(&y));
        let kx = apply_involution(&k, &x).unwrap();
        prop_assert_eq!(apply_involution(&k, &kx).unwrap(), normal_order(&x));
        let kxy = apply_involution(&k, &x.checked_mul(&y).unwrap()).unwrap();
        let kykx = normal_order(&apply_involution(&k, &y).unwrap().checked_mul(&kx).unwrap());
        prop_assert_eq!(kxy, kykx);
    }

    #[test]
    fn isomorphisms_preserve_the_ccr(v in unimodular()) {
        let heis = GeneratorSet::Heisenberg;
        let a = apply_isomorphism(&v, &AlgebraElement::gen(heis.clone(), Generator::A), 0.0).unwrap();
        let astar = apply_isomorphism(&v, &AlgebraElement::gen(heis, Generator::AStar), 0.0).unwrap();
        prop_assert_eq!(commutator(&a, &astar).unwrap(), AlgebraElement::one(GeneratorSet::Holomorphic));
    }
}
