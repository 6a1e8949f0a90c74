//! Noncommutative *-algebras generated by creation/annihilation pairs.
//!
//! Three generator sets are supported: the holomorphic operators `z`, `d`
//! (with `[d, z] = 1`), the Heisenberg pair `a`, `a*` (with `[a, a*] = 1`),
//! and multimode generators `a_i`, `a_i*` with `[a_i, a_j*] = δ_ij η_i`.
//! Elements are finite linear combinations of words; [`normal_order`]
//! rewrites them to the creation-left normal form, which is unique.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Exact, Scalar};
use crate::sl2::Mat2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Z,
    D,
    A,
    AStar,
    /// `a_index` or `a_index*`; modes are numbered from 1.
    Mode {
        index: u32,
        dagger: bool,
    },
}

impl Generator {
    pub fn is_creation(self) -> bool {
        matches!(self, Generator::Z | Generator::AStar | Generator::Mode { dagger: true, .. })
    }

    /// Sort key of the normal form: creation type first, then mode index.
    fn order_key(self) -> (u8, u32) {
        let kind = if self.is_creation() { 0 } else { 1 };
        let index = match self {
            Generator::Mode { index, .. } => index,
            _ => 0,
        };
        (kind, index)
    }

    pub fn mode(index: u32) -> Self {
        Generator::Mode { index, dagger: false }
    }

    pub fn mode_star(index: u32) -> Self {
        Generator::Mode { index, dagger: true }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Z => write!(f, "z"),
            Generator::D => write!(f, "d"),
            Generator::A => write!(f, "a"),
            Generator::AStar => write!(f, "a*"),
            Generator::Mode { index, dagger: false } => write!(f, "a_{index}"),
            Generator::Mode { index, dagger: true } => write!(f, "a_{index}*"),
        }
    }
}

/// Signs η_i = ±1 of the multimode relations `[a_i, a_j*] = δ_ij η_i`.
///
/// With a `tail` sign the signature is unbounded: every mode past the
/// explicit list carries the tail sign, so modes can be used on demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaSignature {
    signs: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<i8>,
}

impl EtaSignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidInput(format!("eta entries must be +1 or -1, got {bad}")));
        }
        Ok(Self { signs, tail: None })
    }

    pub fn unbounded(signs: Vec<i8>, tail: i8) -> Result<Self> {
        let mut sig = Self::new(signs)?;
        if tail != 1 && tail != -1 {
            return Err(Error::InvalidInput(format!("eta tail must be +1 or -1, got {tail}")));
        }
        sig.tail = Some(tail);
        Ok(sig)
    }

    /// All-positive signature: the standard Heisenberg algebra in `m` modes.
    pub fn standard(m: usize) -> Self {
        Self { signs: vec![1; m], tail: None }
    }

    /// η of mode `index` (1-based), `None` outside a finite signature.
    pub fn eta(&self, index: u32) -> Option<i8> {
        if index == 0 {
            return None;
        }
        self.signs.get(index as usize - 1).copied().or(self.tail)
    }

    pub fn explicit(&self) -> &[i8] {
        &self.signs
    }

    /// Number of modes, `None` when unbounded.
    pub fn modes(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.signs.len()),
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.tail.is_some()
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|s| **s < 0).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "eta", rename_all = "snake_case")]
pub enum GeneratorSet {
    Holomorphic,
    Heisenberg,
    MultiMode(EtaSignature),
}

impl GeneratorSet {
    pub fn contains(&self, g: Generator) -> bool {
        match (self, g) {
            (GeneratorSet::Holomorphic, Generator::Z | Generator::D) => true,
            (GeneratorSet::Heisenberg, Generator::A | Generator::AStar) => true,
            (GeneratorSet::MultiMode(eta), Generator::Mode { index, .. }) => eta.eta(index).is_some(),
            _ => false,
        }
    }

    /// The commutator `[x, y]` of two generators; always a scalar here.
    pub fn bracket(&self, x: Generator, y: Generator) -> i64 {
        if x.is_creation() == y.is_creation() {
            return 0;
        }
        if x.is_creation() {
            return -self.bracket(y, x);
        }
        match (self, x, y) {
            (GeneratorSet::Holomorphic, Generator::D, Generator::Z) => 1,
            (GeneratorSet::Heisenberg, Generator::A, Generator::AStar) => 1,
            (GeneratorSet::MultiMode(eta), Generator::Mode { index: i, .. }, Generator::Mode { index: j, .. })
                if i == j =>
            {
                eta.eta(i).map(i64::from).unwrap_or(0)
            }
            _ => 0,
        }
    }

    fn name(&self) -> String {
        match self {
            GeneratorSet::Holomorphic => "holomorphic(z, d)".into(),
            GeneratorSet::Heisenberg => "heisenberg(a, a*)".into(),
            GeneratorSet::MultiMode(eta) => format!("multimode(eta = {:?})", eta.explicit()),
        }
    }
}

pub type Word = Vec<Generator>;

/// Finite linear combination of words over a generator set.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<C: Scalar = Exact> {
    set: GeneratorSet,
    terms: BTreeMap<Word, C>,
}

impl<C: Scalar> AlgebraElement<C> {
    pub fn zero(set: GeneratorSet) -> Self {
        Self { set, terms: BTreeMap::new() }
    }

    pub fn scalar(set: GeneratorSet, c: C) -> Self {
        Self::from_terms(set, [(Vec::new(), c)]).expect("empty word is always valid")
    }

    pub fn one(set: GeneratorSet) -> Self {
        Self::scalar(set, C::one())
    }

    pub fn generator(set: GeneratorSet, g: Generator) -> Result<Self> {
        Self::from_terms(set, [(vec![g], C::one())])
    }

    /// Builds an element, summing repeated words and dropping zero terms.
    pub fn from_terms(set: GeneratorSet, terms: impl IntoIterator<Item = (Word, C)>) -> Result<Self> {
        let mut out = Self::zero(set);
        for (w, c) in terms {
            if let Some(g) = w.iter().find(|g| !out.set.contains(**g)) {
                return Err(Error::IncompatibleAlgebras(format!("generator {g} is not in {}", out.set.name())));
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&w) {
            Some(prev) => {
                let sum = prev + c;
                if !sum.is_zero() {
                    self.terms.insert(w, sum);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn set(&self) -> &GeneratorSet {
        &self.set
    }

    pub fn terms(&self) -> &BTreeMap<Word, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a word as stored (not normal-ordered first).
    pub fn coeff(&self, w: &[Generator]) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.set != other.set {
            return Err(Error::IncompatibleAlgebras(format!("{} vs {}", self.set.name(), other.set.name())));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-C::one()))
    }

    /// Free product (concatenation of words); call [`normal_order`] to reduce.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.set.clone());
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.set.clone());
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.set.clone());
        for _ in 0..n {
            out = out.checked_mul(self).expect("same set");
        }
        out
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> AlgebraElement<D> {
        let mut out = AlgebraElement::zero(self.set.clone());
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Terms in display order: higher degree first, then normal-form order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(w, _)| (Reverse(w.len()), w.iter().map(|g| g.order_key()).collect::<Vec<_>>()));
        v
    }
}

impl<C: Scalar> std::ops::Add for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn add(self, rhs: Self) -> AlgebraElement<C> {
        self.checked_add(rhs).expect("mixed generator sets; use checked_add")
    }
}

impl<C: Scalar> std::ops::Sub for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn sub(self, rhs: Self) -> AlgebraElement<C> {
        self.checked_sub(rhs).expect("mixed generator sets; use checked_sub")
    }
}

impl<C: Scalar> std::ops::Mul for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn mul(self, rhs: Self) -> AlgebraElement<C> {
        self.checked_mul(rhs).expect("mixed generator sets; use checked_mul")
    }
}

fn first_descent(w: &[Generator]) -> Option<usize> {
    w.windows(2).position(|p| p[0].order_key() > p[1].order_key())
}

/// Rewrites `x` to creation-left normal form.
///
/// Adjacent out-of-order pairs are swapped with `xy = yx + [x, y]`; each swap
/// lowers the inversion count or shortens the word, so the loop terminates.
/// Pending words are merged as they are produced.
pub fn normal_order<C: Scalar>(x: &AlgebraElement<C>) -> AlgebraElement<C> {
    let set = x.set.clone();
    let mut pending: BTreeMap<Word, C> = x.terms.clone();
    let mut out = AlgebraElement::zero(set.clone());
    while let Some((w, c)) = pending.pop_last() {
        if c.is_zero() {
            continue;
        }
        match first_descent(&w) {
            None => out.add_term(w, c),
            Some(k) => {
                let (g, h) = (w[k], w[k + 1]);
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                merge(&mut pending, swapped, c.clone());
                let br = set.bracket(g, h);
                if br != 0 {
                    let mut shorter = w[..k].to_vec();
                    shorter.extend_from_slice(&w[k + 2..]);
                    merge(&mut pending, shorter, c * C::from_i64(br));
                }
            }
        }
    }
    out
}

fn merge<C: Scalar>(map: &mut BTreeMap<Word, C>, w: Word, c: C) {
    match map.remove(&w) {
        Some(prev) => {
            let s = prev + c;
            if !s.is_zero() {
                map.insert(w, s);
            }
        }
        None => {
            map.insert(w, c);
        }
    }
}

pub fn is_normal_ordered<C: Scalar>(x: &AlgebraElement<C>) -> bool {
    x.terms.keys().all(|w| first_descent(w).is_none())
}

/// `normal_order(x·y − y·x)`.
pub fn commutator<C: Scalar>(x: &AlgebraElement<C>, y: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    let xy = x.checked_mul(y)?;
    let yx = y.checked_mul(x)?;
    Ok(normal_order(&xy.checked_sub(&yx)?))
}

/// Replaces every generator by a linear image, optionally conjugating the
/// coefficients and reversing words (for antilinear anti-automorphisms).
fn substitute<C: Scalar>(
    x: &AlgebraElement<C>,
    target: GeneratorSet,
    antilinear: bool,
    image: impl Fn(Generator) -> AlgebraElement<C>,
) -> Result<AlgebraElement<C>> {
    let mut out = AlgebraElement::zero(target.clone());
    for (w, c) in &x.terms {
        let coeff = if antilinear { c.conj() } else { c.clone() };
        let mut prod = AlgebraElement::scalar(target.clone(), coeff);
        let letters: Box<dyn Iterator<Item = &Generator>> =
            if antilinear { Box::new(w.iter().rev()) } else { Box::new(w.iter()) };
        for g in letters {
            prod = prod.checked_mul(&image(*g))?;
        }
        out = out.checked_add(&prod)?;
    }
    Ok(normal_order(&out))
}

fn linear_form<C: Scalar>(set: &GeneratorSet, parts: [(Generator, C); 2]) -> AlgebraElement<C> {
    AlgebraElement::from_terms(set.clone(), parts.map(|(g, c)| (vec![g], c))).expect("generators belong to set")
}

/// Antilinear, product-reversing involution `K` of the holomorphic algebra,
/// fixed on generators by `K(z, d)ᵀ = C_K (z, d)ᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Involution<C: Scalar = Exact> {
    matrix: Mat2<C>,
}

impl<C: Scalar> Involution<C> {
    /// Accepts `C_K` when `C̄_K C_K = 1` (so `K∘K = id`) and `det C_K = -1`
    /// (so `K` respects `[d, z] = 1`). Numeric matrices use `tol`.
    pub fn new(matrix: Mat2<C>, tol: f64) -> Result<Self> {
        let sq = matrix.conj().mul(&matrix);
        if !sq.near(&Mat2::identity(), tol) {
            return Err(Error::InvalidInvolution("conj(C)·C is not the identity".into()));
        }
        if !matrix.det().near(&-C::one(), tol) {
            return Err(Error::InvalidInvolution("det C must be -1".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Mat2<C> {
        &self.matrix
    }
}

pub fn apply_involution<C: Scalar>(k: &Involution<C>, x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    if *x.set() != GeneratorSet::Holomorphic {
        return Err(Error::IncompatibleAlgebras("involutions act on the holomorphic algebra".into()));
    }
    let m = &k.matrix;
    let set = GeneratorSet::Holomorphic;
    substitute(x, set.clone(), true, |g| match g {
        Generator::Z => linear_form(&set, [(Generator::Z, m.get(0, 0)), (Generator::D, m.get(0, 1))]),
        _ => linear_form(&set, [(Generator::Z, m.get(1, 0)), (Generator::D, m.get(1, 1))]),
    })
}

/// Maps a Heisenberg element into the holomorphic algebra through
/// `(a*, a)ᵀ = V (z, d)ᵀ`, then normal-orders.
pub fn apply_isomorphism<C: Scalar>(v: &Mat2<C>, x: &AlgebraElement<C>, tol: f64) -> Result<AlgebraElement<C>> {
    if *x.set() != GeneratorSet::Heisenberg {
        return Err(Error::IncompatibleAlgebras("isomorphism source must be the Heisenberg algebra".into()));
    }
    v.check_unimodular(tol)?;
    let set = GeneratorSet::Holomorphic;
    substitute(x, set.clone(), false, |g| match g {
        Generator::AStar => linear_form(&set, [(Generator::Z, v.get(0, 0)), (Generator::D, v.get(0, 1))]),
        _ => linear_form(&set, [(Generator::Z, v.get(1, 0)), (Generator::D, v.get(1, 1))]),
    })
}

/// Gauge automorphism `a ↦ u·a`, `a* ↦ ū·a*` (`u = e^{-is}`), applied to
/// every mode of a Heisenberg or multimode element.
pub fn gauge_transform<C: Scalar>(x: &AlgebraElement<C>, u: &C) -> Result<AlgebraElement<C>> {
    let set = x.set().clone();
    if set == GeneratorSet::Holomorphic {
        return Err(Error::IncompatibleAlgebras("gauge transformations act on a, a*".into()));
    }
    let s = set.clone();
    substitute(x, set, false, move |g| {
        let c = if g.is_creation() { u.conj() } else { u.clone() };
        AlgebraElement::from_terms(s.clone(), [(vec![g], c)]).expect("generator in set")
    })
}

/// Substitutes each multimode generator by a given image over `target`.
pub(crate) fn substitute_modes<C: Scalar>(
    x: &AlgebraElement<C>,
    target: GeneratorSet,
    image: impl Fn(Generator) -> AlgebraElement<C>,
) -> Result<AlgebraElement<C>> {
    substitute(x, target, false, image)
}

impl AlgebraElement<Exact> {
    /// Convenience for the common exact Heisenberg/holomorphic generators.
    pub fn gen(set: GeneratorSet, g: Generator) -> Self {
        Self::generator(set, g).expect("generator in set")
    }
}

impl<C: Scalar> fmt::Display for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let one = C::one();
        let minus_one = -C::one();
        for (k, (w, c)) in self.sorted_terms().into_iter().enumerate() {
            let word = format_word(w);
            let (neg, body) = if *c == one && !w.is_empty() {
                (false, word)
            } else if *c == minus_one && !w.is_empty() {
                (true, word)
            } else {
                let cs = coeff_string(c);
                let (neg, cs) = match cs.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, cs),
                };
                if w.is_empty() {
                    (neg, cs)
                } else {
                    (neg, format!("{cs} {word}"))
                }
            };
            match (k, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn coeff_string<C: Scalar>(c: &C) -> String {
    let s = format!("{c:?}");
    // Debug of Complex64 is "Complex { re, im }"; print numerically instead
    if s.starts_with("Complex") {
        let z = c.to_c64();
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("({} + {}i)", z.re, z.im)
        }
    } else {
        s
    }
}

fn format_word(w: &[Generator]) -> String {
    let mut parts = Vec::new();
    let mut k = 0;
    while k < w.len() {
        let g = w[k];
        let mut run = 1;
        while k + run < w.len() && w[k + run] == g {
            run += 1;
        }
        if run == 1 {
            parts.push(g.to_string());
        } else {
            parts.push(format!("{g}^{run}"));
        }
        k += run;
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn hol(g: Generator) -> AlgebraElement {
        AlgebraElement::gen(GeneratorSet::Holomorphic, g)
    }

    fn heis(g: Generator) -> AlgebraElement {
        AlgebraElement::gen(GeneratorSet::Heisenberg, g)
    }

    fn num(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    #[test]
    fn d_z_normal_orders_to_z_d_plus_one() {
        let x = &hol(Generator::D) * &hol(Generator::Z);
        let n = normal_order(&x);
        let expected = AlgebraElement::from_terms(
            GeneratorSet::Holomorphic,
            [(vec![Generator::Z, Generator::D], num(1)), (vec![], num(1))],
        )
        .unwrap();
        assert_eq!(n, expected);
        assert_eq!(n.to_string(), "z d + 1");
    }

    #[test]
    fn squared_number_operator_shape() {
        let dz = &hol(Generator::D) * &hol(Generator::Z);
        let n = normal_order(&(&dz * &dz));
        assert_eq!(n.to_string(), "z^2 d^2 + 3 z d + 1");
    }

    #[test]
    fn distinct_modes_commute_and_same_mode_uses_eta() {
        let eta = EtaSignature::new(vec![1, -1]).unwrap();
        let set = GeneratorSet::MultiMode(eta.clone());
        let a1 = AlgebraElement::<Exact>::generator(set.clone(), Generator::mode(1)).unwrap();
        let a2s = AlgebraElement::<Exact>::generator(set.clone(), Generator::mode_star(2)).unwrap();
        let n = normal_order(&(&a1 * &a2s));
        assert_eq!(n.to_string(), "a_2* a_1");

        let set = GeneratorSet::MultiMode(EtaSignature::new(vec![-1]).unwrap());
        let a = AlgebraElement::<Exact>::generator(set.clone(), Generator::mode(1)).unwrap();
        let a_s = AlgebraElement::<Exact>::generator(set, Generator::mode_star(1)).unwrap();
        assert_eq!(normal_order(&(&a * &a_s)).to_string(), "a_1* a_1 - 1");
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&heis(Generator::A), &heis(Generator::AStar)).unwrap().to_string(), "1");
        assert!(commutator(&hol(Generator::Z), &hol(Generator::Z)).unwrap().is_zero());
        let zd = &hol(Generator::Z) * &hol(Generator::D);
        assert_eq!(commutator(&zd, &hol(Generator::Z)).unwrap().to_string(), "z");
    }

    #[test]
    fn mixed_sets_are_rejected() {
        let err = commutator(&hol(Generator::Z), &heis(Generator::A)).unwrap_err();
        assert_eq!(err.code(), "IncompatibleAlgebras");
        assert!(AlgebraElement::<Exact>::generator(GeneratorSet::Holomorphic, Generator::A).is_err());
    }

    #[test]
    fn normal_order_is_idempotent() {
        let x = &(&hol(Generator::D) * &hol(Generator::D)) * &(&hol(Generator::Z) * &hol(Generator::Z));
        let once = normal_order(&x);
        assert!(is_normal_ordered(&once));
        assert_eq!(normal_order(&once), once);
    }

    #[test]
    fn involution_sigma1_swaps_generators() {
        let k = Involution::new(Mat2::<Exact>::sigma1(), 0.0).unwrap();
        assert_eq!(apply_involution(&k, &hol(Generator::Z)).unwrap(), hol(Generator::D));
        // number operator z d is self-adjoint for the Bargmann involution
        let zd = &hol(Generator::Z) * &hol(Generator::D);
        assert_eq!(apply_involution(&k, &zd).unwrap().to_string(), "z d");
        // d z = z d + 1 maps to itself as well
        let dz = &hol(Generator::D) * &hol(Generator::Z);
        assert_eq!(apply_involution(&k, &dz).unwrap().to_string(), "z d + 1");
    }

    #[test]
    fn involution_is_antilinear() {
        let k = Involution::new(Mat2::<Exact>::sigma3(), 0.0).unwrap();
        let iz = hol(Generator::Z).scale(&Exact::i());
        let out = apply_involution(&k, &iz).unwrap();
        assert_eq!(out, hol(Generator::Z).scale(&-Exact::i()));
    }

    #[test]
    fn bad_involution_matrices_rejected() {
        assert!(Involution::new(Mat2::<Exact>::identity(), 0.0).is_err());
        let two = Mat2::new([[num(0), num(2)], [num(1), num(0)]]);
        assert!(Involution::new(two, 0.0).is_err());
    }

    #[test]
    fn fbs_realization_of_number_operator() {
        let x = &heis(Generator::AStar) * &heis(Generator::A);
        let out = apply_isomorphism(&Mat2::identity(), &x, 0.0).unwrap();
        assert_eq!(out.to_string(), "z d");
    }

    #[test]
    fn schroedinger_realization_of_number_operator() {
        let x = &heis(Generator::AStar) * &heis(Generator::A);
        let out = apply_isomorphism(&Mat2::<Exact>::schroedinger(), &x, 0.0).unwrap();
        // ½(z² − d² − 1)
        let half = Exact::from_ratio(1, 2);
        let expected = AlgebraElement::from_terms(
            GeneratorSet::Holomorphic,
            [
                (vec![Generator::Z, Generator::Z], half.clone()),
                (vec![Generator::D, Generator::D], -half.clone()),
                (vec![], -half),
            ],
        )
        .unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn isomorphism_requires_unit_determinant() {
        let v = Mat2::new([[num(2), num(0)], [num(0), num(1)]]);
        let err = apply_isomorphism(&v, &heis(Generator::A), 0.0).unwrap_err();
        assert_eq!(err.code(), "NotUnimodular");
    }

    #[test]
    fn isomorphism_preserves_ccr() {
        let c = commutator(&heis(Generator::A), &heis(Generator::AStar)).unwrap();
        let out = apply_isomorphism(&Mat2::identity(), &c, 0.0).unwrap();
        assert_eq!(out.to_string(), "1");
    }

    #[test]
    fn numeric_coefficients_work_too() {
        let set = GeneratorSet::Holomorphic;
        let z = AlgebraElement::<Complex64>::generator(set.clone(), Generator::Z).unwrap();
        let d = AlgebraElement::<Complex64>::generator(set, Generator::D).unwrap();
        let n = normal_order(&(&d * &z));
        assert_eq!(n.coeff(&[]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gauge_phase_on_heisenberg() {
        let x = &heis(Generator::AStar) * &heis(Generator::A);
        // number operator is gauge invariant
        let out = gauge_transform(&x, &-Exact::i()).unwrap();
        assert_eq!(out, x);
        let a = gauge_transform(&heis(Generator::A), &-Exact::i()).unwrap();
        assert_eq!(a, heis(Generator::A).scale(&-Exact::i()));
    }
}
