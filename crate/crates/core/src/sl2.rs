//! SL(2,C) acting on the generator column `(z, d)`: conjugation matrices of
//! involutions, the Bogoliubov test, and the adjoint-orbit classification of
//! Lie-algebra elements under the triangular subgroup `exp(aσ₃)exp(bσ₊)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{normal_order, AlgebraElement, Generator, GeneratorSet};
use crate::error::{Error, Result};
use crate::scalar::{Exact, Scalar, Zero};

/// Default relative tolerance for zero tests on floating-point data.
pub const ZERO_TOL: f64 = 1e-10;

/// 2×2 matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<C: Scalar = Complex64> {
    m: [[C; 2]; 2],
}

impl<C: Scalar> Mat2<C> {
    pub fn new(m: [[C; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.m[r][c].clone()
    }

    pub fn rows(&self) -> &[[C; 2]; 2] {
        &self.m
    }

    pub fn identity() -> Self {
        Self::new([[C::one(), C::zero()], [C::zero(), C::one()]])
    }

    pub fn sigma1() -> Self {
        Self::new([[C::zero(), C::one()], [C::one(), C::zero()]])
    }

    pub fn sigma3() -> Self {
        Self::new([[C::one(), C::zero()], [C::zero(), -C::one()]])
    }

    pub fn det(&self) -> C {
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |r: usize, c: usize| self.get(r, 0) * o.get(0, c) + self.get(r, 1) * o.get(1, c);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn sub(&self, o: &Self) -> Self {
        let e = |r: usize, c: usize| self.get(r, c) - o.get(r, c);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn scale(&self, s: &C) -> Self {
        let e = |r: usize, c: usize| self.get(r, c) * s.clone();
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Entry-wise complex conjugate (`C̄`, not the adjoint).
    pub fn conj(&self) -> Self {
        let e = |r: usize, c: usize| self.get(r, c).conj();
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn transpose(&self) -> Self {
        Self::new([[self.get(0, 0), self.get(1, 0)], [self.get(0, 1), self.get(1, 1)]])
    }

    pub fn adjugate(&self) -> Self {
        Self::new([[self.get(1, 1), -self.get(0, 1)], [-self.get(1, 0), self.get(0, 0)]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let inv_det = self.det().inv()?;
        Some(self.adjugate().scale(&inv_det))
    }

    pub fn near(&self, o: &Self, tol: f64) -> bool {
        (0..2).all(|r| (0..2).all(|c| self.get(r, c).near(&o.get(r, c), tol)))
    }

    /// Largest entry modulus of `self − o`.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let d = self.sub(o);
        (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| d.get(r, c).to_c64().norm()).fold(0.0, f64::max)
    }

    pub fn check_unimodular(&self, tol: f64) -> Result<()> {
        let det = self.det();
        if det.near(&C::one(), tol) {
            Ok(())
        } else {
            Err(Error::NotUnimodular { det: format!("{:?}", det.to_c64()) })
        }
    }

    pub fn to_c64(&self) -> Mat2<Complex64> {
        let e = |r: usize, c: usize| self.get(r, c).to_c64();
        Mat2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl Mat2<Exact> {
    /// `(1/√2)[[1, −1], [1, 1]]`: `a* = (z − d)/√2`, `a = (z + d)/√2`.
    pub fn schroedinger() -> Self {
        let h = Exact::inv_sqrt2();
        Self::new([[h.clone(), -h.clone()], [h.clone(), h]])
    }
}

impl Mat2<Complex64> {
    pub fn schroedinger_c64() -> Self {
        Mat2::<Exact>::schroedinger().to_c64()
    }

    /// Upper-triangular `exp(aσ₃)exp(bσ₊) = [[e^a, e^a b], [0, e^{-a}]]`.
    pub fn s_exp(a: Complex64, b: Complex64) -> Self {
        let ea = a.exp();
        Self::new([[ea, ea * b], [Complex64::new(0.0, 0.0), 1.0 / ea]])
    }

    /// Lower-triangular `S(α, β) = [[α, 0], [β, α⁻¹]]` acting on `(z, d)`.
    pub fn s_alpha_beta(alpha: Complex64, beta: Complex64) -> Self {
        Self::new([[alpha, Complex64::new(0.0, 0.0)], [beta, 1.0 / alpha]])
    }

    /// Row-major entries given as `[re, im]` pairs.
    pub fn from_pairs(e: [[f64; 2]; 4]) -> Self {
        let c = |k: usize| Complex64::new(e[k][0], e[k][1]);
        Self::new([[c(0), c(1)], [c(2), c(3)]])
    }
}

impl Serialize for Mat2<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..2).map(|r| (0..2).map(|c| [self.get(r, c).re, self.get(r, c).im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: [[[f64; 2]; 2]; 2] = Deserialize::deserialize(d)?;
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        Ok(Self::new([[c(rows[0][0]), c(rows[0][1])], [c(rows[1][0]), c(rows[1][1])]]))
    }
}

/// `C_K = V̄⁻¹ σ₁ V` for a unimodular `V`.
pub fn conjugation_from_v<C: Scalar>(v: &Mat2<C>, tol: f64) -> Result<Mat2<C>> {
    v.check_unimodular(tol)?;
    // det V̄ = 1, so the inverse is the adjugate
    let vbar_inv = v.conj().adjugate();
    Ok(vbar_inv.mul(&Mat2::sigma1()).mul(v))
}

/// `det T = 1` and `T̄ C = C T`.
pub fn is_bogoliubov<C: Scalar>(t: &Mat2<C>, c: &Mat2<C>, tol: f64) -> bool {
    t.det().near(&C::one(), tol) && t.conj().mul(c).near(&c.mul(t), tol)
}

/// Coordinates of `n₃σ₃ + n₋σ₊ + n₊σ₋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlVector<C: Scalar = Complex64> {
    pub n3: C,
    pub nminus: C,
    pub nplus: C,
}

impl<C: Scalar> SlVector<C> {
    pub fn new(n3: C, nminus: C, nplus: C) -> Self {
        Self { n3, nminus, nplus }
    }

    /// Invariant `q(n) = n₃² + n₋ n₊`.
    pub fn q(&self) -> C {
        self.n3.clone() * self.n3.clone() + self.nminus.clone() * self.nplus.clone()
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::new(self.n3.clone() * s.clone(), self.nminus.clone() * s.clone(), self.nplus.clone() * s.clone())
    }

    /// Adjoint action with `t = e^{2a}` kept as a field element, so exact
    /// inputs stay exact.
    pub fn act_scaled(&self, t: &C, b: &C) -> Result<Self> {
        let t_inv = t.inv().ok_or_else(|| Error::SingularTransformation("e^{2a} = 0".into()))?;
        let two = C::from_i64(2);
        let n3 = self.n3.clone() + b.clone() * self.nplus.clone();
        let nm = t.clone()
            * (self.nminus.clone() - two * b.clone() * self.n3.clone() - b.clone() * b.clone() * self.nplus.clone());
        let np = t_inv * self.nplus.clone();
        Ok(Self::new(n3, nm, np))
    }
}

impl SlVector<Complex64> {
    pub fn from_f64(n3: f64, nminus: f64, nplus: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(c(n3), c(nminus), c(nplus))
    }

    pub fn norm(&self) -> f64 {
        (self.n3.norm_sqr() + self.nminus.norm_sqr() + self.nplus.norm_sqr()).sqrt()
    }

    /// `[[n₃, n₋], [n₊, −n₃]]`.
    pub fn to_matrix(&self) -> Mat2<Complex64> {
        Mat2::new([[self.n3, self.nminus], [self.nplus, -self.n3]])
    }

    pub fn from_matrix(m: &Mat2<Complex64>) -> Self {
        Self::new(m.get(0, 0), m.get(0, 1), m.get(1, 0))
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (self.n3 - o.n3).norm().max((self.nminus - o.nminus).norm()).max((self.nplus - o.nplus).norm())
    }
}

/// Adjoint action of `S = exp(aσ₃)exp(bσ₊)`:
/// `(n₃, n₋, n₊) ↦ (n₃ + b n₊, e^{2a}(n₋ − 2b n₃ − b² n₊), e^{−2a} n₊)`.
pub fn adjoint_action(a: Complex64, b: Complex64, n: &SlVector<Complex64>) -> SlVector<Complex64> {
    n.act_scaled(&(2.0 * a).exp(), &b).expect("exp never vanishes")
}

/// `S X S⁻¹` for an arbitrary invertible `S`, in vector coordinates.
pub fn adjoint_by_matrix(s: &Mat2<Complex64>, n: &SlVector<Complex64>) -> Option<SlVector<Complex64>> {
    let inv = s.inverse()?;
    Some(SlVector::from_matrix(&s.mul(&n.to_matrix()).mul(&inv)))
}

/// Parameters `(a, b)` of the product `exp(a₂σ₃)exp(b₂σ₊)·exp(a₁σ₃)exp(b₁σ₊)`.
pub fn compose_params(first: (Complex64, Complex64), second: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let (a1, b1) = first;
    let (a2, b2) = second;
    (a1 + a2, b1 + (-2.0 * a1).exp() * b2)
}

/// `(a, b)` with `exp(aσ₃)exp(bσ₊) = S(α, β)ᵀ`; the adjoint action with these
/// parameters is the action of the automorphism `Z ↦ S(α, β) Z` on quadratic
/// elements.
pub fn params_from_alpha_beta(alpha: Complex64, beta: Complex64) -> (Complex64, Complex64) {
    (alpha.ln(), beta / alpha)
}

/// Splits a holomorphic element of degree ≤ 2 as `n₃π(σ₃) + n₋π(σ₊) + n₊π(σ₋) + c`
/// with `π(σ₃) = z d + ½`, `π(σ₊) = −z²/2`, `π(σ₋) = d²/2`.
pub fn lie_coordinates<C: Scalar>(x: &AlgebraElement<C>) -> Result<(SlVector<C>, C)> {
    if *x.set() != GeneratorSet::Holomorphic {
        return Err(Error::IncompatibleAlgebras("expected an element in z, d".into()));
    }
    let x = normal_order(x);
    let (z, d) = (Generator::Z, Generator::D);
    for (w, c) in x.terms() {
        let quadratic = w.len() == 2 || w.is_empty();
        if !quadratic && !c.is_zero() {
            return Err(Error::InvalidInput(format!("element is not purely quadratic: {x}")));
        }
    }
    let two = C::from_i64(2);
    let czz = x.coeff(&[z, z]);
    let czd = x.coeff(&[z, d]);
    let cdd = x.coeff(&[d, d]);
    let c0 = x.coeff(&[]);
    let half_n3 = czd.checked_div(&two).expect("2 is invertible");
    let n = SlVector::new(czd, -(two.clone() * czz), two * cdd);
    Ok((n, c0 - half_n3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitKind {
    SigmaPlus,
    SigmaThree,
    SigmaOne,
    SigmaMinus,
}

impl OrbitKind {
    pub fn canonical(self) -> SlVector<Complex64> {
        match self {
            OrbitKind::SigmaPlus => SlVector::from_f64(0.0, 1.0, 0.0),
            OrbitKind::SigmaThree => SlVector::from_f64(1.0, 0.0, 0.0),
            OrbitKind::SigmaOne => SlVector::from_f64(0.0, 1.0, 1.0),
            OrbitKind::SigmaMinus => SlVector::from_f64(0.0, 0.0, 1.0),
        }
    }

    /// Orbits with `q(n) = 0` generate subgroups isomorphic to R².
    pub fn is_degenerate(self) -> bool {
        matches!(self, OrbitKind::SigmaPlus | OrbitKind::SigmaMinus)
    }
}

/// `n = scale · Ad(exp(aσ₃)exp(bσ₊))(canonical)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub a: Complex64,
    pub b: Complex64,
    pub scale: Complex64,
}

impl OrbitWitness {
    pub fn reproduce(&self, kind: OrbitKind) -> SlVector<Complex64> {
        adjoint_action(self.a, self.b, &kind.canonical()).scale(&self.scale)
    }

    pub fn matrix(&self) -> Mat2<Complex64> {
        Mat2::s_exp(self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitType {
    pub kind: OrbitKind,
    pub q: Complex64,
    pub witness: Option<OrbitWitness>,
}

/// Classifies `n` modulo scaling into one of the four orbits of the
/// triangular subgroup. Zero tests are relative to `‖n‖` (and `‖n‖²` for q).
pub fn classify_orbit(n: &SlVector<Complex64>) -> Result<OrbitType> {
    classify_orbit_with_tol(n, ZERO_TOL)
}

pub fn classify_orbit_with_tol(n: &SlVector<Complex64>, tol: f64) -> Result<OrbitType> {
    let norm = n.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let zero = |x: Complex64| x.norm() <= tol * norm;
    let q = n.q();
    let c0 = Complex64::new(0.0, 0.0);
    let (kind, witness) = if zero(n.nplus) {
        if zero(n.n3) {
            (OrbitKind::SigmaPlus, OrbitWitness { a: c0, b: c0, scale: n.nminus })
        } else {
            // (1, n₋/n₃, 0) = Ad(0, b)(1, 0, 0) with b = −n₋/(2n₃)
            let b = -n.nminus / (2.0 * n.n3);
            (OrbitKind::SigmaThree, OrbitWitness { a: c0, b, scale: n.n3 })
        }
    } else if q.norm() <= tol * norm * norm {
        // (b, −b², 1)·n₊ with b = n₃/n₊
        (OrbitKind::SigmaMinus, OrbitWitness { a: c0, b: n.n3 / n.nplus, scale: n.nplus })
    } else {
        let scale = q.sqrt();
        let m = n.scale(&(1.0 / scale));
        // (0, 1, 1) ↦ (b, e^{2a}(1 − b²), e^{−2a})
        let a = -0.5 * m.nplus.ln();
        (OrbitKind::SigmaOne, OrbitWitness { a, b: m.n3, scale })
    };
    Ok(OrbitType { kind, q, witness: Some(witness) })
}

/// Exact classification; zero tests are exact.
pub fn classify_orbit_exact(n: &SlVector<Exact>) -> Result<OrbitKind> {
    if n.n3.is_zero() && n.nminus.is_zero() && n.nplus.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(if n.nplus.is_zero() {
        if n.n3.is_zero() {
            OrbitKind::SigmaPlus
        } else {
            OrbitKind::SigmaThree
        }
    } else if n.q().is_zero() {
        OrbitKind::SigmaMinus
    } else {
        OrbitKind::SigmaOne
    })
}
