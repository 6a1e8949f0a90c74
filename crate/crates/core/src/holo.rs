//! Truncated power series standing in for entire functions, the operators
//! `z` and `∂_z`, the metaplectic-type action `Γ_S`, seminorms, and Fourier
//! projection onto gauge eigenvectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `c_0..c_D` of a polynomial in `z`; `exact` is cleared once a
/// nonzero coefficient has been pushed past the degree cap.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncFn {
    coeffs: Vec<Complex64>,
    exact: bool,
}

impl TruncFn {
    pub fn zeros(degree: usize) -> Self {
        Self { coeffs: vec![C0; degree + 1], exact: true }
    }

    pub fn monomial(k: usize, degree: usize) -> Self {
        let mut f = Self::zeros(degree);
        if k <= degree {
            f.coeffs[k] = Complex64::new(1.0, 0.0);
        } else {
            f.exact = false;
        }
        f
    }

    /// Pads with zeros up to `degree`; coefficients above the cap are dropped
    /// and clear the exactness flag if any is nonzero.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>, degree: usize) -> Self {
        let mut exact = true;
        if coeffs.len() > degree + 1 {
            exact = coeffs[degree + 1..].iter().all(|c| *c == C0);
            coeffs.truncate(degree + 1);
        }
        coeffs.resize(degree + 1, C0);
        Self { coeffs, exact }
    }

    pub fn from_real(coeffs: &[f64], degree: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(), degree)
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(C0)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = self.exact && exact;
        self
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(C0, |acc, c| acc * z + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect(), exact: self.exact }
    }

    fn zip(&self, o: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let d = self.degree_cap().max(o.degree_cap());
        let coeffs = (0..=d).map(|n| f(self.coeff(n), o.coeff(n))).collect();
        Self { coeffs, exact: self.exact && o.exact }
    }

    /// Cauchy product truncated at the cap of `self`.
    pub fn mul(&self, o: &Self) -> Self {
        let d = self.degree_cap();
        let mut out = vec![C0; d + 1];
        let mut exact = self.exact && o.exact;
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == C0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j <= d {
                    out[i + j] += a * b;
                } else if *b != C0 {
                    exact = false;
                }
            }
        }
        Self { coeffs: out, exact }
    }

    /// `f(λz)`.
    pub fn dilate(&self, lambda: Complex64) -> Self {
        let mut p = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= lambda;
                v
            })
            .collect();
        Self { coeffs, exact: self.exact }
    }

    /// Largest coefficient difference over degrees `0..=upto`.
    pub fn max_diff_upto(&self, o: &Self, upto: usize) -> f64 {
        (0..=upto).map(|n| (self.coeff(n) - o.coeff(n)).norm()).fold(0.0, f64::max)
    }

    /// Copy with all coefficients above `upto` set to zero.
    pub fn restrict(&self, upto: usize) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(n, c)| if n <= upto { *c } else { C0 }).collect();
        Self { coeffs, exact: self.exact }
    }
}

#[derive(Serialize, Deserialize)]
struct TruncFnRepr {
    coeffs: Vec<[f64; 2]>,
    degree: usize,
    exact: bool,
}

impl Serialize for TruncFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TruncFnRepr {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            degree: self.degree_cap(),
            exact: self.exact,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TruncFnRepr::deserialize(d)?;
        let coeffs = r.coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Ok(Self::from_coeffs(coeffs, r.degree).with_exact(r.exact))
    }
}

/// Multiplication by `z`.
pub fn apply_z(f: &TruncFn) -> TruncFn {
    let d = f.degree_cap();
    let mut coeffs = vec![C0; d + 1];
    coeffs[1..].copy_from_slice(&f.coeffs[..d]);
    TruncFn { coeffs, exact: f.exact && f.coeffs[d] == C0 }
}

/// Differentiation `∂_z`.
pub fn apply_dz(f: &TruncFn) -> TruncFn {
    let d = f.degree_cap();
    let mut coeffs = vec![C0; d + 1];
    for n in 1..=d {
        coeffs[n - 1] = f.coeffs[n] * n as f64;
    }
    TruncFn { coeffs, exact: f.exact }
}

/// Truncation of `exp(c z²)` at `degree`.
pub fn gaussian(c: Complex64, degree: usize) -> TruncFn {
    let mut coeffs = vec![C0; degree + 1];
    let mut term = Complex64::new(1.0, 0.0);
    let mut k = 0usize;
    while 2 * k <= degree {
        coeffs[2 * k] = term;
        k += 1;
        term = term * c / k as f64;
    }
    TruncFn { coeffs, exact: c == C0 }
}

/// `Γ_S f(z) = f(αz)·exp(−αβz²/2)` for `S(α, β) = [[α, 0], [β, α⁻¹]]`.
///
/// This is the operator satisfying `Γ_S g Γ_S⁻¹ = σ(g)` with
/// `σ(z, d)ᵀ = S(α, β)(z, d)ᵀ`; composition follows the automorphisms, so
/// `Γ_{S₁}Γ_{S₂} = Γ_{S₂S₁}`.
pub fn gamma_s(alpha: Complex64, beta: Complex64, f: &TruncFn) -> Result<TruncFn> {
    if alpha == C0 {
        return Err(Error::SingularTransformation("alpha = 0".into()));
    }
    let g = gaussian(-alpha * beta / 2.0, f.degree_cap());
    let scaled = f.dilate(alpha);
    let inexact = !g.exact && scaled.coeffs.iter().any(|c| *c != C0);
    Ok(scaled.mul(&g).with_exact(!inexact))
}

/// `Γ_S⁻¹ h(z) = h(z/α)·exp(βz²/(2α))`.
pub fn gamma_s_inverse(alpha: Complex64, beta: Complex64, f: &TruncFn) -> Result<TruncFn> {
    if alpha == C0 {
        return Err(Error::SingularTransformation("alpha = 0".into()));
    }
    let g = gaussian(beta / (2.0 * alpha), f.degree_cap());
    let scaled = f.dilate(1.0 / alpha);
    let inexact = !g.exact && scaled.coeffs.iter().any(|c| *c != C0);
    Ok(scaled.mul(&g).with_exact(!inexact))
}

/// Parameters of the matrix product `S(α₁, β₁)·S(α₂, β₂)`.
pub fn compose_alpha_beta(s1: (Complex64, Complex64), s2: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let (a1, b1) = s1;
    let (a2, b2) = s2;
    (a1 * a2, b1 * a2 + b2 / a1)
}

/// `Σ_n |c_n| Rⁿ`, an upper bound for `sup_{|z|≤R} |f|`.
pub fn seminorm(f: &TruncFn, r: f64) -> f64 {
    let mut p = 1.0;
    let mut s = 0.0;
    for c in &f.coeffs {
        s += c.norm() * p;
        p *= r;
    }
    s
}

/// Max over `g ∈ {z, ∂_z}` of the `R = 1` seminorm, on degrees `≤ D − 2`, of
/// `σ(g)f − Γ_S g Γ_S⁻¹ f` where `σ(z) = αz` and `σ(∂_z) = βz + α⁻¹∂_z`.
pub fn verify_implementation(alpha: Complex64, beta: Complex64, f: &TruncFn) -> Result<f64> {
    let d = f.degree_cap();
    if d < 2 {
        return Err(Error::DomainError("degree cap must be at least 2".into()));
    }
    let upto = d - 2;
    let inv = gamma_s_inverse(alpha, beta, f)?;
    let via_z = gamma_s(alpha, beta, &apply_z(&inv))?;
    let via_d = gamma_s(alpha, beta, &apply_dz(&inv))?;
    let sigma_z = apply_z(f).scale(alpha);
    let sigma_d = apply_z(f).scale(beta).add(&apply_dz(f).scale(1.0 / alpha));
    let r1 = seminorm(&sigma_z.sub(&via_z).restrict(upto), 1.0);
    let r2 = seminorm(&sigma_d.sub(&via_d).restrict(upto), 1.0);
    Ok(r1.max(r2))
}

/// Truncation of `g = exp(−z²/(2s))`, the solution of `(z + s∂_z)g = 0`.
pub fn annihilator_beta_minus(s: Complex64, degree: usize) -> Result<TruncFn> {
    if s == C0 {
        return Err(Error::SingularTransformation("s = 0".into()));
    }
    Ok(gaussian(-1.0 / (2.0 * s), degree))
}

/// A one-parameter family `s ↦ U(s)` of linear maps on truncated series.
pub trait OneParameterFamily {
    fn apply(&self, s: f64, f: &TruncFn) -> TruncFn;
}

impl<F: Fn(f64, &TruncFn) -> TruncFn> OneParameterFamily for F {
    fn apply(&self, s: f64, f: &TruncFn) -> TruncFn {
        self(s, f)
    }
}

/// `U(s)f(z) = f(e^{is}z)`, the gauge group in the Bargmann realization.
#[derive(Clone, Copy, Debug, Default)]
pub struct BargmannRotation;

impl OneParameterFamily for BargmannRotation {
    fn apply(&self, s: f64, f: &TruncFn) -> TruncFn {
        f.dilate(Complex64::from_polar(1.0, s))
    }
}

/// Default node count `4(D + 1)`.
pub fn default_nodes(degree: usize) -> usize {
    4 * (degree + 1)
}

/// `(1/M) Σ_j e^{−ik s_j} U(s_j) f` with `s_j = 2πj/M`.
pub fn fourier_project(u: &impl OneParameterFamily, f: &TruncFn, k: i64, nodes: usize) -> Result<TruncFn> {
    let d = f.degree_cap();
    if nodes < d + 1 {
        return Err(Error::AliasingRisk { nodes, degree: d });
    }
    let m = nodes as i64;
    let mut acc = TruncFn::zeros(d);
    for j in 0..m {
        let s = 2.0 * PI * j as f64 / nodes as f64;
        // reduce k·j mod M before forming the angle
        let phase = 2.0 * PI * ((k * j).rem_euclid(m)) as f64 / nodes as f64;
        acc = acc.add(&u.apply(s, f).scale(Complex64::from_polar(1.0, -phase)));
    }
    Ok(acc.scale(Complex64::new(1.0 / nodes as f64, 0.0)).with_exact(f.exact))
}
