//! Krein *-representations of the Heisenberg algebra on level-indexed
//! truncated spaces: Fock/anti-Fock Bargmann, the Schroedinger spaces
//! `V(θ)`, their Gram matrices and gauge groups, scaling intertwiners,
//! canonical-form reduction of isomorphisms and null-subrepresentation
//! detection.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply_isomorphism, AlgebraElement, Generator, GeneratorSet};
use crate::error::{Error, Result};
use crate::pcf::gamma as gamma_fn;
use crate::scalar::Scalar;
use crate::sl2::{classify_orbit, lie_coordinates, Mat2, OrbitKind, OrbitType, SlVector};

const SNAP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            _ => Err(Error::InvalidInput(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Bargmann,
    Schroedinger,
}

/// Which construction produced a [`BasisRep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepLabel {
    FockBargmann,
    AntiFock {
        flavor: Flavor,
    },
    Schroedinger {
        theta: f64,
        gamma: f64,
        sign: Sign,
    },
    /// `V(θ) ⊕ S(i)V(θ)` with a commutant weight.
    SchroedingerPair {
        theta: f64,
        gamma: f64,
    },
}

impl RepLabel {
    /// `(θ, γ, sign)` of the Gram recursion `g_n = ±γ²(θ+n) g_{n−1}`.
    pub fn recursion(&self) -> (f64, f64, Sign) {
        match *self {
            RepLabel::FockBargmann => (0.0, 1.0, Sign::Plus),
            RepLabel::AntiFock { .. } => (0.0, 1.0, Sign::Minus),
            RepLabel::Schroedinger { theta, gamma, sign } => (theta, gamma, sign),
            RepLabel::SchroedingerPair { theta, gamma } => (theta, gamma, Sign::Plus),
        }
    }
}

/// Band operator on levels: `A e_j = coeffs[j] e_{j+shift}`; images outside
/// the window are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct BandOp<C: Scalar = Complex64> {
    pub shift: i64,
    pub coeffs: Vec<C>,
}

impl<C: Scalar> BandOp<C> {
    pub fn to_dense(&self) -> DMatrix<C> {
        let n = self.coeffs.len();
        let mut m = DMatrix::from_element(n, n, C::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            let i = j as i64 + self.shift;
            if (0..n as i64).contains(&i) {
                m[(i as usize, j)] = c.clone();
            }
        }
        m
    }
}

/// A representation of `a`, `a*` on the levels `n_min..=n_max` (each level
/// repeated `copies` times), with a Gram form `diag(g) ⊗ W` and the gauge
/// generator `π(a*a) = diag(ℓ_n) + μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisRep<C: Scalar = Complex64> {
    label: RepLabel,
    n_min: i64,
    pi_a: BandOp<C>,
    pi_astar: BandOp<C>,
    gram: Vec<C>,
    weight: Option<Mat2<C>>,
    gauge_levels: Vec<i64>,
    mu: Complex64,
}

impl<C: Scalar> BasisRep<C> {
    pub fn label(&self) -> &RepLabel {
        &self.label
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.levels() as i64 - 1
    }

    pub fn levels(&self) -> usize {
        self.gram.len()
    }

    pub fn copies(&self) -> usize {
        if self.weight.is_some() {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.levels() * self.copies()
    }

    /// Level of the basis vector with the given index.
    pub fn level_of(&self, index: usize) -> i64 {
        self.n_min + (index / self.copies()) as i64
    }

    pub fn pi_a_band(&self) -> &BandOp<C> {
        &self.pi_a
    }

    pub fn pi_astar_band(&self) -> &BandOp<C> {
        &self.pi_astar
    }

    /// Gram values per level.
    pub fn gram_levels(&self) -> &[C] {
        &self.gram
    }

    pub fn weight(&self) -> Option<&Mat2<C>> {
        self.weight.as_ref()
    }

    pub fn gauge_levels(&self) -> &[i64] {
        &self.gauge_levels
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    fn expand(&self, m: DMatrix<C>) -> DMatrix<C> {
        let k = self.copies();
        if k == 1 {
            return m;
        }
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| if i % k == j % k { m[(i / k, j / k)].clone() } else { C::zero() })
    }

    pub fn pi_a(&self) -> DMatrix<C> {
        self.expand(self.pi_a.to_dense())
    }

    pub fn pi_astar(&self) -> DMatrix<C> {
        self.expand(self.pi_astar.to_dense())
    }

    /// Entry `(i, j)` of the Gram matrix.
    pub fn gram_entry(&self, i: usize, j: usize) -> C {
        let k = self.copies();
        if i / k != j / k {
            return C::zero();
        }
        let g = self.gram[i / k].clone();
        match &self.weight {
            None => g,
            Some(w) => g * w.get(i % k, j % k),
        }
    }

    pub fn gram_matrix(&self) -> DMatrix<C> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.gram_entry(i, j))
    }

    /// `<f, g> = Σ f̄_i G_ij g_j`.
    pub fn inner(&self, f: &[C], g: &[C]) -> C {
        let mut s = C::zero();
        for (i, fi) in f.iter().enumerate().take(self.dim()) {
            for (j, gj) in g.iter().enumerate().take(self.dim()) {
                let gij = self.gram_entry(i, j);
                if !gij.is_zero() {
                    s += fi.conj() * gij * gj.clone();
                }
            }
        }
        s
    }

    /// Diagonal of the gauge generator `π(a*a)`.
    pub fn gauge_diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| Complex64::new(self.gauge_levels[i / self.copies()] as f64, 0.0) + self.mu).collect()
    }

    pub fn to_c64(&self) -> BasisRep<Complex64> {
        let band = |b: &BandOp<C>| BandOp { shift: b.shift, coeffs: b.coeffs.iter().map(|c| c.to_c64()).collect() };
        BasisRep {
            label: self.label.clone(),
            n_min: self.n_min,
            pi_a: band(&self.pi_a),
            pi_astar: band(&self.pi_astar),
            gram: self.gram.iter().map(|g| g.to_c64()).collect(),
            weight: self.weight.as_ref().map(|w| w.to_c64()),
            gauge_levels: self.gauge_levels.clone(),
            mu: self.mu,
        }
    }
}

/// Generic Schroedinger-type build with Gram normalized by `g_base` at
/// `n_min` and propagated by `g_n = ±γ²(θ+n) g_{n−1}`.
///
/// Sign `+`: `π(a)e_n = γ(θ+n)e_{n−1}`, `π(a*)e_n = γ⁻¹e_{n+1}`.
/// Sign `−` (composition with `a ↦ a*`, `a* ↦ −a`): `π(a)e_n = γ⁻¹e_{n+1}`,
/// `π(a*)e_n = −γ(θ+n)e_{n−1}`.
pub fn build_schroedinger_scaled<C: Scalar>(
    theta: C,
    gamma: C,
    g_base: C,
    n_min: i64,
    n_max: i64,
    sign: Sign,
) -> Result<BasisRep<C>> {
    if n_max < n_min {
        return Err(Error::InvalidInput("empty level window".into()));
    }
    let gamma_inv = gamma.inv().ok_or_else(|| Error::DomainError("gamma must be nonzero".into()))?;
    let levels: Vec<i64> = (n_min..=n_max).collect();
    let lower: Vec<C> = levels.iter().map(|&n| gamma.clone() * (theta.clone() + C::from_i64(n))).collect();
    let raise = vec![gamma_inv; levels.len()];
    let s = C::from_i64(sign.factor());
    let gamma2 = gamma.clone() * gamma.clone();
    let mut gram = Vec::with_capacity(levels.len());
    gram.push(g_base);
    for &n in &levels[1..] {
        let prev = gram.last().expect("nonempty").clone();
        gram.push(s.clone() * gamma2.clone() * (theta.clone() + C::from_i64(n)) * prev);
    }
    let theta_c = theta.to_c64();
    let (pi_a, pi_astar, gauge_levels, mu) = match sign {
        Sign::Plus => {
            (BandOp { shift: -1, coeffs: lower }, BandOp { shift: 1, coeffs: raise }, levels.clone(), theta_c)
        }
        Sign::Minus => (
            BandOp { shift: 1, coeffs: raise },
            BandOp { shift: -1, coeffs: lower.into_iter().map(|c| -c).collect() },
            levels.iter().map(|n| -n).collect(),
            -(theta_c + 1.0),
        ),
    };
    Ok(BasisRep {
        label: RepLabel::Schroedinger { theta: theta_c.re, gamma: gamma.to_c64().re, sign },
        n_min,
        pi_a,
        pi_astar,
        gram,
        weight: None,
        gauge_levels,
        mu,
    })
}

/// Fock representation `π(a) = ∂_z`, `π(a*) = z` on `1, z, …, z^N`, Gram `n!`.
pub fn build_fock_bargmann<C: Scalar>(n: usize) -> BasisRep<C> {
    let mut rep =
        build_schroedinger_scaled(C::zero(), C::one(), C::one(), 0, n as i64, Sign::Plus).expect("valid parameters");
    rep.label = RepLabel::FockBargmann;
    rep
}

/// Anti-Fock representation: `π(a)` raises, `π(a*)` lowers with a minus
/// sign, Gram `(−1)ⁿ n!`.
pub fn build_antifock<C: Scalar>(n: usize, flavor: Flavor) -> BasisRep<C> {
    let mut rep =
        build_schroedinger_scaled(C::zero(), C::one(), C::one(), 0, n as i64, Sign::Minus).expect("valid parameters");
    rep.label = RepLabel::AntiFock { flavor };
    rep
}

fn check_theta_gamma(theta: f64, gamma: f64) -> Result<()> {
    if !(theta > -1.0 && theta <= 0.0) {
        return Err(Error::DomainError(format!("theta must lie in (-1, 0], got {theta}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::DomainError(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// `V(θ)` on levels `0..=N` with `g_n = ±ⁿ γ^{2n} Γ(θ+n+1)`.
pub fn build_schroedinger_theta(theta: f64, gamma: f64, n: usize, sign: Sign) -> Result<BasisRep> {
    build_schroedinger_window(theta, gamma, 0, n as i64, sign)
}

/// Diagnostic build on an arbitrary level window. With `θ = 0` a window
/// reaching below level 0 contains a null subrepresentation.
pub fn build_schroedinger_window(theta: f64, gamma: f64, n_min: i64, n_max: i64, sign: Sign) -> Result<BasisRep> {
    check_theta_gamma(theta, gamma)?;
    if let NullDiagnosis::NullSubrepresentation { forced_zero_levels, .. } =
        detect_null_subrep(theta, gamma, n_min, n_max)
    {
        return Err(Error::NullSubrepresentation(format!(
            "Gram forced to vanish on levels {}..={}",
            forced_zero_levels.first().copied().unwrap_or(0),
            forced_zero_levels.last().copied().unwrap_or(0)
        )));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut rep = build_schroedinger_scaled(c(theta), c(gamma), c(1.0), n_min, n_max, sign)?;
    // closed form per level instead of the recursion
    rep.gram = (n_min..=n_max)
        .map(|n| {
            let parity = if sign == Sign::Minus && n.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            c(parity * gamma.powi(2 * n as i32) * gamma_fn(theta + n as f64 + 1.0))
        })
        .collect();
    Ok(rep)
}

/// `V(θ) ⊕ S(i)V(θ)` with Gram `diag(g) ⊗ M`. The companion basis
/// `c_n F_{−θ−1−n}(iz)`, normalized by `c_n/c_{n−1} = i(θ+n)`, carries the
/// same ladder matrices, so `π = π_θ ⊗ 1`; `M` must be hermitian and
/// definite.
pub fn build_schroedinger_pair(theta: f64, gamma: f64, n: usize, weight: Option<Mat2<Complex64>>) -> Result<BasisRep> {
    let w = weight.unwrap_or_else(Mat2::identity);
    validate_weight(&w)?;
    let mut rep = build_schroedinger_theta(theta, gamma, n, Sign::Plus)?;
    rep.label = RepLabel::SchroedingerPair { theta, gamma };
    rep.weight = Some(w);
    Ok(rep)
}

fn validate_weight(w: &Mat2<Complex64>) -> Result<()> {
    let tol = 1e-12 * (1.0 + w.max_abs_diff(&Mat2::new([[Complex64::new(0.0, 0.0); 2]; 2])));
    if w.max_abs_diff(&w.conj().transpose()) > tol {
        return Err(Error::NotHermitian);
    }
    let det = w.det().re;
    if det.abs() <= tol * tol {
        return Err(Error::NullSubrepresentation("commutant weight is singular".into()));
    }
    if det < 0.0 {
        return Err(Error::DomainError("commutant weight must be positive or negative definite".into()));
    }
    Ok(())
}

/// `G⁻¹ Aᴴ G` for a diagonal Gram `G = diag(gram)`.
pub fn krein_adjoint_diag<C: Scalar>(a: &DMatrix<C>, gram: &[C]) -> Result<DMatrix<C>> {
    let n = gram.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidInput(format!("expected a {n}x{n} matrix")));
    }
    let mut out = DMatrix::from_element(n, n, C::zero());
    for i in 0..n {
        for j in 0..n {
            let s = a[(j, i)].conj();
            if s.is_zero() {
                continue;
            }
            out[(i, j)] = (s * gram[j].clone())
                .checked_div(&gram[i])
                .ok_or_else(|| Error::Degenerate(format!("Gram vanishes at index {i}")))?;
        }
    }
    Ok(out)
}

/// Whether the `k×k` block of `a` at block position `(r, c)` is a multiple of
/// the identity.
fn scalar_block<C: Scalar>(a: &DMatrix<C>, k: usize, r: usize, c: usize) -> bool {
    let d = &a[(r * k, c * k)];
    (0..k).all(|p| {
        (0..k).all(|q| {
            let x = &a[(r * k + p, c * k + q)];
            if p == q {
                x == d
            } else {
                x.is_zero()
            }
        })
    })
}

/// `G⁻¹ Aᴴ G`, the adjoint with respect to the Krein form.
pub fn krein_adjoint<C: Scalar>(a: &DMatrix<C>, rep: &BasisRep<C>) -> Result<DMatrix<C>> {
    if rep.weight.is_none() {
        return krein_adjoint_diag(a, &rep.gram);
    }
    let n = rep.dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::InvalidInput(format!("expected a {n}x{n} matrix")));
    }
    let k = rep.copies();
    let (w, w_inv) = match &rep.weight {
        None => (None, None),
        Some(w) => {
            let inv = w.inverse().ok_or_else(|| Error::Degenerate("commutant weight is singular".into()))?;
            (Some(w.clone()), Some(inv))
        }
    };
    let mut out = DMatrix::from_element(n, n, C::zero());
    for i in 0..n {
        for j in 0..n {
            let (ni, p) = (i / k, i % k);
            let (mj, q) = (j / k, j % k);
            let s = match (&w, &w_inv) {
                (Some(_), Some(_)) if scalar_block(a, k, mj, ni) => {
                    // W⁻¹ (c·1) W = c·1 without the roundoff of the product
                    if p == q {
                        a[(mj * k + p, ni * k + p)].conj()
                    } else {
                        C::zero()
                    }
                }
                (Some(w), Some(wi)) => {
                    let mut s = C::zero();
                    for pp in 0..k {
                        for qq in 0..k {
                            let aji = a[(mj * k + qq, ni * k + pp)].conj();
                            if !aji.is_zero() {
                                s += wi.get(p, pp) * aji * w.get(qq, q);
                            }
                        }
                    }
                    s
                }
                _ => a[(j, i)].conj(),
            };
            if s.is_zero() {
                continue;
            }
            let num = s * rep.gram[mj].clone();
            out[(i, j)] = num
                .checked_div(&rep.gram[ni])
                .ok_or_else(|| Error::Degenerate(format!("Gram vanishes at level {}", rep.n_min + ni as i64)))?;
        }
    }
    Ok(out)
}

/// `U(s) = exp(is·π(a*a))`.
pub fn gauge_unitary<C: Scalar>(rep: &BasisRep<C>, s: f64) -> DMatrix<Complex64> {
    let d = rep.gauge_diagonal();
    DMatrix::from_fn(rep.dim(), rep.dim(), |i, j| {
        if i == j {
            (Complex64::new(0.0, s) * d[i]).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `U(s) A U(s)⁻¹`, computed entry-wise as `A_ij e^{is(ℓ_i − ℓ_j)}`; the
/// constant `μ` cancels identically.
pub fn gauge_conjugate<C: Scalar>(rep: &BasisRep<C>, s: f64, a: &DMatrix<C>) -> DMatrix<Complex64> {
    let k = rep.copies();
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let diff = rep.gauge_levels[i / k] - rep.gauge_levels[j / k];
        let v = a[(i, j)].to_c64();
        if diff == 0 {
            v
        } else {
            v * Complex64::from_polar(1.0, s * diff as f64)
        }
    })
}

/// Diagonal matrix `diag((γ₁/γ₂)ⁿ)` over the window, with
/// `W π_{γ₁}(x) W⁻¹ = π_{γ₂}(x)` and `<Wf, Wg>_{γ₂} = <f, g>_{γ₁}`.
pub fn scaling_intertwiner<C: Scalar>(gamma1: C, gamma2: C, n_min: i64, n_max: i64) -> Result<DMatrix<C>> {
    let r = gamma1.checked_div(&gamma2).ok_or_else(|| Error::DomainError("gamma2 must be nonzero".into()))?;
    let r_inv = r.inv().ok_or_else(|| Error::DomainError("gamma1 must be nonzero".into()))?;
    let size = (n_max - n_min + 1).max(0) as usize;
    let pow = |n: i64| {
        let (base, e) = if n >= 0 { (r.clone(), n) } else { (r_inv.clone(), -n) };
        (0..e).fold(C::one(), |acc, _| acc * base.clone())
    };
    Ok(DMatrix::from_fn(size, size, |i, j| if i == j { pow(n_min + i as i64) } else { C::zero() }))
}

/// Diagonal Krein decomposition `G = η·|G|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KreinDecomposition {
    pub signature: Vec<i8>,
    pub majorant: Vec<f64>,
}

impl KreinDecomposition {
    pub fn is_consistent(&self, gram: &[f64]) -> bool {
        self.signature.len() == gram.len()
            && self.signature.iter().all(|s| s * s == 1)
            && self.signature.iter().zip(&self.majorant).zip(gram).all(|((s, m), g)| *s as f64 * m == *g)
    }
}

/// Signature and majorant weights of a diagonal real Gram.
pub fn krein_decomposition<C: Scalar>(rep: &BasisRep<C>) -> Result<KreinDecomposition> {
    let n = rep.dim();
    let mut signature = Vec::with_capacity(n);
    let mut majorant = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && !rep.gram_entry(i, j).is_zero() {
                return Err(Error::InvalidInput("Gram form is not diagonal".into()));
            }
        }
        let g = rep.gram_entry(i, i).to_c64();
        if g.im.abs() > 1e-12 * g.norm() {
            return Err(Error::InvalidInput("Gram form is not real".into()));
        }
        if g.re == 0.0 {
            return Err(Error::Degenerate(format!("Gram vanishes at index {i}")));
        }
        signature.push(if g.re > 0.0 { 1 } else { -1 });
        majorant.push(g.re.abs());
    }
    Ok(KreinDecomposition { signature, majorant })
}

/// Indices on which `[π(a), π(a*)] = 1` must hold despite truncation: the
/// top level is excluded, and so is the bottom level unless its lowering
/// coefficient vanishes.
pub fn stable_indices<C: Scalar>(rep: &BasisRep<C>) -> Vec<usize> {
    let lowering = if rep.pi_a.shift < 0 { &rep.pi_a } else { &rep.pi_astar };
    let bottom_closed = lowering.coeffs.first().map(|c| c.is_zero()).unwrap_or(true);
    let k = rep.copies();
    let levels = rep.levels();
    (0..rep.dim())
        .filter(|i| {
            let l = i / k;
            l + 1 < levels && (l > 0 || bottom_closed)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepReport {
    pub star_property_max_residual: f64,
    pub star_property_max_relative: f64,
    pub ccr_max_residual: f64,
    pub gram_recursion_max_relative: f64,
    pub gauge_covariance_exact: bool,
    pub gauge_isometry_max_residual: f64,
    pub gauge_samples: usize,
    pub signature: Option<Vec<i8>>,
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn to_c64_matrix<C: Scalar>(m: &DMatrix<C>) -> DMatrix<Complex64> {
    m.map(|c| c.to_c64())
}

/// Runs the *-property, CCR, Gram-recursion and gauge checks.
pub fn verify_rep<C: Scalar>(rep: &BasisRep<C>, gauge_samples: &[f64]) -> Result<RepReport> {
    let a = rep.pi_a();
    let ad = rep.pi_astar();
    let mut star_abs = 0.0f64;
    let mut star_rel = 0.0f64;
    for (x, y) in [(&a, &ad), (&ad, &a)] {
        let adj = to_c64_matrix(&krein_adjoint(x, rep)?);
        let y = to_c64_matrix(y);
        for (p, q) in adj.iter().zip(y.iter()) {
            let d = (p - q).norm();
            star_abs = star_abs.max(d);
            if d > 0.0 {
                star_rel = star_rel.max(d / p.norm().max(q.norm()));
            }
        }
    }

    let (ac, adc) = (to_c64_matrix(&a), to_c64_matrix(&ad));
    let comm = &ac * &adc - &adc * &ac;
    let n = rep.dim();
    let mut ccr = 0.0f64;
    for j in stable_indices(rep) {
        for i in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            ccr = ccr.max((comm[(i, j)] - expected).norm());
        }
    }

    let (theta, gamma, sign) = rep.label.recursion();
    let mut rec = 0.0f64;
    for l in 1..rep.levels() {
        let level = rep.n_min + l as i64;
        let g = rep.gram[l].to_c64();
        let predicted = rep.gram[l - 1].to_c64() * (sign.factor() as f64 * gamma * gamma * (theta + level as f64));
        let denom = g.norm().max(predicted.norm());
        if denom > 0.0 {
            rec = rec.max((g - predicted).norm() / denom);
        }
    }

    let gram = to_c64_matrix(&rep.gram_matrix());
    let mut covariant = true;
    let mut iso = 0.0f64;
    for &s in gauge_samples {
        let phase = Complex64::from_polar(1.0, -s);
        let conj_a = gauge_conjugate(rep, s, &a);
        covariant &= conj_a.iter().zip(ac.iter()).all(|(x, y)| *x == y * phase);
        let u = gauge_unitary(rep, s);
        let pulled = u.adjoint() * &gram * &u;
        let scale = max_entry(&gram).max(1.0);
        iso = iso.max(max_entry(&(pulled - &gram)) / scale);
    }

    Ok(RepReport {
        star_property_max_residual: star_abs,
        star_property_max_relative: star_rel,
        ccr_max_residual: ccr,
        gram_recursion_max_relative: rec,
        gauge_covariance_exact: covariant,
        gauge_isometry_max_residual: iso,
        gauge_samples: gauge_samples.len(),
        signature: krein_decomposition(rep).ok().map(|k| k.signature),
    })
}

/// Outcome of propagating `g_n = γ²(θ+n) g_{n−1}` across a level window.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "diagnosis")]
pub enum NullDiagnosis {
    NoNullSubrep { levels: Vec<i64>, gram: Vec<f64> },
    NullSubrepresentation { forced_zero_levels: Vec<i64>, chain: Vec<String> },
}

/// Propagates the adjointness constraint from the bottom of the window. A
/// vanishing factor `θ + n = 0` forces every Gram value from level `n` up to
/// zero; otherwise the solution is normalized to `g_0 = Γ(θ+1)`.
pub fn detect_null_subrep(theta: f64, gamma: f64, n_min: i64, n_max: i64) -> NullDiagnosis {
    let levels: Vec<i64> = (n_min..=n_max).collect();
    let mut gram = vec![1.0f64];
    let mut forced_from = None;
    for &n in &levels[1..] {
        let factor = gamma * gamma * (theta + n as f64);
        if factor == 0.0 && forced_from.is_none() {
            forced_from = Some(n);
        }
        let prev = *gram.last().expect("nonempty");
        gram.push(factor * prev);
    }
    if let Some(k) = forced_from {
        let forced: Vec<i64> = levels.iter().copied().filter(|&n| n >= k).collect();
        let mut chain = vec![format!(
            "<F_{k}, F_{k}> = <a+ F_{p}, F_{k}> = <F_{p}, a- F_{k}> = (theta + {k}) <F_{p}, F_{p}> = 0",
            p = k - 1
        )];
        for &n in forced.iter().skip(1) {
            chain.push(format!("<F_{n}, F_{n}> = (theta + {n}) gamma^2 <F_{p}, F_{p}> = 0", p = n - 1));
        }
        return NullDiagnosis::NullSubrepresentation { forced_zero_levels: forced, chain };
    }
    let (ref_level, target) = if n_min <= 0 && 0 <= n_max {
        (0, gamma_fn(theta + 1.0))
    } else {
        (n_min, gamma.powi(2 * n_min as i32) * gamma_fn(theta + n_min as f64 + 1.0))
    };
    let scale = target / gram[(ref_level - n_min) as usize];
    NullDiagnosis::NoNullSubrep { levels, gram: gram.into_iter().map(|g| g * scale).collect() }
}

/// Type of the canonical representation an isomorphism reduces to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CanonicalType {
    Bargmann,
    Schroedinger { theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalForm {
    /// Lower-triangular `S(α, β)` with `V = V⁰·S`.
    pub s: Mat2<Complex64>,
    pub sign: Sign,
    #[serde(rename = "type")]
    pub rep_type: CanonicalType,
    pub gamma: f64,
    /// Argument of the complex scaling, removable by a gauge transformation.
    pub gauge_phase: f64,
    /// Integer shift between the requested constant and the reduced θ.
    pub level_shift: i64,
    pub orbit: OrbitType,
    pub generator: SlVector<Complex64>,
    pub triangularity_residual: f64,
}

fn diag_gamma(g: Complex64) -> Mat2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    Mat2::new([[1.0 / g, z], [z, g]])
}

/// Canonical matrices `(a*, a)ᵀ = V⁰ (z, d)ᵀ`:
/// Bargmann `+`: `I`; Bargmann `−`: `[[0, −1], [1, 0]]`;
/// Schroedinger `+`: `diag(γ⁻¹, γ)·(1/√2)[[1, −1], [1, 1]]`;
/// Schroedinger `−`: `diag(γ, γ⁻¹)·(1/√2)[[−1, −1], [1, −1]]`.
pub fn canonical_v(schroedinger: bool, sign: Sign, gamma: Complex64) -> Mat2<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (schroedinger, sign) {
        (false, Sign::Plus) => Mat2::identity(),
        (false, Sign::Minus) => Mat2::new([[c(0.0), c(-1.0)], [c(1.0), c(0.0)]]),
        (true, Sign::Plus) => diag_gamma(gamma).mul(&Mat2::new([[c(h), c(-h)], [c(h), c(h)]])),
        (true, Sign::Minus) => diag_gamma(1.0 / gamma).mul(&Mat2::new([[c(-h), c(-h)], [c(h), c(-h)]])),
    }
}

fn snap_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= SNAP_TOL * (1.0 + x.abs())).then_some(r as i64)
}

/// Reduces the isomorphism `V` to canonical form: finds `S ∈ S`, a sign and
/// a type with `S⁻¹ σ(a*a − μ) S = ±N`, where `N = z∂_z` (Bargmann) or
/// `N = N_S − θ` (Schroedinger, `N_S = ½(z² − ∂_z² − 1)`).
pub fn reduce_to_canonical(v: &Mat2<Complex64>, mu: Complex64) -> Result<CanonicalForm> {
    let tol = 1e-10;
    v.check_unimodular(tol)?;
    let heis = GeneratorSet::Heisenberg;
    let one = Complex64::new(1.0, 0.0);
    let number =
        AlgebraElement::from_terms(heis.clone(), [(vec![Generator::AStar, Generator::A], one), (vec![], -mu)])?;
    let image = apply_isomorphism(v, &number, tol)?;
    let (n, _) = lie_coordinates(&image)?;
    let orbit = classify_orbit(&n)?;
    let schroedinger = match orbit.kind {
        OrbitKind::SigmaThree => false,
        OrbitKind::SigmaOne => true,
        k => {
            return Err(Error::NotRegularizable(format!("generator lies on the {k:?} orbit (q = 0)")));
        }
    };
    let (v12, v22) = (v.get(0, 1), v.get(1, 1));
    let (sign, gamma_c) = if schroedinger {
        let r = v22 / v12;
        let plus = (-r).sqrt();
        let minus = (1.0 / r).sqrt();
        if (-r).arg().abs() <= (1.0 / r).arg().abs() {
            (Sign::Plus, plus)
        } else {
            (Sign::Minus, minus)
        }
    } else if v12.norm() <= v22.norm() {
        (Sign::Plus, one)
    } else {
        (Sign::Minus, one)
    };
    let v0 = canonical_v(schroedinger, sign, gamma_c);
    let mut s = v0.inverse().ok_or_else(|| Error::SingularTransformation("canonical matrix".into()))?.mul(v);
    let triangularity_residual = s.get(0, 1).norm();
    let mut rows = *s.rows();
    rows[0][1] = Complex64::new(0.0, 0.0);
    s = Mat2::new(rows);

    // S⁻¹σ(a*a)S is N_S or N_B for sign +, and −N_S − 1 or −N_B − 1 for sign −.
    let theta_raw = match sign {
        Sign::Plus => mu,
        Sign::Minus => -1.0 - mu,
    };
    if theta_raw.im.abs() > tol * (1.0 + theta_raw.norm()) {
        return Err(Error::DomainError(format!("the gauge constant must make theta real, got {theta_raw}")));
    }
    let t = theta_raw.re;
    let (rep_type, level_shift) = if schroedinger {
        match snap_integer(t) {
            Some(k) => (CanonicalType::Schroedinger { theta: 0.0 }, k),
            None => {
                let k = t.ceil();
                (CanonicalType::Schroedinger { theta: t - k }, k as i64)
            }
        }
    } else {
        match snap_integer(t) {
            Some(k) => (CanonicalType::Bargmann, k),
            None => {
                return Err(Error::DomainError(format!(
                    "Bargmann type requires an integer gauge constant, got theta = {t}"
                )))
            }
        }
    };
    Ok(CanonicalForm {
        s,
        sign,
        rep_type,
        gamma: gamma_c.norm(),
        gauge_phase: gamma_c.arg(),
        level_shift,
        orbit,
        generator: n,
        triangularity_residual,
    })
}

#[derive(Serialize, Deserialize)]
struct BandRepr {
    shift: i64,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct BasisRepRepr {
    label: RepLabel,
    n_min: i64,
    n_max: i64,
    pi_a: BandRepr,
    pi_astar: BandRepr,
    gram: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Mat2<Complex64>>,
    gauge_levels: Vec<i64>,
    mu: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signature: Option<Vec<i8>>,
}

fn pair(c: &Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn unpair(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Serialize for BasisRep<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let band = |b: &BandOp<Complex64>| BandRepr { shift: b.shift, coeffs: b.coeffs.iter().map(pair).collect() };
        BasisRepRepr {
            label: self.label.clone(),
            n_min: self.n_min,
            n_max: self.n_max(),
            pi_a: band(&self.pi_a),
            pi_astar: band(&self.pi_astar),
            gram: self.gram.iter().map(pair).collect(),
            weight: self.weight.clone(),
            gauge_levels: self.gauge_levels.clone(),
            mu: pair(&self.mu),
            signature: krein_decomposition(self).ok().map(|k| k.signature),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BasisRep<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = BasisRepRepr::deserialize(d)?;
        let levels = (r.n_max - r.n_min + 1).max(0) as usize;
        let band = |b: BandRepr| BandOp { shift: b.shift, coeffs: b.coeffs.iter().map(unpair).collect() };
        let rep = BasisRep {
            label: r.label,
            n_min: r.n_min,
            pi_a: band(r.pi_a),
            pi_astar: band(r.pi_astar),
            gram: r.gram.iter().map(unpair).collect(),
            weight: r.weight,
            gauge_levels: r.gauge_levels,
            mu: unpair(&r.mu),
        };
        let consistent = rep.gram.len() == levels
            && rep.pi_a.coeffs.len() == levels
            && rep.pi_astar.coeffs.len() == levels
            && rep.gauge_levels.len() == levels
            && rep.pi_a.shift.abs() == 1
            && rep.pi_astar.shift == -rep.pi_a.shift;
        if !consistent {
            return Err(D::Error::custom("inconsistent representation data"));
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fock_gram_is_factorial() {
        let rep = build_fock_bargmann::<Complex64>(4);
        let g: Vec<f64> = rep.gram_levels().iter().map(|x| x.re).collect();
        assert_eq!(g, vec![1.0, 1.0, 2.0, 6.0, 24.0]);
        let a = rep.pi_a();
        let ad = rep.pi_astar();
        // <e₁, π(a) e₂> = g₁·2, <π(a*) e₁, e₂> = g₂·1
        assert_eq!(rep.gram_entry(1, 1) * a[(1, 2)], c(2.0));
        assert_eq!(ad[(2, 1)].conj() * rep.gram_entry(2, 2), c(2.0));
    }

    #[test]
    fn antifock_gram_alternates() {
        let rep = build_antifock::<Exact>(3, Flavor::Bargmann);
        let g: Vec<Exact> = rep.gram_levels().to_vec();
        let e = |n: i64| Exact::from_i64(n);
        assert_eq!(g, vec![e(1), e(-1), e(2), e(-6)]);
        assert_eq!(krein_adjoint(&rep.pi_a(), &rep).unwrap(), rep.pi_astar());
        assert_eq!(krein_decomposition(&rep).unwrap().signature, vec![1, -1, 1, -1]);
    }

    #[test]
    fn fock_adjoint_is_exact() {
        let rep = build_fock_bargmann::<Exact>(6);
        let adj = krein_adjoint(&rep.pi_a(), &rep).unwrap();
        assert_eq!(adj, rep.pi_astar());
        assert_eq!(krein_adjoint(&adj, &rep).unwrap(), rep.pi_a());
    }

    #[test]
    fn schroedinger_half_ratio() {
        let rep = build_schroedinger_theta(-0.5, 1.0, 4, Sign::Plus).unwrap();
        let g = rep.gram_levels();
        assert!((g[1].re / g[0].re - 0.5).abs() < 1e-14);
        assert!((g[0].re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn theta_zero_matches_fock() {
        let s = build_schroedinger_theta(0.0, 1.0, 6, Sign::Plus).unwrap();
        let f = build_fock_bargmann::<Complex64>(6);
        for (a, b) in s.gram_levels().iter().zip(f.gram_levels()) {
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
        assert_eq!(s.pi_a(), f.pi_a());
    }

    #[test]
    fn builder_errors() {
        assert!(matches!(build_schroedinger_theta(0.5, 1.0, 4, Sign::Plus), Err(Error::DomainError(_))));
        assert!(matches!(build_schroedinger_theta(-0.5, 0.0, 4, Sign::Plus), Err(Error::DomainError(_))));
        assert!(matches!(build_schroedinger_window(0.0, 1.0, -1, 3, Sign::Plus), Err(Error::NullSubrepresentation(_))));
        assert!(build_schroedinger_window(-0.5, 1.0, -1, 3, Sign::Plus).is_ok());
    }

    #[test]
    fn gauge_at_pi_flips_annihilator() {
        let rep = build_fock_bargmann::<Complex64>(5);
        let u = gauge_unitary(&rep, std::f64::consts::PI);
        for n in 0..6 {
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((u[(n, n)] - c(expected)).norm() < 1e-15);
        }
        let conj = gauge_conjugate(&rep, std::f64::consts::PI, &rep.pi_a());
        let phase = Complex64::from_polar(1.0, -std::f64::consts::PI);
        assert!(conj.iter().zip(rep.pi_a().iter()).all(|(x, y)| *x == y * phase));
    }

    #[test]
    fn intertwiner_example() {
        let w = scaling_intertwiner(Exact::from_i64(1), Exact::from_i64(2), 0, 3).unwrap();
        assert_eq!(w[(3, 3)], Exact::from_ratio(1, 8));
        let same = scaling_intertwiner(c(1.5), c(1.5), 0, 3).unwrap();
        assert_eq!(same, DMatrix::identity(4, 4));
    }

    #[test]
    fn null_detection_examples() {
        match detect_null_subrep(0.0, 1.0, -1, 3) {
            NullDiagnosis::NullSubrepresentation { forced_zero_levels, .. } => {
                assert_eq!(forced_zero_levels, vec![0, 1, 2, 3])
            }
            other => panic!("{other:?}"),
        }
        match detect_null_subrep(-0.5, 1.0, -1, 3) {
            NullDiagnosis::NoNullSubrep { gram, .. } => {
                assert!((gram[0] + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(detect_null_subrep(0.0, 1.0, 0, 3), NullDiagnosis::NoNullSubrep { .. }));
    }

    #[test]
    fn reduce_identity_and_schroedinger() {
        let r = reduce_to_canonical(&Mat2::identity(), c(0.0)).unwrap();
        assert_eq!((r.sign, r.rep_type, r.gamma), (Sign::Plus, CanonicalType::Bargmann, 1.0));
        assert!(r.s.max_abs_diff(&Mat2::identity()) < 1e-15);

        let r = reduce_to_canonical(&Mat2::schroedinger_c64(), c(-0.25)).unwrap();
        assert_eq!(r.sign, Sign::Plus);
        assert_eq!(r.rep_type, CanonicalType::Schroedinger { theta: -0.25 });
        assert!((r.gamma - 1.0).abs() < 1e-14);
        assert!(r.s.max_abs_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn reduce_rejects_non_unimodular() {
        let v = Mat2::new([[c(2.0), c(0.0)], [c(0.0), c(1.0)]]);
        assert_eq!(reduce_to_canonical(&v, c(0.0)).unwrap_err().code(), "NotUnimodular");
    }

    #[test]
    fn pair_weight_validation() {
        let z = c(0.0);
        let indefinite = Mat2::new([[c(1.0), z], [z, c(-1.0)]]);
        assert!(matches!(build_schroedinger_pair(-0.5, 1.0, 4, Some(indefinite)), Err(Error::DomainError(_))));
        let skew = Mat2::new([[c(1.0), Complex64::new(0.0, 1.0)], [Complex64::new(0.0, 1.0), c(1.0)]]);
        assert_eq!(build_schroedinger_pair(-0.5, 1.0, 4, Some(skew)).unwrap_err(), Error::NotHermitian);
        let m = Mat2::new([[c(2.0), Complex64::new(0.5, 0.5)], [Complex64::new(0.5, -0.5), c(1.0)]]);
        let rep = build_schroedinger_pair(-0.5, 1.0, 4, Some(m)).unwrap();
        let report = verify_rep(&rep, &[0.3, 1.7]).unwrap();
        assert!(report.star_property_max_relative < 1e-12, "{report:?}");
        assert!(report.ccr_max_residual < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let rep = build_schroedinger_theta(-0.5, 2.0, 3, Sign::Minus).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        let back: BasisRep = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
    }
}
