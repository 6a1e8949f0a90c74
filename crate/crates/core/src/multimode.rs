//! Multimode CCR algebras `[a_i, a_j*] = δ_ij η_i`: reduction of a hermitian
//! form to a sign signature, the isomorphism onto standard generators, the
//! polynomial representation with its indefinite Gram, the spectral
//! condition and vacuum descent.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{normal_order, substitute_modes, AlgebraElement, EtaSignature, Generator, GeneratorSet};
use crate::error::{Error, Result};
use crate::krein::krein_adjoint_diag;
use crate::scalar::Scalar;

/// Returns `(L, η)` with `L H Lᴴ = diag(η)`: eigenvalues sorted in
/// decreasing order, `L = |Λ|^{−1/2} Uᴴ`, each eigenvector phased so its
/// largest component is real and positive.
pub fn diagonalize_eta(h: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, EtaSignature)> {
    let m = h.nrows();
    if m == 0 || h.ncols() != m {
        return Err(Error::InvalidInput("expected a nonempty square matrix".into()));
    }
    let norm = h.norm();
    if (h - h.adjoint()).norm() > 1e-12 * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian);
    }
    let (values, vectors) = hermitian_eigen(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut l = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let mut signs = Vec::with_capacity(m);
    for (row, &k) in order.iter().enumerate() {
        let lambda = values[k];
        if lambda.abs() <= 1e-10 * norm {
            return Err(Error::Degenerate(format!("eigenvalue {lambda} is zero within tolerance")));
        }
        let v = &vectors[k];
        let pivot = (0..m).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).expect("nonempty");
        let phase = v[pivot].conj() / v[pivot].norm();
        let scale = 1.0 / lambda.abs().sqrt();
        for col in 0..m {
            l[(row, col)] = (v[col] * phase).conj() * scale;
        }
        signs.push(if lambda > 0.0 { 1 } else { -1 });
    }
    Ok((l, EtaSignature::new(signs)?))
}

/// Eigenpairs of a hermitian `H = A + iB` through the real symmetric
/// embedding `[[A, −B], [B, A]]`, whose spectrum is that of `H` doubled.
/// Each real eigenvector `(x, y)` gives `x + iy`; one vector per complex
/// direction is kept by Gram–Schmidt in decreasing eigenvalue order.
fn hermitian_eigen(h: &DMatrix<Complex64>) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let m = h.nrows();
    let real = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let z = h[(i % m, j % m)];
        match (i < m, j < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    // the default deflation threshold leaves couplings near 1e-11
    let eig = nalgebra::SymmetricEigen::try_new(real.clone(), f64::EPSILON * f64::EPSILON, 100_000)
        .unwrap_or_else(|| nalgebra::SymmetricEigen::new(real));
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    for k in order {
        if vectors.len() == m {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let mut v = DVector::from_fn(m, |i, _| Complex64::new(col[i], col[i + m]));
        for u in &vectors {
            let p = u.dotc(&v);
            v -= u * p;
        }
        let n = v.norm();
        if n > 0.5 {
            vectors.push(v / Complex64::new(n, 0.0));
        }
    }
    let values = vectors.iter().map(|v| v.dotc(&(h * v)).re).collect();
    (values, vectors)
}

fn standard_target(eta: &EtaSignature) -> EtaSignature {
    if eta.is_unbounded() {
        EtaSignature::unbounded(vec![1; eta.explicit().len()], 1).expect("valid signs")
    } else {
        EtaSignature::standard(eta.explicit().len())
    }
}

/// `ρ(a_i) = ½(1+η_i)a_i + ½(1−η_i)a_i*` and `ρ(a_i*) = ½(1+η_i)a_i* + ½(1−η_i)a_i`,
/// mapping `A_H(η)` into the standard multimode algebra. Brackets are
/// preserved: `[ρ(a_i), ρ(a_i*)] = η_i`.
pub fn rho_iso<C: Scalar>(x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    let eta = match x.set() {
        GeneratorSet::MultiMode(eta) => eta.clone(),
        _ => return Err(Error::IncompatibleAlgebras("expected a multimode element".into())),
    };
    let target = GeneratorSet::MultiMode(standard_target(&eta));
    let t = target.clone();
    let image = substitute_modes(x, target, move |g| {
        let g = match g {
            Generator::Mode { index, dagger } if eta.eta(index) == Some(-1) => {
                Generator::Mode { index, dagger: !dagger }
            }
            other => other,
        };
        AlgebraElement::generator(t.clone(), g).expect("mode exists in the target")
    })?;
    Ok(normal_order(&image))
}

/// Multi-index `(n_1, …, n_k)` with trailing zeros removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut n: Vec<u32>) -> Self {
        while n.last() == Some(&0) {
            n.pop();
        }
        Self(n)
    }

    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    /// Exponent of mode `i` (1-based).
    pub fn get(&self, i: u32) -> u32 {
        self.0.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    fn with(&self, i: u32, value: u32) -> Self {
        let mut v = self.0.clone();
        let k = i as usize - 1;
        if v.len() <= k {
            v.resize(k + 1, 0);
        }
        v[k] = value;
        Self::new(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
        parts.map(MultiIndex::new).map_err(|_| Error::InvalidInput(format!("bad multi-index {s:?}")))
    }
}

/// Finitely supported state `Σ c_n z^n` with a total-degree cap.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexState {
    terms: BTreeMap<MultiIndex, Complex64>,
    degree_cap: u32,
}

impl MultiIndexState {
    pub fn zero(degree_cap: u32) -> Self {
        Self { terms: BTreeMap::new(), degree_cap }
    }

    pub fn monomial(n: Vec<u32>, c: Complex64, degree_cap: u32) -> Result<Self> {
        let mut s = Self::zero(degree_cap);
        s.add_term(MultiIndex::new(n), c)?;
        Ok(s)
    }

    pub fn add_term(&mut self, n: MultiIndex, c: Complex64) -> Result<()> {
        if n.total() > self.degree_cap {
            return Err(Error::InvalidInput(format!("monomial {n} exceeds the degree cap {}", self.degree_cap)));
        }
        let e = self.terms.entry(n.clone()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.terms.remove(&n);
        }
        Ok(())
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.terms
    }

    pub fn coeff(&self, n: &MultiIndex) -> Complex64 {
        self.terms.get(n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients below `tol · max|c|`.
    pub fn cleaned(&self, tol: f64) -> Self {
        let cut = tol * self.max_abs();
        Self {
            terms: self.terms.iter().filter(|(_, c)| c.norm() > cut).map(|(k, c)| (k.clone(), *c)).collect(),
            degree_cap: self.degree_cap,
        }
    }

    /// Highest mode index in the support.
    pub fn modes_used(&self) -> usize {
        self.terms.keys().map(|k| k.entries().len()).max().unwrap_or(0)
    }
}

impl Serialize for MultiIndexState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, [f64; 2]> = self.terms.iter().map(|(k, c)| (k.to_string(), [c.re, c.im])).collect();
        #[derive(Serialize)]
        struct Repr<'a> {
            degree_cap: u32,
            terms: &'a BTreeMap<String, [f64; 2]>,
        }
        Repr { degree_cap: self.degree_cap, terms: &map }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndexState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Repr {
            degree_cap: u32,
            terms: BTreeMap<String, [f64; 2]>,
        }
        let r = Repr::deserialize(d)?;
        let mut s = MultiIndexState::zero(r.degree_cap);
        for (k, [re, im]) in r.terms {
            let n: MultiIndex = k.parse().map_err(D::Error::custom)?;
            s.add_term(n, Complex64::new(re, im)).map_err(D::Error::custom)?;
        }
        Ok(s)
    }
}

/// Polynomial representation in `M` variables with `π(a_i) = ∂_{z_i}`,
/// `π(a_i*) = η_i z_i` and Gram `Π n_i!·(−1)^{n_i(1−η_i)/2}` on monomials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultimodeRep {
    eta: EtaSignature,
    degree_cap: u32,
    #[serde(skip)]
    basis: Vec<MultiIndex>,
    #[serde(skip)]
    index: BTreeMap<MultiIndex, usize>,
}

fn multi_indices(m: usize, cap: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in multi_indices(m - 1, cap) {
        let used: u32 = rest.iter().sum();
        for n in 0..=(cap - used) {
            let mut v = rest.clone();
            v.push(n);
            out.push(v);
        }
    }
    out
}

impl MultimodeRep {
    pub fn eta(&self) -> &EtaSignature {
        &self.eta
    }

    pub fn modes(&self) -> usize {
        self.eta.explicit().len()
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Monomials ordered by total degree, then with lower modes first.
    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn index_of(&self, n: &MultiIndex) -> Option<usize> {
        self.index.get(n).copied()
    }

    fn eta_of(&self, i: u32) -> i64 {
        self.eta.eta(i).map(i64::from).unwrap_or(1)
    }

    fn check_mode(&self, i: u32) -> Result<()> {
        if i == 0 || i as usize > self.modes() {
            return Err(Error::InvalidInput(format!("mode {i} outside 1..={}", self.modes())));
        }
        Ok(())
    }

    /// Gram value on a monomial.
    pub fn gram_value<C: Scalar>(&self, n: &MultiIndex) -> C {
        let mut g = C::one();
        for i in 1..=self.modes() as u32 {
            let ni = n.get(i);
            for k in 1..=ni {
                g *= C::from_i64(k as i64);
            }
            if self.eta_of(i) < 0 && ni % 2 == 1 {
                g = -g;
            }
        }
        g
    }

    pub fn gram<C: Scalar>(&self) -> Vec<C> {
        self.basis.iter().map(|n| self.gram_value(n)).collect()
    }

    pub fn pi_a<C: Scalar>(&self, i: u32) -> Result<DMatrix<C>> {
        self.check_mode(i)?;
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, C::zero());
        for (j, n) in self.basis.iter().enumerate() {
            let ni = n.get(i);
            if ni > 0 {
                let target = self.index[&n.with(i, ni - 1)];
                m[(target, j)] = C::from_i64(ni as i64);
            }
        }
        Ok(m)
    }

    pub fn pi_astar<C: Scalar>(&self, i: u32) -> Result<DMatrix<C>> {
        self.check_mode(i)?;
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, C::zero());
        let eta = C::from_i64(self.eta_of(i));
        for (j, n) in self.basis.iter().enumerate() {
            if let Some(&target) = self.index.get(&n.with(i, n.get(i) + 1)) {
                m[(target, j)] = eta.clone();
            }
        }
        Ok(m)
    }

    /// Nonzero entry `(row, value)` of column `col` of `π(a_i)`.
    pub fn pi_a_entry(&self, i: u32, col: usize) -> Option<(usize, i64)> {
        let n = &self.basis[col];
        let ni = n.get(i);
        (ni > 0).then(|| (self.index[&n.with(i, ni - 1)], ni as i64))
    }

    /// Nonzero entry `(row, value)` of column `col` of `π(a_i*)`.
    pub fn pi_astar_entry(&self, i: u32, col: usize) -> Option<(usize, i64)> {
        let n = &self.basis[col];
        self.index.get(&n.with(i, n.get(i) + 1)).map(|&r| (r, self.eta_of(i)))
    }

    fn gram_int(&self, k: usize) -> i128 {
        let n = &self.basis[k];
        let mut g: i128 = 1;
        for i in 1..=self.modes() as u32 {
            let ni = n.get(i);
            g *= (1..=ni as i128).product::<i128>();
            if self.eta_of(i) < 0 && ni % 2 == 1 {
                g = -g;
            }
        }
        g
    }

    /// Largest `|[π(a_i), π(a_j*)] e − δ_ij η_i e|` over all mode pairs and
    /// stable basis vectors, in exact integer arithmetic.
    pub fn ccr_max_defect(&self) -> i64 {
        let m = self.modes() as u32;
        let mut worst = 0i64;
        for c in self.stable_indices() {
            for i in 1..=m {
                for j in 1..=m {
                    let mut out: BTreeMap<usize, i64> = BTreeMap::new();
                    if let Some((r1, v1)) = self.pi_astar_entry(j, c) {
                        if let Some((r2, v2)) = self.pi_a_entry(i, r1) {
                            *out.entry(r2).or_default() += v1 * v2;
                        }
                    }
                    if let Some((r1, v1)) = self.pi_a_entry(i, c) {
                        if let Some((r2, v2)) = self.pi_astar_entry(j, r1) {
                            *out.entry(r2).or_default() -= v1 * v2;
                        }
                    }
                    if i == j {
                        *out.entry(c).or_default() -= self.eta_of(i);
                    }
                    worst = worst.max(out.values().map(|v| v.abs()).max().unwrap_or(0));
                }
            }
        }
        worst
    }

    /// `<e_r, π(a_i) e_c> = <π(a_i*) e_r, e_c>` entrywise for every mode, with
    /// integer Gram values, so the Krein adjoint of `π(a_i)` is `π(a_i*)`.
    pub fn star_property_exact(&self) -> bool {
        (1..=self.modes() as u32).all(|i| {
            (0..self.dim()).all(|c| {
                let down = self.pi_a_entry(i, c).map(|(r, v)| (r, v as i128 * self.gram_int(r)));
                // <π(a_i*) e_r, e_c> = conj(π(a_i*)[c, r]) g_c for the unique r mapped to c
                let up = (0..self.dim())
                    .filter_map(|r| {
                        self.pi_astar_entry(i, r)
                            .filter(|(t, _)| *t == c)
                            .map(|(_, v)| (r, v as i128 * self.gram_int(c)))
                    })
                    .next();
                match (down, up) {
                    (Some(x), Some(y)) => x == y,
                    (None, None) => true,
                    (Some((_, x)), None) | (None, Some((_, x))) => x == 0,
                }
            })
        })
    }

    /// `N = Σ η_i π(a_i*)π(a_i)`, assembled from the operators.
    pub fn gauge_generator<C: Scalar>(&self) -> Result<DMatrix<C>> {
        let d = self.dim();
        let mut n = DMatrix::from_element(d, d, C::zero());
        for i in 1..=self.modes() as u32 {
            let term = self.pi_astar::<C>(i)? * self.pi_a::<C>(i)?;
            let eta = C::from_i64(self.eta_of(i));
            n += term.map(|x| x * eta.clone());
        }
        Ok(n)
    }

    /// Eigenvalues of `N` on the basis (total degrees).
    pub fn gauge_spectrum(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.basis.iter().map(MultiIndex::total).collect();
        set.into_iter().collect()
    }

    pub fn krein_adjoint<C: Scalar>(&self, a: &DMatrix<C>) -> Result<DMatrix<C>> {
        krein_adjoint_diag(a, &self.gram())
    }

    /// Stable basis indices for the CCR check (total degree below the cap).
    pub fn stable_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.basis[j].total() < self.degree_cap).collect()
    }

    fn check_state(&self, f: &MultiIndexState) -> Result<()> {
        if f.modes_used() > self.modes() {
            return Err(Error::InvalidInput(format!("state uses more than {} modes", self.modes())));
        }
        if f.degree_cap() > self.degree_cap {
            return Err(Error::InvalidInput("state degree cap exceeds the representation".into()));
        }
        Ok(())
    }

    pub fn to_vector(&self, f: &MultiIndexState) -> Result<Vec<Complex64>> {
        self.check_state(f)?;
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (n, c) in f.terms() {
            v[self.index[n]] = *c;
        }
        Ok(v)
    }

    pub fn from_vector(&self, v: &[Complex64]) -> MultiIndexState {
        let mut s = MultiIndexState::zero(self.degree_cap);
        for (n, c) in self.basis.iter().zip(v) {
            if *c != Complex64::new(0.0, 0.0) {
                s.add_term(n.clone(), *c).expect("basis respects the cap");
            }
        }
        s
    }

    /// `<g, f>` with the indefinite Gram.
    pub fn inner(&self, g: &MultiIndexState, f: &MultiIndexState) -> Result<Complex64> {
        self.check_state(g)?;
        self.check_state(f)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (n, c) in f.terms() {
            let d = g.coeff(n);
            if d != Complex64::new(0.0, 0.0) {
                s += d.conj() * self.gram_value::<Complex64>(n) * c;
            }
        }
        Ok(s)
    }

    /// `U(s) f = e^{isN} f`.
    pub fn gauge_apply(&self, s: f64, f: &MultiIndexState) -> MultiIndexState {
        let mut out = MultiIndexState::zero(f.degree_cap());
        for (n, c) in f.terms() {
            out.add_term(n.clone(), c * Complex64::from_polar(1.0, s * n.total() as f64)).expect("same support");
        }
        out
    }

    /// `π(a_i) = ∂_{z_i}` on a state.
    pub fn apply_pi_a(&self, i: u32, f: &MultiIndexState) -> Result<MultiIndexState> {
        self.check_mode(i)?;
        let mut out = MultiIndexState::zero(f.degree_cap());
        for (n, c) in f.terms() {
            let ni = n.get(i);
            if ni > 0 {
                out.add_term(n.with(i, ni - 1), c * ni as f64)?;
            }
        }
        Ok(out)
    }
}

pub fn build_multimode_rep(eta: &EtaSignature, degree_cap: u32) -> Result<MultimodeRep> {
    let m = eta.modes().ok_or_else(|| Error::InvalidInput("a representation needs a finite number of modes".into()))?;
    if m == 0 || degree_cap == 0 {
        return Err(Error::InvalidInput("need at least one mode and degree cap at least 1".into()));
    }
    let mut basis: Vec<MultiIndex> = multi_indices(m, degree_cap).into_iter().map(MultiIndex::new).collect();
    basis.sort_by(|a, b| {
        a.total().cmp(&b.total()).then_with(|| {
            let pa: Vec<u32> = (1..=m as u32).map(|i| a.get(i)).collect();
            let pb: Vec<u32> = (1..=m as u32).map(|i| b.get(i)).collect();
            pb.cmp(&pa)
        })
    });
    let index = basis.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
    Ok(MultimodeRep { eta: eta.clone(), degree_cap, basis, index })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Frequencies `k` with `|c_k| > tol`.
    pub support: Vec<i64>,
    /// `(k, [re, im])` for each frequency in the support.
    pub coefficients: Vec<(i64, [f64; 2])>,
}

/// Fourier coefficients `c_k = (1/M) Σ_j e^{−ik s_j} <g, U(s_j) f>` on the
/// `M` frequencies `D−M+1..=D`, which resolve every residue class once.
pub fn spectral_condition_check(
    rep: &MultimodeRep,
    f: &MultiIndexState,
    g: &MultiIndexState,
    nodes: usize,
) -> Result<SpectralReport> {
    let d = rep.degree_cap() as usize;
    if nodes <= d {
        return Err(Error::AliasingRisk { nodes, degree: d });
    }
    let m = nodes as i64;
    let samples: Vec<Complex64> =
        (0..m).map(|j| rep.inner(g, &rep.gauge_apply(2.0 * PI * j as f64 / nodes as f64, f))).collect::<Result<_>>()?;
    let scale: f64 = {
        let mut s = 0.0;
        for (n, c) in f.terms() {
            s += (g.coeff(n) * rep.gram_value::<Complex64>(n) * c).norm();
        }
        s
    };
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut support = Vec::new();
    let mut coefficients = Vec::new();
    for k in (d as i64 - m + 1)..=(d as i64) {
        let mut c = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let phase = 2.0 * PI * ((k * j as i64).rem_euclid(m)) as f64 / nodes as f64;
            c += v * Complex64::from_polar(1.0, -phase);
        }
        c /= nodes as f64;
        if c.norm() > tol {
            support.push(k);
            coefficients.push((k, [c.re, c.im]));
        }
    }
    Ok(SpectralReport { support, coefficients })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentResult {
    pub psi0: MultiIndexState,
    /// Lowest nonzero Fourier component of the input.
    pub lowest_component: u32,
    /// Modes whose annihilator was applied, in order.
    pub steps: Vec<u32>,
}

/// Projects `f` onto its lowest gauge component and applies annihilators
/// until every `π(a_i)` kills the result.
pub fn vacuum_descent(rep: &MultimodeRep, f: &MultiIndexState) -> Result<DescentResult> {
    let f = f.cleaned(0.0);
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let d = rep.degree_cap();
    let nodes = 4 * (d as usize + 1);
    let m = nodes as i64;
    let tol = 1e-12 * f.max_abs();
    let mut component = None;
    for k in 0..=d as i64 {
        let mut acc = MultiIndexState::zero(f.degree_cap());
        for j in 0..m {
            let s = 2.0 * PI * j as f64 / nodes as f64;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * ((k * j).rem_euclid(m)) as f64 / nodes as f64);
            for (n, c) in rep.gauge_apply(s, &f).terms() {
                acc.add_term(n.clone(), c * phase / nodes as f64)?;
            }
        }
        let cleaned = acc.cleaned(1e-12);
        if cleaned.max_abs() > tol {
            component = Some((k as u32, cleaned));
            break;
        }
    }
    let (lowest_component, mut current) = component.ok_or(Error::ZeroInput)?;
    let mut steps = Vec::new();
    'descent: loop {
        for i in 1..=rep.modes() as u32 {
            let next = rep.apply_pi_a(i, &current)?;
            if !next.is_zero() {
                current = next;
                steps.push(i);
                continue 'descent;
            }
        }
        break;
    }
    Ok(DescentResult { psi0: current, lowest_component, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::commutator;
    use crate::scalar::Exact;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn diagonalize_examples() {
        let (l, eta) = diagonalize_eta(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(eta.explicit(), &[1, 1, 1]);
        assert!((l - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-14);

        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(4.0), c(-9.0)]));
        let (l, eta) = diagonalize_eta(&h).unwrap();
        assert_eq!(eta.explicit(), &[1, -1]);
        assert!((l[(0, 0)] - c(0.5)).norm() < 1e-14 && (l[(1, 1)] - c(1.0 / 3.0)).norm() < 1e-14);

        let swap = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let (l, eta) = diagonalize_eta(&swap).unwrap();
        assert_eq!(eta.explicit(), &[1, -1]);
        let d = &l * &swap * l.adjoint();
        assert!((d[(0, 0)] - c(1.0)).norm() < 1e-14 && (d[(1, 1)] + c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonalize_errors() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert_eq!(diagonalize_eta(&bad).unwrap_err(), Error::NotHermitian);
        let sing = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0)]);
        assert!(matches!(diagonalize_eta(&sing), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rho_swaps_negative_modes() {
        let eta = EtaSignature::new(vec![1, -1]).unwrap();
        let set = GeneratorSet::MultiMode(eta);
        let a2 = AlgebraElement::<Exact>::gen(set.clone(), Generator::mode(2));
        let a2s = AlgebraElement::<Exact>::gen(set.clone(), Generator::mode_star(2));
        let r = rho_iso(&a2).unwrap();
        assert_eq!(r.to_string(), "a_2*");
        let br = commutator(&rho_iso(&a2).unwrap(), &rho_iso(&a2s).unwrap()).unwrap();
        assert_eq!(br.to_string(), "-1");
        let a1 = AlgebraElement::<Exact>::gen(set, Generator::mode(1));
        assert_eq!(rho_iso(&a1).unwrap().to_string(), "a_1");
    }

    #[test]
    fn two_mode_gram_and_gauge() {
        let rep = build_multimode_rep(&EtaSignature::new(vec![1, -1]).unwrap(), 3).unwrap();
        assert_eq!(rep.dim(), 10);
        assert_eq!(rep.basis()[1], MultiIndex::new(vec![1]));
        assert_eq!(rep.gram_value::<Exact>(&MultiIndex::new(vec![1, 1])), Exact::from_i64(-1));
        assert_eq!(rep.gram_value::<Exact>(&MultiIndex::new(vec![0, 2])), Exact::from_i64(2));
        let n = rep.gauge_generator::<Exact>().unwrap();
        for (k, b) in rep.basis().iter().enumerate() {
            assert_eq!(n[(k, k)], Exact::from_i64(b.total() as i64));
        }
        assert_eq!(rep.gauge_spectrum(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn adjoint_pairs_and_ccr() {
        let rep = build_multimode_rep(&EtaSignature::new(vec![1, -1, 1]).unwrap(), 3).unwrap();
        for i in 1..=3 {
            let a = rep.pi_a::<Exact>(i).unwrap();
            let s = rep.pi_astar::<Exact>(i).unwrap();
            assert_eq!(rep.krein_adjoint(&a).unwrap(), s);
            let br = &a * &s - &s * &a;
            let eta = Exact::from_i64(rep.eta().eta(i).unwrap() as i64);
            for j in rep.stable_indices() {
                for r in 0..rep.dim() {
                    let want = if r == j { eta.clone() } else { Exact::from_i64(0) };
                    assert_eq!(br[(r, j)], want);
                }
            }
        }
    }

    #[test]
    fn state_json_round_trip() {
        let mut s = MultiIndexState::zero(4);
        s.add_term(MultiIndex::vacuum(), c(1.5)).unwrap();
        s.add_term(MultiIndex::new(vec![0, 2]), Complex64::new(0.25, -1.0)).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"0\"") && j.contains("\"0,2\""));
        assert_eq!(serde_json::from_str::<MultiIndexState>(&j).unwrap(), s);
    }

    #[test]
    fn descent_reaches_vacuum() {
        let rep = build_multimode_rep(&EtaSignature::new(vec![1, -1]).unwrap(), 4).unwrap();
        let mut f = MultiIndexState::zero(4);
        f.add_term(MultiIndex::new(vec![2, 1]), c(1.0)).unwrap();
        f.add_term(MultiIndex::new(vec![0, 4]), c(3.0)).unwrap();
        let r = vacuum_descent(&rep, &f).unwrap();
        assert_eq!(r.lowest_component, 3);
        assert_eq!(r.steps, vec![1, 1, 2]);
        assert_eq!(r.psi0.terms().len(), 1);
        assert!(r.psi0.terms().contains_key(&MultiIndex::vacuum()));
        assert_eq!(vacuum_descent(&rep, &MultiIndexState::zero(4)).unwrap_err(), Error::ZeroInput);
    }

    #[test]
    fn spectral_support_is_nonnegative() {
        let rep = build_multimode_rep(&EtaSignature::new(vec![-1, 1]).unwrap(), 3).unwrap();
        let f = MultiIndexState::monomial(vec![1, 1], c(1.0), 3).unwrap();
        let r = spectral_condition_check(&rep, &f, &f, 16).unwrap();
        assert_eq!(r.support, vec![2]);
        assert!(matches!(spectral_condition_check(&rep, &f, &f, 3), Err(Error::AliasingRisk { .. })));
    }
}
