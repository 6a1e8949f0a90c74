//! Coefficient fields.
//!
//! Symbolic work runs over [`Exact`], the field Q(i, √2) stored as four
//! rational components, so identities such as the Schroedinger realization
//! `a = (z + d)/√2` can be checked with zero tolerance. The same code paths
//! also run over `Complex64` when parameters are only known numerically.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
pub use num_traits::{One, Zero};
use num_traits::{Signed, ToPrimitive};

/// Operations the algebra engine needs from a coefficient field.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + 'static
    + Zero
    + One
    + Sub<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// `self / o`; real divisors divide component-wise, so quotients of
    /// exactly representable integers stay exact in floating point.
    fn checked_div(&self, o: &Self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Equality up to `tol`; exact fields ignore the tolerance.
    fn near(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn checked_div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else if o.im == 0.0 {
            Some(self.unscale(o.re))
        } else {
            Some(self / o)
        }
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

/// Element `rat + irr·√2` of Q(√2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QSqrt2 {
    pub rat: BigRational,
    pub irr: BigRational,
}

impl QSqrt2 {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        Self { rat, irr }
    }

    pub fn rational(r: BigRational) -> Self {
        Self { rat: r, irr: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.rat.to_f64().unwrap_or(f64::NAN) + self.irr.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Exact sign: +1, 0 or -1.
    pub fn signum(&self) -> i32 {
        // a + b√2 > 0 decided without floating point
        let a = &self.rat;
        let b = &self.irr;
        let sa = sign_of(a);
        let sb = sign_of(b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a² with 2b²
        let a2 = a * a;
        let b2 = b * b * BigRational::from_integer(BigInt::from(2));
        match a2.cmp(&b2) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let norm = &self.rat * &self.rat - two * &self.irr * &self.irr;
        Some(Self { rat: &self.rat / &norm, irr: -(&self.irr / &norm) })
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { rat: self.rat + o.rat, irr: self.irr + o.irr }
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { rat: self.rat - o.rat, irr: self.irr - o.irr }
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        Self { rat: &self.rat * &o.rat + two * &self.irr * &o.irr, irr: &self.rat * &o.irr + &self.irr * &o.rat }
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { rat: -self.rat, irr: -self.irr }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.irr.is_zero()) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{} sqrt2", self.irr),
            (false, false) => write!(f, "{} + {} sqrt2", self.rat, self.irr),
        }
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact element of Q(i, √2): `re + i·im` with `re, im ∈ Q(√2)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exact {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Exact {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { re: QSqrt2::rational(r), im: QSqrt2::zero() }
    }

    /// `re + i·im` with rational parts.
    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Self { re: QSqrt2::rational(re), im: QSqrt2::rational(im) }
    }

    pub fn i() -> Self {
        Self { re: QSqrt2::zero(), im: QSqrt2::rational(BigRational::one()) }
    }

    pub fn sqrt2() -> Self {
        Self { re: QSqrt2::new(BigRational::zero(), BigRational::one()), im: QSqrt2::zero() }
    }

    /// `1/√2`, i.e. `√2/2`.
    pub fn inv_sqrt2() -> Self {
        Self { re: QSqrt2::new(BigRational::zero(), BigRational::new(1.into(), 2.into())), im: QSqrt2::zero() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when the value lies in Q(i), i.e. carries no √2 component.
    pub fn is_gaussian_rational(&self) -> bool {
        self.re.irr.is_zero() && self.im.irr.is_zero()
    }
}

impl Add for Exact {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Exact {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Exact {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        Self { re, im }
    }
}

impl Neg for Exact {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Zero for Exact {
    fn zero() -> Self {
        Self { re: QSqrt2::zero(), im: QSqrt2::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Exact {
    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, o: Self) {
        *self = std::mem::replace(self, Exact::zero()) + o;
    }
}

impl SubAssign for Exact {
    fn sub_assign(&mut self, o: Self) {
        *self = std::mem::replace(self, Exact::zero()) - o;
    }
}

impl MulAssign for Exact {
    fn mul_assign(&mut self, o: Self) {
        *self = std::mem::replace(self, Exact::zero()) * o;
    }
}

impl Scalar for Exact {
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }
    fn inv(&self) -> Option<Self> {
        let norm = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        let inv_norm = norm.inv()?;
        Some(Self { re: self.re.clone() * inv_norm.clone(), im: -(self.im.clone() * inv_norm) })
    }
    fn checked_div(&self, o: &Self) -> Option<Self> {
        Some(self.clone() * o.inv()?)
    }
    fn from_i64(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl fmt::Display for Exact {
    /// Prints in the expression-language syntax (`1/2`, `3i`, `(1/2 + 2i)`,
    /// `(1/2 sqrt2)`), so printed coefficients parse back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        push_part(&mut parts, &self.re.rat, "");
        push_part(&mut parts, &self.re.irr, " sqrt2");
        push_part(&mut parts, &self.im.rat, "i");
        push_part(&mut parts, &self.im.irr, "i sqrt2");
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                s.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        let simple = parts.len() == 1 && !s.contains(' ');
        if simple {
            write!(f, "{s}")
        } else {
            write!(f, "({s})")
        }
    }
}

fn push_part(parts: &mut Vec<String>, r: &BigRational, suffix: &str) {
    if r.is_zero() {
        return;
    }
    parts.push(format!("{r}{suffix}"));
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
