//! Parabolic cylinder functions `D_λ(x)` from the Kummer-series
//! decomposition, `F_λ(z) = D_λ(√2 z)`, and the ladder/ODE residuals.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Validity window of [`weber_d`].
pub const MAX_ABS_LAMBDA: f64 = 20.0;
pub const MAX_ABS_X: f64 = 12.0;
const MAX_TERMS: usize = 400;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(πx)`, exactly zero at integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// Lanczos sum for `x ≥ 0.5`.
fn gamma_lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * (t.ln() * (x + 0.5) - t).exp() * a
}

/// `(x − 1)!` when `x` is a positive integer small enough to be exact.
fn factorial_at(x: f64) -> Option<f64> {
    ((1.0..=23.0).contains(&x) && x.fract() == 0.0).then(|| (2..x as u32).fold(1.0, |acc, k| acc * k as f64))
}

/// Γ(x) for real `x`; poles give `±inf`/NaN as in IEEE division.
pub fn gamma(x: f64) -> f64 {
    if let Some(f) = factorial_at(x) {
        f
    } else if x < 0.5 {
        PI / (sin_pi(x) * gamma_lanczos(1.0 - x))
    } else {
        gamma_lanczos(x)
    }
}

/// `1/Γ(x)`, zero at the poles `x = 0, −1, −2, …`.
pub fn rgamma(x: f64) -> f64 {
    if let Some(f) = factorial_at(x) {
        1.0 / f
    } else if x < 0.5 {
        sin_pi(x) * gamma_lanczos(1.0 - x) / PI
    } else {
        1.0 / gamma_lanczos(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcfValue {
    pub lambda: f64,
    pub x: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub second_derivative: Complex64,
    pub error_estimate: f64,
}

/// Power series `Σ c_k x^{2k+s}` of a Kummer function in `x²/2`, with its
/// first two derivatives in `x`.
struct SeriesSum {
    s: Complex64,
    ds: Complex64,
    dds: Complex64,
    abs_sum: f64,
    tail: f64,
}

/// `Σ_k (a)_k / ((b)_k k! 2^k) · x^{2k+shift}`, `shift ∈ {0, 1}`.
fn kummer_in_x(a: f64, b: f64, shift: u32, x: Complex64) -> SeriesSum {
    let x2 = x * x;
    let w = x2.norm() / 2.0;
    let min_terms = (2.0 * w + a.abs() + 2.0).ceil() as usize;
    let mut coef = 1.0f64;
    // x^{2k+shift}, x^{2k+shift-1}, x^{2k+shift-2}
    let mut p0 = if shift == 1 { x } else { Complex64::new(1.0, 0.0) };
    let mut p1 = if shift == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    let mut p2 = Complex64::new(0.0, 0.0);
    let (mut s, mut ds, mut dds) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut abs_sum = 0.0;
    let mut tail = 0.0;
    for k in 0..MAX_TERMS {
        let e = (2 * k) as f64 + shift as f64;
        let t = p0 * coef;
        s += t;
        if e >= 1.0 {
            ds += p1 * (coef * e);
        }
        if e >= 2.0 {
            dds += p2 * (coef * e * (e - 1.0));
        }
        abs_sum += t.norm();
        // advance to k + 1
        let kf = k as f64;
        coef *= (a + kf) / ((b + kf) * (kf + 1.0) * 2.0);
        let e_next = e + 2.0;
        // powers for exponent e_next: x^{e_next}, x^{e_next−1}, x^{e_next−2}
        p2 = p0;
        p1 = if e_next - 1.0 == 1.0 { x } else { p1 * x2 };
        p0 *= x2;
        let next = (p0 * coef).norm();
        if coef == 0.0 {
            tail = 0.0;
            break;
        }
        if k + 1 >= min_terms && next <= 1e-16 * s.norm() {
            tail = 2.0 * next;
            break;
        }
        tail = 2.0 * next;
    }
    SeriesSum { s, ds, dds, abs_sum, tail }
}

fn check_window(lambda: f64, x: Complex64) -> Result<()> {
    if !lambda.is_finite() || lambda.abs() > MAX_ABS_LAMBDA {
        return Err(Error::DomainError(format!("|lambda| must be at most {MAX_ABS_LAMBDA}, got {lambda}")));
    }
    if !(x.re.is_finite() && x.im.is_finite()) || x.norm() > MAX_ABS_X {
        return Err(Error::DomainError(format!("|x| must be at most {MAX_ABS_X}, got {x}")));
    }
    Ok(())
}

/// `D_λ(x) = 2^{λ/2} e^{−x²/4} [√π/Γ((1−λ)/2) M(−λ/2, ½, x²/2)
///  − √(2π) x/Γ(−λ/2) M((1−λ)/2, 3/2, x²/2)]`, with derivatives from the
/// term-wise differentiated series.
pub fn weber_d(lambda: f64, x: Complex64) -> Result<PcfValue> {
    check_window(lambda, x)?;
    let ca = PI.sqrt() * rgamma((1.0 - lambda) / 2.0);
    let cb = -(2.0 * PI).sqrt() * rgamma(-lambda / 2.0);
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = p;
    let mut ddp = p;
    let mut err = 0.0;
    if ca != 0.0 {
        let s1 = kummer_in_x(-lambda / 2.0, 0.5, 0, x);
        p += s1.s * ca;
        dp += s1.ds * ca;
        ddp += s1.dds * ca;
        err += ca.abs() * (s1.tail + 8.0 * f64::EPSILON * s1.abs_sum);
    }
    if cb != 0.0 {
        let s2 = kummer_in_x((1.0 - lambda) / 2.0, 1.5, 1, x);
        p += s2.s * cb;
        dp += s2.ds * cb;
        ddp += s2.dds * cb;
        err += cb.abs() * (s2.tail + 8.0 * f64::EPSILON * s2.abs_sum);
    }
    let pref = (-x * x / 4.0).exp() * 2f64.powf(lambda / 2.0);
    let value = pref * p;
    let derivative = pref * (dp - x * p / 2.0);
    let second_derivative = pref * (ddp - x * dp - p / 2.0 + x * x * p / 4.0);
    Ok(PcfValue { lambda, x, value, derivative, second_derivative, error_estimate: pref.norm() * err })
}

pub fn weber_d_real(lambda: f64, x: f64) -> Result<PcfValue> {
    weber_d(lambda, Complex64::new(x, 0.0))
}

/// `F_λ(z) = D_λ(√2 z)` and `∂_z F_λ(z) = √2 D′_λ(√2 z)`.
pub fn f_lambda(lambda: f64, z: f64) -> Result<(f64, f64)> {
    let v = weber_d_real(lambda, SQRT_2 * z)?;
    Ok((v.value.re, SQRT_2 * v.derivative.re))
}

/// `D″ + (λ + ½ − x²/4) D` from the series derivatives.
pub fn weber_ode_residual(lambda: f64, x: Complex64) -> Result<Complex64> {
    let v = weber_d(lambda, x)?;
    Ok(v.second_derivative + (lambda + 0.5 - x * x / 4.0) * v.value)
}

/// `y(x) = D_{−λ−1}(ix)` with `y′` and `y″`; `y` solves the same Weber
/// equation as `D_λ`.
pub fn second_solution(lambda: f64, x: f64) -> Result<(Complex64, Complex64, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    let v = weber_d(-lambda - 1.0, i * x)?;
    Ok((v.value, i * v.derivative, -v.second_derivative))
}

pub fn second_solution_residual(lambda: f64, x: f64) -> Result<Complex64> {
    let (y, _, ypp) = second_solution(lambda, x)?;
    Ok(ypp + (lambda + 0.5 - x * x / 4.0) * y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderResiduals {
    pub up: f64,
    pub down: f64,
}

/// Max over the grid of `|(z − ∂_z)F_λ/√2 − F_{λ+1}|` and
/// `|(z + ∂_z)F_λ/√2 − λF_{λ−1}|`.
pub fn ladder_check(lambda: f64, grid: &[f64]) -> Result<LadderResiduals> {
    let mut res = LadderResiduals { up: 0.0, down: 0.0 };
    for &z in grid {
        let (f, df) = f_lambda(lambda, z)?;
        let (fp, _) = f_lambda(lambda + 1.0, z)?;
        let (fm, _) = f_lambda(lambda - 1.0, z)?;
        res.up = res.up.max(((z * f - df) / SQRT_2 - fp).abs());
        res.down = res.down.max(((z * f + df) / SQRT_2 - lambda * fm).abs());
    }
    Ok(res)
}

/// Equispaced grid `start, start + step, …` up to `end` inclusive.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn low_orders_in_closed_form() {
        for x in [0.0, 1.0, 2.0] {
            let d0 = weber_d_real(0.0, x).unwrap();
            assert!((d0.value.re - (-x * x / 4.0f64).exp()).abs() < 1e-12);
            let d1 = weber_d_real(1.0, x).unwrap();
            assert!((d1.value.re - x * (-x * x / 4.0f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn window_is_enforced() {
        assert!(matches!(weber_d_real(21.0, 0.0), Err(Error::DomainError(_))));
        assert!(matches!(weber_d_real(0.0, 12.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn lowering_the_ground_state_gives_zero() {
        let r = ladder_check(0.0, &grid(-2.0, 2.0, 0.5)).unwrap();
        assert!(r.down < 1e-12 && r.up < 1e-12, "{r:?}");
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(-3.0, 3.0, 0.25);
        assert_eq!(g.len(), 25);
        assert_eq!(g[24], 3.0);
    }
}
