//! Beurling–Selberg approximants to the indicator of `[a, b]`.
//!
//! `K(z) = (sin(pi z) / (pi z))^2` is the Fejér kernel and
//! `H(z) = sin^2(pi z)/pi^2 (sum_n sgn(n)/(z - n)^2 + 2/z)`. Then
//! `F(x) = (H - K)(Delta(x - a))/2 + (H - K)(Delta(b - x))/2` satisfies
//! `|F| <= 1`, `0 <= 1_[a,b] - F <= K(Delta(x - a)) + K(Delta(b - x))`, and
//! its Fourier transform vanishes for `|y| >= Delta`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Smallest accepted explicit series length.
pub const MIN_SERIES_TERMS: usize = 64;

/// Radius around integers where `sinc^2` switches to its Taylor expansion.
const TAYLOR_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BSFunction {
    a: f64,
    b: f64,
    delta: f64,
    series_terms: usize,
}

impl BSFunction {
    pub fn new(a: f64, b: f64, delta: f64, series_terms: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("need finite a < b, got [{a}, {b}]")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("delta = {delta} must be positive")));
        }
        if series_terms < MIN_SERIES_TERMS {
            return Err(Error::Domain(format!("series_terms must be at least {MIN_SERIES_TERMS}")));
        }
        Ok(Self { a, b, delta, series_terms })
    }

    /// `[a, b]` with `Delta` and the minimum series length.
    pub fn with_defaults(a: f64, b: f64, delta: f64) -> Result<Self> {
        Self::new(a, b, delta, MIN_SERIES_TERMS)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn series_terms(&self) -> usize {
        self.series_terms
    }

    /// `K(Delta(x - a)) + K(Delta(b - x))`, the width of the sandwich at `x`.
    pub fn defect_bound(&self, x: f64) -> f64 {
        bs_k(self.delta * (x - self.a)) + bs_k(self.delta * (self.b - x))
    }
}

/// `sin^2(pi z)/pi^2`, reduced to `|z - round(z)| <= 1/2` first.
fn sin_pi_sq_over_pi_sq(z: f64) -> f64 {
    let r = z - z.round();
    let s = (PI * r).sin() / PI;
    s * s
}

/// Fejér kernel `(sin(pi z)/(pi z))^2`, `K(0) = 1`.
pub fn bs_k(z: f64) -> f64 {
    if z.abs() < TAYLOR_RADIUS {
        let w = (PI * z) * (PI * z);
        return 1.0 - w / 3.0 + 2.0 * w * w / 45.0;
    }
    sin_pi_sq_over_pi_sq(z) / (z * z)
}

/// `K^(y) = max(0, 1 - |y|)`.
pub fn khat(y: f64) -> f64 {
    (1.0 - y.abs()).max(0.0)
}

/// Trigamma `psi_1(x) = sum_{k >= 0} (x + k)^{-2}` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 16.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // psi_1(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} / x^{2k+1}
    const B: [f64; 7] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv * inv2;
    let mut series = 0.0;
    for b in B {
        series += b * pow;
        pow *= inv2;
    }
    acc + inv + 0.5 * inv2 + series
}

/// `H(z)` from `N` explicit terms on each side plus the trigamma tails
/// `sum_{n > N} 1/(n - z)^2 - 1/(n + z)^2 = psi_1(N + 1 - z) - psi_1(N + 1 + z)`.
///
/// The explicit range grows to cover `|z| + 64` so both tails sit in the
/// asymptotic regime of `psi_1`.
pub fn bs_h(z: f64, series_terms: usize) -> Result<f64> {
    if series_terms < MIN_SERIES_TERMS {
        return Err(Error::Domain(format!("series_terms must be at least {MIN_SERIES_TERMS}")));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("H is undefined at {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let m = z.round();
    let s2 = sin_pi_sq_over_pi_sq(z);
    let n_eff = series_terms.max(z.abs().ceil() as usize + 64);
    let mut sum = 0.0;
    for n in (1..=n_eff).rev() {
        let nf = n as f64;
        if nf != m {
            sum += 1.0 / ((z - nf) * (z - nf));
        }
        if -nf != m {
            sum -= 1.0 / ((z + nf) * (z + nf));
        }
    }
    let nf = n_eff as f64 + 1.0;
    let tail = trigamma(nf - z) - trigamma(nf + z);
    let mut value = s2 * (sum + tail) + 2.0 * z * bs_k(z);
    if m != 0.0 {
        value += m.signum() * bs_k(z - m);
    }
    Ok(value)
}

/// Closed form `H(z) = 1 - K(z) + 2 sin^2(pi z)/pi^2 (1/z - psi_1(z + 1))`
/// for `z > 0`, from `sum_n (z - n)^{-2} = pi^2 / sin^2(pi z)`; odd in `z`.
fn h_closed(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let x = z.abs();
    let v = 1.0 - bs_k(x) + 2.0 * sin_pi_sq_over_pi_sq(x) * (1.0 / x - trigamma(x + 1.0));
    v.copysign(z)
}

/// `F_{[a,b],Delta}(x)`.
pub fn bs_f(f: &BSFunction, x: f64) -> Result<f64> {
    let u = f.delta * (x - f.a);
    let v = f.delta * (f.b - x);
    let left = bs_h(u, f.series_terms)? - bs_k(u);
    let right = bs_h(v, f.series_terms)? - bs_k(v);
    Ok(0.5 * (left + right))
}

fn f_closed(f: &BSFunction, x: f64) -> f64 {
    let u = f.delta * (x - f.a);
    let v = f.delta * (f.b - x);
    0.5 * (h_closed(u) - bs_k(u) + h_closed(v) - bs_k(v))
}

/// `1^_[a,b](y) = (e^{-2 pi i a y} - e^{-2 pi i b y}) / (2 pi i y)`.
pub fn indicator_fourier(a: f64, b: f64, y: f64) -> Complex64 {
    if y == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    let ea = Complex64::from_polar(1.0, -2.0 * PI * a * y);
    let eb = Complex64::from_polar(1.0, -2.0 * PI * b * y);
    (ea - eb) / Complex64::new(0.0, 2.0 * PI * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct FourierQuadrature {
    /// Half-width of the integration range beyond `[a, b]`; chosen from
    /// `Delta` when absent.
    pub window: Option<f64>,
    /// Largest accepted difference between the rule and its refinement.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub value: Complex64,
    /// Difference between the rule and the same rule on half-width panels.
    pub error_estimate: f64,
    /// `int_{|x - c| > W} |1_[a,b] - F|`, a crude bound on the truncation.
    pub tail_bound: f64,
    pub window: f64,
}

/// Default window beyond `[a, b]`: the integrand decays like
/// `sin^2(pi Delta u)/(Delta u)^2`, whose oscillating part needs a longer
/// range when `Delta` is small.
pub fn default_window(delta: f64) -> f64 {
    (20.0 / delta).max(2000.0 / delta.powf(1.5))
}

/// `int F(x) e^{-2 pi i x y} dx` by composite Gauss–Legendre.
///
/// `F` is even about `c = (a + b)/2`, so the transform is
/// `e^{-2 pi i c y} 2 int_0^W F(c + u) cos(2 pi u y) du`; panels are at most
/// half a period of the fastest oscillation wide.
pub fn bs_f_fourier(f: &BSFunction, y: f64, params: &FourierQuadrature) -> Result<FourierValue> {
    let c = 0.5 * (f.a + f.b);
    let half = 0.5 * (f.b - f.a);
    let window = params.window.unwrap_or_else(|| default_window(f.delta));
    let upper = half + window;
    let freq = f.delta.max(y.abs()).max(1.0 / upper);
    let panels = ((upper * 2.0 * freq).ceil() as usize).max(4);
    let g = |u: f64| 2.0 * f_closed(f, c + u) * (2.0 * PI * u * y).cos();
    let coarse: f64 = quadrature::composite(g, 0.0, upper, panels);
    let fine: f64 = quadrature::composite(g, 0.0, upper, 2 * panels);
    let error_estimate = (fine - coarse).abs();
    let tolerance = params.tolerance.unwrap_or(1e-9);
    if !(error_estimate <= tolerance) {
        return Err(Error::Quadrature { estimate: error_estimate });
    }
    // 1_[a,b] - F <= 2 K-type terms, each <= 1/(pi Delta s)^2 at distance s
    let tail_bound = 4.0 / (PI * PI * f.delta * f.delta * window);
    Ok(FourierValue {
        value: Complex64::from_polar(fine, -2.0 * PI * c * y),
        error_estimate,
        tail_bound,
        window,
    })
}

/// `int_{-W}^{W} K(x) e^{-2 pi i x y} dx` plus the non-oscillating part of the
/// tail: `sin^2 = (1 - cos 2 pi x)/2` leaves `1/(pi^2 W)` at `y = 0` and half
/// of it with the opposite sign at `|y| = 1`.
pub fn fejer_fourier(y: f64, window: f64) -> f64 {
    let panels = (window * 2.0 * (1.0 + y.abs())).ceil() as usize;
    let body: f64 = quadrature::composite(|x| 2.0 * bs_k(x) * (2.0 * PI * x * y).cos(), 0.0, window, panels);
    let c0 = if y == 0.0 {
        1.0
    } else if y.abs() == 1.0 {
        -0.5
    } else {
        0.0
    };
    body + c0 / (PI * PI * window)
}
