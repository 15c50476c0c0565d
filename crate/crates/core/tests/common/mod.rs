//! Reference values for the integration tests, computed independently of the
//! library: alternating series in double-double arithmetic with an
//! Euler–Boole tail, and exact rational Bernoulli numbers.

#![allow(dead_code)]

pub mod boxes;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

// 2*pi to ~106 bits
const TWO_PI: Dd = Dd::new(std::f64::consts::TAU, 2.4492935982947064e-16);

/// `2 atanh(x)` for small `x`, double-double.
fn two_atanh(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut pow = x;
    let mut sum = x;
    let mut k = 3.0;
    loop {
        pow = pow.mul(x2);
        let term = pow.div(Dd::from(k));
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs() {
            break;
        }
        k += 2.0;
    }
    sum.add(sum)
}

/// `ln(a m + b)` for `m = 0, 1, 2, ...`, advanced by
/// `ln(y + a) = ln y + 2 atanh(a / (2y + a))`.
struct LogWalker {
    a: f64,
    y: f64,
    ln_y: Dd,
}

impl LogWalker {
    fn new(a: u32, b: u32) -> Self {
        assert!(b == 1);
        LogWalker { a: a as f64, y: 1.0, ln_y: Dd::from(0.0) }
    }

    fn advance(&mut self) {
        let ratio = Dd::from(self.a).div(Dd::from(2.0 * self.y + self.a));
        self.ln_y = self.ln_y.add(two_atanh(ratio));
        self.y += self.a;
    }
}

/// `y^{-s}` given `ln y` in double-double.
fn power(ln_y: Dd, sigma: f64, t: f64) -> Complex64 {
    let modulus = (-sigma * ln_y.hi).exp() * (1.0 - sigma * ln_y.lo);
    let phase = Dd::from(t).mul(ln_y);
    let turns = (phase.hi / TWO_PI.hi).round();
    let r = phase.sub(TWO_PI.mul(Dd::from(turns))).to_f64();
    Complex64::new(modulus * r.cos(), -modulus * r.sin())
}

/// Exact `B_0..=B_n` by the Akiyama–Tanigawa algorithm (`B_1 = +1/2` there,
/// returned here with the `-1/2` convention).
pub fn bernoulli_exact(n: usize) -> Vec<BigRational> {
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::from(1), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

fn boole_coefficients(k_max: usize) -> Vec<f64> {
    // c_k = -(2^{2k} - 1) B_{2k} / (2k)!
    let b = bernoulli_exact(2 * k_max);
    let mut fact = BigInt::from(1);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        fact *= BigInt::from((2 * k - 1) as u64) * BigInt::from((2 * k) as u64);
        let scale = (BigInt::from(1) << (2 * k)) - BigInt::from(1);
        let c = -(&b[2 * k] * BigRational::from_integer(scale)) / BigRational::from_integer(fact.clone());
        out.push(c.to_f64().unwrap());
    }
    out
}

/// Compensated complex sum.
#[derive(Default)]
struct Acc {
    re: Dd,
    im: Dd,
}

impl Default for Dd {
    fn default() -> Self {
        Dd::from(0.0)
    }
}

impl Acc {
    fn add(&mut self, z: Complex64) {
        self.re = self.re.add(Dd::from(z.re));
        self.im = self.im.add(Dd::from(z.im));
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `sum_{m >= 0} (-1)^m (a m + 1)^{-s}`.
pub fn alternating_series(a: u32, s: Complex64) -> Complex64 {
    let (sigma, t) = (s.re, s.im);
    let n = ((2.0 * t.abs() / PI) as usize).max(40) + 40;
    let mut walker = LogWalker::new(a, 1);
    let mut acc = Acc::default();
    for m in 0..n {
        let term = power(walker.ln_y, sigma, t);
        if m % 2 == 0 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
        walker.advance();
    }
    // tail (-1)^n [g(n)/2 + sum_k c_k g^{(2k-1)}(n)],
    // g^{(j)}(n) = (-1)^j (s)_j a^j y^{-s-j}, y = a n + 1
    let y = walker.y;
    let gy = power(walker.ln_y, sigma, t);
    let af = a as f64;
    let mut tail = gy * 0.5;
    let coeffs = boole_coefficients(30);
    let mut poch = s;
    let mut scale = af / y;
    for (k, c) in coeffs.iter().enumerate() {
        let term = -gy * poch * (c * scale);
        tail += term;
        if term.norm() < 1e-30 {
            break;
        }
        let j = (2 * k + 1) as f64;
        poch *= (s + j) * (s + j + 1.0);
        scale *= (af / y) * (af / y);
    }
    let tail = if n % 2 == 0 { tail } else { -tail };
    acc.add(tail);
    acc.value()
}

/// Dirichlet eta function.
pub fn eta(s: Complex64) -> Complex64 {
    alternating_series(1, s)
}

/// `zeta(s) = eta(s) / (1 - 2^{1-s})`; keep away from `Re(s) = 1, t ln 2 in 2 pi Z`.
pub fn zeta(s: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let ln2 = Dd::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
    let two_pow = power(ln2, s.re - 1.0, s.im);
    eta(s) / (one - two_pow)
}

/// `L(s, chi_4) = sum (-1)^m (2m + 1)^{-s}`.
pub fn l_chi4(s: Complex64) -> Complex64 {
    alternating_series(2, s)
}

pub fn relative_error(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

pub fn is_zero_rational(x: &BigRational) -> bool {
    x.is_zero()
}
