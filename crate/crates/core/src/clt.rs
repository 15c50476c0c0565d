//! Hermite polynomials and the Gaussian leading term of the central limit
//! theorem for `log L`.
//!
//! Hermite polynomials follow the physicists' convention
//! `H_n(x) = (-1)^n e^{x^2} d^n/dx^n e^{-x^2}`, so `H_1 = 2x`,
//! `H_{n+1} = 2x H_n - 2n H_{n-1}`. After normalizing by `sqrt(pi psi)`
//! each coordinate is compared with the density `e^{-pi u^2}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::io::column_names;
use crate::measures::EmpiricalMeasure;
use crate::stats::ks_one_sample;

pub const MAX_HERMITE_DEGREE: usize = 40;

/// Integer coefficient table of `H_0..=H_max`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteBasis {
    coeffs: Vec<Vec<i128>>,
}

impl HermiteBasis {
    pub fn new(max_degree: usize) -> Result<Self> {
        if max_degree > MAX_HERMITE_DEGREE {
            return Err(Error::Domain(format!("degree {max_degree} above {MAX_HERMITE_DEGREE}")));
        }
        let mut coeffs: Vec<Vec<i128>> = vec![vec![1]];
        if max_degree >= 1 {
            coeffs.push(vec![0, 2]);
        }
        for n in 1..max_degree {
            let mut next = vec![0i128; n + 2];
            for (i, c) in coeffs[n].iter().enumerate() {
                next[i + 1] += 2 * c;
            }
            for (i, c) in coeffs[n - 1].iter().enumerate() {
                next[i] -= 2 * n as i128 * c;
            }
            coeffs.push(next);
        }
        Ok(Self { coeffs })
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients of `H_n`, lowest degree first.
    pub fn coefficients(&self, n: usize) -> Option<&[i128]> {
        self.coeffs.get(n).map(|c| c.as_slice())
    }

    /// `H_n(x)` exactly at an integer point.
    pub fn eval_integer(&self, n: usize, x: i128) -> Option<i128> {
        let c = self.coefficients(n)?;
        Some(c.iter().rev().fold(0i128, |acc, &ci| acc * x + ci))
    }
}

/// `H_n(x)` by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(Error::Domain(format!("degree {n} above {MAX_HERMITE_DEGREE}")));
    }
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// `int_a^b e^{-pi u^2} du`; infinite limits allowed.
pub fn gaussian_box_integral(a: f64, b: f64) -> f64 {
    let s = PI.sqrt();
    if a >= 0.0 {
        0.5 * (libm::erfc(s * a) - libm::erfc(s * b))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-s * b) - libm::erfc(-s * a))
    } else {
        0.5 * (libm::erf(s * b) - libm::erf(s * a))
    }
}

/// CDF of the density `e^{-pi u^2}`.
pub fn gaussian_cdf(u: f64) -> f64 {
    gaussian_box_integral(f64::NEG_INFINITY, u)
}

/// `int_a^b e^{-pi u^2} H_k(sqrt(pi) u) du`.
///
/// For `k >= 1`, `d/du [e^{-pi u^2} H_{k-1}(sqrt(pi) u)] = -sqrt(pi) e^{-pi u^2} H_k(sqrt(pi) u)`.
pub fn hermite_box_integral(k: usize, a: f64, b: f64) -> Result<f64> {
    if k > MAX_HERMITE_DEGREE {
        return Err(Error::Domain(format!("degree {k} above {MAX_HERMITE_DEGREE}")));
    }
    if k == 0 {
        return Ok(gaussian_box_integral(a, b));
    }
    let s = PI.sqrt();
    let boundary = |u: f64| -> Result<f64> {
        if u.is_infinite() {
            return Ok(0.0);
        }
        Ok((-PI * u * u).exp() * hermite(k - 1, s * u)?)
    };
    Ok((boundary(a)? - boundary(b)?) / s)
}

/// One coefficient `b_{k,l}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub k: Vec<u32>,
    pub l: Vec<u32>,
    pub value: f64,
}

/// Coefficients `b_{k,l}` of the Hermite expansion, `b_{0,0} = 1`, no order-1 terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    j: usize,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), f64>,
}

impl ExpansionCoefficients {
    /// Only the Gaussian term.
    pub fn leading(j: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![0; j], vec![0; j]), 1.0);
        Self { j, terms }
    }

    /// Validates user-supplied terms; an absent `b_{0,0}` is taken as 1.
    pub fn new(j: usize, entries: &[ExpansionTerm]) -> Result<Self> {
        let mut out = Self::leading(j);
        for e in entries {
            if e.k.len() != j || e.l.len() != j {
                return Err(Error::DimensionMismatch { expected: j, found: e.k.len().max(e.l.len()) });
            }
            if !e.value.is_finite() {
                return Err(Error::Config("expansion coefficients must be finite".into()));
            }
            let order: u32 = e.k.iter().chain(&e.l).sum();
            if order == 0 && e.value != 1.0 {
                return Err(Error::Config(format!("b_(0,0) must be 1, got {}", e.value)));
            }
            if order == 1 && e.value != 0.0 {
                return Err(Error::Config("coefficients of total order 1 must vanish".into()));
            }
            if e.k.iter().chain(&e.l).any(|&d| d as usize > MAX_HERMITE_DEGREE) {
                return Err(Error::Config(format!("Hermite degree above {MAX_HERMITE_DEGREE}")));
            }
            if out.terms.insert((e.k.clone(), e.l.clone()), e.value).is_some() && order != 0 {
                return Err(Error::Config(format!("duplicate coefficient for k={:?}, l={:?}", e.k, e.l)));
            }
        }
        Ok(out)
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|(k, l)| k.iter().chain(l).sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], f64)> {
        self.terms.iter().map(|((k, l), v)| (k.as_slice(), l.as_slice(), *v))
    }
}

/// Normalized box: `[a_j, b_j]` for `log|L_j|/sqrt(pi psi_j)` and
/// `[c_j, d_j]` for `arg L_j/sqrt(pi psi_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CLTRectangle {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    /// `psi_j = xi_j log G`
    pub psi: Vec<f64>,
}

impl CLTRectangle {
    pub fn validate(&self) -> Result<()> {
        let j = self.psi.len();
        for v in [&self.a, &self.b, &self.c, &self.d] {
            if v.len() != j {
                return Err(Error::DimensionMismatch { expected: j, found: v.len() });
            }
        }
        let ordered = |lo: &[f64], hi: &[f64]| lo.iter().zip(hi).all(|(l, h)| l <= h);
        if !ordered(&self.a, &self.b) || !ordered(&self.c, &self.d) {
            return Err(Error::Domain("box sides must satisfy lower <= upper".into()));
        }
        if self.psi.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::Domain("psi must be positive".into()));
        }
        Ok(())
    }

    /// The equivalent box in raw coordinates `(log|L_1|, arg L_1, ...)`.
    pub fn raw_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for j in 0..self.psi.len() {
            let s = (PI * self.psi[j]).sqrt();
            lo.extend([self.a[j] * s, self.c[j] * s]);
            hi.extend([self.b[j] * s, self.d[j] * s]);
        }
        (lo, hi)
    }
}

/// `sum b_{k,l} prod_j psi_j^{-(k_j + l_j)/2} I_{k_j}(a_j, b_j) I_{l_j}(c_j, d_j)`.
pub fn expansion_eval(coeffs: &ExpansionCoefficients, rect: &CLTRectangle) -> Result<f64> {
    rect.validate()?;
    if rect.psi.len() != coeffs.j() {
        return Err(Error::DimensionMismatch { expected: coeffs.j(), found: rect.psi.len() });
    }
    let mut total = 0.0;
    for (k, l, value) in coeffs.terms() {
        let mut prod = value;
        for j in 0..coeffs.j() {
            prod *= rect.psi[j].powf(-f64::from(k[j] + l[j]) / 2.0);
            prod *= hermite_box_integral(k[j] as usize, rect.a[j], rect.b[j])?;
            prod *= hermite_box_integral(l[j] as usize, rect.c[j], rect.d[j])?;
        }
        total += prod;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltConfig {
    /// `psi_j = xi_j log G`, one per spec.
    pub psi: Vec<f64>,
    /// Largest accepted KS distance; `1.63/sqrt(n)` when absent.
    pub ks_tolerance: Option<f64>,
    /// Boxes compared with the leading-order prediction; a standard battery when empty.
    #[serde(default)]
    pub boxes: Vec<CLTRectangle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateFit {
    pub axis: usize,
    pub name: String,
    pub ks: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCheck {
    pub rect: CLTRectangle,
    pub predicted: f64,
    pub observed: f64,
    /// Binomial standard error of `observed` under the prediction.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: usize,
    pub ks_tolerance: f64,
    pub coordinates: Vec<CoordinateFit>,
    /// Informational; finite `log G` biases box counts by more than their noise.
    pub boxes: Vec<BoxCheck>,
    /// Every coordinate's KS distance is within tolerance.
    pub passed: bool,
}

/// One-coordinate slabs `|u| <= h` for `h` in {0.1, 0.25, 0.5} and the centred cube of side 0.5.
pub fn standard_battery(psi: &[f64]) -> Vec<CLTRectangle> {
    let j = psi.len();
    let inf = vec![f64::INFINITY; j];
    let ninf = vec![f64::NEG_INFINITY; j];
    let mut out = Vec::new();
    for axis in 0..2 * j {
        for h in [0.1, 0.25, 0.5] {
            let mut r = CLTRectangle { a: ninf.clone(), b: inf.clone(), c: ninf.clone(), d: inf.clone(), psi: psi.to_vec() };
            let (lo, hi) = if axis % 2 == 0 { (&mut r.a, &mut r.b) } else { (&mut r.c, &mut r.d) };
            lo[axis / 2] = -h;
            hi[axis / 2] = h;
            out.push(r);
        }
    }
    out.push(CLTRectangle { a: vec![-0.25; j], b: vec![0.25; j], c: vec![-0.25; j], d: vec![0.25; j], psi: psi.to_vec() });
    out
}

/// Normalizes each coordinate by `sqrt(pi psi_j)` and compares with `e^{-pi u^2}`.
pub fn clt_fit(m: &EmpiricalMeasure, config: &CltConfig) -> Result<CltReport> {
    let j = config.psi.len();
    if m.dim() != 2 * j {
        return Err(Error::DimensionMismatch { expected: 2 * j, found: m.dim() });
    }
    if config.psi.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::Domain("psi must be positive".into()));
    }
    let n = m.len();
    let tol = config.ks_tolerance.unwrap_or(1.63 / (n as f64).sqrt());
    let names = column_names(m.dim());
    let coordinates: Vec<CoordinateFit> = (0..m.dim())
        .into_par_iter()
        .map(|axis| {
            let scale = (PI * config.psi[axis / 2]).sqrt();
            let u: Vec<f64> = m.points().map(|p| p[axis] / scale).collect();
            let ks = ks_one_sample(&u, gaussian_cdf);
            CoordinateFit { axis, name: names[axis].clone(), ks, passed: ks <= tol }
        })
        .collect();
    let boxes = if config.boxes.is_empty() { standard_battery(&config.psi) } else { config.boxes.clone() };
    let leading = ExpansionCoefficients::leading(j);
    let boxes = boxes
        .into_iter()
        .map(|rect| {
            let predicted = expansion_eval(&leading, &rect)?;
            let (lo, hi) = rect.raw_bounds();
            let inside = crate::measures::Rectangle::new(lo, hi)?;
            let observed = crate::measures::measure_rect(m, &inside)?;
            let std_error = (predicted * (1.0 - predicted) / n as f64).sqrt();
            Ok(BoxCheck { rect, predicted, observed, std_error })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = coordinates.iter().all(|c| c.passed);
    Ok(CltReport { n, ks_tolerance: tol, coordinates, boxes, passed })
}
