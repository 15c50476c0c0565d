//! Euler-product description of an L-function and the Dirichlet-series data
//! derived from it.
//!
//! A spec supplies the local roots `alpha_i(p)`; everything else
//! (`beta(p^r)`, the truncated polynomial `R_Y`, Selberg sums) is computed
//! from them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{self, characters_mod, DirichletCharacter};
use crate::error::{Error, Result};

/// Local roots `alpha_i(p)`: `(p, i) -> alpha_i(p)` for `i < degree`.
pub type LocalRoots = Arc<dyn Fn(u64, usize) -> Complex64 + Send + Sync>;

/// Analytic continuation available for evaluating `L` off the region of
/// absolute convergence.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticForm {
    Zeta,
    Dirichlet(DirichletCharacter),
}

#[derive(Clone)]
pub struct LFunctionSpec {
    label: String,
    degree: usize,
    roots: LocalRoots,
    eta: f64,
    xi: f64,
    analytic: Option<AnalyticForm>,
}

impl fmt::Debug for LFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LFunctionSpec")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .field("eta", &self.eta)
            .field("xi", &self.xi)
            .field("analytic", &self.analytic.as_ref().map(|a| match a {
                AnalyticForm::Zeta => "zeta".to_string(),
                AnalyticForm::Dirichlet(c) => format!("chi mod {} #{}", c.modulus(), c.index()),
            }))
            .finish()
    }
}

impl LFunctionSpec {
    /// A user-defined spec. No analytic continuation is attached, so only
    /// Euler-product quantities (random model, `R_Y`, Selberg sums) apply.
    pub fn new(
        label: impl Into<String>,
        degree: usize,
        eta: f64,
        xi: f64,
        roots: LocalRoots,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        if !(0.0..0.5).contains(&eta) {
            return Err(Error::Domain(format!("eta = {eta} outside [0, 1/2)")));
        }
        if !(xi > 0.0) {
            return Err(Error::Domain(format!("xi = {xi} must be positive")));
        }
        Ok(Self {
            label: label.into(),
            degree,
            roots,
            eta,
            xi,
            analytic: None,
        })
    }

    pub fn zeta() -> Self {
        Self {
            label: "zeta".into(),
            degree: 1,
            roots: Arc::new(|_, _| Complex64::new(1.0, 0.0)),
            eta: 0.0,
            xi: 1.0,
            analytic: Some(AnalyticForm::Zeta),
        }
    }

    pub fn dirichlet(chi: DirichletCharacter) -> Self {
        let label = format!("dirichlet:q={}:index={}", chi.modulus(), chi.index());
        let table = chi.clone();
        Self {
            label,
            degree: 1,
            roots: Arc::new(move |p, _| table.value(p)),
            eta: 0.0,
            xi: 1.0,
            analytic: Some(AnalyticForm::Dirichlet(chi)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn analytic(&self) -> Option<&AnalyticForm> {
        self.analytic.as_ref()
    }

    /// `alpha_i(p)`; `p` is assumed prime.
    pub fn alpha(&self, p: u64, i: usize) -> Complex64 {
        (self.roots)(p, i)
    }

    /// All local roots at `p`.
    pub fn alphas(&self, p: u64) -> Vec<Complex64> {
        (0..self.degree).map(|i| self.alpha(p, i)).collect()
    }

    /// `beta(p^r) = (1/r) sum_i alpha_i(p)^r` without the primality check.
    pub(crate) fn beta_unchecked(&self, p: u64, r: u32) -> Complex64 {
        let s: Complex64 = (0..self.degree).map(|i| self.alpha(p, i).powu(r)).sum();
        s / r as f64
    }
}

/// `beta_L(p^r) = (1/r) sum_{i <= d} alpha_i(p)^r`.
pub fn beta_coeff(spec: &LFunctionSpec, p: u64, r: u32) -> Result<Complex64> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if r == 0 {
        return Err(Error::Domain("prime-power exponent must be at least 1".into()));
    }
    Ok(spec.beta_unchecked(p, r))
}

/// The upper bound `(d/r) p^{r eta}` on `|beta(p^r)|`.
pub fn beta_bound(spec: &LFunctionSpec, p: u64, r: u32) -> f64 {
    spec.degree as f64 / r as f64 * (p as f64).powf(r as f64 * spec.eta)
}

/// One term `beta(n) n^{-s}` of a Dirichlet polynomial, `n = p^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimePowerTerm {
    pub n: u64,
    pub p: u64,
    pub r: u32,
    pub ln_n: f64,
    pub beta: Complex64,
}

impl PrimePowerTerm {
    /// `beta(n) n^{-s}`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let modulus = (-s.re * self.ln_n).exp();
        let (sin, cos) = (s.im * self.ln_n).sin_cos();
        self.beta * Complex64::new(modulus * cos, -modulus * sin)
    }
}

/// `R_Y(s) = sum_{p^r <= Y} beta(p^r) p^{-rs}` with its terms in ascending `n`.
#[derive(Debug, Clone)]
pub struct DirichletPolynomial {
    y: f64,
    terms: Vec<PrimePowerTerm>,
}

impl DirichletPolynomial {
    pub fn new(spec: &LFunctionSpec, y: f64) -> Self {
        let mut terms = Vec::new();
        if y >= 2.0 {
            let limit = y.floor() as u64;
            let primes = arith::primes_up_to(limit).expect("limit >= 2");
            for &p in primes.primes() {
                let mut n = p;
                let mut r = 1u32;
                loop {
                    terms.push(PrimePowerTerm {
                        n,
                        p,
                        r,
                        ln_n: (n as f64).ln(),
                        beta: spec.beta_unchecked(p, r),
                    });
                    match n.checked_mul(p) {
                        Some(next) if next <= limit => {
                            n = next;
                            r += 1;
                        }
                        _ => break,
                    }
                }
            }
            terms.sort_by_key(|t| t.n);
        }
        Self { y, terms }
    }

    pub fn cutoff(&self) -> f64 {
        self.y
    }

    pub fn terms(&self) -> &[PrimePowerTerm] {
        &self.terms
    }

    /// Sum in ascending order of `n`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, t| acc + t.eval(s))
    }
}

/// `R_Y(s)` for a single point; build a [`DirichletPolynomial`] to reuse the
/// term list across many `s`.
pub fn ry_eval(spec: &LFunctionSpec, y: f64, s: Complex64) -> Result<Complex64> {
    if !(y >= 0.0) {
        return Err(Error::Domain(format!("cutoff Y = {y} must be non-negative")));
    }
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("Re(s) = {} must be positive", s.re)));
    }
    Ok(DirichletPolynomial::new(spec, y).eval(s))
}

/// `sum_{p <= x} |beta(p)|^2 / p`.
pub fn selberg_partial_sum(spec: &LFunctionSpec, x: f64) -> Result<f64> {
    Ok(selberg_cross_sum(spec, spec, x)?.re)
}

/// `sum_{p <= x} beta_j(p) conj(beta_k(p)) / p`, the cross-correlation sums
/// whose diagonal grows like `xi log log x`.
pub fn selberg_cross_sum(a: &LFunctionSpec, b: &LFunctionSpec, x: f64) -> Result<Complex64> {
    if !(x >= 2.0) {
        return Err(Error::EmptyDomain(format!("x = {x} below 2")));
    }
    let primes = arith::primes_up_to(x.floor() as u64)?;
    Ok(primes
        .iter()
        .map(|&p| a.beta_unchecked(p, 1) * b.beta_unchecked(p, 1).conj() / p as f64)
        .sum())
}

/// `sum_{p <= x} sum_i |alpha_i(p)|^2`.
pub fn ramanujan_average_sum(spec: &LFunctionSpec, x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::EmptyDomain(format!("x = {x} below 2")));
    }
    let primes = arith::primes_up_to(x.floor() as u64)?;
    Ok(primes
        .iter()
        .map(|&p| (0..spec.degree).map(|i| spec.alpha(p, i).norm_sqr()).sum::<f64>())
        .sum())
}

/// Largest modulus reachable through `dirichlet:` labels.
pub const REGISTRY_MAX_MODULUS: u64 = 100;

/// Label-addressable collection of specs.
///
/// `"zeta"` and `"dirichlet:q=Q:index=I"` (for `Q <= 100`) resolve without
/// registration; anything else must be added with [`SpecRegistry::register`].
#[derive(Debug, Clone, Default)]
pub struct SpecRegistry {
    custom: HashMap<String, LFunctionSpec>,
}

impl SpecRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: LFunctionSpec) {
        self.custom.insert(spec.label.clone(), spec);
    }

    pub fn get(&self, label: &str) -> Result<LFunctionSpec> {
        if let Some(spec) = self.custom.get(label) {
            return Ok(spec.clone());
        }
        if label == "zeta" {
            return Ok(LFunctionSpec::zeta());
        }
        if let Some(rest) = label.strip_prefix("dirichlet:") {
            let mut q = None;
            let mut index = None;
            for part in rest.split(':') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("malformed label part '{part}'")))?;
                let value: u64 = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer in '{part}'")))?;
                match key {
                    "q" => q = Some(value),
                    "index" => index = Some(value),
                    _ => return Err(Error::Parse(format!("unknown key '{key}' in '{label}'"))),
                }
            }
            let (q, index) = match (q, index) {
                (Some(q), Some(i)) => (q, i),
                _ => return Err(Error::Parse(format!("label '{label}' needs q and index"))),
            };
            if q == 0 || q > REGISTRY_MAX_MODULUS {
                return Err(Error::Domain(format!(
                    "modulus {q} outside 1..={REGISTRY_MAX_MODULUS}"
                )));
            }
            let chi = characters_mod(q)?
                .into_iter()
                .nth(index as usize)
                .ok_or_else(|| Error::Domain(format!("no character #{index} mod {q}")))?;
            return Ok(LFunctionSpec::dirichlet(chi));
        }
        Err(Error::Domain(format!("unknown L-function label '{label}'")))
    }
}
