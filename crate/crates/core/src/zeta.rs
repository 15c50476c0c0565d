//! Euler–Maclaurin evaluation of `zeta(s)` and `L(s, chi)` for
//! `Re(s) > 0`, `|Im(s)| <= 1e7`, and the continuous logarithm
//! `log L(sigma + it)` obtained by walking in from `sigma = 2`.
//!
//! For a fixed ordinate `t` the powers `n^{-it}` are built once, from
//! double-double phases at the primes and products at composites; every
//! abscissa along the path then costs one pass over `n^{-sigma}`.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli_f64, DirichletCharacter};
use crate::ddouble::{self, Dd};
use crate::error::{Error, Result};
use crate::lfunction::{AnalyticForm, LFunctionSpec};

/// Largest supported `|Im(s)|`.
pub const MAX_ORDINATE: f64 = 1e7;

/// Abscissa where the argument walk starts; `|arg L| < pi/2` there.
pub const PATH_START_SIGMA: f64 = 2.0;

/// Initial horizontal step of the argument walk.
pub const PATH_INITIAL_STEP: f64 = 0.05;

const PATH_MAX_EVALUATIONS: usize = 20_000;
const PATH_MIN_STEP: f64 = PATH_INITIAL_STEP / (1u64 << 24) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalParams {
    /// Cutoff `N ~ factor * (|t| / 2 pi + 10)`.
    pub em_cutoff_factor: f64,
    /// Number of Bernoulli correction terms `K`.
    pub bernoulli_terms: usize,
    pub target_abs_error: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            em_cutoff_factor: 2.0,
            bernoulli_terms: 30,
            target_abs_error: 1e-12,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.em_cutoff_factor >= 1.0) {
            return Err(Error::Config("em_cutoff_factor must be >= 1".into()));
        }
        if !(1..=30).contains(&self.bernoulli_terms) {
            return Err(Error::Config("bernoulli_terms must lie in 1..=30".into()));
        }
        if !(self.target_abs_error > 0.0) {
            return Err(Error::Config("target_abs_error must be positive".into()));
        }
        Ok(())
    }

    fn cutoff(&self, t: f64) -> usize {
        (self.em_cutoff_factor * (t.abs() / TAU + 10.0)).ceil() as usize
    }
}

/// `log L(sigma + it)` with the argument on the continuous branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLValue {
    pub sigma: f64,
    pub t: f64,
    /// `log |L|`
    pub re_log: f64,
    /// `arg L`
    pub im_log: f64,
}

impl LogLValue {
    pub fn log(&self) -> Complex64 {
        Complex64::new(self.re_log, self.im_log)
    }

    /// `exp(re_log + i im_log)`.
    pub fn value(&self) -> Complex64 {
        self.log().exp()
    }
}

// ---------------------------------------------------------------------------
// shared sieve data: smallest prime factors and double-double prime logs

struct SieveCache {
    limit: usize,
    spf: Vec<u32>,
    ln_prime: Vec<Dd>,
}

fn build_cache(limit: usize) -> SieveCache {
    let mut spf = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    for n in 2..=limit {
        if spf[n] == 0 {
            spf[n] = n as u32;
            primes.push(n as u32);
        }
        let s = spf[n];
        for &p in &primes {
            let m = n * p as usize;
            if p > s || m > limit {
                break;
            }
            spf[m] = p;
        }
    }
    let mut ln_prime = vec![Dd::from_f64(0.0); limit + 1];
    for &p in &primes {
        ln_prime[p as usize] = ddouble::ln_u64(p as u64);
    }
    SieveCache { limit, spf, ln_prime }
}

fn sieve_cache(limit: usize) -> Arc<SieveCache> {
    static CACHE: OnceLock<Mutex<Option<Arc<SieveCache>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
    match guard.as_ref() {
        Some(c) if c.limit >= limit => c.clone(),
        current => {
            let grown = limit.max(current.map_or(0, |c| 2 * c.limit)).max(1024);
            let cache = Arc::new(build_cache(grown));
            *guard = Some(cache.clone());
            cache
        }
    }
}

/// `B_{2k} / (2k)!` for `k = 1..=31`.
fn em_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut fact = 1.0f64;
        let mut out = Vec::with_capacity(31);
        for k in 1..=31usize {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
            let b = if 2 * k <= 60 {
                bernoulli_f64(2 * k).expect("cached")
            } else {
                // B_62 is outside the exact table; only used as an error estimate
                2.050_097_572_347_81e36
            };
            out.push(b / fact);
        }
        out
    })
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    #[inline]
    fn add_part(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    #[inline]
    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, &mut self.re_c, z.re);
        Self::add_part(&mut self.im, &mut self.im_c, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

// ---------------------------------------------------------------------------

/// Evaluates `L(sigma + it)` for one fixed `t` and any `sigma > 0`.
pub struct OrdinateEvaluator {
    kind: Kind,
    t: f64,
    params: EvalParams,
    /// `n^{-it}` for `0 < n <= table_len`
    phases: Vec<Complex64>,
    cache: Arc<SieveCache>,
}

enum Kind {
    /// direct sum over `n < cutoff`, tail at `cutoff`
    Zeta { cutoff: usize },
    /// direct sum over `n <= blocks * q`, Hurwitz tails at `blocks + a/q`
    Dirichlet { chi: DirichletCharacter, blocks: usize },
}

impl OrdinateEvaluator {
    pub fn new(form: &AnalyticForm, t: f64, params: EvalParams) -> Result<Self> {
        params.validate()?;
        if !t.is_finite() || t.abs() > MAX_ORDINATE {
            return Err(Error::Domain(format!("|t| = {} exceeds {MAX_ORDINATE:e}", t.abs())));
        }
        let cutoff = params.cutoff(t);
        let (kind, table_len) = match form {
            AnalyticForm::Zeta => (Kind::Zeta { cutoff }, cutoff),
            AnalyticForm::Dirichlet(chi) => {
                let q = chi.modulus() as usize;
                (
                    Kind::Dirichlet { chi: chi.clone(), blocks: cutoff },
                    cutoff * q + q,
                )
            }
        };
        let cache = sieve_cache(table_len);
        let mut phases = vec![Complex64::new(1.0, 0.0); table_len + 1];
        for n in 2..=table_len {
            let p = cache.spf[n] as usize;
            phases[n] = if p == n {
                let r = ddouble::reduced_phase(t, cache.ln_prime[n]);
                let (s, c) = r.hi.sin_cos();
                Complex64::new(c - r.lo * s, -(s + r.lo * c))
            } else {
                phases[p] * phases[n / p]
            };
        }
        Ok(Self { kind, t, params, phases, cache })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn moduli(&self, sigma: f64) -> Vec<f64> {
        let len = self.phases.len() - 1;
        let mut m = vec![1.0f64; len + 1];
        for n in 2..=len {
            let p = self.cache.spf[n] as usize;
            m[n] = if p == n {
                (-sigma * self.cache.ln_prime[n].hi).exp()
            } else {
                m[p] * m[n / p]
            };
        }
        m
    }

    /// `L(sigma + it)` and the magnitude of the first omitted correction term.
    pub fn eval_with_error(&self, sigma: f64) -> Result<(Complex64, f64)> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("Re(s) = {sigma} must be positive")));
        }
        let s = Complex64::new(sigma, self.t);
        let moduli = self.moduli(sigma);
        let power = |n: usize| self.phases[n] * moduli[n];
        let coeffs = em_coefficients();
        let k_terms = self.params.bernoulli_terms;

        let (value, next) = match &self.kind {
            Kind::Zeta { cutoff } => {
                if sigma == 1.0 && self.t == 0.0 {
                    return Err(Error::Pole("1".into()));
                }
                let n = *cutoff;
                let mut acc = CompensatedSum::default();
                for k in 1..n {
                    acc.add(power(k));
                }
                let ns = power(n);
                let nf = n as f64;
                let one = Complex64::new(1.0, 0.0);
                let mut tail = ns * nf / (s - one) + ns * 0.5;
                // (s)_{2k-1} N^{1-2k}, updated as a ratio so it cannot overflow
                let mut ratio = s / nf;
                let mut next = 0.0;
                for (k, &c) in coeffs.iter().enumerate().take(k_terms + 1) {
                    let term = ns * ratio * c;
                    if k == k_terms {
                        next = term.norm();
                    } else {
                        tail += term;
                    }
                    let j = (2 * k + 1) as f64;
                    ratio *= (s + j) / nf * ((s + j + 1.0) / nf);
                }
                acc.add(tail);
                (acc.value(), next)
            }
            Kind::Dirichlet { chi, blocks } => {
                let q = chi.modulus() as usize;
                let m = *blocks;
                if chi.is_principal() && sigma == 1.0 && self.t == 0.0 {
                    return Err(Error::Pole("1".into()));
                }
                let mut acc = CompensatedSum::default();
                for n in 1..=m * q {
                    let c = chi.value(n as u64);
                    if c.re != 0.0 || c.im != 0.0 {
                        acc.add(c * power(n));
                    }
                }
                let one = Complex64::new(1.0, 0.0);
                let near_one = !chi.is_principal() && (s - one).norm() < 0.1;
                let qf = q as f64;
                let mut next = 0.0;
                let mut integral = Complex64::new(0.0, 0.0);
                for a in 1..=q {
                    let c = chi.value(a as u64);
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let x = m as f64 + a as f64 / qf;
                    let na = power(m * q + a);
                    let mut tail = na * 0.5;
                    if near_one {
                        integral += c * expm1_ratio(s - one, x.ln());
                    } else {
                        tail += na * x / (s - one);
                    }
                    let mut ratio = s / x;
                    for (k, &c) in coeffs.iter().enumerate().take(k_terms + 1) {
                        let term = na * ratio * c;
                        if k == k_terms {
                            next += term.norm();
                        } else {
                            tail += term;
                        }
                        let j = (2 * k + 1) as f64;
                        ratio *= (s + j) / x * ((s + j + 1.0) / x);
                    }
                    acc.add(c * tail);
                }
                if near_one {
                    // q^{-s} sum_a chi(a) (x_a^{1-s} - 1)/(s - 1); the dropped
                    // 1/(s-1) parts cancel because sum_a chi(a) = 0
                    acc.add((-s * qf.ln()).exp() * integral);
                }
                (acc.value(), next)
            }
        };
        if next > self.params.target_abs_error {
            return Err(Error::PrecisionUnreachable {
                estimate: next,
                target: self.params.target_abs_error,
            });
        }
        Ok((value, next))
    }

    pub fn eval(&self, sigma: f64) -> Result<Complex64> {
        self.eval_with_error(sigma).map(|(v, _)| v)
    }

    /// Continuous `log L(sigma + it)`; see [`log_l_continuous`].
    pub fn log_continuous(&self, sigma: f64) -> Result<LogLValue> {
        self.log_continuous_with_step(sigma, PATH_INITIAL_STEP)
    }

    pub fn log_continuous_with_step(&self, sigma: f64, initial_step: f64) -> Result<LogLValue> {
        if !(sigma > 0.5) {
            return Err(Error::Domain(format!("sigma = {sigma} must exceed 1/2")));
        }
        let floor = 1e3 * self.params.target_abs_error;
        let checked = |x: f64| -> Result<Complex64> {
            let v = self.eval(x)?;
            if v.norm() < floor {
                return Err(Error::NearZero { sigma: x, t: self.t, modulus: v.norm() });
            }
            Ok(v)
        };
        let mut current_sigma = sigma.max(PATH_START_SIGMA);
        let mut current = checked(current_sigma)?;
        let mut arg = current.arg();
        let mut step = initial_step;
        let mut evaluations = 1usize;
        while current_sigma > sigma {
            let next_sigma = (current_sigma - step).max(sigma);
            let next = checked(next_sigma)?;
            evaluations += 1;
            if evaluations > PATH_MAX_EVALUATIONS {
                return Err(Error::Path { t: self.t, reason: "evaluation budget exhausted".into() });
            }
            let jump = (next / current).arg();
            if jump.abs() >= FRAC_PI_4 {
                step *= 0.5;
                if step < PATH_MIN_STEP {
                    return Err(Error::Path {
                        t: self.t,
                        reason: format!("step fell below {PATH_MIN_STEP:e} near sigma = {current_sigma}"),
                    });
                }
                continue;
            }
            arg += jump;
            current = next;
            current_sigma = next_sigma;
            step = (step * 2.0).min(initial_step);
        }
        Ok(LogLValue { sigma, t: self.t, re_log: current.norm().ln(), im_log: arg })
    }
}

/// `(exp(-u L) - 1) / u`, finite at `u = 0`.
fn expm1_ratio(u: Complex64, ln_x: f64) -> Complex64 {
    let w = -u * ln_x;
    if w.norm() > 0.5 {
        return (w.exp() - 1.0) / u;
    }
    // (e^w - 1)/w = sum w^j / (j+1)!
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..30 {
        term *= w / (j + 1) as f64;
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    -sum * ln_x
}

fn check_point(s: Complex64) -> Result<()> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("Re(s) = {} must be positive", s.re)));
    }
    if !s.im.is_finite() || s.im.abs() > MAX_ORDINATE {
        return Err(Error::Domain(format!("|Im(s)| = {} exceeds {MAX_ORDINATE:e}", s.im.abs())));
    }
    Ok(())
}

/// `zeta(s)` by Euler–Maclaurin.
pub fn zeta_em(s: Complex64, params: EvalParams) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    check_point(s)?;
    OrdinateEvaluator::new(&AnalyticForm::Zeta, s.im, params)?.eval(s.re)
}

/// `L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta_H(s, a/q)`.
pub fn dirichlet_l_em(chi: &DirichletCharacter, s: Complex64, params: EvalParams) -> Result<Complex64> {
    if chi.is_principal() && s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    check_point(s)?;
    OrdinateEvaluator::new(&AnalyticForm::Dirichlet(chi.clone()), s.im, params)?.eval(s.re)
}

/// Continuous `log L(sigma + it)` for a spec with an analytic form.
///
/// The argument is unwound along the horizontal segment from `sigma = 2`
/// (where the Dirichlet series pins `|arg L| < pi/2`) down to `sigma`,
/// halving the step until consecutive phase increments stay below `pi/4`.
pub fn log_l_continuous(spec: &LFunctionSpec, sigma: f64, t: f64, params: EvalParams) -> Result<LogLValue> {
    let form = spec
        .analytic()
        .ok_or_else(|| Error::Domain(format!("'{}' has no analytic continuation", spec.label())))?;
    OrdinateEvaluator::new(form, t, params)?.log_continuous(sigma)
}
