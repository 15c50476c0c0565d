//! Random Euler products `log L(sigma, X) = sum_p sum_r beta(p^r) X(p)^r p^{-r sigma}`
//! with independent uniform `X(p)` on the unit circle.
//!
//! Angles are keyed by `(seed, stream_id)` and the prime's position: the
//! `k`-th prime always receives the `k`-th draw of its stream, so raising
//! the cutoff `P` extends an assignment without touching existing angles.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, PrimeTable};
use crate::error::{Error, Result};
use crate::lfunction::LFunctionSpec;
use crate::rng;
use crate::stats::{exp_integral_e1, MeanEstimate};

/// Default prime cutoff of the model.
pub const DEFAULT_PRIME_CUTOFF: u64 = 1_000_000;

/// Rosser–Schoenfeld: `pi(x) < 1.25506 x / ln x` for `x > 1`.
const PRIME_COUNT_CONSTANT: f64 = 1.25506;

/// Shared prime table, grown on demand.
pub(crate) fn primes_through(limit: u64) -> Result<Arc<PrimeTable>> {
    static CACHE: OnceLock<Mutex<Option<Arc<PrimeTable>>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.as_ref() {
        if t.limit() >= limit {
            return Ok(t.clone());
        }
    }
    let table = Arc::new(primes_up_to(limit)?);
    *guard = Some(table.clone());
    Ok(table)
}

/// One realization of `X(p) = e^{i theta_p}` for all primes `p <= P`.
#[derive(Debug, Clone)]
pub struct RandomAssignment {
    cutoff: u64,
    seed: u64,
    stream_id: u64,
    primes: Arc<PrimeTable>,
    theta: Vec<f64>,
}

impl RandomAssignment {
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn primes(&self) -> &[u64] {
        self.primes.up_to(self.cutoff)
    }

    /// Angles in prime order.
    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// `theta_p`, or `None` if `p` is not a prime `<= P`.
    pub fn theta(&self, p: u64) -> Option<f64> {
        self.primes().binary_search(&p).ok().map(|k| self.theta[k])
    }

    /// `X(p)` in prime order.
    pub fn unit_values(&self) -> Vec<Complex64> {
        self.theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
    }

    /// Assignment with every angle fixed, e.g. `X = 1`.
    pub fn constant(cutoff: u64, theta: f64) -> Result<Self> {
        let primes = primes_through(cutoff)?;
        let n = primes.up_to(cutoff).len();
        Ok(Self { cutoff, seed: 0, stream_id: 0, primes, theta: vec![theta; n] })
    }
}

/// Draws `X(p)` for the primes up to `cutoff`.
pub fn sample_assignment(seed: u64, stream_id: u64, cutoff: u64) -> Result<RandomAssignment> {
    let primes = primes_through(cutoff)?;
    let n = primes.up_to(cutoff).len();
    let mut stream = rng::stream(seed, stream_id);
    let theta = (0..n).map(|_| rng::angle(stream.next_u64())).collect();
    Ok(RandomAssignment { cutoff, seed, stream_id, primes, theta })
}

fn unit_values(seed: u64, stream_id: u64, count: usize) -> Vec<Complex64> {
    let mut stream = rng::stream(seed, stream_id);
    (0..count).map(|_| Complex64::from_polar(1.0, rng::angle(stream.next_u64()))).collect()
}

/// How many prime powers to keep and how large a tail to accept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Powers `r <= min_powers` are always kept.
    pub min_powers: u32,
    /// Further powers are kept while their size bound exceeds this.
    pub floor: f64,
    pub max_powers: u32,
    /// Largest accepted root-mean-square size of the omitted primes `p > P`.
    pub tail_tolerance: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { min_powers: 2, floor: 1e-16, max_powers: 64, tail_tolerance: 1.0 }
    }
}

/// Bound on `E|sum_{p > P} sum_r beta(p^r) X(p)^r p^{-r sigma}|^2`.
///
/// With `|beta(p^r)| <= (d/r) p^{r eta}` and `a = 2(sigma - eta) > 1`, the
/// `r = 1` part is at most `d^2 c a P^{1-a} / ((a-1) ln P)` by partial
/// summation against `pi(x) < c x / ln x`; powers `r >= 2` add at most
/// `(d^2/4) P^{1-2a} / ((2a-1)(1 - P^{-a}))`.
pub fn tail_mean_square_bound(degree: usize, eta: f64, sigma: f64, cutoff: u64) -> f64 {
    let d2 = (degree * degree) as f64;
    let a = 2.0 * (sigma - eta);
    let p = cutoff.max(2) as f64;
    let first = d2 * PRIME_COUNT_CONSTANT * a * p.powf(1.0 - a) / ((a - 1.0) * p.ln());
    let higher = d2 / 4.0 * p.powf(1.0 - 2.0 * a) / ((2.0 * a - 1.0) * (1.0 - p.powf(-a)));
    first + higher
}

/// `log L(sigma, X)` truncated at `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomLogL {
    pub label: String,
    pub sigma: f64,
    pub value: Complex64,
    /// Root-mean-square size of the omitted primes.
    pub tail_bound: f64,
}

/// Precomputed coefficients `beta(p^r) p^{-r sigma}` for fast repeated sampling.
#[derive(Debug, Clone)]
pub struct EulerProductPlan {
    label: String,
    sigma: f64,
    cutoff: u64,
    /// `coeffs[offsets[k]..offsets[k+1]]` are the powers of the `k`-th prime
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl EulerProductPlan {
    pub fn new(spec: &LFunctionSpec, sigma: f64, cutoff: u64, policy: &TruncationPolicy) -> Result<Self> {
        if !(sigma > 0.5 + spec.eta()) {
            return Err(Error::Domain(format!(
                "sigma = {sigma} must exceed 1/2 + eta = {}",
                0.5 + spec.eta()
            )));
        }
        let primes = primes_through(cutoff)?;
        let primes = primes.up_to(cutoff);
        let tail_bound = tail_mean_square_bound(spec.degree(), spec.eta(), sigma, cutoff).sqrt();
        if tail_bound > policy.tail_tolerance {
            return Err(Error::InsufficientCutoff { cutoff, tail_bound, tolerance: policy.tail_tolerance });
        }
        let d = spec.degree() as f64;
        let mut offsets = Vec::with_capacity(primes.len() + 1);
        let mut coeffs = Vec::new();
        offsets.push(0);
        for &p in primes {
            let pf = p as f64;
            let decay = pf.powf(spec.eta() - sigma);
            let scale = pf.powf(-sigma);
            let mut bound = d;
            let mut pow = 1.0;
            for r in 1..=policy.max_powers {
                bound *= decay;
                pow *= scale;
                if r > policy.min_powers && bound / (r as f64) < policy.floor {
                    break;
                }
                coeffs.push(spec.beta_unchecked(p, r) * pow);
            }
            offsets.push(coeffs.len());
        }
        Ok(Self { label: spec.label().to_string(), sigma, cutoff, offsets, coeffs, tail_bound })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn prime_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `sum_p sum_r c_{p,r} X(p)^r` for `X(p)` in prime order; extra values are ignored.
    pub fn eval(&self, x: &[Complex64]) -> Result<Complex64> {
        let n = self.prime_count();
        if x.len() < n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (k, &xp) in x[..n].iter().enumerate() {
            let c = &self.coeffs[self.offsets[k]..self.offsets[k + 1]];
            let mut h = Complex64::new(0.0, 0.0);
            for &ci in c.iter().rev() {
                h = (h + ci) * xp;
            }
            total += h;
        }
        Ok(total)
    }

    pub fn eval_assignment(&self, x: &RandomAssignment) -> Result<RandomLogL> {
        if x.cutoff() < self.cutoff {
            return Err(Error::Domain(format!(
                "assignment cutoff {} below plan cutoff {}",
                x.cutoff(),
                self.cutoff
            )));
        }
        Ok(RandomLogL {
            label: self.label.clone(),
            sigma: self.sigma,
            value: self.eval(&x.unit_values())?,
            tail_bound: self.tail_bound,
        })
    }
}

/// `log L(sigma, X)` for one assignment; the cutoff is the assignment's.
pub fn random_log_l(
    spec: &LFunctionSpec,
    sigma: f64,
    x: &RandomAssignment,
    policy: &TruncationPolicy,
) -> Result<RandomLogL> {
    EulerProductPlan::new(spec, sigma, x.cutoff(), policy)?.eval_assignment(x)
}

/// Joint samples: row `i` holds `log L_j(sigma, X_i)` for each plan `j`,
/// all driven by the assignment of stream `i`.
pub fn sample_joint(plans: &[EulerProductPlan], seed: u64, n_samples: usize) -> Result<Vec<Vec<Complex64>>> {
    let count = plans.iter().map(|p| p.prime_count()).max().unwrap_or(0);
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = unit_values(seed, i, count);
            plans.iter().map(|p| p.eval(&x)).collect()
        })
        .collect()
}

/// `E|log L(sigma, X)|^2` over primes up to `P`, with the contribution of larger primes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMoment {
    /// `sum_{p <= P} sum_r |beta(p^r)|^2 p^{-2 r sigma}`
    pub value: f64,
    /// `mean_{p <= P} |beta(p)|^2 * E1((2 sigma - 1) ln P)`, the prime-number-theorem
    /// estimate of the `r = 1` tail
    pub tail_estimate: f64,
    /// rigorous upper bound on the whole tail
    pub tail_bound: f64,
}

impl SecondMoment {
    pub fn estimated_total(&self) -> f64 {
        self.value + self.tail_estimate
    }
}

pub fn analytic_moment2(spec: &LFunctionSpec, sigma: f64, cutoff: u64) -> Result<SecondMoment> {
    if !(sigma > 0.5 + spec.eta()) {
        return Err(Error::Domain(format!("sigma = {sigma} must exceed 1/2 + eta")));
    }
    let primes = primes_through(cutoff)?;
    let primes = primes.up_to(cutoff);
    let mut value: f64 = 0.0;
    let mut first_power_mass = 0.0;
    for &p in primes {
        let pf = p as f64;
        let scale = pf.powf(-2.0 * sigma);
        let decay = pf.powf(2.0 * (spec.eta() - sigma));
        let mut pow = 1.0;
        let mut bound = (spec.degree() * spec.degree()) as f64;
        let mut inner = 0.0;
        for r in 1..=64u32 {
            pow *= scale;
            bound *= decay;
            let b = spec.beta_unchecked(p, r).norm_sqr();
            if r == 1 {
                first_power_mass += b;
            }
            inner += b * pow;
            if r >= 2 && bound / ((r * r) as f64) < 1e-20 * value.max(1e-300) {
                break;
            }
        }
        value += inner;
    }
    let mean_beta = first_power_mass / primes.len() as f64;
    let tail_estimate = mean_beta * exp_integral_e1((2.0 * sigma - 1.0) * (cutoff as f64).ln());
    let tail_bound = tail_mean_square_bound(spec.degree(), spec.eta(), sigma, cutoff);
    Ok(SecondMoment { value, tail_estimate, tail_bound })
}

/// `Cov(Re log L_a(sigma, X), Re log L_b(sigma, X)) = (1/2) Re sum_p sum_r beta_a conj(beta_b) p^{-2 r sigma}`.
pub fn analytic_covariance_re(a: &LFunctionSpec, b: &LFunctionSpec, sigma: f64, cutoff: u64) -> Result<f64> {
    let primes = primes_through(cutoff)?;
    let mut sum = 0.0;
    for &p in primes.up_to(cutoff) {
        let scale = (p as f64).powf(-2.0 * sigma);
        let mut pow = 1.0;
        for r in 1..=64u32 {
            pow *= scale;
            sum += (a.beta_unchecked(p, r) * b.beta_unchecked(p, r).conj()).re * pow;
            if pow < 1e-24 {
                break;
            }
        }
    }
    Ok(0.5 * sum)
}

/// Monte Carlo `E|log L(sigma, X)|^{2k}` from `n_samples` independent streams.
pub fn empirical_moment(
    spec: &LFunctionSpec,
    sigma: f64,
    k: u32,
    n_samples: usize,
    seed: u64,
    cutoff: u64,
    policy: &TruncationPolicy,
) -> Result<MeanEstimate> {
    if !(1..=8).contains(&k) {
        return Err(Error::Domain(format!("moment order k = {k} outside 1..=8")));
    }
    if n_samples < 1000 {
        return Err(Error::Domain(format!("n_samples = {n_samples} below 1000")));
    }
    let plan = EulerProductPlan::new(spec, sigma, cutoff, policy)?;
    let values = sample_joint(std::slice::from_ref(&plan), seed, n_samples)?;
    let powers: Vec<f64> = values.iter().map(|v| v[0].norm_sqr().powi(k as i32)).collect();
    Ok(MeanEstimate::from_samples(&powers))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_is_reproducible_and_extends() {
        let a = sample_assignment(5, 9, 1000).unwrap();
        let b = sample_assignment(5, 9, 1000).unwrap();
        let c = sample_assignment(5, 9, 5000).unwrap();
        assert_eq!(a.angles(), b.angles());
        assert_eq!(a.angles(), &c.angles()[..a.angles().len()]);
        assert_eq!(a.theta(997), c.theta(997));
        assert!(a.theta(4).is_none());
        assert!(a.angles().iter().all(|t| (0.0..std::f64::consts::TAU).contains(t)));
    }

    #[test]
    fn all_angles_zero_gives_the_euler_product() {
        let x = RandomAssignment::constant(1000, 0.0).unwrap();
        let v = random_log_l(&LFunctionSpec::zeta(), 1.5, &x, &TruncationPolicy::default()).unwrap();
        let direct: f64 = x.primes().iter().map(|&p| -(1.0 - (p as f64).powf(-1.5)).ln()).sum();
        assert!((v.value.re - direct).abs() < 1e-12);
        assert_eq!(v.value.im, 0.0);
    }

    #[test]
    fn moment_at_one_and_a_half() {
        let m = analytic_moment2(&LFunctionSpec::zeta(), 1.5, 100).unwrap();
        let mut brute = 0.0;
        for p in crate::primes_up_to(100).unwrap().iter() {
            for r in 1..200 {
                brute += (*p as f64).powf(-3.0 * r as f64) / (r * r) as f64;
            }
        }
        assert!((m.value - brute).abs() < 1e-15);
        let m2 = analytic_moment2(&LFunctionSpec::zeta(), 1.6, 100).unwrap();
        assert!(m2.value < m.value);
    }

    #[test]
    fn cutoff_check() {
        let policy = TruncationPolicy { tail_tolerance: 0.1, ..Default::default() };
        let err = EulerProductPlan::new(&LFunctionSpec::zeta(), 0.55, 100, &policy).unwrap_err();
        assert!(matches!(err, Error::InsufficientCutoff { .. }));
        assert!(EulerProductPlan::new(&LFunctionSpec::zeta(), 0.5, 100, &policy).is_err());
    }

    #[test]
    fn joint_samples_do_not_depend_on_thread_count() {
        let plan = EulerProductPlan::new(&LFunctionSpec::zeta(), 0.75, 10_000, &TruncationPolicy::default()).unwrap();
        let a = sample_joint(std::slice::from_ref(&plan), 3, 64).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_joint(std::slice::from_ref(&plan), 3, 64).unwrap());
        assert_eq!(a, b);
        let x = sample_assignment(3, 5, 10_000).unwrap();
        assert_eq!(plan.eval_assignment(&x).unwrap().value, a[5][0]);
    }
}
