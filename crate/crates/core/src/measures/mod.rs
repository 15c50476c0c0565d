//! Empirical joint distributions of `(log|L_j|, arg L_j)_{j <= J}` at
//! `sigma_T = 1/2 + 1/G`: one from ordinates `t` in `[T, 2T]`, one from the
//! random Euler product, and the statistics comparing them.

mod discrepancy;
pub mod io;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunction::{DirichletPolynomial, LFunctionSpec, SpecRegistry};
use crate::random_model::{sample_joint, EulerProductPlan, TruncationPolicy};
use crate::rng;
use crate::stats::{exp_integral_e1, MeanEstimate};
use crate::zeta::{EvalParams, LogLValue, OrdinateEvaluator};

pub use discrepancy::{
    discrepancy, discrepancy_with, permutation_noise_floor, DiscrepancyEstimate, DiscrepancyOptions,
};

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Ordinates are drawn from `[T, 2T]`.
    #[serde(rename = "T")]
    pub height: f64,
    /// `sigma_T = 1/2 + 1/G`.
    #[serde(rename = "G")]
    pub g: f64,
    /// Dirichlet-polynomial length.
    #[serde(rename = "Y")]
    pub y: f64,
    pub n_t: usize,
    pub n_rand: usize,
    /// Prime cutoff of the random model.
    #[serde(rename = "P")]
    pub prime_cutoff: u64,
    pub seed: u64,
    /// Spec labels, in coordinate order.
    pub specs: Vec<String>,
    pub eval: EvalParams,
    pub truncation: TruncationPolicy,
    /// Redraws allowed per stratum before giving up.
    pub max_rejections: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            height: 1e5,
            g: 4.0,
            y: 1e4,
            n_t: 2000,
            n_rand: 2000,
            prime_cutoff: 1_000_000,
            seed: 0,
            specs: vec!["zeta".into()],
            eval: EvalParams::default(),
            truncation: TruncationPolicy::default(),
            max_rejections: 100,
        }
    }
}

impl RunConfig {
    pub fn sigma(&self) -> f64 {
        0.5 + 1.0 / self.g
    }

    pub fn dim(&self) -> usize {
        2 * self.specs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height >= 100.0) || !self.height.is_finite() {
            return Err(Error::Config(format!("T = {} must be at least 100", self.height)));
        }
        if !(self.g > 2.0) || !self.g.is_finite() {
            // G = 2 would put sigma_T on the line sigma = 1
            return Err(Error::Config(format!("G = {} must exceed 2", self.g)));
        }
        if !(self.y >= 0.0) {
            return Err(Error::Config("Y must be nonnegative".into()));
        }
        if self.specs.is_empty() {
            return Err(Error::Config("at least one spec label is required".into()));
        }
        if self.prime_cutoff < 2 {
            return Err(Error::Config("P must be at least 2".into()));
        }
        self.eval.validate()
    }

    /// Whether `log log T <= G <= log T / (log log T)^2`.
    pub fn regime_flag(&self) -> bool {
        let lt = self.height.ln();
        let llt = lt.ln();
        llt <= self.g && self.g <= lt / (llt * llt)
    }

    /// Resolves the spec labels through the default registry.
    pub fn resolve_specs(&self) -> Result<Vec<LFunctionSpec>> {
        self.resolve_specs_with(&SpecRegistry::new())
    }

    pub fn resolve_specs_with(&self, registry: &SpecRegistry) -> Result<Vec<LFunctionSpec>> {
        self.specs.iter().map(|l| registry.get(l)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Deterministic,
    Random,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Deterministic => "deterministic",
            Provenance::Random => "random",
        }
    }
}

/// Equally weighted points in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    data: Vec<f64>,
    provenance: Provenance,
    rejections: usize,
}

impl EmpiricalMeasure {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data, provenance)
    }

    /// Points stored row by row.
    pub fn from_flat(dim: usize, data: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if dim == 0 || data.is_empty() || data.len() % dim != 0 {
            return Err(Error::EmptyDomain(format!(
                "{} values do not form a nonempty set of {dim}-vectors",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { dim, data, provenance, rejections: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Ordinates redrawn because `L` was numerically zero on the path.
    pub fn rejections(&self) -> usize {
        self.rejections
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn coordinate(&self, axis: usize) -> Vec<f64> {
        self.points().map(|p| p[axis]).collect()
    }

    /// Per-axis mean with standard error.
    pub fn coordinate_means(&self) -> Vec<MeanEstimate> {
        (0..self.dim).map(|a| MeanEstimate::from_samples(&self.coordinate(a))).collect()
    }
}

/// Closed box with possibly infinite sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Rectangle {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), found: upper.len() });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l.is_nan() || u.is_nan() || l > u) {
            return Err(Error::Domain("every lower bound must be at most its upper bound".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn full(dim: usize) -> Self {
        Self { lower: vec![f64::NEG_INFINITY; dim], upper: vec![f64::INFINITY; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lower.iter().zip(&self.upper)).all(|(x, (l, u))| l <= x && x <= u)
    }
}

/// Fraction of points inside `r`.
pub fn measure_rect(m: &EmpiricalMeasure, r: &Rectangle) -> Result<f64> {
    if m.dim() != r.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: r.dim() });
    }
    Ok(m.points().filter(|p| r.contains(p)).count() as f64 / m.len() as f64)
}

// ---------------------------------------------------------------------------
// collection

fn check_specs(config: &RunConfig, specs: &[LFunctionSpec]) -> Result<()> {
    config.validate()?;
    if specs.len() != config.specs.len() {
        return Err(Error::DimensionMismatch { expected: config.specs.len(), found: specs.len() });
    }
    Ok(())
}

/// Ordinate samples: stratum `i` of `[T, 2T]` with the accepted `t` and its values.
struct OrdinateSample {
    t: f64,
    values: Vec<LogLValue>,
    rejections: usize,
}

fn sample_ordinates(config: &RunConfig, specs: &[LFunctionSpec], sigma: f64) -> Result<Vec<OrdinateSample>> {
    check_specs(config, specs)?;
    let forms = specs
        .iter()
        .map(|s| {
            s.analytic()
                .cloned()
                .ok_or_else(|| Error::Domain(format!("'{}' has no analytic continuation", s.label())))
        })
        .collect::<Result<Vec<_>>>()?;
    let key = rng::domain_seed(config.seed, rng::DOMAIN_ORDINATES);
    let n = config.n_t;
    let width = config.height / n as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut stream = rng::stream(key, i as u64);
            let mut rejections = 0;
            loop {
                let t = config.height + width * (i as f64 + rng::next_unit(&mut stream));
                let values: Result<Vec<LogLValue>> = forms
                    .iter()
                    .map(|f| OrdinateEvaluator::new(f, t, config.eval)?.log_continuous(sigma))
                    .collect();
                match values {
                    Ok(values) => return Ok(OrdinateSample { t, values, rejections }),
                    Err(Error::NearZero { .. }) if rejections < config.max_rejections => rejections += 1,
                    Err(Error::NearZero { .. }) => {
                        return Err(Error::Evaluation(format!(
                            "stratum {i}: more than {} near-zero redraws",
                            config.max_rejections
                        )))
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect()
}

fn interleave(values: &[Complex64]) -> Vec<f64> {
    values.iter().flat_map(|v| [v.re, v.im]).collect()
}

/// `Phi_T`: `n_t` points `(log|L_j(sigma_T + it)|, arg L_j(sigma_T + it))_j`,
/// one uniform `t` per equal subinterval of `[T, 2T]`.
pub fn collect_deterministic(config: &RunConfig) -> Result<EmpiricalMeasure> {
    collect_deterministic_with(config, &config.resolve_specs()?)
}

pub fn collect_deterministic_with(config: &RunConfig, specs: &[LFunctionSpec]) -> Result<EmpiricalMeasure> {
    let samples = sample_ordinates(config, specs, config.sigma())?;
    let mut data = Vec::with_capacity(samples.len() * config.dim());
    let mut rejections = 0;
    for s in &samples {
        rejections += s.rejections;
        for v in &s.values {
            data.push(v.re_log);
            data.push(v.im_log);
        }
    }
    let mut m = EmpiricalMeasure::from_flat(config.dim(), data, Provenance::Deterministic)?;
    m.rejections = rejections;
    Ok(m)
}

/// `Phi_T^rand`: `n_rand` points from independent assignments, each shared by all `J` specs.
pub fn collect_random(config: &RunConfig) -> Result<EmpiricalMeasure> {
    collect_random_with(config, &config.resolve_specs()?)
}

pub fn collect_random_with(config: &RunConfig, specs: &[LFunctionSpec]) -> Result<EmpiricalMeasure> {
    check_specs(config, specs)?;
    let plans = specs
        .iter()
        .map(|s| EulerProductPlan::new(s, config.sigma(), config.prime_cutoff, &config.truncation))
        .collect::<Result<Vec<_>>>()?;
    let rows = sample_joint(&plans, config.seed, config.n_rand)?;
    let data: Vec<f64> = rows.iter().flat_map(|r| interleave(r)).collect();
    EmpiricalMeasure::from_flat(config.dim(), data, Provenance::Random)
}

// ---------------------------------------------------------------------------
// characteristic functions

/// `mean exp(2 pi i (x . u + y . v))` over points `(u_1, v_1, u_2, v_2, ...)`.
pub fn char_fn(m: &EmpiricalMeasure, x: &[f64], y: &[f64]) -> Result<Complex64> {
    if x.len() != y.len() || 2 * x.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: x.len() + y.len() });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for p in m.points() {
        let mut phase = 0.0;
        for j in 0..x.len() {
            phase += x[j] * p[2 * j] + y[j] * p[2 * j + 1];
        }
        sum += Complex64::from_polar(1.0, TAU * phase);
    }
    Ok(sum / m.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharFnGap {
    pub gap: f64,
    /// `1/sqrt(n1) + 1/sqrt(n2)`
    pub noise_floor: f64,
    /// Lattice point `(x_1, y_1, x_2, y_2, ...)` attaining the gap.
    pub argmax: Vec<f64>,
}

/// Largest `|char_fn(m1) - char_fn(m2)|` over `grid_n` points per axis of `[-M, M]^{2J}`.
pub fn char_fn_gap(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, radius: f64, grid_n: usize) -> Result<CharFnGap> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch { expected: m1.dim(), found: m2.dim() });
    }
    if !(radius > 0.0) || grid_n < 2 {
        return Err(Error::Domain("char_fn_gap needs M > 0 and grid_n >= 2".into()));
    }
    let dim = m1.dim();
    let nodes: Vec<f64> = (0..grid_n).map(|k| -radius + 2.0 * radius * k as f64 / (grid_n - 1) as f64).collect();
    let total = grid_n.pow(dim as u32);
    let gaps: Vec<(f64, usize)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let w = lattice_point(idx, &nodes, dim);
            let (x, y) = split_frequencies(&w);
            let a = char_fn(m1, &x, &y).expect("dimensions checked");
            let b = char_fn(m2, &x, &y).expect("dimensions checked");
            ((a - b).norm(), idx)
        })
        .collect();
    // first index wins ties, independent of scheduling
    let (gap, idx) = gaps.iter().fold((-1.0, 0), |best, &(g, i)| if g > best.0 { (g, i) } else { best });
    Ok(CharFnGap {
        gap,
        noise_floor: 1.0 / (m1.len() as f64).sqrt() + 1.0 / (m2.len() as f64).sqrt(),
        argmax: lattice_point(idx, &nodes, dim),
    })
}

fn lattice_point(mut idx: usize, nodes: &[f64], dim: usize) -> Vec<f64> {
    let mut w = vec![0.0; dim];
    for a in (0..dim).rev() {
        w[a] = nodes[idx % nodes.len()];
        idx /= nodes.len();
    }
    w
}

fn split_frequencies(w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (w.iter().step_by(2).copied().collect(), w.iter().skip(1).step_by(2).copied().collect())
}

// ---------------------------------------------------------------------------
// Dirichlet-polynomial approximation

/// Mean of `|log L(sigma_T + it) - R_Y(sigma_T + it)|^2` over the stratified ordinates.
pub fn second_moment_gap(config: &RunConfig) -> Result<MeanEstimate> {
    let specs = config.resolve_specs()?;
    Ok(second_moment_gaps(config, &specs[0], config.sigma(), &[config.y])?.remove(0))
}

/// The same ordinates serve every `Y`, so differences between lengths are not
/// diluted by resampling.
pub fn second_moment_gaps(config: &RunConfig, spec: &LFunctionSpec, sigma: f64, ys: &[f64]) -> Result<Vec<MeanEstimate>> {
    if config.specs.len() != 1 {
        return Err(Error::Config("the second-moment gap takes exactly one spec".into()));
    }
    if !(sigma > 0.5 && sigma <= 1.0) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (1/2, 1]")));
    }
    let samples = sample_ordinates(config, std::slice::from_ref(spec), sigma)?;
    ys.iter()
        .map(|&y| {
            let poly = DirichletPolynomial::new(spec, y);
            let gaps: Vec<f64> = samples
                .par_iter()
                .map(|s| (s.values[0].log() - poly.eval(Complex64::new(sigma, s.t))).norm_sqr())
                .collect();
            Ok(MeanEstimate::from_samples(&gaps))
        })
        .collect()
}

/// `sum_{n > Y} |beta(n)|^2 n^{-2 sigma}` over prime powers: explicit for
/// `n <= limit`, and for primes beyond `limit` the prime-number-theorem
/// estimate `mean |beta(p)|^2 * E1((2 sigma - 1) ln limit)`.
pub fn analytic_gap_tail(spec: &LFunctionSpec, sigma: f64, y: f64, limit: u64) -> Result<f64> {
    if !(sigma > 0.5 + spec.eta()) {
        return Err(Error::Domain(format!("sigma = {sigma} must exceed 1/2 + eta")));
    }
    let primes = crate::random_model::primes_through(limit)?;
    let primes = primes.up_to(limit);
    let mut sum = 0.0;
    let mut first_power_mass = 0.0;
    for &p in primes {
        let mut n = p as f64;
        let mut r = 1;
        while n <= limit as f64 {
            let b = spec.beta_unchecked(p, r).norm_sqr();
            if r == 1 {
                first_power_mass += b;
            }
            if n > y {
                sum += b * n.powf(-2.0 * sigma);
            }
            n *= p as f64;
            r += 1;
        }
    }
    let mean_beta = first_power_mass / primes.len() as f64;
    sum += mean_beta * exp_integral_e1((2.0 * sigma - 1.0) * (limit as f64).ln());
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        RunConfig { height: 1000.0, n_t: 20, n_rand: 50, prime_cutoff: 10_000, ..RunConfig::default() }
    }

    #[test]
    fn rect_measure_examples() {
        let m = EmpiricalMeasure::new(2, vec![vec![0.2, 0.2], vec![0.5, 0.7], vec![3.0, 3.0]], Provenance::Random).unwrap();
        assert_eq!(measure_rect(&m, &Rectangle::full(2)).unwrap(), 1.0);
        let unit = Rectangle::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!((measure_rect(&m, &unit).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let empty = Rectangle::new(vec![9.0, 9.0], vec![9.0, 9.0]).unwrap();
        assert_eq!(measure_rect(&m, &empty).unwrap(), 0.0);
        assert!(measure_rect(&m, &Rectangle::full(3)).is_err());
        assert!(Rectangle::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(EmpiricalMeasure::new(2, vec![], Provenance::Random).is_err());
        assert!(EmpiricalMeasure::new(2, vec![vec![f64::NAN, 0.0]], Provenance::Random).is_err());
        assert!(EmpiricalMeasure::new(2, vec![vec![0.0]], Provenance::Random).is_err());
    }

    #[test]
    fn regime_and_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.g = (1e5f64).ln().ln() - 0.5;
        assert!(!c.regime_flag());
        c.g = 2.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn char_fn_basics() {
        let m = EmpiricalMeasure::new(2, vec![vec![0.3, -1.1]], Provenance::Random).unwrap();
        assert_eq!(char_fn(&m, &[0.0], &[0.0]).unwrap(), Complex64::new(1.0, 0.0));
        let v = char_fn(&m, &[0.7], &[0.2]).unwrap();
        let expect = Complex64::from_polar(1.0, TAU * (0.7 * 0.3 + 0.2 * -1.1));
        assert!((v - expect).norm() < 1e-15);
        let w = char_fn(&m, &[-0.7], &[-0.2]).unwrap();
        assert!((w - v.conj()).norm() < 1e-15);
        assert_eq!(char_fn_gap(&m, &m, 1.0, 3).unwrap().gap, 0.0);
    }

    #[test]
    fn collection_shapes() {
        let c = small_config();
        let det = collect_deterministic(&c).unwrap();
        assert_eq!((det.len(), det.dim()), (20, 2));
        let rand = collect_random(&c).unwrap();
        assert_eq!((rand.len(), rand.dim()), (50, 2));
        let c2 = RunConfig { specs: vec!["zeta".into(), "dirichlet:q=4:index=1".into()], ..c };
        assert_eq!(collect_random(&c2).unwrap().dim(), 4);
    }

    #[test]
    fn empty_polynomial_gap_is_second_moment() {
        let c = RunConfig { y: 1.0, ..small_config() };
        let gap = second_moment_gap(&c).unwrap();
        let det = collect_deterministic(&c).unwrap();
        let sq: Vec<f64> = det.points().map(|p| p[0] * p[0] + p[1] * p[1]).collect();
        assert!((gap.mean - MeanEstimate::from_samples(&sq).mean).abs() < 1e-12);
    }
}
