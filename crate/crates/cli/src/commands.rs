//! One function per subcommand. Each returns a [`Report`]; file output and
//! exit status are handled by the caller.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use lcrit_core::clt::{clt_fit, expansion_eval, CltConfig, ExpansionCoefficients};
use lcrit_core::measures::io::{read_csv, write_csv};
use lcrit_core::measures::*;
use lcrit_core::random_model::{analytic_moment2, sample_joint, EulerProductPlan};
use lcrit_core::rng;
use lcrit_core::smoothing::{bs_f, bs_f_fourier, fejer_fourier, indicator_fourier, khat, BSFunction, FourierQuadrature};
use lcrit_core::stats::MeanEstimate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{Cell, Report};

pub type CmdResult = Result<Report, String>;

pub struct Context {
    pub config: ExperimentConfig,
    pub hash: String,
    pub out: PathBuf,
}

impl Context {
    fn run(&self) -> &RunConfig {
        &self.config.run
    }

    fn seed(&self) -> u64 {
        self.config.run.seed
    }

    fn write_measure(&self, name: &str, m: &EmpiricalMeasure, height: f64) -> Result<PathBuf, String> {
        let path = self.out.join(name);
        let extra = [
            ("config_hash", self.hash.clone()),
            ("seed", self.seed().to_string()),
            ("T", height.to_string()),
            ("G", self.run().g.to_string()),
            ("rejections", m.rejections().to_string()),
        ];
        let file = File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        write_csv(m, &extra, file).map_err(|e| e.to_string())?;
        Ok(path)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn read_measure(path: &Path) -> Result<EmpiricalMeasure, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(read_csv(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?.0)
}

/// Two measures from files when given, otherwise collected from the config.
fn measure_pair(ctx: &Context, inputs: &[PathBuf]) -> Result<(EmpiricalMeasure, EmpiricalMeasure), String> {
    match inputs {
        [a, b] => Ok((read_measure(a)?, read_measure(b)?)),
        [] => Ok((collect_deterministic(ctx.run()).map_err(err)?, collect_random(ctx.run()).map_err(err)?)),
        _ => Err("expected zero or two input files".into()),
    }
}

/// `sqrt(G) log log T / sqrt(log T)`, the decay rate of the discrepancy bound.
fn bound_shape(height: f64, g: f64) -> f64 {
    let lt = height.ln();
    g.sqrt() * lt.ln() / lt.sqrt()
}

pub fn sample(ctx: &Context) -> CmdResult {
    let run = ctx.run();
    run.validate().map_err(err)?;
    let det = collect_deterministic(run).map_err(err)?;
    let rnd = collect_random(run).map_err(err)?;
    let mut report = Report::new("sample", &["file", "provenance", "n", "dim", "rejections"]);
    for (name, m) in [("deterministic.csv", &det), ("random.csv", &rnd)] {
        ctx.write_measure(name, m, run.height)?;
        report.push(vec![
            name.into(),
            m.provenance().as_str().into(),
            m.len().into(),
            m.dim().into(),
            m.rejections().into(),
        ]);
    }
    report.summary = json!({ "sigma": run.sigma(), "regime_flag": run.regime_flag() });
    Ok(report)
}

const DISCREPANCY_COLUMNS: [&str; 7] = ["T", "G", "d_hat", "exact", "noise_floor", "bound_shape_value", "regime_flag"];

fn discrepancy_row(ctx: &Context, m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, height: f64) -> Result<(Vec<Cell>, f64, f64), String> {
    let opts = DiscrepancyOptions::default();
    let d = discrepancy_with(m1, m2, &opts).map_err(err)?;
    let floor = permutation_noise_floor(m1, m2, ctx.config.discrepancy.reps, ctx.seed(), &opts).map_err(err)?;
    let g = ctx.run().g;
    let regime = RunConfig { height, ..ctx.run().clone() }.regime_flag();
    let row = vec![
        height.into(),
        g.into(),
        d.value.into(),
        d.exact.into(),
        floor.into(),
        bound_shape(height, g).into(),
        regime.into(),
    ];
    Ok((row, d.value, floor))
}

pub fn discrepancy(ctx: &Context, inputs: &[PathBuf]) -> CmdResult {
    let (m1, m2) = measure_pair(ctx, inputs)?;
    let (row, d, floor) = discrepancy_row(ctx, &m1, &m2, ctx.run().height)?;
    let mut report = Report::new("discrepancy", &DISCREPANCY_COLUMNS);
    report.summary = json!({
        "d_hat": d,
        "noise_floor": floor,
        "bound_shape_value": bound_shape(ctx.run().height, ctx.run().g),
        "regime_flag": ctx.run().regime_flag(),
    });
    report.push(row);
    report.check("d_hat_within_noise", d <= 5.0 * floor, format!("d_hat {d:.6} vs 5 x noise floor {floor:.6}"));
    Ok(report)
}

pub fn sweep(ctx: &Context) -> CmdResult {
    let heights = &ctx.config.discrepancy.heights;
    if heights.is_empty() {
        return Err("discrepancy.heights is empty".into());
    }
    // sigma depends on G only, so one random measure serves every height
    let rnd = collect_random(ctx.run()).map_err(err)?;
    let mut report = Report::new("sweep", &DISCREPANCY_COLUMNS);
    let mut previous: Option<(f64, f64, f64)> = None;
    for &height in heights {
        let det = collect_deterministic(&RunConfig { height, ..ctx.run().clone() }).map_err(err)?;
        let (row, d, floor) = discrepancy_row(ctx, &det, &rnd, height)?;
        report.push(row);
        if let Some((t0, d0, f0)) = previous {
            let slack = 2.0 * f0.max(floor);
            report.check(
                &format!("non_increasing_T{t0}_to_T{height}"),
                d <= d0 + slack,
                format!("d_hat {d0:.6} -> {d:.6}, slack {slack:.6}"),
            );
        }
        previous = Some((height, d, floor));
    }
    Ok(report)
}

pub fn charfn(ctx: &Context, inputs: &[PathBuf]) -> CmdResult {
    let (m1, m2) = measure_pair(ctx, inputs)?;
    let knobs = &ctx.config.charfn;
    let gap = char_fn_gap(&m1, &m2, knobs.radius, knobs.grid_n).map_err(err)?;
    let mut report = Report::new("charfn", &["M", "grid_n", "gap", "noise_floor"]);
    report.push(vec![knobs.radius.into(), knobs.grid_n.into(), gap.gap.into(), gap.noise_floor.into()]);
    report.summary = json!({ "argmax": gap.argmax });
    report.check(
        "gap_within_noise",
        gap.gap <= 5.0 * gap.noise_floor,
        format!("gap {:.6} vs 5 x noise floor {:.6}", gap.gap, gap.noise_floor),
    );
    Ok(report)
}

pub fn moments(ctx: &Context) -> CmdResult {
    let run = ctx.run();
    let knobs = &ctx.config.moments;
    let n = knobs.n_samples.unwrap_or(run.n_rand);
    let specs = run.resolve_specs().map_err(err)?;
    let mut report = Report::new("moments", &["spec", "sigma", "k", "mean", "std_error", "analytic", "z"]);
    for spec in &specs {
        for &sigma in &knobs.sigmas {
            let plan = EulerProductPlan::new(spec, sigma, run.prime_cutoff, &run.truncation).map_err(err)?;
            let values: Vec<_> = sample_joint(std::slice::from_ref(&plan), run.seed, n).map_err(err)?.into_iter().map(|v| v[0]).collect();
            for &k in &knobs.k {
                let est = MeanEstimate::from_samples(&values.iter().map(|v| v.norm_sqr().powi(k as i32)).collect::<Vec<_>>());
                let (analytic, z) = if k == 1 {
                    let a = analytic_moment2(spec, sigma, run.prime_cutoff).map_err(err)?.value;
                    let z = (est.mean - a) / est.std_error;
                    report.check(
                        &format!("moment2_{}_sigma{sigma}", spec.label()),
                        z.abs() <= 4.0,
                        format!("empirical {:.6} vs analytic {a:.6}, z {z:+.2}", est.mean),
                    );
                    (a, z)
                } else {
                    (f64::NAN, f64::NAN)
                };
                report.push(vec![spec.label().into(), sigma.into(), k.into(), est.mean.into(), est.std_error.into(), analytic.into(), z.into()]);
            }
            for (part, pick) in [("re", 0usize), ("im", 1)] {
                let xs: Vec<f64> = values.iter().map(|v| if pick == 0 { v.re } else { v.im }).collect();
                let est = MeanEstimate::from_samples(&xs);
                report.check(
                    &format!("mean_{part}_{}_sigma{sigma}", spec.label()),
                    est.within(0.0, 4.0),
                    format!("mean {:.6} +- {:.6}", est.mean, est.std_error),
                );
            }
        }
    }
    Ok(report)
}

pub fn secondmoment(ctx: &Context) -> CmdResult {
    let run = ctx.run();
    let knobs = &ctx.config.secondmoment;
    let specs = run.resolve_specs().map_err(err)?;
    let spec = specs.first().ok_or("no spec configured")?;
    let sigma = knobs.sigma.unwrap_or_else(|| run.sigma());
    let gaps = second_moment_gaps(run, spec, sigma, &knobs.ys).map_err(err)?;
    let mut report = Report::new("secondmoment", &["Y", "sigma", "mean_gap", "std_error", "analytic_tail", "ratio"]);
    for (&y, g) in knobs.ys.iter().zip(&gaps) {
        let tail = analytic_gap_tail(spec, sigma, y, knobs.tail_limit).map_err(err)?;
        let ratio = g.mean / tail;
        report.push(vec![y.into(), sigma.into(), g.mean.into(), g.std_error.into(), tail.into(), ratio.into()]);
        if let Some(max) = knobs.max_tail_ratio {
            report.check(&format!("tail_ratio_Y{y}"), ratio <= max, format!("gap/tail {ratio:.4} vs {max}"));
        }
    }
    for (w, ys) in gaps.windows(2).zip(knobs.ys.windows(2)) {
        let slack = 2.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        report.check(
            &format!("non_increasing_Y{}_to_Y{}", ys[0], ys[1]),
            w[1].mean <= w[0].mean + slack,
            format!("{:.6} -> {:.6}, slack {slack:.6}", w[0].mean, w[1].mean),
        );
    }
    Ok(report)
}

pub fn clt(ctx: &Context, input: Option<&Path>, synthetic: bool) -> CmdResult {
    let run = ctx.run();
    let knobs = &ctx.config.clt;
    let specs = run.resolve_specs().map_err(err)?;
    let psi: Vec<f64> = specs.iter().map(|s| s.xi() * run.g.ln()).collect();
    let m = if let Some(path) = input {
        read_measure(path)?
    } else if synthetic || knobs.synthetic {
        // density e^{-pi u^2} has variance 1/(2 pi); clt_fit divides by sqrt(pi psi)
        let mut g = rng::stream(rng::domain_seed(run.seed, rng::DOMAIN_SYNTHETIC), 0);
        let data: Vec<f64> = (0..run.n_rand * psi.len() * 2)
            .map(|i| rng::next_normal(&mut g) / (2.0 * PI).sqrt() * (PI * psi[(i / 2) % psi.len()]).sqrt())
            .collect();
        EmpiricalMeasure::from_flat(2 * psi.len(), data, Provenance::Random).map_err(err)?
    } else {
        collect_random(run).map_err(err)?
    };
    let config = CltConfig { psi, ks_tolerance: knobs.ks_tolerance, boxes: knobs.boxes.clone() };
    let fit = clt_fit(&m, &config).map_err(err)?;
    let mut report = Report::new("clt", &["axis", "name", "ks", "tolerance", "passed"]);
    for c in &fit.coordinates {
        report.push(vec![c.axis.into(), c.name.as_str().into(), c.ks.into(), fit.ks_tolerance.into(), c.passed.into()]);
        report.check(&format!("ks_{}", c.name), c.passed, format!("KS {:.6} vs {:.6}", c.ks, fit.ks_tolerance));
    }
    let expansion = if knobs.coefficients.is_empty() {
        None
    } else {
        let coeffs = ExpansionCoefficients::new(specs.len(), &knobs.coefficients).map_err(err)?;
        let values: Vec<f64> = fit.boxes.iter().map(|b| expansion_eval(&coeffs, &b.rect)).collect::<Result<_, _>>().map_err(err)?;
        Some(values)
    };
    report.summary = json!({ "n": fit.n, "boxes": fit.boxes, "expansion_predictions": expansion });
    Ok(report)
}

fn indicator(a: f64, b: f64, x: f64) -> f64 {
    if (a..=b).contains(&x) {
        1.0
    } else {
        0.0
    }
}

pub fn bs_check(ctx: &Context) -> CmdResult {
    let knobs = &ctx.config.bs_check;
    let mut rng = ChaCha8Rng::seed_from_u64(rng::domain_seed(ctx.seed(), rng::DOMAIN_SYNTHETIC));
    let mut report = Report::new("bs-check", &["check", "trials", "violations", "worst", "tolerance"]);

    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..knobs.batch {
        let a: f64 = rng.random_range(-10.0..10.0);
        let b = a + rng.random_range(0.1..10.0);
        let delta: f64 = rng.random_range(1.0..100.0);
        let x = rng.random_range(a - 5.0..b + 5.0);
        let f = BSFunction::with_defaults(a, b, delta).map_err(err)?;
        let v = bs_f(&f, x).map_err(err)?;
        let gap = indicator(a, b, x) - v;
        let excess = (v.abs() - 1.0).max(-gap).max(gap - f.defect_bound(x));
        worst = worst.max(excess);
        violations += usize::from(excess > 1e-8);
    }
    report.push(vec!["sandwich".into(), knobs.batch.into(), violations.into(), worst.into(), 1e-8.into()]);
    report.check("sandwich", violations == 0, format!("{violations} violations, worst excess {worst:.3e}"));

    let params = FourierQuadrature::default();
    let (mut support, mut band) = (0.0f64, 0.0f64);
    let (mut support_bad, mut band_bad) = (0usize, 0usize);
    for _ in 0..knobs.fourier_instances {
        let a: f64 = rng.random_range(-5.0..5.0);
        let b = a + rng.random_range(0.1..10.0);
        let delta: f64 = rng.random_range(1.0..100.0);
        let f = BSFunction::with_defaults(a, b, delta).map_err(err)?;
        for y in [1.2 * delta, -1.2 * delta] {
            let v = bs_f_fourier(&f, y, &params).map_err(err)?.value.norm();
            support = support.max(v);
            support_bad += usize::from(v > 1e-6);
        }
        for _ in 0..knobs.fourier_points {
            let y = rng.random_range(-0.5..0.5) * delta;
            let e = (bs_f_fourier(&f, y, &params).map_err(err)?.value - indicator_fourier(a, b, y)).norm() * delta;
            band = band.max(e);
            band_bad += usize::from(e > 3.0);
        }
    }
    let n = knobs.fourier_instances;
    report.push(vec!["fourier_support".into(), (2 * n).into(), support_bad.into(), support.into(), 1e-6.into()]);
    report.push(vec!["fourier_band_times_delta".into(), (n * knobs.fourier_points).into(), band_bad.into(), band.into(), 3.0.into()]);
    report.check("fourier_support", support_bad == 0, format!("max |F^| beyond Delta {support:.3e}"));
    report.check("fourier_band", band_bad == 0, format!("max in-band error {band:.4}/Delta"));

    let ys = [-1.5, -1.0, -0.5, 0.0, 0.3, 1.0, 2.0];
    let tent = ys.iter().map(|&y| (fejer_fourier(y, 1000.0) - khat(y)).abs()).fold(0.0, f64::max);
    report.push(vec!["fejer_tent".into(), ys.len().into(), usize::from(tent > 1e-6).into(), tent.into(), 1e-6.into()]);
    report.check("fejer_tent", tent <= 1e-6, format!("max error {tent:.3e}"));
    Ok(report)
}
