use lcrit_core::clt::*;
use lcrit_core::measures::{EmpiricalMeasure, Provenance};
use lcrit_core::quadrature::composite;
use lcrit_core::rng;
use std::f64::consts::PI;

/// `d/dx` of a coefficient vector, lowest degree first.
fn derivative(p: &[i128]) -> Vec<i128> {
    p.iter().enumerate().skip(1).map(|(i, c)| i as i128 * c).collect()
}

/// `(-1)^n e^{x^2} d^n/dx^n e^{-x^2}` by repeated differentiation: the
/// n-th derivative is `P_n e^{-x^2}` with `P_{n+1} = P_n' - 2x P_n`.
fn rodrigues(n: usize) -> Vec<i128> {
    let mut p = vec![1i128];
    for _ in 0..n {
        let mut next = derivative(&p);
        next.resize(p.len() + 1, 0);
        for (i, c) in p.iter().enumerate() {
            next[i + 1] -= 2 * c;
        }
        p = next;
    }
    if n % 2 == 1 {
        p.iter_mut().for_each(|c| *c = -*c);
    }
    p
}

fn eval(p: &[i128], x: i128) -> i128 {
    p.iter().rev().fold(0, |acc, c| acc * x + c)
}

#[test]
fn recurrence_matches_rodrigues() {
    let basis = HermiteBasis::new(8).unwrap();
    for n in 0..=8 {
        let r = rodrigues(n);
        assert_eq!(basis.coefficients(n).unwrap(), &r[..]);
        for x in -2i128..=2 {
            let exact = eval(&r, x);
            assert_eq!(basis.eval_integer(n, x), Some(exact));
            assert_eq!(hermite(n, x as f64).unwrap(), exact as f64);
        }
    }
}

#[test]
fn orthogonality() {
    let factorial = |n: u32| (1..=n).map(f64::from).product::<f64>();
    for m in 0..=10 {
        for n in 0..=10 {
            let f = |x: f64| (-x * x).exp() * hermite(m, x).unwrap() * hermite(n, x).unwrap();
            let v: f64 = composite(f, -12.0, 12.0, 96);
            let norm = |k: usize| 2f64.powi(k as i32) * factorial(k as u32) * PI.sqrt();
            if m == n {
                assert!((v / norm(n) - 1.0).abs() <= 1e-8, "{m} {n} {v}");
            } else {
                assert!(v.abs() <= 1e-8 * (norm(m) * norm(n)).sqrt(), "{m} {n} {v}");
            }
        }
    }
}

#[test]
fn symmetric_box_mass_increases_to_one() {
    let mut prev = 0.0;
    // strict until the mass rounds to 1 in double precision
    for i in 1..=300 {
        let x = i as f64 * 0.01;
        let v = gaussian_box_integral(-x, x);
        assert!(v > prev);
        prev = v;
    }
    assert!((1.0 - prev) < 1e-12);
    assert_eq!(gaussian_box_integral(-10.0, 10.0), 1.0);
    assert_eq!(gaussian_box_integral(f64::NEG_INFINITY, f64::INFINITY), 1.0);
}

#[test]
fn leading_order_is_a_product_measure() {
    let psi = vec![1.3, 2.7];
    let rect = CLTRectangle { a: vec![-0.2, -1.0], b: vec![0.4, 0.1], c: vec![-0.3, 0.0], d: vec![0.3, f64::INFINITY], psi: psi.clone() };
    let joint = expansion_eval(&ExpansionCoefficients::leading(2), &rect).unwrap();
    let mut product = 1.0;
    for j in 0..2 {
        let axis = CLTRectangle { a: vec![rect.a[j]], b: vec![rect.b[j]], c: vec![rect.c[j]], d: vec![rect.d[j]], psi: vec![psi[j]] };
        product *= expansion_eval(&ExpansionCoefficients::leading(1), &axis).unwrap();
    }
    assert!((joint - product).abs() < 1e-15);
}

#[test]
fn synthetic_gaussian_samples_fit() {
    let n = 10_000;
    let psi = vec![2.0];
    let scale = (PI * psi[0]).sqrt();
    let mut g = rng::stream(rng::domain_seed(7, rng::DOMAIN_SYNTHETIC), 0);
    let mut draw = || rng::next_normal(&mut g) / (2.0 * PI).sqrt() * scale;
    let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![draw(), draw()]).collect();
    let m = EmpiricalMeasure::new(2, pts, Provenance::Random).unwrap();
    let report = clt_fit(&m, &CltConfig { psi, ks_tolerance: None, boxes: vec![] }).unwrap();
    assert!(report.passed, "{:?}", report.coordinates);
    assert!((report.ks_tolerance - 1.63 / (n as f64).sqrt()).abs() < 1e-15);
    for b in &report.boxes {
        assert!((b.observed - b.predicted).abs() <= 5.0 * b.std_error, "{b:?}");
    }
}
