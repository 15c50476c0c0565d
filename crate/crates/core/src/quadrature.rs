//! Gauss–Legendre quadrature.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Composite 16-point Gauss–Legendre over `panels` equal pieces of `[a, b]`.
pub fn composite<T, F>(f: F, a: f64, b: f64, panels: usize) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let (nodes, weights) = gl16();
    let h = (b - a) / panels as f64;
    let mut total = T::default();
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        let mut panel = T::default();
        for (x, w) in nodes.iter().zip(weights) {
            panel = panel + f(mid + 0.5 * h * x) * *w;
        }
        total = total + panel * (0.5 * h);
    }
    total
}
