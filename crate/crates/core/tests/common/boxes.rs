//! Exhaustive discrepancy over all closed boxes with corners at pooled
//! coordinates or infinity; exponential in the dimension, for tiny inputs.

pub fn brute_force_discrepancy(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dim = a[0].len();
    let mut coords: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut c: Vec<f64> = a.iter().chain(b).map(|p| p[k]).collect();
            c.push(f64::NEG_INFINITY);
            c.push(f64::INFINITY);
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let mut best: f64 = 0.0;
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    recurse(&mut coords, 0, &mut lo, &mut hi, a, b, &mut best);
    best
}

fn recurse(
    coords: &mut [Vec<f64>],
    axis: usize,
    lo: &mut Vec<f64>,
    hi: &mut Vec<f64>,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    best: &mut f64,
) {
    if axis == coords.len() {
        let inside = |p: &Vec<f64>| p.iter().enumerate().all(|(k, x)| lo[k] <= *x && *x <= hi[k]);
        let fa = a.iter().filter(|p| inside(p)).count() as f64 / a.len() as f64;
        let fb = b.iter().filter(|p| inside(p)).count() as f64 / b.len() as f64;
        *best = best.max((fa - fb).abs());
        return;
    }
    let values = coords[axis].clone();
    for i in 0..values.len() {
        for j in i..values.len() {
            lo[axis] = values[i];
            hi[axis] = values[j];
            recurse(coords, axis + 1, lo, hi, a, b, best);
        }
    }
}
