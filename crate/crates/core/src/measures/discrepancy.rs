//! Box discrepancy `sup_B |m1(B) - m2(B)|` between two empirical measures.
//!
//! Points of `m1` carry weight `+n2` and points of `m2` weight `-n1`, so a
//! box's signed mass is an integer and the supremum is exact. Only the set
//! of points a box captures matters, and every such set is a product of
//! contiguous rank ranges, one per axis; corners at pooled coordinates
//! extended by `+-inf` reach all of them.
//!
//! * dimension 2: for each lower x-rank, points are inserted by increasing
//!   upper x-rank into a segment tree over y-ranks that tracks the largest
//!   and smallest contiguous sums, `O(n^2 log n)`.
//! * higher dimensions with few points: leading axes are enumerated as rank
//!   ranges over the captured subset, ending in the 2-D sweep.
//! * otherwise: points are binned on a per-axis quantile grid and the sup is
//!   taken over unions of cells, a lower bound on the exact value.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyOptions {
    /// Pooled sample size up to which dimensions above 2 are computed exactly.
    pub exact_limit: usize,
    /// Cells per axis of the grid path; chosen from `grid_budget` when absent.
    pub grid_resolution: Option<usize>,
    /// Rough operation budget for the grid path.
    pub grid_budget: f64,
}

impl Default for DiscrepancyOptions {
    fn default() -> Self {
        Self { exact_limit: 64, grid_resolution: None, grid_budget: 1e8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyEstimate {
    pub value: f64,
    pub exact: bool,
    /// Cells per axis when `exact` is false; the value is then a lower bound.
    pub grid_resolution: Option<usize>,
}

/// Largest and smallest signed mass over all boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Extremes {
    max: i64,
    min: i64,
}

impl Extremes {
    const EMPTY: Extremes = Extremes { max: 0, min: 0 };

    fn merge(&mut self, o: Extremes) {
        self.max = self.max.max(o.max);
        self.min = self.min.min(o.min);
    }
}

/// Per-axis ranks among the distinct pooled coordinates.
fn rank_axes(points: &[&[f64]], dim: usize) -> (Vec<u32>, Vec<usize>) {
    let n = points.len();
    let mut ranks = vec![0u32; n * dim];
    let mut distinct = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut vals: Vec<f64> = points.iter().map(|p| p[a]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for (i, p) in points.iter().enumerate() {
            ranks[i * dim + a] = vals.partition_point(|v| v.total_cmp(&p[a]).is_lt()) as u32;
        }
        distinct.push(vals.len());
    }
    (ranks, distinct)
}

fn kadane(xs: &[i64]) -> Extremes {
    let (mut best_max, mut best_min) = (0i64, 0i64);
    let (mut cur_max, mut cur_min) = (0i64, 0i64);
    for &x in xs {
        cur_max = (cur_max + x).max(x);
        cur_min = (cur_min + x).min(x);
        best_max = best_max.max(cur_max);
        best_min = best_min.min(cur_min);
    }
    Extremes { max: best_max, min: best_min }
}

#[derive(Clone, Copy, Default)]
struct Node {
    sum: i64,
    pre_max: i64,
    suf_max: i64,
    sub_max: i64,
    pre_min: i64,
    suf_min: i64,
    sub_min: i64,
}

impl Node {
    fn leaf(v: i64) -> Node {
        Node { sum: v, pre_max: v, suf_max: v, sub_max: v, pre_min: v, suf_min: v, sub_min: v }
    }

    fn join(l: &Node, r: &Node) -> Node {
        Node {
            sum: l.sum + r.sum,
            pre_max: l.pre_max.max(l.sum + r.pre_max),
            suf_max: r.suf_max.max(r.sum + l.suf_max),
            sub_max: l.sub_max.max(r.sub_max).max(l.suf_max + r.pre_max),
            pre_min: l.pre_min.min(l.sum + r.pre_min),
            suf_min: r.suf_min.min(r.sum + l.suf_min),
            sub_min: l.sub_min.min(r.sub_min).min(l.suf_min + r.pre_min),
        }
    }
}

/// Point-update tree answering "extreme contiguous sum" at the root.
struct SegmentTree {
    size: usize,
    nodes: Vec<Node>,
    leaves: Vec<i64>,
}

impl SegmentTree {
    fn new(len: usize) -> Self {
        let size = len.next_power_of_two().max(1);
        Self { size, nodes: vec![Node::default(); 2 * size], leaves: vec![0; size] }
    }

    fn reset(&mut self) {
        self.nodes.fill(Node::default());
        self.leaves.fill(0);
    }

    fn add(&mut self, i: usize, w: i64) {
        self.leaves[i] += w;
        let mut k = i + self.size;
        self.nodes[k] = Node::leaf(self.leaves[i]);
        while k > 1 {
            k /= 2;
            self.nodes[k] = Node::join(&self.nodes[2 * k], &self.nodes[2 * k + 1]);
        }
    }

    fn extremes(&self) -> Extremes {
        let root = &self.nodes[1];
        Extremes { max: root.sub_max.max(0), min: root.sub_min.min(0) }
    }
}

/// Exact extremes over boxes on axes `(ax, ay)` for the given points.
fn sweep_2d(items: &[(u32, u32, i64)]) -> Extremes {
    if items.is_empty() {
        return Extremes::EMPTY;
    }
    let mut xs: Vec<u32> = items.iter().map(|p| p.0).collect();
    let mut ys: Vec<u32> = items.iter().map(|p| p.1).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let mut groups: Vec<Vec<(usize, i64)>> = vec![Vec::new(); xs.len()];
    for &(x, y, w) in items {
        let gx = xs.binary_search(&x).unwrap();
        let gy = ys.binary_search(&y).unwrap();
        groups[gx].push((gy, w));
    }
    let mut tree = SegmentTree::new(ys.len());
    let mut best = Extremes::EMPTY;
    for lo in 0..groups.len() {
        tree.reset();
        for group in &groups[lo..] {
            for &(y, w) in group {
                tree.add(y, w);
            }
            best.merge(tree.extremes());
        }
    }
    best
}

struct Pooled {
    dim: usize,
    ranks: Vec<u32>,
    weights: Vec<i64>,
}

impl Pooled {
    fn rank(&self, i: usize, axis: usize) -> u32 {
        self.ranks[i * self.dim + axis]
    }
}

fn exact_recursive(pool: &Pooled, subset: &[usize], axis: usize) -> Extremes {
    let remaining = pool.dim - axis;
    if subset.is_empty() {
        return Extremes::EMPTY;
    }
    if remaining == 1 {
        let mut items: Vec<(u32, i64)> = subset.iter().map(|&i| (pool.rank(i, axis), pool.weights[i])).collect();
        items.sort_unstable_by_key(|p| p.0);
        let mut sums: Vec<i64> = Vec::new();
        let mut last = None;
        for (r, w) in items {
            if last == Some(r) {
                *sums.last_mut().unwrap() += w;
            } else {
                sums.push(w);
                last = Some(r);
            }
        }
        return kadane(&sums);
    }
    if remaining == 2 {
        let items: Vec<(u32, u32, i64)> = subset
            .iter()
            .map(|&i| (pool.rank(i, axis), pool.rank(i, axis + 1), pool.weights[i]))
            .collect();
        return sweep_2d(&items);
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable_by_key(|&i| pool.rank(i, axis));
    // boundaries of equal-rank groups
    let mut starts = vec![0];
    for k in 1..sorted.len() {
        if pool.rank(sorted[k], axis) != pool.rank(sorted[k - 1], axis) {
            starts.push(k);
        }
    }
    starts.push(sorted.len());
    let mut best = Extremes::EMPTY;
    for lo in 0..starts.len() - 1 {
        for hi in lo + 1..starts.len() {
            best.merge(exact_recursive(pool, &sorted[starts[lo]..starts[hi]], axis + 1));
        }
    }
    best
}

/// Extremes over boxes of cells of a dense tensor with the given shape.
fn grid_extremes(tensor: &[i64], shape: &[usize]) -> Extremes {
    match shape.len() {
        0 => Extremes::EMPTY,
        1 => kadane(tensor),
        2 => {
            let (rows, cols) = (shape[0], shape[1]);
            let mut best = Extremes::EMPTY;
            let mut acc = vec![0i64; cols];
            for top in 0..rows {
                acc.fill(0);
                for bottom in top..rows {
                    for (a, v) in acc.iter_mut().zip(&tensor[bottom * cols..(bottom + 1) * cols]) {
                        *a += v;
                    }
                    best.merge(kadane(&acc));
                }
            }
            best
        }
        _ => {
            let slab: usize = shape[1..].iter().product();
            let mut best = Extremes::EMPTY;
            let mut acc = vec![0i64; slab];
            for lo in 0..shape[0] {
                acc.fill(0);
                for hi in lo..shape[0] {
                    for (a, v) in acc.iter_mut().zip(&tensor[hi * slab..(hi + 1) * slab]) {
                        *a += v;
                    }
                    best.merge(grid_extremes(&acc, &shape[1..]));
                }
            }
            best
        }
    }
}

fn grid_cost(res: usize, dim: usize) -> f64 {
    let r = res as f64;
    let pairs = r * (r + 1.0) / 2.0;
    pairs.powi(dim as i32 - 1) * r
}

fn auto_resolution(dim: usize, budget: f64) -> usize {
    let mut res = 4;
    while res < 64 && grid_cost(res + 1, dim) <= budget {
        res += 1;
    }
    res
}

fn extremes_for(points: &[&[f64]], weights: Vec<i64>, dim: usize, opts: &DiscrepancyOptions) -> (Extremes, Option<usize>) {
    let (ranks, distinct) = rank_axes(points, dim);
    let pool = Pooled { dim, ranks, weights };
    let all: Vec<usize> = (0..points.len()).collect();
    if dim <= 2 || points.len() <= opts.exact_limit {
        return (exact_recursive(&pool, &all, 0), None);
    }
    let res = opts.grid_resolution.unwrap_or_else(|| auto_resolution(dim, opts.grid_budget)).max(1);
    let shape = vec![res; dim];
    let mut tensor = vec![0i64; res.pow(dim as u32)];
    for i in 0..points.len() {
        let mut idx = 0;
        for (a, &d) in distinct.iter().enumerate() {
            let cell = (pool.rank(i, a) as usize * res) / d;
            idx = idx * res + cell;
        }
        tensor[idx] += pool.weights[i];
    }
    (grid_extremes(&tensor, &shape), Some(res))
}

fn estimate(points: &[&[f64]], n1: usize, dim: usize, opts: &DiscrepancyOptions) -> DiscrepancyEstimate {
    let n2 = points.len() - n1;
    let weights: Vec<i64> = (0..points.len()).map(|i| if i < n1 { n2 as i64 } else { -(n1 as i64) }).collect();
    let (ext, res) = extremes_for(points, weights, dim, opts);
    let value = ext.max.max(-ext.min) as f64 / (n1 as f64 * n2 as f64);
    DiscrepancyEstimate { value, exact: res.is_none(), grid_resolution: res }
}

fn check_dims(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure) -> Result<()> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch { expected: m1.dim(), found: m2.dim() });
    }
    Ok(())
}

/// `sup` over closed axis-parallel boxes (possibly unbounded) of `|m1(B) - m2(B)|`.
pub fn discrepancy(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure) -> Result<DiscrepancyEstimate> {
    discrepancy_with(m1, m2, &DiscrepancyOptions::default())
}

pub fn discrepancy_with(
    m1: &EmpiricalMeasure,
    m2: &EmpiricalMeasure,
    opts: &DiscrepancyOptions,
) -> Result<DiscrepancyEstimate> {
    check_dims(m1, m2)?;
    let pooled: Vec<&[f64]> = m1.points().chain(m2.points()).collect();
    Ok(estimate(&pooled, m1.len(), m1.dim(), opts))
}

/// Mean discrepancy between random splits of the pooled sample into parts of
/// sizes `n1` and `n2`: the scale of `discrepancy` when both samples share
/// one law.
pub fn permutation_noise_floor(
    m1: &EmpiricalMeasure,
    m2: &EmpiricalMeasure,
    repetitions: usize,
    seed: u64,
    opts: &DiscrepancyOptions,
) -> Result<f64> {
    check_dims(m1, m2)?;
    if repetitions == 0 {
        return Err(Error::Domain("at least one permutation is required".into()));
    }
    let pooled: Vec<&[f64]> = m1.points().chain(m2.points()).collect();
    let key = rng::domain_seed(seed, rng::DOMAIN_PERMUTATION);
    let values: Vec<f64> = (0..repetitions as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = rng::stream(key, r);
            let mut order = pooled.clone();
            for i in (1..order.len()).rev() {
                let j = (stream.next_u64() % (i as u64 + 1)) as usize;
                order.swap(i, j);
            }
            estimate(&order, m1.len(), m1.dim(), opts).value
        })
        .collect();
    Ok(values.iter().sum::<f64>() / repetitions as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Provenance;

    fn measure(points: &[[f64; 2]]) -> EmpiricalMeasure {
        EmpiricalMeasure::new(2, points.iter().map(|p| p.to_vec()).collect(), Provenance::Random).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let a = measure(&[[0.0, 0.0], [1.0, 2.0]]);
        assert_eq!(discrepancy(&a, &a).unwrap().value, 0.0);
        let b = measure(&[[5.0, 5.0]]);
        let c = measure(&[[6.0, 6.0]]);
        assert_eq!(discrepancy(&b, &c).unwrap().value, 1.0);
    }

    #[test]
    fn hand_example() {
        let a = measure(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let b = measure(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        // the box [0,0]x[0,0] holds one third of a and nothing of b
        assert!((discrepancy(&a, &b).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kadane_extremes() {
        assert_eq!(kadane(&[2, -5, 3, 1, -1]), Extremes { max: 4, min: -5 });
        assert_eq!(kadane(&[]), Extremes::EMPTY);
    }

    #[test]
    fn grid_matches_exact_when_fine_enough() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, ((i * 7) % 10) as f64, ((i * 3) % 10) as f64]).collect();
        let a = EmpiricalMeasure::new(3, pts[..5].to_vec(), Provenance::Random).unwrap();
        let b = EmpiricalMeasure::new(3, pts[5..].to_vec(), Provenance::Random).unwrap();
        let exact = discrepancy(&a, &b).unwrap();
        assert!(exact.exact);
        let opts = DiscrepancyOptions { exact_limit: 0, grid_resolution: Some(10), ..Default::default() };
        let grid = discrepancy_with(&a, &b, &opts).unwrap();
        assert_eq!(grid.grid_resolution, Some(10));
        assert_eq!(grid.value, exact.value);
        let coarse = DiscrepancyOptions { exact_limit: 0, grid_resolution: Some(3), ..Default::default() };
        assert!(discrepancy_with(&a, &b, &coarse).unwrap().value <= exact.value);
    }
}
