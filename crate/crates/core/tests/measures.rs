mod common;

use lcrit_core::lfunction::AnalyticForm;
use lcrit_core::measures::io::{read_csv, write_csv};
use lcrit_core::measures::*;
use lcrit_core::stats::ks_two_sample;
use lcrit_core::zeta::{EvalParams, OrdinateEvaluator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian_measure(rng: &mut ChaCha8Rng, n: usize, dim: usize, shift: f64) -> EmpiricalMeasure {
    let pts = (0..n)
        .map(|_| (0..dim).map(|_| { let z: f64 = StandardNormal.sample(rng); z + shift }).collect::<Vec<f64>>())
        .collect();
    EmpiricalMeasure::new(dim, pts, Provenance::Random).unwrap()
}

fn grid_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    // small integer lattice so ties are common
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(0..5) as f64).collect()).collect()
}

#[test]
fn sweep_equals_brute_force_in_two_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let k = rng.random_range(1..=8);
        let a = grid_points(&mut rng, k, 2);
        let k = rng.random_range(1..=8);
        let b = grid_points(&mut rng, k, 2);
        let ma = EmpiricalMeasure::new(2, a.clone(), Provenance::Random).unwrap();
        let mb = EmpiricalMeasure::new(2, b.clone(), Provenance::Random).unwrap();
        let d = discrepancy(&ma, &mb).unwrap();
        assert!(d.exact);
        assert!((d.value - common::boxes::brute_force_discrepancy(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn exact_path_equals_brute_force_in_higher_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for dim in [3, 4] {
        for _ in 0..10 {
            let k = rng.random_range(1..=4);
        let a = grid_points(&mut rng, k, dim);
            let k = rng.random_range(1..=4);
        let b = grid_points(&mut rng, k, dim);
            let ma = EmpiricalMeasure::new(dim, a.clone(), Provenance::Random).unwrap();
            let mb = EmpiricalMeasure::new(dim, b.clone(), Provenance::Random).unwrap();
            let d = discrepancy(&ma, &mb).unwrap().value;
            assert!((d - common::boxes::brute_force_discrepancy(&a, &b)).abs() < 1e-12);
        }
    }
}

#[test]
fn pseudometric_and_marginal_domination() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n1 = rng.random_range(5..40);
        let n2 = rng.random_range(5..40);
        let shift = rng.random_range(0.0..1.0);
        let a = gaussian_measure(&mut rng, n1, 2, 0.0);
        let b = gaussian_measure(&mut rng, n2, 2, shift);
        let c = gaussian_measure(&mut rng, 20, 2, 0.5);
        let ab = discrepancy(&a, &b).unwrap().value;
        assert_eq!(ab, discrepancy(&b, &a).unwrap().value);
        let ac = discrepancy(&a, &c).unwrap().value;
        let cb = discrepancy(&c, &b).unwrap().value;
        assert!(ab <= ac + cb + 1e-15);
        for axis in 0..2 {
            let ks = ks_two_sample(&a.coordinate(axis), &b.coordinate(axis));
            assert!(ab >= ks - 1e-15);
        }
    }
}

#[test]
fn grid_path_is_a_lower_bound_and_a_pseudometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = gaussian_measure(&mut rng, 30, 4, 0.0);
    let b = gaussian_measure(&mut rng, 30, 4, 0.4);
    let exact = discrepancy(&a, &b).unwrap();
    assert!(exact.exact);
    let opts = DiscrepancyOptions { exact_limit: 0, grid_resolution: Some(8), ..Default::default() };
    let grid = discrepancy_with(&a, &b, &opts).unwrap();
    assert!(!grid.exact);
    assert!(grid.value <= exact.value);
    assert_eq!(grid.value, discrepancy_with(&b, &a, &opts).unwrap().value);
    for axis in 0..4 {
        // one-axis boxes are unions of grid cells only up to the resolution
        let ks = ks_two_sample(&a.coordinate(axis), &b.coordinate(axis));
        assert!(exact.value >= ks - 1e-15);
    }
}

#[test]
fn permutation_null_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pooled = gaussian_measure(&mut rng, 2000, 2, 0.0);
    let half: Vec<Vec<f64>> = pooled.points().map(|p| p.to_vec()).collect();
    let a = EmpiricalMeasure::new(2, half[..1000].to_vec(), Provenance::Random).unwrap();
    let b = EmpiricalMeasure::new(2, half[1000..].to_vec(), Provenance::Random).unwrap();
    let d = discrepancy(&a, &b).unwrap().value;
    assert!(d <= 5.0 / 1000f64.sqrt(), "{d}");
    let floor = permutation_noise_floor(&a, &b, 8, 9, &DiscrepancyOptions::default()).unwrap();
    assert!(floor > 0.0 && floor <= 5.0 / 1000f64.sqrt());
}

#[test]
fn char_fn_gap_of_same_law_is_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = gaussian_measure(&mut rng, 10_000, 2, 0.0);
    let b = gaussian_measure(&mut rng, 10_000, 2, 0.0);
    assert_eq!(char_fn_gap(&a, &a, 1.0, 5).unwrap().gap, 0.0);
    let g = char_fn_gap(&a, &b, 1.0, 9).unwrap();
    assert!(g.gap <= 5.0 * g.noise_floor, "{g:?}");
}

#[test]
fn deterministic_measure_shape_and_reflection() {
    let config = RunConfig { height: 1e3, n_t: 100, ..RunConfig::default() };
    let m = collect_deterministic(&config).unwrap();
    assert_eq!((m.len(), m.dim()), (100, 2));
    assert!(m.points().all(|p| p.iter().all(|x| x.is_finite())));
    let params = EvalParams::default();
    for t in [1000.5, 1432.25, 1999.0] {
        let up = OrdinateEvaluator::new(&AnalyticForm::Zeta, t, params).unwrap().log_continuous(config.sigma()).unwrap();
        let down = OrdinateEvaluator::new(&AnalyticForm::Zeta, -t, params).unwrap().log_continuous(config.sigma()).unwrap();
        assert!((up.re_log - down.re_log).abs() < 1e-10);
        assert!((up.im_log + down.im_log).abs() < 1e-10);
    }
}

#[test]
fn deterministic_and_random_means_agree() {
    let config = RunConfig { height: 1e4, g: (1e4f64).ln().ln(), n_t: 500, n_rand: 500, prime_cutoff: 100_000, ..RunConfig::default() };
    let det = collect_deterministic(&config).unwrap();
    let rnd = collect_random(&config).unwrap();
    let a = &det.coordinate_means()[0];
    let b = &rnd.coordinate_means()[0];
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= 5.0 * se, "{a:?} {b:?}");
}

#[test]
fn csv_header_for_two_specs() {
    let config = RunConfig {
        height: 1e3,
        n_t: 5,
        n_rand: 5,
        prime_cutoff: 10_000,
        specs: vec!["zeta".into(), "dirichlet:q=4:index=1".into()],
        ..RunConfig::default()
    };
    let m = collect_deterministic(&config).unwrap();
    let mut buf = Vec::new();
    write_csv(&m, &[], &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "log_abs_1,arg_1,log_abs_2,arg_2");
    assert_eq!(read_csv(&buf[..]).unwrap().0.len(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_is_monotone_under_inclusion(
        pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 1..30),
        lo in prop::collection::vec(-3.0f64..0.0, 2),
        hi in prop::collection::vec(0.0f64..3.0, 2),
        grow in 0.0f64..2.0,
    ) {
        let m = EmpiricalMeasure::new(2, pts, Provenance::Random).unwrap();
        let inner = Rectangle::new(lo.clone(), hi.clone()).unwrap();
        let outer = Rectangle::new(lo.iter().map(|x| x - grow).collect(), hi.iter().map(|x| x + grow).collect()).unwrap();
        prop_assert!(measure_rect(&m, &inner).unwrap() <= measure_rect(&m, &outer).unwrap());
    }

    #[test]
    fn discrepancy_is_symmetric_and_bounded(
        a in prop::collection::vec(prop::collection::vec(-2i32..3, 2), 1..15),
        b in prop::collection::vec(prop::collection::vec(-2i32..3, 2), 1..15),
    ) {
        let to_m = |v: &Vec<Vec<i32>>| EmpiricalMeasure::new(2, v.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect(), Provenance::Random).unwrap();
        let (ma, mb) = (to_m(&a), to_m(&b));
        let d = discrepancy(&ma, &mb).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, discrepancy(&mb, &ma).unwrap().value);
        prop_assert_eq!(discrepancy(&ma, &ma).unwrap().value, 0.0);
    }
}
