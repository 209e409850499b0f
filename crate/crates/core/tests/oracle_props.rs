mod common;

use common::*;
use latmoment::oracle::{dirichlet_intersection, mc_intersection_ratio, random_lattice_moments};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let f = latmoment::NumberField::quadratic(2).unwrap();
    let x = f.element_from_ints(&[1, 1]);
    let run = || mc_intersection_ratio(&f, 4, std::slice::from_ref(&x), 30_000, 17).unwrap();
    let a = run();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        assert_eq!(pool.install(run), a);
    }
}

#[test]
fn cubature_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(558);
    let fs = fields();
    let mut done = 0;
    while done < 100 {
        let f = &fs[rng.random_range(0..fs.len())];
        let c: Vec<(i64, i64)> = (0..f.degree()).map(|_| (rng.random_range(-4..=4), rng.random_range(1..=3))).collect();
        let x = element(f, &c);
        if x.is_zero() {
            continue;
        }
        let t = rng.random_range(1..=8);
        let exact = dirichlet_intersection(f, t, &x).unwrap();
        let mc = mc_intersection_ratio(f, t, std::slice::from_ref(&x), 20_000, done).unwrap();
        // with few or no hits the sample σ understates the binomial one
        let sigma = mc.std_error.max((exact * (1.0 - exact) / mc.samples as f64).sqrt());
        assert!((mc.mean - exact).abs() <= 3.0 * sigma + 1e-9, "{f}, t={t}, α={x}: {exact} vs {mc:?}");
        done += 1;
    }
}

#[test]
fn lattice_first_moment_is_siegel() {
    for (i, (p, t, v)) in [101u64, 1009]
        .into_iter()
        .flat_map(|p| [4usize, 8, 12].into_iter().flat_map(move |t| [0.5, 1.0, 4.0].map(|v| (p, t, v))))
        .enumerate()
    {
        let r = random_lattice_moments(t, 1, v, p, 1000, 900 + i as u64).unwrap();
        let e = r.moments[0];
        assert!((e.mean - v).abs() <= 3.0 * e.std_error, "p={p}, t={t}, V={v}: {e:?}");
    }
}
