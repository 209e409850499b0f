mod common;

use common::*;
use latmoment::bounds::{moment_bounds, second_moment_bounds, HeightHypothesis, MomentOptions};
use latmoment::moments::{
    main_term, poisson_moment, poisson_moment_exact, poisson_moment_series, stirling2, two_ball_intersection,
    MomentQuery,
};
use latmoment::oracle::mc_potato_slice;
use latmoment::NumberField;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn touchard_matches_series(n in 0usize..=8, x in 0.0f64..=10.0) {
        let a = poisson_moment(n, x).unwrap();
        let b = poisson_moment_series(n, x);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "n={} x={}: {} vs {}", n, x, a, b);
    }

    #[test]
    fn exact_and_float_moments_agree(n in 0usize..=10, p in 0i64..=40, q in 1i64..=8) {
        let lam = BigRational::new(BigInt::from(p), BigInt::from(q));
        let exact = poisson_moment_exact(n, &lam).unwrap();
        let fl = poisson_moment(n, p as f64 / q as f64).unwrap();
        let e: f64 = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        prop_assert!((e - fl).abs() <= 1e-12 * e.max(1.0));
    }

    #[test]
    fn stirling_recurrence(n in 1usize..=25, m in 1usize..=25) {
        prop_assume!(m <= n);
        let s = |n: usize, m: usize| if m > n { BigInt::from(0) } else { stirling2(n, m).unwrap() };
        let rhs = BigInt::from(m) * s(n - 1, m) + s(n - 1, m - 1);
        let lhs = s(n, m);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn two_ball_is_monotone() {
    for n in 2..=24 {
        let mut prev = 1.0;
        for i in 0..=40 {
            let delta = 0.05 * i as f64;
            let v = two_ball_intersection(n, delta).unwrap();
            assert!(v <= prev + 1e-12, "N={n}, δ={delta}");
            prev = v;
            if i > 0 && i < 40 {
                assert!(two_ball_intersection(n + 1, delta).unwrap() <= v + 1e-12);
            }
        }
    }
}

#[test]
fn reports_have_main_term_as_lower_bound() {
    let hyp = HeightHypothesis::cyclotomic_defaults();
    let q = NumberField::rational();
    for v in [0.5, 1.0, 3.0] {
        let r = second_moment_bounds(&q, &hyp, 30, v, 4.0).unwrap();
        assert_eq!(r.lower, main_term(&MomentQuery::new(&q, 30, 2, v).unwrap()));
        for n in [1, 2, 3] {
            let query = MomentQuery::new(&q, 400, n, v).unwrap();
            let r = moment_bounds(&query, &hyp, &MomentOptions::default()).unwrap();
            assert_eq!(r.lower, main_term(&query));
            assert!(r.upper >= r.lower);
        }
    }
}

/// ∫f(x)f(y)f(α₁x + α₂y + z) is largest at z = 0 (f the indicator of B).
#[test]
fn potato_slice_shift_never_helps() {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let fs = fields();
    for case in 0..30u64 {
        let f = &fs[rng.random_range(0..fs.len())];
        let d = f.degree();
        let t = rng.random_range(1..=(8 / d).max(1));
        let dim = t * d;
        let rnd = |rng: &mut ChaCha8Rng| {
            let c: Vec<(i64, i64)> = (0..d).map(|_| (rng.random_range(-2..=2), rng.random_range(1..=2))).collect();
            element(f, &c)
        };
        let (a1, a2) = (rnd(&mut rng), rnd(&mut rng));
        if a1.is_zero() || a2.is_zero() {
            continue;
        }
        let scale: f64 = rng.random_range(0.1..1.5);
        let z: Vec<f64> = (0..dim).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let zero = vec![0.0; dim];
        let base = mc_potato_slice(f, t, &a1, &a2, &zero, 40_000, case).unwrap();
        let shifted = mc_potato_slice(f, t, &a1, &a2, &z, 40_000, 1000 + case).unwrap();
        assert!(shifted.mean <= base.mean + 3.0 * base.combined_sigma(&shifted), "{f}, t={t}: {shifted:?} vs {base:?}");
    }
}
