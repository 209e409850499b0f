use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latmoment::arith::int;
use latmoment::bounds::{ellipsoid_intersection_bound, volume_ratio_height_bound, zeta_interval, HeightHypothesis};
use latmoment::heights::weil_height;
use latmoment::moments::{poisson_moment, poisson_moment_exact, rogers_error, two_ball_intersection};
use latmoment::oracle::{
    dirichlet_intersection, mahler_sequence, mc_intersection_ratio, mc_two_ball, random_lattice_moments,
    truncated_second_moment_rhs, unit_enumeration_check, VerificationRecord, DIRICHLET_ABS_ERR,
};
use latmoment::{FieldElement, NumberField};

use crate::config::bad;

const MC_SAMPLES: usize = 20_000;

pub fn run_suite(suite: &str, seed: u64) -> anyhow::Result<Vec<VerificationRecord>> {
    if suite != "core" {
        return Err(bad(format!("unknown suite `{suite}` (available: core)")));
    }
    let mut out = Vec::new();
    out.extend(poisson_identities()?);
    out.extend(height_floor()?);
    out.extend(mahler_limit()?);
    out.extend(zeta_basel()?);
    out.extend(volume_bounds(seed)?);
    out.extend(two_ball(seed)?);
    out.extend(truncated_rhs()?);
    out.extend(unit_counts()?);
    out.extend(rogers_sandwich(seed)?);
    out.sort_by(|a, b| (&a.check, &a.params).cmp(&(&b.check, &b.params)));
    Ok(out)
}

fn p(k: &str, v: impl ToString) -> (&str, String) {
    (k, v.to_string())
}

fn poisson_identities() -> anyhow::Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    for (n, want) in [(2usize, 2i64), (3, 5), (4, 15), (5, 52)] {
        let got = poisson_moment_exact(n, &int(1))?;
        out.push(VerificationRecord::new(
            "poisson-bell",
            &[p("n", n), p("lambda", 1)],
            poisson_moment(n, 1.0)?,
            0.0,
            want as f64,
            got == int(want),
        ));
    }
    Ok(out)
}

fn height_floor() -> anyhow::Result<Vec<VerificationRecord>> {
    let f = NumberField::quadratic(5)?;
    let h = weil_height(&f, &f.generator())?;
    let floor = 0.5 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
    Ok(vec![VerificationRecord::new(
        "golden-ratio-height",
        &[p("field", &f)],
        h,
        0.0,
        floor,
        (h - floor).abs() <= 1e-12 && (h - 0.2406).abs() <= 5e-5,
    )])
}

fn mahler_limit() -> anyhow::Result<Vec<VerificationRecord>> {
    let seq = mahler_sequence(40)?;
    let m = seq.last().map(|e| e.mahler).unwrap_or(f64::NAN);
    Ok(vec![VerificationRecord::new("mahler-x^n-x+1", &[p("n", 40)], m, 0.0, 1.3815, (m - 1.3815).abs() <= 0.01)])
}

fn zeta_basel() -> anyhow::Result<Vec<VerificationRecord>> {
    let z = zeta_interval(&NumberField::rational(), 2.0)?;
    let exact = PI * PI / 6.0;
    Ok(vec![VerificationRecord::new(
        "zeta-contains",
        &[p("field", "Q"), p("s", 2)],
        0.5 * (z.lo + z.hi),
        0.5 * z.width(),
        exact,
        z.contains(exact),
    )])
}

fn random_element(f: &NumberField, rng: &mut ChaCha8Rng) -> FieldElement {
    loop {
        let c: Vec<i64> = (0..f.degree()).map(|_| rng.random_range(-3..=3)).collect();
        let x = f.element_from_ints(&c);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Analytic volume-ratio bounds against Monte Carlo and cubature.
fn volume_bounds(seed: u64) -> anyhow::Result<Vec<VerificationRecord>> {
    let fields =
        [NumberField::rational(), NumberField::cyclotomic(4)?, NumberField::quadratic(5)?, NumberField::cyclotomic(5)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (i, f) in fields.iter().enumerate() {
        let t = 2;
        let alpha = random_element(f, &mut rng);
        let alphas = [alpha.clone()];
        let mc = mc_intersection_ratio(f, t, &alphas, MC_SAMPLES, seed.wrapping_add(i as u64))?;
        let cub = dirichlet_intersection(f, t, &alpha)?;
        let params = [p("field", f), p("t", t), p("alpha", &alpha), p("samples", MC_SAMPLES)];
        let ell = ellipsoid_intersection_bound(f, t, &alphas, None)?;
        let (hb, _) = volume_ratio_height_bound(f, t, &alphas, 2.0)?;
        for (name, b) in [("ellipsoid-bound", ell), ("height-ratio-bound", hb)] {
            out.push(VerificationRecord::new(
                name,
                &params,
                mc.mean,
                mc.std_error,
                b,
                b >= mc.mean - 3.0 * mc.std_error,
            ));
            out.push(VerificationRecord::new(
                &format!("{name}-cubature"),
                &params[..3],
                cub,
                DIRICHLET_ABS_ERR,
                b,
                b >= cub - DIRICHLET_ABS_ERR,
            ));
        }
        // binomial σ floor keeps an all-miss sample from claiming zero error
        let floor = (cub * (1.0 - cub) / MC_SAMPLES as f64).sqrt();
        let sigma = mc.std_error.max(floor);
        out.push(VerificationRecord::new(
            "cubature-vs-mc",
            &params,
            mc.mean,
            sigma,
            cub,
            (mc.mean - cub).abs() <= 4.0 * sigma + DIRICHLET_ABS_ERR,
        ));
    }
    Ok(out)
}

fn two_ball(seed: u64) -> anyhow::Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    for (i, n) in [3usize, 8].into_iter().enumerate() {
        let delta = 0.6;
        let e = mc_two_ball(n, delta, 100_000, seed.wrapping_add(10 + i as u64))?;
        let exact = two_ball_intersection(n, delta)?;
        out.push(VerificationRecord::new(
            "two-ball",
            &[p("dim", n), p("delta", delta), p("samples", 100_000)],
            e.mean,
            e.std_error,
            exact,
            (e.mean - exact).abs() <= 4.0 * e.std_error,
        ));
    }
    Ok(out)
}

fn truncated_rhs() -> anyhow::Result<Vec<VerificationRecord>> {
    let hyp = HeightHypothesis::cyclotomic_defaults();
    let mut out = Vec::new();
    for f in [NumberField::rational(), NumberField::cyclotomic(4)?] {
        let r = truncated_second_moment_rhs(&f, &hyp, 6, 20)?;
        out.push(VerificationRecord::new(
            "truncated-m1-sum",
            &[p("field", &f), p("t", 6), p("cutoff", 20)],
            r.partial_sum,
            0.0,
            r.upper,
            r.verdict && r.monotone,
        ));
    }
    Ok(out)
}

fn unit_counts() -> anyhow::Result<Vec<VerificationRecord>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let f = NumberField::quadratic(d)?;
        let h = weil_height(&f, &f.fundamental_unit()?)?;
        for j in [1.0, 2.5, 4.0] {
            let r = unit_enumeration_check(&f, j * h)?;
            out.push(VerificationRecord::new(
                "unit-count",
                &[p("field", &f), p("b_over_h", j)],
                r.count as f64,
                0.0,
                r.bound,
                r.holds,
            ));
        }
    }
    Ok(out)
}

fn rogers_sandwich(seed: u64) -> anyhow::Result<Vec<VerificationRecord>> {
    let (t, prime, samples, v) = (12usize, 1009u64, 400usize, 1.0);
    let r = random_lattice_moments(t, 2, v, prime, samples, seed.wrapping_add(20))?;
    let mut out = Vec::new();
    for (j, e) in r.moments.iter().enumerate() {
        let k = j + 1;
        let main = 2f64.powi(k as i32) * poisson_moment(k, v / 2.0)?;
        let hi = main + rogers_error(k, t) * (v + 1.0).powi(k as i32 - 1);
        out.push(VerificationRecord::new(
            "rogers-sandwich",
            &[p("k", k), p("t", t), p("p", prime), p("v", v), p("samples", samples)],
            e.mean,
            e.std_error,
            hi,
            e.mean >= main - 3.0 * e.std_error && e.mean <= hi + 3.0 * e.std_error,
        ));
    }
    Ok(out)
}
