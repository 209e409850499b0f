//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.
//! Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latmoment::bounds::{
    cyclotomic_zeta_majorant, dedekind_zeta, direct_ideal_sum, ellipsoid_intersection_bound, grtoproj_bound,
    intro_cyclo_check, matrix_convex_bound, optimal_k, t0_ideal_sum, tower_rank_ratio, unit_count_bound,
    volume_ratio_height_bound, zeta_interval, HeightHypothesis,
};
use latmoment::heights::{
    det_lattice, frak_d, gr_height, h_infty, height_gap_rhs, m_invariant, plucker, proj_height_l2, weil_height,
    ProjPoint, RredMatrix,
};
use latmoment::moments::{
    poisson_moment, poisson_moment_exact, poisson_moment_series, rogers_error, two_ball_intersection,
    volume_ratio_exact,
};
use latmoment::oracle::{
    dirichlet_intersection, mahler_sequence, mc_intersection_ratio, mc_matrix_ratio, mc_two_ball,
    random_lattice_moments, truncated_second_moment_rhs, unit_enumeration_check, DIRICHLET_ABS_ERR,
};
use latmoment::{FieldElement, NumberField};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: latmoment::Error) -> String {
    e.to_string()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn c1_poisson() -> Check {
    for lam in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        let l2 = &lam * &lam;
        let l3 = &l2 * &lam;
        ensure(poisson_moment_exact(2, &lam).map_err(e2s)? == &l2 + &lam, || format!("m_2({lam})"))?;
        let want3 = &l3 + BigRational::from_integer(3.into()) * &l2 + &lam;
        ensure(poisson_moment_exact(3, &lam).map_err(e2s)? == want3, || format!("m_3({lam})"))?;
    }
    let mut worst: f64 = 0.0;
    for n in 0..=8 {
        for lam in [0.5, 1.0, 2.0] {
            let a = poisson_moment(n, lam).map_err(e2s)?;
            let b = poisson_moment_series(n, lam);
            worst = worst.max((a - b).abs() / a.max(1.0));
        }
    }
    ensure(worst <= 1e-10, || format!("Touchard vs series {worst:e}"))?;
    Ok(format!("exact m_2, m_3 at λ = ½, 1, 2; worst series gap {worst:.1e}"))
}

fn c2_heights() -> Check {
    let fields = [
        NumberField::rational(),
        NumberField::cyclotomic(4).unwrap(),
        NumberField::quadratic(5).unwrap(),
        NumberField::cyclotomic(5).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for (fi, f) in fields.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + fi as u64);
        for _ in 0..200 {
            let m = rng.random_range(1..=3);
            let n = rng.random_range(m..=5);
            let r = RredMatrix::random(f, m, n, &mut rng);
            let d = frak_d(&r).map_err(e2s)?;
            let norm = plucker(&r).map_err(e2s)?.ideal_norm();
            ensure(norm.recip() == BigRational::from_integer(d.clone()), || {
                format!("{f}: 𝔇 = {d} but N(⟨p⟩)^(-1) = {}", norm.recip())
            })?;
            let gr = gr_height(&r).map_err(e2s)?;
            let dl = det_lattice(&r).map_err(e2s)?;
            let dd: f64 = d.to_string().parse().unwrap();
            let rel = (gr - dl * dd).abs() / gr;
            worst = worst.max(rel);
            ensure(rel <= 1e-9, || format!("{f}: H = {gr}, det·𝔇 = {}", dl * dd))?;
            total += 1;
        }
    }
    Ok(format!("{total} matrices, worst relative gap {worst:.1e}"))
}

fn c3_t0_table() -> Check {
    let ratio = tower_rank_ratio((3..=100).filter(|n| n % 4 != 2)).map_err(e2s)?;
    let mut cells = Vec::new();
    for ((m, k), cap) in
        [(1, 26.0), (2, 48.0), (3, 70.0), (4, 92.0), (5, 115.0)].into_iter().zip([27.0, 97.0, 213.0, 372.0, 576.0])
    {
        let t0 = t0_ideal_sum(ratio, m, k, 0.24).map_err(e2s)?;
        let limit = t0_ideal_sum(1.0, m, k, 0.24).map_err(e2s)?;
        ensure(t0 < cap, || format!("M={m}: t0 = {t0} ≥ {cap}"))?;
        cells.push(format!("M={m}: {t0:.2} (ratio→1: {limit:.2})"));
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for m in 20..=60 {
        let (_, t0) = optimal_k(1.0, m, 0.24, 40 * m).map_err(e2s)?;
        let c = t0 / (m * m) as f64;
        lo = lo.min(c);
        hi = hi.max(c);
    }
    ensure((20.0..=23.0).contains(&lo) && (20.0..=23.0).contains(&hi), || format!("t0/M² in [{lo}, {hi}]"))?;
    Ok(format!("tower ratio {ratio:.5}; {}; t0/M² ∈ [{lo:.3}, {hi:.3}] for M = 20..60", cells.join(", ")))
}

fn c4_intro() -> Check {
    let mut out = Vec::new();
    for n in [3u64, 4, 5, 8, 12] {
        let f = NumberField::cyclotomic(n).unwrap();
        let c = intro_cyclo_check(&f, 27.0).map_err(e2s)?;
        ensure(c.epsilon_floor_400 == 1.0 / 400.0, || format!("n={n}: ε = {}", c.epsilon))?;
        ensure(c.holds, || format!("n={n}: C ∈ {:?} vs cap {:?}", c.c_value, c.cap))?;
        out.push(format!("n={n} (d={}): C ≤ {:.4e} ≤ cap {:.4e}", c.d, c.c_value.hi, c.cap.lo));
    }
    Ok(format!("ε = 1/400; {}", out.join("; ")))
}

fn c5_zeta() -> Check {
    let q = NumberField::rational();
    let zq = dedekind_zeta(&q, 2.0, 10_000).map_err(e2s)?;
    let pi2 = PI * PI / 6.0;
    ensure(zq.contains(pi2), || format!("ζ(2) interval {:?}", zq.interval()))?;
    ensure(zq.width() < 1e-3, || format!("width {}", zq.width()))?;
    let gi = NumberField::cyclotomic(4).unwrap();
    let zi = dedekind_zeta(&gi, 2.0, 10_000).map_err(e2s)?;
    let direct = direct_ideal_sum(&gi, 2.0, 1_000_000).map_err(e2s)?;
    ensure(zi.contains(direct), || format!("ζ_ℚ(i)(2) interval {:?} vs direct {direct}", zi.interval()))?;
    ensure(zi.width() < 1e-3, || format!("width {}", zi.width()))?;
    let mut worst: f64 = 0.0;
    for n in (3..=12u64).filter(|n| n % 4 != 2) {
        let f = NumberField::cyclotomic(n).unwrap();
        let z = zeta_interval(&f, 2.0).map_err(e2s)?;
        let cap = cyclotomic_zeta_majorant(n, 2.0).map_err(e2s)?;
        ensure(z.hi.is_finite() && z.hi <= cap, || format!("n={n}: {z:?} vs {cap}"))?;
        worst = worst.max(z.hi);
    }
    Ok(format!(
        "ζ(2) ∈ [{:.8}, {:.8}], ζ_ℚ(i)(2) ∈ [{:.8}, {:.8}] ∋ {direct:.8}; max ζ_K(2) over n ≤ 12: {worst:.5}",
        zq.value_low, zq.value_high, zi.value_low, zi.value_high
    ))
}

fn random_element(f: &NumberField, rng: &mut ChaCha8Rng) -> FieldElement {
    loop {
        let c = rng.random_range(1i64..=3);
        let coords = (0..f.degree()).map(|_| rat(rng.random_range(-3i64..=3), c)).collect();
        let x = f.element(coords);
        if !x.is_zero() {
            return x;
        }
    }
}

fn c6_soundness() -> Check {
    let fields = [
        NumberField::rational(),
        NumberField::cyclotomic(4).unwrap(),
        NumberField::quadratic(2).unwrap(),
        NumberField::quadratic(5).unwrap(),
        NumberField::quadratic(-2).unwrap(),
        NumberField::cyclotomic(3).unwrap(),
        NumberField::cyclotomic(5).unwrap(),
        NumberField::cyclotomic(8).unwrap(),
    ];
    let samples = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checks = 0;
    let mut min_margin = f64::INFINITY;
    for case in 0..100u64 {
        let f = &fields[rng.random_range(0..fields.len())];
        let d = f.degree();
        let mm = rng.random_range(1..=2usize);
        let t_max = (32 / (mm * d)).min(8);
        let t = rng.random_range(2..=t_max.max(2));
        let alphas: Vec<FieldElement> = (0..mm).map(|_| random_element(f, &mut rng)).collect();
        let seed = 100 + case;
        let label =
            || format!("case {case}: {f}, t={t}, α={:?}", alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>());

        let mc = mc_intersection_ratio(f, t, &alphas, samples, seed).map_err(e2s)?;
        let mut est = vec![(mc.mean, mc.std_error, 0.0)];
        if mm == 1 {
            est.push((dirichlet_intersection(f, t, &alphas[0]).map_err(e2s)?, 0.0, DIRICHLET_ABS_ERR));
        }
        let ell = ellipsoid_intersection_bound(f, t, &alphas, None).map_err(e2s)?;
        let mut bounds = vec![("ellipsoid", ell)];
        for k in [2.0, 4.0] {
            bounds.push(("height-ratio", volume_ratio_height_bound(f, t, &alphas, k).map_err(e2s)?.0));
        }
        for &(name, b) in &bounds {
            for &(e, s, tol) in &est {
                checks += 1;
                min_margin = min_margin.min(b - (e - 3.0 * s - tol));
                ensure(b >= e - 3.0 * s - tol, || format!("{}: {name} bound {b} < {e} − 3·{s} − {tol}", label()))?;
            }
        }

        // D = (Id_M | α): the column bound and the convex minor bound
        if mm * t * d <= 32 {
            let rows: Vec<Vec<FieldElement>> = (0..mm)
                .map(|i| {
                    let mut r: Vec<FieldElement> = (0..mm).map(|j| if i == j { f.one() } else { f.zero() }).collect();
                    r.push(alphas[i].clone());
                    r
                })
                .collect();
            let p = mc_matrix_ratio(f, t, &rows, samples, seed + 1000).map_err(e2s)?;
            let g = grtoproj_bound(f, t, &alphas).map_err(e2s)?;
            let conv = matrix_convex_bound(f, t, &rows, None).map_err(e2s)? * volume_ratio_exact(mm, t * d);
            for (name, b) in [("column", g), ("convex-minor", conv)] {
                checks += 1;
                min_margin = min_margin.min(b - (p.mean - 3.0 * p.std_error));
                ensure(b >= p.mean - 3.0 * p.std_error, || {
                    format!("{}: {name} bound {b} < {} − 3·{}", label(), p.mean, p.std_error)
                })?;
            }
        }
    }
    Ok(format!("100 cases, {checks} bound/oracle comparisons, smallest margin {min_margin:.3e}"))
}

fn c7_rogers() -> Check {
    let mut out = Vec::new();
    for (v, seed) in [(1.0, 71u64), (4.0, 74)] {
        let r = random_lattice_moments(12, 2, v, 1009, 2000, seed).map_err(e2s)?;
        for k in 1..=2usize {
            let e = r.moments[k - 1];
            let main = 2f64.powi(k as i32) * poisson_moment(k, v / 2.0).map_err(e2s)?;
            let lo = main - 3.0 * e.std_error;
            let hi = main + rogers_error(k, 12) * (v + 1.0).powi(k as i32 - 1) + 3.0 * e.std_error;
            ensure(e.mean >= lo && e.mean <= hi, || format!("V={v}, k={k}: {} ∉ [{lo}, {hi}]", e.mean))?;
            out.push(format!("V={v} k={k}: {:.4}±{:.4} in [{lo:.4}, {hi:.4}]", e.mean, e.std_error));
        }
    }
    Ok(format!("E_2,12 = {:.7}; {}", rogers_error(2, 12), out.join("; ")))
}

fn c8_truncated() -> Check {
    let hyp = HeightHypothesis::cyclotomic_defaults();
    let mut out = Vec::new();
    for f in [NumberField::rational(), NumberField::cyclotomic(4).unwrap()] {
        let r = truncated_second_moment_rhs(&f, &hyp, 6, 50).map_err(e2s)?;
        ensure(r.monotone, || format!("{f}: partial sums not monotone"))?;
        ensure(r.verdict, || format!("{f}: partial {} vs [{}, {}]", r.partial_sum, r.omega, r.upper))?;
        out.push(format!("{f}, t=6: {} ≤ {:.6} ≤ {:.6} (k = {})", r.omega, r.partial_sum, r.upper, r.k));
    }
    Ok(out.join("; "))
}

fn c9_witnesses() -> Check {
    let f = NumberField::quadratic(5).unwrap();
    // θ = (1+√5)/2
    let golden = f.generator();
    ensure((f.conjugates(&golden)[0].re - 1.618_033_988_749_895).abs() < 1e-12, || "generator is not φ".into())?;
    let h = weil_height(&f, &golden).map_err(e2s)?;
    ensure((h - 0.2406).abs() <= 5e-5, || format!("h(φ) = {h}"))?;
    let z5 = NumberField::cyclotomic(5).unwrap();
    let z = z5.generator();
    let zinv = z5.inv(&z).map_err(e2s)?;
    let two_cos = z5.add(&z, &zinv);
    let hinf = h_infty(&z5, &[two_cos]).map_err(e2s)?;
    ensure(hinf > 0.0 && hinf <= 0.27132, || format!("h_∞(2cos(2π/5)) = {hinf}"))?;
    let seq = mahler_sequence(60).map_err(e2s)?;
    let m40 = seq.iter().find(|e| e.n == 40).unwrap().mahler;
    let m60 = seq.iter().find(|e| e.n == 60).unwrap().mahler;
    ensure((m40 - 1.3815).abs() <= 0.01, || format!("H_∞(α_40) = {m40}"))?;
    Ok(format!("h(φ) = {h:.6}, h_∞(2cos(2π/5)) = {hinf:.6}, H_∞(α_40) = {m40:.5}, H_∞(α_60) = {m60:.5}"))
}

fn c10_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fields = [
        NumberField::rational(),
        NumberField::cyclotomic(4).unwrap(),
        NumberField::quadratic(2).unwrap(),
        NumberField::quadratic(-5).unwrap(),
        NumberField::cyclotomic(5).unwrap(),
    ];
    let mut points = 0;
    for f in &fields {
        for _ in 0..60 {
            let n = rng.random_range(2..=4);
            let coords: Vec<FieldElement> =
                (0..n).map(|_| if rng.random_bool(0.1) { f.zero() } else { random_element(f, &mut rng) }).collect();
            if coords.iter().all(|c| c.is_zero()) {
                continue;
            }
            let x = ProjPoint::new(f, coords.clone()).map_err(e2s)?;
            let m = m_invariant(&x).map_err(e2s)?;
            let has_zero = coords.iter().any(|c| c.is_zero());
            ensure(has_zero == m.is_zero(), || format!("{f}: M(x) = {m} with zero pattern {has_zero}"))?;
            if m.is_one() {
                let base = coords[0].clone();
                for c in &coords {
                    let u = f.div(c, &base).map_err(e2s)?;
                    ensure(u.is_integral() && f.abs_norm(&u).abs().is_one(), || {
                        format!("{f}: M = 1 but {u} is no unit")
                    })?;
                }
            }
            let gap = height_gap_rhs(&x).map_err(e2s)?;
            let h2 = proj_height_l2(&x).powi(2);
            ensure(h2 >= gap * (1.0 - 1e-12), || format!("{f}: H² = {h2} < {gap}"))?;
            points += 1;
        }
        // unit tuples have M = 1
        if let Ok(eps) = f.fundamental_unit() {
            let x = ProjPoint::new(f, vec![f.one(), eps.clone(), f.neg(&f.mul(&eps, &eps))]).map_err(e2s)?;
            ensure(m_invariant(&x).map_err(e2s)?.is_one(), || format!("{f}: unit tuple M ≠ 1"))?;
        }
    }
    let mut unit_checks = 0;
    for d in [2, 3] {
        let f = NumberField::quadratic(d).unwrap();
        let h = weil_height(&f, &f.fundamental_unit().map_err(e2s)?).map_err(e2s)?;
        for i in 0..=40 {
            let b = 0.1 * i as f64 * h;
            let r = unit_enumeration_check(&f, b).map_err(e2s)?;
            let hyp = HeightHypothesis::new(h, h).map_err(e2s)?;
            let direct = unit_count_bound(&f, &hyp, b, 0.0).map_err(e2s)?;
            ensure(r.holds && direct == r.bound, || format!("ℚ(√{d}), B = {b}: {} units, bound {}", r.count, r.bound))?;
            unit_checks += 1;
        }
    }
    let mut balls = Vec::new();
    for (n, delta, seed) in [(3, 0.7, 31u64), (3, 1.5, 32), (8, 0.4, 81), (8, 1.0, 82)] {
        let e = mc_two_ball(n, delta, 1_000_000, seed).map_err(e2s)?;
        let exact = two_ball_intersection(n, delta).map_err(e2s)?;
        ensure((e.mean - exact).abs() <= 3.0 * e.std_error, || format!("N={n}, δ={delta}: {exact} vs {e:?}"))?;
        balls.push(format!("N={n} δ={delta}: {exact:.5} vs {:.5}±{:.5}", e.mean, e.std_error));
    }
    Ok(format!("{points} projective points, {unit_checks} unit counts; {}", balls.join(", ")))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Check)> = vec![
        ("Poisson identities", Duration::from_secs(1), c1_poisson),
        ("height equivalence", Duration::from_secs(30), c2_heights),
        ("t0 table", Duration::from_secs(1), c3_t0_table),
        ("cyclotomic second-moment constants", Duration::from_secs(10), c4_intro),
        ("zeta backend", Duration::from_secs(60), c5_zeta),
        ("bound soundness sweep", Duration::from_secs(600), c6_soundness),
        ("empirical Rogers sandwich", Duration::from_secs(600), c7_rogers),
        ("truncated m=1 sum", Duration::from_secs(300), c8_truncated),
        ("height floor witnesses", Duration::from_secs(30), c9_witnesses),
        ("property suites", Duration::from_secs(300), c10_properties),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let el = start.elapsed();
        let (ok, detail) = match res {
            Ok(s) if el <= limit => (true, s),
            Ok(s) => (false, format!("{s} [over time limit {limit:?}]")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name} ({:.2}s): {detail}", if ok { "PASS" } else { "FAIL" }, i + 1, el.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
