use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::Value;

use latmoment::bounds::{
    dedekind_zeta, moment_bounds, rank_ratio, second_moment_bounds, t0_ideal_sum, tower_rank_ratio, zeta_interval,
    Interval, MomentOptions, DEFAULT_TRUNCATION,
};
use latmoment::heights::{
    det_lattice, frak_d, gr_height, h_infty, height_gap_rhs, height_zeta_truncated, log_proj_height_l2, m_invariant,
    proj_height_l2, proj_height_linf, weil_height, KMatrix, ProjPoint,
};
use latmoment::moments::{
    poisson_moment, poisson_moment_exact, rogers_error, rogers_threshold, MomentQuery, MomentReport,
};
use latmoment::oracle::random_lattice_moments;
use latmoment::FieldKind;

use crate::config::{bad, parse_elements, RunConfig};
use crate::output::{num, Table, ROUNDING};

pub fn field_info(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let mut t = Table::long("field-info");
    let (r1, r2) = f.signature();
    t.text("field", &f);
    let kind = match f.kind() {
        FieldKind::Rational => "rational",
        FieldKind::Quadratic(_) => "quadratic",
        FieldKind::Cyclotomic(_) => "cyclotomic",
    };
    t.text("kind", kind);
    t.exact("degree", f.degree());
    t.exact("r1", r1);
    t.exact("r2", r2);
    t.exact("abs_discriminant", f.abs_discriminant());
    t.exact("omega", f.omega());
    t.exact("unit_rank", f.unit_rank());
    if let Some(n) = f.conductor() {
        t.exact("conductor", n);
    }
    t.exact("rank_ratio", BigRational::new((2 * f.unit_rank()).into(), f.degree().into()));
    let poly: Vec<String> = f.minimal_polynomial().iter().map(|c| c.to_string()).collect();
    t.text("minimal_polynomial", poly.join(" "));
    t.exact("trace_form_discriminant", f.trace_form_discriminant());
    t.text("torsion_generator", f.torsion_generator());
    if let Ok(eps) = f.fundamental_unit() {
        t.text("fundamental_unit", &eps);
        t.rounded("fundamental_unit_height", weil_height(&f, &eps)?);
    }
    Ok(t)
}

pub fn height(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let x = parse_elements(&f, &cfg.require::<String>("x")?)?;
    let mut t = Table::long("height");
    t.text("field", &f);
    if let [a] = x.as_slice() {
        let h = weil_height(&f, a)?;
        t.text("element", a);
        t.rounded("weil_height", h);
        t.rounded("mahler_measure", (f.degree() as f64 * h).exp());
        t.rounded("h_infty", h_infty(&f, &x)?);
        return Ok(t);
    }
    let p = ProjPoint::new(&f, x)?;
    t.exact("ideal_norm", p.ideal_norm());
    t.exact("m_invariant", m_invariant(&p)?);
    t.rounded("log_height_l2", log_proj_height_l2(&p));
    t.rounded("height_l2", proj_height_l2(&p));
    t.rounded("height_linf", proj_height_linf(&p));
    t.rounded("height_gap_rhs", height_gap_rhs(&p)?);
    Ok(t)
}

pub fn gr_height_cmd(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let spec: String = cfg.require("rows")?;
    let rows = spec.split(';').map(|r| parse_elements(&f, r.trim())).collect::<anyhow::Result<Vec<_>>>()?;
    let d = KMatrix::new(&f, rows)?.rref()?;
    let g = gr_height(&d)?;
    let det = det_lattice(&d)?;
    let frak = frak_d(&d)?;
    let mut t = Table::long("gr-height");
    t.text("field", &f);
    t.exact("m", d.matrix().m());
    t.exact("n", d.matrix().n());
    t.text("pivots", d.pivots().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    t.rounded("gr_height", g);
    t.rounded("det_lattice", det);
    t.exact("frak_d", &frak);
    Ok(t)
}

pub fn poisson(cfg: &RunConfig) -> anyhow::Result<Table> {
    let ns: Vec<usize> = cfg.list("n")?.ok_or_else(|| bad("missing required --n"))?;
    let lambdas = cfg.rational_list("lambda")?.ok_or_else(|| bad("missing required --lambda"))?;
    let mut grid: Vec<(usize, BigRational)> =
        ns.iter().flat_map(|&n| lambdas.iter().map(move |l| (n, l.clone()))).collect();
    grid.sort();
    grid.dedup();
    let mut t = Table::new("poisson", &["n", "lambda", "moment"]);
    for (n, l) in grid {
        let m = poisson_moment_exact(n, &l)?;
        t.push(vec![n.into(), l.to_string().into(), m.to_string().into()]);
    }
    Ok(t)
}

fn report_rows(t: &mut Table, r: &MomentReport) {
    t.text("field", &r.field);
    t.exact("t", r.t);
    t.exact("n", r.n);
    t.rounded("v", r.v);
    t.rounded("main_term", r.main_term);
    t.rounded("lower", r.lower);
    t.rounded("upper", r.upper);
    t.rounded("t0", r.constants.t0);
    t.rounded("epsilon", r.constants.epsilon);
    t.rounded("c", r.constants.c);
    t.rounded("zeta_factor", r.constants.zeta_factor);
    t.rounded("c_s", r.constants.c_s);
    t.text("c_s_unresolved", r.constants.c_s_unresolved);
    for c in &r.components {
        t.rounded(&format!("component:{}", c.label), c.value);
    }
    if let Some(e) = r.envelope {
        t.rounded("envelope", e);
    }
}

pub fn second_moment(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let hyp = cfg.hypothesis()?;
    let r = second_moment_bounds(&f, &hyp, cfg.require("t")?, cfg.require("v")?, cfg.get_or("k", 4.0)?)?;
    let mut t = Table::long("second-moment");
    report_rows(&mut t, &r);
    Ok(t)
}

pub fn moment_bounds_cmd(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let hyp = cfg.hypothesis()?;
    let q = MomentQuery::new(&f, cfg.require("t")?, cfg.require("n")?, cfg.require("v")?)?;
    let opts = MomentOptions { k: cfg.get_or("k", 4.0)?, c_s: cfg.get("c-s")? };
    let r = moment_bounds(&q, &hyp, &opts)?;
    let mut t = Table::long("moment-bounds");
    report_rows(&mut t, &r);
    Ok(t)
}

fn interval_row(t: &mut Table, name: &str, i: Interval) {
    t.approx(name, 0.5 * (i.lo + i.hi), 0.5 * i.width());
}

pub fn zeta(cfg: &RunConfig) -> anyhow::Result<Table> {
    let f = cfg.field()?;
    let s: f64 = cfg.require("s")?;
    let p: u64 = cfg.get_or("trunc-p", DEFAULT_TRUNCATION)?;
    let mut t = Table::long("zeta");
    t.text("field", &f);
    t.rounded("s", s);
    t.exact("truncation_prime", p);
    interval_row(&mut t, "euler_product", dedekind_zeta(&f, s, p)?.interval());
    interval_row(&mut t, "zeta", zeta_interval(&f, s)?);
    // Σ H(x)^{−s} over ℙ^{n−1}(ℚ) with H(x) ≤ T; a lower bound for the full sum
    if let Some(cut) = cfg.get::<f64>("trunc-t")? {
        let n = cfg.get_or("n", 2usize)?;
        let z = height_zeta_truncated(&f, n, s, cut, 0.0)?;
        t.exact("height_zeta_n", n);
        t.rounded("height_zeta_partial", z.partial);
    }
    Ok(t)
}

pub fn t0_table(cfg: &RunConfig) -> anyhow::Result<Table> {
    let ks: Vec<f64> = cfg.list("k")?.ok_or_else(|| bad("missing required --k"))?;
    let c0: f64 = match cfg.get("c0")? {
        Some(c) => c,
        None => cfg.hypothesis()?.c0,
    };
    // default: sup of 2r/d over the cyclotomic fields of conductor ≤ 100
    let ratio = match cfg.get::<f64>("ratio")? {
        Some(r) => r,
        None => match cfg.raw("field") {
            Some(_) => rank_ratio(&cfg.field()?),
            None => tower_rank_ratio((3..=100).filter(|n| n % 4 != 2))?,
        },
    };
    let mut t = Table::new("t0-table", &["m", "k", "c0", "ratio", "ratio_pm", "t0", "t0_pm", "t0_ceil"]);
    for (i, &k) in ks.iter().enumerate() {
        let m = i + 1;
        let t0 = t0_ideal_sum(ratio, m, k, c0)?;
        let pm = t0 * ROUNDING;
        t.push(vec![
            m.into(),
            num(k),
            num(c0),
            num(ratio),
            num(ratio * ROUNDING),
            num(t0),
            num(pm),
            ((t0 + pm).ceil() as i64).into(),
        ]);
    }
    Ok(t)
}

pub fn empirical(cfg: &RunConfig) -> anyhow::Result<Table> {
    let t_dim: usize = cfg.require("t")?;
    let n: usize = cfg.get_or("n", 2)?;
    let p: u64 = cfg.get_or("p", 1009)?;
    let samples: usize = cfg.get_or("samples", 2000)?;
    let seed: u64 = cfg.get_or("seed", 0)?;
    let vs: Vec<f64> = cfg.list("v")?.ok_or_else(|| bad("missing required --v"))?;
    let runs = vs
        .par_iter()
        .enumerate()
        .map(|(i, &v)| random_lattice_moments(t_dim, n, v, p, samples, seed.wrapping_add(i as u64)))
        .collect::<latmoment::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "empirical",
        &[
            "t",
            "p",
            "v",
            "k",
            "mean",
            "std_error",
            "main",
            "main_pm",
            "upper",
            "upper_pm",
            "rogers_applies",
            "in_sandwich",
        ],
    );
    for r in &runs {
        for (j, e) in r.moments.iter().enumerate() {
            let k = j + 1;
            let main = 2f64.powi(k as i32) * poisson_moment(k, r.v / 2.0)?;
            let upper = main + rogers_error(k, t_dim) * (r.v + 1.0).powi(k as i32 - 1);
            let inside = e.mean >= main - 3.0 * e.std_error && e.mean <= upper + 3.0 * e.std_error;
            t.push(vec![
                t_dim.into(),
                p.into(),
                num(r.v),
                k.into(),
                num(e.mean),
                num(e.std_error),
                num(main),
                num(main * ROUNDING),
                num(upper),
                num(upper * ROUNDING),
                Value::Bool(t_dim >= rogers_threshold(k)),
                Value::Bool(inside),
            ]);
        }
    }
    Ok(t)
}
