//! Thresholds t₀, exponents ε, constants C and zeta factors of the unit-sum,
//! ideal-sum and moment bounds.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::zeta::{zeta_interval, Interval};
use super::{alpha_m, f_m, rank_ratio, BoundInputs, BoundReport, HeightHypothesis, Provenance};
use crate::error::{precondition, Error, Result};
use crate::moments::{main_term, stirling2, Component, MomentQuery, MomentReport, ReportConstants};
use crate::numberfield::{big_log, big_log_rational, FieldElement, FieldKind, NumberField};

fn check_k(k: f64) -> Result<()> {
    if !(k >= 2.0 && k.is_finite()) {
        return Err(precondition(format!("need k ≥ 2, got {k}")));
    }
    Ok(())
}

/// Unit-sum threshold (2r_K M/d)·log(2 + 1/(2k)) / log f_M(c0(1 − 1/k)),
/// with `ratio` = 2r_K/d (or its supremum over a family of fields).
pub fn t0_unit_sum(ratio: f64, m: usize, k: f64, c0: f64) -> Result<f64> {
    check_k(k)?;
    if ratio == 0.0 {
        return Ok(0.0);
    }
    let denom = f_m(m, c0 * (1.0 - 1.0 / k))?.ln();
    Ok(ratio * m as f64 * (2.0 + 0.5 / k).ln() / denom)
}

/// Ideal-sum threshold sup{kM + ½, unit-sum threshold}.
pub fn t0_ideal_sum(ratio: f64, m: usize, k: f64, c0: f64) -> Result<f64> {
    Ok((k * m as f64 + 0.5).max(t0_unit_sum(ratio, m, k, c0)?))
}

/// Integer k in [2, k_max] minimizing the ideal-sum threshold.
pub fn optimal_k(ratio: f64, m: usize, c0: f64, k_max: usize) -> Result<(usize, f64)> {
    let mut best = (2, f64::INFINITY);
    for k in 2..=k_max.max(2) {
        let t0 = t0_ideal_sum(ratio, m, k as f64, c0)?;
        if t0 < best.1 {
            best = (k, t0);
        }
    }
    Ok(best)
}

fn zeta(field: &NumberField, s: f64) -> Result<Interval> {
    if !(s > 1.0) {
        return Err(Error::ZetaDivergent(s));
    }
    zeta_interval(field, s)
}

fn ipow(x: &Interval, e: f64) -> Interval {
    Interval::new(x.lo.powf(e), x.hi.powf(e))
}

fn above(t: f64, t0: f64) -> Result<()> {
    if t > t0 {
        Ok(())
    } else {
        Err(Error::BelowThreshold { t, t0 })
    }
}

/// ε₁, C and t₀ of the unit-sum bound for M-tuples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnitSumConstants {
    pub t0: f64,
    pub alpha_m: f64,
    pub epsilon: f64,
    pub c: f64,
}

pub fn unit_sum_constants(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: f64,
    m: usize,
    k: f64,
) -> Result<UnitSumConstants> {
    let t0 = t0_unit_sum(rank_ratio(field), m, k, hyp.c0)?;
    above(t, t0)?;
    unit_sum_constants_at(field.degree(), hyp, t, t0, m, k)
}

fn unit_sum_constants_at(
    d: usize,
    hyp: &HeightHypothesis,
    t: f64,
    t0: f64,
    m: usize,
    k: f64,
) -> Result<UnitSumConstants> {
    let a = alpha_m(m, hyp.c0)?;
    let epsilon = 0.5 * (hyp.c1 / 8.0).min(f_m(m, 0.75 * hyp.c1)?.ln()).min(a * hyp.c0 * (k - 1.0) / k);
    let q = a * hyp.c0 * d as f64 * (t - t0) * (k - 1.0) / (4.0 * k * k);
    let c = 1.0 + 1.0 / -(-q).exp_m1();
    Ok(UnitSumConstants { t0, alpha_m: a, epsilon, c })
}

/// Bound for Σ_β vol(B ∩ (α_1β_1)^{−1}B ∩ …)/vol(B) over unit tuples β with
/// αβ not all torsion: C·ω^M·N(α)^{−t/(kM)}·D(α)^{t/4}·e^{−ε₁d(t−t₀)}.
pub fn proj_unit_sum_bound(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: f64,
    alphas: &[FieldElement],
    k: f64,
) -> Result<BoundReport> {
    if alphas.is_empty() {
        return Err(precondition("need a nonempty tuple"));
    }
    if alphas.iter().any(|a| a.is_zero()) {
        return Err(Error::ZeroElement);
    }
    let norms: Vec<f64> = alphas.iter().map(|a| big_log_rational(&field.abs_norm(a).abs())).collect();
    if norms.iter().any(|&l| l < 0.0) {
        return Err(precondition("every N(α_i) must be at least 1"));
    }
    let m = alphas.len();
    let c = unit_sum_constants(field, hyp, t, m, k)?;
    let d = field.degree() as f64;
    let log_n: f64 = norms.iter().sum();
    let log_d = big_log(&field.denominator_norm(alphas)?);
    let log = c.c.ln() + m as f64 * (field.omega() as f64).ln() - t / (k * m as f64) * log_n + 0.25 * t * log_d
        - c.epsilon * d * (t - c.t0);
    Ok(BoundReport {
        t0: c.t0,
        epsilon: c.epsilon,
        c: c.c,
        c_unresolved: false,
        zeta_factor: None,
        bound_value: Interval::point(log.exp()),
        inputs: BoundInputs { t, d: field.degree(), n: None, m, k: Some(k) },
    })
}

/// The sum Σ_{α ∈ (K^×)^M} D(α)^{−t}·vol(B ∩ α_1^{−1}B ∩ …)/vol(B) split as
/// main + error: the torsion tuples contribute exactly ω^M.
#[derive(Clone, Debug, Serialize)]
pub struct IdealSumBound {
    pub report: BoundReport,
    /// ω_K^M, the exact contribution of torsion tuples (per unit vol(B)).
    pub main: f64,
    /// ω_K^M·C_M·Z·e^{−ε d(t−t₀)}, an upper bound for everything else.
    pub error: Interval,
}

impl IdealSumBound {
    pub fn upper(&self) -> f64 {
        self.main + self.error.hi
    }

    /// Relative error C_M·Z·e^{−ε d(t−t₀)}.
    pub fn relative_error(&self) -> Interval {
        self.report.bound_value
    }
}

pub fn ideal_sum_bound(field: &NumberField, hyp: &HeightHypothesis, t: f64, m: usize, k: f64) -> Result<IdealSumBound> {
    if m < 1 {
        return Err(precondition("need M ≥ 1"));
    }
    let t0 = t0_ideal_sum(rank_ratio(field), m, k, hyp.c0)?;
    above(t, t0)?;
    let u = unit_sum_constants_at(field.degree(), hyp, t, t0, m, k)?;
    let c_m = (2 * m + 1) as f64 * u.c;
    let mf = m as f64;
    let z = zeta(field, t * (0.75 - 1.0 / k))?.mul(&ipow(&zeta(field, t / (k * mf))?, mf)).div(&zeta(field, 0.75 * t)?);
    let decay = (-u.epsilon * field.degree() as f64 * (t - t0)).exp();
    let rel = z.scale(c_m * decay);
    let main = (field.omega() as f64).powi(m as i32);
    Ok(IdealSumBound {
        report: BoundReport {
            t0,
            epsilon: u.epsilon,
            c: c_m,
            c_unresolved: false,
            zeta_factor: Some(z),
            bound_value: rel,
            inputs: BoundInputs { t, d: field.degree(), n: None, m, k: Some(k) },
        },
        main,
        error: rel.scale(main),
    })
}

/// t₀, ε and C of the second-moment bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecondMomentConstants {
    pub t0: f64,
    pub epsilon: f64,
    pub c: f64,
}

pub fn second_moment_t0(ratio: f64, k: f64, c0: f64) -> Result<f64> {
    check_k(k)?;
    let unit = if ratio == 0.0 { 0.0 } else { ratio * (2.0 + 0.5 / k).ln() / (c0 * (1.0 - 1.0 / k)).cosh().ln() };
    Ok((k + 0.5).max(unit))
}

pub fn second_moment_epsilon(hyp: &HeightHypothesis, k: f64) -> f64 {
    0.5 * (hyp.c1 / 8.0).min((0.75 * hyp.c1).cosh().ln()).min(2.0 * hyp.c0 * (k - 1.0) / (5.0 * k))
}

/// C = 3 + 3/(1 − e^{−c0·d(t−t₀)(k−1)/(10k²)}).
pub fn second_moment_c(c0: f64, d: usize, t: f64, t0: f64, k: f64) -> f64 {
    let q = c0 * d as f64 * (t - t0) * (k - 1.0) / (10.0 * k * k);
    3.0 + 3.0 / -(-q).exp_m1()
}

pub fn second_moment_constants(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: f64,
    k: f64,
) -> Result<SecondMomentConstants> {
    let t0 = second_moment_t0(rank_ratio(field), k, hyp.c0)?;
    above(t, t0)?;
    Ok(SecondMomentConstants {
        t0,
        epsilon: second_moment_epsilon(hyp, k),
        c: second_moment_c(hyp.c0, field.degree(), t, t0, k),
    })
}

/// V² + ω V ≤ E[ρ²] ≤ V² + ω V + ω²·C·Z·e^{−εd(t−t₀)}·V.
pub fn second_moment_bounds(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: usize,
    v: f64,
    k: f64,
) -> Result<MomentReport> {
    let q = MomentQuery::new(field, t, 2, v)?;
    let tf = t as f64;
    let c = second_moment_constants(field, hyp, tf, k)?;
    let z = zeta(field, tf * (0.75 - 1.0 / k))?.mul(&zeta(field, tf / k)?).div(&zeta(field, 0.75 * tf)?);
    let w = field.omega() as f64;
    let lower = v * v + w * v;
    let err = w * w * c.c * z.hi * (-c.epsilon * field.degree() as f64 * (tf - c.t0)).exp() * v;
    Ok(MomentReport {
        field: field.to_string(),
        t,
        n: 2,
        v,
        main_term: main_term(&q),
        lower,
        upper: lower + err,
        components: vec![Component { label: "m=1 non-torsion".into(), value: err }],
        constants: ReportConstants {
            t0: c.t0,
            epsilon: c.epsilon,
            c: c.c,
            zeta_factor: z.hi,
            c_s: 1.0,
            c_s_unresolved: false,
        },
        envelope: Some(err),
    })
}

/// min{64/27, e^{c1/3}, cosh³(c1)}.
pub fn s_constant(c1: f64) -> f64 {
    (64.0f64 / 27.0).min((c1 / 3.0).exp()).min(c1.cosh().powi(3))
}

/// Threshold of the A²_m bound:
/// 2(n−m)·sup{m²+m, r_K(m²+m)/d·log(2+12/c0+2log(n−m)/c0)/log s, (r_K/d)·log 2/log f_{n−m}(3c0/4)}.
pub fn a2m_t0(ratio: f64, hyp: &HeightHypothesis, n: usize, m: usize) -> Result<f64> {
    if m < 2 || m >= n {
        return Err(precondition(format!("need 2 ≤ m < n, got m = {m}, n = {n}")));
    }
    let r = 0.5 * ratio;
    let mm = (m * m + m) as f64;
    let nm = (n - m) as f64;
    let c0 = hyp.c0;
    let second = r * mm * (2.0 + 12.0 / c0 + 2.0 * nm.ln() / c0).ln() / s_constant(hyp.c1).ln();
    let third = r * 2f64.ln() / f_m(n - m, 0.75 * c0)?.ln();
    Ok(2.0 * nm * mm.max(second).max(third))
}

/// ε_S = ½·log min{4/3, e^{c1/(3(m+1))}, f_{n−m}(3c1/4)}.
pub fn a2m_epsilon(hyp: &HeightHypothesis, n: usize, m: usize) -> Result<f64> {
    let v = (4.0f64 / 3.0).min((hyp.c1 / (3.0 * (m + 1) as f64)).exp()).min(f_m(n - m, 0.75 * hyp.c1)?);
    Ok(0.5 * v.ln())
}

/// Z(K,t,n,m) = ζ(t/(2(m+1)) − m(n−m)/e)·ζ(t/(4m(n−m)))^{m(n−m)}/ζ(t−1).
pub fn a2m_zeta(field: &NumberField, t: f64, n: usize, m: usize) -> Result<Interval> {
    let p = (m * (n - m)) as f64;
    let a = zeta(field, t / (2.0 * (m + 1) as f64) - p / std::f64::consts::E)?;
    let b = ipow(&zeta(field, t / (4.0 * p))?, p);
    Ok(a.mul(&b).div(&zeta(field, t - 1.0)?))
}

/// Bound for the normalized A²_m contribution:
/// C_S·ω^{m(n−m)}·(td)^{(m−1)/2}·Z(K,t,n,m)·e^{−ε_S d(t−t₀)}. C_S is not
/// explicit; `c_s` (default 1) stands in for it and the report is flagged.
pub fn a2m_bound(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: f64,
    n: usize,
    m: usize,
    c_s: Option<f64>,
) -> Result<BoundReport> {
    let t0 = a2m_t0(rank_ratio(field), hyp, n, m)?;
    above(t, t0)?;
    let eps = a2m_epsilon(hyp, n, m)?;
    let z = a2m_zeta(field, t, n, m)?;
    let d = field.degree() as f64;
    let p = (m * (n - m)) as i32;
    let cs = c_s.unwrap_or(1.0);
    let factor =
        cs * (field.omega() as f64).powi(p) * (t * d).powf(0.5 * (m as f64 - 1.0)) * (-eps * d * (t - t0)).exp();
    Ok(BoundReport {
        t0,
        epsilon: eps,
        c: cs,
        c_unresolved: c_s.is_none(),
        zeta_factor: Some(z),
        bound_value: z.scale(factor),
        inputs: BoundInputs { t, d: field.degree(), n: Some(n), m, k: None },
    })
}

/// t₀ for cyclotomic towers with the default hypothesis:
/// max{19n(n+1)²·log(52 + (25/3)·log(n−1)), (n−1)·log(17/8)/log f_{n−1}(9/50)}.
pub fn cyclotomic_moment_t0(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(precondition("need n ≥ 2"));
    }
    let nf = n as f64;
    let a = 19.0 * nf * (nf + 1.0).powi(2) * (52.0 + 25.0 / 3.0 * (nf - 1.0).ln()).ln();
    let b = (nf - 1.0) * (17.0f64 / 8.0).ln() / f_m(n - 1, 9.0 / 50.0)?.ln();
    Ok(a.max(b))
}

/// The general moment theorem's threshold:
/// sup{r_K n(n+1)²/d·log(2+12/c0+2log(n−1)/c0)/log s, (2r_K(n−1)/d)·log(17/8)/log f_{n−1}(3c0/4)}.
pub fn moment_theorem_t0(ratio: f64, hyp: &HeightHypothesis, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(precondition("need n ≥ 2"));
    }
    if ratio == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let c0 = hyp.c0;
    let a = 0.5 * ratio * nf * (nf + 1.0).powi(2) * (2.0 + 12.0 / c0 + 2.0 * (nf - 1.0).ln() / c0).ln()
        / s_constant(hyp.c1).ln();
    let b = ratio * (nf - 1.0) * (17.0f64 / 8.0).ln() / f_m(n - 1, 0.75 * c0)?.ln();
    Ok(a.max(b))
}

/// ε = ½·log min{4/3, e^{c1/(3n+2)}, f_{n−1}(3c1/4)}.
pub fn moment_epsilon(hyp: &HeightHypothesis, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(precondition("need n ≥ 2"));
    }
    let v = (4.0f64 / 3.0).min((hyp.c1 / (3 * n + 2) as f64).exp()).min(f_m(n - 1, 0.75 * hyp.c1)?);
    Ok(0.5 * v.ln())
}

#[derive(Clone, Debug)]
pub struct MomentOptions {
    /// k for the second moment (n = 2).
    pub k: f64,
    /// Stand-in for the non-explicit constant C_S; `None` means 1, flagged.
    pub c_s: Option<f64>,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { k: 4.0, c_s: None }
    }
}

/// Threshold used by [`moment_bounds`] for n ≥ 3: the theorem's t₀ (the
/// cyclotomic-tower value for cyclotomic fields under the default
/// hypothesis), raised to every component's own threshold.
pub fn moment_t0(field: &NumberField, hyp: &HeightHypothesis, n: usize) -> Result<f64> {
    let ratio = rank_ratio(field);
    let theorem = match (field.kind(), hyp.provenance) {
        (FieldKind::Cyclotomic(_), Provenance::CyclotomicDefaults) => cyclotomic_moment_t0(n)?,
        _ => moment_theorem_t0(ratio, hyp, n)?,
    };
    let mut t0 = theorem.max(t0_ideal_sum(ratio, n - 1, 4.0, hyp.c0)?);
    for m in 2..n {
        t0 = t0.max(a2m_t0(ratio, hyp, n, m)?);
    }
    Ok(t0)
}

/// Lower and upper bounds for E[ρ(Λ)^n]. The lower bound is the Poisson main
/// term; the upper bound adds the m = 1 ideal-sum error (k = 4), the A¹_m
/// and A²_m contributions for 2 ≤ m ≤ n−1, each itemized.
pub fn moment_bounds(q: &MomentQuery, hyp: &HeightHypothesis, opts: &MomentOptions) -> Result<MomentReport> {
    let field = q.field();
    let n = q.n();
    let v = q.v();
    let main = main_term(q);
    if n == 1 {
        return Ok(MomentReport {
            field: field.to_string(),
            t: q.t(),
            n,
            v,
            main_term: main,
            lower: main,
            upper: main,
            components: Vec::new(),
            constants: ReportConstants {
                t0: 0.0,
                epsilon: 0.0,
                c: 0.0,
                zeta_factor: 1.0,
                c_s: 1.0,
                c_s_unresolved: false,
            },
            envelope: Some(0.0),
        });
    }
    if n == 2 {
        return second_moment_bounds(field, hyp, q.t(), v, opts.k);
    }
    let t = q.t() as f64;
    let t0 = moment_t0(field, hyp, n)?;
    above(t, t0)?;
    let d = field.degree() as f64;
    let w = field.omega() as f64;
    let eps = moment_epsilon(hyp, n)?;
    let mut components = Vec::new();

    let ideal = ideal_sum_bound(field, hyp, t, n - 1, 4.0)?;
    components.push(Component { label: "m=1".into(), value: v * ideal.error.hi });

    let sqrt3_2 = 0.75f64.sqrt();
    let mut z_max: f64 = 0.0;
    for m in 2..n {
        let s = stirling2(n, m)?.to_f64().unwrap_or(f64::INFINITY);
        let a1 = v.powi(m as i32) * s * (1.0 + w).powi(((n - m) * m) as i32) * 2.0 * (t * d * sqrt3_2.ln()).exp();
        components.push(Component { label: format!("A1_{m}"), value: a1 });
        let a2 = a2m_bound(field, hyp, t, n, m, opts.c_s)?;
        components.push(Component { label: format!("A2_{m}"), value: v.powi(m as i32) * a2.bound_value.hi });
        let p = (m * (n - m)) as f64;
        let nn = (n * n) as f64;
        let zm = zeta(field, t / (2.0 * (m + 1) as f64) - p / std::f64::consts::E)?
            .mul(&ipow(&zeta(field, t / nn)?, 0.25 * nn))
            .div(&zeta(field, t - 1.0)?);
        z_max = z_max.max(zm.hi);
    }
    let cs = opts.c_s.unwrap_or(1.0);
    let nf = n as f64;
    let envelope = cs
        * w.powf(0.25 * nf * nf)
        * (t * d).powf(0.5 * (nf - 2.0))
        * (-eps * d * (t - t0)).exp()
        * (v + 1.0).powi(n as i32 - 1)
        * z_max;
    let upper = main + components.iter().map(|c| c.value).sum::<f64>();
    Ok(MomentReport {
        field: field.to_string(),
        t: q.t(),
        n,
        v,
        main_term: main,
        lower: main,
        upper,
        components,
        constants: ReportConstants {
            t0,
            epsilon: eps,
            c: ideal.report.c,
            zeta_factor: z_max,
            c_s: cs,
            c_s_unresolved: opts.c_s.is_none(),
        },
        envelope: Some(envelope),
    })
}

/// t₀ of the explicit cyclotomic second-moment statement.
pub const INTRO_T0: f64 = 26.7;
pub const INTRO_K: f64 = 26.0;

/// The explicit cyclotomic second-moment constants at rank t, checked
/// against C ≤ 5625·ζ_K(37t/52)·ζ_K(t/25).
#[derive(Clone, Debug, Serialize)]
pub struct IntroCycloCheck {
    pub d: usize,
    pub t: f64,
    pub epsilon: f64,
    /// ε rounded down to a multiple of 1/400.
    pub epsilon_floor_400: f64,
    pub prefactor: f64,
    pub zeta_37t_52: Interval,
    pub zeta_t_25: Interval,
    pub c_value: Interval,
    pub cap: Interval,
    pub holds: bool,
}

pub fn intro_cyclo_check(field: &NumberField, t: f64) -> Result<IntroCycloCheck> {
    let hyp = HeightHypothesis::cyclotomic_defaults();
    let epsilon = second_moment_epsilon(&hyp, INTRO_K);
    let prefactor = second_moment_c(hyp.c0, field.degree(), t, INTRO_T0, INTRO_K);
    let za = zeta(field, 37.0 * t / 52.0)?;
    let zb = zeta(field, t / 25.0)?;
    let zz = za.mul(&zb);
    let c_value = zz.scale(prefactor);
    let cap = zz.scale(5625.0);
    Ok(IntroCycloCheck {
        d: field.degree(),
        t,
        epsilon,
        epsilon_floor_400: (400.0 * epsilon).floor() / 400.0,
        prefactor,
        zeta_37t_52: za,
        zeta_t_25: zb,
        c_value,
        cap,
        holds: c_value.hi <= cap.lo,
    })
}
