//! Truncated sums over field elements: the m = 1 term of the integral
//! formula, the Mahler-measure lower bound, and unit enumeration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::dirichlet_intersection;
use crate::bounds::{ideal_sum_bound, unit_count_bound, HeightHypothesis, IdealSumBound};
use crate::error::{precondition, Error, Result};
use crate::heights::weil_height;
use crate::numberfield::{FieldElement, FieldKind, NumberField};

/// Largest cutoff for quadratic fields other than ℚ(i), which go through
/// exact ideal arithmetic per element.
pub const MAX_GENERIC_CUTOFF: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct TruncationReport {
    pub field: String,
    pub t: usize,
    /// Cutoffs 1..=cutoff; α = (a + bθ)/c enters at level max(|a|, |b|, c).
    pub cutoffs: Vec<usize>,
    pub partial_sums: Vec<f64>,
    pub partial_sum: f64,
    pub monotone: bool,
    pub omega: usize,
    /// k used for the ideal-sum bound (the admissible grid value giving the
    /// smallest bound).
    pub k: f64,
    pub relative_error: f64,
    pub upper: f64,
    pub verdict: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// gcd in ℤ[i] by the Euclidean algorithm with rounded quotients.
fn gaussian_gcd(mut a: (i64, i64), mut b: (i64, i64)) -> (i64, i64) {
    while b != (0, 0) {
        let n = (b.0 * b.0 + b.1 * b.1) as f64;
        // a / b = a·conj(b)/N(b)
        let re = (a.0 * b.0 + a.1 * b.1) as f64 / n;
        let im = (a.1 * b.0 - a.0 * b.1) as f64 / n;
        let q = (re.round() as i64, im.round() as i64);
        let r = (a.0 - (q.0 * b.0 - q.1 * b.1), a.1 - (q.0 * b.1 + q.1 * b.0));
        a = b;
        b = r;
    }
    a
}

/// Per-level sums of D(α)^{−t}·vol(B ∩ α^{−1}B)/vol(B), levels 1..=cutoff.
fn level_sums(field: &NumberField, t: usize, cutoff: usize) -> Result<Vec<f64>> {
    let l = cutoff as i64;
    let tf = t as i32;
    let per_c: Vec<Result<Vec<f64>>> = (1..=l)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; cutoff + 1];
            match field.kind() {
                FieldKind::Rational => {
                    for a in (-l..=l).filter(|&a| a != 0 && gcd(a, c) == 1) {
                        let lvl = a.abs().max(c) as usize;
                        acc[lvl] += (a.abs().max(c) as f64).powi(-tf);
                    }
                }
                FieldKind::Cyclotomic(4) | FieldKind::Quadratic(-1) => {
                    for a in -l..=l {
                        for b in -l..=l {
                            if (a, b) == (0, 0) || gcd(gcd(a, b), c) != 1 {
                                continue;
                            }
                            let g = gaussian_gcd((c, 0), (a, b));
                            let den = (c * c) as f64 / (g.0 * g.0 + g.1 * g.1) as f64;
                            let abs2 = (a * a + b * b) as f64 / (c * c) as f64;
                            let ratio = (1.0f64).min(1.0 / abs2).powi(tf);
                            let lvl = a.abs().max(b.abs()).max(c) as usize;
                            acc[lvl] += den.powi(-tf) * ratio;
                        }
                    }
                }
                _ => {
                    let cb = BigInt::from(c);
                    for a in -l..=l {
                        for b in -l..=l {
                            if (a, b) == (0, 0) || gcd(gcd(a, b), c) != 1 {
                                continue;
                            }
                            let x = field.element(vec![
                                BigRational::new(BigInt::from(a), cb.clone()),
                                BigRational::new(BigInt::from(b), cb.clone()),
                            ]);
                            let den = field.denominator_norm(std::slice::from_ref(&x))?;
                            let den = den.to_f64().unwrap_or(f64::INFINITY);
                            let lvl = a.abs().max(b.abs()).max(c) as usize;
                            acc[lvl] += den.powi(-tf) * dirichlet_intersection(field, t, &x)?;
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; cutoff + 1];
    for v in per_c {
        for (s, x) in total.iter_mut().zip(v?) {
            *s += x;
        }
    }
    Ok(total)
}

/// Smallest ideal-sum bound (M = 1) over a grid of admissible k.
fn best_ideal_bound(field: &NumberField, hyp: &HeightHypothesis, t: f64) -> Result<(f64, IdealSumBound)> {
    let mut best: Option<(f64, IdealSumBound)> = None;
    let mut last_err = None;
    for i in 8..=40 {
        let k = 0.25 * i as f64;
        match ideal_sum_bound(field, hyp, t, 1, k) {
            Ok(b) => {
                if best.as_ref().is_none_or(|(_, x)| b.upper() < x.upper()) {
                    best = Some((k, b));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Internal("no k tried".into())))
}

/// Σ D(α)^{−t}·vol(B ∩ α^{−1}B)/vol(B) over α ∈ K^× written as (a + bθ)/c in
/// lowest terms with |a|, |b|, c ≤ cutoff (just a/c over ℚ), compared with
/// ω_K and with ω_K(1 + relative error of the M = 1 ideal-sum bound).
pub fn truncated_second_moment_rhs(
    field: &NumberField,
    hyp: &HeightHypothesis,
    t: usize,
    cutoff: usize,
) -> Result<TruncationReport> {
    if t * field.degree() < 3 {
        return Err(precondition("need t·d ≥ 3"));
    }
    if cutoff < 1 {
        return Err(precondition("need cutoff ≥ 1"));
    }
    match field.kind() {
        FieldKind::Rational | FieldKind::Cyclotomic(4) | FieldKind::Quadratic(-1) => {}
        FieldKind::Quadratic(_) if cutoff <= MAX_GENERIC_CUTOFF => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "truncated sums run over ℚ, ℚ(i), and other quadratic fields up to cutoff {MAX_GENERIC_CUTOFF}"
            )))
        }
    }
    let (k, bound) = best_ideal_bound(field, hyp, t as f64)?;
    let levels = level_sums(field, t, cutoff)?;
    let mut partial_sums = Vec::with_capacity(cutoff);
    let mut s = 0.0;
    for x in &levels[1..] {
        s += x;
        partial_sums.push(s);
    }
    let monotone = partial_sums.windows(2).all(|w| w[1] >= w[0]);
    let omega = field.omega();
    let rel = bound.relative_error().hi;
    let upper = omega as f64 * (1.0 + rel);
    let verdict = monotone && partial_sums.iter().all(|&p| p >= omega as f64 && p <= upper);
    Ok(TruncationReport {
        field: field.to_string(),
        t,
        cutoffs: (1..=cutoff).collect(),
        partial_sum: s,
        partial_sums,
        monotone,
        omega,
        k,
        relative_error: rel,
        upper,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundCheck {
    pub t: usize,
    pub terms: usize,
    /// Σ H_W(α)^{−t}
    pub mahler_sum: f64,
    /// Σ D(α)^{−t}·vol(B ∩ α^{−1}B)/vol(B)
    pub volume_sum: f64,
    pub termwise: bool,
    pub holds: bool,
}

/// Slack for cubature error when the two sides coincide (|σα| ≥ 1 at every
/// place, where the intersection is exactly α^{−1}B).
const TERM_REL_TOL: f64 = 1e-7;
const TERM_ABS_TOL: f64 = 1e-12;

/// Compares Σ H_W(α)^{−t} with Σ D(α)^{−t}·vol(B ∩ α^{−1}B)/vol(B) over the
/// same elements, where H_W(α) = e^{d·h(α)}; each term on the left is at
/// most the matching term on the right.
pub fn lower_bound_sum_check(field: &NumberField, t: usize, elements: &[FieldElement]) -> Result<LowerBoundCheck> {
    let d = field.degree() as f64;
    let terms: Vec<(f64, f64)> = elements
        .par_iter()
        .map(|a| {
            let lhs = (-(t as f64) * d * weil_height(field, a)?).exp();
            let den = field.denominator_norm(std::slice::from_ref(a))?.to_f64().unwrap_or(f64::INFINITY);
            let rhs = den.powi(-(t as i32)) * dirichlet_intersection(field, t, a)?;
            Ok((lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let termwise = terms.iter().all(|&(l, r)| r >= l * (1.0 - TERM_REL_TOL) - TERM_ABS_TOL);
    let mahler_sum: f64 = terms.iter().map(|x| x.0).sum();
    let volume_sum: f64 = terms.iter().map(|x| x.1).sum();
    Ok(LowerBoundCheck {
        t,
        terms: terms.len(),
        mahler_sum,
        volume_sum,
        termwise,
        holds: termwise && volume_sum >= mahler_sum * (1.0 - TERM_REL_TOL) - TERM_ABS_TOL * terms.len() as f64,
    })
}

/// Nonzero integral elements with all power-basis coordinates in [−cutoff, cutoff].
pub fn integral_box(field: &NumberField, cutoff: i64) -> Vec<FieldElement> {
    let d = field.degree();
    let side = (2 * cutoff + 1) as usize;
    (0..side.pow(d as u32))
        .map(|mut idx| {
            let coords: Vec<i64> = (0..d)
                .map(|_| {
                    let c = (idx % side) as i64 - cutoff;
                    idx /= side;
                    c
                })
                .collect();
            field.element_from_ints(&coords)
        })
        .filter(|x| !x.is_zero())
        .collect()
}

/// ±ε^k for |k| ≤ k_max, ε the fundamental unit of a real quadratic field.
pub fn unit_powers(field: &NumberField, k_max: i64) -> Result<Vec<FieldElement>> {
    let eps = field.fundamental_unit()?;
    let mut out = Vec::new();
    for k in -k_max..=k_max {
        let u = field.pow(&eps, k)?;
        out.push(field.neg(&u));
        out.push(u);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitEnumeration {
    pub b: f64,
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
}

/// Counts the units ±ε^k with h ≤ B and compares with the unit-count bound
/// for the hypothesis c0 = c1 = h(ε), Y = 0.
pub fn unit_enumeration_check(field: &NumberField, b: f64) -> Result<UnitEnumeration> {
    if !matches!(field.kind(), FieldKind::Quadratic(d) if d > 1) {
        return Err(Error::Unsupported(format!("{field} is not real quadratic")));
    }
    if !(b >= 0.0) {
        return Err(precondition("need B ≥ 0"));
    }
    let eps = field.fundamental_unit()?;
    let h = weil_height(field, &eps)?;
    let lim = b * (1.0 + 1e-9);
    let mut count = 2;
    let mut k = 1;
    loop {
        let u = field.pow(&eps, k)?;
        if weil_height(field, &u)? > lim {
            break;
        }
        // ±ε^k and ±ε^{−k}
        count += 4;
        k += 1;
    }
    let hyp = HeightHypothesis::new(h, h)?;
    let bound = unit_count_bound(field, &hyp, b, 0.0)?;
    Ok(UnitEnumeration { b, count, bound, holds: count as f64 <= bound * (1.0 + 1e-9) })
}
