//! Explicit error bounds: height hypotheses, the f_M family, volume-ratio
//! bounds for ellipsoid intersections, unit counts, the unit- and ideal-sum
//! bounds and the constants (t₀, ε, C, zeta factors) of the moment theorems.

mod theorems;
mod volume;
pub mod zeta;

pub use theorems::*;
pub use volume::*;
pub use zeta::{
    cyclotomic_zeta_majorant, dedekind_zeta, dedekind_zeta_l, direct_ideal_sum, zeta_interval, Interval, ZetaInterval,
    DEFAULT_TRUNCATION,
};

use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::numberfield::NumberField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    CyclotomicDefaults,
    Voutier,
    User,
}

/// Uniform lower bounds for the Weil height: h ≥ c0 on O_K \ (μ_K ∪ {0})
/// and h ≥ c1 on K^× \ μ_K.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightHypothesis {
    pub c0: f64,
    pub c1: f64,
    pub provenance: Provenance,
}

impl HeightHypothesis {
    pub fn new(c0: f64, c1: f64) -> Result<Self> {
        if !(c1 > 0.0 && c0 >= c1 && c0.is_finite()) {
            return Err(precondition(format!("need c0 ≥ c1 > 0, got c0 = {c0}, c1 = {c1}")));
        }
        Ok(HeightHypothesis { c0, c1, provenance: Provenance::User })
    }

    /// c0 = ½·log φ (Schinzel, for integers of CM and totally real fields) and
    /// c1 = log 5 / 12 (Amoroso–Dvornicich, abelian fields). Valid for every
    /// field this crate supports, all of which are abelian.
    pub fn cyclotomic_defaults() -> Self {
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        HeightHypothesis { c0: 0.5 * phi.ln(), c1: 5f64.ln() / 12.0, provenance: Provenance::CyclotomicDefaults }
    }

    /// Voutier's bound h ≥ (1/(4d'))(log log d' / log d')³ for elements of
    /// degree d', minimized over the divisors d' ≥ 3 of d. The bound says
    /// nothing for elements of degree at most 2, so d ≤ 2 is rejected and
    /// for larger d the quadratic subfields are not covered.
    pub fn voutier(d: usize) -> Result<Self> {
        if d <= 2 {
            return Err(Error::Unsupported(format!("Voutier's bound is vacuous in degree {d}")));
        }
        let c = (3..=d)
            .filter(|e| d % e == 0)
            .map(|e| {
                let e = e as f64;
                (e.ln().ln() / e.ln()).powi(3) / (4.0 * e)
            })
            .fold(f64::INFINITY, f64::min);
        Ok(HeightHypothesis { c0: c, c1: c, provenance: Provenance::Voutier })
    }

    pub fn for_field(_field: &NumberField) -> Self {
        Self::cyclotomic_defaults()
    }
}

/// f_M(x) = (e^x + M·e^{−x/M})/(M+1).
pub fn f_m(m: usize, x: f64) -> Result<f64> {
    if m < 1 {
        return Err(precondition("f_M needs M ≥ 1"));
    }
    let mf = m as f64;
    Ok((x.exp() + mf * (-x / mf).exp()) / (mf + 1.0))
}

/// g_M(x) = (x + M·x^{−1/M})/(M+1).
pub fn g_m(m: usize, x: f64) -> Result<f64> {
    if m < 1 {
        return Err(precondition("g_M needs M ≥ 1"));
    }
    let mf = m as f64;
    Ok((x + mf * x.powf(-1.0 / mf)) / (mf + 1.0))
}

fn f_m_unchecked(m: f64, x: f64) -> f64 {
    (x.exp() + m * (-x / m).exp()) / (m + 1.0)
}

fn log_f_m_deriv(m: f64, x: f64) -> f64 {
    (x.exp() - (-x / m).exp()) / (x.exp() + m * (-x / m).exp())
}

const ALPHA_GRID_END: f64 = 50.0;
const ALPHA_GRID_STEP: f64 = 1e-3;

/// Checks f_M(x) ≥ e^{ax} for all x ≥ c0/2.
///
/// On the grid, g(x) = log f_M(x) − ax is convex, so between nodes it stays
/// above the tangent at the left node; past the grid f_M(x) ≥ e^x/(M+1).
pub fn alpha_certificate(m: usize, c0: f64, a: f64) -> bool {
    let mf = m as f64;
    if a > 1.0 - (mf + 1.0).ln() / ALPHA_GRID_END {
        return false;
    }
    let x0 = 0.5 * c0;
    let steps = ((ALPHA_GRID_END - x0) / ALPHA_GRID_STEP).ceil() as usize;
    (0..=steps).all(|i| {
        let x = (x0 + i as f64 * ALPHA_GRID_STEP).min(ALPHA_GRID_END);
        let g = f_m_unchecked(mf, x).ln() - a * x;
        let slope = log_f_m_deriv(mf, x) - a;
        g - ALPHA_GRID_STEP * (-slope).max(0.0) >= 0.0
    })
}

/// Largest a (to 1e-6, certified side) with f_M(x) ≥ e^{ax} on x ≥ c0/2.
pub fn alpha_m(m: usize, c0: f64) -> Result<f64> {
    if m < 1 {
        return Err(precondition("alpha_M needs M ≥ 1"));
    }
    if !(c0 > 0.0) {
        return Err(precondition("alpha_M needs c0 > 0"));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if alpha_certificate(m, c0, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// 2·r_K/d, the field's contribution to the unit-sum thresholds.
pub fn rank_ratio(field: &NumberField) -> f64 {
    2.0 * field.unit_rank() as f64 / field.degree() as f64
}

/// sup of 2·r_K/d over the cyclotomic fields with the given conductors.
pub fn tower_rank_ratio(conductors: impl IntoIterator<Item = u64>) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for n in conductors {
        sup = sup.max(rank_ratio(&NumberField::cyclotomic(n)?));
    }
    Ok(sup)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundInputs {
    pub t: f64,
    pub d: usize,
    pub n: Option<usize>,
    pub m: usize,
    pub k: Option<f64>,
}

/// Constants and value of one explicit bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub t0: f64,
    pub epsilon: f64,
    /// Constant in front of the exponential; when `c_unresolved` is set this
    /// is the user multiplier (default 1) standing in for a non-explicit one.
    pub c: f64,
    pub c_unresolved: bool,
    pub zeta_factor: Option<Interval>,
    pub bound_value: Interval,
    pub inputs: BoundInputs,
}
