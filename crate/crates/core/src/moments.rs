//! Poisson main terms and the combinatorics behind them: Stirling numbers,
//! Touchard polynomials, ball volumes, Rogers' error term and the two-ball
//! intersection volume.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::numberfield::NumberField;
use crate::quad::adaptive_simpson;

/// A moment computation: E[ρ(Λ)^n] for a random O_K-lattice of rank `t`
/// and a centred ball of volume `v`.
#[derive(Clone, Debug)]
pub struct MomentQuery {
    field: NumberField,
    t: usize,
    n: usize,
    v: f64,
}

impl MomentQuery {
    pub fn new(field: &NumberField, t: usize, n: usize, v: f64) -> Result<Self> {
        if t < 2 {
            return Err(precondition(format!("rank t = {t} must be at least 2")));
        }
        if n < 1 {
            return Err(precondition("moment order must be at least 1"));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(precondition(format!("volume {v} must be positive and finite")));
        }
        if t * field.degree() <= n {
            return Err(precondition(format!("need t·d > n (t = {t}, d = {}, n = {n})", field.degree())));
        }
        Ok(MomentQuery { field: field.clone(), t, n, v })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Real dimension t·d of the ambient space.
    pub fn dim(&self) -> usize {
        self.t * self.field.degree()
    }

    /// Radius R of the ball with volume V in dimension t·d.
    pub fn radius(&self) -> f64 {
        let n = self.dim() as f64;
        ((self.v.ln() - log_ball_volume(n)) / n).exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportConstants {
    pub t0: f64,
    pub epsilon: f64,
    /// Explicit part of the constant in front of the exponential.
    pub c: f64,
    pub zeta_factor: f64,
    /// Multiplier for the non-explicit constant C_S; `c_s_unresolved` is set
    /// whenever the default of 1 is in use.
    pub c_s: f64,
    pub c_s_unresolved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub field: String,
    pub t: usize,
    pub n: usize,
    pub v: f64,
    pub main_term: f64,
    pub lower: f64,
    pub upper: f64,
    pub components: Vec<Component>,
    pub constants: ReportConstants,
    /// The theorem's closed-form error envelope, when one applies.
    pub envelope: Option<f64>,
}

/// Stirling number of the second kind S(n, m).
pub fn stirling2(n: usize, m: usize) -> Result<BigInt> {
    if m > n {
        return Err(precondition(format!("S({n}, {m}) needs m ≤ n")));
    }
    Ok(stirling2_row(n).swap_remove(m))
}

/// Row S(n, 0..=n).
pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 1..=n {
        let mut next = vec![BigInt::zero(); i + 1];
        for (k, slot) in next.iter_mut().enumerate().skip(1) {
            let carry = if k < i { BigInt::from(k) * &row[k] } else { BigInt::zero() };
            *slot = carry + &row[k - 1];
        }
        row = next;
    }
    row
}

pub fn bell(n: usize) -> BigInt {
    stirling2_row(n).into_iter().sum()
}

/// m_n(λ) = Σ_m S(n,m) λ^m, exactly.
pub fn poisson_moment_exact(n: usize, lambda: &BigRational) -> Result<BigRational> {
    if lambda < &BigRational::zero() {
        return Err(precondition("Poisson parameter must be nonnegative"));
    }
    let row = stirling2_row(n);
    let mut acc = BigRational::zero();
    let mut pow = BigRational::one();
    for s in row.iter() {
        acc += BigRational::from_integer(s.clone()) * &pow;
        pow *= lambda;
    }
    Ok(acc)
}

pub fn poisson_moment(n: usize, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(precondition("Poisson parameter must be nonnegative"));
    }
    let row = stirling2_row(n);
    // Horner from the top coefficient.
    Ok(row.iter().rev().fold(0.0, |acc, s| acc * lambda + s.to_f64().unwrap_or(f64::INFINITY)))
}

/// e^{-λ} Σ_{r ≥ 0} r^n λ^r / r!, summed until the terms are negligible.
pub fn poisson_moment_series(n: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0;
    let mut log_w = -lambda; // log(e^{-λ} λ^r / r!) at r = 0
    let mut r = 0usize;
    loop {
        if r > 0 {
            log_w += lambda.ln() - (r as f64).ln();
        }
        let term = if r == 0 {
            if n == 0 {
                log_w.exp()
            } else {
                0.0
            }
        } else {
            (log_w + n as f64 * (r as f64).ln()).exp()
        };
        sum += term;
        if r as f64 > lambda + n as f64 + 10.0 && term < 1e-18 * sum.max(1e-300) {
            break;
        }
        r += 1;
    }
    sum
}

/// Main term ω^n · m_n(V/ω).
pub fn main_term(q: &MomentQuery) -> f64 {
    main_term_f64(q.field.omega(), q.n, q.v)
}

pub fn main_term_f64(omega: usize, n: usize, v: f64) -> f64 {
    let w = omega as f64;
    w.powi(n as i32) * poisson_moment(n, v / w).expect("v > 0")
}

/// Σ_m S(n,m) ω^{n-m} V^m, exact in V.
pub fn main_term_exact(field: &NumberField, n: usize, v: &BigRational) -> Result<BigRational> {
    if v < &BigRational::zero() {
        return Err(precondition("volume must be nonnegative"));
    }
    let w = BigInt::from(field.omega());
    let row = stirling2_row(n);
    let mut acc = BigRational::zero();
    for (m, s) in row.iter().enumerate().skip(1) {
        let coeff = s * num_traits::pow(w.clone(), n - m);
        acc += BigRational::from_integer(coeff) * num_traits::pow(v.clone(), m);
    }
    Ok(acc)
}

/// Same value as [`main_term_exact`] via ω^n · m_n(V/ω).
pub fn main_term_exact_poisson(field: &NumberField, n: usize, v: &BigRational) -> Result<BigRational> {
    let w = BigRational::from_integer(BigInt::from(field.omega()));
    let m = poisson_moment_exact(n, &(v / &w))?;
    Ok(num_traits::pow(w, n) * m)
}

/// #A_m = ω^{n-m} S(n, m).
pub fn count_am(field: &NumberField, n: usize, m: usize) -> Result<BigInt> {
    if m < 1 || m > n {
        return Err(precondition(format!("need 1 ≤ m ≤ n (m = {m}, n = {n})")));
    }
    Ok(stirling2(n, m)? * num_traits::pow(BigInt::from(field.omega()), n - m))
}

pub fn log_ball_volume(n: f64) -> f64 {
    0.5 * n * std::f64::consts::PI.ln() - libm::lgamma(0.5 * n + 1.0)
}

/// Volume of the unit ball in ℝ^N.
pub fn ball_volume(n: usize) -> f64 {
    log_ball_volume(n as f64).exp()
}

/// V(m·td) / V(td)^m via log-gamma.
pub fn volume_ratio_exact(m: usize, td: usize) -> f64 {
    (log_ball_volume((m * td) as f64) - m as f64 * log_ball_volume(td as f64)).exp()
}

/// (tdπ)^{(m-1)/2} e^{m/(6td)} / m^{(m·td+1)/2}, an upper bound for
/// V(m·td)/V(td)^m.
pub fn volume_ratio_bound(m: usize, t: usize, d: usize) -> Result<f64> {
    if m < 1 || t * d < 1 {
        return Err(precondition("need m ≥ 1 and td ≥ 1"));
    }
    let td = (t * d) as f64;
    let m = m as f64;
    let log = 0.5 * (m - 1.0) * (td * std::f64::consts::PI).ln() + m / (6.0 * td) - 0.5 * (m * td + 1.0) * m.ln();
    Ok(log.exp())
}

/// Smallest t for which Rogers' bound is stated: ⌈n²/4 + 3⌉.
pub fn rogers_threshold(n: usize) -> usize {
    (n * n).div_ceil(4) + 3
}

/// Rogers' error E_{n,t} = 2·3^{⌈n²/4⌉}(√3/2)^t + 21·5^{⌈n²/4⌉}(1/2)^t.
/// Computed for every t; callers compare against [`rogers_threshold`].
pub fn rogers_error(n: usize, t: usize) -> f64 {
    let e = (n * n).div_ceil(4) as i32;
    let t = t as i32;
    2.0 * 3f64.powi(e) * (0.75f64.sqrt()).powi(t) + 21.0 * 5f64.powi(e) * 0.5f64.powi(t)
}

/// vol(B(0,R) ∩ B(δR·e, R)) / vol(B(0,R)) in ℝ^N.
pub fn two_ball_intersection(n: usize, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(precondition("two-ball intersection needs N ≥ 2"));
    }
    if !(delta >= 0.0) {
        return Err(precondition("center distance must be nonnegative"));
    }
    if delta >= 2.0 {
        return Ok(0.0);
    }
    if delta == 0.0 {
        return Ok(1.0);
    }
    // ρ = cos θ turns ∫_{δ/2}^1 (1-ρ²)^{(N-1)/2} dρ into ∫_0^{acos(δ/2)} sin^N θ dθ.
    let nf = n as f64;
    let theta_max = (0.5 * delta).acos();
    let integral = adaptive_simpson(&|th: f64| th.sin().powi(n as i32), 0.0, theta_max, 1e-12);
    let ratio = (log_ball_volume(nf - 1.0) - log_ball_volume(nf)).exp();
    Ok((2.0 * ratio * integral).clamp(0.0, 1.0))
}

/// Σ_{m=1}^{n} S(n,m)(1+ω)^{(n-m)m} · 2(√3/2)^{td}: bound for the normalized
/// contribution of the matrices A¹_m.
pub fn a1m_bound(field: &NumberField, n: usize, t: usize) -> Result<f64> {
    if n >= t {
        return Err(precondition(format!("need n < t (n = {n}, t = {t})")));
    }
    let w = (1 + field.omega()) as f64;
    let row = stirling2_row(n);
    let count: f64 = (1..=n).map(|m| row[m].to_f64().unwrap_or(f64::INFINITY) * w.powf(((n - m) * m) as f64)).sum();
    let td = (t * field.degree()) as f64;
    Ok(count * 2.0 * (td * 0.75f64.sqrt().ln()).exp())
}
