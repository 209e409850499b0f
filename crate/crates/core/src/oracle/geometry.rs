//! Monte Carlo and cubature estimates of intersection volumes in K_ℝ^t.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{run_chunks, McEstimate, CHUNK};
use crate::error::{precondition, Error, Result};
use crate::numberfield::{FieldElement, NumberField};
use crate::quad::adaptive_simpson;

/// Largest real dimension sampled by the Monte Carlo oracles.
pub const MAX_MC_DIM: usize = 64;

pub const MIN_SAMPLES: usize = 10_000;

/// Orthonormal real coordinates on K_ℝ^t: for each of the t copies, one
/// coordinate per real place and a (re, im) pair per complex place.
/// Multiplication by α acts placewise by σ(α).
#[derive(Clone, Debug)]
pub struct Minkowski {
    t: usize,
    /// true for complex places
    complex: Vec<bool>,
    embedding: Vec<usize>,
    d: usize,
}

impl Minkowski {
    pub fn new(field: &NumberField, t: usize) -> Self {
        let places = field.places();
        Minkowski {
            t,
            complex: places.iter().map(|p| p.degree == 2).collect(),
            embedding: places.iter().map(|p| p.embedding).collect(),
            d: field.degree(),
        }
    }

    pub fn dim(&self) -> usize {
        self.t * self.d
    }

    /// σ_p(α) for each place p.
    pub fn place_values(&self, field: &NumberField, a: &FieldElement) -> Vec<Complex64> {
        let c = field.conjugates(a);
        self.embedding.iter().map(|&e| c[e]).collect()
    }

    /// out += α·x
    pub fn mul_add(&self, alpha: &[Complex64], x: &[f64], out: &mut [f64]) {
        let mut i = 0;
        for _ in 0..self.t {
            for (p, &cx) in self.complex.iter().enumerate() {
                let s = alpha[p];
                if cx {
                    let (u, v) = (x[i], x[i + 1]);
                    out[i] += s.re * u - s.im * v;
                    out[i + 1] += s.re * v + s.im * u;
                    i += 2;
                } else {
                    out[i] += s.re * x[i];
                    i += 1;
                }
            }
        }
    }

    /// Squared norm of α·x, i.e. Σ_p |σ_pα|²·‖x_p‖².
    pub fn scaled_norm_sq(&self, abs2: &[f64], x: &[f64]) -> f64 {
        let mut acc = 0.0;
        let mut i = 0;
        for _ in 0..self.t {
            for (p, &cx) in self.complex.iter().enumerate() {
                let w = if cx { x[i] * x[i] + x[i + 1] * x[i + 1] } else { x[i] * x[i] };
                acc += abs2[p] * w;
                i += if cx { 2 } else { 1 };
            }
        }
        acc
    }
}

/// Uniform point in the unit ball of ℝ^N: normalized Gaussian scaled by U^{1/N}.
pub fn sample_ball(rng: &mut ChaCha8Rng, x: &mut [f64]) {
    let mut norm2 = 0.0;
    for xi in x.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *xi = g;
        norm2 += g * g;
    }
    let u: f64 = rng.random();
    let r = u.powf(1.0 / x.len() as f64) / norm2.sqrt();
    x.iter_mut().for_each(|xi| *xi *= r);
}

fn check_mc(dim: usize, samples: usize) -> Result<()> {
    if dim > MAX_MC_DIM {
        return Err(Error::DimensionTooLarge { got: dim, limit: MAX_MC_DIM });
    }
    if samples < MIN_SAMPLES {
        return Err(precondition(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    Ok(())
}

/// Estimate of vol(B ∩ α_1^{−1}B ∩ … ∩ α_M^{−1}B)/vol(B) for the unit ball
/// B ⊂ K_ℝ^t, by uniform sampling in B.
pub fn mc_intersection_ratio(
    field: &NumberField,
    t: usize,
    alphas: &[FieldElement],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let geo = Minkowski::new(field, t);
    check_mc(geo.dim(), samples)?;
    if alphas.iter().any(|a| a.is_zero()) {
        return Err(Error::ZeroElement);
    }
    let abs2: Vec<Vec<f64>> =
        alphas.iter().map(|a| geo.place_values(field, a).iter().map(|z| z.norm_sqr()).collect()).collect();
    let dim = geo.dim();
    let est = run_chunks(samples, seed, 1, CHUNK, |rng, out| {
        let mut x = vec![0.0; dim];
        sample_ball(rng, &mut x);
        out[0] = if abs2.iter().all(|w| geo.scaled_norm_sq(w, &x) <= 1.0) { 1.0 } else { 0.0 };
    });
    Ok(est[0])
}

/// For an m×n matrix D over K, the probability that independent uniform
/// x_1, …, x_m ∈ B satisfy ‖Σ_i D_ij x_i‖ ≤ 1 for every column j; this is
/// ∫ Π_i 1_B(x_i) Π_j 1_B(Σ_i D_ij x_i) dx / V(td)^m.
pub fn mc_matrix_ratio(
    field: &NumberField,
    t: usize,
    rows: &[Vec<FieldElement>],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let geo = Minkowski::new(field, t);
    let m = rows.len();
    if m == 0 || rows[0].is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(precondition("need a nonempty m×n matrix"));
    }
    check_mc(m * geo.dim(), samples)?;
    let n = rows[0].len();
    let vals: Vec<Vec<Vec<Complex64>>> =
        rows.iter().map(|r| r.iter().map(|a| geo.place_values(field, a)).collect()).collect();
    let dim = geo.dim();
    let est = run_chunks(samples, seed, 1, CHUNK, |rng, out| {
        let xs: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let mut x = vec![0.0; dim];
                sample_ball(rng, &mut x);
                x
            })
            .collect();
        let mut y = vec![0.0; dim];
        let ok = (0..n).all(|j| {
            y.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..m {
                geo.mul_add(&vals[i][j], &xs[i], &mut y);
            }
            y.iter().map(|v| v * v).sum::<f64>() <= 1.0
        });
        out[0] = if ok { 1.0 } else { 0.0 };
    });
    Ok(est[0])
}

/// Estimate of ∫ 1_B(x)1_B(y)1_B(α₁x + α₂y + z) dx dy / V(td)², for the
/// slice inequality comparing a shift z against z = 0.
pub fn mc_potato_slice(
    field: &NumberField,
    t: usize,
    alpha1: &FieldElement,
    alpha2: &FieldElement,
    z: &[f64],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let geo = Minkowski::new(field, t);
    check_mc(2 * geo.dim(), samples)?;
    if z.len() != geo.dim() {
        return Err(precondition(format!("shift must have {} coordinates", geo.dim())));
    }
    let a1 = geo.place_values(field, alpha1);
    let a2 = geo.place_values(field, alpha2);
    let dim = geo.dim();
    let est = run_chunks(samples, seed, 1, CHUNK, |rng, out| {
        let mut x = vec![0.0; dim];
        let mut y = vec![0.0; dim];
        sample_ball(rng, &mut x);
        sample_ball(rng, &mut y);
        let mut w = z.to_vec();
        geo.mul_add(&a1, &x, &mut w);
        geo.mul_add(&a2, &y, &mut w);
        out[0] = if w.iter().map(|v| v * v).sum::<f64>() <= 1.0 { 1.0 } else { 0.0 };
    });
    Ok(est[0])
}

/// Monte Carlo estimate of vol(B(0,1) ∩ B(δe, 1))/vol(B) in ℝ^N.
pub fn mc_two_ball(n: usize, delta: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    check_mc(n, samples)?;
    let est = run_chunks(samples, seed, 1, CHUNK, |rng, out| {
        let mut x = vec![0.0; n];
        sample_ball(rng, &mut x);
        x[0] -= delta;
        out[0] = if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 { 1.0 } else { 0.0 };
    });
    Ok(est[0])
}

const CUBATURE_TOL: f64 = 1e-12;
/// Accuracy claimed for [`dirichlet_intersection`] values (absolute); the
/// cubature targets 1e-12 per level, this leaves room for nesting.
pub const DIRICHLET_ABS_ERR: f64 = 1e-9;
/// Cubature is used up to this many places; beyond, Monte Carlo.
pub const MAX_CUBATURE_PLACES: usize = 3;

/// ∫ over u ≥ 0 (last coordinates from `i` on) with Σu ≤ b1 and Σ a·u ≤ b2
/// of Π u_p^{n_p/2 − 1}; u = s² substitution keeps the integrand smooth.
fn dirichlet_rec(a: &[f64], n: &[f64], i: usize, b1: f64, b2: f64) -> f64 {
    if b1 <= 0.0 || b2 <= 0.0 {
        return 0.0;
    }
    let lim = b1.min(b2 / a[i]);
    if i + 1 == a.len() {
        return 2.0 / n[i] * lim.powf(0.5 * n[i]);
    }
    let inner = |s: f64| {
        let u = s * s;
        2.0 * s.powf(n[i] - 1.0) * dirichlet_rec(a, n, i + 1, b1 - u, b2 - a[i] * u)
    };
    let top = lim.sqrt();
    // the next level's limit switches from b1 − u to (b2 − a_i u)/a_next here
    let an = a[i + 1];
    let mut cuts = vec![0.0];
    if (an - a[i]).abs() > 0.0 {
        let u = (an * b1 - b2) / (an - a[i]);
        if u > 0.0 && u < lim {
            cuts.push(u.sqrt());
        }
    }
    cuts.push(top);
    cuts.windows(2).map(|w| adaptive_simpson(&inner, w[0], w[1], CUBATURE_TOL)).sum()
}

/// vol(B ∩ α^{−1}B)/vol(B) for B the unit ball of K_ℝ^t. With u_p the squared
/// norm of the place-p block (real dimension n_p = t·e_p), a uniform point
/// of B has density Γ(N/2+1)/Π Γ(n_p/2) · Π u_p^{n_p/2−1} on Σu_p ≤ 1, and
/// the ratio is the mass of Σ|σ_pα|² u_p ≤ 1. Nested adaptive Simpson for up
/// to three places; Monte Carlo (2·10⁵ samples, seed 0) beyond.
pub fn dirichlet_intersection(field: &NumberField, t: usize, alpha: &FieldElement) -> Result<f64> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let geo = Minkowski::new(field, t);
    let vals = geo.place_values(field, alpha);
    let places = field.places();
    if places.len() > MAX_CUBATURE_PLACES {
        return Ok(mc_intersection_ratio(field, t, std::slice::from_ref(alpha), 200_000, 0)?.mean);
    }
    let a: Vec<f64> = vals.iter().map(|z| z.norm_sqr()).collect();
    let n: Vec<f64> = places.iter().map(|p| (t * p.degree) as f64).collect();
    Ok(dirichlet_from_parts(&a, &n))
}

/// The Dirichlet mass for explicit weights a_p and block dimensions n_p.
pub fn dirichlet_from_parts(a: &[f64], n: &[f64]) -> f64 {
    let total: f64 = n.iter().sum();
    let log_norm = libm::lgamma(0.5 * total + 1.0) - n.iter().map(|&k| libm::lgamma(0.5 * k)).sum::<f64>();
    if a.len() == 1 {
        return (1.0f64).min(1.0 / a[0]).powf(0.5 * n[0]);
    }
    (log_norm.exp() * dirichlet_rec(a, n, 0, 1.0, 1.0)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::two_ball_intersection;

    #[test]
    fn torsion_ratio_is_one() {
        let f = NumberField::cyclotomic(5).unwrap();
        let z = f.generator();
        let e = mc_intersection_ratio(&f, 2, &[z.clone(), f.one()], 20_000, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        assert!((dirichlet_intersection(&f, 2, &z).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rational_scaling() {
        let q = NumberField::rational();
        let two = q.from_int(2);
        assert!((dirichlet_intersection(&q, 4, &two).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        let e = mc_intersection_ratio(&q, 4, &[two], 100_000, 3).unwrap();
        assert!((e.mean - 1.0 / 16.0).abs() < 3.0 * e.std_error + 1e-12);
    }

    #[test]
    fn real_quadratic_cubature_matches_mc() {
        let f = NumberField::quadratic(2).unwrap();
        let eps = f.element_from_ints(&[1, 1]);
        let v = dirichlet_intersection(&f, 4, &eps).unwrap();
        assert!(v > 0.0 && v < 1.0);
        let e = mc_intersection_ratio(&f, 4, &[eps], 200_000, 5).unwrap();
        assert!((e.mean - v).abs() < 3.0 * e.std_error, "{v} vs {e:?}");
    }

    #[test]
    fn dirichlet_two_place_closed_form() {
        // a = (1, 1): the constraint is Σu ≤ 1 again
        assert!((dirichlet_from_parts(&[1.0, 1.0], &[3.0, 5.0]) - 1.0).abs() < 1e-9);
        // a = (4, 4): uniform scaling by ½ in dimension 8
        assert!((dirichlet_from_parts(&[4.0, 4.0], &[4.0, 4.0]) - 2f64.powi(-8)).abs() < 1e-10);
        // three places, equal weights
        assert!((dirichlet_from_parts(&[0.25, 0.25, 0.25], &[2.0, 2.0, 2.0]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_ball_mc_matches_formula() {
        for (n, d) in [(3, 1.0), (8, 0.5)] {
            let e = mc_two_ball(n, d, 200_000, 11).unwrap();
            let exact = two_ball_intersection(n, d).unwrap();
            assert!((e.mean - exact).abs() < 3.0 * e.std_error, "N={n}");
        }
    }

    #[test]
    fn dimension_cap() {
        let q = NumberField::rational();
        assert!(matches!(mc_intersection_ratio(&q, 65, &[q.one()], 10_000, 0), Err(Error::DimensionTooLarge { .. })));
        assert!(mc_intersection_ratio(&q, 4, &[q.one()], 100, 0).is_err());
    }
}
