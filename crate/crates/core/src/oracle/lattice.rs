//! Empirical moments of lattice-point counts for random ℤ-lattices built by
//! lifting a random line of F_p^t.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::{run_chunks, McEstimate};
use crate::error::{precondition, Error, Result};
use crate::moments::log_ball_volume;

/// Largest ball volume accepted by [`random_lattice_moments`]; beyond it the
/// enumeration cost per lattice grows past what a test run can afford.
pub const MAX_LATTICE_VOLUME: f64 = 1000.0;
pub const MAX_LATTICE_DIM: usize = 24;
const LATTICE_CHUNK: usize = 16;

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

fn mod_inv(a: i64, p: i64) -> i64 {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(p), p, 1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn int_norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x * x).sum()
}

/// Gram–Schmidt data: μ and squared lengths of the b*_i.
fn gram_schmidt(b: &[Vec<i64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let bf: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut bb = vec![0.0; n];
    for i in 0..n {
        let mut v = bf[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&bf[i], &star[j]) / bb[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        bb[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, bb)
}

/// LLL reduction (δ = 0.99) of an integer basis, in place. Gram–Schmidt is
/// recomputed in floating point after each change; the basis itself stays
/// exact, so only the quality of the reduction depends on rounding.
pub fn lll_reduce(b: &mut [Vec<i64>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let delta = 0.99;
    let mut k = 1;
    let (mut mu, mut bb) = gram_schmidt(b);
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (lo, hi) = b.split_at_mut(k);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= qi * y;
                }
                for l in 0..=j {
                    let m = if l == j { 1.0 } else { mu[j][l] };
                    mu[k][l] -= q * m;
                }
            }
        }
        if bb[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (mu, bb) = gram_schmidt(b);
            k = (k - 1).max(1);
        }
    }
}

/// Number of nonzero v in the lattice spanned by the rows of `b` with
/// ‖v‖² ≤ r2, by Fincke–Pohst enumeration. Candidates are pruned with a
/// small floating-point slack and then confirmed with the exact integer norm.
pub fn count_points(b: &[Vec<i64>], r2: i64) -> u64 {
    let n = b.len();
    let (mu, bb) = gram_schmidt(b);
    let bound = r2 as f64 * (1.0 + 1e-9) + 1e-9;
    let dim = b[0].len();
    let mut coeffs = vec![0i64; n];
    let mut count = 0u64;

    fn rec(
        i: usize,
        rest: f64,
        b: &[Vec<i64>],
        mu: &[Vec<f64>],
        bb: &[f64],
        coeffs: &mut [i64],
        dim: usize,
        r2: i64,
        count: &mut u64,
    ) {
        let n = b.len();
        let c: f64 = -(i + 1..n).map(|j| mu[j][i] * coeffs[j] as f64).sum::<f64>();
        let w = (rest / bb[i]).max(0.0).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for z in lo..=hi {
            let d = z as f64 - c;
            let used = d * d * bb[i];
            if used > rest {
                continue;
            }
            coeffs[i] = z;
            if i == 0 {
                if coeffs.iter().all(|&x| x == 0) {
                    continue;
                }
                let mut v = vec![0i64; dim];
                for (j, &cj) in coeffs.iter().enumerate() {
                    if cj != 0 {
                        for (vk, bk) in v.iter_mut().zip(&b[j]) {
                            *vk += cj * bk;
                        }
                    }
                }
                if int_norm(&v) <= r2 {
                    *count += 1;
                }
            } else {
                rec(i - 1, rest - used, b, mu, bb, coeffs, dim, r2, count);
            }
        }
        coeffs[i] = 0;
    }

    rec(n - 1, bound, b, &mu, &bb, &mut coeffs, dim, r2, &mut count);
    count
}

/// Basis of π_p^{−1}(F_p·v) for v normalized with first nonzero entry 1 at
/// position j: v itself together with p·e_i for i ≠ j. Its determinant is
/// p^{t−1}.
pub fn code_lift_basis(v: &[i64], p: i64) -> Result<Vec<Vec<i64>>> {
    let t = v.len();
    let j = v.iter().position(|&x| x != 0).ok_or_else(|| precondition("v must be nonzero"))?;
    if v[j] != 1 {
        return Err(precondition("v must have leading entry 1"));
    }
    let mut rows = vec![v.to_vec()];
    for i in (0..t).filter(|&i| i != j) {
        let mut r = vec![0; t];
        r[i] = p;
        rows.push(r);
    }
    Ok(rows)
}

/// |det| of an integer matrix by fraction-free (Bareiss) elimination.
fn int_det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => a.swap(i, k),
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeMoments {
    pub t: usize,
    pub v: f64,
    pub p: u64,
    /// moments[k−1] estimates E[ρ^k].
    pub moments: Vec<McEstimate>,
}

/// Empirical E[ρ^k], k = 1..n, where ρ counts nonzero points of
/// Λ = p^{−(t−1)/t}·π_p^{−1}(F_p v) in the centered ball of volume V and v is
/// uniform in F_p^t \ {0}. Λ has covolume 1.
pub fn random_lattice_moments(t: usize, n: usize, v: f64, p: u64, samples: usize, seed: u64) -> Result<LatticeMoments> {
    if t < 3 || t > MAX_LATTICE_DIM {
        return Err(precondition(format!("need 3 ≤ t ≤ {MAX_LATTICE_DIM}, got {t}")));
    }
    if p < 101 || !is_prime(p) || p > 1 << 20 {
        return Err(precondition(format!("need a prime 101 ≤ p ≤ 2^20, got {p}")));
    }
    if !(v > 0.0 && v <= MAX_LATTICE_VOLUME) {
        return Err(precondition(format!("need 0 < V ≤ {MAX_LATTICE_VOLUME}, got {v}")));
    }
    if n < 1 || samples < 1 {
        return Err(precondition("need n ≥ 1 and at least one sample"));
    }
    let tf = t as f64;
    // radius² in the unscaled lattice: (V/V(t))^{2/t}·p^{2(t−1)/t}
    let log_r2 = 2.0 / tf * (v.ln() - log_ball_volume(tf)) + 2.0 * (tf - 1.0) / tf * (p as f64).ln();
    let r2f = log_r2.exp();
    if r2f > 4e15 {
        return Err(Error::Unsupported("enumeration radius too large".into()));
    }
    let r2 = r2f.floor() as i64;
    let pi = p as i64;
    let expected_det = BigInt::from(pi).pow(t as u32 - 1);
    let det_ok = std::sync::atomic::AtomicBool::new(true);
    let moments = run_chunks(samples, seed, n, LATTICE_CHUNK, |rng, out| {
        let mut vec: Vec<i64> = loop {
            let c: Vec<i64> = (0..t).map(|_| rng.random_range(0..pi)).collect();
            if c.iter().any(|&x| x != 0) {
                break c;
            }
        };
        let j = vec.iter().position(|&x| x != 0).unwrap();
        let inv = mod_inv(vec[j], pi);
        vec.iter_mut().for_each(|x| *x = (*x * inv) % pi);
        let mut basis = code_lift_basis(&vec, pi).expect("normalized vector");
        if int_det(&basis) != expected_det {
            det_ok.store(false, std::sync::atomic::Ordering::Relaxed);
        }
        lll_reduce(&mut basis);
        let rho = count_points(&basis, r2) as f64;
        let mut pw = 1.0;
        for o in out.iter_mut() {
            pw *= rho;
            *o = pw;
        }
    });
    if !det_ok.into_inner() {
        return Err(Error::Internal("code-lift basis has the wrong covolume".into()));
    }
    Ok(LatticeMoments { t, v, p, moments })
}
