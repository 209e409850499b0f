//! Mahler measures of x^n − x + 1.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{precondition, Error, Result};

pub const MAX_RESIDUAL: f64 = 1e-8;

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // c is low degree first
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of a polynomial (coefficients low degree first, leading
/// coefficient nonzero) by Aberth–Ehrlich iteration followed by Newton
/// polishing. Fails if some root's relative residual |f(z)|/Σ|a_i||z|^i
/// exceeds 1e-8.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs[n] == 0.0 {
        return Err(precondition("need a polynomial of positive degree"));
    }
    let c: Vec<Complex64> = coeffs.iter().map(|&a| Complex64::new(a / coeffs[n], 0.0)).collect();
    // Cauchy-type radius for the initial circle
    let r = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
        let (p, _) = horner(&c, *zi);
        let scale: f64 = c.iter().enumerate().map(|(k, a)| a.norm() * zi.norm().powi(k as i32)).sum();
        if p.norm() / scale > MAX_RESIDUAL {
            return Err(Error::Internal(format!("root residual {} too large", p.norm() / scale)));
        }
    }
    Ok(z)
}

/// Mahler measure Π max(1, |root|) of a monic polynomial.
pub fn mahler_measure(coeffs: &[f64]) -> Result<f64> {
    Ok(polynomial_roots(coeffs)?.iter().map(|z| z.norm().max(1.0)).product())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MahlerEntry {
    pub n: usize,
    /// H_∞ of a root of x^n − x + 1, i.e. the Mahler measure of the polynomial.
    pub mahler: f64,
    /// log(H_∞)/n.
    pub height: f64,
}

/// Mahler measures of x^n − x + 1 for n = 2..=n_max.
pub fn mahler_sequence(n_max: usize) -> Result<Vec<MahlerEntry>> {
    if !(5..=60).contains(&n_max) {
        return Err(precondition(format!("need 5 ≤ n_max ≤ 60, got {n_max}")));
    }
    (2..=n_max)
        .map(|n| {
            let mut c = vec![0.0; n + 1];
            c[0] = 1.0;
            c[1] = -1.0;
            c[n] = 1.0;
            let m = mahler_measure(&c)?;
            Ok(MahlerEntry { n, mahler: m, height: m.ln() / n as f64 })
        })
        .collect()
}
