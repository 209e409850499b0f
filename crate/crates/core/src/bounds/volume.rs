//! Volume-ratio bounds for intersections of ellipsoids, and unit counts.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{g_m, HeightHypothesis};
use crate::error::{precondition, Error, Result};
use crate::heights::{h_infty, REL_ERR};
use crate::moments::log_ball_volume;
use crate::numberfield::{big_log_rational, FieldElement, NumberField};

const PG_STEPS: usize = 200;

fn det_complex(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap();
        if a[p][c].norm() == 0.0 {
            return Complex64::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn go(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, m, cur, out);
            cur.pop();
        }
    }
    go(0, n, m, &mut cur, &mut out);
    out
}

/// The convex-combination bound for a matrix D: q[σ][J] = |σ det D_J|².
struct MinorForm {
    t: f64,
    n: usize,
    sets: Vec<Vec<usize>>,
    q: Vec<Vec<f64>>,
}

impl MinorForm {
    fn new(field: &NumberField, t: usize, rows: &[Vec<FieldElement>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows[0].is_empty() {
            return Err(precondition("convex-combination bound needs a nonempty matrix"));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) || m > n {
            return Err(precondition("matrix must be m×n with m ≤ n"));
        }
        let conj: Vec<Vec<Vec<Complex64>>> =
            rows.iter().map(|r| r.iter().map(|a| field.conjugates(a)).collect()).collect();
        let sets = subsets(n, m);
        let q: Vec<Vec<f64>> = (0..field.degree())
            .map(|s| {
                sets.iter()
                    .map(|js| {
                        let minor: Vec<Vec<Complex64>> =
                            (0..m).map(|i| js.iter().map(|&j| conj[i][j][s]).collect()).collect();
                        det_complex(minor).norm_sqr()
                    })
                    .collect()
            })
            .collect();
        if q.iter().any(|qs| qs.iter().all(|&v| v == 0.0)) {
            return Err(Error::RankDeficient);
        }
        Ok(MinorForm { t: t as f64, n, sets, q })
    }

    fn weight(&self, c: &[f64], js: &[usize], skip: Option<usize>) -> f64 {
        js.iter().filter(|&&j| Some(j) != skip).map(|&j| c[j]).product()
    }

    /// log of Π_σ (Σ_J Π_{j∈J} c_j q_{σJ})^{−t/2}.
    fn log_bound(&self, c: &[f64]) -> f64 {
        let s: f64 = self
            .q
            .iter()
            .map(|qs| {
                let v: f64 = self.sets.iter().zip(qs).map(|(js, &q)| self.weight(c, js, None) * q).sum();
                v.ln()
            })
            .sum();
        let v = -0.5 * self.t * s;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for qs in &self.q {
            let total: f64 = self.sets.iter().zip(qs).map(|(js, &q)| self.weight(c, js, None) * q).sum();
            for (js, &q) in self.sets.iter().zip(qs) {
                for &j in js {
                    g[j] += -0.5 * self.t * self.weight(c, js, Some(j)) * q / total;
                }
            }
        }
        g
    }

    fn minimize(&self) -> f64 {
        let n = self.n;
        let mut best = f64::INFINITY;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            best = best.min(self.log_bound(&e));
        }
        let mut c = vec![1.0 / n as f64; n];
        let mut cur = self.log_bound(&c);
        best = best.min(cur);
        let mut step = 0.1;
        for _ in 0..PG_STEPS {
            let g = self.gradient(&c);
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(gn > 0.0 && gn.is_finite()) {
                break;
            }
            let cand: Vec<f64> = c.iter().zip(&g).map(|(ci, gi)| ci - step * gi / gn).collect();
            let cand = project_simplex(&cand);
            let v = self.log_bound(&cand);
            if v < cur {
                c = cand;
                cur = v;
                best = best.min(v);
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        best
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let th = (cum - 1.0) / (i + 1) as f64;
        if ui - th > 0.0 {
            theta = th;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn check_weights(w: &[f64], n: usize) -> Result<Vec<f64>> {
    if w.len() != n || w.iter().any(|&x| !(x >= 0.0)) {
        return Err(precondition("weights must be n nonnegative reals"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(precondition(format!("weights must sum to 1 (sum = {s})")));
    }
    Ok(w.iter().map(|x| x / s).collect())
}

/// Upper bound for vol(∩_i {x : α_i x ∈ B}) / vol(B), B the unit ball of
/// K_ℝ^t: Π_σ (Σ_i c_i|σα_i|²)^{−t/2} over all d embeddings, minimized over
/// searched convex weights, or evaluated at `weights` when given.
pub fn ellipsoid_intersection_bound(
    field: &NumberField,
    t: usize,
    alphas: &[FieldElement],
    weights: Option<&[f64]>,
) -> Result<f64> {
    if alphas.is_empty() || alphas.iter().all(|a| a.is_zero()) {
        return Err(Error::ZeroElement);
    }
    matrix_convex_bound(field, t, &[alphas.to_vec()], weights)
}

/// Convex-combination bound for an m×n matrix D over K: with the columns of
/// D as constraints, ∫ Π_j 1_B(Σ_i α_ij x_i) dx / V(mtd) is at most
/// Π_σ (Σ_J Π_{j∈J} c_j |σ det D_J|²)^{−t/2}, J running over m-subsets of columns.
pub fn matrix_convex_bound(
    field: &NumberField,
    t: usize,
    rows: &[Vec<FieldElement>],
    weights: Option<&[f64]>,
) -> Result<f64> {
    let form = MinorForm::new(field, t, rows)?;
    let log = match weights {
        Some(w) => form.log_bound(&check_weights(w, form.n)?),
        None => form.minimize(),
    };
    Ok((log.exp() * (1.0 + REL_ERR)).min(f64::MAX))
}

/// Which display of the volume-ratio lemma was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioForm {
    /// N(α)^{−t/(kM)}·g_M(H^{2(k−1)/(kd)})^{−dt/2}, valid when N(α) ≥ 1.
    NormFactored,
    /// g-free first display with the norm inside, used when N(α) < 1.
    General,
}

fn log_h_and_norm(field: &NumberField, alphas: &[FieldElement]) -> Result<(f64, f64)> {
    if alphas.is_empty() {
        return Err(precondition("need a nonempty tuple"));
    }
    if alphas.iter().any(|a| a.is_zero()) {
        return Err(Error::ZeroElement);
    }
    let d = field.degree() as f64;
    let log_h = d * h_infty(field, alphas)?;
    let log_n: f64 = alphas.iter().map(|a| big_log_rational(&field.abs_norm(a).abs())).sum();
    Ok((log_h, log_n))
}

/// Upper bound for vol(B ∩ α_1^{−1}B ∩ … ∩ α_M^{−1}B)/vol(B) from the
/// height H_∞(α) and N(α_1⋯α_M). With N(α) ≥ 1 this is
/// N(α)^{−t/(kM)}·((H^{2(k−1)/(kd)} + M·H^{−2(k−1)/(kMd)})/(M+1))^{−dt/2};
/// otherwise ((H^{2/d} + M·H^{−2/(dM)}·N^{2/(dM)})/(M+1))^{−dt/2}.
pub fn volume_ratio_height_bound(
    field: &NumberField,
    t: usize,
    alphas: &[FieldElement],
    k: f64,
) -> Result<(f64, RatioForm)> {
    if !(k >= 2.0) {
        return Err(precondition(format!("need k ≥ 2, got {k}")));
    }
    let (log_h, log_n) = log_h_and_norm(field, alphas)?;
    let d = field.degree() as f64;
    let mm = alphas.len() as f64;
    let t = t as f64;
    let (log, form) = if log_n >= 0.0 {
        let x = (2.0 * (k - 1.0) / (k * d) * log_h).exp();
        let g = g_m(alphas.len(), x)?;
        (-t / (k * mm) * log_n - 0.5 * d * t * g.ln(), RatioForm::NormFactored)
    } else {
        (general_log_ratio(log_h, log_n, alphas.len(), d, t), RatioForm::General)
    };
    Ok(((log.exp() * (1.0 + REL_ERR)).min(1.0), form))
}

fn general_log_ratio(log_h: f64, log_n: f64, m: usize, d: f64, t: f64) -> f64 {
    let mm = m as f64;
    let inner = ((2.0 / d) * log_h).exp() + mm * ((-2.0 / (d * mm)) * log_h + (2.0 / (d * mm)) * log_n).exp();
    -0.5 * d * t * (inner / (mm + 1.0)).ln()
}

/// Column-selection bound: for D = (Id_m | α) and one column whose nonzero
/// entries are α_1…α_M, ∫ Π 1_B / V(td)^m is at most
/// (M+1)^{Mtd/2}·V(tdM)/V(td)^M·(H^{2/d} + M·N^{2/(dM)}·H^{−2/(dM)})^{−dt/2}.
pub fn grtoproj_bound(field: &NumberField, t: usize, column: &[FieldElement]) -> Result<f64> {
    let (log_h, log_n) = log_h_and_norm(field, column)?;
    let d = field.degree() as f64;
    let mm = column.len() as f64;
    let td = t as f64 * d;
    let inner = ((2.0 / d) * log_h).exp() + mm * ((2.0 / (d * mm)) * log_n - (2.0 / (d * mm)) * log_h).exp();
    let log =
        0.5 * mm * td * (mm + 1.0).ln() + log_ball_volume(td * mm) - mm * log_ball_volume(td) - 0.5 * td * inner.ln();
    Ok(log.exp() * (1.0 + REL_ERR))
}

/// ω_K·((B + c0/2 + max(0, −Y/d))/(c0/2))^{r_K}: bound for the number of
/// units β with h(η + L(β)) ≤ B, where Y = Σ η_j.
pub fn unit_count_bound(field: &NumberField, hyp: &HeightHypothesis, b: f64, y: f64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(precondition(format!("need B ≥ 0, got {b}")));
    }
    let d = field.degree() as f64;
    let half = 0.5 * hyp.c0;
    let base = (b + half + (-y / d).max(0.0)) / half;
    Ok(field.omega() as f64 * base.powi(field.unit_rank() as i32))
}

/// Tuple form: Π_i of the one-coordinate bound with Y_i = log N(α_i),
/// bounding #{β ∈ (O_K^×)^M : h_∞(αβ) ≤ B}.
pub fn unit_count_bound_tuple(
    field: &NumberField,
    hyp: &HeightHypothesis,
    b: f64,
    alphas: &[FieldElement],
) -> Result<f64> {
    alphas.iter().try_fold(1.0, |acc, a| {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let y = big_log_rational(&field.abs_norm(a));
        Ok(acc * unit_count_bound(field, hyp, b, y)?)
    })
}
