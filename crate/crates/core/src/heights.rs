//! Heights: Weil heights of elements, l² / l^∞ heights of projective points,
//! Plücker coordinates and Grassmannian heights, the M(x) invariant, and
//! truncated height zeta sums over ℙ^{n−1}(ℚ).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::det_f64;
use crate::error::{precondition, Error, Result};
use crate::numberfield::{big_log, big_log_rational, FieldElement, NumberField};

/// Relative error radius attached to real-valued heights computed from f64
/// embeddings.
pub const REL_ERR: f64 = 1e-12;

/// A point [x_1 : … : x_N] of ℙ^{N−1}(K).
#[derive(Clone, Debug)]
pub struct ProjPoint {
    field: NumberField,
    coords: Vec<FieldElement>,
}

impl ProjPoint {
    pub fn new(field: &NumberField, coords: Vec<FieldElement>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|x| x.is_zero()) {
            return Err(precondition("projective point needs a nonzero coordinate"));
        }
        if coords.iter().any(|x| x.coords.len() != field.degree()) {
            return Err(precondition("coordinate lies in a different field"));
        }
        Ok(ProjPoint { field: field.clone(), coords })
    }

    pub fn from_ints(field: &NumberField, xs: &[i64]) -> Result<Self> {
        Self::new(field, xs.iter().map(|&x| field.from_int(x)).collect())
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The same point with every coordinate multiplied by λ ≠ 0.
    pub fn scaled(&self, lambda: &FieldElement) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroElement);
        }
        let f = &self.field;
        Ok(ProjPoint { field: f.clone(), coords: self.coords.iter().map(|x| f.mul(x, lambda)).collect() })
    }

    /// N(⟨x_1, …, x_N⟩).
    pub fn ideal_norm(&self) -> BigRational {
        self.field.ideal_from_generators(&self.coords).expect("nonzero point").norm()
    }
}

/// An m×n matrix over K.
#[derive(Clone, Debug)]
pub struct KMatrix {
    field: NumberField,
    rows: Vec<Vec<FieldElement>>,
}

impl KMatrix {
    pub fn new(field: &NumberField, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(precondition("empty matrix"));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(precondition("ragged matrix"));
        }
        Ok(KMatrix { field: field.clone(), rows })
    }

    pub fn from_rationals(field: &NumberField, rows: &[Vec<BigRational>]) -> Result<Self> {
        Self::new(field, rows.iter().map(|r| r.iter().map(|x| field.from_rational(x.clone())).collect()).collect())
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// Row-reduced echelon form; errors when the rank is below m.
    pub fn rref(&self) -> Result<RredMatrix> {
        let f = &self.field;
        let (m, n) = (self.m(), self.n());
        let mut a = self.rows.clone();
        let mut pivots = Vec::with_capacity(m);
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            let inv = f.inv(&a[r][c])?;
            a[r] = a[r].iter().map(|x| f.mul(x, &inv)).collect();
            for i in 0..m {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    a[i] = a[i].iter().zip(&a[r]).map(|(x, y)| f.sub(x, &f.mul(&factor, y))).collect();
                }
            }
            pivots.push(c);
            r += 1;
        }
        if r < m {
            return Err(Error::RankDeficient);
        }
        Ok(RredMatrix { inner: KMatrix { field: f.clone(), rows: a }, pivots })
    }
}

/// A full-rank m×n matrix in row-reduced echelon form.
#[derive(Clone, Debug)]
pub struct RredMatrix {
    inner: KMatrix,
    pivots: Vec<usize>,
}

impl RredMatrix {
    /// Validates the echelon shape; use [`KMatrix::rref`] to reduce a matrix.
    pub fn new(field: &NumberField, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let k = KMatrix::new(field, rows)?;
        let reduced = k.rref()?;
        if reduced.inner.rows != k.rows {
            return Err(precondition("matrix is not in row-reduced echelon form"));
        }
        Ok(reduced)
    }

    pub fn matrix(&self) -> &KMatrix {
        &self.inner
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// A random full-rank row-reduced m×n matrix whose free entries have
    /// coordinates p/q with |p| ≤ 3, q ∈ {1, 2, 3}; about a third of them zero.
    pub fn random<R: Rng + ?Sized>(field: &NumberField, m: usize, n: usize, rng: &mut R) -> Self {
        assert!(1 <= m && m <= n);
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            cols.swap(i, j);
        }
        let mut pivots: Vec<usize> = cols[..m].to_vec();
        pivots.sort_unstable();
        let d = field.degree();
        let mut rows = vec![vec![field.zero(); n]; m];
        for (i, &p) in pivots.iter().enumerate() {
            rows[i][p] = field.one();
            for c in (p + 1)..n {
                if pivots.contains(&c) || rng.random_bool(0.3) {
                    continue;
                }
                let coords = (0..d)
                    .map(|_| {
                        BigRational::new(
                            BigInt::from(rng.random_range(-3i64..=3)),
                            BigInt::from(rng.random_range(1i64..=3)),
                        )
                    })
                    .collect();
                rows[i][c] = field.element(coords);
            }
        }
        RredMatrix { inner: KMatrix { field: field.clone(), rows }, pivots }
    }
}

impl AsRef<KMatrix> for KMatrix {
    fn as_ref(&self) -> &KMatrix {
        self
    }
}

impl AsRef<KMatrix> for RredMatrix {
    fn as_ref(&self) -> &KMatrix {
        &self.inner
    }
}

fn log_max1(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// h(α) = (1/d)(Σ_σ log max(1,|σα|) + log D(α)).
pub fn weil_height(f: &NumberField, alpha: &FieldElement) -> Result<f64> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let arch: f64 = f.abs_conjugates(alpha).into_iter().map(log_max1).sum();
    let den = f.denominator_norm(std::slice::from_ref(alpha))?;
    Ok((arch + big_log(&den)) / f.degree() as f64)
}

/// h_∞(α) = (1/d) Σ_σ log max_j max(1, |σα_j|).
pub fn h_infty(f: &NumberField, alphas: &[FieldElement]) -> Result<f64> {
    if alphas.is_empty() {
        return Err(precondition("h_infty needs a nonempty tuple"));
    }
    let conj: Vec<Vec<f64>> = alphas.iter().map(|a| f.abs_conjugates(a)).collect();
    let s: f64 = (0..f.degree()).map(|i| log_max1(conj.iter().map(|c| c[i]).fold(0.0, f64::max))).sum();
    Ok(s / f.degree() as f64)
}

/// Σ_σ ½·log Σ_j |σ x_j|² (the archimedean part of log H).
fn log_arch_l2(f: &NumberField, xs: &[FieldElement]) -> f64 {
    let conj: Vec<Vec<f64>> = xs.iter().map(|a| f.abs_conjugates(a)).collect();
    (0..f.degree()).map(|i| 0.5 * conj.iter().map(|c| c[i] * c[i]).sum::<f64>().ln()).sum()
}

fn log_arch_linf(f: &NumberField, xs: &[FieldElement]) -> f64 {
    let conj: Vec<Vec<f64>> = xs.iter().map(|a| f.abs_conjugates(a)).collect();
    (0..f.degree()).map(|i| conj.iter().map(|c| c[i]).fold(0.0, f64::max).ln()).sum()
}

pub fn log_proj_height_l2(x: &ProjPoint) -> f64 {
    log_arch_l2(&x.field, &x.coords) - big_log_rational(&x.ideal_norm())
}

pub fn log_proj_height_linf(x: &ProjPoint) -> f64 {
    log_arch_linf(&x.field, &x.coords) - big_log_rational(&x.ideal_norm())
}

/// H(x) = Π_σ ‖σx‖₂ / N(⟨x⟩).
pub fn proj_height_l2(x: &ProjPoint) -> f64 {
    log_proj_height_l2(x).exp()
}

/// H_W(x) = Π_σ ‖σx‖_∞ / N(⟨x⟩).
pub fn proj_height_linf(x: &ProjPoint) -> f64 {
    log_proj_height_linf(x).exp()
}

/// M(x) = Π N(x_i) / N(⟨x⟩)^N, an integer (zero iff some x_i = 0).
pub fn m_invariant(x: &ProjPoint) -> Result<BigInt> {
    let f = &x.field;
    if x.coords.iter().any(|c| c.is_zero()) {
        return Ok(BigInt::zero());
    }
    let prod: BigRational = x.coords.iter().map(|c| f.abs_norm(c)).product();
    let m = prod / x.ideal_norm().pow(x.len() as i32);
    if !m.is_integer() {
        return Err(Error::Internal(format!("M(x) = {m} is not an integer")));
    }
    Ok(m.to_integer())
}

/// (H_W^{2/d} + (N−1)·M^{2/(d(N−1))} / H_W^{2/(d(N−1))})^d, a lower bound for H(x)².
pub fn height_gap_rhs(x: &ProjPoint) -> Result<f64> {
    let d = x.field.degree() as f64;
    let n = x.len() as f64;
    let lhw = log_proj_height_linf(x);
    let a = (2.0 / d * lhw).exp();
    let m = m_invariant(x)?;
    let b =
        if x.len() == 1 || m.is_zero() { 0.0 } else { (n - 1.0) * (2.0 / (d * (n - 1.0)) * (big_log(&m) - lhw)).exp() };
    Ok((d * (a + b).ln()).exp())
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    if m > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..m).rev().find(|&i| cur[i] != i + n - m) else {
            break;
        };
        cur[i] += 1;
        for j in (i + 1)..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Determinant over K by elimination.
pub fn det_over_field(f: &NumberField, mut a: Vec<Vec<FieldElement>>) -> FieldElement {
    let n = a.len();
    let mut det = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return f.zero();
        };
        if p != c {
            a.swap(p, c);
            det = f.neg(&det);
        }
        det = f.mul(&det, &a[c][c]);
        let inv = f.inv(&a[c][c]).expect("nonzero pivot");
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let factor = f.mul(&a[r][c], &inv);
            for k in c..n {
                let t = f.mul(&factor, &a[c][k]);
                a[r][k] = f.sub(&a[r][k], &t);
            }
        }
    }
    det
}

/// Plücker coordinates: m×m minors over column subsets in lexicographic order.
pub fn plucker(d: &impl AsRef<KMatrix>) -> Result<ProjPoint> {
    let d = d.as_ref();
    let f = &d.field;
    let (m, n) = (d.m(), d.n());
    let minors: Vec<FieldElement> = combinations(n, m)
        .iter()
        .map(|cols| {
            let sub: Vec<Vec<FieldElement>> =
                d.rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
            det_over_field(f, sub)
        })
        .collect();
    if minors.iter().all(|x| x.is_zero()) {
        return Err(Error::RankDeficient);
    }
    ProjPoint::new(f, minors)
}

/// H(S) for the row space S of D, i.e. H(plucker(D)).
pub fn gr_height(d: &impl AsRef<KMatrix>) -> Result<f64> {
    Ok(proj_height_l2(&plucker(d)?))
}

/// Covolume of O_K^{1×m}·D in K_ℝ^{1×n}: Π_σ ‖σ(Plücker(D))‖₂.
///
/// Cross-checked against the Gram determinant of the explicit dm-element
/// ℤ-basis; a relative discrepancy above 1e-8 is reported as an internal error.
pub fn det_lattice(d: &impl AsRef<KMatrix>) -> Result<f64> {
    let p = plucker(d)?;
    let closed = log_arch_l2(p.field(), p.coords()).exp();
    let gram = det_lattice_gram(d.as_ref());
    if ((closed - gram) / closed).abs() > 1e-8 {
        return Err(Error::Internal(format!("det_lattice mismatch: closed form {closed}, Gram {gram}")));
    }
    Ok(closed)
}

/// sqrt(det Gram) of the vectors θ^b·row_i under the normalized trace form.
pub fn det_lattice_gram(d: &KMatrix) -> f64 {
    let f = &d.field;
    let scale = f.trace_scale();
    let mut vecs: Vec<Vec<Vec<num_complex::Complex64>>> = Vec::new();
    for row in &d.rows {
        for b in f.integral_basis() {
            vecs.push(row.iter().map(|x| f.conjugates(&f.mul(&b, x))).collect());
        }
    }
    let k = vecs.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut s = 0.0;
            for (u, v) in vecs[i].iter().zip(&vecs[j]) {
                for (a, b) in u.iter().zip(v) {
                    s += (a * b.conj()).re;
                }
            }
            g[i][j] = s * scale;
            g[j][i] = g[i][j];
        }
    }
    det_f64(g).sqrt()
}

/// 𝔇(D) for a full-rank matrix.
pub fn frak_d(d: &impl AsRef<KMatrix>) -> Result<BigInt> {
    let d = d.as_ref();
    d.field.frak_d(&d.rows)
}

/// #{x ∈ ℙ¹(ℚ) : H(x) ≤ T}. Points whose height lies within relative 1e-12
/// above T are counted (guards against rounding in T²).
pub fn enumerate_p1_rationals(t: f64) -> Result<u64> {
    if !(t >= 1.0) {
        return Err(precondition("enumerate_p1_rationals needs T ≥ 1"));
    }
    let t2 = t * t * (1.0 + 1e-12);
    let amax = t.floor() as i64;
    let count: u64 = (1..=amax)
        .into_par_iter()
        .map(|a| {
            let bmax = ((t2 - (a * a) as f64).max(0.0)).sqrt().floor() as i64;
            (-bmax..=bmax).filter(|&b| ((a * a + b * b) as f64) <= t2 && a.gcd(&b) == 1).count() as u64
        })
        .sum();
    Ok(count + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaSum {
    pub partial: f64,
    pub tail_high: f64,
    pub low: f64,
    pub high: f64,
}

/// Σ_{x ∈ ℙ^{n−1}(ℚ), H(x) ≤ T} H(x)^{−t} with the Abel-summation tail
/// interval [0, C2·T^{n−t} + t·C2·T^{n−t}/(t−n)].
pub fn height_zeta_truncated(f: &NumberField, n: usize, t: f64, cutoff: f64, c2: f64) -> Result<ZetaSum> {
    if f.degree() != 1 {
        return Err(Error::Unsupported("truncated height zeta is implemented over ℚ only".into()));
    }
    if n < 2 {
        return Err(precondition("ambient dimension n must be at least 2"));
    }
    if t <= n as f64 {
        return Err(precondition(format!("need t > n (t = {t}, n = {n})")));
    }
    if !(cutoff >= 1.0) {
        return Err(precondition("cutoff T must be at least 1"));
    }
    let r = cutoff.floor() as i64;
    let t2 = cutoff * cutoff * (1.0 + 1e-12);
    // primitive vectors of ℤ^n counted with both signs, halved at the end
    let per_first: Vec<f64> = (-r..=r)
        .into_par_iter()
        .map(|a| {
            let mut acc = 0.0;
            let mut v = vec![0i64; n];
            v[0] = a;
            sum_primitive(&mut v, 1, (a * a) as f64, t2, t, r, &mut acc);
            acc
        })
        .collect();
    let partial = 0.5 * per_first.iter().sum::<f64>();
    let tn = cutoff.powf(n as f64 - t);
    let tail_high = c2 * tn + t * c2 * tn / (t - n as f64);
    Ok(ZetaSum { partial, tail_high, low: partial, high: partial + tail_high })
}

fn sum_primitive(v: &mut [i64], k: usize, norm2: f64, t2: f64, t: f64, r: i64, acc: &mut f64) {
    if k == v.len() {
        if norm2 > 0.0 && v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            *acc += norm2.powf(-t / 2.0);
        }
        return;
    }
    let rem = t2 - norm2;
    if rem < 0.0 {
        return;
    }
    let b = (rem.sqrt().floor() as i64).min(r);
    for x in -b..=b {
        v[k] = x;
        sum_primitive(v, k + 1, norm2 + (x * x) as f64, t2, t, r, acc);
    }
    v[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn weil_height_examples() {
        let z5 = NumberField::cyclotomic(5).unwrap();
        assert!(weil_height(&z5, &z5.generator()).unwrap().abs() < 1e-15);
        let q5 = NumberField::quadratic(5).unwrap();
        let h = weil_height(&q5, &q5.generator()).unwrap();
        assert!((h - 0.2406059125).abs() < 1e-9);
        let q = NumberField::rational();
        let h = weil_height(&q, &q.from_rational(rat(1, 2))).unwrap();
        assert!(close(h, 2f64.ln(), 1e-15));
        assert!(weil_height(&q, &q.zero()).is_err());
    }

    #[test]
    fn weil_height_vanishes_exactly_on_torsion() {
        for f in [NumberField::cyclotomic(12).unwrap(), NumberField::quadratic(-3).unwrap()] {
            for x in f.enumerate_torsion() {
                assert!(weil_height(&f, &x).unwrap() < 1e-14);
            }
            for x in [f.from_int(2), f.element_from_ints(&vec![1; f.degree()]), f.from_rational(rat(1, 3))] {
                if !f.is_torsion(&x) {
                    assert!(weil_height(&f, &x).unwrap() > 1e-3, "{x}");
                }
            }
        }
    }

    #[test]
    fn h_infty_examples() {
        let f = NumberField::quadratic(2).unwrap();
        assert_eq!(h_infty(&f, &[f.one(), f.one()]).unwrap(), 0.0);
        let q = NumberField::rational();
        assert!(close(h_infty(&q, &[q.from_int(2)]).unwrap(), 2f64.ln(), 1e-15));
        let e = f.element_from_ints(&[1, 1]);
        assert!((h_infty(&f, &[e.clone()]).unwrap() - 0.4406867935).abs() < 1e-9);
        let pair = [e.clone(), f.from_rational(rat(7, 3))];
        let joint = h_infty(&f, &pair).unwrap();
        assert!(joint >= h_infty(&f, &pair[..1]).unwrap());
        assert!(joint >= h_infty(&f, &pair[1..]).unwrap());
        assert!(h_infty(&f, &[]).is_err());
    }

    #[test]
    fn projective_height_examples() {
        let q = NumberField::rational();
        assert_eq!(proj_height_l2(&ProjPoint::from_ints(&q, &[1, 0]).unwrap()), 1.0);
        assert!(close(proj_height_l2(&ProjPoint::from_ints(&q, &[3, 4]).unwrap()), 5.0, 1e-14));
        let qi = NumberField::cyclotomic(4).unwrap();
        assert!(close(proj_height_l2(&ProjPoint::from_ints(&qi, &[1, 1]).unwrap()), 2.0, 1e-14));
        assert!(close(proj_height_linf(&ProjPoint::from_ints(&q, &[3, 4]).unwrap()), 4.0, 1e-14));
        let q5 = NumberField::quadratic(5).unwrap();
        let x = ProjPoint::new(&q5, vec![q5.one(), q5.generator()]).unwrap();
        assert!(close(proj_height_linf(&x), 1.6180339887498949, 1e-14));
        // non-coprime representative
        assert!(close(proj_height_l2(&ProjPoint::from_ints(&q, &[6, 8]).unwrap()), 5.0, 1e-14));
        assert!(ProjPoint::from_ints(&q, &[0, 0]).is_err());
    }

    #[test]
    fn m_invariant_examples() {
        let q = NumberField::rational();
        assert_eq!(m_invariant(&ProjPoint::from_ints(&q, &[1, 1]).unwrap()).unwrap(), BigInt::one());
        assert_eq!(m_invariant(&ProjPoint::from_ints(&q, &[1, 0]).unwrap()).unwrap(), BigInt::zero());
        assert_eq!(m_invariant(&ProjPoint::from_ints(&q, &[2, 3]).unwrap()).unwrap(), BigInt::from(6));
        assert_eq!(m_invariant(&ProjPoint::from_ints(&q, &[4, 6]).unwrap()).unwrap(), BigInt::from(6));
    }

    #[test]
    fn height_gap_examples() {
        let q = NumberField::rational();
        let x = ProjPoint::from_ints(&q, &[1, 0, 0]).unwrap();
        assert!(close(height_gap_rhs(&x).unwrap(), 1.0, 1e-14));
        // over ℚ with N = 2 the inequality is an equality: max² + min² = a² + b²
        let x = ProjPoint::from_ints(&q, &[3, 4]).unwrap();
        assert!(close(height_gap_rhs(&x).unwrap(), 25.0, 1e-13));
        assert!(proj_height_l2(&x).powi(2) >= height_gap_rhs(&x).unwrap() * (1.0 - REL_ERR));
    }

    #[test]
    fn plucker_examples() {
        let q = NumberField::rational();
        let id = KMatrix::from_rationals(&q, &[vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let p = plucker(&id).unwrap();
        assert_eq!(p.coords(), &[q.one()]);
        let d = KMatrix::from_rationals(&q, &[vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]]).unwrap();
        let p = plucker(&d).unwrap();
        assert_eq!(p.coords(), &[q.from_int(1), q.from_int(1), q.from_int(-1)]);
        assert!(close(gr_height(&d).unwrap(), 3f64.sqrt(), 1e-14));
        assert!(close(det_lattice(&d).unwrap(), 3f64.sqrt(), 1e-14));
        let rank1 = KMatrix::from_rationals(&q, &[vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert!(matches!(plucker(&rank1), Err(Error::RankDeficient)));
    }

    #[test]
    fn gr_height_example_with_denominator() {
        let q = NumberField::rational();
        let d = RredMatrix::new(&q, vec![vec![q.one(), q.from_rational(rat(1, 2))]]).unwrap();
        assert!(close(gr_height(&d).unwrap(), 5f64.sqrt(), 1e-14));
        assert!(close(det_lattice(&d).unwrap(), 5f64.sqrt() / 2.0, 1e-14));
        assert_eq!(frak_d(&d).unwrap(), BigInt::from(2));
        let two = KMatrix::from_rationals(&q, &[vec![int(2)]]).unwrap();
        assert!(close(det_lattice(&two).unwrap(), 2.0, 1e-15));
        let e = RredMatrix::new(&q, vec![vec![q.one(), q.zero(), q.zero()]]).unwrap();
        assert_eq!(gr_height(&e).unwrap(), 1.0);
    }

    #[test]
    fn rred_validation() {
        let q = NumberField::rational();
        assert!(RredMatrix::new(&q, vec![vec![q.from_int(2), q.one()]]).is_err());
        assert!(RredMatrix::new(&q, vec![vec![q.one(), q.one()], vec![q.zero(), q.one()]]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = NumberField::cyclotomic(5).unwrap();
        for _ in 0..5 {
            let r = RredMatrix::random(&f, 2, 4, &mut rng);
            assert!(RredMatrix::new(&f, r.matrix().rows().to_vec()).is_ok());
        }
    }

    #[test]
    fn p1_counts() {
        assert_eq!(enumerate_p1_rationals(1.0).unwrap(), 2);
        assert_eq!(enumerate_p1_rationals(2f64.sqrt()).unwrap(), 4);
        // T = 10 by a direct double loop over (a, b) up to sign
        let mut brute = 0;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                if (a, b) != (0, 0) && a * a + b * b <= 100 && a.gcd(&b) == 1 {
                    brute += 1;
                }
            }
        }
        assert_eq!(enumerate_p1_rationals(10.0).unwrap(), brute / 2);
        assert!(enumerate_p1_rationals(0.5).is_err());
    }

    #[test]
    fn height_zeta_truncations() {
        let q = NumberField::rational();
        let z = height_zeta_truncated(&q, 2, 4.0, 1.0, 1.0).unwrap();
        assert!(close(z.partial, 2.0, 1e-15));
        let z = height_zeta_truncated(&q, 2, 4.0, 100.0, 1.0).unwrap();
        assert!(close(z.tail_high, 3e-4, 1e-12));
        let mut prev = 0.0;
        for t in [5.0, 10.0, 20.0, 40.0] {
            let z = height_zeta_truncated(&q, 2, 4.0, t, 1.0).unwrap();
            assert!(z.partial >= prev);
            prev = z.partial;
        }
        // Σ over primitive (a, b) up to sign of (a²+b²)^{−2} = 2·ζ_{ℚ(i)}(2)/ζ(4)
        let exact = 2.0 * 1.5067030099229846 / (std::f64::consts::PI.powi(4) / 90.0);
        let z = height_zeta_truncated(&q, 2, 4.0, 40.0, 2.0).unwrap();
        assert!(z.low <= exact && exact <= z.high, "{z:?} vs {exact}");
        assert!(height_zeta_truncated(&q, 2, 2.0, 10.0, 1.0).is_err());
        let qi = NumberField::cyclotomic(4).unwrap();
        assert!(height_zeta_truncated(&qi, 2, 4.0, 10.0, 1.0).is_err());
    }
}
