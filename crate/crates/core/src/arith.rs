//! Exact integer and rational linear algebra: Hermite normal forms,
//! determinants and linear solves over ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Incremental row-style Hermite normal form of a full-rank ℤ-lattice in ℤ^n.
///
/// Rows are kept upper triangular with positive pivots; entries above a
/// pivot are reduced into `[0, pivot)` after every insertion.
#[derive(Clone, Debug)]
pub struct HnfBuilder {
    n: usize,
    rows: Vec<Option<Vec<BigInt>>>,
}

impl HnfBuilder {
    pub fn new(n: usize) -> Self {
        HnfBuilder { n, rows: vec![None; n] }
    }

    pub fn insert(&mut self, mut v: Vec<BigInt>) {
        debug_assert_eq!(v.len(), self.n);
        for c in 0..self.n {
            if v[c].is_zero() {
                continue;
            }
            match self.rows[c].take() {
                None => {
                    if v[c].is_negative() {
                        for x in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.rows[c] = Some(v);
                    self.reduce_column(c);
                    return;
                }
                Some(r) => {
                    let eg = r[c].extended_gcd(&v[c]);
                    let (g, a, b) = (eg.gcd, eg.x, eg.y);
                    let rc = &r[c] / &g;
                    let vc = &v[c] / &g;
                    let mut new_r: Vec<BigInt> = r.iter().zip(v.iter()).map(|(ri, vi)| &a * ri + &b * vi).collect();
                    let new_v: Vec<BigInt> = r.iter().zip(v.iter()).map(|(ri, vi)| &rc * vi - &vc * ri).collect();
                    if new_r[c].is_negative() {
                        for x in new_r.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.rows[c] = Some(new_r);
                    self.reduce_column(c);
                    v = new_v;
                }
            }
        }
    }

    // Reduce the entries in column c of earlier rows, and the tail of row c
    // against later pivots.
    fn reduce_column(&mut self, c: usize) {
        let pivot_row = match &self.rows[c] {
            Some(r) => r.clone(),
            None => return,
        };
        let p = pivot_row[c].clone();
        for i in 0..c {
            if let Some(row) = self.rows[i].as_mut() {
                let q = row[c].div_floor(&p);
                if !q.is_zero() {
                    for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                        *x -= &q * y;
                    }
                }
            }
        }
        for j in (c + 1)..self.n {
            let pj = match &self.rows[j] {
                Some(r) => r.clone(),
                None => continue,
            };
            let row = self.rows[c].as_mut().unwrap();
            let q = row[j].div_floor(&pj[j]);
            if !q.is_zero() {
                for (x, y) in row.iter_mut().zip(pj.iter()) {
                    *x -= &q * y;
                }
            }
        }
    }

    pub fn is_full_rank(&self) -> bool {
        self.rows.iter().all(|r| r.is_some())
    }

    /// Final reduced HNF; errors if the inserted vectors do not span a
    /// full-rank lattice.
    pub fn finish(mut self) -> Result<Vec<Vec<BigInt>>> {
        if !self.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        for c in 0..self.n {
            self.reduce_column(c);
        }
        Ok(self.rows.into_iter().map(|r| r.unwrap()).collect())
    }
}

pub fn hnf(rows: impl IntoIterator<Item = Vec<BigInt>>, n: usize) -> Result<Vec<Vec<BigInt>>> {
    let mut b = HnfBuilder::new(n);
    for r in rows {
        b.insert(r);
    }
    b.finish()
}

pub fn hnf_det(h: &[Vec<BigInt>]) -> BigInt {
    h.iter().enumerate().map(|(i, r)| r[i].clone()).product()
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scale a rational vector by `l` (which must clear all denominators).
pub fn scale_to_integers(v: &[BigRational], l: &BigInt) -> Vec<BigInt> {
    v.iter()
        .map(|x| {
            let y = x * BigRational::from_integer(l.clone());
            debug_assert!(y.is_integer());
            y.to_integer()
        })
        .collect()
}

/// Determinant over ℚ by Gaussian elimination.
pub fn det_rational(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Solve `a x = b` over ℚ for square nonsingular `a`.
pub fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::RankDeficient)?;
        a.swap(p, c);
        b.swap(p, c);
        let piv = a[c][c].clone();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
            let t = &f * &b[c];
            b[r] -= t;
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Rank of a rational matrix.
pub fn rank_rational(mut a: Vec<Vec<BigRational>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let piv = a[rank][c].clone();
        for r in (rank + 1)..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..cols {
                let t = &f * &a[rank][k];
                a[r][k] -= t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Determinant of a real matrix by partial-pivot LU.
pub fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn is_squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    if m == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter_map(|(i, &b)| b.then_some(i as u64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_of_simple_lattice() {
        let h = hnf(vec![bi(&[4, 6]), bi(&[6, 4])], 2).unwrap();
        // det = 16 - 36 = -20
        assert_eq!(hnf_det(&h), BigInt::from(20));
        assert!(h[1][0].is_zero());
        assert!(h[0][1] >= BigInt::zero() && h[0][1] < h[1][1]);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(vec![bi(&[2, 0, 1]), bi(&[0, 3, 1]), bi(&[1, 1, 5])], 3).unwrap();
        let b = hnf(vec![bi(&[3, 1, 6]), bi(&[0, 3, 1]), bi(&[-1, -1, -5]), bi(&[2, 3, 2])], 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_deficient_detected() {
        assert!(hnf(vec![bi(&[1, 2]), bi(&[2, 4])], 2).is_err());
    }

    #[test]
    fn rational_det_and_solve() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(det_rational(a.clone()), int(5));
        let x = solve_rational(a, vec![int(1), int(0)]).unwrap();
        assert_eq!(x, vec![rat(3, 5), rat(-1, 5)]);
    }

    #[test]
    fn small_number_theory() {
        assert!(is_squarefree(-5));
        assert!(!is_squarefree(12));
        assert_eq!(euler_phi(12), 4);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
    }
}
