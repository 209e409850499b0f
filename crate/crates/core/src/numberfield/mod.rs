//! Exact arithmetic in ℚ, quadratic fields ℚ(√D) and cyclotomic fields ℚ(ζ_n).
//!
//! Every supported field is presented as ℚ(θ) with θ an algebraic integer
//! whose power basis {1, θ, …, θ^{d−1}} is an integral basis of O_K:
//! θ = ζ_n for cyclotomic fields, θ = √D or (1+√D)/2 for quadratic fields.

mod ideal;
mod units;

pub use ideal::FracIdeal;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, det_rational, euler_phi, factorize, solve_rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    /// ℚ(√D), D squarefree, D ∉ {0, 1}.
    Quadratic(i64),
    /// ℚ(ζ_n), n ≥ 3 and n ≢ 2 mod 4.
    Cyclotomic(u64),
}

/// An archimedean place: the index of a representing embedding and its
/// local degree (1 real, 2 complex).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Place {
    pub embedding: usize,
    pub degree: usize,
}

#[derive(Debug)]
struct FieldData {
    kind: FieldKind,
    degree: usize,
    r1: usize,
    r2: usize,
    abs_disc: BigInt,
    /// Coefficients of the monic minimal polynomial of θ, low degree first
    /// (length d+1, last entry 1).
    modulus: Vec<BigInt>,
    /// σ_i(θ); real embeddings first, then complex ones with each
    /// conjugate pair adjacent (Im > 0 first).
    roots: Vec<Complex64>,
    places: Vec<Place>,
    omega: usize,
    torsion_gen: Vec<BigRational>,
}

/// A concrete number field. Cheap to clone.
#[derive(Clone, Debug)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind == other.0.kind
    }
}

impl Eq for NumberField {}

/// Exact coordinates over the integral power basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Quadratic(d) => write!(f, "Q(sqrt,{d})"),
            FieldKind::Cyclotomic(n) => write!(f, "Q(zeta,{n})"),
        }
    }
}

fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    // Φ_n = (x^n − 1) / Π_{e | n, e < n} Φ_e
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for e in 1..n {
        if n % e == 0 {
            let den = cyclotomic_poly(e);
            num = poly_div_exact(&num, &den);
        }
    }
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = num.len() - dd;
    let mut q = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd].clone();
        q[k] = c.clone();
        for (i, di) in den.iter().enumerate() {
            rem[k + i] -= &c * di;
        }
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    q
}

impl NumberField {
    /// Parse "Q", "Q(sqrt,D)" or "Q(zeta,n)".
    pub fn from_descriptor(desc: &str) -> Result<Self> {
        let s: String = desc.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "Q" {
            return Ok(Self::rational());
        }
        let bad = || Error::BadDescriptor(desc.to_string());
        let inner = s.strip_prefix("Q(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (tag, val) = inner.split_once(',').ok_or_else(bad)?;
        match tag {
            "sqrt" => Self::quadratic(val.parse().map_err(|_| bad())?),
            "zeta" => Self::cyclotomic(val.parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }

    pub fn rational() -> Self {
        Self::build(FieldKind::Rational)
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !arith::is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        Ok(Self::build(FieldKind::Quadratic(d)))
    }

    /// ℚ(ζ_n). Conductors n ≡ 2 mod 4 are replaced by n/2, and n ≤ 2 gives ℚ.
    pub fn cyclotomic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadDescriptor("Q(zeta,0)".into()));
        }
        let n = if n % 4 == 2 { n / 2 } else { n };
        if n == 1 {
            return Ok(Self::rational());
        }
        Ok(Self::build(FieldKind::Cyclotomic(n)))
    }

    fn build(kind: FieldKind) -> Self {
        let (modulus, roots, r1, r2, abs_disc): (Vec<BigInt>, Vec<Complex64>, usize, usize, BigInt) = match kind {
            FieldKind::Rational => {
                (vec![BigInt::from(-1), BigInt::one()], vec![Complex64::new(1.0, 0.0)], 1, 0, BigInt::one())
            }
            FieldKind::Quadratic(d) => {
                let df = d as f64;
                if d.rem_euclid(4) == 1 {
                    // θ = (1+√D)/2, θ² − θ − (D−1)/4 = 0
                    let modulus = vec![BigInt::from(-(d - 1) / 4), BigInt::from(-1), BigInt::one()];
                    let disc = BigInt::from(d.abs());
                    if d > 0 {
                        let s = df.sqrt();
                        let roots = vec![Complex64::new((1.0 + s) / 2.0, 0.0), Complex64::new((1.0 - s) / 2.0, 0.0)];
                        (modulus, roots, 2, 0, disc)
                    } else {
                        let s = (-df).sqrt();
                        let roots = vec![Complex64::new(0.5, s / 2.0), Complex64::new(0.5, -s / 2.0)];
                        (modulus, roots, 0, 1, disc)
                    }
                } else {
                    let modulus = vec![BigInt::from(-d), BigInt::zero(), BigInt::one()];
                    let disc = BigInt::from(4 * d.abs());
                    if d > 0 {
                        let s = df.sqrt();
                        (modulus, vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)], 2, 0, disc)
                    } else {
                        let s = (-df).sqrt();
                        (modulus, vec![Complex64::new(0.0, s), Complex64::new(0.0, -s)], 0, 1, disc)
                    }
                }
            }
            FieldKind::Cyclotomic(n) => {
                let modulus = cyclotomic_poly(n);
                let mut roots = Vec::new();
                for k in 1..n {
                    if 2 * k < n && num_integer::gcd(k, n) == 1 {
                        for kk in [k, n - k] {
                            let ang = 2.0 * std::f64::consts::PI * (kk as f64) / (n as f64);
                            let (s, c) = ang.sin_cos();
                            roots.push(Complex64::new(c, s));
                        }
                    }
                }
                let d = euler_phi(n);
                // |disc Q(ζ_n)| = n^φ(n) / Π_{p | n} p^{φ(n)/(p−1)}
                let mut disc = BigInt::from(n).pow(d as u32);
                for (p, _) in factorize(n) {
                    disc /= BigInt::from(p).pow((d / (p - 1)) as u32);
                }
                (modulus, roots, 0, (d / 2) as usize, disc)
            }
        };
        let degree = modulus.len() - 1;
        let mut places = Vec::new();
        for i in 0..r1 {
            places.push(Place { embedding: i, degree: 1 });
        }
        for j in 0..r2 {
            places.push(Place { embedding: r1 + 2 * j, degree: 2 });
        }
        let one = BigRational::one();
        let zero = BigRational::zero();
        let basis_elt = |i: usize| -> Vec<BigRational> {
            (0..degree).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()
        };
        let neg = |v: Vec<BigRational>| -> Vec<BigRational> { v.into_iter().map(|x| -x).collect() };
        let (omega, torsion_gen) = match kind {
            FieldKind::Rational => (2, neg(basis_elt(0))),
            FieldKind::Quadratic(-1) => (4, basis_elt(1)),
            FieldKind::Quadratic(-3) => (6, basis_elt(1)),
            FieldKind::Quadratic(_) => (2, neg(basis_elt(0))),
            FieldKind::Cyclotomic(n) if n % 2 == 1 => (2 * n as usize, neg(basis_elt(1))),
            FieldKind::Cyclotomic(n) => (n as usize, basis_elt(1)),
        };
        NumberField(Arc::new(FieldData {
            kind,
            degree,
            r1,
            r2,
            abs_disc,
            modulus,
            roots,
            places,
            omega,
            torsion_gen: torsion_gen,
        }))
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.0.r1, self.0.r2)
    }

    pub fn abs_discriminant(&self) -> &BigInt {
        &self.0.abs_disc
    }

    pub fn omega(&self) -> usize {
        self.0.omega
    }

    pub fn unit_rank(&self) -> usize {
        self.0.r1 + self.0.r2 - 1
    }

    /// Embeddings σ_i(θ) of the field generator.
    pub fn embeddings(&self) -> &[Complex64] {
        &self.0.roots
    }

    pub fn places(&self) -> &[Place] {
        &self.0.places
    }

    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.0.modulus
    }

    /// Conductor of the field when it is ℚ or cyclotomic.
    pub fn conductor(&self) -> Option<u64> {
        match self.0.kind {
            FieldKind::Rational => Some(1),
            FieldKind::Cyclotomic(n) => Some(n),
            FieldKind::Quadratic(_) => None,
        }
    }

    pub fn is_totally_real(&self) -> bool {
        self.0.r2 == 0
    }

    // ---- elements ----

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = q;
        e
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(arith::int(n))
    }

    /// The element with the given coordinates; panics on a length mismatch.
    pub fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "coordinate vector has wrong length");
        FieldElement { coords }
    }

    pub fn element_from_ints(&self, coords: &[i64]) -> FieldElement {
        self.element(coords.iter().map(|&c| arith::int(c)).collect())
    }

    /// The generator θ of the power basis (for ℚ this is 1).
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.one();
        }
        let mut e = self.zero();
        e.coords[1] = BigRational::one();
        e
    }

    pub fn basis_element(&self, i: usize) -> FieldElement {
        let mut e = self.zero();
        e.coords[i] = BigRational::one();
        e
    }

    pub fn integral_basis(&self) -> Vec<FieldElement> {
        (0..self.degree()).map(|i| self.basis_element(i)).collect()
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &FieldElement, q: &BigRational) -> FieldElement {
        FieldElement { coords: a.coords.iter().map(|x| x * q).collect() }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        if d == 1 {
            return FieldElement { coords: vec![&a.coords[0] * &b.coords[0]] };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut p: Vec<BigRational>) -> FieldElement {
        let d = self.degree();
        let f = &self.0.modulus;
        for k in (d..p.len()).rev() {
            if p[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut p[k], BigRational::zero());
            for i in 0..d {
                if !f[i].is_zero() {
                    p[k - d + i] -= &c * BigRational::from_integer(f[i].clone());
                }
            }
        }
        p.truncate(d);
        FieldElement { coords: p }
    }

    pub fn pow(&self, a: &FieldElement, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inv(a)? } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `a`: column j holds the coordinates of a·θ^j.
    pub fn mult_matrix(&self, a: &FieldElement) -> Vec<Vec<BigRational>> {
        let d = self.degree();
        let theta = self.generator();
        let mut cols = Vec::with_capacity(d);
        let mut cur = a.clone();
        for j in 0..d {
            cols.push(cur.coords.clone());
            if j + 1 < d {
                cur = self.mul(&cur, &theta);
            }
        }
        (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        if self.degree() == 1 {
            return Ok(FieldElement { coords: vec![a.coords[0].recip()] });
        }
        let m = self.mult_matrix(a);
        let rhs = self.one().coords;
        Ok(FieldElement { coords: solve_rational(m, rhs)? })
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// |N_{K/ℚ}(a)| = |det(mult_matrix(a))|, exact.
    pub fn abs_norm(&self, a: &FieldElement) -> BigRational {
        if self.degree() == 1 {
            return a.coords[0].abs();
        }
        det_rational(self.mult_matrix(a)).abs()
    }

    pub fn trace(&self, a: &FieldElement) -> BigRational {
        let m = self.mult_matrix(a);
        (0..self.degree()).map(|i| m[i][i].clone()).sum()
    }

    /// σ_i(a) for every embedding.
    pub fn conjugates(&self, a: &FieldElement) -> Vec<Complex64> {
        let c: Vec<f64> = a.coords.iter().map(rat_to_f64).collect();
        self.0
            .roots
            .iter()
            .map(|&r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in c.iter().rev() {
                    acc = acc * r + x;
                }
                acc
            })
            .collect()
    }

    /// |σ_i(a)| for every embedding.
    pub fn abs_conjugates(&self, a: &FieldElement) -> Vec<f64> {
        self.conjugates(a).iter().map(|z| z.norm()).collect()
    }

    /// Δ^{−1/d}·Tr(x·ȳ), the normalized trace form under which O_K has
    /// covolume 1.
    pub fn trace_pairing(&self, x: &FieldElement, y: &FieldElement) -> f64 {
        let cx = self.conjugates(x);
        let cy = self.conjugates(y);
        let s: f64 = cx.iter().zip(&cy).map(|(a, b)| (a * b.conj()).re).sum();
        s * self.trace_scale()
    }

    /// Δ^{−1/d}.
    pub fn trace_scale(&self) -> f64 {
        let ld = big_log(&self.0.abs_disc);
        (-ld / self.degree() as f64).exp()
    }

    /// Exact |det(Tr(b_i b_j))| of the integral basis.
    pub fn trace_form_discriminant(&self) -> BigRational {
        let b = self.integral_basis();
        let d = self.degree();
        let m: Vec<Vec<BigRational>> =
            (0..d).map(|i| (0..d).map(|j| self.trace(&self.mul(&b[i], &b[j]))).collect()).collect();
        det_rational(m).abs()
    }

    // ---- torsion and units ----

    /// μ_K as the powers g^0, …, g^{ω−1} of a generator.
    pub fn enumerate_torsion(&self) -> Vec<FieldElement> {
        let g = FieldElement { coords: self.0.torsion_gen.clone() };
        let mut out = Vec::with_capacity(self.omega());
        let mut cur = self.one();
        for _ in 0..self.omega() {
            out.push(cur.clone());
            cur = self.mul(&cur, &g);
        }
        out
    }

    pub fn torsion_generator(&self) -> FieldElement {
        FieldElement { coords: self.0.torsion_gen.clone() }
    }

    pub fn is_torsion(&self, a: &FieldElement) -> bool {
        if a.is_zero() || !a.is_integral() {
            return false;
        }
        self.pow(a, self.omega() as i64).map(|p| p == self.one()).unwrap_or(false)
    }

    /// Fundamental unit ε > 1 of a real quadratic field.
    pub fn fundamental_unit(&self) -> Result<FieldElement> {
        match self.0.kind {
            FieldKind::Quadratic(d) if d > 1 => Ok(units::fundamental_unit(self, d)),
            _ => Err(Error::Unsupported(format!("{self} is not a real quadratic field"))),
        }
    }

    // ---- ideals ----

    pub fn ideal_from_generators(&self, xs: &[FieldElement]) -> Result<FracIdeal> {
        FracIdeal::from_generators(self, xs)
    }

    /// D(α) = N(O_K + Σ α_i O_K)^{−1}.
    pub fn denominator_norm(&self, alphas: &[FieldElement]) -> Result<BigInt> {
        if alphas.is_empty() || alphas.iter().all(|a| a.is_zero()) {
            return Err(crate::error::precondition("denominator_norm needs a nonzero tuple"));
        }
        if alphas.iter().all(|a| a.is_integral()) {
            return Ok(BigInt::one());
        }
        let mut gens = vec![self.one()];
        gens.extend(alphas.iter().cloned());
        let inv = self.ideal_from_generators(&gens)?.norm().recip();
        if !inv.is_integer() {
            return Err(Error::Internal(format!("denominator norm {inv} is not an integer")));
        }
        Ok(inv.to_integer())
    }
}

impl NumberField {
    /// 𝔇(D): the index of {C ∈ O_K^{1×m} : C·D ∈ O_K^{1×n}} in O_K^{1×m}.
    ///
    /// With Φ the ℤ-linear map O_K^m ≅ ℤ^{dm} → K^n ≅ ℚ^{dn}, C ↦ C·D, the
    /// index equals [Φ(ℤ^{dm}) + ℤ^{dn} : ℤ^{dn}], read off from one HNF.
    pub fn frak_d(&self, rows: &[Vec<FieldElement>]) -> Result<BigInt> {
        let m = rows.len();
        if m == 0 {
            return Err(crate::error::precondition("frak_d needs a nonempty matrix"));
        }
        let n = rows[0].len();
        let d = self.degree();
        let basis = self.integral_basis();
        let mut images: Vec<Vec<BigRational>> = Vec::with_capacity(d * m);
        for row in rows {
            for b in &basis {
                let mut v = Vec::with_capacity(d * n);
                for x in row {
                    v.extend(self.mul(b, x).coords);
                }
                images.push(v);
            }
        }
        if arith::rank_rational(images.clone()) < d * m {
            return Err(Error::RankDeficient);
        }
        let l = arith::lcm_of_denominators(images.iter().flatten());
        if l.is_one() {
            return Ok(BigInt::one());
        }
        let dim = d * n;
        let mut b = arith::HnfBuilder::new(dim);
        for j in 0..dim {
            let mut e = vec![BigInt::zero(); dim];
            e[j] = l.clone();
            b.insert(e);
        }
        for v in &images {
            b.insert(arith::scale_to_integers(v, &l));
        }
        let h = b.finish()?;
        let det = arith::hnf_det(&h);
        let total = l.pow(dim as u32);
        if (&total % &det).is_zero() {
            Ok(total / det)
        } else {
            Err(Error::Internal("lattice index is not an integer".into()))
        }
    }
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back through logs for huge numerators/denominators
        let sign = if q.is_negative() { -1.0 } else { 1.0 };
        sign * (big_log(&q.numer().abs()) - big_log(q.denom())).exp()
    })
}

/// Natural log of a positive big integer.
pub(crate) fn big_log(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn big_log_rational(q: &BigRational) -> f64 {
    big_log(q.numer()) - big_log(q.denom())
}
