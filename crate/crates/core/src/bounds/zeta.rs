//! Dedekind zeta values with rigorous enclosures.
//!
//! Two independent evaluations are available: a truncated Euler product
//! with an explicit tail bound, and the factorization of ζ_K into Dirichlet
//! L-functions of primitive characters, each evaluated through Hurwitz zeta
//! values with an Euler–Maclaurin remainder bound. [`zeta_interval`]
//! intersects the two.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{euler_phi, factorize, primes_up_to};
use crate::error::{Error, Result};
use crate::numberfield::{FieldKind, NumberField};

/// Closed interval of positive reals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Product of two positive intervals.
    pub fn mul(&self, o: &Interval) -> Interval {
        Interval::new(self.lo * o.lo, self.hi * o.hi)
    }

    /// Quotient of two positive intervals.
    pub fn div(&self, o: &Interval) -> Interval {
        Interval::new(self.lo / o.hi, self.hi / o.lo)
    }

    pub fn powi(&self, k: i32) -> Interval {
        Interval::new(self.lo.powi(k), self.hi.powi(k))
    }

    pub fn scale(&self, c: f64) -> Interval {
        debug_assert!(c >= 0.0);
        Interval::new(self.lo * c, self.hi * c)
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaInterval {
    pub s: f64,
    pub field: String,
    pub conductor: Option<u64>,
    /// Largest prime in the Euler product (0 when not from an Euler product).
    pub truncation_prime: u64,
    pub value_low: f64,
    pub value_high: f64,
}

impl ZetaInterval {
    pub fn interval(&self) -> Interval {
        Interval::new(self.value_low, self.value_high)
    }

    pub fn width(&self) -> f64 {
        self.value_high - self.value_low
    }

    pub fn contains(&self, x: f64) -> bool {
        self.value_low <= x && x <= self.value_high
    }
}

const BLOCK: usize = 2048;

/// Residue degrees and counts (f, g) of the primes of K above p.
pub fn splitting(field: &NumberField, p: u64) -> Vec<(u32, u32)> {
    match field.kind() {
        FieldKind::Rational => vec![(1, 1)],
        FieldKind::Quadratic(d) => match kronecker(fundamental_discriminant(d), p as i64) {
            1 => vec![(1, 2)],
            -1 => vec![(2, 1)],
            _ => vec![(1, 1)],
        },
        FieldKind::Cyclotomic(n) => {
            let mut np = n;
            while np % p == 0 {
                np /= p;
            }
            let f = multiplicative_order(p % np.max(1), np);
            let g = euler_phi(np) as u32 / f;
            vec![(f, g)]
        }
    }
}

/// Signed discriminant of ℚ(√d).
pub fn fundamental_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Kronecker symbol (D/p) for a prime p.
fn kronecker(disc: i64, p: i64) -> i32 {
    if p == 2 {
        if disc % 2 == 0 {
            return 0;
        }
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = disc.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    if mod_pow(r as u64, ((p - 1) / 2) as u64, p as u64) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (D/a) for a ≥ 1 (completely multiplicative in a).
fn kronecker_composite(disc: i64, a: u64) -> i32 {
    factorize(a).into_iter().map(|(p, e)| kronecker(disc, p as i64).pow(e)).product()
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Order of a in (ℤ/n)^× (1 when n = 1).
fn multiplicative_order(a: u64, n: u64) -> u32 {
    if n <= 1 {
        return 1;
    }
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * a as u128 % n as u128) as u64;
        k += 1;
    }
    k
}

/// Upper bound for log(ζ_K(s) / Π_{p ≤ P}(local factors)).
pub fn euler_tail_bound(d: usize, s: f64, p: u64) -> f64 {
    let p = p as f64;
    d as f64 * p.powf(1.0 - s) / ((s - 1.0) * (1.0 - p.powf(-s)))
}

/// Truncated Euler product over primes ≤ `p_max`, with the integral tail
/// bound on the upper side.
pub fn dedekind_zeta(field: &NumberField, s: f64, p_max: u64) -> Result<ZetaInterval> {
    if !(s > 1.0) {
        return Err(Error::ZetaDivergent(s));
    }
    let primes = primes_up_to(p_max.max(2) as usize);
    // Fixed block partition, blocks summed in order: bit-stable across thread counts.
    let block_logs: Vec<f64> = primes
        .par_chunks(BLOCK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&p| {
                    splitting(field, p)
                        .into_iter()
                        .map(|(f, g)| -(g as f64) * (-(p as f64).powf(-s * f as f64)).ln_1p())
                        .sum::<f64>()
                })
                .sum::<f64>()
        })
        .collect();
    let log_partial: f64 = block_logs.iter().sum();
    let tail = euler_tail_bound(field.degree(), s, p_max);
    let slack = 1e-14 * (primes.len() as f64 + 1.0);
    Ok(ZetaInterval {
        s,
        field: field.to_string(),
        conductor: field.conductor(),
        truncation_prime: p_max,
        value_low: (log_partial - slack).exp(),
        value_high: (log_partial + tail + slack).exp(),
    })
}

// B_2, B_4, ..., B_22
const BERNOULLI: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

/// Hurwitz zeta ζ(s, a) for real s > 1, a > 0, with an absolute error bound.
pub fn hurwitz_zeta(s: f64, a: f64) -> (f64, f64) {
    progression_sum(s, a, 1.0)
}

/// Σ_{k ≥ 0} (a + k·q)^{−s} = q^{−s}·ζ(s, a/q), with an absolute error bound.
/// Summing the progression directly keeps large s in range.
pub fn progression_sum(s: f64, a: f64, q: f64) -> (f64, f64) {
    const N: usize = 24;
    const TERMS: usize = 10;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64 * q).powf(-s);
    }
    let x = a + N as f64 * q;
    sum += x.powf(1.0 - s) / (q * (s - 1.0)) + 0.5 * x.powf(-s);
    // term_j = B_{2j}/(2j)! · s(s+1)…(s+2j−2) · q^{2j−1} · x^{−s−2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xp = q * x.powf(-s - 1.0);
    let mut last = 0.0;
    for j in 1..=TERMS + 1 {
        let term = BERNOULLI[j - 1] / fact * rising * xp;
        if j <= TERMS {
            sum += term;
        } else {
            last = term.abs();
        }
        rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
        xp *= (q / x) * (q / x);
    }
    // The Euler–Maclaurin remainder for a completely monotone summand is
    // bounded by the first omitted term; double it and add rounding slack.
    (sum, 2.0 * last + 1e-15 * (N as f64 + 10.0) * sum.abs())
}

/// A primitive Dirichlet character as its value table mod the conductor.
#[derive(Clone, Debug)]
pub struct Character {
    pub conductor: u64,
    pub values: Vec<Complex64>,
}

impl Character {
    fn trivial() -> Self {
        Character { conductor: 1, values: vec![Complex64::new(1.0, 0.0)] }
    }
}

/// Primitive characters χ with ζ_K = Π_χ L(s, χ).
pub fn field_characters(field: &NumberField) -> Vec<Character> {
    match field.kind() {
        FieldKind::Rational => vec![Character::trivial()],
        FieldKind::Quadratic(d) => {
            let disc = fundamental_discriminant(d);
            let q = disc.unsigned_abs();
            let values = (0..q)
                .map(|a| {
                    let v = if a == 0 { 0 } else { kronecker_composite(disc, a) };
                    Complex64::new(v as f64, 0.0)
                })
                .collect();
            vec![Character::trivial(), Character { conductor: q, values }]
        }
        FieldKind::Cyclotomic(n) => characters_mod(n),
    }
}

/// All Dirichlet characters mod n, each replaced by its primitive inducer.
pub fn characters_mod(n: u64) -> Vec<Character> {
    let units: Vec<u64> = (1..n).filter(|&a| a.gcd(&n) == 1).collect();
    // Cyclic factors: one per odd prime power, up to two for the power of 2.
    let mut gens: Vec<(u64, u32)> = Vec::new(); // (generator mod n, order)
    for (p, e) in factorize(n) {
        let pe = p.pow(e);
        let rest = n / pe;
        let lift = |g: u64| crt_lift(g, pe, rest);
        if p == 2 {
            if e >= 2 {
                gens.push((lift(pe - 1), 2));
            }
            if e >= 3 {
                gens.push((lift(5), 1 << (e - 2)));
            }
        } else {
            let phi = (pe / p * (p - 1)) as u32;
            let g = (2..pe).find(|&g| g % p != 0 && multiplicative_order(g, pe) == phi).unwrap();
            gens.push((lift(g), phi));
        }
    }
    // Discrete logs: exponent vector of each unit.
    let mut dlog = vec![Vec::new(); n as usize];
    let total: u64 = gens.iter().map(|&(_, o)| o as u64).product();
    for idx in 0..total {
        let mut rem = idx;
        let mut exps = Vec::with_capacity(gens.len());
        let mut x = 1u64 % n;
        for &(g, o) in &gens {
            let e = rem % o as u64;
            rem /= o as u64;
            exps.push(e as u32);
            x = x * mod_pow(g, e, n) % n;
        }
        dlog[x as usize] = exps;
    }
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rem = idx;
        let ks: Vec<u32> = gens
            .iter()
            .map(|&(_, o)| {
                let k = (rem % o as u64) as u32;
                rem /= o as u64;
                k
            })
            .collect();
        let chi = |a: u64| -> Complex64 {
            let e = &dlog[a as usize];
            let phase: f64 = gens
                .iter()
                .zip(ks.iter())
                .zip(e.iter())
                .map(|((&(_, o), &k), &ei)| (k as u64 * ei as u64 % o as u64) as f64 / o as f64)
                .sum();
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase.fract())
        };
        let is_one = |a: u64| {
            let e = &dlog[a as usize];
            gens.iter().zip(ks.iter()).zip(e.iter()).all(|((&(_, o), &k), &ei)| (k as u64 * ei as u64) % o as u64 == 0)
        };
        let f =
            divisors(n).into_iter().find(|&f| units.iter().filter(|&&a| a % f == 1 % f).all(|&a| is_one(a))).unwrap();
        let values = (0..f)
            .map(|b| {
                if b.gcd(&f) != 1 {
                    return Complex64::new(0.0, 0.0);
                }
                let a = units.iter().copied().find(|&a| a % f == b % f).unwrap_or(1);
                if n == 1 {
                    Complex64::new(1.0, 0.0)
                } else {
                    chi(a)
                }
            })
            .collect();
        out.push(Character { conductor: f, values });
    }
    if out.is_empty() {
        out.push(Character::trivial());
    }
    out
}

fn crt_lift(g: u64, m1: u64, m2: u64) -> u64 {
    // x ≡ g mod m1, x ≡ 1 mod m2
    (0..m2).map(|j| g % m1 + j * m1).find(|&x| x % m2 == 1 % m2).unwrap()
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|f| n % f == 0).collect()
}

/// L(s, χ) = Σ_{a=1}^{f} χ(a)·Σ_{k ≥ 0}(a + kf)^{−s} with an absolute error bound.
pub fn dirichlet_l(chi: &Character, s: f64) -> (Complex64, f64) {
    let f = chi.conductor as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for a in 1..=chi.conductor {
        let v = chi.values[(a % chi.conductor) as usize];
        if v.norm() == 0.0 {
            continue;
        }
        let (z, e) = progression_sum(s, a as f64, f);
        acc += v * z;
        err += e + 1e-15 * z.abs();
    }
    (acc, err)
}

/// ζ_K(s) through its Dirichlet L-function factorization.
pub fn dedekind_zeta_l(field: &NumberField, s: f64) -> Result<ZetaInterval> {
    if !(s > 1.0) {
        return Err(Error::ZetaDivergent(s));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    let mut abs_prod = 1.0;
    let mut abs_prod_err = 1.0;
    for chi in field_characters(field) {
        let (l, e) = dirichlet_l(&chi, s);
        prod *= l;
        abs_prod *= l.norm();
        abs_prod_err *= l.norm() + e;
    }
    let radius = (abs_prod_err - abs_prod) + prod.im.abs() + 1e-14 * abs_prod;
    if prod.re - radius <= 0.0 {
        return Err(Error::Internal(format!("L-function product for {field} at s = {s} is not positive")));
    }
    Ok(ZetaInterval {
        s,
        field: field.to_string(),
        conductor: field.conductor(),
        truncation_prime: 0,
        value_low: prod.re - radius,
        value_high: prod.re + radius,
    })
}

/// Default truncation prime for [`zeta_interval`].
pub const DEFAULT_TRUNCATION: u64 = 10_000;

/// Enclosure of ζ_K(s): Euler product ∩ L-function factorization.
pub fn zeta_interval(field: &NumberField, s: f64) -> Result<Interval> {
    let e = dedekind_zeta(field, s, DEFAULT_TRUNCATION)?.interval();
    let l = dedekind_zeta_l(field, s)?.interval();
    e.intersect(&l).ok_or_else(|| {
        Error::Internal(format!(
            "zeta enclosures for {field} at s = {s} are disjoint: [{}, {}] vs [{}, {}]",
            e.lo, e.hi, l.lo, l.hi
        ))
    })
}

/// Σ_{m ≤ terms} a_m m^{-s} where a_m counts ideals of norm m; ℚ and ℚ(i) only.
pub fn direct_ideal_sum(field: &NumberField, s: f64, terms: usize) -> Result<f64> {
    let chi4 = |d: usize| -> i64 {
        match d % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        }
    };
    let gaussian = matches!(field.kind(), FieldKind::Quadratic(-1) | FieldKind::Cyclotomic(4));
    if !gaussian && field.kind() != FieldKind::Rational {
        return Err(Error::Unsupported(format!("direct ideal sums for {field}")));
    }
    let mut counts = vec![0i64; terms + 1];
    if gaussian {
        // a_m = Σ_{d | m} χ_{-4}(d)
        for d in 1..=terms {
            let c = chi4(d);
            if c == 0 {
                continue;
            }
            let mut m = d;
            while m <= terms {
                counts[m] += c;
                m += d;
            }
        }
    } else {
        counts.iter_mut().skip(1).for_each(|c| *c = 1);
    }
    // sum small terms last
    Ok((1..=terms).rev().map(|m| counts[m] as f64 * (m as f64).powf(-s)).sum())
}

/// Explicit majorant for ζ_{ℚ(ζ_n)}(s): the primes dividing n contribute at
/// most Π_{p | n} (1 − p^{−s})^{−φ(n_p)}, n_p the prime-to-p part of n, and
/// the others at most exp(n·Σ_q q^{−s}/(1 − q^{−s})) over distinct prime
/// powers q ≡ 1 mod n, q ≥ n + 1.
pub fn cyclotomic_zeta_majorant(n: u64, s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::ZetaDivergent(s));
    }
    if n < 3 {
        return Err(crate::error::precondition("need a conductor n ≥ 3"));
    }
    let nf = n as f64;
    let mut log = 0.0;
    for (p, e) in factorize(n) {
        let np = n / p.pow(e);
        log -= euler_phi(np) as f64 * (1.0 - (p as f64).powf(-s)).ln();
    }
    let first = (nf + 1.0).powf(-s);
    let tail = first + (nf + 1.0).powf(1.0 - s) / (nf * (s - 1.0));
    log += nf * tail / (1.0 - first);
    Ok(log.exp())
}
