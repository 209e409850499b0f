//! Fundamental units of real quadratic fields from continued fractions.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FieldElement, NumberField};

/// Walk the continued fraction of (P0 + √D)/Q0 and return the first
/// convergent p/q accepted by `is_unit`.
fn first_unit_convergent(
    d: i64,
    p0: i64,
    q0: i64,
    mut is_unit: impl FnMut(&BigInt, &BigInt) -> bool,
) -> (BigInt, BigInt) {
    let s = (d as u64).sqrt() as i64;
    let (mut pp, mut qq) = (p0, q0);
    // convergents: h_{-1}=1, h_{-2}=0; k_{-1}=0, k_{-2}=1
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    loop {
        let a = (pp + s).div_euclid(qq);
        let h = BigInt::from(a) * &h1 + &h2;
        let k = BigInt::from(a) * &k1 + &k2;
        if is_unit(&h, &k) {
            return (h, k);
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        pp = a * qq - pp;
        qq = (d - pp * pp) / qq;
    }
}

pub(super) fn fundamental_unit(f: &NumberField, d: i64) -> FieldElement {
    let one = BigInt::one();
    let r = |x: BigInt| BigRational::from_integer(x);
    if d.rem_euclid(4) == 1 {
        // ε = x + yω, ω = (1+√D)/2; x/y approximates ω − 1
        let c = BigInt::from((d - 1) / 4);
        let (p, q) = first_unit_convergent(d, 1, 2, |p, q| {
            let x = p - q;
            let n = &x * &x + &x * q - &c * q * q;
            n == one || n == -&one
        });
        f.element(vec![r(&p - &q), r(q)])
    } else {
        let dd = BigInt::from(d);
        let (p, q) = first_unit_convergent(d, 0, 1, |p, q| {
            let n = p * p - &dd * q * q;
            n == one || n == -&one
        });
        f.element(vec![r(p), r(q)])
    }
}
