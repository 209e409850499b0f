use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{FieldElement, NumberField};
use crate::arith::{hnf, hnf_det, lcm_of_denominators, scale_to_integers};
use crate::error::{precondition, Result};

/// A fractional ideal (1/den)·L with L ⊂ ℤ^d given by its Hermite normal form
/// over the integral basis. The pair (hnf, den) is kept reduced so that
/// equal ideals compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    pub hnf: Vec<Vec<BigInt>>,
    pub den: BigInt,
}

impl FracIdeal {
    pub fn from_generators(f: &NumberField, xs: &[FieldElement]) -> Result<Self> {
        let gens: Vec<&FieldElement> = xs.iter().filter(|x| !x.is_zero()).collect();
        if gens.is_empty() {
            return Err(precondition("ideal needs at least one nonzero generator"));
        }
        let basis = f.integral_basis();
        let mut vecs = Vec::with_capacity(gens.len() * basis.len());
        for x in &gens {
            for b in &basis {
                vecs.push(f.mul(b, x).coords);
            }
        }
        Self::from_z_span(f.degree(), &vecs)
    }

    /// The ℤ-span of the given rational coordinate vectors (must have rank d).
    pub fn from_z_span(d: usize, vecs: &[Vec<BigRational>]) -> Result<Self> {
        let l = lcm_of_denominators(vecs.iter().flatten());
        let rows = vecs.iter().map(|v| scale_to_integers(v, &l));
        let h = hnf(rows, d)?;
        Ok(Self::normalized(h, l))
    }

    fn normalized(mut h: Vec<Vec<BigInt>>, mut den: BigInt) -> Self {
        let mut g = den.clone();
        for x in h.iter().flatten() {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        if !g.is_one() {
            for x in h.iter_mut().flatten() {
                *x /= &g;
            }
            den /= &g;
        }
        FracIdeal { hnf: h, den }
    }

    /// ℤ-basis as field elements.
    pub fn basis(&self) -> Vec<FieldElement> {
        self.hnf
            .iter()
            .map(|r| FieldElement { coords: r.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect() })
            .collect()
    }

    /// N(I) = |det hnf| / den^d.
    pub fn norm(&self) -> BigRational {
        let d = self.hnf.len() as u32;
        BigRational::new(hnf_det(&self.hnf).abs(), self.den.pow(d))
    }

    pub fn mul(&self, f: &NumberField, other: &FracIdeal) -> Result<FracIdeal> {
        let a = self.basis();
        let b = other.basis();
        let mut vecs = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                vecs.push(f.mul(x, y).coords);
            }
        }
        Self::from_z_span(f.degree(), &vecs)
    }

    /// Membership test by back-substitution in the triangular basis.
    pub fn contains(&self, x: &FieldElement) -> bool {
        let d = self.hnf.len();
        let mut v: Vec<BigRational> =
            x.coords.iter().map(|c| c * BigRational::from_integer(self.den.clone())).collect();
        for c in 0..d {
            let q = &v[c] / BigRational::from_integer(self.hnf[c][c].clone());
            if !q.is_integer() {
                return false;
            }
            for k in c..d {
                let t = &q * BigRational::from_integer(self.hnf[c][k].clone());
                v[k] -= t;
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }
}
