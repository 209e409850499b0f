#![allow(dead_code)]

use latmoment::{FieldElement, NumberField};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn fields() -> Vec<NumberField> {
    vec![
        NumberField::rational(),
        NumberField::cyclotomic(4).unwrap(),
        NumberField::quadratic(2).unwrap(),
        NumberField::quadratic(5).unwrap(),
        NumberField::quadratic(-5).unwrap(),
        NumberField::cyclotomic(3).unwrap(),
        NumberField::cyclotomic(5).unwrap(),
        NumberField::cyclotomic(8).unwrap(),
    ]
}

pub fn field() -> impl Strategy<Value = NumberField> {
    (0..fields().len()).prop_map(|i| fields()[i].clone())
}

/// Coordinates p/q with |p| ≤ 6, 1 ≤ q ≤ 4.
pub fn coords(d: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), d)
}

pub fn element(f: &NumberField, c: &[(i64, i64)]) -> FieldElement {
    f.element(c.iter().map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect())
}

pub fn int_element(f: &NumberField, c: &[(i64, i64)]) -> FieldElement {
    f.element_from_ints(&c.iter().map(|x| x.0).collect::<Vec<_>>())
}

/// A field together with a nonzero element.
pub fn field_and_element() -> impl Strategy<Value = (NumberField, FieldElement)> {
    field().prop_flat_map(|f| {
        let d = f.degree();
        (Just(f), coords(d)).prop_filter_map("zero", |(f, c)| {
            let x = element(&f, &c);
            (!x.is_zero()).then_some((f, x))
        })
    })
}
