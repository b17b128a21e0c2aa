#![allow(dead_code)]

use fermat_pr_core::{canonicalize, Equation, Term};
use proptest::prelude::*;

pub const NAMES: [&str; 8] = ["x", "y", "z", "w", "u", "v", "a", "b"];

fn coefficient(bound: i128) -> impl Strategy<Value = i128> {
    (1..=bound, any::<bool>()).prop_map(|(c, neg)| if neg { -c } else { c })
}

/// Random terms with distinct variable names, split into two sides.
pub fn sides(
    vars: std::ops::RangeInclusive<usize>,
    coef_bound: i128,
    max_exp: u32,
) -> impl Strategy<Value = (Vec<Term>, Vec<Term>)> {
    vars.prop_flat_map(move |k| {
        (
            proptest::collection::vec((coefficient(coef_bound), 1..=max_exp, any::<bool>()), k),
            Just(NAMES[..k].to_vec()).prop_shuffle(),
        )
    })
    .prop_map(|(specs, names)| {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for ((c, e, left), name) in specs.into_iter().zip(names) {
            let term = Term::new(c, name, e).unwrap();
            if left {
                lhs.push(term)
            } else {
                rhs.push(term)
            }
        }
        (lhs, rhs)
    })
}

pub fn equation(
    vars: std::ops::RangeInclusive<usize>,
    coef_bound: i128,
    max_exp: u32,
) -> impl Strategy<Value = Equation> {
    sides(vars, coef_bound, max_exp).prop_map(|(l, r)| canonicalize(&l, &r).unwrap())
}

pub fn linear_equation(vars: std::ops::RangeInclusive<usize>, coef_bound: i128) -> impl Strategy<Value = Equation> {
    equation(vars, coef_bound, 1)
}

/// Text of one side, `0` for an empty side.
pub fn side_text(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let mag = t.coefficient.unsigned_abs();
        if i == 0 {
            if t.coefficient < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if t.coefficient < 0 { " - " } else { " + " });
        }
        if mag != 1 {
            out.push_str(&mag.to_string());
        }
        out.push_str(&t.variable);
        if t.exponent != 1 {
            out.push_str(&format!("^{}", t.exponent));
        }
    }
    out
}

/// Every assignment of `1..=n` to `k` variables, in lexicographic order.
pub fn cross_product(k: usize, n: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = (n as u128).pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut values = vec![0; k];
        for slot in values.iter_mut().rev() {
            *slot = (idx % n as u128) as u64 + 1;
            idx /= n as u128;
        }
        values
    })
}
