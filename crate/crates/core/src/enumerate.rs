//! Exact enumeration of solutions with every value in `[1..N]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Equation, SolutionTuple};

/// `base^exp`, or `OverflowDetected` if it does not fit in an `i128`.
pub fn checked_pow(base: i128, exp: u32) -> Result<i128> {
    base.checked_pow(exp).ok_or_else(|| Error::overflow(format!("{base}^{exp}")))
}

/// Largest `r ≥ 0` with `r^n ≤ v`.
pub fn integer_nth_root(v: u128, n: u32) -> u128 {
    assert!(n >= 1, "root index must be positive");
    num_integer::Roots::nth_root(&v, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumOptions {
    pub max_value: u64,
    pub exclude_constant: bool,
    pub distinct_values: bool,
}

impl EnumOptions {
    pub fn new(max_value: u64) -> Self {
        EnumOptions { max_value, exclude_constant: true, distinct_values: false }
    }
}

struct Plan {
    pivot: usize,
    pivot_coefficient: i128,
    pivot_exponent: u32,
    /// Variable indices other than the pivot, in canonical order.
    others: Vec<usize>,
    /// `tables[k][v - 1] = a * v^n` for `others[k]`.
    tables: Vec<Vec<i128>>,
}

fn plan(eq: &Equation, max_value: u64) -> Result<Plan> {
    let terms: Vec<(i128, u32, usize)> =
        eq.groups().iter().flat_map(|g| g.coefficients.iter().map(move |&c| (c, g.exponent, g.size()))).collect();
    // Highest exponent first, then unit coefficient, then singleton group.
    let pivot = (0..terms.len())
        .max_by_key(|&i| {
            let (c, e, size) = terms[i];
            (e, c.unsigned_abs() == 1, size == 1, std::cmp::Reverse(i))
        })
        .expect("equations have at least one term");
    let others: Vec<usize> = (0..terms.len()).filter(|&i| i != pivot).collect();
    let tables = others
        .iter()
        .map(|&i| {
            let (c, e, _) = terms[i];
            (1..=max_value)
                .map(|v| {
                    checked_pow(v as i128, e)?.checked_mul(c).ok_or_else(|| Error::overflow(format!("{c} * {v}^{e}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Plan { pivot, pivot_coefficient: terms[pivot].0, pivot_exponent: terms[pivot].1, others, tables })
}

impl Plan {
    /// Value of the pivot that makes the total vanish, if it lies in `[1..max]`.
    fn solve(&self, rest: i128, max_value: u64) -> Option<u64> {
        let target = rest.checked_neg()?;
        if target % self.pivot_coefficient != 0 {
            return None;
        }
        let power = target / self.pivot_coefficient;
        if power < 1 {
            return None;
        }
        let power = power as u128;
        let root = integer_nth_root(power, self.pivot_exponent);
        (root >= 1 && root <= max_value as u128 && root.checked_pow(self.pivot_exponent) == Some(power))
            .then_some(root as u64)
    }

    fn walk(
        &self,
        depth: usize,
        partial: i128,
        values: &mut [u64],
        opts: &EnumOptions,
        out: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        if depth == self.others.len() {
            if let Some(v) = self.solve(partial, opts.max_value) {
                values[self.pivot] = v;
                if accept(values, opts) {
                    out.push(values.to_vec());
                }
            }
            return Ok(());
        }
        let table = &self.tables[depth];
        for (idx, &term) in table.iter().enumerate() {
            let next = partial.checked_add(term).ok_or_else(|| Error::overflow("partial sum during enumeration"))?;
            values[self.others[depth]] = idx as u64 + 1;
            self.walk(depth + 1, next, values, opts, out)?;
        }
        Ok(())
    }
}

fn accept(values: &[u64], opts: &EnumOptions) -> bool {
    if opts.exclude_constant && values.windows(2).all(|w| w[0] == w[1]) {
        return false;
    }
    if opts.distinct_values {
        for i in 0..values.len() {
            if values[i + 1..].contains(&values[i]) {
                return false;
            }
        }
    }
    true
}

/// All solutions as raw value vectors in canonical variable order, sorted
/// lexicographically.
///
/// Every variable but one pivot is looped over; the pivot is recovered from
/// the remaining sum by a divisibility test and an exact integer root. The
/// outermost loop is split across the rayon pool.
pub fn enumerate_values(eq: &Equation, opts: &EnumOptions) -> Result<Vec<Vec<u64>>> {
    if opts.max_value == 0 {
        return Err(Error::InvalidArgument("max_value must be at least 1".into()));
    }
    let plan = plan(eq, opts.max_value)?;
    let arity = eq.arity();
    let mut solutions = if plan.others.is_empty() {
        let mut out = Vec::new();
        plan.walk(0, 0, &mut vec![0; arity], opts, &mut out)?;
        out
    } else {
        let chunks = plan.tables[0]
            .par_iter()
            .enumerate()
            .map(|(idx, &term)| {
                let mut values = vec![0; arity];
                values[plan.others[0]] = idx as u64 + 1;
                let mut out = Vec::new();
                plan.walk(1, term, &mut values, opts, &mut out)?;
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        chunks.into_iter().flatten().collect()
    };
    solutions.sort_unstable();
    Ok(solutions)
}

/// All solutions with values in `[1..opts.max_value]`, in lexicographic order
/// by canonical variable order.
pub fn enumerate_solutions(eq: &Equation, opts: &EnumOptions) -> Result<Vec<SolutionTuple>> {
    Ok(enumerate_values(eq, opts)?.into_iter().map(|values| SolutionTuple::from_values(eq, &values)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate;
    use crate::parser::parse_equation;

    #[test]
    fn pow_and_roots() {
        assert_eq!(checked_pow(2, 10).unwrap(), 1024);
        assert_eq!(checked_pow(1, 999).unwrap(), 1);
        // 10^38 < 2^127 < 10^39
        assert_eq!(checked_pow(10, 38).unwrap(), 10i128.pow(38));
        assert!(matches!(checked_pow(10, 40), Err(Error::OverflowDetected(_))));
        assert_eq!(integer_nth_root(27, 3), 3);
        assert_eq!(integer_nth_root(26, 3), 2);
        assert_eq!(integer_nth_root(0, 5), 0);
        assert_eq!(integer_nth_root(u128::MAX, 1), u128::MAX);
    }

    fn triples(eq: &str, opts: EnumOptions) -> Vec<Vec<u64>> {
        let eq = parse_equation(eq).unwrap();
        enumerate_solutions(&eq, &opts)
            .unwrap()
            .iter()
            .map(|t| ["x", "y", "z"].iter().map(|v| t.get(v).unwrap()).collect())
            .collect()
    }

    #[test]
    fn pythagorean_window() {
        let mut got = triples("x^2 + y^2 = z^2", EnumOptions::new(13));
        got.sort();
        let want = vec![vec![3, 4, 5], vec![4, 3, 5], vec![5, 12, 13], vec![6, 8, 10], vec![8, 6, 10], vec![12, 5, 13]];
        assert_eq!(got, want);
    }

    #[test]
    fn schur_window() {
        let mut got = triples("x + y = z", EnumOptions::new(4));
        got.sort();
        let want = vec![vec![1, 1, 2], vec![1, 2, 3], vec![1, 3, 4], vec![2, 1, 3], vec![2, 2, 4], vec![3, 1, 4]];
        assert_eq!(got, want);
    }

    #[test]
    fn constant_solution_only_when_requested() {
        let opts = EnumOptions { max_value: 2, exclude_constant: false, distinct_values: false };
        assert_eq!(triples("x + y = z^2", opts), vec![vec![2, 2, 2]]);
        assert!(triples("x + y = z^2", EnumOptions::new(2)).is_empty());
    }

    #[test]
    fn distinct_values_filter() {
        let opts = EnumOptions { max_value: 4, exclude_constant: true, distinct_values: true };
        let mut got = triples("x + y = z", opts);
        got.sort();
        assert_eq!(got, vec![vec![1, 2, 3], vec![1, 3, 4], vec![2, 1, 3], vec![3, 1, 4]]);
    }

    #[test]
    fn emission_is_lexicographic_and_sound() {
        let eq = parse_equation("x^3 - y^2 + 2z = 0").unwrap();
        let sols = enumerate_values(&eq, &EnumOptions::new(60)).unwrap();
        assert!(sols.windows(2).all(|w| w[0] < w[1]));
        for s in &sols {
            let tuple = SolutionTuple::from_values(&eq, s);
            assert_eq!(evaluate(&eq, &tuple).unwrap(), 0);
        }
    }

    #[test]
    fn overflow_surfaces() {
        let eq = parse_equation("x^30 + y^30 = z").unwrap();
        assert!(matches!(enumerate_solutions(&eq, &EnumOptions::new(50)), Err(Error::OverflowDetected(_))));
    }

    #[test]
    fn single_variable_has_no_solutions() {
        let eq = parse_equation("3x^2 = 0").unwrap();
        assert!(enumerate_solutions(&eq, &EnumOptions::new(20)).unwrap().is_empty());
    }
}
