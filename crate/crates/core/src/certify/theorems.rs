use super::primes::{pow_mod, prime_factors, residue};
use super::{
    all_subset_sums, require_prime, ConditionFailure, DivisibilityCheck, Evidence, Justification, Outcome,
    ResidueValue, Rule,
};
use crate::error::{Error, Result};
use crate::model::{
    constant_solutions, group_sums, nonempty_subset_sums, ConstantSolutions, Equation, ExponentGroup,
    DEFAULT_SUBSET_LIMIT,
};

fn holds(rule: Rule, witness_prime: Option<u64>, evidence: Evidence) -> Result<Outcome> {
    Ok(Outcome::Holds(Justification { rule, witness_prime, evidence, citation: None }))
}

fn fails(failure: ConditionFailure) -> Result<Outcome> {
    Ok(Outcome::Fails(failure))
}

fn subset_variables(group: &ExponentGroup, mask: u64) -> Vec<String> {
    group.variables.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect()
}

fn checked(value: Option<i128>, what: &str) -> Result<i128> {
    value.ok_or_else(|| Error::overflow(what))
}

/// Modular criterion: every nonempty subset sum of every group is nonzero mod
/// `p`, and `Σ_ℓ S_ℓ ρ^{n_ℓ} ≢ 0 (mod p)` for every `ρ ≢ 0`.
pub fn check_theorem1(eq: &Equation, p: u64) -> Result<Outcome> {
    require_prime(p)?;
    let subsets = all_subset_sums(eq)?;
    Ok(theorem1_with(eq, &subsets, p))
}

pub(crate) fn theorem1_with(eq: &Equation, subsets: &[Vec<(u64, i128)>], p: u64) -> Outcome {
    let mut subset_residues = Vec::with_capacity(subsets.len());
    for (group, sums) in eq.groups().iter().zip(subsets) {
        let mut residues = Vec::with_capacity(sums.len());
        for &(mask, sum) in sums {
            let r = residue(sum, p);
            if r == 0 {
                return Outcome::Fails(
                    ConditionFailure::new(Rule::T1, "1", format!("subset sum {sum} is divisible by {p}"))
                        .with_subset(subset_variables(group, mask)),
                );
            }
            residues.push(r);
        }
        subset_residues.push(residues);
    }
    let sums = group_sums(eq).sums;
    let sum_residues: Vec<u64> = sums.iter().map(|&s| residue(s, p)).collect();
    let mut residues = Vec::with_capacity(p as usize - 1);
    for rho in 1..p {
        let value = eq
            .groups()
            .iter()
            .zip(&sum_residues)
            .fold(0u128, |acc, (g, &s)| (acc + s as u128 * pow_mod(rho, g.exponent, p) as u128) % p as u128)
            as u64;
        if value == 0 {
            return Outcome::Fails(
                ConditionFailure::new(Rule::T1, "2", format!("Σ S_ℓ ρ^n_ℓ ≡ 0 (mod {p}) at ρ = {rho}")).with_rho(rho),
            );
        }
        residues.push(ResidueValue { rho, value });
    }
    Outcome::Holds(Justification {
        rule: Rule::T1,
        witness_prime: Some(p),
        evidence: Evidence::Theorem1 { group_sums: sums, subset_residues, residues },
        citation: None,
    })
}

/// Valuation criterion: integer subset sums nonzero, a unique group `ℓ'` whose
/// sum `p` does not divide, and `p^{n_ℓ' − n_ℓ}` dividing no subset sum of any
/// lower group `ℓ < ℓ'`.
pub fn check_theorem2(eq: &Equation, p: u64) -> Result<Outcome> {
    require_prime(p)?;
    let subsets = all_subset_sums(eq)?;
    Ok(theorem2_with(eq, &subsets, p))
}

pub(crate) fn theorem2_with(eq: &Equation, subsets: &[Vec<(u64, i128)>], p: u64) -> Outcome {
    let groups = eq.groups();
    for (group, sums) in groups.iter().zip(subsets) {
        if let Some(&(mask, _)) = sums.iter().find(|&&(_, s)| s == 0) {
            return Outcome::Fails(
                ConditionFailure::new(Rule::T2, "1", "a nonempty subset sum vanishes")
                    .with_subset(subset_variables(group, mask)),
            );
        }
    }
    let sums = group_sums(eq).sums;
    let not_divisible: Vec<usize> = (0..sums.len()).filter(|&l| residue(sums[l], p) != 0).collect();
    let distinguished = match not_divisible[..] {
        [l] => l,
        _ => {
            return Outcome::Fails(ConditionFailure::new(
                Rule::T2,
                "2",
                format!("{} group sums are not divisible by {p}; exactly one is required", not_divisible.len()),
            ))
        }
    };
    let top_exponent = groups[distinguished].exponent;
    let mut lower_groups = Vec::with_capacity(distinguished);
    for (l, (group, sums)) in groups.iter().zip(subsets).enumerate().take(distinguished) {
        let modulus = (p as i128).checked_pow(top_exponent - group.exponent);
        if let Some(m) = modulus {
            if let Some(&(mask, sum)) = sums.iter().find(|&&(_, s)| s % m == 0) {
                return Outcome::Fails(
                    ConditionFailure::new(
                        Rule::T2,
                        "3",
                        format!("{p}^{} divides subset sum {sum}", top_exponent - group.exponent),
                    )
                    .with_subset(subset_variables(group, mask)),
                );
            }
        }
        lower_groups.push(DivisibilityCheck {
            group: l,
            exponent: group.exponent,
            modulus,
            subset_sums: sums.iter().map(|&(_, s)| s).collect(),
        });
    }
    Outcome::Holds(Justification {
        rule: Rule::T2,
        witness_prime: Some(p),
        evidence: Evidence::Theorem2 {
            group_sums: sums,
            distinguished_group: distinguished,
            distinguished_exponent: top_exponent,
            lower_groups,
        },
        citation: None,
    })
}

/// `Σ a_i x_i^n = y^{n+1}` oriented so the single top term has coefficient 1.
/// Returns `(n, a)`.
fn power_step_shape(eq: &Equation, rule: Rule) -> Result<(u32, Vec<i128>)> {
    let [low, high] = eq.groups() else {
        return Err(Error::shape(rule, "expected exactly two exponent groups"));
    };
    if high.exponent != low.exponent + 1 {
        return Err(Error::shape(rule, "exponents are not consecutive"));
    }
    let unit = match high.coefficients[..] {
        [c] if c.abs() == 1 => c,
        _ => return Err(Error::shape(rule, "top group must be a single term with coefficient ±1")),
    };
    Ok((low.exponent, low.coefficients.iter().map(|&a| -unit * a).collect()))
}

/// `Σ_{i∈Γ} a_i ≠ 0` and `Σ a_i + n Σ_{i∉Γ} a_i ≠ 0` for every nonempty Γ.
pub fn check_theorem3(eq: &Equation) -> Result<Outcome> {
    let (n, coefficients) = power_step_shape(eq, Rule::T3)?;
    let group =
        ExponentGroup { exponent: n, coefficients: coefficients.clone(), variables: eq.groups()[0].variables.clone() };
    let total: i128 = coefficients.iter().sum();
    let mut subsets = Vec::new();
    for (mask, sum) in nonempty_subset_sums(&group, DEFAULT_SUBSET_LIMIT)? {
        if sum == 0 {
            return fails(
                ConditionFailure::new(Rule::T3, "1", "a nonempty subset sum vanishes")
                    .with_subset(subset_variables(&group, mask)),
            );
        }
        let outside = total - sum;
        let value =
            checked((n as i128).checked_mul(outside).and_then(|v| v.checked_add(total)), "T3 weighted subset sum")?;
        if value == 0 {
            return fails(
                ConditionFailure::new(Rule::T3, "2", "Σ a_i + n Σ_{i∉Γ} a_i vanishes")
                    .with_subset(subset_variables(&group, mask)),
            );
        }
        subsets.push((mask, sum, value));
    }
    holds(Rule::T3, None, Evidence::Theorem3 { exponent: n, coefficients, subsets })
}

/// One variable per exponent, an odd number of terms, all coefficients odd.
pub fn check_theorem4(eq: &Equation) -> Result<Outcome> {
    if eq.groups().iter().any(|g| g.size() != 1) {
        return Err(Error::shape(Rule::T4, "every exponent group must have exactly one term"));
    }
    let coefficients: Vec<i128> = eq.groups().iter().map(|g| g.coefficients[0]).collect();
    let exponents: Vec<u32> = eq.groups().iter().map(|g| g.exponent).collect();
    if coefficients.len().is_multiple_of(2) {
        return fails(ConditionFailure::new(
            Rule::T4,
            "h",
            format!("{} terms; an odd count is required", coefficients.len()),
        ));
    }
    if let Some(c) = coefficients.iter().find(|c| *c % 2 == 0) {
        return fails(ConditionFailure::new(Rule::T4, "odd", format!("coefficient {c} is even")));
    }
    holds(Rule::T4, None, Evidence::Theorem4 { coefficients, exponents })
}

/// `a x^n + b y^n = c z^m`.
struct TwoPlusOne {
    n: u32,
    m: u32,
    a: i128,
    b: i128,
    c: i128,
}

fn two_plus_one(eq: &Equation, rule: Rule) -> Result<TwoPlusOne> {
    match eq.groups() {
        [g] if g.size() == 3 => {
            let [a, b, c] = g.coefficients[..] else { unreachable!() };
            Ok(TwoPlusOne { n: g.exponent, m: g.exponent, a, b, c: -c })
        }
        [g1, g2] => {
            let (pair, single) = match (g1.size(), g2.size()) {
                (2, 1) => (g1, g2),
                (1, 2) => (g2, g1),
                _ => return Err(Error::shape(rule, "expected two terms of one exponent and one of another")),
            };
            Ok(TwoPlusOne {
                n: pair.exponent,
                m: single.exponent,
                a: pair.coefficients[0],
                b: pair.coefficients[1],
                c: -single.coefficients[0],
            })
        }
        _ => Err(Error::shape(rule, "expected three terms in at most two exponent groups")),
    }
}

/// Three cases of `a x^n + b y^n = c z^m` by comparing `n` and `m`.
///
/// Cases (i) and (ii) also require `a + b ≠ 0`, inherited from the nonzero
/// subset-sum hypothesis of the valuation criterion they specialize. The
/// witness prime is the smallest prime factor satisfying the case.
pub fn check_cor1(eq: &Equation, p_max: u64) -> Result<Outcome> {
    let _ = p_max;
    let shape = two_plus_one(eq, Rule::Cor1i)?;
    let TwoPlusOne { n, m, a, b, c } = shape;
    let a_plus_b = checked(a.checked_add(b), "a + b")?;
    let evidence = Evidence::Corollary1 { n, m, a, b, c, a_plus_b };
    if n == m {
        let [x, y, z] = eq.groups()[0].coefficients[..] else { unreachable!() };
        // a+b≠0, a≠c, b≠c, a+b≠c with c = −z; every pair sum and the full sum
        let sums = [(x + y, "a + b = 0"), (x + z, "a = c"), (y + z, "b = c"), (x + y + z, "a + b = c")];
        if let Some((_, why)) = sums.iter().find(|(s, _)| *s == 0) {
            return fails(ConditionFailure::new(Rule::Cor1iii, "iii", *why));
        }
        return holds(Rule::Cor1iii, None, evidence);
    }
    if a_plus_b == 0 {
        let rule = if n < m { Rule::Cor1i } else { Rule::Cor1ii };
        return fails(ConditionFailure::new(rule, "a+b", "a + b = 0"));
    }
    if n < m {
        let witness = prime_factors(c.unsigned_abs()).into_iter().find(|&p| residue(a_plus_b, p) != 0);
        match witness {
            Some(p) => holds(Rule::Cor1i, Some(p), evidence),
            None => fails(ConditionFailure::new(Rule::Cor1i, "i", "no prime divides c without dividing a + b")),
        }
    } else {
        let witness = prime_factors(a_plus_b.unsigned_abs()).into_iter().find(|&p| residue(c, p) != 0);
        match witness {
            Some(p) => holds(Rule::Cor1ii, Some(p), evidence),
            None => fails(ConditionFailure::new(Rule::Cor1ii, "ii", "no prime divides a + b without dividing c")),
        }
    }
}

/// `a x^n + b y^n = z^{n+1}` with `a + b`, `(n+1)a + b`, `a + (n+1)b` nonzero.
pub fn check_cor2(eq: &Equation) -> Result<Outcome> {
    let (n, coefficients) = power_step_shape(eq, Rule::Cor2)?;
    let [a, b] = coefficients[..] else {
        return Err(Error::shape(Rule::Cor2, "expected two terms of the lower exponent"));
    };
    let k = n as i128 + 1;
    let values = [
        checked(a.checked_add(b), "a + b")?,
        checked(k.checked_mul(a).and_then(|v| v.checked_add(b)), "(n+1)a + b")?,
        checked(k.checked_mul(b).and_then(|v| v.checked_add(a)), "a + (n+1)b")?,
    ];
    const WHY: [&str; 3] = ["a + b = 0", "(n+1)a + b = 0", "a + (n+1)b = 0"];
    if let Some(i) = values.iter().position(|&v| v == 0) {
        return fails(ConditionFailure::new(Rule::Cor2, "cor2", WHY[i]));
    }
    holds(Rule::Cor2, None, Evidence::Corollary2 { n, a, b, values })
}

/// `x^n + y^m = z^k` with unit coefficients and `k ∉ {n, m}`.
pub fn check_cor3(eq: &Equation) -> Result<Outcome> {
    let terms: Vec<(i128, u32)> = eq.terms().map(|t| (t.coefficient, t.exponent)).collect();
    if terms.len() != 3 || terms.iter().any(|(c, _)| c.abs() != 1) {
        return Err(Error::shape(Rule::Cor3, "expected three terms with coefficients ±1"));
    }
    let positives: Vec<u32> = terms.iter().filter(|(c, _)| *c > 0).map(|&(_, e)| e).collect();
    let negatives: Vec<u32> = terms.iter().filter(|(c, _)| *c < 0).map(|&(_, e)| e).collect();
    let (mut pair, k) = match (positives.len(), negatives.len()) {
        (2, 1) => (positives, negatives[0]),
        (1, 2) => (negatives, positives[0]),
        _ => return Err(Error::shape(Rule::Cor3, "all three terms have the same sign")),
    };
    pair.sort_unstable();
    let (n, m) = (pair[0], pair[1]);
    if k == n || k == m {
        return fails(ConditionFailure::new(Rule::Cor3, "k", format!("k = {k} is one of n = {n}, m = {m}")));
    }
    let route = if n != m {
        Rule::T4
    } else if k < n {
        Rule::Cor1ii
    } else if k == n + 1 {
        Rule::Cor2
    } else {
        Rule::T2
    };
    let constants = match constant_solutions(eq) {
        ConstantSolutions::List(v) => v,
        ConstantSolutions::All => unreachable!("unit three-term equations never vanish identically"),
    };
    holds(Rule::Cor3, None, Evidence::Corollary3 { n, m, k, route, constant_solutions: constants })
}

/// Linear single-group equation with a vanishing nonempty subset sum (PR).
pub fn check_rado_linear(eq: &Equation) -> Result<Outcome> {
    if !eq.is_linear() {
        return Err(Error::shape(Rule::RadoLinear, "expected a single linear group"));
    }
    let group = &eq.groups()[0];
    let zero = nonempty_subset_sums(group, DEFAULT_SUBSET_LIMIT)?.into_iter().find(|&(_, s)| s == 0);
    match zero {
        Some((mask, _)) => {
            let coefficients =
                (0..group.size()).filter(|i| mask >> i & 1 == 1).map(|i| group.coefficients[i]).collect();
            holds(
                Rule::RadoLinear,
                None,
                Evidence::RadoSubset { variables: subset_variables(group, mask), coefficients },
            )
        }
        None => fails(ConditionFailure::new(Rule::RadoLinear, "rado", "no nonempty subset of coefficients sums to 0")),
    }
}
