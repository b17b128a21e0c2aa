//! Canonical representation of Fermat-like equations.
//!
//! An [`Equation`] is a sum of monomials `a * x^n = 0`, one variable per
//! monomial, grouped by exponent. Groups are kept in strictly increasing
//! exponent order and the overall sign is normalized so that the sum of the
//! top group's coefficients is positive (or, when that sum vanishes, its first
//! coefficient is).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::enumerate::checked_pow;
use crate::error::{Error, Result};

/// Largest group size for which all nonempty subset sums are enumerated.
pub const DEFAULT_SUBSET_LIMIT: usize = 24;

/// One monomial `coefficient * variable^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coefficient: i128,
    pub variable: String,
    pub exponent: u32,
}

impl Term {
    pub fn new(coefficient: i128, variable: impl Into<String>, exponent: u32) -> Result<Self> {
        let term = Term { coefficient, variable: variable.into(), exponent };
        term.validate()?;
        Ok(term)
    }

    fn validate(&self) -> Result<()> {
        if self.coefficient == 0 {
            return Err(Error::InvalidTerm(format!("zero coefficient on `{}`", self.variable)));
        }
        if self.exponent == 0 {
            return Err(Error::InvalidTerm(format!("zero exponent on `{}`", self.variable)));
        }
        if self.variable.is_empty() {
            return Err(Error::InvalidTerm("empty variable name".into()));
        }
        Ok(())
    }
}

/// All terms of an equation sharing one exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentGroup {
    pub exponent: u32,
    pub coefficients: Vec<i128>,
    pub variables: Vec<String>,
}

impl ExponentGroup {
    pub fn size(&self) -> usize {
        self.coefficients.len()
    }

    pub fn sum(&self) -> i128 {
        // Equation construction guarantees the absolute coefficient mass fits.
        self.coefficients.iter().sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.coefficients.iter().zip(&self.variables).map(move |(&coefficient, variable)| Term {
            coefficient,
            variable: variable.clone(),
            exponent: self.exponent,
        })
    }
}

/// `Σ_ℓ Σ_i a_{ℓ,i} x_{ℓ,i}^{n_ℓ} = 0` with `n_1 < … < n_h`.
#[derive(Debug, Clone, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEquation")]
pub struct Equation {
    groups: Vec<ExponentGroup>,
    #[serde(skip)]
    source_text: Option<String>,
}

#[derive(Deserialize)]
struct RawEquation {
    groups: Vec<ExponentGroup>,
}

impl TryFrom<RawEquation> for Equation {
    type Error = Error;

    fn try_from(raw: RawEquation) -> Result<Self> {
        Equation::from_groups(raw.groups)
    }
}

/// Equality ignores the source text.
impl PartialEq for Equation {
    fn eq(&self, other: &Self) -> bool {
        self.groups == other.groups
    }
}

impl std::hash::Hash for Equation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.groups.hash(state);
    }
}

impl Equation {
    /// Builds an equation from already grouped terms, checking every structural
    /// invariant. No sign normalization is applied.
    pub fn from_groups(groups: Vec<ExponentGroup>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::EmptyEquation);
        }
        let mut seen = HashSet::new();
        for (idx, group) in groups.iter().enumerate() {
            if group.exponent == 0 {
                return Err(Error::InvalidEquation("exponent 0".into()));
            }
            if idx > 0 && groups[idx - 1].exponent >= group.exponent {
                return Err(Error::InvalidEquation("group exponents must be strictly increasing".into()));
            }
            if group.coefficients.is_empty() || group.coefficients.len() != group.variables.len() {
                return Err(Error::InvalidEquation(format!(
                    "group with exponent {} has {} coefficients and {} variables",
                    group.exponent,
                    group.coefficients.len(),
                    group.variables.len()
                )));
            }
            if group.coefficients.contains(&0) {
                return Err(Error::InvalidEquation("zero coefficient".into()));
            }
            for var in &group.variables {
                if var.is_empty() {
                    return Err(Error::InvalidEquation("empty variable name".into()));
                }
                if !seen.insert(var.as_str()) {
                    return Err(Error::DuplicateVariable(var.clone()));
                }
            }
            check_group_mass(&group.coefficients)?;
        }
        Ok(Equation { groups, source_text: None })
    }

    pub fn groups(&self) -> &[ExponentGroup] {
        &self.groups
    }

    pub fn source_text(&self) -> Option<&str> {
        self.source_text.as_deref()
    }

    pub fn with_source_text(mut self, text: impl Into<String>) -> Self {
        self.source_text = Some(text.into());
        self
    }

    /// Number of variables (terms).
    pub fn arity(&self) -> usize {
        self.groups.iter().map(ExponentGroup::size).sum()
    }

    /// Variables in canonical order: by group, then by position in group.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().flat_map(|g| g.variables.iter().map(String::as_str))
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.groups.iter().flat_map(ExponentGroup::terms)
    }

    /// `true` when every group has exponent 1, i.e. the equation is linear.
    pub fn is_linear(&self) -> bool {
        self.groups.len() == 1 && self.groups[0].exponent == 1
    }

    /// Same equation multiplied by −1 (not re-normalized).
    pub fn negated(&self) -> Self {
        Equation {
            groups: self
                .groups
                .iter()
                .map(|g| ExponentGroup {
                    exponent: g.exponent,
                    // Group mass fits in i128, so no coefficient is i128::MIN.
                    coefficients: g.coefficients.iter().map(|c| -c).collect(),
                    variables: g.variables.clone(),
                })
                .collect(),
            source_text: self.source_text.clone(),
        }
    }

    /// `{"groups":[{"exponent":…,"coefficients":[…],"variables":[…]},…]}`
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("equation serializes")
    }
}

fn check_group_mass(coefficients: &[i128]) -> Result<()> {
    coefficients
        .iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c.unsigned_abs()))
        .filter(|&mass| mass <= i128::MAX as u128)
        .map(|_| ())
        .ok_or_else(|| Error::overflow("coefficient mass of an exponent group"))
}

/// Moves `rhs` to the left, groups by exponent and normalizes the sign.
///
/// Within a group, terms keep their input order (left side first).
pub fn canonicalize(lhs: &[Term], rhs: &[Term]) -> Result<Equation> {
    if lhs.is_empty() && rhs.is_empty() {
        return Err(Error::EmptyEquation);
    }
    let mut seen = HashSet::new();
    let mut buckets: BTreeMap<u32, ExponentGroup> = BTreeMap::new();
    let signed = lhs.iter().map(|t| (t, false)).chain(rhs.iter().map(|t| (t, true)));
    for (term, negate) in signed {
        term.validate()?;
        if !seen.insert(term.variable.as_str()) {
            return Err(Error::DuplicateVariable(term.variable.clone()));
        }
        let coefficient = if negate {
            term.coefficient.checked_neg().ok_or_else(|| Error::overflow("negating a right-hand coefficient"))?
        } else {
            term.coefficient
        };
        let group = buckets.entry(term.exponent).or_insert_with(|| ExponentGroup {
            exponent: term.exponent,
            coefficients: Vec::new(),
            variables: Vec::new(),
        });
        group.coefficients.push(coefficient);
        group.variables.push(term.variable.clone());
    }
    let mut groups: Vec<ExponentGroup> = buckets.into_values().collect();
    for group in &groups {
        check_group_mass(&group.coefficients)?;
    }

    let top = groups.last().expect("at least one term");
    let top_sum = top.sum();
    let flip = top_sum < 0 || (top_sum == 0 && top.coefficients[0] < 0);
    if flip {
        for group in &mut groups {
            for c in &mut group.coefficients {
                *c = -*c;
            }
        }
    }
    Equation::from_groups(groups)
}

/// Coefficient sum of each exponent group, in group order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSums {
    pub sums: Vec<i128>,
}

pub fn group_sums(eq: &Equation) -> GroupSums {
    GroupSums { sums: eq.groups.iter().map(ExponentGroup::sum).collect() }
}

/// All `2^s − 1` nonempty subset sums of a group, indexed by bit masks
/// (bit `i` selects the `i`-th term), in increasing mask order.
pub fn nonempty_subset_sums(group: &ExponentGroup, limit: usize) -> Result<Vec<(u64, i128)>> {
    let size = group.size();
    if size > limit || size >= 64 {
        return Err(Error::SubsetLimitExceeded { size, limit });
    }
    let count = 1usize << size;
    let mut sums = vec![0i128; count];
    for mask in 1..count {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + group.coefficients[low];
    }
    Ok(sums.into_iter().enumerate().skip(1).map(|(m, s)| (m as u64, s)).collect())
}

/// Result of [`constant_solutions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstantSolutions {
    /// Every positive integer is a constant solution (all group sums vanish).
    All,
    List(Vec<u128>),
}

impl ConstantSolutions {
    pub fn contains(&self, a: u128) -> bool {
        match self {
            ConstantSolutions::All => true,
            ConstantSolutions::List(values) => values.contains(&a),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ConstantSolutions::List(v) if v.is_empty())
    }
}

impl Serialize for ConstantSolutions {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ConstantSolutions::All => serializer.serialize_str("all"),
            ConstantSolutions::List(values) => values.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ConstantSolutions {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ConstantsVisitor;

        impl<'de> serde::de::Visitor<'de> for ConstantsVisitor {
            type Value = ConstantSolutions;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("\"all\" or a list of positive integers")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                match v {
                    "all" => Ok(ConstantSolutions::All),
                    other => Err(E::custom(format!("unexpected tag `{other}`"))),
                }
            }

            fn visit_seq<A: serde::de::SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<u128>()? {
                    values.push(v);
                }
                Ok(ConstantSolutions::List(values))
            }
        }

        deserializer.deserialize_any(ConstantsVisitor)
    }
}

/// Positive integers `a` such that assigning `a` to every variable solves `eq`,
/// i.e. the positive integer roots of `Σ_ℓ S_ℓ a^{n_ℓ}`.
pub fn constant_solutions(eq: &Equation) -> ConstantSolutions {
    let terms: Vec<(u32, i128)> = eq.groups.iter().map(|g| (g.exponent, g.sum())).filter(|&(_, s)| s != 0).collect();
    if terms.is_empty() {
        return ConstantSolutions::All;
    }
    if terms.len() == 1 {
        return ConstantSolutions::List(Vec::new());
    }
    // Divide out the lowest power; the remaining polynomial has a nonzero
    // constant term that every positive integer root must divide.
    let low_exp = terms[0].0;
    let shifted: Vec<(u32, i128)> = terms.iter().map(|&(n, s)| (n - low_exp, s)).collect();
    if let [(_, low), (degree, high)] = shifted[..] {
        // low + high * a^degree = 0
        if (low < 0) == (high < 0) || low % high != 0 {
            return ConstantSolutions::List(Vec::new());
        }
        let target = (low / high).unsigned_abs();
        let root = num_integer::Roots::nth_root(&target, degree);
        let exact = root.checked_pow(degree) == Some(target);
        return ConstantSolutions::List(if exact { vec![root] } else { Vec::new() });
    }
    let constant = shifted[0].1.unsigned_abs();
    let (_, top) = *shifted.last().unwrap();
    let top = top.unsigned_abs();
    let max_lower = shifted[..shifted.len() - 1].iter().map(|(_, s)| s.unsigned_abs()).max().unwrap();
    let cauchy = max_lower.div_ceil(top).saturating_add(1);

    let candidates: Vec<u128> = if cauchy <= num_integer::Roots::sqrt(&constant).saturating_mul(2) {
        (1..=cauchy).filter(|a| constant.is_multiple_of(*a)).collect()
    } else {
        let mut divisors = Vec::new();
        let mut d = 1u128;
        while d * d <= constant {
            if constant.is_multiple_of(d) {
                divisors.push(d);
                divisors.push(constant / d);
            }
            d += 1;
        }
        divisors.retain(|&a| a <= cauchy);
        divisors.sort_unstable();
        divisors.dedup();
        divisors
    };
    let roots = candidates.into_iter().filter(|&a| poly_vanishes(&shifted, a)).collect();
    ConstantSolutions::List(roots)
}

fn poly_vanishes(terms: &[(u32, i128)], a: u128) -> bool {
    let fast = i128::try_from(a).ok().and_then(|a| {
        terms.iter().try_fold(0i128, |acc, &(n, s)| {
            let power = checked_pow(a, n).ok()?;
            acc.checked_add(s.checked_mul(power)?)
        })
    });
    match fast {
        Some(value) => value == 0,
        None => {
            let a = BigInt::from(a);
            let value: BigInt = terms.iter().map(|&(n, s)| BigInt::from(s) * a.pow(n)).sum();
            value == BigInt::from(0)
        }
    }
}

/// Assignment of positive integers to variables, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionTuple {
    entries: Vec<(String, u64)>,
}

impl SolutionTuple {
    pub fn new(entries: Vec<(String, u64)>) -> Self {
        SolutionTuple { entries }
    }

    /// Pairs `values` with the variables of `eq` in canonical order.
    pub fn from_values(eq: &Equation, values: &[u64]) -> Self {
        SolutionTuple { entries: eq.variables().map(str::to_owned).zip(values.iter().copied()).collect() }
    }

    pub fn get(&self, variable: &str) -> Option<u64> {
        self.entries.iter().find(|(v, _)| v == variable).map(|&(_, value)| value)
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(_, v)| v)
    }
}

impl Serialize for SolutionTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (var, value) in &self.entries {
            map.serialize_entry(var, value)?;
        }
        map.end()
    }
}

impl fmt::Display for SolutionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(v, x)| format!("{v}={x}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Exact value of the left-hand side at `t`.
pub fn evaluate(eq: &Equation, t: &SolutionTuple) -> Result<i128> {
    let mut total = 0i128;
    for term in eq.terms() {
        let value = t.get(&term.variable).ok_or_else(|| Error::MissingVariable(term.variable.clone()))?;
        if value == 0 {
            return Err(Error::InvalidArgument(format!("`{}` assigned 0", term.variable)));
        }
        let power = checked_pow(value as i128, term.exponent)?;
        let product = term.coefficient.checked_mul(power).ok_or_else(|| Error::overflow("term value"))?;
        total = total.checked_add(product).ok_or_else(|| Error::overflow("equation value"))?;
    }
    Ok(total)
}

/// `true` iff all assigned values coincide.
pub fn is_constant(t: &SolutionTuple) -> bool {
    let mut values = t.values();
    match values.next() {
        Some(first) => values.all(|v| v == first),
        None => true,
    }
}
