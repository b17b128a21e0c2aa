//! Certificates of (non-)partition regularity.
//!
//! Each `check_*` function tests the hypotheses of one criterion against an
//! [`Equation`] and returns either a [`Justification`] carrying the evidence
//! that was checked, or a [`ConditionFailure`] naming the first hypothesis
//! that does not hold. [`classify`] runs every applicable check and folds the
//! results into a [`Certificate`].
//!
//! Non-PR verdicts always mean "not partition regular except possibly for
//! constant solutions"; the constant solutions are listed on every
//! certificate.

mod literature;
pub mod primes;
mod theorems;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{constant_solutions, nonempty_subset_sums, ConstantSolutions, Equation, DEFAULT_SUBSET_LIMIT};

pub use literature::{check_literature, check_literature_with, KnownStatus, LiteratureEntry, LiteratureRegistry};
pub use theorems::{
    check_cor1, check_cor2, check_cor3, check_rado_linear, check_theorem1, check_theorem2, check_theorem3,
    check_theorem4,
};

/// Default bound for witness-prime searches.
pub const DEFAULT_P_MAX: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    T1,
    T2,
    T3,
    T4,
    Cor1i,
    Cor1ii,
    Cor1iii,
    Cor2,
    Cor3,
    RadoLinear,
    Literature,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::T1 => "T1",
            Rule::T2 => "T2",
            Rule::T3 => "T3",
            Rule::T4 => "T4",
            Rule::Cor1i => "Cor1i",
            Rule::Cor1ii => "Cor1ii",
            Rule::Cor1iii => "Cor1iii",
            Rule::Cor2 => "Cor2",
            Rule::Cor3 => "Cor3",
            Rule::RadoLinear => "RadoLinear",
            Rule::Literature => "Literature",
        }
    }

    /// Rules whose success certifies non-partition-regularity.
    pub fn proves_not_pr(self) -> bool {
        !matches!(self, Rule::RadoLinear | Rule::Literature)
    }

    pub fn carries_prime(self) -> bool {
        matches!(self, Rule::T1 | Rule::T2 | Rule::Cor1i | Rule::Cor1ii)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_RULES
            .iter()
            .copied()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rule `{s}`")))
    }
}

const ALL_RULES: [Rule; 11] = [
    Rule::T1,
    Rule::T2,
    Rule::T3,
    Rule::T4,
    Rule::Cor1i,
    Rule::Cor1ii,
    Rule::Cor1iii,
    Rule::Cor2,
    Rule::Cor3,
    Rule::RadoLinear,
    Rule::Literature,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NotPR,
    PRByRado,
    KnownPR,
    KnownNotPR,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::NotPR => "NotPR",
            Verdict::PRByRado => "PRByRado",
            Verdict::KnownPR => "KnownPR",
            Verdict::KnownNotPR => "KnownNotPR",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

/// Residue of `Σ_ℓ S_ℓ ρ^{n_ℓ}` for one tested `ρ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueValue {
    pub rho: u64,
    pub value: u64,
}

/// Subset sums of one group that were required not to be divisible by `modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityCheck {
    pub group: usize,
    pub exponent: u32,
    /// `p^(n_ℓ' − n_ℓ)`; absent when it exceeds the i128 range (and so divides
    /// no nonzero subset sum).
    pub modulus: Option<i128>,
    pub subset_sums: Vec<i128>,
}

/// What was checked for a successful rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
/// Serialized as `{"kind": ..., "data": {...}}`; the tag comes first so
/// 128-bit fields deserialize without buffering.
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Evidence {
    Theorem1 {
        group_sums: Vec<i128>,
        /// Per group, all nonempty subset sums reduced mod p (all nonzero).
        subset_residues: Vec<Vec<u64>>,
        residues: Vec<ResidueValue>,
    },
    Theorem2 {
        group_sums: Vec<i128>,
        /// Index (0-based) of the unique group whose sum is not divisible by p.
        distinguished_group: usize,
        distinguished_exponent: u32,
        lower_groups: Vec<DivisibilityCheck>,
    },
    Theorem3 {
        exponent: u32,
        coefficients: Vec<i128>,
        /// `(mask, Σ_{i∈Γ} a_i, Σ a_i + n Σ_{i∉Γ} a_i)` for every nonempty Γ.
        subsets: Vec<(u64, i128, i128)>,
    },
    Theorem4 {
        coefficients: Vec<i128>,
        exponents: Vec<u32>,
    },
    Corollary1 {
        /// `a x^n + b y^n = c z^m`
        n: u32,
        m: u32,
        a: i128,
        b: i128,
        c: i128,
        a_plus_b: i128,
    },
    Corollary2 {
        n: u32,
        a: i128,
        b: i128,
        /// `[a + b, (n+1)a + b, a + (n+1)b]`
        values: [i128; 3],
    },
    Corollary3 {
        n: u32,
        m: u32,
        k: u32,
        route: Rule,
        constant_solutions: Vec<u128>,
    },
    RadoSubset {
        variables: Vec<String>,
        coefficients: Vec<i128>,
    },
    Literature {
        entry: String,
        status: KnownStatus,
        parameter: Option<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub rule: Rule,
    #[serde(rename = "prime")]
    pub witness_prime: Option<u64>,
    pub evidence: Evidence,
    pub citation: Option<String>,
}

/// The first hypothesis of a rule that fails for an equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFailure {
    pub rule: Rule,
    /// Which hypothesis failed, e.g. `"1"`, `"2"`, `"iii"`, or `"match"`.
    pub condition: String,
    pub reason: String,
    /// Variables of the violating subset Γ, when the failure is a subset sum.
    pub subset: Option<Vec<String>>,
    /// The violating residue ρ, when the failure is a polynomial congruence.
    pub rho: Option<u64>,
}

impl ConditionFailure {
    pub(crate) fn new(rule: Rule, condition: &str, reason: impl Into<String>) -> Self {
        ConditionFailure { rule, condition: condition.into(), reason: reason.into(), subset: None, rho: None }
    }

    pub(crate) fn with_subset(mut self, subset: Vec<String>) -> Self {
        self.subset = Some(subset);
        self
    }

    pub(crate) fn with_rho(mut self, rho: u64) -> Self {
        self.rho = Some(rho);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Holds(Justification),
    Fails(ConditionFailure),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds(_))
    }

    pub fn justification(self) -> Option<Justification> {
        match self {
            Outcome::Holds(j) => Some(j),
            Outcome::Fails(_) => None,
        }
    }

    pub fn failure(self) -> Option<ConditionFailure> {
        match self {
            Outcome::Holds(_) => None,
            Outcome::Fails(f) => Some(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub equation: Equation,
    pub verdict: Verdict,
    pub justifications: Vec<Justification>,
    pub constant_solutions: ConstantSolutions,
}

impl Certificate {
    pub fn rules(&self) -> Vec<Rule> {
        self.justifications.iter().map(|j| j.rule).collect()
    }

    pub fn has_rule(&self, rule: Rule) -> bool {
        self.justifications.iter().any(|j| j.rule == rule)
    }

    pub fn justification(&self, rule: Rule) -> Option<&Justification> {
        self.justifications.iter().find(|j| j.rule == rule)
    }

    /// First witness prime among the justifications, in certificate order.
    pub fn witness_prime(&self) -> Option<u64> {
        self.justifications.iter().find_map(|j| j.witness_prime)
    }
}

fn require_prime(p: u64) -> Result<()> {
    if primes::is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Nonempty subset sums of every group of `eq`.
pub(crate) fn all_subset_sums(eq: &Equation) -> Result<Vec<Vec<(u64, i128)>>> {
    eq.groups().iter().map(|g| nonempty_subset_sums(g, DEFAULT_SUBSET_LIMIT)).collect()
}

/// Candidate primes for a witness search: all primes `≤ p_max`, plus for T2
/// the prime factors of every nonzero group sum.
fn witness_candidates(eq: &Equation, rule: Rule, p_max: u64) -> Vec<u64> {
    let mut candidates = primes::primes_up_to(p_max);
    if rule == Rule::T2 {
        for g in eq.groups() {
            let s = g.sum();
            if s != 0 {
                candidates.extend(primes::prime_factors(s.unsigned_abs()));
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    candidates
}

/// Smallest prime for which `rule` (T1 or T2) succeeds, with its justification.
///
/// Candidate primes are tested in parallel; the smallest success is returned
/// regardless of scheduling.
pub fn find_witness(eq: &Equation, rule: Rule, p_max: u64) -> Result<Option<Justification>> {
    if p_max < 2 {
        return Err(Error::InvalidArgument("p_max must be at least 2".into()));
    }
    let subsets = all_subset_sums(eq)?;
    let candidates = witness_candidates(eq, rule, p_max);
    let check = |p: u64| match rule {
        Rule::T1 => theorems::theorem1_with(eq, &subsets, p),
        Rule::T2 => theorems::theorem2_with(eq, &subsets, p),
        other => unreachable!("{other} has no witness prime search"),
    };
    if !matches!(rule, Rule::T1 | Rule::T2) {
        return Err(Error::InvalidArgument(format!("witness search is defined for T1 and T2, not {rule}")));
    }
    Ok(candidates.par_iter().map(|&p| check(p)).find_first(Outcome::holds).and_then(Outcome::justification))
}

pub fn find_witness_prime(eq: &Equation, rule: Rule, p_max: u64) -> Result<Option<u64>> {
    Ok(find_witness(eq, rule, p_max)?.and_then(|j| j.witness_prime))
}

/// Runs a shape-dependent check, treating a shape mismatch as "not applicable".
fn applicable(result: Result<Outcome>) -> Result<Option<Justification>> {
    match result {
        Ok(outcome) => Ok(outcome.justification()),
        Err(Error::ShapeMismatch { .. }) => Ok(None),
        Err(other) => Err(other),
    }
}

/// Runs every applicable criterion and combines the successes.
///
/// Justification order: RadoLinear, Literature, Cor3, Cor2, Cor1, T3, T4, T1,
/// T2. Verdict precedence: PRByRado, KnownPR, NotPR, KnownNotPR, Unknown.
pub fn classify(eq: &Equation, p_max: u64) -> Result<Certificate> {
    classify_with(eq, p_max, &LiteratureRegistry::default())
}

pub fn classify_with(eq: &Equation, p_max: u64, registry: &LiteratureRegistry) -> Result<Certificate> {
    if p_max < 2 {
        return Err(Error::InvalidArgument("p_max must be at least 2".into()));
    }
    let mut justifications = Vec::new();
    let mut push = |j: Option<Justification>| {
        if let Some(j) = j {
            justifications.push(j);
        }
    };
    push(applicable(check_rado_linear(eq))?);
    push(check_literature_with(eq, registry).justification());
    push(applicable(check_cor3(eq))?);
    push(applicable(check_cor2(eq))?);
    push(applicable(check_cor1(eq, p_max))?);
    push(applicable(check_theorem3(eq))?);
    push(applicable(check_theorem4(eq))?);
    push(find_witness(eq, Rule::T1, p_max)?);
    push(find_witness(eq, Rule::T2, p_max)?);

    let literature_status = justifications.iter().find_map(|j| match &j.evidence {
        Evidence::Literature { status, .. } => Some(*status),
        _ => None,
    });
    let verdict = if justifications.iter().any(|j| j.rule == Rule::RadoLinear) {
        Verdict::PRByRado
    } else if literature_status == Some(KnownStatus::PR) {
        Verdict::KnownPR
    } else if justifications.iter().any(|j| j.rule.proves_not_pr()) {
        Verdict::NotPR
    } else if literature_status == Some(KnownStatus::NotPR) {
        Verdict::KnownNotPR
    } else {
        Verdict::Unknown
    };
    Ok(Certificate { equation: eq.clone(), verdict, justifications, constant_solutions: constant_solutions(eq) })
}

/// Re-runs the check named by `j` on `eq` and reports whether it reproduces
/// `j` exactly.
pub fn replay(eq: &Equation, j: &Justification, p_max: u64) -> Result<bool> {
    let outcome = match j.rule {
        Rule::T1 | Rule::T2 => {
            let p = j.witness_prime.ok_or_else(|| Error::InvalidArgument("missing witness prime".into()))?;
            if j.rule == Rule::T1 {
                check_theorem1(eq, p)?
            } else {
                check_theorem2(eq, p)?
            }
        }
        Rule::T3 => check_theorem3(eq)?,
        Rule::T4 => check_theorem4(eq)?,
        Rule::Cor1i | Rule::Cor1ii | Rule::Cor1iii => check_cor1(eq, p_max)?,
        Rule::Cor2 => check_cor2(eq)?,
        Rule::Cor3 => check_cor3(eq)?,
        Rule::RadoLinear => check_rado_linear(eq)?,
        Rule::Literature => check_literature(eq),
    };
    Ok(outcome.justification().as_ref() == Some(j))
}
