use serde::{Deserialize, Serialize};

use super::{ConditionFailure, Evidence, Justification, Outcome, Rule};
use crate::model::Equation;
use crate::parser::parse_equation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnownStatus {
    PR,
    NotPR,
}

/// A published result about one equation or a one-parameter family.
///
/// `template` is an equation in the text syntax; it may contain the
/// placeholder `{k}`, which is instantiated with every exponent occurring in
/// the equation being matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteratureEntry {
    pub template: String,
    pub status: KnownStatus,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteratureRegistry {
    pub entries: Vec<LiteratureEntry>,
}

impl Default for LiteratureRegistry {
    fn default() -> Self {
        LiteratureRegistry {
            entries: vec![
                LiteratureEntry {
                    template: "x - y = z^{k}".into(),
                    status: KnownStatus::PR,
                    citation: "Bergelson, Furstenberg, McCutcheon (1996): IP-sets and polynomial recurrence".into(),
                },
                LiteratureEntry {
                    template: "x + y = z^2".into(),
                    status: KnownStatus::NotPR,
                    citation: "Csikvari, Gyarmati, Sarkozy (2012): Density and Ramsey type results on algebraic equations with restricted solution sets".into(),
                },
            ],
        }
    }
}

impl LiteratureRegistry {
    pub fn with_entry(mut self, entry: LiteratureEntry) -> Self {
        self.entries.push(entry);
        self
    }

    /// First entry matching `eq`, with the placeholder value used.
    pub fn lookup(&self, eq: &Equation) -> Option<(&LiteratureEntry, Option<u32>)> {
        let target = signature(eq);
        let mut exponents: Vec<u32> = eq.groups().iter().map(|g| g.exponent).collect();
        exponents.dedup();
        self.entries.iter().find_map(|entry| {
            let parameters: Vec<Option<u32>> =
                if entry.template.contains("{k}") { exponents.iter().copied().map(Some).collect() } else { vec![None] };
            parameters.into_iter().find_map(|k| {
                let text = match k {
                    Some(k) => entry.template.replace("{k}", &k.to_string()),
                    None => entry.template.clone(),
                };
                let pattern = parse_equation(&text).ok()?;
                let direct = signature(&pattern);
                let flipped = signature(&pattern.negated());
                (target == direct || target == flipped).then_some((entry, k))
            })
        })
    }
}

/// Multiset of `(exponent, coefficient)`; equal signatures mean the equations
/// agree up to renaming variables.
fn signature(eq: &Equation) -> Vec<(u32, i128)> {
    let mut sig: Vec<(u32, i128)> = eq.terms().map(|t| (t.exponent, t.coefficient)).collect();
    sig.sort_unstable();
    sig
}

pub fn check_literature(eq: &Equation) -> Outcome {
    check_literature_with(eq, &LiteratureRegistry::default())
}

pub fn check_literature_with(eq: &Equation, registry: &LiteratureRegistry) -> Outcome {
    match registry.lookup(eq) {
        Some((entry, parameter)) => Outcome::Holds(Justification {
            rule: Rule::Literature,
            witness_prime: None,
            evidence: Evidence::Literature { entry: entry.template.clone(), status: entry.status, parameter },
            citation: Some(entry.citation.clone()),
        }),
        None => Outcome::Fails(ConditionFailure::new(Rule::Literature, "match", "no registry entry matches")),
    }
}
