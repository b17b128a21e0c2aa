//! Exhaustive search for colorings of `[1..N]` without monochromatic solutions.
//!
//! Values are colored in increasing order. Each constraint tracks how many of
//! its members carry each color; once all but its largest member are assigned
//! and agree on a color, that color is removed from the largest member's
//! domain (forward checking). Colors are introduced in order, which breaks the
//! symmetry under permuting color names.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_values, EnumOptions};
use crate::error::{Error, Result};
use crate::model::Equation;

/// Deduplicated value sets of the solutions inside `[1..N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    max_value: u32,
    sets: Vec<Vec<u32>>,
    /// `index[v]`: constraints containing `v`.
    index: Vec<Vec<usize>>,
}

impl ConstraintSet {
    /// Builds a constraint set from arbitrary value sets; each set is sorted,
    /// deduplicated, and the collection is sorted lexicographically.
    pub fn from_sets(max_value: u32, sets: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut normalized: Vec<Vec<u32>> = Vec::new();
        for mut set in sets {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() || set[0] == 0 || *set.last().unwrap() > max_value {
                return Err(Error::InvalidArgument(format!("constraint {set:?} is outside [1..{max_value}]")));
            }
            normalized.push(set);
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut index = vec![Vec::new(); max_value as usize + 1];
        for (ci, set) in normalized.iter().enumerate() {
            for &v in set {
                index[v as usize].push(ci);
            }
        }
        Ok(ConstraintSet { max_value, sets: normalized, index })
    }

    pub fn max_value(&self) -> u32 {
        self.max_value
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn containing(&self, value: u32) -> impl Iterator<Item = &[u32]> {
        self.index[value as usize].iter().map(|&ci| self.sets[ci].as_slice())
    }

    /// The constraints whose members all lie in `[1..n]`.
    pub fn restrict(&self, n: u32) -> ConstraintSet {
        let n = n.min(self.max_value);
        let sets = self.sets.iter().filter(|s| *s.last().unwrap() <= n).cloned();
        ConstraintSet::from_sets(n, sets).expect("subsets of valid constraints are valid")
    }
}

/// Value sets of the solutions of `eq` in `[1..n]`.
///
/// With `opts.exclude_constant` (the default) constant solutions are dropped
/// and every set has at least two members; otherwise a constant solution
/// becomes a singleton set that no coloring can satisfy.
pub fn build_constraints(eq: &Equation, n: u32, opts: &EnumOptions) -> Result<ConstraintSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let opts = EnumOptions { max_value: n as u64, ..*opts };
    let solutions = enumerate_values(eq, &opts)?;
    ConstraintSet::from_sets(n, solutions.into_iter().map(|s| s.into_iter().map(|v| v as u32).collect()))
}

/// Colors of `1..=N` (stored at index `v - 1`), each in `1..=r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    #[serde(rename = "N")]
    pub n: u32,
    pub r: u32,
    pub colors: Vec<u32>,
}

impl Coloring {
    pub fn new(r: u32, colors: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = colors.iter().find(|&&c| c == 0 || c > r) {
            return Err(Error::InvalidArgument(format!("color {bad} outside 1..={r}")));
        }
        Ok(Coloring { n: colors.len() as u32, r, colors })
    }

    pub fn color(&self, value: u32) -> u32 {
        self.colors[value as usize - 1]
    }

    /// Classes of values per color, colors in ascending order.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let mut classes = vec![Vec::new(); self.r as usize];
        for (i, &c) in self.colors.iter().enumerate() {
            classes[c as usize - 1].push(i as u32 + 1);
        }
        classes
    }
}

/// Whether a coloring avoids every constraint; the first monochromatic set
/// (in constraint order) otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub valid: bool,
    pub violation: Option<Vec<u32>>,
}

pub fn verify_coloring(coloring: &Coloring, constraints: &ConstraintSet) -> Result<Verification> {
    if coloring.n < constraints.max_value {
        return Err(Error::InvalidArgument(format!(
            "coloring covers [1..{}] but constraints reach {}",
            coloring.n, constraints.max_value
        )));
    }
    let violation = constraints.sets.iter().find(|set| {
        let first = coloring.color(set[0]);
        set.iter().all(|&v| coloring.color(v) == first)
    });
    Ok(Verification { valid: violation.is_none(), violation: violation.cloned() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    #[serde(with = "secs_opt")]
    pub max_time: Option<Duration>,
}

mod secs_opt {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        d.map(|d| d.as_secs_f64()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map(Duration::from_secs_f64))
    }
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_nodes: None, max_time: None };

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), max_time: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Satisfiable,
    Unsatisfiable,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub witness: Option<Coloring>,
    pub nodes_explored: u64,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
    /// Which limit stopped an exhausted search.
    pub budget_hit: Option<String>,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Depth-first search for an `r`-coloring of `[1..N]` under `constraints`.
pub fn search_constraints(constraints: &ConstraintSet, r: u32, budget: Budget) -> Result<SearchResult> {
    if r == 0 {
        return Err(Error::InvalidArgument("at least one color is required".into()));
    }
    let started = Instant::now();
    let mut search = Search::new(constraints, r as usize);
    let status = search.run(budget, started);
    let elapsed = started.elapsed();
    let budget_hit = search.budget_hit.map(str::to_owned);
    let witness = match status {
        SearchStatus::Satisfiable => {
            let coloring = Coloring::new(r, search.color[1..].iter().map(|&c| c as u32).collect())?;
            let check = verify_coloring(&coloring, constraints)?;
            assert!(check.valid, "search produced an invalid coloring: {:?}", check.violation);
            Some(coloring)
        }
        _ => None,
    };
    Ok(SearchResult { status, witness, nodes_explored: search.nodes, elapsed, budget_hit })
}

/// Builds the constraints of `eq` on `[1..n]` (constant solutions excluded)
/// and searches for an `r`-coloring avoiding them.
pub fn search_coloring(eq: &Equation, r: u32, n: u32, budget: Budget) -> Result<SearchResult> {
    let constraints = build_constraints(eq, n, &EnumOptions::new(n as u64))?;
    search_constraints(&constraints, r, budget)
}

struct Search<'a> {
    cs: &'a ConstraintSet,
    r: usize,
    n: usize,
    /// `color[v]` in `1..=r`, 0 when unassigned; index 0 unused.
    color: Vec<u8>,
    /// `counts[ci * r + c]`: assigned members of constraint `ci` with color `c + 1`.
    counts: Vec<u32>,
    assigned: Vec<u32>,
    /// `forbid[v * r + c]`: number of constraints currently excluding color `c + 1` at `v`.
    forbid: Vec<u32>,
    /// Forbid entries added per assignment, for undo.
    trail: Vec<(usize, usize)>,
    trail_marks: Vec<usize>,
    nodes: u64,
    budget_hit: Option<&'static str>,
}

impl<'a> Search<'a> {
    fn new(cs: &'a ConstraintSet, r: usize) -> Self {
        let n = cs.max_value as usize;
        Search {
            cs,
            r,
            n,
            color: vec![0; n + 1],
            counts: vec![0; cs.sets.len() * r],
            assigned: vec![0; cs.sets.len()],
            forbid: vec![0; (n + 1) * r],
            trail: Vec::new(),
            trail_marks: vec![0; n + 1],
            nodes: 0,
            budget_hit: None,
        }
    }

    /// Assigns color `c` (0-based) to `v`; returns false on conflict, in which
    /// case the assignment has already been undone.
    fn assign(&mut self, v: usize, c: usize) -> bool {
        self.color[v] = c as u8 + 1;
        self.trail_marks[v] = self.trail.len();
        let mut ok = true;
        let mut touched = 0;
        for &ci in &self.cs.index[v] {
            touched += 1;
            let set = &self.cs.sets[ci];
            let size = set.len() as u32;
            self.assigned[ci] += 1;
            self.counts[ci * self.r + c] += 1;
            let same = self.counts[ci * self.r + c];
            if same == size {
                ok = false;
                break;
            }
            if self.assigned[ci] == size - 1 && same == size - 1 {
                let last = *set.last().unwrap() as usize;
                self.forbid[last * self.r + c] += 1;
                self.trail.push((last, c));
                if self.forbid[last * self.r..(last + 1) * self.r].iter().all(|&f| f > 0) {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            self.unassign_partial(v, c, touched);
        }
        ok
    }

    fn unassign_partial(&mut self, v: usize, c: usize, touched: usize) {
        for &ci in &self.cs.index[v][..touched] {
            self.assigned[ci] -= 1;
            self.counts[ci * self.r + c] -= 1;
        }
        let mark = self.trail_marks[v];
        for (u, k) in self.trail.drain(mark..) {
            self.forbid[u * self.r + k] -= 1;
        }
        self.color[v] = 0;
    }

    fn unassign(&mut self, v: usize) {
        let c = self.color[v] as usize - 1;
        let touched = self.cs.index[v].len();
        self.unassign_partial(v, c, touched);
    }

    fn over_budget(&mut self, budget: &Budget, started: Instant) -> bool {
        if let Some(max) = budget.max_nodes {
            if self.nodes >= max {
                self.budget_hit = Some("max_nodes");
                return true;
            }
        }
        if let Some(max) = budget.max_time {
            if self.nodes.is_multiple_of(1024) && started.elapsed() >= max {
                self.budget_hit = Some("max_time");
                return true;
            }
        }
        false
    }

    fn run(&mut self, budget: Budget, started: Instant) -> SearchStatus {
        if self.cs.sets.iter().any(|s| s.len() < 2) {
            return SearchStatus::Unsatisfiable;
        }
        if self.n == 0 {
            return SearchStatus::Satisfiable;
        }
        // next[v]: next 0-based color to try at v; prefix_max[v]: colors used in 1..v
        let mut next = vec![0usize; self.n + 2];
        let mut prefix_max = vec![0usize; self.n + 2];
        let mut v = 1;
        loop {
            let limit = (prefix_max[v] + 1).min(self.r);
            let mut placed = false;
            while next[v] < limit {
                let c = next[v];
                next[v] += 1;
                if self.forbid[v * self.r + c] > 0 {
                    continue;
                }
                if self.over_budget(&budget, started) {
                    return SearchStatus::Exhausted;
                }
                self.nodes += 1;
                if self.assign(v, c) {
                    placed = true;
                    break;
                }
            }
            if placed {
                if v == self.n {
                    return SearchStatus::Satisfiable;
                }
                prefix_max[v + 1] = prefix_max[v].max(self.color[v] as usize);
                v += 1;
                next[v] = 0;
            } else {
                if v == 1 {
                    return SearchStatus::Unsatisfiable;
                }
                v -= 1;
                self.unassign(v);
            }
        }
    }
}

/// Outcome of [`rado_threshold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Threshold {
    /// Smallest `N` at which every `r`-coloring has a monochromatic solution.
    Found { n: u32 },
    /// Every `N ≤ max_n` admits a valid coloring.
    NoneUpTo { max_n: u32 },
    /// The search at `n` ran out of budget; all smaller `N` were colorable.
    BudgetExhausted { n: u32 },
}

/// Smallest `N ≤ max_n` with no valid `r`-coloring of `[1..N]`.
///
/// Constraints are enumerated once at `max_n` and restricted for each `N`.
pub fn rado_threshold(eq: &Equation, r: u32, max_n: u32, budget: Budget) -> Result<Threshold> {
    rado_threshold_with(eq, r, max_n, &EnumOptions::new(max_n as u64), budget)
}

/// [`rado_threshold`] with explicit constraint options (`max_value` is ignored).
pub fn rado_threshold_with(eq: &Equation, r: u32, max_n: u32, opts: &EnumOptions, budget: Budget) -> Result<Threshold> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    let all = build_constraints(eq, max_n, opts)?;
    let mut previous_len = usize::MAX;
    for n in 1..=max_n {
        let constraints = all.restrict(n);
        // No new constraints means the previous witness extends.
        if constraints.len() == previous_len {
            continue;
        }
        previous_len = constraints.len();
        match search_constraints(&constraints, r, budget)?.status {
            SearchStatus::Unsatisfiable => return Ok(Threshold::Found { n }),
            SearchStatus::Exhausted => return Ok(Threshold::BudgetExhausted { n }),
            SearchStatus::Satisfiable => {}
        }
    }
    Ok(Threshold::NoneUpTo { max_n })
}
