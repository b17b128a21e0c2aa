//! Colorings built from the base-`p` decomposition `n = p^ν·ζ + ρ`.
//!
//! A color records `ρ`, `ν mod M` and `ζ mod p^D`. This is a finite
//! heuristic: a parameter triple passing [`verify_padic`] or [`scan_params`]
//! at some `N` is empirical evidence about `[1..N]` only, never a proof that
//! the equation is not partition regular.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::primes::is_prime;
use crate::enumerate::EnumOptions;
use crate::error::{Error, Result};
use crate::model::Equation;
use crate::search::{build_constraints, verify_coloring, Coloring, ConstraintSet, Verification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PAdicDecomposition {
    pub rho: u64,
    /// Absent exactly when `n = ρ`, i.e. `n < p`.
    pub nu: Option<u32>,
    pub zeta: Option<u64>,
}

impl PAdicDecomposition {
    pub fn reconstruct(&self, p: u64) -> u64 {
        match (self.nu, self.zeta) {
            (Some(nu), Some(zeta)) => p.pow(nu) * zeta + self.rho,
            _ => self.rho,
        }
    }
}

pub fn p_adic_decompose(n: u64, p: u64) -> PAdicDecomposition {
    assert!(n >= 1 && p >= 2, "p_adic_decompose needs n ≥ 1 and p ≥ 2");
    let rho = n % p;
    if n == rho {
        return PAdicDecomposition { rho, nu: None, zeta: None };
    }
    let mut rest = n - rho;
    let mut nu = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        nu += 1;
    }
    PAdicDecomposition { rho, nu: Some(nu), zeta: Some(rest) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PAdicParams {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "D")]
    pub d: u32,
}

impl PAdicParams {
    /// Validates the triple; the color bound must fit in a `u32`.
    pub fn new(p: u64, m: u32, d: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("M must be at least 1".into()));
        }
        let params = PAdicParams { p, m, d };
        params
            .try_color_bound()
            .filter(|&b| b <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidArgument(format!("too many colors for p={p}, M={m}, D={d}")))?;
        Ok(params)
    }

    fn try_color_bound(&self) -> Option<u64> {
        let unit = self.p.checked_pow(self.d)?;
        self.p.checked_mul(self.m as u64)?.checked_mul(unit)?.checked_add(self.p)
    }

    /// `p·M·p^D + p`, the number of available color ids.
    pub fn color_bound(&self) -> u32 {
        self.try_color_bound().expect("validated at construction") as u32
    }
}

/// Color id in `1..=color_bound()`.
///
/// Values below `p` get the ids `1..=p`; the rest are numbered after them by
/// `(ρ, ν mod M, ζ mod p^D)` in mixed radix.
pub fn padic_color(n: u64, params: &PAdicParams) -> u32 {
    let PAdicParams { p, m, d } = *params;
    let dec = p_adic_decompose(n, p);
    match (dec.nu, dec.zeta) {
        (Some(nu), Some(zeta)) => {
            let unit = p.pow(d);
            let class = (dec.rho * m as u64 + (nu % m) as u64) * unit + zeta % unit;
            (p + 1 + class) as u32
        }
        _ => dec.rho as u32 + 1,
    }
}

pub fn padic_coloring(params: &PAdicParams, n: u32) -> Coloring {
    let colors = (1..=n as u64).map(|v| padic_color(v, params)).collect();
    Coloring::new(params.color_bound(), colors).expect("colors lie within the bound")
}

/// Checks the coloring `n ↦ padic_color(n)` on `[1..N]` against the
/// non-constant solutions of `eq`.
pub fn verify_padic(eq: &Equation, params: &PAdicParams, n: u32) -> Result<Verification> {
    let constraints = build_constraints(eq, n, &EnumOptions::new(n as u64))?;
    verify_padic_constraints(&constraints, params)
}

pub fn verify_padic_constraints(constraints: &ConstraintSet, params: &PAdicParams) -> Result<Verification> {
    verify_coloring(&padic_coloring(params, constraints.max_value()), constraints)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "D")]
    pub d: u32,
    /// Distinct colors actually used on `[1..N]`.
    pub colors: u32,
    pub valid_up_to: u32,
}

/// Every passing triple of the grid `p_values × m_values × d_values` at `N`,
/// sorted by colors used, then `p`, `M`, `D`. Non-prime `p` values and
/// triples with too many colors are skipped.
pub fn scan_params(
    eq: &Equation,
    p_values: &[u64],
    m_values: &[u32],
    d_values: &[u32],
    n: u32,
) -> Result<Vec<ScanEntry>> {
    if p_values.is_empty() || m_values.is_empty() || d_values.is_empty() {
        return Err(Error::InvalidArgument("scan ranges must be nonempty".into()));
    }
    let constraints = build_constraints(eq, n, &EnumOptions::new(n as u64))?;
    let grid: Vec<PAdicParams> = p_values
        .iter()
        .flat_map(|&p| m_values.iter().flat_map(move |&m| d_values.iter().map(move |&d| (p, m, d))))
        .filter_map(|(p, m, d)| PAdicParams::new(p, m, d).ok())
        .collect();
    let mut passing: Vec<ScanEntry> = grid
        .par_iter()
        .filter_map(|params| {
            let coloring = padic_coloring(params, n);
            let valid = verify_coloring(&coloring, &constraints).ok()?.valid;
            valid.then(|| {
                let mut used: Vec<u32> = coloring.colors.clone();
                used.sort_unstable();
                used.dedup();
                ScanEntry { p: params.p, m: params.m, d: params.d, colors: used.len() as u32, valid_up_to: n }
            })
        })
        .collect();
    passing.sort_by_key(|e| (e.colors, e.p, e.m, e.d));
    Ok(passing)
}
