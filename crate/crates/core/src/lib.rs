//! Partition-regularity certificates, solution enumeration and coloring
//! search for Fermat-like equations `Σ a_i x_i^{n_i} = 0`.

pub mod certify;
pub mod enumerate;
pub mod error;
pub mod model;
pub mod padic;
pub mod parser;
pub mod search;

pub use certify::{
    classify, classify_with, find_witness, find_witness_prime, replay, Certificate, Evidence, Justification,
    KnownStatus, LiteratureRegistry, Outcome, Rule, Verdict, DEFAULT_P_MAX,
};
pub use enumerate::{enumerate_solutions, enumerate_values, EnumOptions};
pub use error::{Error, Result};
pub use model::{
    canonicalize, constant_solutions, evaluate, group_sums, ConstantSolutions, Equation, ExponentGroup, SolutionTuple,
    Term, DEFAULT_SUBSET_LIMIT,
};
pub use padic::{p_adic_decompose, padic_color, scan_params, verify_padic, PAdicDecomposition, PAdicParams, ScanEntry};
pub use parser::{format_equation, parse_equation, ParseError, ParseErrorKind};
pub use search::{
    build_constraints, rado_threshold, rado_threshold_with, search_coloring, search_constraints, verify_coloring,
    Budget, Coloring, ConstraintSet, SearchResult, SearchStatus, Threshold,
};
