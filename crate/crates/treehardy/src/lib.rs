//! Discrete Hardy spaces `T_p` on truncated rooted trees, and the
//! multiplication operators `M_psi: T_p -> T_q` between them.
//!
//! The library computes level means `M_p(n, f)` and truncated `T_p`
//! norms, classifies the exponent regime of an operator, evaluates its
//! norm through a per-level indicator sequence, constructs the witness
//! functions that attain each level value, and decides compactness,
//! isometry, injectivity, invertibility, and fixed-point structure —
//! with every closed form cross-checked against a brute-force search
//! that never reads the formula it validates.
//!
//! Truncation semantics run through everything: a supremum over an
//! infinite tree is reported from finite data as a truncated maximum,
//! tagged [`report::Exactness::Exact`] only when the function's support
//! ends strictly inside the materialized depth.
//!
//! The narrative guide lives in `book/`; its code snippets compile and
//! run as doctests of this crate.

#![forbid(unsafe_code)]

pub mod check;
mod error;
pub mod exponent;
pub mod function;
pub mod guide;
pub mod hardy;
pub mod num;
pub mod operator;
pub mod oracle;
pub mod report;
pub mod tree;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use function::{SymbolGen, TreeFunction};
pub use hardy::{
    growth_bound_margin, inclusion_witness, inequality_chain, level_mean, level_means,
    little_space_tail, tp_norm, TpNorm,
};
pub use num_complex::Complex64;
pub use operator::{
    apply, classify, compactness_report, down_exponent, fixed_point_support, indicator_sequence,
    injectivity_check, invertibility_verdict, is_fixed_point, isometry_verdict, opnorm_formula,
    witness_function, IndicatorSequence, OperatorCase,
};
pub use oracle::{empirical_opnorm, ratio, verify_witness_equality, SearchConfig};
pub use report::{analyze, AnalysisConfig, AnalysisReport, Exactness};
pub use tree::{RootedTree, VertexId};
