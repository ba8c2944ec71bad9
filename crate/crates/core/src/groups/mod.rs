//! Permutation sets, their indicatrix polynomials and the fixed-point
//! proportions of iterated wreath products.
//!
//! An indicatrix `Φ_Γ(x) = (1/#Γ) Σ_γ x^{tr γ}` records how many points each
//! element fixes. Indicatrices compose under wreath products, so the
//! fixed-point proportion of the `n`-fold iterated wreath product `[G]ⁿ` is
//! `1 − Φ_Gⁿ(0)`, an iteration on a single polynomial.

mod fpp;
mod indicatrix;
mod perm;
mod verify;

use thiserror::Error;

pub use fpp::{fpp_coset_iterated, fpp_sequence, iterate_at_zero, FppMode, FppValue};
pub use indicatrix::{
    closed_form_indicatrix, indicatrix, IndicatrixPolynomial, DEFAULT_BIT_BUDGET,
    MAX_CLOSED_FORM_DEGREE,
};
pub use perm::{
    generate_from, generate_with_budget, is_transitive, make_coset, make_group,
    parse_family_degree, wreath_elements, Family, Permutation, PermutationSet, SetKind,
    ENUMERATION_BUDGET,
};
pub use verify::{
    default_grid_step, verify_domination, verify_fpp_bounds, BoundCheck, BoundReport, BoundRow,
    DominationReport, Lemma, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree {0} is beyond the enumeration budget")]
    DegreeTooLarge(usize),
    #[error("degree mismatch: expected {0}, got {1}")]
    DegreeMismatch(usize, usize),
    #[error("closure exceeded {0} elements")]
    ClosureBudgetExceeded(usize),
    #[error("coefficients exceeded the {0}-bit budget")]
    CoefficientBudgetExceeded(u64),
    #[error("unsupported family instance {0}")]
    UnsupportedFamily(String),
    #[error("group is not transitive")]
    NotTransitive,
    #[error("empty permutation set")]
    EmptySet,
    #[error("{0}")]
    ParameterOutOfRange(String),
}
