//! Limit cumulant functions, their conjugates, and explicit rate functions.

pub mod closed_form;
pub mod conjugate;
pub mod limit;

pub use closed_form::{
    case2_restricted_supremum, closed_form_u, closed_form_v, in_admissible_set, md_rate_explicit_case1,
    md_rate_explicit_case2, optimizer_u, optimizer_v, stationary_eta,
};
pub use conjugate::{conjugate, conjugate_fn, maximize_1d, ConjugateOptions, ConjugateResult, Method};
pub use limit::{psi_cond1, psi_tilde, upsilon_cond2, upsilon_tilde, LimitCumulant};
