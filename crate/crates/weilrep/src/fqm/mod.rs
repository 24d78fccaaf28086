//! Finite quadratic modules: forms, symbols, subgroups, quotients, and
//! Sylow decomposition.

pub mod abgroup;
pub mod form;
pub mod quotient;
pub mod subgroup;
pub mod symbol;
pub mod sylow;

pub use form::{DiscForm, Elem, FormJson};
pub use quotient::{quotient_form, quotient_form_scaled, QuotientForm};
pub use subgroup::{
    enumerate_subgroups, isotropic_lines, isotropic_subgroups, max_quasi_isotropic,
    quasi_isotropic_subgroups, Subgroup, SubgroupKind,
};
pub use symbol::parse_symbol;
pub use sylow::{sylow_decompose, SylowDecomp, SylowPart};
