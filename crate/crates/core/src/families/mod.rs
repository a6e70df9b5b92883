//! Density analytics of degree sets and the bounded-exponent procedure.
//!
//! Densities here are always evaluated at a finite cutoff `x`; they are
//! empirical stand-ins for upper densities.

mod procedure;
mod profile;
mod sets;

pub use procedure::{
    exponent_to_order_bound, parse_epsilon, exclusion_procedure, union_bound_exponent, ExponentBound, ExponentRun,
    ProcedureReport, B_EPS_DECIMAL_BITS,
};
pub use profile::{p1_exponent_j_field, p1_exponent_merelian, FamilyProfile, GrowthRule, P1Rule};
pub use sets::{
    density_upto, erdos_wagstaff_set, find_cutoff_c, Clause, DensityReport, IntegerSetSpec, ShiftTable,
    MAX_CUTOFF_X,
};

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("{0} must be a positive integer")]
    NotPositive(&'static str),
    #[error("epsilon must be a rational in (0, 1], got {0}")]
    BadEpsilon(String),
    #[error("no cutoff up to {max_c} brings the density at x = {x} to {epsilon} or below (c = {c})")]
    CutoffNotFound { epsilon: String, c: u64, x: u64, max_c: u64 },
    #[error("profile has no Merelian bound")]
    MissingMerelianBound,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T> = std::result::Result<T, FamilyError>;
