//! Matrices over `F_p`, subgroups of `GL_2(F_p)` and their case analysis.

pub mod cache;
pub mod classify;
pub mod element;
pub mod enumerate;
pub mod standard;
pub mod subgroup;

pub use classify::{
    analyze, classify, det_index, pointwise_fixed_lines, projective_type, stabilized_lines,
    DicksonClass, ProjectiveType, SubgroupAnalysis,
};
pub use element::{Gl2Element, Line, Vector};
pub use enumerate::{enumerate_subgroups, EnumerationConfig, EnumerationMode};
pub use standard::standard_subgroups;
pub use subgroup::{close_generators, Fingerprint, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gl2Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} exceeds the supported maximum {max}")]
    PrimeTooLarge { p: u32, max: u32 },
    #[error("matrix {entries:?} is not invertible mod {p}")]
    NonInvertible { p: u32, entries: [i64; 4] },
    #[error("{0} is undefined in characteristic 2")]
    CharacteristicTwo(&'static str),
    #[error("element set of size {size} mod {p} is not closed under multiplication")]
    NotClosed { p: u32, size: usize },
    #[error("subgroup {id} (order {order}, p = {p}) matches no case of the classification")]
    Unclassifiable { p: u32, order: u64, id: String },
    #[error(
        "exhaustive enumeration for p = {p} exceeds the ceiling {ceiling}: \
         #GL2 = {group_order}, roughly {estimated_work} element-pair operations"
    )]
    CeilingExceeded { p: u32, ceiling: u32, group_order: u64, estimated_work: u64 },
    #[error("enumeration cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Gl2Error>;
