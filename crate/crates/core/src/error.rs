use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table has {found} entries, expected 4^{n} = {expected}")]
    LengthMismatch { n: usize, expected: usize, found: usize },
    #[error("negative probability at table index {index}")]
    NegativeEntry { index: usize },
    #[error("outputs for input word {input:#b} do not sum to 1")]
    NotNormalized { input: usize },
    #[error("{n} parties exceeds the supported maximum of {max}")]
    CapacityExceeded { n: usize, max: usize },
    #[error("behavior is signaling: marginal on parties {subset} changes between inputs {inputs:?}")]
    SignalingBehavior { subset: String, inputs: (u32, u32) },
    #[error("party subset is empty")]
    EmptySubset,
    #[error("party subset {mask:#b} does not fit in {n} parties")]
    SubsetOutOfRange { mask: u32, n: usize },
    #[error("factor subsets overlap on parties {overlap:#b}")]
    OverlappingSubsets { overlap: u32 },
    #[error("factor subsets miss parties {missing:#b}")]
    IncompleteCover { missing: u32 },
    #[error("factor on {subset_len} parties carries a {behavior_n}-party behavior")]
    SizeMismatch { subset_len: usize, behavior_n: usize },
    #[error("mixture weights sum to {sum}, not 1")]
    WeightSumNotOne { sum: String },
    #[error("mixture weight {weight} is negative")]
    NegativeWeight { weight: String },
    #[error("mixture is empty")]
    EmptyMixture,
    #[error("k = {k} is outside 0..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("residue {residue} is outside 0..=3")]
    ResidueOutOfRange { residue: usize },
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("group of {size} parties is too large for the biseparability LP (at most 2)")]
    GroupTooLarge { size: usize },
    #[error("expected {expected} parties, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scalar observable on party {party} cannot be measured projectively")]
    ScalarObservable { party: usize },
    #[error("protocol needs at least {min} parties, got {n}")]
    TooFewParties { n: usize, min: usize },
    #[error("invalid leakage mask: {0}")]
    InvalidMask(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
