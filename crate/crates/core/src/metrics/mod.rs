//! Density metrics. All values are exact rationals; conversion to floating
//! point happens only when results are reported.

pub mod community;
pub mod density;
pub mod thread;

use thiserror::Error;

use crate::partition::{PartId, PartitionError};

pub use community::{inter_community_density, intra_community_density};
pub use density::{
    delta_density, delta_density_profile, graph_density, pair_density, Degeneracy, Delta,
    DensityValue, GapProfile,
};
pub use thread::{
    inter_thread_delta_densities, inter_thread_delta_density, inter_thread_substream,
    intra_thread_delta_density, per_thread_delta_density, InterThreadDensity, PairSampler,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(u32),
    #[error("vertex {0} belongs to more than one community")]
    OverlappingCommunities(u32),
    #[error("vertex {0} belongs to no community")]
    UncoveredVertex(u32),
    #[error("community index {0} out of range")]
    UnknownCommunity(usize),
    #[error("inter-thread substream needs two distinct parts, got {0} twice")]
    SamePart(PartId),
    #[error("inter-thread density needs at least two parts, got {0}")]
    TooFewParts(usize),
    #[error("sample size must be positive")]
    EmptySample,
}
