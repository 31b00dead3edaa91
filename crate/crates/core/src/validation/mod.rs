//! Reference oracles and a synthetic data generator for tests, benchmarks and
//! acceptance runs.

pub mod oracle;
pub mod synthetic;

pub use oracle::{
    delta_density_oracle, graph_density_over_nodes, inter_community_oracle,
    inter_thread_substream_oracle, intra_community_oracle, node_overlap_oracle,
    quotient_stream_oracle, temporal_overlap_oracle,
};
pub use synthetic::{generate_messages, generate_synthetic, SyntheticConfig, SyntheticData, SyntheticError};
