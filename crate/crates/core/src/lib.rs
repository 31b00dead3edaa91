//! Link-stream analysis of threaded interaction logs.
//!
//! A [`LinkStream`] holds timestamped undirected interactions `(t, u, v)` over an
//! interval `[alpha, omega]`. Mailing-list archives are read by [`ingest`], which
//! rebuilds reply threads, filters biased ones, and yields a stream together with
//! its partition into threads. [`metrics`] computes graph density and the
//! delta-density of streams, threads, and inter-thread substreams; [`relations`]
//! builds the overlap graphs and the quotient stream between threads; [`report`]
//! turns results into distributions and tables.

pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod partition;
pub mod relations;
pub mod report;
pub mod stream;
pub mod validation;

pub use graph::{induced_graph, Edge, StaticGraph};
pub use metrics::{Delta, DensityValue};
pub use partition::{partition_by_labels, Part, PartId, StreamPartition};
pub use stream::{
    build_stream, IntercontactSeries, LinkEvent, LinkStream, NodeId, NodeTable, StreamBuilder,
    StreamError, Timestamp,
};
