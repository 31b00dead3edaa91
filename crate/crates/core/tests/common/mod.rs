#![allow(dead_code)]

use std::sync::Arc;

use linkdens_core::{partition_by_labels, LinkStream, StreamBuilder, StreamPartition};
use proptest::prelude::*;

pub const LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

#[derive(Debug, Clone)]
pub struct RawStream {
    pub nodes: usize,
    pub omega: i64,
    /// `(t, u, v, part)`
    pub events: Vec<(i64, usize, usize, usize)>,
}

impl RawStream {
    pub fn build(&self) -> LinkStream {
        let mut b = StreamBuilder::<()>::new(0, self.omega);
        for label in &LABELS[..self.nodes] {
            b.add_node(label);
        }
        for &(t, u, v, _) in &self.events {
            b.add(t, LABELS[u], LABELS[v]);
        }
        b.build().unwrap().0
    }

    /// Partition by the `part` tag of each event, in the stream's event order.
    pub fn partition(&self) -> StreamPartition {
        let mut b = StreamBuilder::<usize>::new(0, self.omega);
        for label in &LABELS[..self.nodes] {
            b.add_node(label);
        }
        for &(t, u, v, p) in &self.events {
            b.add_tagged(t, LABELS[u], LABELS[v], p);
        }
        let (stream, tags, _) = b.build().unwrap();
        let labels: Vec<Option<String>> = tags.iter().map(|p| Some(format!("p{p}"))).collect();
        partition_by_labels(Arc::new(stream), &labels).unwrap()
    }
}

fn distinct_pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 1..n).prop_map(move |(u, d)| (u, (u + d) % n))
}

/// Streams on `[0, omega]` with `2..=max_nodes` nodes (isolated nodes allowed)
/// and no self-loops; events carry a part tag below `parts`.
pub fn raw_stream(
    max_nodes: usize,
    max_events: usize,
    max_time: i64,
    parts: usize,
) -> impl Strategy<Value = RawStream> {
    (2..=max_nodes, 1..=max_time)
        .prop_flat_map(move |(n, omega)| {
            let event = (0..=omega, distinct_pair(n), 0..parts).prop_map(|(t, (u, v), p)| (t, u, v, p));
            (Just(n), Just(omega), prop::collection::vec(event, 0..=max_events))
        })
        .prop_map(|(nodes, omega, events)| RawStream {
            nodes,
            omega,
            events,
        })
}

/// Like [`raw_stream`] but with at least one event, so the partition is non-empty.
pub fn partitioned_stream(
    max_nodes: usize,
    max_events: usize,
    max_time: i64,
    parts: usize,
) -> impl Strategy<Value = RawStream> {
    raw_stream(max_nodes, max_events, max_time, parts).prop_filter("needs events", |r| !r.events.is_empty())
}
