//! Partitions of a stream's links into sub-streams (threads).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::stream::{LinkEvent, LinkStream, NodeId, Timestamp};

/// Index of a part within a [`StreamPartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PartId(pub u32);

impl PartId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("event #{index} has no part label")]
    Unlabeled { index: usize },
    #[error("{labels} labels supplied for {events} events")]
    LengthMismatch { labels: usize, events: usize },
    #[error("the stream has no events, so the partition would be empty")]
    Empty,
    #[error("part index {0} out of range")]
    UnknownPart(PartId),
}

/// One sub-stream `P_i = (T_i, V_i, E_i)`; its bounds are derived from its events.
#[derive(Debug, Clone)]
pub struct Part {
    pub id: PartId,
    pub label: String,
    pub alpha: Timestamp,
    pub omega: Timestamp,
    /// `V_i`: endpoints occurring in `E_i`, sorted.
    pub nodes: Vec<NodeId>,
    /// `E_i` as indices into the parent's event list, ascending.
    pub events: Vec<u32>,
}

impl Part {
    pub fn duration(&self) -> i64 {
        self.omega - self.alpha
    }

    pub fn contains_node(&self, x: NodeId) -> bool {
        self.nodes.binary_search(&x).is_ok()
    }
}

/// A split of every parent event into exactly one part.
///
/// Parts are numbered by the order of their first event in the parent stream.
#[derive(Debug, Clone)]
pub struct StreamPartition {
    stream: Arc<LinkStream>,
    parts: Vec<Part>,
    event_part: Vec<PartId>,
}

impl StreamPartition {
    pub fn stream(&self) -> &LinkStream {
        &self.stream
    }

    pub fn stream_arc(&self) -> &Arc<LinkStream> {
        &self.stream
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, id: PartId) -> Result<&Part, PartitionError> {
        self.parts
            .get(id.index())
            .ok_or(PartitionError::UnknownPart(id))
    }

    /// Part owning the parent event at `index`.
    pub fn part_of_event(&self, index: usize) -> PartId {
        self.event_part[index]
    }

    pub fn event_parts(&self) -> &[PartId] {
        &self.event_part
    }

    pub fn part_events<'a>(&'a self, part: &'a Part) -> impl Iterator<Item = &'a LinkEvent> + 'a {
        part.events
            .iter()
            .map(move |&k| &self.stream.events()[k as usize])
    }

    /// The part as a stand-alone stream over `[alpha_i, omega_i]` and `V_i`.
    pub fn part_stream(&self, id: PartId) -> Result<LinkStream, PartitionError> {
        let part = self.part(id)?;
        let events = self.part_events(part).copied().collect();
        Ok(LinkStream::from_parts(
            part.alpha,
            part.omega,
            Arc::clone(self.stream.table()),
            part.nodes.clone(),
            events,
        ))
    }
}

/// Groups the stream's events by label. `labels[k]` names the part of `stream.events()[k]`.
pub fn partition_by_labels<S: AsRef<str>>(
    stream: Arc<LinkStream>,
    labels: &[Option<S>],
) -> Result<StreamPartition, PartitionError> {
    let n = stream.events().len();
    if labels.len() != n {
        if labels.len() < n {
            return Err(PartitionError::Unlabeled {
                index: labels.len(),
            });
        }
        return Err(PartitionError::LengthMismatch {
            labels: labels.len(),
            events: n,
        });
    }
    if n == 0 {
        return Err(PartitionError::Empty);
    }
    let mut by_label: HashMap<&str, PartId> = HashMap::new();
    let mut parts: Vec<Part> = Vec::new();
    let mut event_part = Vec::with_capacity(n);
    for (k, (label, event)) in labels.iter().zip(stream.events()).enumerate() {
        let label = label
            .as_ref()
            .ok_or(PartitionError::Unlabeled { index: k })?
            .as_ref();
        let id = *by_label.entry(label).or_insert_with(|| {
            let id = PartId(parts.len() as u32);
            parts.push(Part {
                id,
                label: label.to_owned(),
                alpha: event.t,
                omega: event.t,
                nodes: Vec::new(),
                events: Vec::new(),
            });
            id
        });
        let part = &mut parts[id.index()];
        part.omega = part.omega.max(event.t);
        part.alpha = part.alpha.min(event.t);
        part.nodes.push(event.u);
        part.nodes.push(event.v);
        part.events.push(k as u32);
        event_part.push(id);
    }
    for part in &mut parts {
        part.nodes.sort_unstable();
        part.nodes.dedup();
    }
    Ok(StreamPartition {
        stream,
        parts,
        event_part,
    })
}
