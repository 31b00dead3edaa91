//! Relations between parts: temporal and node overlap graphs, the quotient
//! graph of a community structure, and the quotient stream of a partition.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, StaticGraph};
use crate::metrics::community::{community_index, owner_of};
use crate::metrics::MetricError;
use crate::partition::{PartId, StreamPartition};
use crate::stream::{LinkEvent, LinkStream, NodeId, NodeTable, Timestamp};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("node overlap graph needs {needed} candidate pairs, above the cap of {cap}")]
    PairCapExceeded { needed: u64, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    Temporal,
    Node,
}

/// A graph over part ids; every part is a vertex, isolated or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGraph {
    pub kind: OverlapKind,
    pub graph: StaticGraph,
}

/// Operation counts of the endpoint sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub parts: usize,
    pub inserts: usize,
    pub evictions: usize,
    pub emitted: usize,
}

/// Sorts `(u, v)` pairs with `u, v < k` in `O(n + k)` by two counting passes.
fn counting_sort_pairs(pairs: Vec<(u32, u32)>, k: usize) -> Vec<(u32, u32)> {
    let pass = |input: Vec<(u32, u32)>, key: fn(&(u32, u32)) -> u32| {
        let mut start = vec![0usize; k + 1];
        for p in &input {
            start[key(p) as usize + 1] += 1;
        }
        for i in 1..=k {
            start[i] += start[i - 1];
        }
        let mut out = vec![(0, 0); input.len()];
        for p in input {
            let slot = &mut start[key(&p) as usize];
            out[*slot] = p;
            *slot += 1;
        }
        out
    };
    let by_v = pass(pairs, |p| p.1);
    pass(by_v, |p| p.0)
}

/// Merges sorted duplicate pairs into weighted edges.
fn merge_sorted(pairs: &[(u32, u32)]) -> Vec<Edge> {
    let mut edges: Vec<Edge> = Vec::new();
    for &(u, v) in pairs {
        match edges.last_mut() {
            Some(e) if (e.u, e.v) == (u, v) => e.weight += 1,
            _ => edges.push(Edge { u, v, weight: 1 }),
        }
    }
    edges
}

fn all_part_vertices(k: usize) -> Vec<u32> {
    (0..k as u32).collect()
}

/// Parts are adjacent when their closed activity intervals `[alpha_i, omega_i]`
/// intersect; touching endpoints count.
pub fn temporal_overlap_graph(partition: &StreamPartition) -> OverlapGraph {
    temporal_overlap_graph_with_stats(partition).0
}

/// Sweep over parts ordered by start time, keeping the still-open parts keyed by
/// end time. Costs `O(k log k + |E|)`; the returned counters make that checkable.
pub fn temporal_overlap_graph_with_stats(partition: &StreamPartition) -> (OverlapGraph, SweepStats) {
    let k = partition.len();
    let mut order: Vec<(Timestamp, u32)> = partition
        .parts()
        .iter()
        .map(|p| (p.alpha, p.id.0))
        .collect();
    order.sort_unstable();
    let mut stats = SweepStats {
        parts: k,
        ..SweepStats::default()
    };
    let mut open: BTreeSet<(Timestamp, u32)> = BTreeSet::new();
    let mut pairs = Vec::new();
    for (alpha, id) in order {
        while let Some(&(omega, _)) = open.first() {
            if omega >= alpha {
                break;
            }
            open.pop_first();
            stats.evictions += 1;
        }
        for &(_, other) in &open {
            pairs.push(if other < id { (other, id) } else { (id, other) });
        }
        stats.emitted += open.len();
        open.insert((partition.parts()[id as usize].omega, id));
        stats.inserts += 1;
    }
    let pairs = counting_sort_pairs(pairs, k);
    let graph = StaticGraph::from_sorted(all_part_vertices(k), merge_sorted(&pairs));
    (
        OverlapGraph {
            kind: OverlapKind::Temporal,
            graph,
        },
        stats,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeOverlapOptions {
    /// Upper bound on generated candidate pairs before deduplication.
    pub max_candidate_pairs: Option<u64>,
}

/// Parts are adjacent when they share a node. Edge weight is the number of
/// shared nodes.
pub fn node_overlap_graph(
    partition: &StreamPartition,
    options: NodeOverlapOptions,
) -> Result<OverlapGraph, RelationError> {
    let k = partition.len();
    let mut parts_of: BTreeMap<NodeId, Vec<u32>> = BTreeMap::new();
    for part in partition.parts() {
        for &x in &part.nodes {
            parts_of.entry(x).or_default().push(part.id.0);
        }
    }
    let needed: u64 = parts_of
        .values()
        .map(|ps| {
            let n = ps.len() as u64;
            n * n.saturating_sub(1) / 2
        })
        .sum();
    if let Some(cap) = options.max_candidate_pairs {
        if needed > cap {
            return Err(RelationError::PairCapExceeded { needed, cap });
        }
    }
    let mut pairs = Vec::with_capacity(needed as usize);
    for ps in parts_of.values() {
        for (a, &pa) in ps.iter().enumerate() {
            for &pb in &ps[a + 1..] {
                pairs.push((pa, pb));
            }
        }
    }
    let pairs = counting_sort_pairs(pairs, k);
    Ok(OverlapGraph {
        kind: OverlapKind::Node,
        graph: StaticGraph::from_sorted(all_part_vertices(k), merge_sorted(&pairs)),
    })
}

/// One vertex per community; an edge between two communities for every pair
/// joined by at least one edge of `g`, weighted by the number of such edges.
pub fn quotient_graph(g: &StaticGraph, communities: &[Vec<u32>]) -> Result<StaticGraph, MetricError> {
    let owner = community_index(g, communities)?;
    let edges = g.edges().iter().map(|e| {
        (
            owner_of(g, &owner, e.u) as u32,
            owner_of(g, &owner, e.v) as u32,
            1,
        )
    });
    Ok(StaticGraph::from_weighted_edges(
        0..communities.len() as u32,
        edges,
    ))
}

/// Degree of every vertex, isolated ones at 0.
pub fn degree_series(g: &StaticGraph) -> BTreeMap<u32, usize> {
    g.degrees()
}

/// Which side of a quotient event supplied the bracketing links.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Directions {
    /// The lower part id `i` brackets an event of part `j`.
    pub lower_brackets: bool,
    /// The upper part id `j` brackets an event of part `i`.
    pub upper_brackets: bool,
}

/// `(t, i, j)` with `i < j`. `multiplicity` counts the distinct witnesses: an
/// event of one part whose time lies within some shared node's activity span in
/// the other part, per direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuotientEvent {
    pub t: Timestamp,
    pub i: PartId,
    pub j: PartId,
    pub multiplicity: u32,
    pub directions: Directions,
}

/// Stream over parts. Every part is a node, related or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientStream {
    pub alpha: Timestamp,
    pub omega: Timestamp,
    pub part_count: usize,
    /// Sorted by `(t, i, j)`, one entry per distinct triple.
    pub events: Vec<QuotientEvent>,
}

impl QuotientStream {
    /// Groups raw witnesses `(t, lower, upper, upper_brackets, event)` into events.
    pub(crate) fn from_witnesses(
        alpha: Timestamp,
        omega: Timestamp,
        part_count: usize,
        mut witnesses: Vec<(Timestamp, u32, u32, bool, u32)>,
    ) -> Self {
        witnesses.par_sort_unstable();
        witnesses.dedup();
        let mut events: Vec<QuotientEvent> = Vec::new();
        for (t, i, j, upper, _) in witnesses {
            let (i, j) = (PartId(i), PartId(j));
            let entry = match events.last_mut() {
                Some(e) if (e.t, e.i, e.j) == (t, i, j) => e,
                _ => {
                    events.push(QuotientEvent {
                        t,
                        i,
                        j,
                        multiplicity: 0,
                        directions: Directions::default(),
                    });
                    events.last_mut().expect("just pushed")
                }
            };
            entry.multiplicity += 1;
            if upper {
                entry.directions.upper_brackets = true;
            } else {
                entry.directions.lower_brackets = true;
            }
        }
        Self {
            alpha,
            omega,
            part_count,
            events,
        }
    }

    /// Parts taking part in at least one quotient event.
    pub fn connected_parts(&self) -> usize {
        let mut seen = vec![false; self.part_count];
        for e in &self.events {
            seen[e.i.index()] = true;
            seen[e.j.index()] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// Static graph over all parts; weights count distinct quotient events.
    pub fn graph(&self) -> StaticGraph {
        StaticGraph::from_weighted_edges(
            0..self.part_count as u32,
            self.events.iter().map(|e| (e.i.0, e.j.0, 1)),
        )
    }

    /// The quotient as a [`LinkStream`] whose node `n<i>` is part `i`, labelled
    /// with the part label. One link per distinct triple; repeated witnesses of
    /// the same triple would only add zero-length gaps.
    pub fn to_link_stream(&self, partition: &StreamPartition) -> LinkStream {
        let mut table = NodeTable::new();
        for part in partition.parts() {
            let id = table.intern(&part.label);
            debug_assert_eq!(id.0, part.id.0);
        }
        let nodes = (0..self.part_count as u32).map(NodeId).collect();
        let events = self
            .events
            .iter()
            .map(|e| LinkEvent {
                t: e.t,
                u: NodeId(e.i.0),
                v: NodeId(e.j.0),
            })
            .collect();
        LinkStream::from_parts(self.alpha, self.omega, Arc::new(table), nodes, events)
    }
}

/// `(P_i, P_j, t)` is a quotient event when some node `u` has a link at `t` in `P_j`
/// lying between two of its links in `P_i` (inclusive).
///
/// For every node, its activity span in each part is swept against its time-ordered
/// incident events; the work is linear in the output plus a sort.
pub fn quotient_stream(partition: &StreamPartition) -> QuotientStream {
    let stream = partition.stream();
    let events = stream.events();

    // (node, part, t) for every endpoint occurrence, compressed into spans
    let mut occurrences: Vec<(NodeId, u32, Timestamp)> = Vec::with_capacity(events.len() * 2);
    for (k, e) in events.iter().enumerate() {
        let p = partition.part_of_event(k).0;
        occurrences.push((e.u, p, e.t));
        occurrences.push((e.v, p, e.t));
    }
    occurrences.par_sort_unstable();
    // per node: (first, last, part), grouped contiguously by node
    let mut spans: Vec<(NodeId, Timestamp, Timestamp, u32)> = Vec::new();
    for (x, p, t) in occurrences {
        match spans.last_mut() {
            Some(s) if s.0 == x && s.3 == p => s.2 = t,
            _ => spans.push((x, t, t, p)),
        }
    }
    let mut by_node: Vec<&[(NodeId, Timestamp, Timestamp, u32)]> = Vec::new();
    let mut start = 0;
    for k in 1..=spans.len() {
        if k == spans.len() || spans[k].0 != spans[start].0 {
            by_node.push(&spans[start..k]);
            start = k;
        }
    }

    let incidence = stream.incidence();
    let witnesses: Vec<(Timestamp, u32, u32, bool, u32)> = by_node
        .par_iter()
        .flat_map_iter(|node_spans| {
            let x = node_spans[0].0;
            if node_spans.len() < 2 {
                return Vec::new();
            }
            let mut ordered: Vec<(Timestamp, Timestamp, u32)> =
                node_spans.iter().map(|&(_, f, l, p)| (f, l, p)).collect();
            ordered.sort_unstable();
            let mut out = Vec::new();
            let mut next = 0;
            let mut open: Vec<(Timestamp, u32)> = Vec::new();
            for &k in incidence.of(x) {
                let t = events[k as usize].t;
                let j = partition.part_of_event(k as usize).0;
                while next < ordered.len() && ordered[next].0 <= t {
                    open.push((ordered[next].1, ordered[next].2));
                    next += 1;
                }
                open.retain(|&(last, _)| last >= t);
                for &(_, i) in &open {
                    if i == j {
                        continue;
                    }
                    let (lo, hi, upper) = if i < j { (i, j, false) } else { (j, i, true) };
                    out.push((t, lo, hi, upper, k));
                }
            }
            out
        })
        .collect();
    QuotientStream::from_witnesses(stream.alpha(), stream.omega(), partition.len(), witnesses)
}
