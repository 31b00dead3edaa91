//! Link streams: a time interval `[alpha, omega]`, a node set, and a
//! time-ordered multiset of undirected instantaneous links `(t, u, v)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer seconds since the UTC epoch.
pub type Timestamp = i64;

/// Dense node identifier. Ids index into a [`NodeTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("event ({t}, {u}, {v}) lies outside the stream interval [{alpha}, {omega}]")]
    OutOfInterval {
        t: Timestamp,
        u: String,
        v: String,
        alpha: Timestamp,
        omega: Timestamp,
    },
    #[error("stream interval is reversed: alpha {alpha} > omega {omega}")]
    ReversedInterval { alpha: Timestamp, omega: Timestamp },
    #[error("node {0} is not part of the stream")]
    ForeignNode(NodeId),
    #[error("a node cannot form a pair with itself ({0})")]
    SelfPair(NodeId),
}

/// Bijection between node labels (e.g. author addresses) and dense ids.
#[derive(Debug, Default, Clone)]
pub struct NodeTable {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, allocating the next free id if unseen.
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(u32::try_from(self.labels.len()).expect("more than u32::MAX nodes"));
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// An undirected link at an instant, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkEvent {
    pub t: Timestamp,
    pub u: NodeId,
    pub v: NodeId,
}

impl LinkEvent {
    /// Canonical event; `None` for a self-interaction.
    pub fn new(t: Timestamp, a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { t, u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Self { t, u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn pair(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    #[inline]
    pub fn touches(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, assuming `x` is an endpoint.
    #[inline]
    pub fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Counts of inputs that produced no link event.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BuildDiagnostics {
    pub self_loops: usize,
}

/// Per-node incident event indices, each list sorted by event order (hence by time).
#[derive(Debug)]
pub struct Incidence {
    offsets: Vec<usize>,
    events: Vec<u32>,
}

impl Incidence {
    fn build(n_labels: usize, events: &[LinkEvent]) -> Self {
        let mut counts = vec![0usize; n_labels + 1];
        for e in events {
            counts[e.u.index() + 1] += 1;
            counts[e.v.index() + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut slots = vec![0u32; events.len() * 2];
        for (k, e) in events.iter().enumerate() {
            for x in [e.u, e.v] {
                slots[fill[x.index()]] = k as u32;
                fill[x.index()] += 1;
            }
        }
        Self {
            offsets,
            events: slots,
        }
    }

    /// Indices of events touching `x`, in stream order.
    pub fn of(&self, x: NodeId) -> &[u32] {
        let i = x.index();
        if i + 1 >= self.offsets.len() {
            return &[];
        }
        &self.events[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// `L = (T, V, E)` with `T = [alpha, omega]`.
///
/// Immutable after construction. Sub-streams share the parent's [`NodeTable`],
/// so a node keeps its id across every stream derived from the same source.
#[derive(Debug, Clone)]
pub struct LinkStream {
    alpha: Timestamp,
    omega: Timestamp,
    table: Arc<NodeTable>,
    nodes: Vec<NodeId>,
    events: Vec<LinkEvent>,
    incidence: OnceLock<Arc<Incidence>>,
}

impl LinkStream {
    /// Assembles a stream from parts that already satisfy the invariants:
    /// `nodes` sorted and deduplicated, `events` sorted, canonical and within the interval.
    pub(crate) fn from_parts(
        alpha: Timestamp,
        omega: Timestamp,
        table: Arc<NodeTable>,
        nodes: Vec<NodeId>,
        events: Vec<LinkEvent>,
    ) -> Self {
        debug_assert!(alpha <= omega);
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(events.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(events.iter().all(|e| e.u < e.v && alpha <= e.t && e.t <= omega));
        Self {
            alpha,
            omega,
            table,
            nodes,
            events,
            incidence: OnceLock::new(),
        }
    }

    pub fn alpha(&self) -> Timestamp {
        self.alpha
    }

    pub fn omega(&self) -> Timestamp {
        self.omega
    }

    /// `omega - alpha`.
    pub fn duration(&self) -> i64 {
        self.omega - self.alpha
    }

    /// The node set `V`, sorted by id.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains_node(&self, x: NodeId) -> bool {
        self.nodes.binary_search(&x).is_ok()
    }

    /// Events sorted by `(t, u, v)`.
    pub fn events(&self) -> &[LinkEvent] {
        &self.events
    }

    pub fn table(&self) -> &Arc<NodeTable> {
        &self.table
    }

    pub fn label(&self, x: NodeId) -> &str {
        self.table.label(x)
    }

    /// Lazily built node → incident-event index.
    pub fn incidence(&self) -> &Incidence {
        self.incidence
            .get_or_init(|| Arc::new(Incidence::build(self.table.len(), &self.events)))
    }

    /// `L(S)`: same interval, node set `S`, and exactly the events with both endpoints in `S`.
    pub fn induced_substream(&self, subset: &[NodeId]) -> Result<LinkStream, StreamError> {
        let mut nodes = subset.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        if let Some(&x) = nodes.iter().find(|&&x| !self.contains_node(x)) {
            return Err(StreamError::ForeignNode(x));
        }
        let mut member = vec![false; self.table.len()];
        for x in &nodes {
            member[x.index()] = true;
        }
        let events = self
            .events
            .iter()
            .filter(|e| member[e.u.index()] && member[e.v.index()])
            .copied()
            .collect();
        Ok(Self::from_parts(
            self.alpha,
            self.omega,
            Arc::clone(&self.table),
            nodes,
            events,
        ))
    }

    /// Event times of the unordered pair `{a, b}`, ascending, duplicates kept.
    pub fn pair_times(&self, a: NodeId, b: NodeId) -> Vec<Timestamp> {
        let Some(probe) = LinkEvent::new(0, a, b) else {
            return Vec::new();
        };
        let inc = self.incidence();
        // Scan the endpoint with fewer incident events.
        let (x, list) = {
            let la = inc.of(a);
            let lb = inc.of(b);
            if la.len() <= lb.len() {
                (a, la)
            } else {
                (b, lb)
            }
        };
        list.iter()
            .map(|&k| &self.events[k as usize])
            .filter(|e| e.touches(x) && e.pair() == probe.pair())
            .map(|e| e.t)
            .collect()
    }

    /// Inter-contact series of `{u, v}` padded with the stream's own `alpha` and `omega`.
    pub fn intercontact(&self, u: NodeId, v: NodeId) -> Result<IntercontactSeries, StreamError> {
        if u == v {
            return Err(StreamError::SelfPair(u));
        }
        for x in [u, v] {
            if !self.contains_node(x) {
                return Err(StreamError::ForeignNode(x));
            }
        }
        let pair = if u < v { (u, v) } else { (v, u) };
        Ok(IntercontactSeries::padded(
            pair,
            &self.pair_times(u, v),
            self.alpha,
            self.omega,
        ))
    }

    /// Every linked pair with its ascending event times, ordered by pair.
    pub fn pair_groups(&self) -> Vec<((NodeId, NodeId), Vec<Timestamp>)> {
        let mut keyed: Vec<(NodeId, NodeId, Timestamp)> =
            self.events.iter().map(|e| (e.u, e.v, e.t)).collect();
        keyed.sort_unstable();
        let mut out: Vec<((NodeId, NodeId), Vec<Timestamp>)> = Vec::new();
        for (u, v, t) in keyed {
            match out.last_mut() {
                Some((p, times)) if *p == (u, v) => times.push(t),
                _ => out.push(((u, v), vec![t])),
            }
        }
        out
    }
}

/// `t_uv = (alpha, t_0, ..., t_k, omega)` and its consecutive differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntercontactSeries {
    pub pair: (NodeId, NodeId),
    pub boundary_times: Vec<Timestamp>,
    pub gaps: Vec<i64>,
}

impl IntercontactSeries {
    /// Builds the series from ascending pair times and an explicit padding interval.
    ///
    /// Streams pad with their own `[alpha, omega]`; thread-level series pad with
    /// the thread's first and last event times instead.
    pub fn padded(
        pair: (NodeId, NodeId),
        times: &[Timestamp],
        alpha: Timestamp,
        omega: Timestamp,
    ) -> Self {
        let mut boundary_times = Vec::with_capacity(times.len() + 2);
        boundary_times.push(alpha);
        boundary_times.extend_from_slice(times);
        boundary_times.push(omega);
        let gaps = boundary_times.windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            pair,
            boundary_times,
            gaps,
        }
    }

    /// Gaps between two actual occurrences, without the padding at either end.
    pub fn interior_gaps(&self) -> &[i64] {
        if self.gaps.len() <= 2 {
            &[]
        } else {
            &self.gaps[1..self.gaps.len() - 1]
        }
    }
}

/// Incremental construction of a [`LinkStream`] from labelled events.
///
/// Each event may carry a tag (e.g. the thread it came from); tags are returned
/// in the final sorted event order by [`StreamBuilder::build`].
#[derive(Debug)]
pub struct StreamBuilder<T = ()> {
    alpha: Timestamp,
    omega: Timestamp,
    table: NodeTable,
    pending: Vec<(LinkEvent, usize)>,
    tags: Vec<T>,
    diagnostics: BuildDiagnostics,
    error: Option<StreamError>,
}

impl<T> StreamBuilder<T> {
    pub fn new(alpha: Timestamp, omega: Timestamp) -> Self {
        Self {
            alpha,
            omega,
            table: NodeTable::new(),
            pending: Vec::new(),
            tags: Vec::new(),
            diagnostics: BuildDiagnostics::default(),
            error: None,
        }
    }

    /// Registers a node that may have no events; isolated nodes still count in `V`.
    pub fn add_node(&mut self, label: &str) -> NodeId {
        self.table.intern(label)
    }

    pub fn add_tagged(&mut self, t: Timestamp, u: &str, v: &str, tag: T) -> &mut Self {
        if self.error.is_some() {
            return self;
        }
        if t < self.alpha || t > self.omega {
            self.error = Some(StreamError::OutOfInterval {
                t,
                u: u.to_owned(),
                v: v.to_owned(),
                alpha: self.alpha,
                omega: self.omega,
            });
            return self;
        }
        if u == v {
            self.diagnostics.self_loops += 1;
            return self;
        }
        let a = self.table.intern(u);
        let b = self.table.intern(v);
        let event = LinkEvent::new(t, a, b).expect("distinct labels map to distinct ids");
        self.pending.push((event, self.tags.len()));
        self.tags.push(tag);
        self
    }

    /// Finalizes the stream; returns tags aligned with `stream.events()`.
    pub fn build(self) -> Result<(LinkStream, Vec<T>, BuildDiagnostics), StreamError> {
        if let Some(err) = self.error {
            return Err(err);
        }
        if self.alpha > self.omega {
            return Err(StreamError::ReversedInterval {
                alpha: self.alpha,
                omega: self.omega,
            });
        }
        let mut pending = self.pending;
        pending.sort_by_key(|&(e, k)| (e, k));
        let mut tags: Vec<Option<T>> = self.tags.into_iter().map(Some).collect();
        let ordered_tags = pending
            .iter()
            .map(|&(_, k)| tags[k].take().expect("each tag used once"))
            .collect();
        let events = pending.into_iter().map(|(e, _)| e).collect();
        let nodes = (0..self.table.len() as u32).map(NodeId).collect();
        let stream = LinkStream::from_parts(
            self.alpha,
            self.omega,
            Arc::new(self.table),
            nodes,
            events,
        );
        Ok((stream, ordered_tags, self.diagnostics))
    }
}

impl StreamBuilder<()> {
    pub fn add(&mut self, t: Timestamp, u: &str, v: &str) -> &mut Self {
        self.add_tagged(t, u, v, ())
    }
}

/// Builds a canonical, sorted stream from `(t, u, v)` label triples.
///
/// Self-interactions are dropped and tallied; their labels do not become nodes.
pub fn build_stream<S: AsRef<str>>(
    events: &[(Timestamp, S, S)],
    alpha: Timestamp,
    omega: Timestamp,
) -> Result<(LinkStream, BuildDiagnostics), StreamError> {
    let mut builder = StreamBuilder::new(alpha, omega);
    for (t, u, v) in events {
        builder.add(*t, u.as_ref(), v.as_ref());
    }
    let (stream, _, diag) = builder.build()?;
    Ok((stream, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> LinkStream {
        build_stream(&[(5, "b", "c"), (5, "d", "e")], 0, 10).unwrap().0
    }

    fn id(s: &LinkStream, label: &str) -> NodeId {
        s.table().get(label).unwrap()
    }

    #[test]
    fn builds_two_simultaneous_exchanges() {
        let s = fig1();
        assert_eq!(s.events().len(), 2);
        assert_eq!(s.node_count(), 4);
        assert!(s.events().iter().all(|e| e.u < e.v && e.t == 5));
    }

    #[test]
    fn empty_stream() {
        let (s, diag) = build_stream::<&str>(&[], 0, 10).unwrap();
        assert_eq!(s.node_count(), 0);
        assert!(s.events().is_empty());
        assert_eq!(diag.self_loops, 0);
    }

    #[test]
    fn self_interactions_are_tallied_not_stored() {
        let (s, diag) = build_stream(&[(3, "a", "a")], 0, 10).unwrap();
        assert!(s.events().is_empty());
        assert_eq!(s.node_count(), 0);
        assert_eq!(diag.self_loops, 1);
    }

    #[test]
    fn rejects_event_outside_interval() {
        let err = build_stream(&[(11, "a", "b")], 0, 10).unwrap_err();
        assert!(matches!(err, StreamError::OutOfInterval { t: 11, .. }));
    }

    #[test]
    fn events_are_sorted_and_canonical() {
        let (s, _) = build_stream(&[(7, "z", "a"), (2, "b", "a"), (2, "a", "b")], 0, 10).unwrap();
        let times: Vec<_> = s.events().iter().map(|e| e.t).collect();
        assert_eq!(times, vec![2, 2, 7]);
        assert_eq!(s.events()[0], s.events()[1]);
    }

    #[test]
    fn induced_substream_filters() {
        let s = fig1();
        let sub = s.induced_substream(&[id(&s, "b"), id(&s, "c")]).unwrap();
        assert_eq!(sub.events().len(), 1);
        assert_eq!(sub.label(sub.events()[0].u), "b");
        assert_eq!((sub.alpha(), sub.omega()), (0, 10));

        let all = s.induced_substream(s.nodes()).unwrap();
        assert_eq!(all.events(), s.events());

        let none = s.induced_substream(&[]).unwrap();
        assert!(none.events().is_empty());
    }

    #[test]
    fn induced_substream_rejects_foreign_node() {
        let s = fig1();
        let sub = s.induced_substream(&[id(&s, "b")]).unwrap();
        let err = sub.induced_substream(&[id(&s, "c")]).unwrap_err();
        assert_eq!(err, StreamError::ForeignNode(id(&s, "c")));
    }

    #[test]
    fn intercontact_examples() {
        let (s, _) = build_stream(&[(2, "a", "b"), (7, "b", "a")], 0, 10).unwrap();
        let (a, b) = (id(&s, "a"), id(&s, "b"));
        assert_eq!(s.intercontact(a, b).unwrap().gaps, vec![2, 5, 3]);
        assert_eq!(s.intercontact(b, a).unwrap(), s.intercontact(a, b).unwrap());

        let mut builder = StreamBuilder::<()>::new(0, 10);
        builder.add_node("a");
        builder.add_node("b");
        let (s, _, _) = builder.build().unwrap();
        assert_eq!(s.intercontact(NodeId(0), NodeId(1)).unwrap().gaps, vec![10]);

        let (s, _) = build_stream(&[(0, "a", "b"), (10, "a", "b")], 0, 10).unwrap();
        let series = s.intercontact(NodeId(0), NodeId(1)).unwrap();
        assert_eq!(series.gaps, vec![0, 10, 0]);
        assert_eq!(series.interior_gaps(), &[10]);
    }

    #[test]
    fn intercontact_rejects_self_pair() {
        let s = fig1();
        let b = id(&s, "b");
        assert_eq!(s.intercontact(b, b).unwrap_err(), StreamError::SelfPair(b));
    }

    #[test]
    fn builder_returns_tags_in_event_order() {
        let mut b = StreamBuilder::new(0, 100);
        b.add_tagged(50, "x", "y", "late");
        b.add_tagged(10, "x", "z", "early");
        b.add_tagged(30, "q", "q", "dropped");
        let (s, tags, diag) = b.build().unwrap();
        assert_eq!(tags, vec!["early", "late"]);
        assert_eq!(s.events()[0].t, 10);
        assert_eq!(diag.self_loops, 1);
    }
}
