//! Static undirected graphs: the graph induced by a stream, and the overlap and
//! quotient graphs built over parts.

use std::collections::BTreeMap;

use crate::stream::LinkStream;

/// An undirected edge with `u < v` and a multiplicity weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub weight: u64,
}

/// Undirected graph without self-loops; vertices and edges are kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StaticGraph {
    vertices: Vec<u32>,
    edges: Vec<Edge>,
}

impl StaticGraph {
    /// Builds a graph from vertices and weighted edges. Parallel edges are merged by
    /// summing weights; self-loops are discarded; edge endpoints are added as vertices.
    pub fn from_weighted_edges<I>(vertices: impl IntoIterator<Item = u32>, edges: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, u64)>,
    {
        let mut merged: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        let mut vs: Vec<u32> = vertices.into_iter().collect();
        for (a, b, w) in edges {
            if a == b {
                continue;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            *merged.entry(key).or_insert(0) += w;
            vs.push(a);
            vs.push(b);
        }
        vs.sort_unstable();
        vs.dedup();
        let edges = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        Self { vertices: vs, edges }
    }

    /// Assumes `edges` already sorted by `(u, v)`, unique, `u < v`, endpoints in `vertices`.
    pub(crate) fn from_sorted(vertices: Vec<u32>, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| (w[0].u, w[0].v) < (w[1].u, w[1].v)));
        debug_assert!(edges.iter().all(|e| e.u < e.v));
        Self { vertices, edges }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, x: u32) -> bool {
        self.vertices.binary_search(&x).is_ok()
    }

    pub fn weight(&self, a: u32, b: u32) -> Option<u64> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|k| self.edges[k].weight)
    }

    /// Degree of every vertex, isolated vertices included with degree 0.
    pub fn degrees(&self) -> BTreeMap<u32, usize> {
        let mut deg: BTreeMap<u32, usize> = self.vertices.iter().map(|&x| (x, 0)).collect();
        for e in &self.edges {
            *deg.entry(e.u).or_insert(0) += 1;
            *deg.entry(e.v).or_insert(0) += 1;
        }
        deg
    }

    /// Restriction to the given vertex subset.
    pub fn subgraph(&self, keep: &[u32]) -> StaticGraph {
        let mut vs: Vec<u32> = keep.iter().copied().filter(|x| self.has_vertex(*x)).collect();
        vs.sort_unstable();
        vs.dedup();
        let inside = |x: u32| vs.binary_search(&x).is_ok();
        let edges = self
            .edges
            .iter()
            .filter(|e| inside(e.u) && inside(e.v))
            .copied()
            .collect();
        StaticGraph::from_sorted(vs, edges)
    }
}

/// `G(L)`: vertices are nodes with at least one event; an edge per linked pair,
/// weighted by the number of events of that pair.
pub fn induced_graph(stream: &LinkStream) -> StaticGraph {
    StaticGraph::from_weighted_edges(
        std::iter::empty(),
        stream.events().iter().map(|e| (e.u.0, e.v.0, 1)),
    )
}
