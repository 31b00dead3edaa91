//! Brute-force reference implementations. They follow the definitions directly
//! and share no code path with the production algorithms they check.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::graph::StaticGraph;
use crate::metrics::{Delta, DensityValue};
use crate::partition::{PartId, StreamPartition};
use crate::relations::{Directions, QuotientEvent, QuotientStream};
use crate::stream::{LinkStream, Timestamp};

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Measure of `union_t [t - delta, t] ∩ [lo, hi]` over the given contact times.
fn covered_measure(times: &[Timestamp], delta: i64, lo: i64, hi: i64) -> i64 {
    let mut intervals: Vec<(i64, i64)> = times
        .iter()
        .map(|&t| ((t - delta).max(lo), t.min(hi)))
        .filter(|(a, b)| a <= b)
        .collect();
    intervals.sort_unstable();
    let mut total = 0;
    let mut current: Option<(i64, i64)> = None;
    for (a, b) in intervals {
        current = match current {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((ca, cb)) = current {
        total += cb - ca;
    }
    total
}

/// Fraction of window starts `s ∈ [alpha, omega - delta]` whose window `[s, s + delta]`
/// contains a contact, averaged over all unordered node pairs.
///
/// `None` when `delta >= omega - alpha` (no window fits) or fewer than two nodes.
pub fn delta_density_oracle(stream: &LinkStream, delta: Delta) -> Option<DensityValue> {
    let d = delta.as_secs();
    let span = stream.duration() - d;
    let nodes = stream.nodes();
    if span <= 0 || nodes.len() < 2 {
        return None;
    }
    let mut sum = BigRational::zero();
    let mut pairs = 0i64;
    for (a, &u) in nodes.iter().enumerate() {
        for &v in &nodes[a + 1..] {
            pairs += 1;
            let times: Vec<Timestamp> = stream
                .events()
                .iter()
                .filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
                .map(|e| e.t)
                .collect();
            let covered = covered_measure(&times, d, stream.alpha(), stream.omega() - d);
            sum += BigRational::new(big(covered), big(span));
        }
    }
    Some(DensityValue::Exact(sum / BigRational::from_integer(big(pairs))))
}

/// Density of the graph over all stream nodes, counting linked pairs directly.
pub fn graph_density_over_nodes(stream: &LinkStream) -> Option<DensityValue> {
    let n = stream.node_count() as i64;
    if n < 2 {
        return None;
    }
    let linked: BTreeSet<_> = stream.events().iter().map(|e| (e.u, e.v)).collect();
    Some(DensityValue::Exact(BigRational::new(
        big(2 * linked.len() as i64),
        big(n * (n - 1)),
    )))
}

/// `(P_i, P_j, t)` by enumerating every `(e1, e2) ∈ E_i × E_i` and `e ∈ E_j` that
/// share a node `u` with `t1 <= t <= t2`.
pub fn quotient_stream_oracle(partition: &StreamPartition) -> QuotientStream {
    let events = partition.stream().events();
    // (t, lower, upper) -> set of (upper_brackets, event index)
    let mut found: BTreeMap<(Timestamp, u32, u32), BTreeSet<(bool, u32)>> = BTreeMap::new();
    for pi in partition.parts() {
        for pj in partition.parts() {
            if pi.id == pj.id {
                continue;
            }
            for &k in &pj.events {
                let e = events[k as usize];
                let witnessed = [e.u, e.v].iter().any(|&u| {
                    pi.events.iter().any(|&k1| {
                        let e1 = events[k1 as usize];
                        e1.touches(u)
                            && e1.t <= e.t
                            && pi.events.iter().any(|&k2| {
                                let e2 = events[k2 as usize];
                                e2.touches(u) && e.t <= e2.t
                            })
                    })
                });
                if witnessed {
                    let (lo, hi, upper) = if pi.id < pj.id {
                        (pi.id.0, pj.id.0, false)
                    } else {
                        (pj.id.0, pi.id.0, true)
                    };
                    found.entry((e.t, lo, hi)).or_default().insert((upper, k));
                }
            }
        }
    }
    let events = found
        .into_iter()
        .map(|((t, i, j), witnesses)| QuotientEvent {
            t,
            i: PartId(i),
            j: PartId(j),
            multiplicity: witnesses.len() as u32,
            directions: Directions {
                lower_brackets: witnesses.iter().any(|w| !w.0),
                upper_brackets: witnesses.iter().any(|w| w.0),
            },
        })
        .collect();
    QuotientStream {
        alpha: partition.stream().alpha(),
        omega: partition.stream().omega(),
        part_count: partition.len(),
        events,
    }
}

/// Pairwise closed-interval intersection tests.
pub fn temporal_overlap_oracle(partition: &StreamPartition) -> StaticGraph {
    let parts = partition.parts();
    let mut edges = Vec::new();
    for a in parts {
        for b in parts {
            if a.id < b.id && a.alpha.max(b.alpha) <= a.omega.min(b.omega) {
                edges.push((a.id.0, b.id.0, 1));
            }
        }
    }
    StaticGraph::from_weighted_edges(0..parts.len() as u32, edges)
}

/// Pairwise node-set intersections, weighted by the intersection size.
pub fn node_overlap_oracle(partition: &StreamPartition) -> StaticGraph {
    let parts = partition.parts();
    let mut edges = Vec::new();
    for a in parts {
        for b in parts {
            if a.id < b.id {
                let shared = a.nodes.iter().filter(|x| b.nodes.contains(x)).count() as u64;
                if shared > 0 {
                    edges.push((a.id.0, b.id.0, shared));
                }
            }
        }
    }
    StaticGraph::from_weighted_edges(0..parts.len() as u32, edges)
}

/// `L_ij` by a full scan of the parent events.
pub fn inter_thread_substream_oracle(partition: &StreamPartition, i: PartId, j: PartId) -> LinkStream {
    let pi = &partition.parts()[i.index()];
    let pj = &partition.parts()[j.index()];
    let lo = pi.alpha.min(pj.alpha);
    let hi = pi.omega.max(pj.omega);
    let nodes: BTreeSet<_> = pi.nodes.iter().chain(&pj.nodes).copied().collect();
    let events = partition
        .stream()
        .events()
        .iter()
        .enumerate()
        .filter(|&(k, e)| {
            let owner = partition.part_of_event(k);
            lo <= e.t
                && e.t <= hi
                && nodes.contains(&e.u)
                && nodes.contains(&e.v)
                && owner != i
                && owner != j
        })
        .map(|(_, e)| *e)
        .collect();
    LinkStream::from_parts(
        lo,
        hi,
        Arc::clone(partition.stream().table()),
        nodes.into_iter().collect(),
        events,
    )
}

/// Intra-community density by enumerating every same-community vertex pair.
pub fn intra_community_oracle(g: &StaticGraph, communities: &[Vec<u32>]) -> Option<DensityValue> {
    let mut linked = 0i64;
    let mut pairs = 0i64;
    for c in communities {
        for (a, &x) in c.iter().enumerate() {
            for &y in &c[a + 1..] {
                pairs += 1;
                if g.weight(x, y).is_some() {
                    linked += 1;
                }
            }
        }
    }
    (pairs > 0).then(|| DensityValue::Exact(BigRational::new(big(linked), big(pairs))))
}

/// Inter-community density of community `i` by enumerating cross pairs.
pub fn inter_community_oracle(g: &StaticGraph, communities: &[Vec<u32>], i: usize) -> DensityValue {
    let mut sum = BigRational::zero();
    for (j, cj) in communities.iter().enumerate() {
        if j == i {
            continue;
        }
        let mut linked = 0i64;
        for &x in &communities[i] {
            for &y in cj {
                if g.weight(x, y).is_some() {
                    linked += 1;
                }
            }
        }
        let pairs = (communities[i].len() * cj.len()) as i64;
        sum += BigRational::new(big(linked), big(pairs));
    }
    DensityValue::Exact(sum / BigRational::from_integer(big(communities.len() as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_by_labels;
    use crate::stream::{build_stream, StreamBuilder};

    fn ratio(n: i64, d: i64) -> DensityValue {
        DensityValue::from_ratio(n as i128, d as i128)
    }

    #[test]
    fn window_measure_of_single_contact() {
        let (s, _) = build_stream(&[(5, "a", "b")], 0, 10).unwrap();
        assert_eq!(delta_density_oracle(&s, Delta::seconds(2)), Some(ratio(1, 4)));
    }

    #[test]
    fn window_measure_without_contacts() {
        let mut b = StreamBuilder::<()>::new(0, 10);
        b.add_node("a");
        b.add_node("b");
        let (s, _, _) = b.build().unwrap();
        assert_eq!(delta_density_oracle(&s, Delta::seconds(3)), Some(ratio(0, 1)));
        assert_eq!(delta_density_oracle(&s, Delta::seconds(10)), None);
    }

    #[test]
    fn window_measure_full_cover() {
        let events: Vec<_> = (0..=5).map(|k| (k * 2, "a", "b")).collect();
        let (s, _) = build_stream(&events, 0, 10).unwrap();
        assert_eq!(delta_density_oracle(&s, Delta::seconds(2)), Some(ratio(1, 1)));
    }

    fn partition(events: &[(i64, &str, &str, &str)]) -> StreamPartition {
        let triples: Vec<_> = events.iter().map(|&(t, u, v, _)| (t, u, v)).collect();
        let (stream, _) = build_stream(&triples, 0, 100).unwrap();
        let labels: Vec<_> = events.iter().map(|e| Some(e.3)).collect();
        partition_by_labels(Arc::new(stream), &labels).unwrap()
    }

    #[test]
    fn quotient_oracle_bracket() {
        let p = partition(&[(1, "u", "v", "one"), (3, "u", "w", "two"), (5, "u", "v2", "one")]);
        let q = quotient_stream_oracle(&p);
        let triples: Vec<_> = q.events.iter().map(|e| (e.t, e.i.0, e.j.0)).collect();
        assert_eq!(triples, vec![(3, 0, 1)]);
    }

    #[test]
    fn quotient_oracle_single_event_parts() {
        let p = partition(&[(1, "u", "v", "one"), (3, "u", "w", "two")]);
        assert!(quotient_stream_oracle(&p).events.is_empty());
    }

    #[test]
    fn quotient_oracle_single_part() {
        let p = partition(&[(1, "u", "v", "one"), (3, "u", "w", "one")]);
        assert!(quotient_stream_oracle(&p).events.is_empty());
    }
}
