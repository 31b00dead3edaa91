//! Delta-density inside parts (intra-thread) and between parts (inter-thread).

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::density::{Degeneracy, Delta, DensityValue, GapProfile};
use super::MetricError;
use crate::partition::{Part, PartId, StreamPartition};
use crate::stream::{LinkStream, NodeId};

/// Gap profile of a part over its own `[alpha_i, omega_i]` and node set `V_i`.
pub fn part_gap_profile(partition: &StreamPartition, part: &Part) -> GapProfile {
    GapProfile::from_events(
        part.nodes.len(),
        part.alpha,
        part.omega,
        partition.part_events(part),
    )
}

/// Gap profiles of every part, in part order.
pub fn part_gap_profiles(partition: &StreamPartition) -> Vec<GapProfile> {
    partition
        .parts()
        .par_iter()
        .map(|p| part_gap_profile(partition, p))
        .collect()
}

fn per_part_value(profile: &GapProfile, delta: Delta) -> DensityValue {
    if profile.duration() == 0 {
        return DensityValue::Degenerate(Degeneracy::ZeroDuration);
    }
    profile.density(delta)
}

/// Delta-density of one part taken as a stand-alone stream.
///
/// Parts whose events all share one timestamp are degenerate.
pub fn per_thread_delta_density(
    partition: &StreamPartition,
    id: PartId,
    delta: Delta,
) -> Result<DensityValue, MetricError> {
    let part = partition.part(id)?;
    Ok(per_part_value(&part_gap_profile(partition, part), delta))
}

/// Per-part values for a precomputed set of profiles.
pub fn per_thread_values(profiles: &[GapProfile], delta: Delta) -> Vec<DensityValue> {
    profiles.iter().map(|p| per_part_value(p, delta)).collect()
}

/// Aggregate over precomputed part profiles; parts with `omega_i - alpha_i <= delta`
/// add nothing to either sum.
pub fn intra_thread_from_profiles(profiles: &[GapProfile], delta: Delta) -> DensityValue {
    let (num, den) = profiles
        .iter()
        .filter_map(|p| p.terms(delta))
        .fold((0i128, 0i128), |(n, d), (pn, pd)| (n + pn, d + pd));
    if den == 0 {
        return DensityValue::Degenerate(Degeneracy::ZeroDenominator);
    }
    DensityValue::from_ratio(den - num, den)
}

/// Probability that two random authors of the same thread interact within a
/// random length-`delta` window of that thread's lifetime, pooled over threads.
pub fn intra_thread_delta_density(partition: &StreamPartition, delta: Delta) -> DensityValue {
    intra_thread_from_profiles(&part_gap_profiles(partition), delta)
}

/// Which counterpart parts `j` enter the inter-thread average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSampler {
    Exhaustive,
    /// `size` counterparts drawn uniformly without replacement, seeded per part.
    Uniform { size: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterThreadDensity {
    pub value: DensityValue,
    pub sampled: bool,
    /// Number of counterparts actually evaluated.
    pub counterparts: usize,
}

/// Builds `L_ij` from the parent's node incidence instead of scanning every event.
struct SubstreamIndex<'a> {
    partition: &'a StreamPartition,
}

impl<'a> SubstreamIndex<'a> {
    fn new(partition: &'a StreamPartition) -> Self {
        // force the incidence build once up front
        partition.stream().incidence();
        Self { partition }
    }

    fn substream(&self, i: &Part, j: &Part) -> LinkStream {
        let stream = self.partition.stream();
        let events = stream.events();
        let lo = i.alpha.min(j.alpha);
        let hi = i.omega.max(j.omega);
        let mut nodes: Vec<NodeId> = i.nodes.iter().chain(&j.nodes).copied().collect();
        nodes.sort_unstable();
        nodes.dedup();
        let inside = |x: NodeId| nodes.binary_search(&x).is_ok();
        let mut picked: Vec<u32> = Vec::new();
        for &x in &nodes {
            let incident = stream.incidence().of(x);
            let start = incident.partition_point(|&k| events[k as usize].t < lo);
            for &k in &incident[start..] {
                let e = &events[k as usize];
                if e.t > hi {
                    break;
                }
                // each event is reached from both endpoints; keep it once, from `u`
                if e.u != x || !inside(e.v) {
                    continue;
                }
                let owner = self.partition.part_of_event(k as usize);
                if owner != i.id && owner != j.id {
                    picked.push(k);
                }
            }
        }
        picked.sort_unstable();
        let events = picked.into_iter().map(|k| events[k as usize]).collect();
        LinkStream::from_parts(lo, hi, Arc::clone(stream.table()), nodes, events)
    }
}

/// `L_ij`: over `[min(alpha_i, alpha_j), max(omega_i, omega_j)]` and `V_i ∪ V_j`, the
/// parent events between those nodes that belong to neither `P_i` nor `P_j`.
pub fn inter_thread_substream(
    partition: &StreamPartition,
    i: PartId,
    j: PartId,
) -> Result<LinkStream, MetricError> {
    if i == j {
        return Err(MetricError::SamePart(i));
    }
    let (pi, pj) = (partition.part(i)?, partition.part(j)?);
    Ok(SubstreamIndex::new(partition).substream(pi, pj))
}

fn counterparts(k: usize, i: PartId, sampler: PairSampler) -> Result<(Vec<PartId>, bool), MetricError> {
    let others = k - 1;
    let map = |idx: usize| {
        let j = if idx < i.index() { idx } else { idx + 1 };
        PartId(j as u32)
    };
    match sampler {
        PairSampler::Exhaustive => Ok(((0..others).map(map).collect(), false)),
        PairSampler::Uniform { size, seed } => {
            if size == 0 {
                return Err(MetricError::EmptySample);
            }
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (i.0 as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut picked: Vec<usize> = sample(&mut rng, others, size.min(others)).into_vec();
            picked.sort_unstable();
            Ok((picked.into_iter().map(map).collect(), true))
        }
    }
}

/// Unreduced running sum of rationals; reduced once at the end.
struct RawSum {
    num: BigInt,
    den: BigInt,
}

impl RawSum {
    fn new() -> Self {
        Self {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn add(&mut self, r: &BigRational) {
        self.num = &self.num * r.denom() + r.numer() * &self.den;
        self.den = &self.den * r.denom();
    }

    fn into_ratio(self) -> BigRational {
        BigRational::new(self.num, self.den)
    }
}

/// `(1/k) * (population / n) * sum(values)` over `n` evaluated counterparts drawn
/// from `population` candidates among `k` parts.
fn scaled_mean(values: &[BigRational], k: usize, population: usize) -> BigRational {
    let mut sum = RawSum::new();
    for v in values {
        sum.add(v);
    }
    if values.is_empty() {
        return BigRational::zero();
    }
    let scale = BigRational::new(
        BigInt::from(population),
        BigInt::from(values.len()) * BigInt::from(k),
    );
    sum.into_ratio() * scale
}

/// Inter-thread delta-density of part `i` for several window lengths at once.
///
/// Each `L_ij` is built once and evaluated for every delta.
pub fn inter_thread_delta_densities(
    partition: &StreamPartition,
    i: PartId,
    deltas: &[Delta],
    sampler: PairSampler,
) -> Result<Vec<InterThreadDensity>, MetricError> {
    let k = partition.len();
    if k < 2 {
        return Err(MetricError::TooFewParts(k));
    }
    let pi = partition.part(i)?;
    let (js, sampled) = counterparts(k, i, sampler)?;
    let index = SubstreamIndex::new(partition);
    let mut per_delta: Vec<Vec<BigRational>> = vec![Vec::with_capacity(js.len()); deltas.len()];
    for &j in &js {
        let lij = index.substream(pi, &partition.parts()[j.index()]);
        let profile = GapProfile::from_stream(&lij);
        for (slot, &d) in per_delta.iter_mut().zip(deltas) {
            match profile.density(d) {
                DensityValue::Exact(r) => slot.push(r),
                DensityValue::Degenerate(_) => unreachable!("L_ij has at least two nodes"),
            }
        }
    }
    Ok(per_delta
        .iter()
        .map(|values| InterThreadDensity {
            value: DensityValue::Exact(scaled_mean(values, k, k - 1)),
            sampled,
            counterparts: js.len(),
        })
        .collect())
}

/// `(1/|C|) * sum_{j != i} delta_density(L_ij)`, normalized by the number of parts.
pub fn inter_thread_delta_density(
    partition: &StreamPartition,
    i: PartId,
    delta: Delta,
    sampler: PairSampler,
) -> Result<InterThreadDensity, MetricError> {
    Ok(inter_thread_delta_densities(partition, i, &[delta], sampler)?
        .pop()
        .expect("one delta in, one value out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::density::delta_density;
    use crate::partition::partition_by_labels;
    use crate::stream::build_stream;

    fn ratio(n: i64, d: i64) -> DensityValue {
        DensityValue::from_ratio(n as i128, d as i128)
    }

    fn partition(events: &[(i64, &str, &str, &str)]) -> StreamPartition {
        let triples: Vec<_> = events.iter().map(|&(t, u, v, _)| (t, u, v)).collect();
        let (stream, _) = build_stream(&triples, 0, 1000).unwrap();
        // events carry distinct times in these fixtures, so order is preserved
        let mut sorted = events.to_vec();
        sorted.sort_by_key(|e| e.0);
        let labels: Vec<_> = sorted.iter().map(|e| Some(e.3)).collect();
        partition_by_labels(Arc::new(stream), &labels).unwrap()
    }

    #[test]
    fn intra_boundary_events() {
        let p = partition(&[(0, "a", "b", "x"), (10, "a", "b", "x")]);
        assert_eq!(intra_thread_delta_density(&p, Delta::seconds(2)), ratio(0, 1));
    }

    #[test]
    fn intra_dense_part_is_one() {
        let p = partition(&[(0, "a", "b", "x"), (3, "a", "b", "x"), (6, "a", "b", "x")]);
        assert_eq!(intra_thread_delta_density(&p, Delta::seconds(3)), ratio(1, 1));
    }

    #[test]
    fn intra_is_scale_invariant() {
        let one = partition(&[(0, "a", "b", "x"), (4, "b", "c", "x"), (10, "a", "b", "x")]);
        let two = partition(&[
            (0, "a", "b", "x"),
            (4, "b", "c", "x"),
            (10, "a", "b", "x"),
            (100, "d", "e", "y"),
            (104, "e", "f", "y"),
            (110, "d", "e", "y"),
        ]);
        for d in 0..10 {
            let d = Delta::seconds(d);
            assert_eq!(
                intra_thread_delta_density(&one, d),
                intra_thread_delta_density(&two, d)
            );
        }
    }

    #[test]
    fn intra_single_part_matches_per_thread() {
        let p = partition(&[(5, "a", "b", "x"), (9, "b", "c", "x"), (30, "a", "c", "x")]);
        for d in 0..25 {
            let d = Delta::seconds(d);
            assert_eq!(
                intra_thread_delta_density(&p, d),
                per_thread_delta_density(&p, PartId(0), d).unwrap()
            );
        }
    }

    #[test]
    fn per_thread_two_event_thread() {
        let p = partition(&[(150, "bob", "alice", "x"), (200, "alice", "bob", "x")]);
        assert_eq!(per_thread_delta_density(&p, PartId(0), Delta::seconds(50)).unwrap(), ratio(1, 1));
        assert_eq!(per_thread_delta_density(&p, PartId(0), Delta::seconds(0)).unwrap(), ratio(0, 1));
    }

    #[test]
    fn per_thread_half_interior_gap() {
        // no length-5 window inside [0, 10] reaches either endpoint contact except at measure zero
        let p = partition(&[(0, "a", "b", "x"), (10, "a", "b", "x")]);
        assert_eq!(per_thread_delta_density(&p, PartId(0), Delta::seconds(5)).unwrap(), ratio(0, 1));
        // with an interior contact at 5 every length-5 window hits one
        let p = partition(&[(0, "a", "b", "x"), (5, "a", "b", "x"), (10, "a", "b", "x")]);
        assert_eq!(per_thread_delta_density(&p, PartId(0), Delta::seconds(5)).unwrap(), ratio(1, 1));
    }

    #[test]
    fn per_thread_zero_duration_is_degenerate() {
        let p = partition(&[(7, "a", "b", "x"), (9, "c", "d", "y")]);
        assert!(per_thread_delta_density(&p, PartId(0), Delta::seconds(0))
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn substream_disjoint_parts_is_empty() {
        let p = partition(&[(1, "a", "b", "x"), (2, "c", "d", "y")]);
        let l = inter_thread_substream(&p, PartId(0), PartId(1)).unwrap();
        assert!(l.events().is_empty());
        assert_eq!(l.node_count(), 4);
        assert_eq!((l.alpha(), l.omega()), (1, 2));
    }

    #[test]
    fn substream_takes_third_party_links() {
        let p = partition(&[
            (1, "a", "b", "x"),
            (9, "c", "d", "y"),
            (5, "a", "c", "z"),
            (50, "a", "c", "z"),
        ]);
        let l = inter_thread_substream(&p, PartId(0), PartId(2)).unwrap();
        assert_eq!(l.events().len(), 1);
        assert_eq!(l.events()[0].t, 5);
        assert!(matches!(
            inter_thread_substream(&p, PartId(1), PartId(1)),
            Err(MetricError::SamePart(_))
        ));
    }

    #[test]
    fn substream_excludes_own_links() {
        let p = partition(&[(1, "a", "b", "x"), (3, "a", "b", "y"), (5, "a", "b", "x")]);
        let l = inter_thread_substream(&p, PartId(0), PartId(1)).unwrap();
        assert!(l.events().is_empty());
    }

    #[test]
    fn inter_without_background_is_zero() {
        let p = partition(&[(1, "a", "b", "x"), (4, "c", "d", "y"), (8, "a", "b", "x")]);
        let r = inter_thread_delta_density(&p, PartId(0), Delta::seconds(2), PairSampler::Exhaustive)
            .unwrap();
        assert_eq!(r.value, ratio(0, 1));
        assert!(!r.sampled);
    }

    #[test]
    fn full_sample_matches_exhaustive() {
        let p = partition(&[
            (1, "a", "b", "x"),
            (4, "c", "d", "y"),
            (6, "a", "c", "z"),
            (8, "a", "b", "x"),
            (9, "b", "d", "w"),
            (12, "c", "d", "y"),
        ]);
        let k = p.len();
        for i in 0..k {
            let i = PartId(i as u32);
            let exact = inter_thread_delta_density(&p, i, Delta::seconds(1), PairSampler::Exhaustive).unwrap();
            let sampled = inter_thread_delta_density(
                &p,
                i,
                Delta::seconds(1),
                PairSampler::Uniform { size: k - 1, seed: 3 },
            )
            .unwrap();
            assert_eq!(exact.value, sampled.value);
            assert!(sampled.sampled);
        }
    }

    #[test]
    fn inter_is_mean_of_substream_densities_over_k() {
        let p = partition(&[
            (1, "a", "b", "x"),
            (4, "c", "d", "y"),
            (6, "a", "c", "z"),
            (8, "a", "b", "x"),
            (9, "b", "d", "w"),
        ]);
        let d = Delta::seconds(2);
        let i = PartId(0);
        let mut sum = BigRational::zero();
        for j in 1..p.len() {
            let l = inter_thread_substream(&p, i, PartId(j as u32)).unwrap();
            sum += delta_density(&l, d).ratio().unwrap().clone();
        }
        let expected = sum / BigRational::from_integer(BigInt::from(p.len()));
        let got = inter_thread_delta_density(&p, i, d, PairSampler::Exhaustive).unwrap();
        assert_eq!(got.value, DensityValue::Exact(expected));
    }

    #[test]
    fn normalization_divides_by_part_count() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let got = scaled_mean(&[half.clone(), half], 3, 2);
        assert_eq!(got, BigRational::new(BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn sampling_is_seeded() {
        let (a, _) = counterparts(50, PartId(3), PairSampler::Uniform { size: 5, seed: 9 }).unwrap();
        let (b, _) = counterparts(50, PartId(3), PairSampler::Uniform { size: 5, seed: 9 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(!a.contains(&PartId(3)));
        assert!(counterparts(50, PartId(3), PairSampler::Uniform { size: 0, seed: 9 }).is_err());
    }
}
