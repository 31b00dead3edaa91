//! Intra- and inter-community density of a static graph under a vertex partition.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::density::{Degeneracy, DensityValue};
use super::MetricError;
use crate::graph::StaticGraph;

/// Maps each vertex to its community index after checking that `communities`
/// covers the vertex set exactly once.
pub(crate) fn community_index(
    g: &StaticGraph,
    communities: &[Vec<u32>],
) -> Result<Vec<usize>, MetricError> {
    let mut owner = vec![usize::MAX; g.vertex_count()];
    for (c, members) in communities.iter().enumerate() {
        for &x in members {
            let slot = g
                .vertices()
                .binary_search(&x)
                .map_err(|_| MetricError::UnknownVertex(x))?;
            if owner[slot] != usize::MAX {
                return Err(MetricError::OverlappingCommunities(x));
            }
            owner[slot] = c;
        }
    }
    if let Some(slot) = owner.iter().position(|&c| c == usize::MAX) {
        return Err(MetricError::UncoveredVertex(g.vertices()[slot]));
    }
    Ok(owner)
}

pub(crate) fn owner_of(g: &StaticGraph, owner: &[usize], x: u32) -> usize {
    owner[g.vertices().binary_search(&x).expect("edge endpoints are vertices")]
}

/// `2 * sum_i |E(C_i)| / sum_i |C_i| (|C_i| - 1)`: probability that two random
/// vertices of the same community are adjacent.
pub fn intra_community_density(
    g: &StaticGraph,
    communities: &[Vec<u32>],
) -> Result<DensityValue, MetricError> {
    let owner = community_index(g, communities)?;
    let inside = g
        .edges()
        .iter()
        .filter(|e| owner_of(g, &owner, e.u) == owner_of(g, &owner, e.v))
        .count() as i128;
    let den: i128 = communities
        .iter()
        .map(|c| {
            let n = c.len() as i128;
            n * (n - 1)
        })
        .sum();
    if den == 0 {
        return Ok(DensityValue::Degenerate(Degeneracy::ZeroDenominator));
    }
    Ok(DensityValue::from_ratio(2 * inside, den))
}

/// `(1/|C|) * sum_{j != i} |E(C_i, C_j)| / (|C_i| |C_j|)`.
///
/// The leading factor is the number of communities `|C|`, not `|C| - 1`.
pub fn inter_community_density(
    g: &StaticGraph,
    communities: &[Vec<u32>],
    i: usize,
) -> Result<DensityValue, MetricError> {
    if i >= communities.len() {
        return Err(MetricError::UnknownCommunity(i));
    }
    let owner = community_index(g, communities)?;
    let mut cross = vec![0i64; communities.len()];
    for e in g.edges() {
        let (a, b) = (owner_of(g, &owner, e.u), owner_of(g, &owner, e.v));
        if a == b {
            continue;
        }
        if a == i {
            cross[b] += 1;
        } else if b == i {
            cross[a] += 1;
        }
    }
    let size_i = communities[i].len() as i64;
    let mut sum = BigRational::zero();
    for (j, members) in communities.iter().enumerate() {
        if j == i || cross[j] == 0 {
            continue;
        }
        let pairs = size_i * members.len() as i64;
        sum += BigRational::new(BigInt::from(cross[j]), BigInt::from(pairs));
    }
    Ok(DensityValue::Exact(
        sum / BigRational::from_integer(BigInt::from(communities.len())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u32, u32)], n: u32) -> StaticGraph {
        StaticGraph::from_weighted_edges(0..n, edges.iter().map(|&(a, b)| (a, b, 1)))
    }

    fn ratio(n: i64, d: i64) -> DensityValue {
        DensityValue::from_ratio(n as i128, d as i128)
    }

    #[test]
    fn two_triangles() {
        let g = graph(&[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 6);
        let comms = vec![vec![0, 1, 2], vec![3, 4, 5]];
        assert_eq!(intra_community_density(&g, &comms).unwrap(), ratio(1, 1));
    }

    #[test]
    fn only_cross_edges() {
        let g = graph(&[(0, 2), (1, 3)], 4);
        let comms = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(intra_community_density(&g, &comms).unwrap(), ratio(0, 1));
    }

    #[test]
    fn mixed_sizes() {
        // {a,b,c} with edge ab, {d,e} with edge de -> (2*2)/(6+2)
        let g = graph(&[(0, 1), (3, 4)], 5);
        let comms = vec![vec![0, 1, 2], vec![3, 4]];
        assert_eq!(intra_community_density(&g, &comms).unwrap(), ratio(1, 2));
    }

    #[test]
    fn all_singletons_is_degenerate() {
        let g = graph(&[(0, 1)], 2);
        let comms = vec![vec![0], vec![1]];
        assert!(intra_community_density(&g, &comms).unwrap().is_degenerate());
    }

    #[test]
    fn rejects_non_partitions() {
        let g = graph(&[(0, 1)], 3);
        assert_eq!(
            intra_community_density(&g, &[vec![0, 1]]).unwrap_err(),
            MetricError::UncoveredVertex(2)
        );
        assert_eq!(
            intra_community_density(&g, &[vec![0, 1], vec![1, 2]]).unwrap_err(),
            MetricError::OverlappingCommunities(1)
        );
        assert_eq!(
            intra_community_density(&g, &[vec![0, 1, 2, 9]]).unwrap_err(),
            MetricError::UnknownVertex(9)
        );
    }

    #[test]
    fn inter_single_cross_edge() {
        let g = graph(&[(0, 2)], 4);
        let comms = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(inter_community_density(&g, &comms, 0).unwrap(), ratio(1, 8));
    }

    #[test]
    fn inter_without_cross_edges() {
        let g = graph(&[(0, 1), (2, 3)], 4);
        let comms = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(inter_community_density(&g, &comms, 1).unwrap(), ratio(0, 1));
    }

    #[test]
    fn inter_complete_bipartite() {
        let g = graph(&[(0, 2), (0, 3), (1, 2), (1, 3)], 4);
        let comms = vec![vec![0, 1], vec![2, 3]];
        assert_eq!(inter_community_density(&g, &comms, 0).unwrap(), ratio(1, 2));
        assert_eq!(
            inter_community_density(&g, &comms, 2).unwrap_err(),
            MetricError::UnknownCommunity(2)
        );
    }
}
