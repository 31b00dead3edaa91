mod common;

use common::raw_stream;
use linkdens_core::metrics::{delta_density, delta_density_profile, graph_density, GapProfile};
use linkdens_core::validation::{delta_density_oracle, graph_density_over_nodes};
use linkdens_core::{induced_graph, Delta, DensityValue, StaticGraph};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_window_oracle(raw in raw_stream(6, 25, 200, 1)) {
        let s = raw.build();
        for d in 0..s.duration() {
            let d = Delta::seconds(d);
            prop_assert_eq!(Some(delta_density(&s, d)), delta_density_oracle(&s, d), "delta {:?}", d);
        }
    }

    #[test]
    fn bounded_and_non_decreasing(raw in raw_stream(6, 25, 200, 1)) {
        let s = raw.build();
        let deltas: Vec<Delta> = (0..s.duration()).map(Delta::seconds).collect();
        let mut prev = BigRational::zero();
        for (_, v) in delta_density_profile(&s, &deltas) {
            let r = v.ratio().unwrap().clone();
            prop_assert!(r >= BigRational::zero() && r <= BigRational::one());
            prop_assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn long_windows_give_graph_density(raw in raw_stream(6, 25, 200, 1), extra in 0i64..50) {
        let s = raw.build();
        let d = Delta::seconds(s.duration() + extra);
        let expected = graph_density_over_nodes(&s).unwrap();
        prop_assert_eq!(&delta_density(&s, d), &expected);
        let over_v = StaticGraph::from_weighted_edges(
            s.nodes().iter().map(|x| x.0),
            induced_graph(&s).edges().iter().map(|e| (e.u, e.v, e.weight)),
        );
        prop_assert_eq!(&graph_density(&over_v), &expected);
    }

    #[test]
    fn windows_above_every_gap_give_graph_density(raw in raw_stream(6, 25, 200, 1)) {
        let s = raw.build();
        let profile = GapProfile::from_stream(&s);
        if let Some(max_gap) = profile.max_gap() {
            let expected = graph_density_over_nodes(&s).unwrap();
            for d in max_gap..s.duration() {
                prop_assert_eq!(&profile.density(Delta::seconds(d)), &expected);
            }
        }
    }

    #[test]
    fn padded_gaps_span_the_interval(raw in raw_stream(6, 25, 200, 1)) {
        let s = raw.build();
        for ((u, v), _) in s.pair_groups() {
            let series = s.intercontact(u, v).unwrap();
            prop_assert_eq!(series.gaps.iter().sum::<i64>(), s.duration());
            prop_assert!(series.gaps.iter().all(|&g| g >= 0));
        }
    }

    #[test]
    fn induced_substream_commutes_with_induced_graph(
        raw in raw_stream(6, 25, 200, 1),
        keep in prop::collection::vec(any::<bool>(), 6),
    ) {
        let s = raw.build();
        let subset: Vec<_> = s.nodes().iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
        let sub = s.induced_substream(&subset).unwrap();
        let ids: Vec<u32> = subset.iter().map(|x| x.0).collect();
        let (left, right) = (induced_graph(&sub), induced_graph(&s).subgraph(&ids));
        prop_assert_eq!(left.edges(), right.edges());
        prop_assert!(sub.events().iter().all(|e| subset.contains(&e.u) && subset.contains(&e.v)));
        prop_assert_eq!((sub.alpha(), sub.omega()), (s.alpha(), s.omega()));
    }
}

#[test]
fn empty_stream_is_zero_for_every_window() {
    let raw = common::RawStream {
        nodes: 4,
        omega: 30,
        events: vec![],
    };
    let s = raw.build();
    for d in 0..30 {
        assert_eq!(delta_density(&s, Delta::seconds(d)), DensityValue::zero());
    }
}
