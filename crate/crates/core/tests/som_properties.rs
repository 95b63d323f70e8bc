use cswl_core::som::{activation_from_distance, weighted_distance, MapParams, SomMap, StepEvent};
use proptest::prelude::*;

fn unit_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, dim)
}

fn stream(dim: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(unit_vec(dim), 1..max)
}

fn params() -> impl Strategy<Value = MapParams> {
    (
        0.5f64..0.99,
        0.0f64..0.2,
        0.0f64..1.0,
        2usize..30,
        0.0f64..1.0,
        0.0f64..0.1,
        0.01f64..1.0,
    )
        .prop_map(|(a_t, lp, beta, maxcomp, e_b, e_n, s)| MapParams {
            a_t,
            lp,
            beta,
            maxcomp,
            e_b,
            e_n,
            s,
            conn_thr: 0.5,
            n_max: None,
            epsilon: 1e-9,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nodes_stay_in_bounds(p in params(), xs in stream(4, 80), seed in any::<u64>()) {
        let mut map = SomMap::with_random_node(p, 4, seed).unwrap();
        for x in &xs {
            map.organize_step(x).unwrap();
            prop_assert!(!map.is_empty());
            for n in map.nodes() {
                prop_assert!(n.relevance.iter().all(|w| (0.0..=1.0).contains(w)));
                prop_assert!(n.dist_moment.iter().all(|d| *d >= 0.0));
            }
        }
    }

    #[test]
    fn insertion_rule(p in params(), cap in prop::option::of(1usize..6),
                      xs in stream(3, 60), seed in any::<u64>()) {
        let p = MapParams { n_max: cap, ..p };
        let mut map = SomMap::with_random_node(p.clone(), 3, seed).unwrap();
        for x in &xs {
            let before = map.len();
            let window_closes = map.nwins() == p.maxcomp;
            let (_, act) = map.best_match(x).unwrap();
            let step = map.organize_step(x).unwrap();
            prop_assert_eq!(step.winner_activation, act);
            let should_insert = act < p.a_t && cap.is_none_or(|c| before < c);
            match step.event {
                StepEvent::Inserted(id) => {
                    prop_assert!(should_insert);
                    if !window_closes {
                        prop_assert_eq!(map.len(), before + 1);
                    }
                    if let Some(node) = map.node(id) {
                        prop_assert_eq!(&node.center, x);
                    }
                }
                StepEvent::Updated(_) => prop_assert!(!should_insert),
            }
        }
    }

    #[test]
    fn pruning_only_at_window_end(p in params(), xs in stream(3, 120), seed in any::<u64>()) {
        let mut map = SomMap::with_random_node(p.clone(), 3, seed).unwrap();
        let limit = p.lp * p.maxcomp as f64;
        for x in &xs {
            let window_closes = map.nwins() == p.maxcomp;
            let before = map.nodes().to_vec();
            let step = map.organize_step(x).unwrap();
            prop_assert_eq!(step.pruned.is_some(), window_closes);
            let winner = match step.event {
                StepEvent::Updated(id) => Some(id),
                StepEvent::Inserted(_) => None,
            };
            let removed = before.iter().filter(|n| map.node(n.id).is_none());
            let mut count = 0;
            for n in removed {
                prop_assert!(window_closes);
                let wins = n.wins + if winner == Some(n.id) { 1.0 } else { 0.0 };
                prop_assert!(wins < limit, "removed node had {} wins, limit {}", wins, limit);
                count += 1;
            }
            if let Some(k) = step.pruned {
                // a node inserted by this very step can be pruned too
                let fresh = matches!(step.event, StepEvent::Inserted(id) if map.node(id).is_none());
                prop_assert_eq!(k, count + usize::from(fresh));
            }
        }
    }

    #[test]
    fn determinism(p in params(), xs in stream(5, 50), seed in any::<u64>()) {
        let run = || {
            let mut m = SomMap::with_random_node(p.clone(), 5, seed).unwrap();
            for x in &xs {
                m.organize_step(x).unwrap();
            }
            m
        };
        let (a, b) = (run(), run());
        prop_assert_eq!(a.nodes(), b.nodes());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn activation_decreases_with_distance(w in prop::collection::vec(0.0f64..=1.0, 6),
                                          d1 in 0.0f64..100.0, d2 in 0.0f64..100.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a_lo = activation_from_distance(lo, &w, 1e-9);
        let a_hi = activation_from_distance(hi, &w, 1e-9);
        prop_assert!(a_hi <= a_lo);
        prop_assert!(a_lo <= 1.0 && a_hi > 0.0);
    }

    #[test]
    fn single_node_assignment_is_threshold_test(p in params(), first in unit_vec(4),
                                                xs in stream(4, 30), x in unit_vec(4)) {
        let p = MapParams { n_max: Some(1), ..p };
        let mut map = SomMap::with_first_stimulus(p.clone(), &first, 0).unwrap();
        for y in &xs {
            map.organize_step(y).unwrap();
        }
        prop_assert_eq!(map.len(), 1);
        let node = &map.nodes()[0];
        let d = weighted_distance(&x, &node.center, &node.relevance).unwrap();
        let act = activation_from_distance(d, &node.relevance, p.epsilon);
        let hits = map.cluster_assign(&x).unwrap();
        prop_assert_eq!(hits.len(), usize::from(act >= p.a_t));
        prop_assert_eq!(map.first_cluster(&x).unwrap().is_some(), act >= p.a_t);
    }
}
