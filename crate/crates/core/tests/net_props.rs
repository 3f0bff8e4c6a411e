mod common;

use common::checks::cpre_box_violations;
use common::{arb_net, random_marking};
use coverlib::{Marking, PetriNet, TransitionId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn net_and_markings(max: u64) -> impl Strategy<Value = (PetriNet, Vec<Marking>)> {
    (arb_net(), any::<u64>()).prop_map(move |(net, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ms = (0..8)
            .map(|_| random_marking(&mut rng, net.num_places(), max))
            .collect();
        (net, ms)
    })
}

proptest! {
    #[test]
    fn fire_defined_iff_enabled((net, ms) in net_and_markings(3)) {
        for m in &ms {
            for t in net.transition_ids() {
                prop_assert_eq!(net.fire(m, t).unwrap().is_some(), net.enabled(m, t).unwrap());
            }
        }
    }

    #[test]
    fn firing_is_monotone((net, ms) in net_and_markings(3)) {
        for pair in ms.windows(2) {
            // m ≤ m' by taking the pointwise maximum
            let m = &pair[0];
            let bigger = Marking::new(
                m.counts().iter().zip(pair[1].counts()).map(|(a, b)| a.max(b).clone()).collect(),
            );
            for t in net.transition_ids() {
                if let Some(m1) = net.fire(m, t).unwrap() {
                    let m2 = net.fire(&bigger, t).unwrap();
                    prop_assert!(m2.is_some());
                    let m2 = m2.unwrap();
                    prop_assert!(m1.leq(&m2).unwrap());
                    let d = net.displacement(t).unwrap();
                    for p in net.place_ids() {
                        let step = |a: &Marking, b: &Marking| {
                            num_bigint::BigInt::from(b.get(p).clone()) - num_bigint::BigInt::from(a.get(p).clone())
                        };
                        prop_assert_eq!(step(m, &m1), d.deltas()[p.0].clone());
                        prop_assert_eq!(step(&bigger, &m2), d.deltas()[p.0].clone());
                    }
                }
            }
        }
    }

    #[test]
    fn cpre_matches_box_enumeration((net, ms) in net_and_markings(3)) {
        for t in net.transition_ids() {
            prop_assert_eq!(cpre_box_violations(&net, t, &ms, 3), 0);
        }
    }

    #[test]
    fn enabling_marking_is_minimal(net in arb_net()) {
        for t in net.transition_ids() {
            let mt = net.min_enabling_marking(t).unwrap();
            prop_assert!(net.enabled(&mt, t).unwrap());
            for p in mt.support().collect::<Vec<_>>() {
                let mut less = mt.clone();
                less.set(p, mt.get(p) - 1u32);
                prop_assert!(!net.enabled(&less, t).unwrap());
            }
            prop_assert_eq!(net.cpre(t, &Marking::zero(net.num_places())).unwrap(), mt);
        }
    }
}

#[test]
fn example_transition_ids_are_dense() {
    let net = common::example();
    let ids: Vec<TransitionId> = net.transition_ids().collect();
    assert_eq!(ids, vec![TransitionId(0), TransitionId(1), TransitionId(2)]);
}
