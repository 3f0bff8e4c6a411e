//! Shared fixtures: a seeded random-net generator, the paper nets and an
//! independent Fourier–Motzkin feasibility oracle.
#![allow(dead_code)]

pub mod checks;
pub mod fm;

use coverlib::{Marking, NetBuilder, PetriNet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_TEXT: &str = "\
places: p1 p2 p3
transitions:
  t1: in p1 out p2;
  t2: in p2 out p3*2;
  t3: in p3 out p2*2;
init: p1=1
target:
  p2>=2 p3>=1
  p1>=2
";

pub const NET_W_TEXT: &str = "\
places: p1 p2
transitions:
  t: in p2 out p1;
init: p1=1
target: p2>=1
";

pub fn m(v: &[u64]) -> Marking {
    Marking::from_u64s(v)
}

pub fn example() -> PetriNet {
    coverlib::parse_native(EXAMPLE_TEXT).unwrap().net
}

pub fn net_w() -> PetriNet {
    coverlib::parse_native(NET_W_TEXT).unwrap().net
}

/// Three places: `t` moves a token from `p2` to `p1` and `u` from `p3` to
/// `p2`. Only `p1` is marked, so `p2` and `p3` stay empty forever, yet the
/// backward search without pruning still explores `(0,0,1)`.
pub fn net_w_variant() -> PetriNet {
    NetBuilder::new()
        .place("p1")
        .and_then(|b| b.place("p2"))
        .and_then(|b| b.place("p3"))
        .and_then(|b| b.transition("t", &[("p2", 1u32)], &[("p1", 1u32)]))
        .and_then(|b| b.transition("u", &[("p3", 1u32)], &[("p2", 1u32)]))
        .and_then(|b| b.initial("p1", 1u32))
        .unwrap()
        .build()
}

/// A random net with at most 5 places and 6 transitions, arc weights and
/// initial counts at most 2; each transition has one or two input places
/// and up to two output places. Source transitions are left out: they make
/// the net unbounded, so the oracle could never close on it.
pub fn random_net(rng: &mut impl Rng) -> PetriNet {
    let places = rng.gen_range(1..=5usize);
    let transitions = rng.gen_range(1..=6usize);
    let names: Vec<String> = (0..places).map(|i| format!("p{i}")).collect();
    let mut b = NetBuilder::new();
    for n in &names {
        b.add_place(n).unwrap();
    }
    for t in 0..transitions {
        let mut pre = vec![0u32; places];
        let mut post = vec![0u32; places];
        let inputs = rng.gen_range(1..=places.min(2));
        for _ in 0..inputs {
            pre[rng.gen_range(0..places)] = rng.gen_range(1..=2);
        }
        let outputs = rng.gen_range(0..=places.min(2));
        for _ in 0..outputs {
            post[rng.gen_range(0..places)] = rng.gen_range(1..=2);
        }
        let arcs = |v: &[u32]| -> Vec<(&str, u32)> {
            v.iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| (names[i].as_str(), k))
                .collect()
        };
        b.add_transition(&format!("t{t}"), &arcs(&pre), &arcs(&post))
            .unwrap();
    }
    for n in &names {
        let k = rng.gen_range(0..=2u32);
        if k > 0 {
            b.set_initial(n, k).unwrap();
        }
    }
    b.build()
}

pub fn random_marking(rng: &mut impl Rng, places: usize, max: u64) -> Marking {
    let v: Vec<u64> = (0..places).map(|_| rng.gen_range(0..=max)).collect();
    Marking::from_u64s(&v)
}

pub struct Instance {
    pub name: String,
    pub net: PetriNet,
    pub target: Marking,
}

/// `count` reproducible instances; targets have entries at most 2.
pub fn corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let net = random_net(&mut rng);
            let target = random_marking(&mut rng, net.num_places(), 2);
            Instance {
                name: format!("rand{seed}-{i}"),
                net,
                target,
            }
        })
        .collect()
}

/// Proptest strategy over the same distribution, driven by a seed.
pub fn arb_instance() -> impl Strategy<Value = (PetriNet, Marking)> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_net(&mut rng);
        let target = random_marking(&mut rng, net.num_places(), 2);
        (net, target)
    })
}

pub fn arb_net() -> impl Strategy<Value = PetriNet> {
    arb_instance().prop_map(|(n, _)| n)
}
