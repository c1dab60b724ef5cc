#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pags_core::logic::Formula;
use pags_core::model::{ActionId, GameStructure, PropId, StateId};
use pags_core::prob::{ActionLottery, Distribution, Relation};
use pags_core::rational::ratio;
use pags_core::Rational;
use proptest::collection::vec;
use proptest::prelude::*;

/// Normalises nonnegative integer weights, bumping the first entry if all
/// are zero.
pub fn normalise(mut w: Vec<u32>) -> Vec<Rational> {
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let total: u32 = w.iter().sum();
    w.iter().map(|&x| ratio(x.into(), total.into())).collect()
}

pub fn dist_from(weights: &[Rational]) -> Distribution {
    let map: BTreeMap<StateId, Rational> = weights
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Rational::from_integer(0.into()))
        .map(|(i, p)| (StateId(i), p.clone()))
        .collect();
    Distribution::try_from_map(map).unwrap()
}

pub fn lottery_from(weights: &[Rational]) -> ActionLottery {
    let map: BTreeMap<ActionId, Rational> = weights
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Rational::from_integer(0.into()))
        .map(|(i, p)| (ActionId(i), p.clone()))
        .collect();
    ActionLottery::try_from_map(map).unwrap()
}

/// Distribution over `n` states whose denominators are at most `max_den`.
pub fn arb_dist(n: usize, max_den: u32) -> impl Strategy<Value = Distribution> {
    let cap = (max_den / n as u32).max(1);
    vec(0..=cap, n).prop_map(|w| dist_from(&normalise(w)))
}

pub fn arb_lottery(n: usize) -> impl Strategy<Value = ActionLottery> {
    vec(0u32..=3, n).prop_map(|w| lottery_from(&normalise(w)))
}

pub fn arb_relation(n: usize) -> impl Strategy<Value = Relation> {
    vec(any::<bool>(), n * n).prop_map(move |bits| {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (StateId(i / n), StateId(i % n)))
            .collect()
    })
}

pub fn build_model(n: usize, a1: usize, a2: usize, np: usize, labels: Vec<Vec<bool>>, rows: Vec<Vec<u32>>) -> GameStructure {
    let mut table = BTreeMap::new();
    let mut it = rows.into_iter();
    for s in 0..n {
        for a in 0..a1 {
            for b in 0..a2 {
                let w = normalise(it.next().unwrap());
                let row = w
                    .into_iter()
                    .enumerate()
                    .filter(|(_, p)| *p != Rational::from_integer(0.into()))
                    .map(|(t, p)| (StateId(t), p))
                    .collect();
                table.insert((StateId(s), ActionId(a), ActionId(b)), row);
            }
        }
    }
    GameStructure {
        name: "random".to_string(),
        states: (0..n).map(|i| format!("s{i}")).collect(),
        init: StateId(0),
        props: (0..np).map(|i| format!("p{i}")).collect(),
        labels: labels
            .into_iter()
            .map(|l| {
                l.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| PropId(i))
                    .collect::<BTreeSet<_>>()
            })
            .collect(),
        acts1: (0..a1).map(|i| format!("a{i}")).collect(),
        acts2: (0..a2).map(|i| format!("b{i}")).collect(),
        table,
    }
}

/// Models with up to `max_states` states, `max_acts` actions per player and
/// `max_props` propositions. Rows use weights in `0..=2`.
pub fn arb_model(max_states: usize, max_acts: usize, max_props: usize) -> impl Strategy<Value = GameStructure> {
    (1..=max_states, 1..=max_acts, 1..=max_acts, 1..=max_props)
        .prop_flat_map(|(n, a1, a2, np)| {
            (
                Just((n, a1, a2, np)),
                vec(vec(any::<bool>(), np), n),
                vec(vec(0u32..=2, n), n * a1 * a2),
            )
        })
        .prop_map(|((n, a1, a2, np), labels, rows)| build_model(n, a1, a2, np, labels, rows))
}

/// Closed formulas over `props` with at most `depth` nested operators.
pub fn arb_formula(props: Vec<String>, depth: u32) -> BoxedStrategy<Formula> {
    let ps = props.clone();
    let leaf = prop_oneof![
        4 => prop::sample::select(ps.clone()).prop_map(Formula::Prop),
        3 => prop::sample::select(ps).prop_map(Formula::NegProp),
        1 => Just(Formula::top()),
    ]
    .boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = arb_formula(props, depth - 1);
    prop_oneof![
        2 => leaf,
        2 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::And(vec![a, b])),
        2 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::Or(vec![a, b])),
        2 => sub.clone().prop_map(Formula::enforce),
        2 => (1i64..=5, sub.clone(), sub.clone())
            .prop_map(|(k, a, b)| Formula::ProbSum(vec![(ratio(k, 6), a), (ratio(6 - k, 6), b)])),
        2 => (sub.clone(), sub).prop_map(|(a, b)| Formula::Mix(vec![a, b])),
    ]
    .boxed()
}

pub fn props_of(g: &GameStructure) -> Vec<String> {
    g.props.clone()
}
