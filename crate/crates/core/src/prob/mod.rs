//! Distributions, mixed actions, the generalised transition function and
//! liftings of state relations.

mod lift;
pub mod lp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::model::{ActionId, GameStructure, ModelError, Player, Row, StateId};
use crate::rational::{fmt_rational, parse_rational, Rational};

pub use lift::{lift_check, smyth_check, split_match, SmythReport};
pub use lp::{lp_feasible, LinearProblem, Relop, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbError {
    #[error("entries sum to {0}, not 1")]
    NotNormalized(String),
    #[error("negative probability {0}")]
    Negative(String),
    #[error("combination weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("mixed actions belong to different players")]
    OwnerMismatch,
    #[error("mixed action is not defined at state {0}")]
    Undefined(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A probability distribution over states with exact rational weights.
///
/// Only the support is stored: every entry is strictly positive and the
/// entries sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Distribution {
    entries: BTreeMap<StateId, Rational>,
}

impl Distribution {
    pub fn point(s: StateId) -> Self {
        Self {
            entries: BTreeMap::from([(s, Rational::one())]),
        }
    }

    /// Zero entries are dropped; negative entries or a sum other than one
    /// are rejected.
    pub fn try_from_map(map: BTreeMap<StateId, Rational>) -> Result<Self, ProbError> {
        let mut sum = Rational::zero();
        let mut entries = BTreeMap::new();
        for (s, p) in map {
            if p.is_negative() {
                return Err(ProbError::Negative(fmt_rational(&p)));
            }
            if !p.is_zero() {
                sum += &p;
                entries.insert(s, p);
            }
        }
        if !sum.is_one() {
            return Err(ProbError::NotNormalized(fmt_rational(&sum)));
        }
        Ok(Self { entries })
    }

    /// Accumulates weighted entries. The caller guarantees nonnegativity and
    /// a total of one.
    pub(crate) fn from_accumulated(map: BTreeMap<StateId, Rational>) -> Self {
        let entries: BTreeMap<_, _> = map.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        debug_assert!(entries.values().all(Signed::is_positive));
        debug_assert!(entries.values().sum::<Rational>().is_one());
        Self { entries }
    }

    pub fn prob(&self, s: StateId) -> Rational {
        self.entries.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get(&self, s: StateId) -> Option<&Rational> {
        self.entries.get(&s)
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> + '_ {
        self.entries.iter().map(|(s, p)| (*s, p))
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn as_point(&self) -> Option<StateId> {
        (self.entries.len() == 1).then(|| *self.entries.keys().next().unwrap())
    }

    pub fn entries(&self) -> &BTreeMap<StateId, Rational> {
        &self.entries
    }

    /// Probability of a set of states.
    pub fn mass(&self, set: impl Fn(StateId) -> bool) -> Rational {
        self.entries
            .iter()
            .filter(|(s, _)| set(**s))
            .map(|(_, p)| p.clone())
            .sum()
    }

    pub fn display<'a>(&'a self, g: &'a GameStructure) -> DistDisplay<'a> {
        DistDisplay { d: self, g }
    }
}

pub struct DistDisplay<'a> {
    d: &'a Distribution,
    g: &'a GameStructure,
}

impl fmt::Display for DistDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, p) in self.d.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}:{}", self.g.state_name(s), fmt_rational(p))?;
        }
        Ok(())
    }
}

/// Parses the literal syntax `s0:1/2,s1:1/2`.
pub fn parse_distribution(g: &GameStructure, text: &str) -> Result<Distribution, ProbError> {
    let mut map = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, p) = item
            .split_once(':')
            .ok_or_else(|| ProbError::Parse(format!("expected `state:prob`, found `{item}`")))?;
        let s = g.state_id(name.trim())?;
        let p = parse_rational(p).map_err(|e| ProbError::Parse(e.to_string()))?;
        if map.insert(s, p).is_some() {
            return Err(ProbError::Parse(format!("state `{}` listed twice", name.trim())));
        }
    }
    if map.is_empty() {
        return Err(ProbError::Parse("empty distribution".to_string()));
    }
    Distribution::try_from_map(map)
}

/// A lottery over one player's actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionLottery {
    weights: BTreeMap<ActionId, Rational>,
}

impl ActionLottery {
    pub fn pure(a: ActionId) -> Self {
        Self {
            weights: BTreeMap::from([(a, Rational::one())]),
        }
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        Self {
            weights: (0..n).map(|i| (ActionId(i), w.clone())).collect(),
        }
    }

    pub fn try_from_map(map: BTreeMap<ActionId, Rational>) -> Result<Self, ProbError> {
        let mut sum = Rational::zero();
        let mut weights = BTreeMap::new();
        for (a, p) in map {
            if p.is_negative() {
                return Err(ProbError::Negative(fmt_rational(&p)));
            }
            if !p.is_zero() {
                sum += &p;
                weights.insert(a, p);
            }
        }
        if !sum.is_one() {
            return Err(ProbError::NotNormalized(fmt_rational(&sum)));
        }
        Ok(Self { weights })
    }

    pub fn prob(&self, a: ActionId) -> Rational {
        self.weights.get(&a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActionId, &Rational)> + '_ {
        self.weights.iter().map(|(a, p)| (*a, p))
    }

    pub fn as_pure(&self) -> Option<ActionId> {
        (self.weights.len() == 1).then(|| *self.weights.keys().next().unwrap())
    }

    pub fn render(&self, g: &GameStructure, player: Player) -> String {
        let items: Vec<String> = self
            .iter()
            .map(|(a, p)| format!("{}:{}", g.action_name(player, a), fmt_rational(p)))
            .collect();
        format!("{{{}}}", items.join(","))
    }
}

/// All lotteries over `n` actions whose weights are multiples of `1/k`,
/// i.e. the compositions of `k` into `n` parts. Ordered lexicographically
/// with larger weight on earlier actions first, so pure lotteries on the
/// first action come first.
pub fn lottery_grid(n: usize, k: u32) -> Vec<ActionLottery> {
    assert!(n >= 1 && k >= 1);
    let mut out = Vec::new();
    let mut parts = vec![0u32; n];
    fn rec(i: usize, left: u32, parts: &mut Vec<u32>, k: u32, out: &mut Vec<ActionLottery>) {
        let n = parts.len();
        if i == n - 1 {
            parts[i] = left;
            let weights = parts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(a, &c)| (ActionId(a), Rational::new(c.into(), k.into())))
                .collect();
            out.push(ActionLottery { weights });
            return;
        }
        for c in (0..=left).rev() {
            parts[i] = c;
            rec(i + 1, left - c, parts, k, out);
        }
    }
    rec(0, k, &mut parts, k, &mut out);
    out
}

/// A per-state lottery for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedAction {
    pub owner: Player,
    pub choice: BTreeMap<StateId, ActionLottery>,
}

impl MixedAction {
    /// The same lottery at every state of `g`.
    pub fn constant(g: &GameStructure, owner: Player, lottery: ActionLottery) -> Self {
        Self {
            owner,
            choice: g.state_ids().map(|s| (s, lottery.clone())).collect(),
        }
    }

    /// The deterministic mixed action that always plays `a`.
    pub fn pure(g: &GameStructure, owner: Player, a: ActionId) -> Self {
        Self::constant(g, owner, ActionLottery::pure(a))
    }

    pub fn at(&self, s: StateId) -> Option<&ActionLottery> {
        self.choice.get(&s)
    }
}

/// Pointwise weighted sum of distributions.
pub fn combine_dists(parts: &[(Rational, Distribution)]) -> Result<Distribution, ProbError> {
    check_weights(parts.iter().map(|(p, _)| p))?;
    let mut acc: BTreeMap<StateId, Rational> = BTreeMap::new();
    for (w, d) in parts {
        if w.is_zero() {
            continue;
        }
        for (s, p) in d.iter() {
            *acc.entry(s).or_insert_with(Rational::zero) += w * p;
        }
    }
    Ok(Distribution::from_accumulated(acc))
}

/// Pointwise weighted sum of mixed actions of one player.
pub fn combine_mixed_actions(parts: &[(Rational, MixedAction)]) -> Result<MixedAction, ProbError> {
    check_weights(parts.iter().map(|(p, _)| p))?;
    let (_, first) = parts
        .first()
        .ok_or_else(|| ProbError::WeightSum("0".to_string()))?;
    let owner = first.owner;
    if parts.iter().any(|(_, m)| m.owner != owner) {
        return Err(ProbError::OwnerMismatch);
    }
    let states: BTreeSet<StateId> = first.choice.keys().copied().collect();
    let mut choice = BTreeMap::new();
    for s in states {
        let mut acc: BTreeMap<ActionId, Rational> = BTreeMap::new();
        for (w, m) in parts {
            let l = m
                .at(s)
                .ok_or_else(|| ProbError::Undefined(format!("#{}", s.0)))?;
            for (a, p) in l.iter() {
                *acc.entry(a).or_insert_with(Rational::zero) += w * p;
            }
        }
        choice.insert(s, ActionLottery::try_from_map(acc)?);
    }
    for (_, m) in parts {
        if m.choice.len() != choice.len() {
            return Err(ProbError::Precondition(
                "mixed actions are defined on different state sets".to_string(),
            ));
        }
    }
    Ok(MixedAction { owner, choice })
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a Rational>) -> Result<(), ProbError> {
    let mut sum = Rational::zero();
    for w in weights {
        if w.is_negative() {
            return Err(ProbError::Negative(fmt_rational(w)));
        }
        sum += w;
    }
    if sum.is_one() {
        Ok(())
    } else {
        Err(ProbError::WeightSum(fmt_rational(&sum)))
    }
}

/// Accumulates `scale * sum_{a,b} l1(a) l2(b) step(s,a,b)` into `acc`.
pub(crate) fn accumulate_step(
    g: &GameStructure,
    s: StateId,
    l1: &ActionLottery,
    l2: &ActionLottery,
    scale: &Rational,
    acc: &mut BTreeMap<StateId, Rational>,
) {
    for (a, pa) in l1.iter() {
        for (b, pb) in l2.iter() {
            let w = scale * pa * pb;
            for (t, pt) in g.row(s, a, b) {
                *acc.entry(*t).or_insert_with(Rational::zero) += &w * pt;
            }
        }
    }
}

/// Transition from a single state under two action lotteries.
pub fn step_lotteries(
    g: &GameStructure,
    s: StateId,
    l1: &ActionLottery,
    l2: &ActionLottery,
) -> Distribution {
    let mut acc = BTreeMap::new();
    accumulate_step(g, s, l1, l2, &Rational::one(), &mut acc);
    Distribution::from_accumulated(acc)
}

/// `sum_a l1(a) * row(s, a, b)` as a raw row.
pub(crate) fn row_under_lottery(g: &GameStructure, s: StateId, l1: &ActionLottery, b: ActionId) -> Row {
    let mut acc = BTreeMap::new();
    accumulate_step(g, s, l1, &ActionLottery::pure(b), &Rational::one(), &mut acc);
    acc.retain(|_, p| !p.is_zero());
    acc
}

fn check_owners(pi1: &MixedAction, pi2: &MixedAction) -> Result<(), ProbError> {
    if pi1.owner != Player::One || pi2.owner != Player::Two {
        return Err(ProbError::Precondition(
            "expected a player-1 and a player-2 mixed action".to_string(),
        ));
    }
    Ok(())
}

/// Generalised transition from a state under a pair of mixed actions.
pub fn step_mixed_state(
    g: &GameStructure,
    s: StateId,
    pi1: &MixedAction,
    pi2: &MixedAction,
) -> Result<Distribution, ProbError> {
    check_owners(pi1, pi2)?;
    let undefined = || ProbError::Undefined(g.state_name(s).to_string());
    let l1 = pi1.at(s).ok_or_else(undefined)?;
    let l2 = pi2.at(s).ok_or_else(undefined)?;
    Ok(step_lotteries(g, s, l1, l2))
}

/// Generalised transition from a distribution.
pub fn step_mixed_dist(
    g: &GameStructure,
    d: &Distribution,
    pi1: &MixedAction,
    pi2: &MixedAction,
) -> Result<Distribution, ProbError> {
    check_owners(pi1, pi2)?;
    let mut acc = BTreeMap::new();
    for (t, w) in d.iter() {
        let undefined = || ProbError::Undefined(g.state_name(t).to_string());
        let l1 = pi1.at(t).ok_or_else(undefined)?;
        let l2 = pi2.at(t).ok_or_else(undefined)?;
        accumulate_step(g, t, l1, l2, w, &mut acc);
    }
    Ok(Distribution::from_accumulated(acc))
}

/// A binary relation on states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: BTreeSet<(StateId, StateId)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(g: &GameStructure) -> Self {
        g.state_ids().map(|s| (s, s)).collect()
    }

    pub fn full(g: &GameStructure) -> Self {
        g.state_ids()
            .flat_map(|s| g.state_ids().map(move |t| (s, t)))
            .collect()
    }

    pub fn contains(&self, s: StateId, t: StateId) -> bool {
        self.pairs.contains(&(s, t))
    }

    pub fn insert(&mut self, s: StateId, t: StateId) -> bool {
        self.pairs.insert((s, t))
    }

    pub fn remove(&mut self, s: StateId, t: StateId) -> bool {
        self.pairs.remove(&(s, t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn inverse(&self) -> Relation {
        self.iter().map(|(s, t)| (t, s)).collect()
    }

    pub fn is_reflexive_on(&self, g: &GameStructure) -> bool {
        g.state_ids().all(|s| self.contains(s, s))
    }

    pub fn is_transitive(&self) -> bool {
        self.iter().all(|(a, b)| {
            self.iter()
                .filter(|&(c, _)| c == b)
                .all(|(_, d)| self.contains(a, d))
        })
    }

    pub fn render(&self, g: &GameStructure) -> Vec<String> {
        self.iter()
            .map(|(s, t)| format!("{} {}", g.state_name(s), g.state_name(t)))
            .collect()
    }
}

impl FromIterator<(StateId, StateId)> for Relation {
    fn from_iter<I: IntoIterator<Item = (StateId, StateId)>>(iter: I) -> Self {
        Self {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Parses a relation file: one `s t` pair per line, `#` comments.
pub fn parse_relation(g: &GameStructure, text: &str) -> Result<Relation, ProbError> {
    let mut r = Relation::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(ProbError::Parse(format!(
                "line {}: expected `state state`, found `{line}`",
                i + 1
            )));
        }
        r.insert(g.state_id(parts[0])?, g.state_id(parts[1])?);
    }
    Ok(r)
}

/// A weight function witnessing that one distribution lifts to another.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightWitness {
    pub weights: BTreeMap<(StateId, StateId), Rational>,
}

impl WeightWitness {
    /// Checks the three lifting clauses exactly: row sums equal `d`, column
    /// sums equal `th`, and every weighted pair is in `r`. Weights must be
    /// strictly positive.
    pub fn validate(&self, d: &Distribution, th: &Distribution, r: &Relation) -> Result<(), String> {
        let mut rows: BTreeMap<StateId, Rational> = BTreeMap::new();
        let mut cols: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (&(u, v), w) in &self.weights {
            if !w.is_positive() {
                return Err(format!("weight of ({},{}) is not positive", u.0, v.0));
            }
            if !r.contains(u, v) {
                return Err(format!("pair ({},{}) carries weight but is not related", u.0, v.0));
            }
            *rows.entry(u).or_insert_with(Rational::zero) += w;
            *cols.entry(v).or_insert_with(Rational::zero) += w;
        }
        if &rows != d.entries() {
            return Err("row sums differ from the left distribution".to_string());
        }
        if &cols != th.entries() {
            return Err("column sums differ from the right distribution".to_string());
        }
        Ok(())
    }

    /// Pointwise weighted sum of witnesses.
    pub fn combine(parts: &[(Rational, WeightWitness)]) -> WeightWitness {
        let mut weights: BTreeMap<(StateId, StateId), Rational> = BTreeMap::new();
        for (p, w) in parts {
            for (k, v) in &w.weights {
                *weights.entry(*k).or_insert_with(Rational::zero) += p * v;
            }
        }
        weights.retain(|_, v| !v.is_zero());
        WeightWitness { weights }
    }

    pub fn render(&self, g: &GameStructure) -> Vec<String> {
        self.weights
            .iter()
            .map(|((u, v), w)| format!("w({},{})={}", g.state_name(*u), g.state_name(*v), fmt_rational(w)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::parse_model;
    use crate::rational::{int, ratio};

    fn rps() -> GameStructure {
        parse_model(fixtures::RPS).unwrap()
    }

    #[test]
    fn combine_examples() {
        let (s0, s1) = (StateId(0), StateId(1));
        let half = ratio(1, 2);
        let d = combine_dists(&[(half.clone(), Distribution::point(s0)), (half.clone(), Distribution::point(s1))]).unwrap();
        assert_eq!(d.prob(s0), half);
        assert_eq!(d.prob(s1), half);
        assert_eq!(combine_dists(&[(int(1), d.clone())]).unwrap(), d);
        let e = combine_dists(&[(ratio(1, 3), Distribution::point(s1)), (ratio(2, 3), d)]).unwrap();
        assert_eq!(e.prob(s0), ratio(1, 3));
        assert_eq!(e.prob(s1), ratio(2, 3));
    }

    #[test]
    fn combine_rejects_bad_weights() {
        let d = Distribution::point(StateId(0));
        assert!(matches!(
            combine_dists(&[(ratio(1, 2), d.clone()), (ratio(1, 3), d.clone())]),
            Err(ProbError::WeightSum(_))
        ));
        assert!(matches!(
            combine_dists(&[(ratio(3, 2), d.clone()), (ratio(-1, 2), d)]),
            Err(ProbError::Negative(_))
        ));
    }

    #[test]
    fn combine_mixed_examples() {
        let g = rps();
        let (r, p, s) = (ActionId(0), ActionId(1), ActionId(2));
        let half = ratio(1, 2);
        let m = combine_mixed_actions(&[
            (half.clone(), MixedAction::pure(&g, Player::One, r)),
            (half.clone(), MixedAction::pure(&g, Player::One, p)),
        ])
        .unwrap();
        for st in g.state_ids() {
            assert_eq!(m.at(st).unwrap().prob(r), half);
            assert_eq!(m.at(st).unwrap().prob(p), half);
        }
        let u = MixedAction::constant(&g, Player::One, ActionLottery::uniform(3));
        assert_eq!(combine_mixed_actions(&[(int(1), u.clone())]).unwrap(), u);
        let m = combine_mixed_actions(&[(ratio(1, 3), u), (ratio(2, 3), MixedAction::pure(&g, Player::One, r))]).unwrap();
        let l = m.at(StateId(0)).unwrap();
        assert_eq!((l.prob(r), l.prob(p), l.prob(s)), (ratio(7, 9), ratio(1, 9), ratio(1, 9)));
    }

    #[test]
    fn combine_mixed_rejects_owner_mismatch() {
        let g = rps();
        let half = ratio(1, 2);
        let err = combine_mixed_actions(&[
            (half.clone(), MixedAction::pure(&g, Player::One, ActionId(0))),
            (half, MixedAction::pure(&g, Player::Two, ActionId(0))),
        ]);
        assert_eq!(err, Err(ProbError::OwnerMismatch));
    }

    #[test]
    fn step_mixed_examples() {
        let g = rps();
        let (s0, s1, s2) = (StateId(0), StateId(1), StateId(2));
        let uni = MixedAction::constant(&g, Player::One, ActionLottery::uniform(3));
        let rock2 = MixedAction::pure(&g, Player::Two, ActionId(0));
        let d = step_mixed_state(&g, s0, &uni, &rock2).unwrap();
        assert_eq!([d.prob(s0), d.prob(s1), d.prob(s2)], [ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
        let rock1 = MixedAction::pure(&g, Player::One, ActionId(0));
        let scissors2 = MixedAction::pure(&g, Player::Two, ActionId(2));
        assert_eq!(step_mixed_state(&g, s0, &rock1, &scissors2).unwrap(), Distribution::point(s1));
        assert_eq!(step_mixed_state(&g, s1, &uni, &scissors2).unwrap(), Distribution::point(s1));

        let third = parse_distribution(&g, "s0:1/3,s1:1/3,s2:1/3").unwrap();
        let e = step_mixed_dist(&g, &third, &uni, &rock2).unwrap();
        assert_eq!([e.prob(s0), e.prob(s1), e.prob(s2)], [ratio(1, 9), ratio(4, 9), ratio(4, 9)]);
        assert_eq!(
            step_mixed_dist(&g, &Distribution::point(s0), &uni, &rock2).unwrap(),
            d
        );
        assert!(step_mixed_state(&g, s0, &rock2, &uni).is_err());
    }

    #[test]
    fn halfway_distribution_step() {
        let g = parse_model(fixtures::HALFWAY).unwrap();
        let a = MixedAction::pure(&g, Player::One, ActionId(0));
        let star = MixedAction::pure(&g, Player::Two, ActionId(0));
        let d = parse_distribution(&g, "s0:1/2,s1:1/2").unwrap();
        let e = step_mixed_dist(&g, &d, &a, &star).unwrap();
        assert_eq!(e, parse_distribution(&g, "s0:1/4,s1:3/4").unwrap());
    }

    #[test]
    fn distribution_literals() {
        let g = rps();
        assert!(parse_distribution(&g, "s0:1/2,s1:1/3").is_err());
        assert!(parse_distribution(&g, "s0:0.5,s1:1/2").is_err());
        assert!(parse_distribution(&g, "s9:1").is_err());
        assert!(parse_distribution(&g, "s0:1/2,s0:1/2").is_err());
        let d = parse_distribution(&g, "s1:1/2, s0:1/2").unwrap();
        assert_eq!(d.display(&g).to_string(), "s0:1/2,s1:1/2");
    }

    #[test]
    fn grid_sizes_and_order() {
        assert_eq!(lottery_grid(3, 1).len(), 3);
        assert_eq!(lottery_grid(3, 2).len(), 6);
        assert_eq!(lottery_grid(3, 3).len(), 10);
        assert_eq!(lottery_grid(2, 4).len(), 5);
        let g = lottery_grid(3, 3);
        assert_eq!(g[0], ActionLottery::pure(ActionId(0)));
        assert!(g.contains(&ActionLottery::uniform(3)));
        // Every grid point is a valid lottery with denominators dividing k.
        for l in &g {
            assert!(l.iter().all(|(_, p)| (p * int(3)).is_integer()));
        }
    }

    #[test]
    fn relation_file() {
        let g = parse_model(fixtures::LIFT).unwrap();
        let r = parse_relation(&g, fixtures::LIFT_REL).unwrap();
        assert_eq!(r.len(), 4);
        assert!(parse_relation(&g, "s1\n").is_err());
        assert!(parse_relation(&g, "s1 x9\n").is_err());
    }

    #[test]
    fn relation_properties() {
        let g = rps();
        let id = Relation::identity(&g);
        assert!(id.is_reflexive_on(&g) && id.is_transitive());
        let mut r = id.clone();
        r.insert(StateId(0), StateId(1));
        r.insert(StateId(1), StateId(2));
        assert!(!r.is_transitive());
        assert!(id.is_subset(&r));
        assert_eq!(Relation::full(&g).len(), 9);
    }
}
