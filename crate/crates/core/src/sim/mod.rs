//! A-simulation and PA-simulation by approximant refinement.
//!
//! The existential player-1 response at the simulating state is decided
//! exactly by one linear problem per tested lottery. Fix the lottery `p` at
//! `s`. The successor set of `s` is the convex hull of
//! `D_b' = sum_a p(a) step(s,a,b')` over player-2 actions `b'`; the set of `t`
//! under a response `x` is the hull of `T_b = sum_a' x(a') step(t,a',b)`.
//! Since the lifted-dominated set is convex, it suffices that each vertex
//! `T_b` is dominated by some mixture `sum_b' l_b(b') D_b'`. With `x`, every
//! `l_b` and a weight function `w_b` per vertex as unknowns, all
//! constraints are linear.
//!
//! The universal player-1 quantifier is resolved by a finite test set
//! (pure actions or a rational grid), which over-approximates the relation,
//! or exported as a quantified SMT-LIB sentence.

mod smt;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use num_traits::{One, Zero};

use crate::model::{ActionId, GameStructure, Player, StateId};
use crate::prob::{
    lottery_grid, lp_feasible, row_under_lottery, smyth_check, ActionLottery, Distribution,
    LinearProblem, Relation, Relop, VarId,
};
use crate::rational::Rational;

pub use smt::export_smt;

/// How the universal player-1 quantifier is discharged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantStrategy {
    Pure,
    /// All lotteries whose weights are multiples of `1/K`.
    Grid(u32),
    /// Writes one SMT-LIB script per pair into the directory and keeps the
    /// pair as deferred.
    SmtExport(PathBuf),
}

impl QuantStrategy {
    /// Lotteries tested at a state, or `None` for SMT export.
    pub fn test_set(&self, n_actions: usize) -> Option<Vec<ActionLottery>> {
        match self {
            QuantStrategy::Pure => Some(lottery_grid(n_actions, 1)),
            QuantStrategy::Grid(k) => Some(lottery_grid(n_actions, *k)),
            QuantStrategy::SmtExport(_) => None,
        }
    }
}

impl fmt::Display for QuantStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantStrategy::Pure => f.write_str("pure"),
            QuantStrategy::Grid(k) => write!(f, "grid={k}"),
            QuantStrategy::SmtExport(dir) => write!(f, "smt={}", dir.display()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("states {0} and {1} have different labels")]
    LabelMismatch(String, String),
    #[error("model is probabilistic")]
    Probabilistic,
    #[error("grid resolution must be at least 1")]
    ZeroGrid,
    #[error("cannot write SMT script: {0}")]
    Io(#[from] std::io::Error),
}

/// Tested player-1 lottery at `s` and the response found at `t`.
pub type WitnessPair = (ActionLottery, ActionLottery);

#[derive(Debug, Clone)]
pub struct SimReport {
    pub relation: Relation,
    /// Refinement rounds, including the final round that changed nothing.
    pub iterations: usize,
    pub strategy: QuantStrategy,
    /// For every surviving pair, the responses found in the last round.
    pub witnesses: BTreeMap<(StateId, StateId), Vec<WitnessPair>>,
    /// The approximant chain, starting with the label-equality relation.
    pub chain: Vec<Relation>,
    /// Pairs kept without a decision (SMT export).
    pub deferred: BTreeSet<(StateId, StateId)>,
}

/// Pairs of states with identical labels.
pub fn initial_relation(g: &GameStructure) -> Relation {
    g.state_ids()
        .flat_map(|s| g.state_ids().map(move |t| (s, t)))
        .filter(|&(s, t)| g.label(s) == g.label(t))
        .collect()
}

fn check_labels(g: &GameStructure, s: StateId, t: StateId) -> Result<(), SimError> {
    if g.label(s) != g.label(t) {
        return Err(SimError::LabelMismatch(
            g.state_name(s).to_string(),
            g.state_name(t).to_string(),
        ));
    }
    Ok(())
}

/// Decides whether some lottery at `t` answers the lottery `pi1` at `s`,
/// with successors compared by the Smyth order of the lifting of `r`.
pub fn exists_pi2_check(
    g: &GameStructure,
    s: StateId,
    t: StateId,
    pi1: &ActionLottery,
    r: &Relation,
) -> Result<Option<ActionLottery>, SimError> {
    check_labels(g, s, t)?;
    Ok(solve_response(g, s, t, pi1, r))
}

fn solve_response(
    g: &GameStructure,
    s: StateId,
    t: StateId,
    pi1: &ActionLottery,
    r: &Relation,
) -> Option<ActionLottery> {
    let acts1: Vec<ActionId> = g.action_ids(Player::One).collect();
    let acts2: Vec<ActionId> = g.action_ids(Player::Two).collect();
    // Rows D_b' at s.
    let d_rows: Vec<_> = acts2.iter().map(|&b| row_under_lottery(g, s, pi1, b)).collect();
    let left: BTreeSet<StateId> = d_rows.iter().flat_map(|row| row.keys().copied()).collect();
    let right: BTreeSet<StateId> = acts1
        .iter()
        .flat_map(|&a| acts2.iter().flat_map(move |&b| g.row(t, a, b).keys().copied()))
        .collect();
    let pairs: Vec<(StateId, StateId)> = left
        .iter()
        .flat_map(|&u| right.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| r.contains(u, v))
        .collect();

    let mut lp = LinearProblem::new();
    let x: Vec<VarId> = acts1.iter().map(|a| lp.nonneg(format!("x{}", a.0))).collect();
    lp.add_constraint(x.iter().map(|&v| (v, Rational::one())).collect(), Relop::Eq, Rational::one());
    for &b in &acts2 {
        let lam: Vec<VarId> = acts2
            .iter()
            .map(|bp| lp.nonneg(format!("l{}_{}", b.0, bp.0)))
            .collect();
        lp.add_constraint(lam.iter().map(|&v| (v, Rational::one())).collect(), Relop::Eq, Rational::one());
        let w: BTreeMap<(StateId, StateId), VarId> = pairs
            .iter()
            .map(|&(u, v)| ((u, v), lp.nonneg(format!("w{}_{}_{}", b.0, u.0, v.0))))
            .collect();
        // Column sums equal T_b.
        for &v in &right {
            let mut terms: Vec<(VarId, Rational)> = w
                .iter()
                .filter(|((_, vv), _)| *vv == v)
                .map(|(_, &var)| (var, Rational::one()))
                .collect();
            for (i, &a) in acts1.iter().enumerate() {
                if let Some(p) = g.row(t, a, b).get(&v) {
                    terms.push((x[i], -p.clone()));
                }
            }
            lp.add_constraint(terms, Relop::Eq, Rational::zero());
        }
        // Row sums equal the mixture of the D_b'.
        for &u in &left {
            let mut terms: Vec<(VarId, Rational)> = w
                .iter()
                .filter(|((uu, _), _)| *uu == u)
                .map(|(_, &var)| (var, Rational::one()))
                .collect();
            for (j, row) in d_rows.iter().enumerate() {
                if let Some(p) = row.get(&u) {
                    terms.push((lam[j], -p.clone()));
                }
            }
            lp.add_constraint(terms, Relop::Eq, Rational::zero());
        }
    }
    let sol = lp_feasible(&lp)?;
    let map = acts1.iter().zip(&x).map(|(&a, v)| (a, sol[v.0].clone())).collect();
    Some(ActionLottery::try_from_map(map).expect("simplex constraint"))
}

/// Outcome of checking one pair in a refinement round.
enum PairOutcome {
    Kept(Vec<WitnessPair>),
    Removed,
    Deferred,
}

fn check_pair(
    g: &GameStructure,
    s: StateId,
    t: StateId,
    r: &Relation,
    strat: &QuantStrategy,
) -> Result<PairOutcome, SimError> {
    let Some(tests) = strat.test_set(g.acts1.len()) else {
        let QuantStrategy::SmtExport(dir) = strat else { unreachable!() };
        std::fs::create_dir_all(dir)?;
        let file = dir.join(format!("{}_{}.smt2", g.state_name(s), g.state_name(t)));
        std::fs::write(file, export_smt(g, s, t, r))?;
        return Ok(PairOutcome::Deferred);
    };
    let mut found = Vec::with_capacity(tests.len());
    for pi1 in tests {
        match solve_response(g, s, t, &pi1, r) {
            Some(pi2) => found.push((pi1, pi2)),
            None => return Ok(PairOutcome::Removed),
        }
    }
    Ok(PairOutcome::Kept(found))
}

fn validate_strategy(strat: &QuantStrategy) -> Result<(), SimError> {
    if *strat == QuantStrategy::Grid(0) {
        return Err(SimError::ZeroGrid);
    }
    Ok(())
}

/// One refinement round. Every pair is checked against the frozen `r`.
pub fn refine_once(g: &GameStructure, r: &Relation, strat: &QuantStrategy) -> Result<Relation, SimError> {
    validate_strategy(strat)?;
    let mut out = Relation::new();
    for (s, t) in r.iter() {
        if !matches!(check_pair(g, s, t, r, strat)?, PairOutcome::Removed) {
            out.insert(s, t);
        }
    }
    Ok(out)
}

/// Greatest fixpoint of refinement starting from label equality.
pub fn pa_simulation(g: &GameStructure, strat: &QuantStrategy) -> Result<SimReport, SimError> {
    validate_strategy(strat)?;
    let mut r = initial_relation(g);
    let mut chain = vec![r.clone()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = Relation::new();
        let mut witnesses = BTreeMap::new();
        let mut deferred = BTreeSet::new();
        for (s, t) in r.iter() {
            match check_pair(g, s, t, &r, strat)? {
                PairOutcome::Kept(w) => {
                    next.insert(s, t);
                    witnesses.insert((s, t), w);
                }
                PairOutcome::Deferred => {
                    next.insert(s, t);
                    deferred.insert((s, t));
                }
                PairOutcome::Removed => {}
            }
        }
        if next == r {
            return Ok(SimReport {
                relation: r,
                iterations,
                strategy: strat.clone(),
                witnesses,
                chain,
                deferred,
            });
        }
        chain.push(next.clone());
        r = next;
    }
}

/// Greatest A-simulation of a deterministic game structure.
pub fn a_simulation(g: &GameStructure) -> Result<Relation, SimError> {
    if !g.is_deterministic() {
        return Err(SimError::Probabilistic);
    }
    let succ = |s: StateId, a: ActionId, b: ActionId| -> StateId {
        *g.row(s, a, b).keys().next().expect("point row")
    };
    let mut r = initial_relation(g);
    loop {
        let next: Relation = r
            .iter()
            .filter(|&(s, t)| {
                g.action_ids(Player::One).all(|a| {
                    g.action_ids(Player::One).any(|a2| {
                        let p: Vec<Distribution> = g
                            .action_ids(Player::Two)
                            .map(|b| Distribution::point(succ(s, a, b)))
                            .collect();
                        let q: Vec<Distribution> = g
                            .action_ids(Player::Two)
                            .map(|b| Distribution::point(succ(t, a2, b)))
                            .collect();
                        smyth_check(&p, &q, &r).holds
                    })
                })
            })
            .collect();
        if next == r {
            return Ok(r);
        }
        r = next;
    }
}
