use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::lp::{lp_feasible, LinearProblem, Relop, VarId};
use super::{combine_dists, Distribution, ProbError, Relation, WeightWitness};
use crate::model::StateId;
use crate::rational::Rational;

/// Decides whether `d` lifts to `th` under `r` and returns a witness.
pub fn lift_check(d: &Distribution, th: &Distribution, r: &Relation) -> Option<WeightWitness> {
    let mut lp = LinearProblem::new();
    let mut vars: Vec<((StateId, StateId), VarId)> = Vec::new();
    let mut rows: BTreeMap<StateId, Vec<(VarId, Rational)>> = BTreeMap::new();
    let mut cols: BTreeMap<StateId, Vec<(VarId, Rational)>> = BTreeMap::new();
    for u in d.support() {
        for v in th.support() {
            if r.contains(u, v) {
                let x = lp.nonneg(format!("w{}_{}", u.0, v.0));
                vars.push(((u, v), x));
                rows.entry(u).or_default().push((x, Rational::one()));
                cols.entry(v).or_default().push((x, Rational::one()));
            }
        }
    }
    if rows.len() != d.support_size() || cols.len() != th.support_size() {
        return None;
    }
    for (u, p) in d.iter() {
        lp.add_constraint(rows.remove(&u).unwrap(), Relop::Eq, p.clone());
    }
    for (v, p) in th.iter() {
        lp.add_constraint(cols.remove(&v).unwrap(), Relop::Eq, p.clone());
    }
    let x = lp_feasible(&lp)?;
    let weights = vars
        .into_iter()
        .filter(|(_, var)| !x[var.0].is_zero())
        .map(|(k, var)| (k, x[var.0].clone()))
        .collect();
    Some(WeightWitness { weights })
}

/// Outcome of a Smyth-order check `p <= q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmythReport {
    pub holds: bool,
    /// One entry per element of `q`: the index of the first dominating
    /// element of `p` and the lifting witness, if any.
    pub matches: Vec<Option<(usize, WeightWitness)>>,
}

/// Every element of `q` must be dominated by some element of `p` under the
/// lifting of `r`.
pub fn smyth_check(p: &[Distribution], q: &[Distribution], r: &Relation) -> SmythReport {
    let matches: Vec<_> = q
        .iter()
        .map(|th| {
            p.iter()
                .enumerate()
                .find_map(|(i, d)| lift_check(d, th, r).map(|w| (i, w)))
        })
        .collect();
    SmythReport {
        holds: matches.iter().all(Option::is_some),
        matches,
    }
}

/// Given `d` lifting to `th` and a convex decomposition of `d`, produces a
/// decomposition of `th` with the same weights such that each part of `d`
/// lifts to the matching part of `th`.
pub fn split_match(
    d: &Distribution,
    th: &Distribution,
    r: &Relation,
    parts: &[(Rational, Distribution)],
) -> Result<Vec<(Rational, Distribution)>, ProbError> {
    if parts.is_empty() {
        return Err(ProbError::Precondition("empty decomposition".to_string()));
    }
    let recombined = combine_dists(parts)?;
    if &recombined != d {
        return Err(ProbError::Precondition(
            "the parts do not recombine to the left distribution".to_string(),
        ));
    }
    let w = lift_check(d, th, r).ok_or_else(|| {
        ProbError::Precondition("the left distribution does not lift to the right one".to_string())
    })?;
    let mut by_row: BTreeMap<StateId, Vec<(StateId, &Rational)>> = BTreeMap::new();
    for (&(u, v), x) in &w.weights {
        by_row.entry(u).or_default().push((v, x));
    }
    let mut out = Vec::with_capacity(parts.len());
    for (p, di) in parts {
        let mut acc: BTreeMap<StateId, Rational> = BTreeMap::new();
        if p.is_zero() {
            // Not constrained by d; match each state to any related state.
            for (u, q) in di.iter() {
                let v = r
                    .iter()
                    .find(|&(a, _)| a == u)
                    .map(|(_, v)| v)
                    .ok_or_else(|| {
                        ProbError::Precondition(format!(
                            "zero-weight part uses state #{} which has no related state",
                            u.0
                        ))
                    })?;
                *acc.entry(v).or_insert_with(Rational::zero) += q;
            }
        } else {
            // w_i(u,v) = d_i(u) * w(u,v) / d(u)
            for (u, q) in di.iter() {
                let du = d.prob(u);
                for (v, x) in &by_row[&u] {
                    *acc.entry(*v).or_insert_with(Rational::zero) += q * *x / &du;
                }
            }
        }
        out.push((p.clone(), Distribution::from_accumulated(acc)));
    }
    Ok(out)
}
