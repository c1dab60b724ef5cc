use std::collections::{BTreeMap, HashSet};

use super::eval::{EvalError, EvalOptions, EvalResult, Evaluator};
use super::formula::Formula;
use crate::model::{GameStructure, StateId};
use crate::prob::{lottery_grid, step_lotteries, ActionLottery, Distribution};

/// Conjunction of the labels of `s` and the negations of all other
/// propositions.
pub fn phi0_state(g: &GameStructure, s: StateId) -> Formula {
    let lits = g
        .props
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if g.label(s).iter().any(|q| q.0 == i) {
                Formula::prop(p.clone())
            } else {
                Formula::neg_prop(p.clone())
            }
        })
        .collect();
    Formula::and(lits)
}

struct Builder<'g> {
    g: &'g GameStructure,
    grid: Vec<ActionLottery>,
    cache: BTreeMap<(StateId, usize), Formula>,
}

impl Builder<'_> {
    fn state(&mut self, s: StateId, n: usize) -> Formula {
        if let Some(f) = self.cache.get(&(s, n)) {
            return f.clone();
        }
        let f = if n == 0 {
            phi0_state(self.g, s)
        } else {
            let mut conjuncts = vec![phi0_state(self.g, s)];
            let mut seen = HashSet::new();
            for pi in self.grid.clone() {
                let mut parts = Vec::new();
                for b in self.g.action_ids(crate::model::Player::Two) {
                    let d = step_lotteries(self.g, s, &pi, &ActionLottery::pure(b));
                    let part = self.dist(&d, n - 1);
                    if !parts.contains(&part) {
                        parts.push(part);
                    }
                }
                let c = Formula::enforce(Formula::Mix(parts));
                if seen.insert(c.clone()) {
                    conjuncts.push(c);
                }
            }
            Formula::and(conjuncts)
        };
        self.cache.insert((s, n), f.clone());
        f
    }

    fn dist(&mut self, d: &Distribution, n: usize) -> Formula {
        match d.as_point() {
            Some(s) => self.state(s, n),
            None => Formula::ProbSum(d.iter().map(|(t, p)| (p.clone(), self.state(t, n))).collect()),
        }
    }
}

fn builder(g: &GameStructure, k: u32) -> Builder<'_> {
    Builder {
        g,
        grid: lottery_grid(g.acts1.len(), k.max(1)),
        cache: BTreeMap::new(),
    }
}

/// The depth-`n` characteristic formula of `s`. Each level conjoins the
/// level-0 formula with one `<1> mix{...}` per player-1 lottery on the
/// `k`-grid.
pub fn char_formula_state(g: &GameStructure, s: StateId, n: usize, k: u32) -> Formula {
    builder(g, k).state(s, n)
}

/// `sum` of the state formulas over the support of `d`, weighted by `d`.
pub fn char_formula_dist(g: &GameStructure, d: &Distribution, n: usize, k: u32) -> Formula {
    builder(g, k).dist(d, n)
}

/// Evaluates the depth-`n` characteristic formula of `s` at `t`. The
/// player-1 search uses the same grid `k` as the formula.
pub fn logic_preorder(
    g: &GameStructure,
    s: StateId,
    t: StateId,
    n: usize,
    k: u32,
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    let opts = EvalOptions { grid: k, ..opts.clone() };
    let phi = char_formula_state(g, s, n, k);
    Evaluator::new(g, opts)?.eval(&Distribution::point(t), &phi)
}
