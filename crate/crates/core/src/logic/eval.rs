//! Three-valued evaluation of closed formulas over distributions.
//!
//! Formulas are interned into a hash-consed DAG. Fixpoints become a list of
//! approximants, `Var` occurrences resolving to the previous approximant, so
//! no substitution is ever materialised. Results are memoised per
//! `(node, distribution)`.
//!
//! Every node carries an over-approximation of the states that may occur in
//! the support of a satisfying distribution. A distribution that leaves this
//! set fails outright.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::formula::Formula;
use crate::model::{ActionId, GameStructure, Player, PropId, StateId};
use crate::prob::{
    combine_dists, lottery_grid, lp_feasible, step_lotteries, ActionLottery, Distribution,
    LinearProblem, Relop, VarId,
};
use crate::rational::{fmt_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    /// Fixpoints are unfolded to approximants `1..=unfold`.
    pub unfold: usize,
    /// Player-1 lotteries are searched on the grid with denominator `grid`.
    pub grid: u32,
    /// Per-state split fractions in the split search have this denominator.
    pub split_denom: u32,
    pub certify: bool,
    /// Candidate splits examined per split node before giving up.
    pub split_budget: usize,
    /// Response vertices examined per `<1>` node before giving up.
    pub enforce_budget: usize,
    /// Largest disjunctive normal form expanded for a split component.
    pub dnf_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            unfold: 4,
            grid: 2,
            split_denom: 6,
            certify: true,
            split_budget: 20_000,
            enforce_budget: 200_000,
            dnf_cap: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("formula is not closed: free variable `{0}`")]
    Open(String),
    #[error("grid and split denominators must be positive")]
    ZeroGrid,
    #[error("split weights must be positive and sum to 1, got {0}")]
    Weights(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// Every support state satisfies the literal.
    Support,
    /// A support state that no satisfying distribution can contain.
    CounterState(StateId),
    AllHold,
    AllFail,
    /// The sub-result that decided a conjunction, disjunction or split.
    Component { index: usize, result: Rc<EvalResult> },
    Split(Vec<(Rational, Distribution)>),
    NoSplit(String),
    /// Player-1 lottery per support state.
    Strategy(Vec<(StateId, ActionLottery)>),
    /// The only player-1 choice and a pure player-2 answer that defeats it.
    Refutation {
        strategy: Vec<(StateId, ActionLottery)>,
        response: Vec<(StateId, ActionId)>,
        successor: Distribution,
        result: Rc<EvalResult>,
    },
    Approximant { index: usize, result: Rc<EvalResult> },
    Inconclusive(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub verdict: Verdict,
    pub certified: bool,
    pub evidence: Evidence,
    /// Largest approximant index that contributed.
    pub bound_used: usize,
}

impl EvalResult {
    fn new(verdict: Verdict, certified: bool, evidence: Evidence) -> Self {
        Self {
            verdict,
            certified: certified && verdict != Verdict::Unknown,
            evidence,
            bound_used: 0,
        }
    }

    fn holds(certified: bool, evidence: Evidence) -> Self {
        Self::new(Verdict::Holds, certified, evidence)
    }

    fn fails(certified: bool, evidence: Evidence) -> Self {
        Self::new(Verdict::Fails, certified, evidence)
    }

    fn unknown(msg: impl Into<String>) -> Self {
        Self::new(Verdict::Unknown, false, Evidence::Inconclusive(msg.into()))
    }

    fn bound(mut self, b: usize) -> Self {
        self.bound_used = b;
        self
    }

    pub fn holds_certified(&self) -> bool {
        self.verdict == Verdict::Holds && self.certified
    }

    pub fn fails_certified(&self) -> bool {
        self.verdict == Verdict::Fails && self.certified
    }

    /// The same result with every certified flag cleared.
    pub fn uncertified(&self) -> EvalResult {
        let strip = |r: &Rc<EvalResult>| Rc::new(r.uncertified());
        let evidence = match &self.evidence {
            Evidence::Component { index, result } => Evidence::Component {
                index: *index,
                result: strip(result),
            },
            Evidence::Approximant { index, result } => Evidence::Approximant {
                index: *index,
                result: strip(result),
            },
            Evidence::Refutation {
                strategy,
                response,
                successor,
                result,
            } => Evidence::Refutation {
                strategy: strategy.clone(),
                response: response.clone(),
                successor: successor.clone(),
                result: strip(result),
            },
            other => other.clone(),
        };
        EvalResult {
            verdict: self.verdict,
            certified: false,
            evidence,
            bound_used: self.bound_used,
        }
    }

    /// Human-readable witness or counterexample, one line per step.
    pub fn render(&self, g: &GameStructure) -> Vec<String> {
        let mut out = Vec::new();
        self.evidence.render_into(g, 0, &mut out);
        out
    }

    fn headline(&self) -> String {
        if self.certified {
            format!("{} (certified)", self.verdict)
        } else {
            self.verdict.to_string()
        }
    }
}

fn render_strategy(g: &GameStructure, v: &[(StateId, ActionLottery)]) -> String {
    v.iter()
        .map(|(s, l)| format!("{}:{}", g.state_name(*s), l.render(g, Player::One)))
        .join(", ")
}

impl Evidence {
    fn render_into(&self, g: &GameStructure, depth: usize, out: &mut Vec<String>) {
        let pad = "  ".repeat(depth);
        match self {
            Evidence::Support => out.push(format!("{pad}every support state satisfies the literal")),
            Evidence::CounterState(s) => out.push(format!(
                "{pad}state {} cannot occur in a satisfying distribution",
                g.state_name(*s)
            )),
            Evidence::AllHold => out.push(format!("{pad}every component holds")),
            Evidence::AllFail => out.push(format!("{pad}every component fails")),
            Evidence::Component { index, result } => {
                out.push(format!("{pad}component {}: {}", index + 1, result.headline()));
                result.evidence.render_into(g, depth + 1, out);
            }
            Evidence::Split(parts) => out.push(format!(
                "{pad}split {}",
                parts
                    .iter()
                    .map(|(w, d)| format!("{} [{}]", fmt_rational(w), d.display(g)))
                    .join(" + ")
            )),
            Evidence::NoSplit(msg) | Evidence::Inconclusive(msg) => out.push(format!("{pad}{msg}")),
            Evidence::Strategy(v) => out.push(format!("{pad}player 1 plays {}", render_strategy(g, v))),
            Evidence::Refutation {
                strategy,
                response,
                successor,
                result,
            } => {
                out.push(format!("{pad}player 1 plays {}", render_strategy(g, strategy)));
                out.push(format!(
                    "{pad}player 2 answers {} reaching [{}]: {}",
                    response
                        .iter()
                        .map(|(s, b)| format!("{}:{}", g.state_name(*s), g.action_name(Player::Two, *b)))
                        .join(", "),
                    successor.display(g),
                    result.headline()
                ));
                result.evidence.render_into(g, depth + 1, out);
            }
            Evidence::Approximant { index, result } => {
                out.push(format!("{pad}approximant {index}: {}", result.headline()));
                result.evidence.render_into(g, depth + 1, out);
            }
        }
    }
}

type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Lit { prop: PropId, neg: bool },
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Enforce(NodeId),
    Sum(Vec<(Rational, NodeId)>),
    Mix(Vec<NodeId>),
    Fix { mu: bool, approx: Vec<NodeId> },
}

#[derive(Debug, Clone)]
struct Info {
    allowed: Vec<bool>,
    /// Literal or conjunction of literals: `allowed` is then exact.
    conj_lits: bool,
    /// Literals under `&` and `|` only.
    lit_only: bool,
    /// Denotation known to be convex. Wider than `convex_safe`: also admits
    /// `<1>` over a convex body.
    ext_convex: bool,
    convex_safe: bool,
}

#[derive(Debug, Clone)]
enum Model {
    Found(Distribution, bool),
    None,
    Unknown,
}

enum Hull {
    Pass { certified: bool, bound: usize },
    Refuted {
        response: Vec<(StateId, ActionId)>,
        successor: Distribution,
        result: Rc<EvalResult>,
    },
    Open,
}

enum Tree {
    Leaf(usize),
    Sum(Vec<(Rational, Tree)>),
    Mix(Vec<Tree>),
}

type Profile = (ActionLottery, Vec<Distribution>);

/// Evaluator bound to one model and one set of options. Keeps its caches
/// across calls.
pub struct Evaluator<'g> {
    g: &'g GameStructure,
    opts: EvalOptions,
    nodes: Vec<Node>,
    info: Vec<Info>,
    index: HashMap<Node, NodeId>,
    memo: HashMap<(NodeId, Distribution), Rc<EvalResult>>,
    models: HashMap<NodeId, Model>,
    dnf: HashMap<NodeId, (Vec<NodeId>, bool)>,
    grid1: Vec<ActionLottery>,
    profiles: HashMap<StateId, Rc<Vec<Profile>>>,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g GameStructure, opts: EvalOptions) -> Result<Self, EvalError> {
        if opts.grid == 0 || opts.split_denom == 0 {
            return Err(EvalError::ZeroGrid);
        }
        Ok(Self {
            g,
            grid1: lottery_grid(g.acts1.len(), opts.grid),
            opts,
            nodes: Vec::new(),
            info: Vec::new(),
            index: HashMap::new(),
            memo: HashMap::new(),
            models: HashMap::new(),
            dnf: HashMap::new(),
            profiles: HashMap::new(),
        })
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    pub fn eval(&mut self, d: &Distribution, phi: &Formula) -> Result<EvalResult, EvalError> {
        if let Some(v) = phi.free_vars().into_iter().next() {
            return Err(EvalError::Open(v));
        }
        let n = self.intern(phi, &mut Vec::new())?;
        let r = self.eval_node(n, d);
        Ok(if self.opts.certify {
            (*r).clone()
        } else {
            r.uncertified()
        })
    }

    fn intern(&mut self, f: &Formula, env: &mut Vec<(String, NodeId)>) -> Result<NodeId, EvalError> {
        let lit = |this: &Self, p: &str, neg| {
            this.g
                .prop_id(p)
                .map(|prop| Node::Lit { prop, neg })
                .ok_or_else(|| EvalError::UnknownProp(p.to_string()))
        };
        let node = match f {
            Formula::Prop(p) => lit(self, p, false)?,
            Formula::NegProp(p) => lit(self, p, true)?,
            Formula::Var(v) => {
                return env
                    .iter()
                    .rev()
                    .find(|(x, _)| x == v)
                    .map(|(_, n)| *n)
                    .ok_or_else(|| EvalError::Open(v.clone()))
            }
            Formula::And(cs) => Node::And(cs.iter().map(|c| self.intern(c, env)).collect::<Result<_, _>>()?),
            Formula::Or(cs) => Node::Or(cs.iter().map(|c| self.intern(c, env)).collect::<Result<_, _>>()?),
            Formula::Mix(cs) => Node::Mix(cs.iter().map(|c| self.intern(c, env)).collect::<Result<_, _>>()?),
            Formula::ProbSum(cs) => Node::Sum(
                cs.iter()
                    .map(|(p, c)| Ok((p.clone(), self.intern(c, env)?)))
                    .collect::<Result<_, EvalError>>()?,
            ),
            Formula::Enforce(b) => Node::Enforce(self.intern(b, env)?),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let mu = matches!(f, Formula::Mu(..));
                let mut prev = self.mk(if mu { Node::Or(vec![]) } else { Node::And(vec![]) });
                let mut approx = Vec::with_capacity(self.opts.unfold);
                for _ in 0..self.opts.unfold {
                    env.push((x.clone(), prev));
                    let a = self.intern(b, env);
                    env.pop();
                    prev = a?;
                    approx.push(prev);
                }
                Node::Fix { mu, approx }
            }
        };
        Ok(self.mk(node))
    }

    fn mk(&mut self, node: Node) -> NodeId {
        let node = match node {
            Node::And(mut v) | Node::Or(mut v) if v.len() == 1 => return v.pop().unwrap(),
            other => other,
        };
        if let Some(&n) = self.index.get(&node) {
            return n;
        }
        let info = self.compute_info(&node);
        self.nodes.push(node.clone());
        self.info.push(info);
        let id = self.nodes.len() - 1;
        self.index.insert(node, id);
        id
    }

    fn compute_info(&self, node: &Node) -> Info {
        let n = self.g.num_states();
        let all = vec![true; n];
        let none = vec![false; n];
        let union = |ids: &mut dyn Iterator<Item = NodeId>| {
            let mut acc = none.clone();
            for c in ids {
                for (a, b) in acc.iter_mut().zip(&self.info[c].allowed) {
                    *a |= *b;
                }
            }
            acc
        };
        let empty = |c: NodeId| !self.info[c].allowed.iter().any(|&b| b);
        match node {
            Node::Lit { prop, neg } => Info {
                allowed: self.g.state_ids().map(|s| self.g.has_prop(s, *prop) != *neg).collect(),
                conj_lits: true,
                lit_only: true,
                ext_convex: true,
                convex_safe: true,
            },
            Node::And(cs) => {
                let mut allowed = all;
                for &c in cs {
                    for (a, b) in allowed.iter_mut().zip(&self.info[c].allowed) {
                        *a &= *b;
                    }
                }
                Info {
                    allowed,
                    conj_lits: cs.iter().all(|&c| self.info[c].conj_lits),
                    lit_only: cs.iter().all(|&c| self.info[c].lit_only),
                    ext_convex: cs.iter().all(|&c| self.info[c].ext_convex),
                    convex_safe: cs.iter().all(|&c| self.info[c].convex_safe),
                }
            }
            Node::Or(cs) => Info {
                allowed: union(&mut cs.iter().copied()),
                conj_lits: false,
                lit_only: cs.iter().all(|&c| self.info[c].lit_only),
                ext_convex: cs.is_empty(),
                convex_safe: false,
            },
            Node::Enforce(b) => Info {
                // Some pure action must keep every answer inside the body's
                // allowed states; lotteries only widen supports.
                allowed: self
                    .g
                    .state_ids()
                    .map(|s| {
                        self.g.action_ids(Player::One).any(|a| {
                            self.g.action_ids(Player::Two).all(|b2| {
                                self.g.row(s, a, b2).keys().all(|t| self.info[*b].allowed[t.0])
                            })
                        })
                    })
                    .collect(),
                conj_lits: false,
                lit_only: false,
                ext_convex: self.info[*b].ext_convex,
                convex_safe: false,
            },
            Node::Sum(_) | Node::Mix(_) => {
                let cs: Vec<NodeId> = match node {
                    Node::Sum(v) => v.iter().map(|(_, c)| *c).collect(),
                    Node::Mix(v) => v.clone(),
                    _ => unreachable!(),
                };
                Info {
                    allowed: if cs.is_empty() || cs.iter().any(|&c| empty(c)) {
                        none
                    } else {
                        union(&mut cs.iter().copied())
                    },
                    conj_lits: false,
                    lit_only: false,
                    ext_convex: cs.iter().all(|&c| self.info[c].ext_convex),
                    convex_safe: cs.iter().all(|&c| self.info[c].convex_safe),
                }
            }
            Node::Fix { .. } => Info {
                allowed: all,
                conj_lits: false,
                lit_only: false,
                ext_convex: false,
                convex_safe: false,
            },
        }
    }

    fn eval_node(&mut self, n: NodeId, d: &Distribution) -> Rc<EvalResult> {
        let key = (n, d.clone());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let r = Rc::new(self.compute(n, d));
        self.memo.insert(key, r.clone());
        r
    }

    fn holds_at(&mut self, n: NodeId, d: &Distribution) -> bool {
        self.eval_node(n, d).verdict == Verdict::Holds
    }

    fn compute(&mut self, n: NodeId, d: &Distribution) -> EvalResult {
        if let Some(s) = d.support().find(|s| !self.info[n].allowed[s.0]) {
            return EvalResult::fails(true, Evidence::CounterState(s));
        }
        match self.nodes[n].clone() {
            Node::Lit { .. } => EvalResult::holds(true, Evidence::Support),
            Node::And(cs) => self.eval_and(&cs, d),
            Node::Or(cs) => self.eval_or(&cs, d),
            Node::Enforce(b) => self.eval_enforce(n, b, d),
            Node::Sum(v) => {
                let parts = v.into_iter().map(|(p, c)| (Some(p), c)).collect();
                self.eval_split(n, parts, d)
            }
            Node::Mix(v) => {
                let parts = v.into_iter().map(|c| (None, c)).collect();
                self.eval_split(n, parts, d)
            }
            Node::Fix { mu, approx } => self.eval_fix(mu, &approx, d),
        }
    }

    fn eval_and(&mut self, cs: &[NodeId], d: &Distribution) -> EvalResult {
        let mut all_hold = true;
        let mut all_cert = true;
        let mut bound = 0;
        let mut failure = None;
        for (i, &c) in cs.iter().enumerate() {
            let r = self.eval_node(c, d);
            bound = bound.max(r.bound_used);
            match r.verdict {
                Verdict::Holds => all_cert &= r.certified,
                Verdict::Fails if r.certified => {
                    return EvalResult::fails(true, Evidence::Component { index: i, result: r.clone() })
                        .bound(r.bound_used)
                }
                Verdict::Fails => {
                    all_hold = false;
                    failure.get_or_insert((i, r));
                }
                Verdict::Unknown => all_hold = false,
            }
        }
        if let Some((index, result)) = failure {
            let b = result.bound_used;
            EvalResult::fails(false, Evidence::Component { index, result }).bound(b)
        } else if all_hold {
            EvalResult::holds(all_cert, Evidence::AllHold).bound(bound)
        } else {
            EvalResult::unknown("a conjunct is undecided").bound(bound)
        }
    }

    fn eval_or(&mut self, cs: &[NodeId], d: &Distribution) -> EvalResult {
        let mut all_fail = true;
        let mut all_cert = true;
        let mut bound = 0;
        let mut success = None;
        for (i, &c) in cs.iter().enumerate() {
            let r = self.eval_node(c, d);
            bound = bound.max(r.bound_used);
            match r.verdict {
                Verdict::Fails => all_cert &= r.certified,
                Verdict::Holds if r.certified => {
                    return EvalResult::holds(true, Evidence::Component { index: i, result: r.clone() })
                        .bound(r.bound_used)
                }
                Verdict::Holds => {
                    all_fail = false;
                    success.get_or_insert((i, r));
                }
                Verdict::Unknown => all_fail = false,
            }
        }
        if let Some((index, result)) = success {
            let b = result.bound_used;
            EvalResult::holds(false, Evidence::Component { index, result }).bound(b)
        } else if all_fail {
            EvalResult::fails(all_cert, Evidence::AllFail).bound(bound)
        } else {
            EvalResult::unknown("a disjunct is undecided").bound(bound)
        }
    }

    fn eval_fix(&mut self, mu: bool, approx: &[NodeId], d: &Distribution) -> EvalResult {
        let m = approx.len();
        for (i, &a) in approx.iter().enumerate() {
            let r = self.eval_node(a, d);
            let decided = if mu { Verdict::Holds } else { Verdict::Fails };
            if r.verdict == decided {
                let b = r.bound_used.max(i + 1);
                return EvalResult::new(decided, r.certified, Evidence::Approximant { index: i + 1, result: r })
                    .bound(b);
            }
        }
        let msg = if mu {
            format!("µ not established at bound {m}")
        } else {
            format!("ν not refuted at bound {m}")
        };
        EvalResult::unknown(msg).bound(m)
    }

    fn profiles_at(&mut self, s: StateId) -> Rc<Vec<Profile>> {
        if let Some(p) = self.profiles.get(&s) {
            return p.clone();
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for l in &self.grid1 {
            let prof: Vec<Distribution> = self
                .g
                .action_ids(Player::Two)
                .map(|b| step_lotteries(self.g, s, l, &ActionLottery::pure(b)))
                .collect();
            if seen.insert(prof.clone()) {
                out.push((l.clone(), prof));
            }
        }
        let out = Rc::new(out);
        self.profiles.insert(s, out.clone());
        out
    }

    fn eval_enforce(&mut self, n: NodeId, body: NodeId, d: &Distribution) -> EvalResult {
        let supp: Vec<(StateId, Rational)> = d.iter().map(|(s, p)| (s, p.clone())).collect();
        if supp.len() > 1 && self.info[body].ext_convex {
            // Per-state strategies combine; the successor is a mixture of
            // successors that each satisfy the convex body.
            let mut strategy = Vec::new();
            let mut certified = self.info[body].convex_safe;
            let mut bound = 0;
            let mut ok = true;
            for (s, _) in &supp {
                let r = self.eval_node(n, &Distribution::point(*s));
                if r.verdict != Verdict::Holds {
                    ok = false;
                    break;
                }
                certified &= r.certified;
                bound = bound.max(r.bound_used);
                if let Evidence::Strategy(v) = &r.evidence {
                    strategy.extend(v.iter().cloned());
                }
            }
            if ok {
                return EvalResult::holds(certified, Evidence::Strategy(strategy)).bound(bound);
            }
        }

        let allowed = self.info[body].allowed.clone();
        let per_state: Vec<Vec<Profile>> = supp
            .iter()
            .map(|(s, _)| {
                self.profiles_at(*s)
                    .iter()
                    .filter(|(_, prof)| prof.iter().all(|th| th.support().all(|t| allowed[t.0])))
                    .cloned()
                    .collect()
            })
            .collect();
        let single = self.g.acts1.len() == 1;
        let n2 = self.g.acts2.len();
        let mut work = 0usize;
        let mut refutation = None;
        for combo in per_state.iter().map(|v| 0..v.len()).multi_cartesian_product() {
            let strategy: Vec<(StateId, ActionLottery)> = supp
                .iter()
                .zip(&combo)
                .zip(&per_state)
                .map(|(((s, _), &i), v)| (*s, v[i].0.clone()))
                .collect();
            let mut seen = HashSet::new();
            let mut verts = Vec::new();
            for bs in supp.iter().map(|_| 0..n2).multi_cartesian_product() {
                work += 1;
                if work > self.opts.enforce_budget {
                    return EvalResult::unknown(format!(
                        "<1> search budget of {} response vertices exceeded",
                        self.opts.enforce_budget
                    ));
                }
                let mut acc: BTreeMap<StateId, Rational> = BTreeMap::new();
                for (k, (_, w)) in supp.iter().enumerate() {
                    for (t, p) in per_state[k][combo[k]].1[bs[k]].iter() {
                        *acc.entry(t).or_insert_with(Rational::zero) += w * p;
                    }
                }
                let th = Distribution::from_accumulated(acc);
                if seen.insert(th.clone()) {
                    let response: Vec<(StateId, ActionId)> =
                        supp.iter().zip(&bs).map(|((s, _), &b)| (*s, ActionId(b))).collect();
                    verts.push((response, th));
                }
            }
            match self.hull_check(body, verts, single) {
                Hull::Pass { certified, bound } => {
                    return EvalResult::holds(certified, Evidence::Strategy(strategy)).bound(bound)
                }
                Hull::Refuted {
                    response,
                    successor,
                    result,
                } => {
                    if refutation.is_none() {
                        refutation = Some(Evidence::Refutation {
                            strategy,
                            response,
                            successor,
                            result,
                        });
                    }
                }
                Hull::Open => {}
            }
        }
        match refutation {
            Some(ev @ Evidence::Refutation { .. }) if single => {
                let (certified, b) = match &ev {
                    Evidence::Refutation { result, .. } => (result.certified, result.bound_used),
                    _ => unreachable!(),
                };
                EvalResult::fails(certified, ev).bound(b)
            }
            _ => EvalResult::unknown(format!(
                "no player-1 lottery with denominator {} enforces the body",
                self.opts.grid
            )),
        }
    }

    /// Does every player-2 answer in the hull of `verts` lead into the body?
    fn hull_check(&mut self, body: NodeId, verts: Vec<(Vec<(StateId, ActionId)>, Distribution)>, exhaustive: bool) -> Hull {
        let mut all_hold = true;
        let mut all_cert = true;
        let mut bound = 0;
        for (response, th) in &verts {
            let r = self.eval_node(body, th);
            bound = bound.max(r.bound_used);
            match r.verdict {
                Verdict::Holds => all_cert &= r.certified,
                Verdict::Fails => {
                    return Hull::Refuted {
                        response: response.clone(),
                        successor: th.clone(),
                        result: r,
                    }
                }
                Verdict::Unknown => {
                    all_hold = false;
                    if !exhaustive {
                        return Hull::Open;
                    }
                }
            }
        }
        if !all_hold {
            return Hull::Open;
        }
        if verts.len() == 1 {
            return Hull::Pass {
                certified: all_cert,
                bound,
            };
        }
        if self.info[body].ext_convex {
            return Hull::Pass {
                certified: all_cert && self.info[body].convex_safe,
                bound,
            };
        }
        let ths: Vec<Distribution> = verts.into_iter().map(|(_, th)| th).collect();
        if self.hull_ok(body, &ths) {
            Hull::Pass { certified: false, bound }
        } else {
            Hull::Open
        }
    }

    fn hull_ok(&mut self, n: NodeId, ths: &[Distribution]) -> bool {
        if ths.len() == 1 || self.info[n].ext_convex {
            return ths.iter().all(|th| self.holds_at(n, th));
        }
        match self.nodes[n].clone() {
            Node::And(cs) => cs.iter().all(|&c| self.hull_ok(c, ths)),
            Node::Or(cs) => cs.iter().any(|&c| self.hull_ok(c, ths)),
            _ => false,
        }
    }

    fn find_model(&mut self, n: NodeId) -> Model {
        if let Some(m) = self.models.get(&n) {
            return m.clone();
        }
        let info = &self.info[n];
        let first_allowed = info.allowed.iter().position(|&b| b).map(StateId);
        let m = match first_allowed {
            None => Model::None,
            Some(s) if info.lit_only => Model::Found(Distribution::point(s), true),
            Some(_) => match self.nodes[n].clone() {
                Node::Sum(v) => {
                    let ms: Vec<(Rational, Model)> = v.iter().map(|(p, c)| (p.clone(), self.find_model(*c))).collect();
                    if ms.iter().any(|(_, m)| matches!(m, Model::None)) {
                        Model::None
                    } else if ms.iter().all(|(_, m)| matches!(m, Model::Found(..))) {
                        let cert = ms.iter().all(|(_, m)| matches!(m, Model::Found(_, true)));
                        let parts: Vec<(Rational, Distribution)> = ms
                            .into_iter()
                            .map(|(p, m)| match m {
                                Model::Found(d, _) => (p, d),
                                _ => unreachable!(),
                            })
                            .collect();
                        Model::Found(combine_dists(&parts).expect("weights sum to one"), cert)
                    } else {
                        Model::Unknown
                    }
                }
                Node::Mix(v) => {
                    let ms: Vec<Model> = v.iter().map(|&c| self.find_model(c)).collect();
                    if ms.iter().any(|m| matches!(m, Model::None)) {
                        Model::None
                    } else if ms.iter().all(|m| matches!(m, Model::Found(..))) {
                        let cert = ms.iter().all(|m| matches!(m, Model::Found(_, true)));
                        match &ms[0] {
                            Model::Found(d, _) => Model::Found(d.clone(), cert),
                            _ => unreachable!(),
                        }
                    } else {
                        Model::Unknown
                    }
                }
                _ => {
                    let states: Vec<StateId> = self
                        .g
                        .state_ids()
                        .filter(|s| self.info[n].allowed[s.0])
                        .collect();
                    let mut found = Model::Unknown;
                    for s in states {
                        let d = Distribution::point(s);
                        let r = self.eval_node(n, &d);
                        if r.verdict == Verdict::Holds {
                            found = Model::Found(d, r.certified);
                            break;
                        }
                    }
                    found
                }
            },
        };
        self.models.insert(n, m.clone());
        m
    }

    fn eval_split(&mut self, n: NodeId, parts: Vec<(Option<Rational>, NodeId)>, d: &Distribution) -> EvalResult {
        if parts.is_empty() {
            return EvalResult::fails(true, Evidence::NoSplit("no components".to_string()));
        }
        let is_sum = parts[0].0.is_some();
        if is_sum {
            let sets: Vec<Vec<StateId>> = parts
                .iter()
                .map(|(_, c)| d.support().filter(|s| self.info[*c].allowed[s.0]).collect())
                .collect();
            let tree = Tree::Sum(
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, (p, _))| (p.clone().unwrap(), Tree::Leaf(i)))
                    .collect(),
            );
            if solve_tree(d, &tree, &sets).is_none() {
                return EvalResult::fails(
                    true,
                    Evidence::NoSplit("the weights cannot be met by states that may satisfy the components".to_string()),
                );
            }
        }
        if d.as_point().is_some() {
            return self.point_split(&parts, d);
        }
        if let Some(r) = self.trivial_split(&parts, d) {
            return r;
        }
        match self.tree_split(n, d) {
            Ok(r) => return r,
            Err(true) => {
                return EvalResult::fails(
                    true,
                    Evidence::NoSplit("no split into literal components exists".to_string()),
                )
            }
            Err(false) => {}
        }
        self.grid_split(&parts, d)
    }

    fn point_split(&mut self, parts: &[(Option<Rational>, NodeId)], d: &Distribution) -> EvalResult {
        let rs: Vec<Rc<EvalResult>> = parts.iter().map(|(_, c)| self.eval_node(*c, d)).collect();
        let bound = rs.iter().map(|r| r.bound_used).max().unwrap_or(0);
        if parts[0].0.is_some() {
            if rs.iter().all(|r| r.verdict == Verdict::Holds) {
                let split = parts.iter().map(|(p, _)| (p.clone().unwrap(), d.clone())).collect();
                return EvalResult::holds(rs.iter().all(|r| r.certified), Evidence::Split(split)).bound(bound);
            }
            let failing = rs
                .iter()
                .enumerate()
                .filter(|(_, r)| r.verdict == Verdict::Fails)
                .min_by_key(|(_, r)| !r.certified);
            return match failing {
                Some((index, r)) => {
                    EvalResult::fails(r.certified, Evidence::Component { index, result: r.clone() }).bound(bound)
                }
                None => EvalResult::unknown("a component is undecided at the point").bound(bound),
            };
        }
        if let Some(r) = self.mix_with_one(parts, d, &rs) {
            return r.bound(bound);
        }
        if rs.iter().all(|r| r.verdict == Verdict::Fails) {
            EvalResult::fails(rs.iter().all(|r| r.certified), Evidence::AllFail).bound(bound)
        } else {
            EvalResult::unknown("no component is established at the point").bound(bound)
        }
    }

    /// Mix satisfied by giving all weight to one component that holds at
    /// `d`; the rest only need some model.
    fn mix_with_one(
        &mut self,
        parts: &[(Option<Rational>, NodeId)],
        d: &Distribution,
        rs: &[Rc<EvalResult>],
    ) -> Option<EvalResult> {
        let mut order: Vec<usize> = (0..rs.len()).filter(|&j| rs[j].verdict == Verdict::Holds).collect();
        order.sort_by_key(|&j| !rs[j].certified);
        for j in order {
            let mut split = Vec::new();
            let mut cert = rs[j].certified;
            let mut ok = true;
            for (k, (_, c)) in parts.iter().enumerate() {
                if k == j {
                    split.push((Rational::one(), d.clone()));
                    continue;
                }
                match self.find_model(*c) {
                    Model::Found(m, ce) => {
                        cert &= ce;
                        split.push((Rational::zero(), m));
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(EvalResult::holds(cert, Evidence::Split(split)));
            }
        }
        None
    }

    fn trivial_split(&mut self, parts: &[(Option<Rational>, NodeId)], d: &Distribution) -> Option<EvalResult> {
        if parts[0].0.is_some() {
            let mut cert = true;
            let mut bound = 0;
            for (_, c) in parts {
                let r = self.eval_node(*c, d);
                if r.verdict != Verdict::Holds {
                    return None;
                }
                cert &= r.certified;
                bound = bound.max(r.bound_used);
            }
            let split = parts.iter().map(|(p, _)| (p.clone().unwrap(), d.clone())).collect();
            return Some(EvalResult::holds(cert, Evidence::Split(split)).bound(bound));
        }
        let rs: Vec<Rc<EvalResult>> = parts.iter().map(|(_, c)| self.eval_node(*c, d)).collect();
        let bound = rs.iter().map(|r| r.bound_used).max().unwrap_or(0);
        self.mix_with_one(parts, d, &rs).map(|r| r.bound(bound))
    }

    fn build_tree(&self, n: NodeId, leaves: &mut Vec<NodeId>) -> Tree {
        match &self.nodes[n] {
            Node::Sum(v) => Tree::Sum(v.iter().map(|(p, c)| (p.clone(), self.build_tree(*c, leaves))).collect()),
            Node::Mix(v) => Tree::Mix(v.iter().map(|c| self.build_tree(*c, leaves)).collect()),
            _ => {
                leaves.push(n);
                Tree::Leaf(leaves.len() - 1)
            }
        }
    }

    /// Disjunctive normal form of a split leaf; the flag says whether the
    /// expansion stayed within the cap.
    fn dnf_of(&mut self, n: NodeId) -> (Vec<NodeId>, bool) {
        if let Some(v) = self.dnf.get(&n) {
            return v.clone();
        }
        let out = match self.dnf_rec(n) {
            Some(v) => (v, true),
            None => (vec![n], false),
        };
        self.dnf.insert(n, out.clone());
        out
    }

    fn dnf_rec(&mut self, n: NodeId) -> Option<Vec<NodeId>> {
        let cap = self.opts.dnf_cap;
        match self.nodes[n].clone() {
            Node::Or(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    out.extend(self.dnf_rec(c)?);
                    if out.len() > cap {
                        return None;
                    }
                }
                Some(out)
            }
            Node::And(cs) => {
                let mut acc: Vec<Vec<NodeId>> = vec![Vec::new()];
                for c in cs {
                    let alts = self.dnf_rec(c)?;
                    if acc.len() * alts.len() > cap {
                        return None;
                    }
                    acc = acc
                        .iter()
                        .flat_map(|pre| {
                            alts.iter().map(move |&a| {
                                let mut v = pre.clone();
                                v.push(a);
                                v
                            })
                        })
                        .collect();
                }
                Some(
                    acc.into_iter()
                        .map(|conj| {
                            let mut flat = Vec::new();
                            for c in conj {
                                match &self.nodes[c] {
                                    Node::And(inner) => flat.extend(inner.iter().copied()),
                                    _ => flat.push(c),
                                }
                            }
                            self.mk(Node::And(flat))
                        })
                        .collect(),
                )
            }
            _ => Some(vec![n]),
        }
    }

    /// Transportation over the split tree with DNF-expanded leaves. `Ok` is
    /// a decided result, `Err(true)` an exact refutation, `Err(false)`
    /// inconclusive.
    fn tree_split(&mut self, n: NodeId, d: &Distribution) -> Result<EvalResult, bool> {
        let mut leaves = Vec::new();
        let mut tops = Vec::new();
        let tree = match self.nodes[n].clone() {
            Node::Sum(v) => Tree::Sum(
                v.iter()
                    .map(|(p, c)| {
                        let start = leaves.len();
                        let t = self.build_tree(*c, &mut leaves);
                        tops.push((*c, start..leaves.len()));
                        (p.clone(), t)
                    })
                    .collect(),
            ),
            Node::Mix(v) => Tree::Mix(
                v.iter()
                    .map(|c| {
                        let start = leaves.len();
                        let t = self.build_tree(*c, &mut leaves);
                        tops.push((*c, start..leaves.len()));
                        t
                    })
                    .collect(),
            ),
            _ => unreachable!(),
        };
        let mut exact = true;
        let mut alts = Vec::new();
        for &l in &leaves {
            let (v, complete) = self.dnf_of(l);
            exact &= complete;
            alts.push(v);
        }
        let supp: Vec<StateId> = d.support().collect();
        let mut tried = 0usize;
        'choices: for choice in alts.iter().map(|v| 0..v.len()).multi_cartesian_product() {
            tried += 1;
            if tried > self.opts.split_budget {
                return Err(false);
            }
            let mut sets = Vec::with_capacity(leaves.len());
            let mut models = Vec::with_capacity(leaves.len());
            let mut cert = true;
            let mut choice_exact = true;
            for (i, &k) in choice.iter().enumerate() {
                let c = alts[i][k];
                let info = self.info[c].clone();
                let set: Vec<StateId> = if info.conj_lits {
                    supp.iter().copied().filter(|s| info.allowed[s.0]).collect()
                } else if info.ext_convex {
                    choice_exact = false;
                    cert &= info.convex_safe;
                    let mut set = Vec::new();
                    for &s in &supp {
                        let r = self.eval_node(c, &Distribution::point(s));
                        if r.verdict == Verdict::Holds {
                            cert &= r.certified;
                            set.push(s);
                        }
                    }
                    set
                } else {
                    exact = false;
                    continue 'choices;
                };
                match self.find_model(c) {
                    Model::Found(m, ce) => {
                        cert &= ce;
                        models.push(m);
                    }
                    Model::None => continue 'choices,
                    Model::Unknown => {
                        exact = false;
                        continue 'choices;
                    }
                }
                sets.push(set);
            }
            let Some(masses) = solve_tree(d, &tree, &sets) else {
                exact &= choice_exact;
                continue;
            };
            let mut split = Vec::new();
            for (top, range) in &tops {
                let mut acc: BTreeMap<StateId, Rational> = BTreeMap::new();
                for m in &masses[range.clone()] {
                    for (s, x) in m {
                        *acc.entry(*s).or_insert_with(Rational::zero) += x;
                    }
                }
                let w: Rational = acc.values().sum();
                if w.is_zero() {
                    let mut leaves_under = Vec::new();
                    let sub = self.build_tree(*top, &mut leaves_under);
                    let offset = range.start;
                    split.push((w, tree_model(&sub, &models[offset..offset + leaves_under.len()])));
                } else {
                    acc.values_mut().for_each(|x| *x /= &w);
                    split.push((w, Distribution::from_accumulated(acc)));
                }
            }
            return Ok(EvalResult::holds(cert, Evidence::Split(split)));
        }
        Err(exact)
    }

    fn grid_split(&mut self, parts: &[(Option<Rational>, NodeId)], d: &Distribution) -> EvalResult {
        let j = parts.len();
        let comps: Vec<Vec<Rational>> = lottery_grid(j, self.opts.split_denom)
            .into_iter()
            .map(|l| (0..j).map(|k| l.prob(ActionId(k))).collect())
            .collect();
        let supp: Vec<(StateId, Rational)> = d.iter().map(|(s, p)| (s, p.clone())).collect();
        let mut examined = 0usize;
        let mut enumerated = 0usize;
        let raw_cap = self.opts.split_budget.saturating_mul(50);
        for choice in supp.iter().map(|_| 0..comps.len()).multi_cartesian_product() {
            enumerated += 1;
            if enumerated > raw_cap {
                return EvalResult::unknown("split search budget exceeded");
            }
            let mut accs: Vec<BTreeMap<StateId, Rational>> = vec![BTreeMap::new(); j];
            for ((s, w), &ci) in supp.iter().zip(&choice) {
                for (k, f) in comps[ci].iter().enumerate() {
                    if !f.is_zero() {
                        accs[k].insert(*s, w * f);
                    }
                }
            }
            let masses: Vec<Rational> = accs.iter().map(|a| a.values().sum()).collect();
            if parts.iter().zip(&masses).any(|((p, _), m)| p.as_ref().is_some_and(|p| p != m)) {
                continue;
            }
            examined += 1;
            if examined > self.opts.split_budget {
                return EvalResult::unknown("split search budget exceeded");
            }
            let mut split = Vec::with_capacity(j);
            let mut cert = true;
            let mut bound = 0;
            let mut ok = true;
            for (k, (_, c)) in parts.iter().enumerate() {
                if masses[k].is_zero() {
                    match self.find_model(*c) {
                        Model::Found(m, ce) => {
                            cert &= ce;
                            split.push((Rational::zero(), m));
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                    continue;
                }
                let mut acc = accs[k].clone();
                acc.values_mut().for_each(|x| *x /= &masses[k]);
                let dk = Distribution::from_accumulated(acc);
                let r = self.eval_node(*c, &dk);
                if r.verdict != Verdict::Holds {
                    ok = false;
                    break;
                }
                cert &= r.certified;
                bound = bound.max(r.bound_used);
                split.push((masses[k].clone(), dk));
            }
            if ok {
                return EvalResult::holds(cert, Evidence::Split(split)).bound(bound);
            }
        }
        EvalResult::unknown(format!(
            "no split with denominator {} found",
            self.opts.split_denom
        ))
    }
}

fn tree_model(t: &Tree, models: &[Distribution]) -> Distribution {
    match t {
        Tree::Leaf(i) => models[*i].clone(),
        Tree::Sum(v) => {
            let parts: Vec<(Rational, Distribution)> =
                v.iter().map(|(p, c)| (p.clone(), tree_model(c, models))).collect();
            combine_dists(&parts).expect("weights sum to one")
        }
        Tree::Mix(v) => tree_model(&v[0], models),
    }
}

/// Collects the LP variables of every leaf below `t`.
fn tree_terms(t: &Tree, vars: &[Vec<VarId>], out: &mut Vec<(VarId, Rational)>, scale: &Rational) {
    match t {
        Tree::Leaf(i) => out.extend(vars[*i].iter().map(|v| (*v, scale.clone()))),
        Tree::Sum(v) => v.iter().for_each(|(_, c)| tree_terms(c, vars, out, scale)),
        Tree::Mix(v) => v.iter().for_each(|c| tree_terms(c, vars, out, scale)),
    }
}

fn tree_constraints(t: &Tree, vars: &[Vec<VarId>], lp: &mut LinearProblem) {
    match t {
        Tree::Leaf(_) => {}
        Tree::Sum(v) => {
            for (p, c) in v {
                let mut terms = Vec::new();
                tree_terms(c, vars, &mut terms, &Rational::one());
                tree_terms(t, vars, &mut terms, &-p);
                lp.add_constraint(terms, Relop::Eq, Rational::zero());
                tree_constraints(c, vars, lp);
            }
        }
        Tree::Mix(v) => v.iter().for_each(|c| tree_constraints(c, vars, lp)),
    }
}

/// Mass of each state routed to each leaf, with leaf `i` restricted to
/// `sets[i]` and `Sum` nodes receiving their fixed shares.
fn solve_tree(d: &Distribution, tree: &Tree, sets: &[Vec<StateId>]) -> Option<Vec<BTreeMap<StateId, Rational>>> {
    let mut lp = LinearProblem::new();
    let mut vars: Vec<Vec<VarId>> = Vec::with_capacity(sets.len());
    let mut rows: BTreeMap<StateId, Vec<(VarId, Rational)>> = BTreeMap::new();
    for (i, set) in sets.iter().enumerate() {
        let mut vs = Vec::new();
        for &s in set {
            let v = lp.nonneg(format!("m{i}_{}", s.0));
            rows.entry(s).or_default().push((v, Rational::one()));
            vs.push(v);
        }
        vars.push(vs);
    }
    for (s, p) in d.iter() {
        let terms = rows.remove(&s)?;
        lp.add_constraint(terms, Relop::Eq, p.clone());
    }
    tree_constraints(tree, &vars, &mut lp);
    let x = lp_feasible(&lp)?;
    Some(
        sets.iter()
            .zip(&vars)
            .map(|(set, vs)| {
                set.iter()
                    .zip(vs)
                    .filter(|(_, v)| x[v.0].is_positive())
                    .map(|(s, v)| (*s, x[v.0].clone()))
                    .collect()
            })
            .collect(),
    )
}

/// Evaluates a closed formula at `d`.
pub fn eval(g: &GameStructure, d: &Distribution, phi: &Formula, opts: &EvalOptions) -> Result<EvalResult, EvalError> {
    Evaluator::new(g, opts.clone())?.eval(d, phi)
}

/// `d |= sum{p_1: f_1, ...}`.
pub fn split_check(
    g: &GameStructure,
    d: &Distribution,
    parts: &[(Rational, Formula)],
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    let total: Rational = parts.iter().map(|(p, _)| p.clone()).sum();
    if !total.is_one() || parts.iter().any(|(p, _)| !p.is_positive()) {
        return Err(EvalError::Weights(fmt_rational(&total)));
    }
    eval(g, d, &Formula::ProbSum(parts.to_vec()), opts)
}

/// `d |= mix{f_1, ...}`.
pub fn mix_check(g: &GameStructure, d: &Distribution, parts: &[Formula], opts: &EvalOptions) -> Result<EvalResult, EvalError> {
    eval(g, d, &Formula::Mix(parts.to_vec()), opts)
}

/// `d |= <1> body`.
pub fn enforce_check(g: &GameStructure, d: &Distribution, body: &Formula, opts: &EvalOptions) -> Result<EvalResult, EvalError> {
    eval(g, d, &Formula::enforce(body.clone()), opts)
}
