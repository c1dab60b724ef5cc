//! Brute-force references for cross-checking the main engines.
//!
//! Each oracle uses a different algorithm from the engine it checks: integer
//! max-flow instead of the simplex for liftings, grid enumeration of both
//! players instead of the response LP for simulation, and exhaustive grid
//! splits and strategies instead of transportation problems for formulas.
//! All enumeration is bounded; running out of budget is an error, never a
//! silent truncation.

mod maxflow;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::logic::{unfold_fixpoint, EvalResult, Evidence, Formula, Verdict};
use crate::model::{ActionId, GameStructure, Player, StateId};
use crate::prob::{lottery_grid, step_lotteries, ActionLottery, Distribution, Relation};
use crate::rational::Rational;
use maxflow::FlowNetwork;

pub const MAX_SCALE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("common denominator {0} exceeds {MAX_SCALE}")]
    Scale(String),
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("formula is not closed")]
    Open,
}

fn scale_for<'a>(values: impl IntoIterator<Item = &'a Rational>, hint: Option<u64>) -> Result<u64, OracleError> {
    let mut lcm = BigInt::one();
    let mut all = Vec::new();
    for v in values {
        lcm = lcm.lcm(v.denom());
        all.push(v);
    }
    let scale = match hint {
        Some(h) => {
            let hb = BigInt::from(h);
            if h == 0 || !(&hb % &lcm).is_zero() {
                return Err(OracleError::Scale(format!("hint {h} is not a multiple of {lcm}")));
            }
            hb
        }
        None => lcm,
    };
    match scale.to_u64() {
        Some(s) if s <= MAX_SCALE => Ok(s),
        _ => Err(OracleError::Scale(scale.to_string())),
    }
}

fn scaled(p: &Rational, scale: u64) -> u64 {
    (p * Rational::from_integer(scale.into()))
        .to_integer()
        .to_u64()
        .expect("scaled probability fits")
}

/// Lifting by integer max-flow: source to each `d`-state with capacity
/// `scale * d(s)`, an unbounded edge `s -> t` for each related pair, and
/// `t` to the sink with capacity `scale * th(t)`.
pub fn brute_lift(
    d: &Distribution,
    th: &Distribution,
    r: &Relation,
    scale_hint: Option<u64>,
) -> Result<bool, OracleError> {
    let scale = scale_for(d.iter().chain(th.iter()).map(|(_, p)| p), scale_hint)?;
    let left: Vec<(StateId, &Rational)> = d.iter().collect();
    let right: Vec<(StateId, &Rational)> = th.iter().collect();
    let source = 0;
    let sink = left.len() + right.len() + 1;
    let mut net = FlowNetwork::new(sink + 1);
    for (i, (s, p)) in left.iter().enumerate() {
        net.add_edge(source, 1 + i, scaled(p, scale));
        for (j, (t, _)) in right.iter().enumerate() {
            if r.contains(*s, *t) {
                net.add_edge(1 + i, 1 + left.len() + j, scale);
            }
        }
    }
    for (j, (_, p)) in right.iter().enumerate() {
        net.add_edge(1 + left.len() + j, sink, scaled(p, scale));
    }
    Ok(net.max_flow(source, sink) == scale)
}

fn mixture(parts: impl IntoIterator<Item = (Rational, Distribution)>) -> Distribution {
    let mut acc: BTreeMap<StateId, Rational> = BTreeMap::new();
    for (w, d) in parts {
        for (s, p) in d.iter() {
            *acc.entry(s).or_insert_with(Rational::zero) += &w * p;
        }
    }
    acc.retain(|_, p| !p.is_zero());
    Distribution::try_from_map(acc).expect("mixture of distributions")
}

/// Largest number of lifting checks `brute_sim` performs.
pub const SIM_BUDGET: usize = 2_000_000;

/// Simulation with every quantifier enumerated on the `k`-grid: for every
/// player-1 lottery at `s` some lottery at `t` such that each pure player-2
/// answer at `t` is matched by a grid mixture of player-2 answers at `s`.
pub fn brute_sim(g: &GameStructure, k: u32) -> Result<Relation, OracleError> {
    if k == 0 {
        return Err(OracleError::Scale("grid 0".to_string()));
    }
    let g1 = lottery_grid(g.acts1.len(), k);
    let g2 = lottery_grid(g.acts2.len(), k);
    let mut r: Relation = g
        .state_ids()
        .flat_map(|s| g.state_ids().map(move |t| (s, t)))
        .filter(|&(s, t)| g.label(s) == g.label(t))
        .collect();
    let mut checks = 0usize;
    loop {
        let mut next = Relation::new();
        for (s, t) in r.iter() {
            let mut all = true;
            for p1 in &g1 {
                let s_succ: Vec<Distribution> = g
                    .action_ids(Player::Two)
                    .map(|c| step_lotteries(g, s, p1, &ActionLottery::pure(c)))
                    .collect();
                let mut answered = false;
                for x in &g1 {
                    let mut every_b = true;
                    for b in g.action_ids(Player::Two) {
                        let th = step_lotteries(g, t, x, &ActionLottery::pure(b));
                        let mut matched = false;
                        for lam in &g2 {
                            checks += 1;
                            if checks > SIM_BUDGET {
                                return Err(OracleError::Budget(format!("{SIM_BUDGET} lifting checks")));
                            }
                            let mix = mixture(lam.iter().map(|(c, w)| (w.clone(), s_succ[c.0].clone())));
                            if brute_lift(&mix, &th, &r, None)? {
                                matched = true;
                                break;
                            }
                        }
                        if !matched {
                            every_b = false;
                            break;
                        }
                    }
                    if every_b {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    all = false;
                    break;
                }
            }
            if all {
                next.insert(s, t);
            }
        }
        if next == r {
            return Ok(r);
        }
        r = next;
    }
}

/// Grid resolutions for `brute_eval`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteGrids {
    pub pi1: u32,
    pub pi2: u32,
    pub split: u32,
    pub unfold: usize,
    /// Largest number of sub-formula evaluations.
    pub budget: usize,
}

impl Default for BruteGrids {
    fn default() -> Self {
        Self {
            pi1: 4,
            pi2: 4,
            split: 12,
            unfold: 4,
            budget: 2_000_000,
        }
    }
}

struct Brute<'g> {
    g: &'g GameStructure,
    grids: BruteGrids,
    g1: Vec<ActionLottery>,
    g2: Vec<ActionLottery>,
    work: usize,
    memo: HashMap<(Formula, Distribution), Verdict>,
}

fn result(verdict: Verdict, certified: bool, msg: &str) -> EvalResult {
    EvalResult {
        verdict,
        certified: certified && verdict != Verdict::Unknown,
        evidence: Evidence::Inconclusive(msg.to_string()),
        bound_used: 0,
    }
}

/// Conjunction of literals (including `true`), satisfied state by state.
fn literal_conj(phi: &Formula) -> bool {
    match phi {
        Formula::Prop(_) | Formula::NegProp(_) => true,
        Formula::And(v) => v.iter().all(literal_conj),
        _ => false,
    }
}

impl Brute<'_> {
    fn sat_state(&self, phi: &Formula, s: StateId) -> Result<bool, OracleError> {
        Ok(match phi {
            Formula::Prop(p) | Formula::NegProp(p) => {
                let id = self.g.prop_id(p).ok_or_else(|| OracleError::UnknownProp(p.clone()))?;
                self.g.has_prop(s, id) == matches!(phi, Formula::Prop(_))
            }
            Formula::And(v) => {
                for c in v {
                    if !self.sat_state(c, s)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => unreachable!("literal conjunctions only"),
        })
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.work += 1;
        if self.work > self.grids.budget {
            Err(OracleError::Budget(format!("{} evaluations", self.grids.budget)))
        } else {
            Ok(())
        }
    }

    fn eval(&mut self, phi: &Formula, d: &Distribution) -> Result<Verdict, OracleError> {
        let key = (phi.clone(), d.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        self.tick()?;
        let v = self.eval_inner(phi, d)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn eval_inner(&mut self, phi: &Formula, d: &Distribution) -> Result<Verdict, OracleError> {
        use Verdict::*;
        if literal_conj(phi) {
            for s in d.support() {
                if !self.sat_state(phi, s)? {
                    return Ok(Fails);
                }
            }
            return Ok(Holds);
        }
        match phi {
            Formula::Prop(_) | Formula::NegProp(_) => unreachable!(),
            Formula::Var(_) => Err(OracleError::Open),
            Formula::And(v) => {
                let mut out = Holds;
                for c in v {
                    match self.eval(c, d)? {
                        Fails => return Ok(Fails),
                        Unknown => out = Unknown,
                        Holds => {}
                    }
                }
                Ok(out)
            }
            Formula::Or(v) => {
                let mut out = Fails;
                for c in v {
                    match self.eval(c, d)? {
                        Holds => return Ok(Holds),
                        Unknown => out = Unknown,
                        Fails => {}
                    }
                }
                Ok(out)
            }
            Formula::Mu(..) | Formula::Nu(..) => {
                let mu = matches!(phi, Formula::Mu(..));
                for m in 1..=self.grids.unfold {
                    let v = self.eval(&unfold_fixpoint(phi, m), d)?;
                    if mu && v == Holds {
                        return Ok(Holds);
                    }
                    if !mu && v == Fails {
                        return Ok(Fails);
                    }
                }
                Ok(Unknown)
            }
            Formula::Enforce(body) => self.enforce(body, d),
            Formula::ProbSum(parts) => {
                let weights: Vec<Option<Rational>> = parts.iter().map(|(p, _)| Some(p.clone())).collect();
                let comps: Vec<Formula> = parts.iter().map(|(_, c)| c.clone()).collect();
                if comps.iter().all(literal_conj) {
                    return self.flow_split(&weights, &comps, d);
                }
                self.split(&weights, &comps, d)
            }
            Formula::Mix(comps) => self.split(&vec![None; comps.len()], comps, d),
        }
    }

    fn enforce(&mut self, body: &Formula, d: &Distribution) -> Result<Verdict, OracleError> {
        let supp: Vec<(StateId, Rational)> = d.iter().map(|(s, p)| (s, p.clone())).collect();
        let single = self.g.acts1.len() == 1;
        let g1 = self.g1.clone();
        let g2 = self.g2.clone();
        for p1 in product(supp.len(), g1.len()) {
            let mut all = true;
            for p2 in product(supp.len(), g2.len()) {
                self.tick()?;
                let th = mixture(supp.iter().enumerate().map(|(k, (s, w))| {
                    (w.clone(), step_lotteries(self.g, *s, &g1[p1[k]], &g2[p2[k]]))
                }));
                match self.eval(body, &th)? {
                    Verdict::Holds => {}
                    Verdict::Fails if single => return Ok(Verdict::Fails),
                    _ => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                return Ok(Verdict::Holds);
            }
        }
        Ok(Verdict::Unknown)
    }

    /// Point search for a model of `phi`.
    fn has_point_model(&mut self, phi: &Formula) -> Result<bool, OracleError> {
        for s in self.g.state_ids() {
            if self.eval(phi, &Distribution::point(s))? == Verdict::Holds {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact decision for weighted splits into literal conjunctions.
    fn flow_split(&mut self, weights: &[Option<Rational>], comps: &[Formula], d: &Distribution) -> Result<Verdict, OracleError> {
        let ws: Vec<Rational> = weights.iter().map(|w| w.clone().unwrap()).collect();
        let scale = scale_for(d.iter().map(|(_, p)| p).chain(ws.iter()), None)?;
        let states: Vec<(StateId, &Rational)> = d.iter().collect();
        let sink = states.len() + comps.len() + 1;
        let mut net = FlowNetwork::new(sink + 1);
        for (i, (s, p)) in states.iter().enumerate() {
            net.add_edge(0, 1 + i, scaled(p, scale));
            for (j, c) in comps.iter().enumerate() {
                if self.sat_state(c, *s)? {
                    net.add_edge(1 + i, 1 + states.len() + j, scale);
                }
            }
        }
        for (j, w) in ws.iter().enumerate() {
            net.add_edge(1 + states.len() + j, sink, scaled(w, scale));
        }
        Ok(if net.max_flow(0, sink) == scale {
            Verdict::Holds
        } else {
            Verdict::Fails
        })
    }

    fn split(&mut self, weights: &[Option<Rational>], comps: &[Formula], d: &Distribution) -> Result<Verdict, OracleError> {
        let j = comps.len();
        if j == 0 {
            return Ok(Verdict::Fails);
        }
        if d.as_point().is_some() {
            // Every positive-weight part equals the point.
            let vs: Vec<Verdict> = comps.iter().map(|c| self.eval(c, d)).collect::<Result<_, _>>()?;
            if weights[0].is_some() {
                return Ok(if vs.iter().all(|v| *v == Verdict::Holds) {
                    Verdict::Holds
                } else if vs.contains(&Verdict::Fails) {
                    Verdict::Fails
                } else {
                    Verdict::Unknown
                });
            }
            if vs.iter().all(|v| *v == Verdict::Fails) {
                return Ok(Verdict::Fails);
            }
        }
        let fracs: Vec<Vec<Rational>> = lottery_grid(j, self.grids.split)
            .into_iter()
            .map(|l| (0..j).map(|k| l.prob(ActionId(k))).collect())
            .collect();
        let supp: Vec<(StateId, Rational)> = d.iter().map(|(s, p)| (s, p.clone())).collect();
        'outer: for choice in product(supp.len(), fracs.len()) {
            self.tick()?;
            let mut masses = vec![Rational::zero(); j];
            let mut parts: Vec<BTreeMap<StateId, Rational>> = vec![BTreeMap::new(); j];
            for (k, (s, w)) in supp.iter().enumerate() {
                for (c, f) in fracs[choice[k]].iter().enumerate() {
                    if !f.is_zero() {
                        masses[c] += w * f;
                        parts[c].insert(*s, w * f);
                    }
                }
            }
            if weights.iter().zip(&masses).any(|(w, m)| w.as_ref().is_some_and(|w| w != m)) {
                continue;
            }
            for c in 0..j {
                if masses[c].is_zero() {
                    if !self.has_point_model(&comps[c])? {
                        continue 'outer;
                    }
                    continue;
                }
                let dc = Distribution::try_from_map(
                    parts[c].iter().map(|(s, x)| (*s, x / &masses[c])).collect(),
                )
                .expect("normalised part");
                if self.eval(&comps[c], &dc)? != Verdict::Holds {
                    continue 'outer;
                }
            }
            return Ok(Verdict::Holds);
        }
        Ok(Verdict::Unknown)
    }
}

/// All index vectors of length `n` over `0..k`, first index slowest.
fn product(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (k as u128).pow(n as u32);
    (0..total).map(move |mut i| {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = (i % k as u128) as usize;
            i /= k as u128;
        }
        v
    })
}

/// Evaluates `phi` at `d` with every quantifier enumerated on grids. Fails
/// verdicts come only from exact reasoning; only literal verdicts are
/// certified.
pub fn brute_eval(g: &GameStructure, d: &Distribution, phi: &Formula, grids: &BruteGrids) -> Result<EvalResult, OracleError> {
    if !phi.is_closed() {
        return Err(OracleError::Open);
    }
    if grids.pi1 == 0 || grids.pi2 == 0 || grids.split == 0 {
        return Err(OracleError::Scale("grid 0".to_string()));
    }
    let mut b = Brute {
        g,
        g1: lottery_grid(g.acts1.len(), grids.pi1),
        g2: lottery_grid(g.acts2.len(), grids.pi2),
        grids: grids.clone(),
        work: 0,
        memo: HashMap::new(),
    };
    let v = b.eval(phi, d)?;
    let literal = matches!(phi, Formula::Prop(_) | Formula::NegProp(_));
    Ok(result(v, literal, "grid enumeration"))
}
