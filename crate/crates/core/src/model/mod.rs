//! Probabilistic game structures: the data model, the `.pgs` text format and
//! the primitive transition function.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::prob::Distribution;
use crate::rational::{fmt_rational, Rational};

pub use parse::parse_model;

macro_rules! index_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_newtype!(
    /// A state, identified by its declaration index.
    StateId
);
index_newtype!(
    /// An action of either player, identified by its index in that player's list.
    ActionId
);
index_newtype!(
    /// An atomic proposition, identified by its declaration index.
    PropId
);

/// One player of the two-player game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

/// A raw transition row. Rows of a valid model are distributions.
pub type Row = BTreeMap<StateId, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("invalid model: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

/// A two-player probabilistic game structure.
///
/// Declaration order of states, propositions and actions fixes every
/// iteration order used by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameStructure {
    pub name: String,
    pub states: Vec<String>,
    pub init: StateId,
    pub props: Vec<String>,
    /// Indexed by state.
    pub labels: Vec<BTreeSet<PropId>>,
    pub acts1: Vec<String>,
    pub acts2: Vec<String>,
    pub table: BTreeMap<(StateId, ActionId, ActionId), Row>,
}

impl GameStructure {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl DoubleEndedIterator<Item = StateId> + ExactSizeIterator {
        (0..self.states.len()).map(StateId)
    }

    pub fn actions(&self, player: Player) -> &[String] {
        match player {
            Player::One => &self.acts1,
            Player::Two => &self.acts2,
        }
    }

    pub fn action_ids(&self, player: Player) -> impl Iterator<Item = ActionId> {
        (0..self.actions(player).len()).map(ActionId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn action_name(&self, player: Player, a: ActionId) -> &str {
        &self.actions(player)[a.0]
    }

    pub fn prop_name(&self, p: PropId) -> &str {
        &self.props[p.0]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, ModelError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| ModelError::Unknown {
                kind: "state",
                name: name.to_string(),
            })
    }

    pub fn action_id(&self, player: Player, name: &str) -> Result<ActionId, ModelError> {
        self.actions(player)
            .iter()
            .position(|a| a == name)
            .map(ActionId)
            .ok_or_else(|| ModelError::Unknown {
                kind: match player {
                    Player::One => "player-1 action",
                    Player::Two => "player-2 action",
                },
                name: name.to_string(),
            })
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|p| p == name).map(PropId)
    }

    pub fn label(&self, s: StateId) -> &BTreeSet<PropId> {
        &self.labels[s.0]
    }

    pub fn has_prop(&self, s: StateId, p: PropId) -> bool {
        self.labels[s.0].contains(&p)
    }

    /// The raw row for a joint action. Panics if the entry is missing, which
    /// cannot happen for a validated model.
    pub fn row(&self, s: StateId, a1: ActionId, a2: ActionId) -> &Row {
        self.table
            .get(&(s, a1, a2))
            .unwrap_or_else(|| panic!("transition table not total at {}", self.triple(s, a1, a2)))
    }

    /// `true` when every row is a point distribution.
    pub fn is_deterministic(&self) -> bool {
        self.table.values().all(|row| row.len() == 1)
    }

    /// `true` when every joint action loops back to `s` with certainty.
    pub fn is_absorbing(&self, s: StateId) -> bool {
        self.action_ids(Player::One).all(|a| {
            self.action_ids(Player::Two).all(|b| {
                self.table
                    .get(&(s, a, b))
                    .is_some_and(|row| row.len() == 1 && row.get(&s).is_some_and(One::is_one))
            })
        })
    }

    fn triple(&self, s: StateId, a1: ActionId, a2: ActionId) -> String {
        format!(
            "({},{},{})",
            self.states.get(s.0).map_or("?", String::as_str),
            self.acts1.get(a1.0).map_or("?", String::as_str),
            self.acts2.get(a2.0).map_or("?", String::as_str)
        )
    }
}

/// Checks every structural invariant and returns one message per violation.
pub fn validate_model(g: &GameStructure) -> Vec<String> {
    let mut out = Vec::new();
    let n = g.states.len();
    if n == 0 {
        out.push("no states declared".to_string());
    }
    if g.acts1.is_empty() {
        out.push("player-1 action set is empty".to_string());
    }
    if g.acts2.is_empty() {
        out.push("player-2 action set is empty".to_string());
    }
    for (kind, names) in [
        ("state", &g.states),
        ("proposition", &g.props),
        ("player-1 action", &g.acts1),
        ("player-2 action", &g.acts2),
    ] {
        let mut seen = BTreeSet::new();
        for name in names {
            if !seen.insert(name) {
                out.push(format!("duplicate {kind} `{name}`"));
            }
        }
    }
    if g.init.0 >= n {
        out.push(format!("initial state index {} is not a declared state", g.init.0));
    }
    if g.labels.len() != n {
        out.push(format!(
            "label table has {} entries for {} states",
            g.labels.len(),
            n
        ));
    }
    for (i, props) in g.labels.iter().enumerate() {
        for p in props {
            if p.0 >= g.props.len() {
                out.push(format!(
                    "label of state {} uses undeclared proposition index {}",
                    g.states.get(i).map_or("?", String::as_str),
                    p.0
                ));
            }
        }
    }
    for s in g.state_ids() {
        for a in g.action_ids(Player::One) {
            for b in g.action_ids(Player::Two) {
                match g.table.get(&(s, a, b)) {
                    None => out.push(format!(
                        "transition table not total at {}",
                        g.triple(s, a, b)
                    )),
                    Some(row) => check_row(g, (s, a, b), row, &mut out),
                }
            }
        }
    }
    for &(s, a, b) in g.table.keys() {
        if s.0 >= n || a.0 >= g.acts1.len() || b.0 >= g.acts2.len() {
            out.push(format!("transition entry {} is out of range", g.triple(s, a, b)));
        }
    }
    out
}

fn check_row(g: &GameStructure, key: (StateId, ActionId, ActionId), row: &Row, out: &mut Vec<String>) {
    let (s, a, b) = key;
    let mut sum = Rational::zero();
    for (t, p) in row {
        if t.0 >= g.states.len() {
            out.push(format!(
                "row {} targets undeclared state index {}",
                g.triple(s, a, b),
                t.0
            ));
        }
        if !p.is_positive() {
            out.push(format!(
                "row {} has non-positive probability {} for {}",
                g.triple(s, a, b),
                fmt_rational(p),
                g.states.get(t.0).map_or("?", String::as_str)
            ));
        }
        sum += p;
    }
    if !sum.is_one() {
        out.push(format!("row {} sums to {}", g.triple(s, a, b), fmt_rational(&sum)));
    }
}

/// The primitive transition function.
pub fn step_state(
    g: &GameStructure,
    s: StateId,
    a1: ActionId,
    a2: ActionId,
) -> Result<Distribution, ModelError> {
    if s.0 >= g.states.len() {
        return Err(ModelError::Unknown {
            kind: "state",
            name: format!("#{}", s.0),
        });
    }
    if a1.0 >= g.acts1.len() {
        return Err(ModelError::Unknown {
            kind: "player-1 action",
            name: format!("#{}", a1.0),
        });
    }
    if a2.0 >= g.acts2.len() {
        return Err(ModelError::Unknown {
            kind: "player-2 action",
            name: format!("#{}", a2.0),
        });
    }
    let row = g.table.get(&(s, a1, a2)).ok_or_else(|| {
        ModelError::Invalid(vec![format!("transition table not total at {}", g.triple(s, a1, a2))])
    })?;
    Distribution::try_from_map(row.clone()).map_err(|e| ModelError::Invalid(vec![e.to_string()]))
}

/// Canonical `.pgs` text. States whose every joint action self-loops are
/// written with `absorb`.
pub fn serialize_model(g: &GameStructure) -> String {
    let mut out = String::new();
    let join = |names: &[String]| names.join(" ");
    let _ = writeln!(out, "model {}", g.name);
    let _ = writeln!(out, "states: {}", join(&g.states));
    let _ = writeln!(out, "init: {}", g.state_name(g.init));
    if g.props.is_empty() {
        let _ = writeln!(out, "props:");
    } else {
        let _ = writeln!(out, "props: {}", join(&g.props));
    }
    for s in g.state_ids() {
        let label = g.label(s);
        if !label.is_empty() {
            let names: Vec<&str> = label.iter().map(|&p| g.prop_name(p)).collect();
            let _ = writeln!(out, "label {}: {}", g.state_name(s), names.join(" "));
        }
    }
    let _ = writeln!(out, "actions1: {}", join(&g.acts1));
    let _ = writeln!(out, "actions2: {}", join(&g.acts2));
    for s in g.state_ids() {
        if g.is_absorbing(s) {
            let _ = writeln!(out, "absorb {}", g.state_name(s));
            continue;
        }
        for a in g.action_ids(Player::One) {
            for b in g.action_ids(Player::Two) {
                let row = g.row(s, a, b);
                let targets: Vec<String> = row
                    .iter()
                    .map(|(t, p)| format!("{}={}", g.state_name(*t), fmt_rational(p)))
                    .collect();
                let _ = writeln!(
                    out,
                    "trans {} ({},{}): {}",
                    g.state_name(s),
                    g.acts1[a.0],
                    g.acts2[b.0],
                    targets.join(" ")
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    #[test]
    fn rps_steps() {
        let g = parse_model(fixtures::RPS).unwrap();
        let s0 = g.state_id("s0").unwrap();
        let s1 = g.state_id("s1").unwrap();
        let r = g.action_id(Player::One, "r").unwrap();
        let s = g.action_id(Player::Two, "s").unwrap();
        let p1 = g.action_id(Player::One, "p").unwrap();
        let p2 = g.action_id(Player::Two, "p").unwrap();
        assert_eq!(step_state(&g, s0, r, s).unwrap(), Distribution::point(s1));
        assert_eq!(step_state(&g, s1, p1, p2).unwrap(), Distribution::point(s1));
    }

    #[test]
    fn halfway_step_is_a_coin_flip() {
        let g = parse_model(fixtures::HALFWAY).unwrap();
        let s0 = g.state_id("s0").unwrap();
        let s1 = g.state_id("s1").unwrap();
        let d = step_state(&g, s0, ActionId(0), ActionId(0)).unwrap();
        assert_eq!(d.prob(s0), ratio(1, 2));
        assert_eq!(d.prob(s1), ratio(1, 2));
    }

    #[test]
    fn step_rejects_unknown_indices() {
        let g = parse_model(fixtures::RPS).unwrap();
        assert!(step_state(&g, StateId(7), ActionId(0), ActionId(0)).is_err());
        assert!(step_state(&g, StateId(0), ActionId(3), ActionId(0)).is_err());
        assert!(step_state(&g, StateId(0), ActionId(0), ActionId(9)).is_err());
    }

    #[test]
    fn validate_accepts_rps() {
        let g = parse_model(fixtures::RPS).unwrap();
        assert!(validate_model(&g).is_empty());
    }

    #[test]
    fn validate_reports_bad_sum_and_missing_row() {
        let mut g = parse_model(fixtures::RPS).unwrap();
        let s0 = StateId(0);
        let s1 = StateId(1);
        let (r, p, s) = (ActionId(0), ActionId(1), ActionId(2));
        g.table.insert(
            (s0, r, r),
            Row::from([(s0, ratio(1, 2)), (s1, ratio(1, 3))]),
        );
        g.table.remove(&(s0, p, s));
        let v = validate_model(&g);
        assert_eq!(
            v,
            vec![
                "row (s0,r,r) sums to 5/6".to_string(),
                "transition table not total at (s0,p,s)".to_string()
            ]
        );
    }

    #[test]
    fn serialize_uses_absorb() {
        let g = parse_model("states: s0\nactions1: a\nactions2: b\nabsorb s0\n").unwrap();
        let text = serialize_model(&g);
        assert!(text.contains("absorb s0"));
        assert!(!text.contains("trans"));
        assert_eq!(parse_model(&text).unwrap(), g);
    }

    #[test]
    fn fixtures_round_trip() {
        for (name, src) in fixtures::MODELS {
            let g = parse_model(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            let text = serialize_model(&g);
            let again = parse_model(&text).unwrap();
            assert_eq!(again, g, "{name}");
            assert_eq!(serialize_model(&again), text, "{name}");
        }
    }
}
