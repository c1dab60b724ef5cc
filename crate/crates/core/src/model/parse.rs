//! Parser for the line-oriented `.pgs` format.
//!
//! ```text
//! model <ident>
//! states: <ident>+            init: <ident>
//! props: <ident>*
//! label <state>: <prop>*
//! actions1: <ident>+          actions2: <ident>+
//! trans <state> (<act1>,<act2>): (<state>=<rat>)+
//! absorb <state>
//! ```
//!
//! Several `key: values` directives may share a line. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};

use super::{validate_model, ActionId, GameStructure, ModelError, PropId, Row, StateId};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Star,
    Colon,
    LParen,
    RParen,
    Comma,
    Eq,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Semantic {
        line,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Spanned>, ModelError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            ':' | '(' | ')' | ',' | '=' | '*' => {
                out.push(Spanned {
                    tok: match c {
                        ':' => Tok::Colon,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '=' => Tok::Eq,
                        _ => Tok::Star,
                    },
                    col,
                });
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    col,
                });
            }
            c if c.is_ascii_digit() || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    return Err(syntax(
                        line_no,
                        col,
                        "decimal literals are not allowed, write probabilities as fractions",
                    ));
                }
                out.push(Spanned {
                    tok: Tok::Number(chars[start..i].iter().collect()),
                    col,
                });
            }
            other => return Err(syntax(line_no, col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct RawTrans {
    line: usize,
    state: String,
    a1: String,
    a2: String,
    targets: Vec<(String, Rational)>,
}

#[derive(Default)]
struct Decls {
    name: Option<String>,
    states: Option<(usize, Vec<String>)>,
    init: Option<(usize, String)>,
    props: Option<(usize, Vec<String>)>,
    acts1: Option<(usize, Vec<String>)>,
    acts2: Option<(usize, Vec<String>)>,
    labels: Vec<(usize, String, Vec<String>)>,
    trans: Vec<RawTrans>,
    absorb: Vec<(usize, String)>,
}

const LIST_KEYS: [&str; 5] = ["states", "init", "props", "actions1", "actions2"];

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    eol_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol_col, |t| t.col)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ModelError> {
        let col = self.col();
        match self.next() {
            Some(t) if *t == want => Ok(()),
            Some(t) => Err(syntax(self.line, col, format!("expected {what}, found {t:?}"))),
            None => Err(syntax(self.line, col, format!("expected {what}, found end of line"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ModelError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s.clone()),
            Some(t) => Err(syntax(self.line, col, format!("expected {what}, found {t:?}"))),
            None => Err(syntax(self.line, col, format!("expected {what}, found end of line"))),
        }
    }

    fn action(&mut self) -> Result<String, ModelError> {
        if let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            return Ok("*".to_string());
        }
        self.ident("action name")
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// `ident :` starts a new directive.
    fn at_key(&self) -> bool {
        matches!(
            (self.toks.get(self.pos).map(|t| &t.tok), self.toks.get(self.pos + 1).map(|t| &t.tok)),
            (Some(Tok::Ident(k)), Some(Tok::Colon)) if LIST_KEYS.contains(&k.as_str())
        )
    }
}

fn set_once<T>(slot: &mut Option<(usize, T)>, line: usize, key: &str, value: T) -> Result<(), ModelError> {
    if let Some((prev, _)) = slot {
        return Err(semantic(
            line,
            format!("duplicate declaration of `{key}` (first declared on line {prev})"),
        ));
    }
    *slot = Some((line, value));
    Ok(())
}

fn parse_list_line(cur: &mut Cursor<'_>, decls: &mut Decls) -> Result<(), ModelError> {
    while !cur.at_end() {
        if !cur.at_key() {
            return Err(syntax(cur.line, cur.col(), "expected a `key:` directive"));
        }
        let key = cur.ident("directive")?;
        cur.expect(Tok::Colon, "`:`")?;
        let mut items = Vec::new();
        while !cur.at_end() && !cur.at_key() {
            let col = cur.col();
            let item = match key.as_str() {
                "actions1" | "actions2" => cur.action()?,
                _ => cur.ident("identifier")?,
            };
            if item == "*" && !items.is_empty() {
                return Err(syntax(cur.line, col, "`*` must be the only action in its list"));
            }
            if items.iter().any(|i: &String| i == "*") {
                return Err(syntax(cur.line, col, "`*` must be the only action in its list"));
            }
            items.push(item);
        }
        let line = cur.line;
        match key.as_str() {
            "states" => {
                if items.is_empty() {
                    return Err(semantic(line, "`states:` needs at least one state"));
                }
                set_once(&mut decls.states, line, "states", items)?
            }
            "init" => {
                if items.len() != 1 {
                    return Err(semantic(line, "`init:` takes exactly one state"));
                }
                set_once(&mut decls.init, line, "init", items.remove(0))?
            }
            "props" => set_once(&mut decls.props, line, "props", items)?,
            "actions1" | "actions2" => {
                if items.is_empty() {
                    return Err(semantic(
                        line,
                        format!("`{key}:` is empty; use `*` for a player without choices"),
                    ));
                }
                let slot = if key == "actions1" {
                    &mut decls.acts1
                } else {
                    &mut decls.acts2
                };
                set_once(slot, line, &key, items)?
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

fn parse_line(line_no: usize, toks: &[Spanned], decls: &mut Decls, eol_col: usize) -> Result<(), ModelError> {
    let mut cur = Cursor {
        toks,
        pos: 0,
        line: line_no,
        eol_col,
    };
    if cur.at_key() {
        return parse_list_line(&mut cur, decls);
    }
    let head_col = cur.col();
    let head = cur.ident("directive")?;
    match head.as_str() {
        "model" => {
            let name = cur.ident("model name")?;
            if decls.name.is_some() {
                return Err(semantic(line_no, "duplicate `model` declaration"));
            }
            decls.name = Some(name);
        }
        "label" => {
            let state = cur.ident("state name")?;
            cur.expect(Tok::Colon, "`:`")?;
            let mut props = Vec::new();
            while !cur.at_end() {
                props.push(cur.ident("proposition")?);
            }
            decls.labels.push((line_no, state, props));
        }
        "absorb" => {
            let state = cur.ident("state name")?;
            decls.absorb.push((line_no, state));
        }
        "trans" => {
            let state = cur.ident("state name")?;
            cur.expect(Tok::LParen, "`(`")?;
            let a1 = cur.action()?;
            cur.expect(Tok::Comma, "`,`")?;
            let a2 = cur.action()?;
            cur.expect(Tok::RParen, "`)`")?;
            cur.expect(Tok::Colon, "`:`")?;
            let mut targets = Vec::new();
            while !cur.at_end() {
                let target = cur.ident("target state")?;
                cur.expect(Tok::Eq, "`=`")?;
                let col = cur.col();
                let num = match cur.next() {
                    Some(Tok::Number(n)) => n.clone(),
                    _ => return Err(syntax(line_no, col, "expected a probability")),
                };
                let p = parse_rational(&num).map_err(|e| syntax(line_no, col, e.to_string()))?;
                targets.push((target, p));
            }
            if targets.is_empty() {
                return Err(syntax(line_no, cur.col(), "transition has no targets"));
            }
            decls.trans.push(RawTrans {
                line: line_no,
                state,
                a1,
                a2,
                targets,
            });
        }
        other => {
            return Err(syntax(line_no, head_col, format!("unknown directive `{other}`")));
        }
    }
    if !cur.at_end() {
        return Err(syntax(line_no, cur.col(), "unexpected trailing input"));
    }
    Ok(())
}

fn index_of(names: &[String], line: usize, kind: &str, name: &str) -> Result<usize, ModelError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| semantic(line, format!("unknown {kind} `{name}`")))
}

fn check_unique(line: usize, kind: &str, names: &[String]) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(semantic(line, format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

/// Parses and validates a `.pgs` model.
pub fn parse_model(text: &str) -> Result<GameStructure, ModelError> {
    let mut decls = Decls::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokenize(line_no, line)?;
        if toks.is_empty() {
            continue;
        }
        parse_line(line_no, &toks, &mut decls, line.chars().count() + 1)?;
    }

    let (sl, states) = decls
        .states
        .ok_or_else(|| semantic(0, "missing `states:` declaration"))?;
    check_unique(sl, "state", &states)?;
    let (pl, props) = decls.props.unwrap_or((0, Vec::new()));
    check_unique(pl, "proposition", &props)?;
    let (al, acts1) = decls
        .acts1
        .ok_or_else(|| semantic(0, "missing `actions1:` declaration"))?;
    check_unique(al, "player-1 action", &acts1)?;
    let (bl, acts2) = decls
        .acts2
        .ok_or_else(|| semantic(0, "missing `actions2:` declaration"))?;
    check_unique(bl, "player-2 action", &acts2)?;
    let init = match &decls.init {
        Some((line, name)) => StateId(index_of(&states, *line, "state", name)?),
        None => StateId(0),
    };

    let mut labels = vec![BTreeSet::new(); states.len()];
    let mut labelled = BTreeSet::new();
    for (line, state, ps) in &decls.labels {
        let s = index_of(&states, *line, "state", state)?;
        if !labelled.insert(s) {
            return Err(semantic(*line, format!("duplicate label for state `{state}`")));
        }
        for p in ps {
            let pid = PropId(index_of(&props, *line, "proposition", p)?);
            if !labels[s].insert(pid) {
                return Err(semantic(*line, format!("proposition `{p}` repeated in label of `{state}`")));
            }
        }
    }

    let mut table: BTreeMap<(StateId, ActionId, ActionId), Row> = BTreeMap::new();
    let mut origin: BTreeMap<(StateId, ActionId, ActionId), usize> = BTreeMap::new();
    for t in &decls.trans {
        let s = StateId(index_of(&states, t.line, "state", &t.state)?);
        let a = ActionId(index_of(&acts1, t.line, "player-1 action", &t.a1)?);
        let b = ActionId(index_of(&acts2, t.line, "player-2 action", &t.a2)?);
        let mut row = Row::new();
        for (target, p) in &t.targets {
            let u = StateId(index_of(&states, t.line, "state", target)?);
            if row.insert(u, p.clone()).is_some() {
                return Err(semantic(
                    t.line,
                    format!("target `{target}` repeated in row ({},{},{})", t.state, t.a1, t.a2),
                ));
            }
        }
        if let Some(prev) = origin.insert((s, a, b), t.line) {
            return Err(semantic(
                t.line,
                format!(
                    "duplicate transition ({},{},{}) (first given on line {prev})",
                    t.state, t.a1, t.a2
                ),
            ));
        }
        table.insert((s, a, b), row);
    }
    for (line, state) in &decls.absorb {
        let s = StateId(index_of(&states, *line, "state", state)?);
        for a in 0..acts1.len() {
            for b in 0..acts2.len() {
                let key = (s, ActionId(a), ActionId(b));
                if let Some(prev) = origin.insert(key, *line) {
                    return Err(semantic(
                        *line,
                        format!(
                            "`absorb {state}` overlaps transition ({state},{},{}) on line {prev}",
                            acts1[a], acts2[b]
                        ),
                    ));
                }
                table.insert(key, Row::from([(s, crate::rational::one())]));
            }
        }
    }

    let g = GameStructure {
        name: decls.name.unwrap_or_else(|| "unnamed".to_string()),
        states,
        init,
        props,
        labels,
        acts1,
        acts2,
        table,
    };
    let violations = validate_model(&g);
    if violations.is_empty() {
        Ok(g)
    } else {
        Err(ModelError::Invalid(violations))
    }
}
