use num_traits::{One, Signed, Zero};

use super::formula::Formula;
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula error at column {col}: {message}")]
pub struct FormulaError {
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Slash,
    Bang,
    Amp,
    Bar,
    Enforce,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    End,
}

const KEYWORDS: [&str; 7] = ["true", "false", "mu", "nu", "sum", "mix", "frag"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '/' => Some(Tok::Slash),
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c == '<' {
            if chars.get(i + 1) == Some(&'1') && chars.get(i + 2) == Some(&'>') {
                out.push((Tok::Enforce, col));
                i += 3;
            } else {
                return Err(FormulaError {
                    col,
                    message: "expected `<1>`".to_string(),
                });
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                return Err(FormulaError {
                    col,
                    message: "decimal weights are not allowed, write them as fractions".to_string(),
                });
            }
            out.push((Tok::Number(chars[start..i].iter().collect()), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(FormulaError {
                col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

fn is_var(name: &str) -> bool {
    name.chars().next().is_some_and(char::is_uppercase)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError {
            col: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or(parts))
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Enforce => {
                self.bump();
                Ok(Formula::enforce(self.unary()?))
            }
            Tok::Bang => {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(p) if !KEYWORDS.contains(&p.as_str()) && !is_var(&p) => {
                        self.bump();
                        Ok(Formula::NegProp(p))
                    }
                    _ => self.err("negation is only allowed on atomic propositions"),
                }
            }
            Tok::Ident(k) if k == "mu" || k == "nu" => {
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if is_var(&v) => v,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected an uppercase fixpoint variable");
                    }
                };
                self.expect(Tok::Dot, "`.` after the fixpoint variable")?;
                let body = self.or()?;
                Ok(if k == "mu" {
                    Formula::mu(var, body)
                } else {
                    Formula::nu(var, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn rational(&mut self) -> Result<Rational, FormulaError> {
        let col = self.col();
        let Tok::Number(n) = self.bump() else {
            self.pos -= 1;
            return self.err("expected a weight");
        };
        let mut text = n;
        if *self.peek() == Tok::Slash {
            self.bump();
            let Tok::Number(d) = self.bump() else {
                self.pos -= 1;
                return self.err("expected a denominator");
            };
            text = format!("{text}/{d}");
        }
        parse_rational(&text).map_err(|e| FormulaError {
            col,
            message: e.to_string(),
        })
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        let col = self.col();
        match self.bump() {
            Tok::LParen => {
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => Ok(Formula::top()),
            Tok::Ident(k) if k == "false" => Ok(Formula::bottom()),
            Tok::Ident(k) if k == "sum" => {
                self.expect(Tok::LBrace, "`{` after `sum`")?;
                let mut parts = Vec::new();
                loop {
                    let wcol = self.col();
                    let w = self.rational()?;
                    if !w.is_positive() {
                        return Err(FormulaError {
                            col: wcol,
                            message: format!("weight {} is not positive", fmt_rational(&w)),
                        });
                    }
                    self.expect(Tok::Colon, "`:` after a weight")?;
                    parts.push((w, self.or()?));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`}`")?;
                let total: Rational = parts.iter().map(|(w, _)| w.clone()).sum();
                if !total.is_one() {
                    return Err(FormulaError {
                        col,
                        message: format!("weights sum to {}, not 1", fmt_rational(&total)),
                    });
                }
                Ok(Formula::ProbSum(parts))
            }
            Tok::Ident(k) if k == "mix" => {
                self.expect(Tok::LBrace, "`{` after `mix`")?;
                let mut parts = vec![self.or()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    parts.push(self.or()?);
                }
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Formula::Mix(parts))
            }
            Tok::Ident(k) if k == "frag" => {
                self.expect(Tok::LBrace, "`{` after `frag`")?;
                let wcol = self.col();
                let a = self.rational()?;
                if !a.is_positive() || a > Rational::one() {
                    return Err(FormulaError {
                        col: wcol,
                        message: format!("fragment weight {} is not in (0, 1]", fmt_rational(&a)),
                    });
                }
                self.expect(Tok::Colon, "`:` after a weight")?;
                let body = self.or()?;
                self.expect(Tok::RBrace, "`}`")?;
                let rest = Rational::one() - &a;
                let mut parts = vec![(a, body)];
                if !rest.is_zero() {
                    parts.push((rest, Formula::top()));
                }
                Ok(Formula::ProbSum(parts))
            }
            Tok::Ident(k) if KEYWORDS.contains(&k.as_str()) => Err(FormulaError {
                col,
                message: format!("unexpected keyword `{k}`"),
            }),
            Tok::Ident(name) if is_var(&name) => Ok(Formula::Var(name)),
            Tok::Ident(name) => Ok(Formula::Prop(name)),
            Tok::End => Err(FormulaError {
                col,
                message: "unexpected end of formula".to_string(),
            }),
            t => Err(FormulaError {
                col,
                message: format!("unexpected {}", describe(&t)),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Ident(_) => "identifier",
        Tok::Number(_) => "number",
        Tok::Slash => "`/`",
        Tok::Bang => "`!`",
        Tok::Amp => "`&`",
        Tok::Bar => "`|`",
        Tok::Enforce => "`<1>`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::LBrace => "`{`",
        Tok::RBrace => "`}`",
        Tok::Colon => "`:`",
        Tok::Comma => "`,`",
        Tok::Dot => "`.`",
        Tok::End => "end of formula",
    }
}

/// Parses a formula that may contain free fixpoint variables.
pub fn parse_open_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {} after formula", describe(p.peek())));
    }
    Ok(f)
}

/// Parses a closed formula. `frag{a: f}` is expanded to
/// `sum{a: f, 1-a: true}`.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let f = parse_open_formula(text)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(FormulaError {
            col: text.find(v.as_str()).map_or(1, |i| text[..i].chars().count() + 1),
            message: format!("unbound variable `{v}`"),
        });
    }
    Ok(f)
}
