use std::collections::BTreeSet;
use std::fmt;

use crate::rational::{fmt_rational, Rational};

/// A formula of the distribution logic with fixpoints.
///
/// `true` is the empty conjunction and `false` the empty disjunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    NegProp(String),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Player 1 can enforce the body in one step.
    Enforce(Box<Formula>),
    /// Split with fixed positive weights summing to one.
    ProbSum(Vec<(Rational, Formula)>),
    /// Split with weights chosen freely.
    Mix(Vec<Formula>),
    Var(String),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn prop(p: impl Into<String>) -> Self {
        Formula::Prop(p.into())
    }

    pub fn neg_prop(p: impl Into<String>) -> Self {
        Formula::NegProp(p.into())
    }

    /// Conjunction; a single conjunct is returned unwrapped.
    pub fn and(mut parts: Vec<Formula>) -> Self {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    /// Disjunction; a single disjunct is returned unwrapped.
    pub fn or(mut parts: Vec<Formula>) -> Self {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        }
    }

    pub fn enforce(body: Formula) -> Self {
        Formula::Enforce(Box::new(body))
    }

    pub fn mu(var: impl Into<String>, body: Formula) -> Self {
        Formula::Mu(var.into(), Box::new(body))
    }

    pub fn nu(var: impl Into<String>, body: Formula) -> Self {
        Formula::Nu(var.into(), Box::new(body))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Or(v) if v.is_empty())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(_) | Formula::NegProp(_) => {}
            Formula::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Formula::And(v) | Formula::Or(v) | Formula::Mix(v) => {
                v.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::ProbSum(v) => v.iter().for_each(|(_, f)| f.collect_free(bound, out)),
            Formula::Enforce(b) => b.collect_free(bound, out),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_fixpoint(&self) -> bool {
        match self {
            Formula::Mu(..) | Formula::Nu(..) | Formula::Var(_) => true,
            Formula::Prop(_) | Formula::NegProp(_) => false,
            Formula::And(v) | Formula::Or(v) | Formula::Mix(v) => v.iter().any(Formula::has_fixpoint),
            Formula::ProbSum(v) => v.iter().any(|(_, f)| f.has_fixpoint()),
            Formula::Enforce(b) => b.has_fixpoint(),
        }
    }

    /// Literals, conjunctions and disjunctions of literals.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Prop(_) | Formula::NegProp(_) => true,
            Formula::And(v) | Formula::Or(v) => v.iter().all(Formula::is_propositional),
            _ => false,
        }
    }

    /// Nesting depth of `<1>`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::NegProp(_) | Formula::Var(_) => 0,
            Formula::And(v) | Formula::Or(v) | Formula::Mix(v) => {
                v.iter().map(Formula::modal_depth).max().unwrap_or(0)
            }
            Formula::ProbSum(v) => v.iter().map(|(_, f)| f.modal_depth()).max().unwrap_or(0),
            Formula::Enforce(b) => 1 + b.modal_depth(),
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.modal_depth(),
        }
    }

    /// Replaces free occurrences of `var` by `with`. `with` must be closed.
    pub fn substitute(&self, var: &str, with: &Formula) -> Formula {
        match self {
            Formula::Var(v) if v == var => with.clone(),
            Formula::Prop(_) | Formula::NegProp(_) | Formula::Var(_) => self.clone(),
            Formula::And(v) => Formula::And(v.iter().map(|f| f.substitute(var, with)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|f| f.substitute(var, with)).collect()),
            Formula::Mix(v) => Formula::Mix(v.iter().map(|f| f.substitute(var, with)).collect()),
            Formula::ProbSum(v) => Formula::ProbSum(
                v.iter()
                    .map(|(p, f)| (p.clone(), f.substitute(var, with)))
                    .collect(),
            ),
            Formula::Enforce(b) => Formula::enforce(b.substitute(var, with)),
            Formula::Mu(x, _) | Formula::Nu(x, _) if x == var => self.clone(),
            Formula::Mu(x, b) => Formula::mu(x.clone(), b.substitute(var, with)),
            Formula::Nu(x, b) => Formula::nu(x.clone(), b.substitute(var, with)),
        }
    }
}

/// The `m`-th approximant of a fixpoint formula: `mu^0 = false`,
/// `nu^0 = true`, and `f^{i+1} = body[Z := f^i]`. Other formulas are
/// returned unchanged.
pub fn unfold_fixpoint(phi: &Formula, m: usize) -> Formula {
    let (var, body, mut acc) = match phi {
        Formula::Mu(x, b) => (x, b, Formula::bottom()),
        Formula::Nu(x, b) => (x, b, Formula::top()),
        _ => return phi.clone(),
    };
    for _ in 0..m {
        acc = body.substitute(var, &acc);
    }
    acc
}

/// Syntactic certificate of a convex denotation: literals, conjunction and
/// both splitting operators only.
pub fn convex_safe(phi: &Formula) -> bool {
    match phi {
        Formula::Prop(_) | Formula::NegProp(_) => true,
        Formula::And(v) | Formula::Mix(v) => v.iter().all(convex_safe),
        Formula::ProbSum(v) => v.iter().all(|(_, f)| convex_safe(f)),
        Formula::Or(_) | Formula::Enforce(_) | Formula::Var(_) | Formula::Mu(..) | Formula::Nu(..) => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Extends to a closing delimiter.
    Open,
    /// Operand of `|`.
    Disjunct,
    /// Operand of `&`.
    Conjunct,
    /// Operand of a prefix operator.
    Prefix,
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, ctx: Ctx) -> fmt::Result {
    match phi {
        Formula::Prop(p) => f.write_str(p),
        Formula::NegProp(p) => write!(f, "!{p}"),
        Formula::Var(v) => f.write_str(v),
        Formula::And(v) if v.is_empty() => f.write_str("true"),
        Formula::Or(v) if v.is_empty() => f.write_str("false"),
        Formula::And(v) => {
            let paren = matches!(ctx, Ctx::Conjunct | Ctx::Prefix);
            if paren {
                f.write_str("(")?;
            }
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(" & ")?;
                }
                write_formula(f, c, Ctx::Conjunct)?;
            }
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        Formula::Or(v) => {
            let paren = ctx != Ctx::Open;
            if paren {
                f.write_str("(")?;
            }
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                write_formula(f, c, Ctx::Disjunct)?;
            }
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        Formula::Enforce(b) => {
            f.write_str("<1> ")?;
            write_formula(f, b, Ctx::Prefix)
        }
        Formula::ProbSum(v) => {
            f.write_str("sum{")?;
            for (i, (p, c)) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}: ", fmt_rational(p))?;
                write_formula(f, c, Ctx::Open)?;
            }
            f.write_str("}")
        }
        Formula::Mix(v) => {
            f.write_str("mix{")?;
            for (i, c) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_formula(f, c, Ctx::Open)?;
            }
            f.write_str("}")
        }
        Formula::Mu(x, b) | Formula::Nu(x, b) => {
            let kw = if matches!(phi, Formula::Mu(..)) { "mu" } else { "nu" };
            let paren = ctx != Ctx::Open;
            if paren {
                f.write_str("(")?;
            }
            write!(f, "{kw} {x}. ")?;
            write_formula(f, b, Ctx::Open)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, Ctx::Open)
    }
}
