//! Exact rational feasibility for small linear systems.
//!
//! A phase-one simplex over a dense tableau of [`Rational`]s. Pivoting follows
//! Bland's rule (lowest-index entering column, lowest-index leaving basic
//! variable on ties) so the search terminates and is deterministic.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relop {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(VarId, Rational)>,
    pub op: Relop,
    pub rhs: Rational,
}

/// Variables with optional rational bounds and linear constraints.
#[derive(Debug, Clone, Default)]
pub struct LinearProblem {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
}

impl LinearProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.vars.len() - 1)
    }

    /// A variable bounded below by zero.
    pub fn nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn add_constraint(&mut self, terms: Vec<(VarId, Rational)>, op: Relop, rhs: Rational) {
        debug_assert!(terms.iter().all(|(v, _)| v.0 < self.vars.len()));
        self.constraints.push(Constraint { terms, op, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Exact check of bounds and constraints.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.vars.len() {
            return false;
        }
        let bounds_ok = self.vars.iter().zip(x).all(|(v, val)| {
            v.lower.as_ref().is_none_or(|l| val >= l) && v.upper.as_ref().is_none_or(|u| val <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.terms.iter().map(|(v, a)| a * &x[v.0]).sum();
                match c.op {
                    Relop::Le => lhs <= c.rhs,
                    Relop::Ge => lhs >= c.rhs,
                    Relop::Eq => lhs == c.rhs,
                }
            })
    }
}

/// How a user variable is expressed over nonnegative tableau columns:
/// `x = offset + sum(coef * y_col)`.
struct Embedding {
    offset: Rational,
    cols: Vec<(usize, Rational)>,
}

/// Decides feasibility exactly. Returns an assignment satisfying every bound
/// and constraint, or `None` when the system is infeasible.
pub fn lp_feasible(p: &LinearProblem) -> Option<Vec<Rational>> {
    let one = Rational::from_integer(1.into());
    let mut ncols = 0usize;
    let mut embed = Vec::with_capacity(p.vars.len());
    // (column, bound) rows generated by finite upper bounds of lower-bounded vars.
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for v in &p.vars {
        match (&v.lower, &v.upper) {
            (Some(l), upper) => {
                if let Some(u) = upper {
                    if u < l {
                        return None;
                    }
                    bound_rows.push((ncols, u - l));
                }
                embed.push(Embedding {
                    offset: l.clone(),
                    cols: vec![(ncols, one.clone())],
                });
                ncols += 1;
            }
            (None, Some(u)) => {
                embed.push(Embedding {
                    offset: u.clone(),
                    cols: vec![(ncols, -one.clone())],
                });
                ncols += 1;
            }
            (None, None) => {
                embed.push(Embedding {
                    offset: Rational::zero(),
                    cols: vec![(ncols, one.clone()), (ncols + 1, -one.clone())],
                });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    // Rows over structural columns, before slacks.
    let mut rows: Vec<(Vec<Rational>, Relop, Rational)> = Vec::new();
    for c in &p.constraints {
        let mut coeffs = vec![Rational::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (v, a) in &c.terms {
            let e = &embed[v.0];
            rhs -= a * &e.offset;
            for (col, k) in &e.cols {
                coeffs[*col] += a * k;
            }
        }
        rows.push((coeffs, c.op, rhs));
    }
    for (col, ub) in bound_rows {
        let mut coeffs = vec![Rational::zero(); structural];
        coeffs[col] = one.clone();
        rows.push((coeffs, Relop::Le, ub));
    }

    // Trivial rows (no coefficients) are decided immediately.
    let mut kept = Vec::with_capacity(rows.len());
    for (coeffs, op, rhs) in rows {
        if coeffs.iter().all(Zero::is_zero) {
            let ok = match op {
                Relop::Le => Rational::zero() <= rhs,
                Relop::Ge => Rational::zero() >= rhs,
                Relop::Eq => rhs.is_zero(),
            };
            if !ok {
                return None;
            }
        } else {
            kept.push((coeffs, op, rhs));
        }
    }
    let rows = kept;
    let m = rows.len();

    let num_slack = rows.iter().filter(|r| r.1 != Relop::Eq).count();
    let slack_base = structural;
    let art_base = structural + num_slack;

    // Decide which rows need an artificial variable.
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut needs_art: Vec<bool> = Vec::with_capacity(m);
    let mut slack_idx = 0usize;
    for (coeffs, op, rhs) in &rows {
        let negate = rhs.is_negative();
        let mut row: Vec<Rational> = Vec::with_capacity(art_base + m + 1);
        for c in coeffs {
            row.push(if negate { -c.clone() } else { c.clone() });
        }
        row.resize(art_base, Rational::zero());
        let mut basic = None;
        if *op != Relop::Eq {
            let sign = if *op == Relop::Le { one.clone() } else { -one.clone() };
            let coef = if negate { -sign } else { sign };
            let col = slack_base + slack_idx;
            slack_idx += 1;
            if coef.is_positive() {
                basic = Some(col);
            }
            row[col] = coef;
        }
        row.resize(art_base + m, Rational::zero());
        row.push(if negate { -rhs.clone() } else { rhs.clone() });
        needs_art.push(basic.is_none());
        basis.push(basic.unwrap_or(usize::MAX));
        tableau.push(row);
    }
    let width = art_base + m;
    for i in 0..m {
        if needs_art[i] {
            tableau[i][art_base + i] = one.clone();
            basis[i] = art_base + i;
        }
    }

    // Phase-one objective: minimise the sum of artificials. Stored as reduced
    // costs over all columns plus the negated objective value in the last slot.
    let mut obj = vec![Rational::zero(); width + 1];
    for i in 0..m {
        if needs_art[i] {
            for j in 0..=width {
                if j < art_base || j == width {
                    let v = tableau[i][j].clone();
                    obj[j] -= v;
                }
            }
        }
    }

    // Entering column: lowest index with negative reduced cost. Artificial
    // columns never re-enter.
    while let Some(enter) = (0..art_base).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            let a = &row[enter];
            if a.is_positive() {
                let ratio = &row[width] / a;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // Unbounded direction in phase one cannot happen: the objective is
            // bounded below by zero.
            unreachable!("phase-one objective is bounded");
        };
        pivot(&mut tableau, &mut obj, r, enter);
        basis[r] = enter;
    }

    if !obj[width].is_zero() {
        return None;
    }

    let mut y = vec![Rational::zero(); width];
    for (i, &b) in basis.iter().enumerate() {
        y[b] = tableau[i][width].clone();
    }
    let x: Vec<Rational> = embed
        .iter()
        .map(|e| {
            let mut v = e.offset.clone();
            for (col, k) in &e.cols {
                v += k * &y[*col];
            }
            v
        })
        .collect();
    debug_assert!(p.satisfied_by(&x), "simplex returned an infeasible point");
    Some(x)
}

fn pivot(tableau: &mut [Vec<Rational>], obj: &mut [Rational], r: usize, c: usize) {
    let pv = tableau[r][c].clone();
    for v in tableau[r].iter_mut() {
        if !v.is_zero() {
            *v /= &pv;
        }
    }
    let prow = tableau[r].clone();
    for (i, row) in tableau.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pvj) in row.iter_mut().zip(&prow) {
            if !pvj.is_zero() {
                *v -= &f * pvj;
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, pvj) in obj.iter_mut().zip(&prow) {
            if !pvj.is_zero() {
                *v -= &f * pvj;
            }
        }
    }
}
