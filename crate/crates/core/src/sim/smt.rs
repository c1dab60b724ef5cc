use std::fmt::Write as _;

use num_traits::Signed;

use crate::model::{GameStructure, Player, StateId};
use crate::prob::Relation;
use crate::rational::Rational;

fn lit(r: &Rational) -> String {
    let body = if r.is_integer() {
        format!("{}.0", r.numer().abs())
    } else {
        format!("(/ {}.0 {}.0)", r.numer().abs(), r.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn sum(terms: &[String]) -> String {
    match terms.len() {
        0 => "0.0".to_string(),
        1 => terms[0].clone(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

/// An SMT-LIB 2 script (logic NRA) that is satisfiable iff for every
/// player-1 lottery at `s` some lottery at `t` answers it under `r`.
///
/// Variables: `p1_a` (universal lottery at `s`), `x_a` (response at `t`),
/// `l_b_c` (mixture of `s`-successors matched to vertex `b`) and `w_b_u_v`
/// (lifting weights per vertex, one per pair of `r`).
pub fn export_smt(g: &GameStructure, s: StateId, t: StateId, r: &Relation) -> String {
    let n1 = g.acts1.len();
    let n2 = g.acts2.len();
    let mut out = String::new();
    let _ = writeln!(out, "; pair ({}, {})", g.state_name(s), g.state_name(t));
    for (i, name) in g.states.iter().enumerate() {
        let _ = writeln!(out, "; state {i} = {name}");
    }
    for (i, name) in g.acts1.iter().enumerate() {
        let _ = writeln!(out, "; action1 {i} = {name}");
    }
    for (i, name) in g.acts2.iter().enumerate() {
        let _ = writeln!(out, "; action2 {i} = {name}");
    }
    out.push_str("(set-logic NRA)\n");

    let simplex = |vars: &[String]| -> Vec<String> {
        let mut c: Vec<String> = vars.iter().map(|v| format!("(>= {v} 0.0)")).collect();
        c.push(format!("(= {} 1.0)", sum(vars)));
        c
    };

    let p1: Vec<String> = (0..n1).map(|a| format!("p1_{a}")).collect();
    let x: Vec<String> = (0..n1).map(|a| format!("x_{a}")).collect();
    let lam = |b: usize, c: usize| format!("l_{b}_{c}");
    let w = |b: usize, u: StateId, v: StateId| format!("w_{b}_{}_{}", u.0, v.0);

    let mut decls: Vec<String> = x.clone();
    for b in 0..n2 {
        decls.extend((0..n2).map(|c| lam(b, c)));
        decls.extend(r.iter().map(|(u, v)| w(b, u, v)));
    }

    let mut body: Vec<String> = simplex(&x);
    for b in 0..n2 {
        let lams: Vec<String> = (0..n2).map(|c| lam(b, c)).collect();
        body.extend(simplex(&lams));
        body.extend(r.iter().map(|(u, v)| format!("(>= {} 0.0)", w(b, u, v))));
        for v in g.state_ids() {
            let lhs: Vec<String> = r.iter().filter(|p| p.1 == v).map(|(u, v)| w(b, u, v)).collect();
            let rhs: Vec<String> = g
                .action_ids(Player::One)
                .filter_map(|a| g.row(t, a, crate::model::ActionId(b)).get(&v).map(|p| (a, p)))
                .map(|(a, p)| format!("(* {} {})", lit(p), x[a.0]))
                .collect();
            body.push(format!("(= {} {})", sum(&lhs), sum(&rhs)));
        }
        for u in g.state_ids() {
            let lhs: Vec<String> = r.iter().filter(|p| p.0 == u).map(|(u, v)| w(b, u, v)).collect();
            let mut rhs = Vec::new();
            for c in g.action_ids(Player::Two) {
                for a in g.action_ids(Player::One) {
                    if let Some(p) = g.row(s, a, c).get(&u) {
                        rhs.push(format!("(* {} {} {})", lit(p), lam(b, c.0), p1[a.0]));
                    }
                }
            }
            body.push(format!("(= {} {})", sum(&lhs), sum(&rhs)));
        }
    }

    let binders = |vars: &[String]| -> String {
        vars.iter()
            .map(|v| format!("({v} Real)"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "(assert (forall ({})", binders(&p1));
    let _ = writeln!(out, "  (=> (and {})", simplex(&p1).join(" "));
    let _ = writeln!(out, "      (exists ({})", binders(&decls));
    let _ = writeln!(out, "        (and");
    for c in &body {
        let _ = writeln!(out, "          {c}");
    }
    out.push_str("        )))))\n(check-sat)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::parse_model;

    #[test]
    fn declares_expected_variable_count() {
        let g = parse_model(fixtures::RPS).unwrap();
        let r = Relation::identity(&g);
        let script = export_smt(&g, StateId(0), StateId(0), &r);
        let exists = script
            .lines()
            .find(|l| l.trim_start().starts_with("(exists"))
            .unwrap();
        let declared = exists.matches(" Real)").count();
        assert_eq!(declared, 3 + 3 * (3 + r.len()));
        assert!(script.starts_with("; pair (s0, s0)"));
        assert!(script.contains("(set-logic NRA)"));
        assert!(script.trim_end().ends_with("(check-sat)"));
        assert_eq!(script.matches('(').count(), script.matches(')').count());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(lit(&crate::rational::ratio(1, 2)), "(/ 1.0 2.0)");
        assert_eq!(lit(&crate::rational::int(1)), "1.0");
        assert_eq!(lit(&crate::rational::ratio(-3, 4)), "(- (/ 3.0 4.0))");
    }
}
