//! Discharges exported scripts with z3 through its Python bindings, when
//! they are installed. Skips otherwise.

use std::io::Write;
use std::process::{Command, Stdio};

use pags_core::fixtures;
use pags_core::model::parse_model;
use pags_core::prob::Relation;
use pags_core::sim::{export_smt, initial_relation};

// Neither z3's default strategy nor its `qe2` quantifier elimination
// decides every script on its own; try both.
const RUNNER: &str = r#"
import sys, z3
fs = z3.parse_smt2_string(sys.stdin.read())
r = z3.unknown
for s, ms in ((z3.Solver(), 5000), (z3.Tactic('qe2').solver(), 30000)):
    s.set('timeout', ms)
    s.add(fs)
    r = s.check()
    if r != z3.unknown:
        break
print(r)
"#;

fn z3_available() -> bool {
    Command::new("python3")
        .args(["-c", "import z3"])
        .stderr(Stdio::null())
        .status()
        .is_ok_and(|s| s.success())
}

fn solve(script: &str) -> String {
    let mut child = Command::new("python3")
        .args(["-c", RUNNER])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    String::from_utf8(out.stdout).unwrap().trim().to_string()
}

#[test]
fn reflexive_rps_pair_is_sat() {
    if !z3_available() {
        eprintln!("z3 not installed; skipping");
        return;
    }
    let g = parse_model(fixtures::RPS).unwrap();
    let s0 = g.state_id("s0").unwrap();
    let script = export_smt(&g, s0, s0, &Relation::identity(&g));
    assert_eq!(solve(&script), "sat");
}

#[test]
fn asymmetric_pair_is_unsat() {
    if !z3_available() {
        eprintln!("z3 not installed; skipping");
        return;
    }
    let src = "states: s t good bad\nprops: ok\nlabel good: ok\nactions1: a b\nactions2: c\n\
               trans s (a,c): good=1\ntrans s (b,c): bad=1\n\
               trans t (a,c): bad=1\ntrans t (b,c): bad=1\nabsorb good\nabsorb bad\n";
    let g = parse_model(src).unwrap();
    let (s, t) = (g.state_id("s").unwrap(), g.state_id("t").unwrap());
    let r = initial_relation(&g);
    assert_eq!(solve(&export_smt(&g, s, t, &r)), "unsat");
    assert_eq!(solve(&export_smt(&g, t, s, &r)), "sat");
}

#[test]
fn exact_condition_rejects_pair_kept_by_coarse_grid() {
    if !z3_available() {
        eprintln!("z3 not installed; skipping");
        return;
    }
    let g = parse_model(fixtures::MIXOBS).unwrap();
    let (u, v) = (g.state_id("u").unwrap(), g.state_id("v").unwrap());
    let mut r = Relation::identity(&g);
    r.insert(u, v);
    assert_eq!(solve(&export_smt(&g, u, v, &r)), "unsat");
}
