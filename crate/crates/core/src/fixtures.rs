//! Models, relations and formula suites shipped with the crate.

pub const RPS: &str = include_str!("../fixtures/rps.pgs");
pub const LIFT: &str = include_str!("../fixtures/lift.pgs");
pub const LIFT_REL: &str = include_str!("../fixtures/lift.rel");
pub const LIFT_SPARSE_REL: &str = include_str!("../fixtures/lift_sparse.rel");
pub const HALFWAY: &str = include_str!("../fixtures/halfway.pgs");
/// A state `u` and a verbatim copy `u2`.
pub const DUP: &str = include_str!("../fixtures/dup.pgs");
/// A state whose mixed play cannot be matched by a fixed coin flip.
pub const MIXOBS: &str = include_str!("../fixtures/mixobs.pgs");

pub const RPS_SUITE: &str = include_str!("../fixtures/rps.phi");
pub const HALFWAY_SUITE: &str = include_str!("../fixtures/halfway.phi");
pub const DUP_SUITE: &str = include_str!("../fixtures/dup.phi");
pub const FUTURES_SUITE: &str = include_str!("../fixtures/futures.phi");

pub const MODELS: [(&str, &str); 5] = [
    ("rps", RPS),
    ("lift", LIFT),
    ("halfway", HALFWAY),
    ("dup", DUP),
    ("mixobs", MIXOBS),
];

/// Non-empty, non-comment lines of a formula suite.
pub fn suite_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}
