//! Formulas over distributions with a strategy modality, weighted and free
//! splits, and fixpoints.

mod charform;
mod eval;
mod formula;
mod parse;

pub use charform::{char_formula_dist, char_formula_state, logic_preorder, phi0_state};
pub use eval::{
    enforce_check, eval, mix_check, split_check, EvalError, EvalOptions, EvalResult, Evaluator, Evidence, Verdict,
};
pub use formula::{convex_safe, unfold_fixpoint, Formula};
pub use parse::{parse_formula, parse_open_formula, FormulaError};
