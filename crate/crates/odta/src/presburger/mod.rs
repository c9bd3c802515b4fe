pub mod formula;
pub mod key;
pub mod lp;
pub mod parikh;
pub mod rational;
pub mod smtlib;
pub mod solver;

pub use formula::{Assignment, Cmp, Formula, Linear, PresburgerFormula};
pub use key::{Family, Key};
pub use solver::{solve, Budget, Solution, Stats, Verdict, DEFAULT_BUDGET};
pub use parikh::{
    decode_tree, decode_word, parikh_formula_nfa, parikh_formula_ta, periodic_to_formula, symbol_key, DecodedTree,
    Grammar, NfaEncoding, Production, TreeEncoding,
};
