//! Reductions into weak ODTAs: DTDs with integrity constraints, set and
//! linear constraints over data terms, and text automata.

pub mod dtd;
pub mod oracle;
pub mod regex;
pub mod setlinear;
pub mod terms;
pub mod text;

pub use dtd::{dtd_sat, dtd_to_weak_odta, parse_dtd, Dtd, SatReport, SatVerdict};
pub use regex::{parse_regex, Regex};
pub use setlinear::{setlin_sat, setlinear_to_odta};
pub use terms::{
    parse_constraints, parse_term, sterm_family, write_constraints, Constraint, DataTerm, IntegrityConstraint, LinVar,
    LinearConstraint, SetConstraint,
};
pub use text::{msp, text_automaton_to_weak_odta, Mark, TextAutomaton};
