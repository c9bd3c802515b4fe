//! Word automata, unranked tree automata, letter-to-letter transducers and
//! periodic languages.

pub mod bitset;
pub mod format;
pub mod nfa;
pub mod periodic;
pub mod transducer;
pub mod tree_automaton;

pub use bitset::BitSet;
pub use nfa::Nfa;
pub use periodic::{PeriodicLanguageUnion, PeriodicTuple};
pub use transducer::{Outputs, TreeTransducer, DEFAULT_OUTPUT_BUDGET};
pub use tree_automaton::TreeAutomaton;
