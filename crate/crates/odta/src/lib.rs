//! Ordered-data tree automata over unranked trees with linearly ordered
//! data values.

pub mod automata;
pub mod cli;
pub mod data;
pub mod error;
pub mod frontends;
pub mod gen;
pub mod odta;
pub mod presburger;

pub use error::{Error, Result};
