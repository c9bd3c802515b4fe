//! Ordered-data trees and the views derived from them.

pub mod alphabet;
pub mod format;
pub mod graph;
pub mod profile;
pub mod strtree;
pub mod tree;
pub mod values;
pub mod zones;

pub use alphabet::{Alphabet, LabelSet};
pub use format::{parse_string_tree, parse_tree, write_string_tree, write_tree};
pub use graph::{recolor_data_graph, DataGraph};
pub use profile::{profile, ProfileTree, ProfileTriple, Rel};
pub use strtree::{prefix_tree_representation, BitString, PrefixTree, StringDataTree};
pub use tree::{DataTree, Nested, OrderedDataTree, Shape};
pub use values::{canonical_rank, string_representation, value_classes, ValueClasses, ValueWord};
pub use zones::{zonal_string_representation, zones, ZonalSymbol, ZonalValueWord, Zone, ZonePartition};
