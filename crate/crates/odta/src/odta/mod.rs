//! ODTA and weak ODTA: membership, closure constructions, zonal conversion
//! and emptiness.

pub mod brute;
pub mod bundle;
pub mod closure;
pub mod full_empty;
pub mod member;
pub mod model;
pub mod oracle;
pub mod verdict;
pub mod weak_empty;
pub mod zonal;

pub use bundle::{parse_bundle, write_bundle, Bundle};
pub use brute::{brute_force_odta, brute_force_weak, rank_vectors};
pub use closure::{odta_intersect, odta_union, weak_intersect, weak_union};
pub use member::{member_odta, member_weak, member_weak_ext, member_zonal, Membership, DEFAULT_MEMBER_BUDGET};
pub use model::{class_key, label_key, zonal_key, ExtendedWeakOdta, Odta, WeakOdta, ZonalOdta};
pub use oracle::{member_odta_exhaustive, member_weak_exhaustive, member_zonal_exhaustive};
pub use zonal::{covers, zonal_convert, DEFAULT_ZONE_CAP};
pub mod fixtures;
pub use verdict::{Certificate, EmptinessCaps, EmptinessReport, EmptinessVerdict};
pub use weak_empty::{empty_weak, empty_weak_ext, encode_weak, extended_automaton};
pub use full_empty::{empty_odta, free_threshold, guess_bundles, k_param, published_threshold, GuessBundle};
