//! Witness search and exact partition numbers.

pub mod exact;
pub mod find;
pub mod instance;

pub use exact::{exact_number, exact_size, Certificate, SearchOptions, SearchStats, SizeOutcome, SizeRecord};
pub use find::*;
pub use instance::{CertColoring, Instance, NumberKind};
