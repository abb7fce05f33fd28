//! Exact search, constructive extraction pipelines and bound arithmetic for
//! partition theorems of Hales-Jewett type.
//!
//! Words of length `m` over an alphabet `{0, .., k-1}` are ranked
//! little-endian: position 0 is the least significant digit.

pub mod bounds;
pub mod coloring;
pub mod equiv;
pub mod error;
pub mod pipelines;
pub mod search;
pub mod space;
pub mod subsets;

pub use bounds::{BigBound, BoundConfig, WValue};
pub use coloring::{make_coloring, tuple_coloring, Coloring, ColoringFile, Family};
pub use equiv::{EquivKind, Perm, PermGroup};
pub use error::{Error, Result};
pub use search::{exact_number, Certificate, NumberKind, SearchOptions};
pub use space::{GridBound, GridPattern, Line, PartialWord, Space, Subspace, Word};
pub use subsets::SubsetColoring;
