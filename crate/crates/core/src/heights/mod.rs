//! Naive, canonical and local heights.

pub mod c1;
pub mod canonical;
pub mod decomposition;
pub mod local;
pub mod naive;
pub mod qseries;

pub use c1::{c1_bound, C1Mode, C1Report, C1Sample, SampleConfig};
pub use canonical::{canonical_height_doubling, height_difference_bound, DoublingConfig, DoublingHeight};
pub use decomposition::{height_decomposition, DecompositionConfig, HeightDecomposition};
pub use local::{local_height_archimedean, local_height_finite, HeightMethod, LocalHeightValue, Place, PlaceKind};
pub use naive::naive_height;
pub use qseries::{archimedean_lower_bound, c2_constant, log_inverse_q_from_j, qseries_evaluate, QseriesMode, TateParameters};
