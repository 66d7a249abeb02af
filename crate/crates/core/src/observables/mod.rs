//! Quantities plotted against time: entanglement, field and site
//! statistics, spatial moments, and the named observable sets recorded by
//! the propagators.

mod measures;
mod set;

pub use measures::{
    field_statistics, mixed_negativity, negativity, site_statistics, spatial_statistics,
    FieldStatistics, MotionBasis, SiteStatistics, SpatialStatistics,
};
pub use set::{Observable, ObservableKind, ObservableSet};
