pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod models;
pub mod observables;

pub use error::{Error, Result};
pub use num_complex::Complex64;
