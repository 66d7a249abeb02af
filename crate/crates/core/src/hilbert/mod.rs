//! Tensor-product Hilbert spaces, sparse operators, pure and mixed states.

mod linalg;
mod operator;
mod space;
mod state;

pub(crate) use linalg::{bipartite_amplitudes, schmidt_values};
pub use linalg::{
    hermitian_eigen, hermitian_spectrum, partial_trace, partial_transpose, schmidt_coefficients,
    HERMITIAN_TOL,
};
pub use operator::{create, destroy, level_projector, number, tensor_product_op, SparseOperator};
pub use space::HilbertSpace;
pub(crate) use state::norm_sqr;
pub use state::{
    coherent_state, coherent_state_on, coherent_state_with_tolerance, expectation_value,
    DensityMatrix, QuantumState, StateVector, COHERENT_TRUNCATION_TOL, NORM_TOL,
};
