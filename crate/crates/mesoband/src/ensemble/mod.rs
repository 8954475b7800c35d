//! Band matrices `H = √S · A` and their nonbacktracking powers.

mod dense;
mod matrix;
mod nonbacktracking;

pub use dense::DenseMatrix;
pub use matrix::{BandMatrix, Beta, DENSE_LIMIT};
pub use nonbacktracking::{chebyshev_nb, nb_vector_stream, nonbacktracking_direct, NbStream, DIRECT_MAX_ORDER};
