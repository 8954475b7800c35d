//! On-disk formats: band profiles, symbol grids, sampled matrices and
//! tabulated test functions.

pub mod matrix;
pub mod profile;
pub mod symbol;
pub mod tabulated;

pub use matrix::{read_matrix, write_matrix, MAGIC};
pub use profile::ProfileFile;
pub use symbol::write_symbol_csv;
pub use tabulated::{load_test_function, CubicSpline};
