//! Dense complex linear algebra, generic over the real scalar type.

mod eigen;
mod lu;
mod matrix;
mod norms;
mod svd;

pub use eigen::{
    eigenvalues, eigenvalues_with, hessenberg_qr, reduce_to_hessenberg, EigenOptions,
    DEFAULT_MAX_DIM,
};
pub use lu::{lu_log_abs_det, solve, Lu};
pub use matrix::{vec_norm, DenseMatrix};
pub use norms::{
    operator_norm_estimate, operator_norm_estimate_with, smallest_singular_value,
    smallest_singular_value_lu, smallest_singular_value_with,
};
pub use svd::{singular_values, svd, Svd};
