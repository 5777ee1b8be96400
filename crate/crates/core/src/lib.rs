pub mod domains;
pub mod error;
pub mod experiments;
pub mod grushin;
pub mod linalg;
pub mod operators;
pub mod quasimode;
pub mod randmat;
pub mod scalar;
pub mod symbol;
pub mod symparse;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use operators::OperatorSpec;
pub use symbol::LaurentSymbol;

/// Double-precision complex scalar used throughout the symbol and operator code.
pub type C64 = Complex<f64>;
/// Double-precision dense complex matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
