//! Complex polynomial arithmetic, root finding, small dense complex matrices
//! with adjugates, and divided-difference tables.

mod divdiff;
mod matrix;
mod poly;
mod roots;

pub use divdiff::{check_separation, divided_difference, divided_differences, DividedTable};
pub use matrix::{faddeev_leverrier, CMatrix};
pub use poly::Poly;
pub use roots::{hessenberg_eigenvalues, poly_roots};
