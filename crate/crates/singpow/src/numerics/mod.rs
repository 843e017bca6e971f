//! Precision-agnostic numeric substrate: quadrature rule generation, a dense
//! symmetric eigensolver at extended precision, a double-precision SVD (real
//! and complex through one generic code path), and bracketed root finding.

pub(crate) mod cpow;
mod eig;
mod quad;
mod roots;
mod svd;

pub use eig::{sym_eig, sym_eig_values, SymEigResult};
pub use quad::{gauss_legendre, QuadRule};
pub use roots::find_roots;
pub use svd::{svd_double, Scalar, SvdResult};
