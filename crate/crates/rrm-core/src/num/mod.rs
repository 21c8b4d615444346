//! Numerical kernels: special functions, quadrature, root finding, optimization.

pub mod bessel;
pub mod brent;
pub mod nelder_mead;
pub mod quad;
pub mod student_t;
