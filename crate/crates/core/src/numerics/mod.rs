//! Foundation numerics: quadrature rules, Bessel functions, scalar root
//! finding and a dense symmetric generalized eigensolver.

mod bessel;
mod eig;
mod quadrature;
mod roots;

pub use bessel::{bessel_i_scaled, bessel_j};
pub use eig::{sym_generalized_eig, SymMatrix};
pub use quadrature::{gauss_legendre, pairwise_sum, periodic_trapezoid, QuadratureRule};
pub use roots::find_roots;
