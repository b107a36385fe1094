//! Numerical building blocks shared by the physics modules.

pub mod eigen;
pub mod ode;
pub mod roots;

pub use eigen::{hermitian_eigen, EigenDecomposition, HermitianMatrix};
pub use ode::integrate_linear_ode;
pub use roots::find_real_roots;
