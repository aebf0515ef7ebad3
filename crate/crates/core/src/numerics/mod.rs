//! Numerical kernels shared by the rest of the crate: bracketed root search,
//! Gauss–Legendre rules, the discrete Fourier transform and a dense
//! Hermitian eigensolver.

mod eigen;
mod fft;
mod quadrature;
mod roots;

pub use eigen::{
    hermitian_eigenvalues, symmetric_tridiagonal_eigenvalues, EigenDecomposition, HermitianMatrix,
    DEFAULT_HERMITIAN_TOL,
};
pub use fft::{fft_forward, fft_inverse};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use roots::{find_root_bracketed, RootFinder};
