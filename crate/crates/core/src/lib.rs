//! Zonal spherical functions on the complex Grassmannians
//! `SU(p+q)/S(U(p)xU(q))` and the spectral series of convolution powers of
//! their orbital measures.

pub mod bounds;
pub mod cli;
pub mod jacobi;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod space;
pub mod spherical;
