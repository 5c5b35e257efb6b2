//! Divided differences, finite-dimensional multiple operator integrals (MOIs)
//! and higher Fréchet derivatives of functions of Hermitian matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`]: scalar functions, divided differences `f^[k]` by closed
//!   form, recursion, simplex quadrature and Fourier atoms, plus computable
//!   upper bounds.
//! * [`spectral`]: Jacobi eigendecomposition into spectral projections and
//!   the functional calculus `f(A) = sum f(l) P_l`.
//! * [`moi`]: the spectral sum `sum phi(l) P_{l_1} B_1 ... B_k P_{l_{k+1}}`
//!   and its separated, polynomial and Fourier evaluations.
//! * [`frechet`]: `D^k f(A)[B_1..B_k]`, Taylor remainders and Schatten norms.
//! * [`suite`]: seeded verification suites producing [`VerificationReport`]s.

pub mod error;
pub mod frechet;
pub mod matrix;
pub mod moi;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod suite;
pub mod tolerances;

pub use error::{Error, Result};
pub use matrix::{ComplexDenseMatrix, MatrixFile};
pub use num_complex::Complex64;
pub use report::{CheckRecord, VerificationReport};
pub use rng::CounterRng;
pub use scalar::{
    CallableFunction, FunctionSpec, MultiIndex, MultivariatePolynomial, NodeTuple, Polynomial,
    ScalarFunction, SimplexQuadratureRule, WienerAtomic,
};
pub use spectral::{
    functional_calculus, hermitian_eigendecompose, SpectralCluster, SpectralDecomposition,
};
pub use tolerances::Tolerances;
