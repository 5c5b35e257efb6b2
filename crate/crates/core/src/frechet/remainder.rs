//! Taylor remainders `R_k(b) = f(a + b) - sum_{j<k} D^j f(a)[b..b] / j!`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::ComplexDenseMatrix;
use crate::moi::{moi_evaluate, MoiOperands, MoiSymbol};
use crate::scalar::{factorial, gauss_legendre_unit, ScalarFunction};
use crate::spectral::{functional_calculus, hermitian_eigendecompose};

use super::{matrix_function_derivative, DerivativeRequest, DerivativeStrategy};

fn check(k: usize, a: &ComplexDenseMatrix, b: &ComplexDenseMatrix) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "remainder order must be at least 1".into(),
        ));
    }
    a.check_same_dim(b)?;
    a.ensure_hermitian()?;
    b.ensure_hermitian()
}

/// Remainder from the definition, derivatives by the MOI formula.
pub fn taylor_remainder_direct(
    f: &ScalarFunction,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
) -> Result<ComplexDenseMatrix> {
    taylor_remainder_direct_with(f, k, a, b, DerivativeStrategy::Moi)
}

pub fn taylor_remainder_direct_with(
    f: &ScalarFunction,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
    strategy: DerivativeStrategy,
) -> Result<ComplexDenseMatrix> {
    check(k, a, b)?;
    let shifted = a + b;
    let mut r = &functional_calculus(f, &hermitian_eigendecompose(&shifted, None)?)?
        - &functional_calculus(f, &hermitian_eigendecompose(a, None)?)?;
    for j in 1..k {
        let req = DerivativeRequest::new(f.clone(), a.clone(), vec![b.clone(); j])
            .with_strategy(strategy);
        let d = matrix_function_derivative(&req)?;
        r.axpy(num_complex::Complex64::new(-1.0 / factorial(j), 0.0), &d);
    }
    Ok(r)
}

/// `(I^{a+b, a, .., a} f^[k])[b, .., b]`.
pub fn taylor_remainder_moi(
    f: &ScalarFunction,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
) -> Result<ComplexDenseMatrix> {
    check(k, a, b)?;
    f.require_order(k)?;
    let first = Arc::new(hermitian_eigendecompose(&(a + b), None)?);
    let rest = Arc::new(hermitian_eigendecompose(a, None)?);
    let mut decomps = vec![first];
    decomps.extend(std::iter::repeat_n(rest, k));
    let ops = MoiOperands::new(decomps, vec![b.clone(); k])?;
    moi_evaluate(&MoiSymbol::divided_difference(f, k), &ops)
}

/// `k int_0^1 (1-t)^{k-1} (I^{a+tb, .., a+tb} f^[k])[b, .., b] dt` by a
/// `steps`-point Gauss-Legendre rule.
pub fn taylor_remainder_integral(
    f: &ScalarFunction,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
    steps: usize,
) -> Result<ComplexDenseMatrix> {
    check(k, a, b)?;
    f.require_order(k)?;
    if steps == 0 {
        return Err(Error::InvalidInput(
            "quadrature needs at least one point".into(),
        ));
    }
    let sym = MoiSymbol::divided_difference(f, k);
    let (ts, ws) = gauss_legendre_unit(steps);
    let mut total = ComplexDenseMatrix::zeros(a.n());
    for (&t, &w) in ts.iter().zip(&ws) {
        let mut point = a.clone();
        point.axpy(num_complex::Complex64::new(t, 0.0), b);
        let d = Arc::new(hermitian_eigendecompose(&point, None)?);
        let value = moi_evaluate(&sym, &MoiOperands::uniform(d, vec![b.clone(); k])?)?;
        let weight = w * k as f64 * (1.0 - t).powi(k as i32 - 1);
        total.axpy(num_complex::Complex64::new(weight, 0.0), &value);
    }
    Ok(total)
}
