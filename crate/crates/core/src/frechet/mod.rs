//! Higher Fréchet derivatives of `A -> f(A)` on Hermitian matrices.
//!
//! `D^k f(A)[B_1..B_k] = sum_{pi in S_k} (I^{A..A} f^[k])[B_pi(1)..B_pi(k)]`,
//! cross-checked against the power-map formula and tensor finite differences.

mod remainder;
mod schatten;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexDenseMatrix;
use crate::moi::{moi_evaluate, moi_polynomial_matrices, MoiOperands, MoiSymbol};
use crate::scalar::ScalarFunction;
use crate::spectral::{
    functional_calculus, hermitian_eigendecompose, operator_norm, SpectralDecomposition,
};

pub use remainder::{
    taylor_remainder_direct, taylor_remainder_direct_with, taylor_remainder_integral,
    taylor_remainder_moi,
};
pub use schatten::{
    moi_schatten_check, moi_schatten_check_with_slack, remainder_radius, remainder_schatten_check,
    remainder_schatten_check_with_slack, schatten_norm, SchattenSpec,
};

/// Default finite-difference step before scaling by `1 + ||A||`.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeStrategy {
    Moi,
    FiniteDifference,
    PowerClosedForm,
}

impl FromStr for DerivativeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moi" => Ok(Self::Moi),
            "fd" | "finite_difference" => Ok(Self::FiniteDifference),
            "power" | "power_closed_form" => Ok(Self::PowerClosedForm),
            other => Err(Error::Parse(format!(
                "unknown strategy `{other}` (expected moi, fd or power)"
            ))),
        }
    }
}

/// `D^k f(A)[B_1..B_k]` with `k = directions.len()`.
#[derive(Debug, Clone)]
pub struct DerivativeRequest {
    pub f: ScalarFunction,
    pub a: ComplexDenseMatrix,
    pub directions: Vec<ComplexDenseMatrix>,
    pub strategy: DerivativeStrategy,
    /// Unscaled step of the finite-difference strategy.
    pub fd_step: f64,
}

impl DerivativeRequest {
    pub fn new(
        f: ScalarFunction,
        a: ComplexDenseMatrix,
        directions: Vec<ComplexDenseMatrix>,
    ) -> Self {
        Self {
            f,
            a,
            directions,
            strategy: DerivativeStrategy::Moi,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_strategy(mut self, strategy: DerivativeStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn order(&self) -> usize {
        self.directions.len()
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..k).collect();
    let mut out = vec![current.clone()];
    // next-permutation
    loop {
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..k)
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .expect("pivot has a successor");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// `sum_pi T(v_pi(1)..v_pi(k))`, summed in lexicographic order of `pi`.
pub fn symmetrize(
    evaluations: &BTreeMap<Vec<usize>, ComplexDenseMatrix>,
) -> Result<ComplexDenseMatrix> {
    let k = evaluations.keys().next().map(Vec::len).unwrap_or(0);
    let mut total: Option<ComplexDenseMatrix> = None;
    for perm in permutations(k) {
        let value = evaluations
            .get(&perm)
            .ok_or_else(|| Error::MissingPermutation(perm.clone()))?;
        match total.as_mut() {
            None => total = Some(value.clone()),
            Some(t) => *t += value,
        }
    }
    total.ok_or_else(|| Error::InvalidInput("no evaluations to symmetrize".into()))
}

fn check_dims(a: &ComplexDenseMatrix, dirs: &[ComplexDenseMatrix]) -> Result<()> {
    if dirs.is_empty() {
        return Err(Error::InvalidInput(
            "at least one direction is required".into(),
        ));
    }
    dirs.iter().try_for_each(|b| a.check_same_dim(b))
}

/// `sum_pi sum_{|gamma| = m - k} a^{g_1} b_pi(1) ... a^{g_k} b_pi(k) a^{g_{k+1}}`
/// for arbitrary square matrices.
pub fn power_map_derivative(
    m: usize,
    a: &ComplexDenseMatrix,
    dirs: &[ComplexDenseMatrix],
) -> Result<ComplexDenseMatrix> {
    check_dims(a, dirs)?;
    let k = dirs.len();
    let slots = vec![a.clone(); k + 1];
    let evaluations = permutations(k)
        .into_iter()
        .map(|perm| {
            let b: Vec<ComplexDenseMatrix> = perm.iter().map(|&i| dirs[i].clone()).collect();
            Ok((perm, moi_polynomial_matrices(m, &slots, &b)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    symmetrize(&evaluations)
}

/// The MOI formula with a precomputed decomposition of `A`.
pub fn moi_derivative(
    f: &ScalarFunction,
    decomp: &Arc<SpectralDecomposition>,
    dirs: &[ComplexDenseMatrix],
) -> Result<ComplexDenseMatrix> {
    let k = dirs.len();
    if k == 0 {
        return Err(Error::InvalidInput(
            "at least one direction is required".into(),
        ));
    }
    f.require_order(k)?;
    let sym = MoiSymbol::divided_difference(f, k);
    let evaluations = permutations(k)
        .into_iter()
        .map(|perm| {
            let b: Vec<ComplexDenseMatrix> = perm.iter().map(|&i| dirs[i].clone()).collect();
            let ops = MoiOperands::uniform(decomp.clone(), b)?;
            Ok((perm, moi_evaluate(&sym, &ops)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    symmetrize(&evaluations)
}

pub fn matrix_function_derivative(req: &DerivativeRequest) -> Result<ComplexDenseMatrix> {
    check_dims(&req.a, &req.directions)?;
    req.a.ensure_hermitian()?;
    for b in &req.directions {
        b.ensure_hermitian()?;
    }
    match req.strategy {
        DerivativeStrategy::Moi => {
            let decomp = Arc::new(hermitian_eigendecompose(&req.a, None)?);
            moi_derivative(&req.f, &decomp, &req.directions)
        }
        DerivativeStrategy::FiniteDifference => richardson_derivative(
            &req.f,
            &req.a,
            &req.directions,
            fd_oracle_step(req.fd_step, req.order()),
        ),
        DerivativeStrategy::PowerClosedForm => {
            let p = req.f.as_polynomial().ok_or_else(|| {
                Error::InvalidInput("the power closed form needs a polynomial function".into())
            })?;
            let mut total = ComplexDenseMatrix::zeros(req.a.n());
            for (m, &c) in p.coeffs().iter().enumerate().skip(req.order()) {
                if c != num_complex::Complex64::new(0.0, 0.0) {
                    total.axpy(c, &power_map_derivative(m, &req.a, &req.directions)?);
                }
            }
            Ok(total)
        }
    }
}

/// `f(X)` for Hermitian `X`: Horner for polynomials, which avoids the
/// eigensolver's rounding, the functional calculus otherwise.
pub fn matrix_function(f: &ScalarFunction, x: &ComplexDenseMatrix) -> Result<ComplexDenseMatrix> {
    match f {
        ScalarFunction::Polynomial(p) => {
            x.ensure_hermitian()?;
            Ok(p.eval_matrix(x))
        }
        _ => functional_calculus(f, &hermitian_eigendecompose(x, None)?),
    }
}

/// `(2h)^{-k} sum_{s in {-1,1}^k} (prod s_i) f(A + h sum s_i B_i)`.
///
/// Stencil points are evaluated in parallel and summed in a fixed order.
pub fn finite_difference_derivative(
    f: &ScalarFunction,
    a: &ComplexDenseMatrix,
    dirs: &[ComplexDenseMatrix],
    h: f64,
) -> Result<ComplexDenseMatrix> {
    check_dims(a, dirs)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let k = dirs.len();
    let values = (0..1usize << k)
        .into_par_iter()
        .map(|mask| {
            let mut point = a.clone();
            let mut sign = 1.0;
            for (i, b) in dirs.iter().enumerate() {
                let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                sign *= s;
                point.axpy(num_complex::Complex64::new(s * h, 0.0), b);
            }
            Ok(matrix_function(f, &point)?.scale_real(sign))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ComplexDenseMatrix::zeros(a.n());
    for v in &values {
        total += v;
    }
    Ok(total.scale_real((2.0 * h).powi(-(k as i32))))
}

/// Step used by the finite-difference oracle for order `k`.
///
/// The rounding error of a `k`-fold central difference grows like
/// `eps / h^k`; at `k >= 3` and `h = 1e-4` it exceeds the quantity being
/// measured. From `k = 3` on, `h` is raised to `eps^{1/(k+4)}`, which
/// balances rounding against the `O(h^4)` error left after extrapolation.
pub fn fd_oracle_step(h: f64, k: usize) -> f64 {
    if k >= 3 {
        h.max(f64::EPSILON.powf(1.0 / (k as f64 + 4.0)))
    } else {
        h
    }
}

/// Central differences at the scaled step `H = h (1 + ||A||)` and `H/2`,
/// combined by one level of Richardson extrapolation.
pub fn richardson_derivative(
    f: &ScalarFunction,
    a: &ComplexDenseMatrix,
    dirs: &[ComplexDenseMatrix],
    h: f64,
) -> Result<ComplexDenseMatrix> {
    let step = h * (1.0 + operator_norm(a)?);
    let coarse = finite_difference_derivative(f, a, dirs, step)?;
    let fine = finite_difference_derivative(f, a, dirs, 0.5 * step)?;
    Ok(&fine.scale_real(4.0 / 3.0) - &coarse.scale_real(1.0 / 3.0))
}
