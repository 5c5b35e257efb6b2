//! MOIs and derivatives against oracles that never call the eigensolver:
//! A = H D H with a Householder reflector H, so the eigenbasis is known
//! exactly and (I^{A..A} phi)[B_1..B_k] is an entrywise sum in that basis.

use std::sync::Arc;

use moikit_core::frechet::{matrix_function_derivative, DerivativeRequest, DerivativeStrategy};
use moikit_core::moi::{moi_evaluate, MoiOperands, MoiSymbol};
use moikit_core::{
    hermitian_eigendecompose, Complex64, ComplexDenseMatrix, CounterRng, Polynomial,
    ScalarFunction, WienerAtomic,
};
use proptest::prelude::*;

struct Basis {
    h: ComplexDenseMatrix,
    eigenvalues: Vec<f64>,
}

impl Basis {
    fn random(rng: &mut CounterRng, n: usize) -> Self {
        let v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let h = ComplexDenseMatrix::from_fn(n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - 2.0 * v[i] * v[j].conj() / vv
        });
        // distinct, separated eigenvalues in [-1, 1]
        let eigenvalues = (0..n)
            .map(|i| -1.0 + 2.0 * (i as f64 + 0.5 * rng.uniform()) / n as f64)
            .collect();
        Basis { h, eigenvalues }
    }

    fn matrix(&self) -> ComplexDenseMatrix {
        self.h
            .matmul(&ComplexDenseMatrix::diag(&self.eigenvalues))
            .matmul(&self.h)
    }

    /// sum over eigen-indices l_1..l_{k-1} of phi(l_0, .., l_k) prod (H B_j H)_{l_{j-1} l_j}, mapped back.
    fn moi(
        &self,
        phi: &dyn Fn(&[f64]) -> Complex64,
        middles: &[ComplexDenseMatrix],
    ) -> ComplexDenseMatrix {
        let n = self.eigenvalues.len();
        let rotated: Vec<_> = middles
            .iter()
            .map(|b| self.h.matmul(b).matmul(&self.h))
            .collect();
        let k = middles.len();
        let mut out = ComplexDenseMatrix::zeros(n);
        let mut idx = vec![0usize; k + 1];
        loop {
            let lambdas: Vec<f64> = idx.iter().map(|&i| self.eigenvalues[i]).collect();
            let mut term = phi(&lambdas);
            for j in 0..k {
                term *= rotated[j][(idx[j], idx[j + 1])];
            }
            out[(idx[0], idx[k])] += term;
            let mut pos = k;
            loop {
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    return self.h.matmul(&out).matmul(&self.h);
                }
                pos -= 1;
            }
        }
    }
}

fn hermitian(rng: &mut CounterRng, n: usize) -> ComplexDenseMatrix {
    let g = rng.hermitian(n);
    let scale = g.frobenius_norm();
    g.scale_real(1.0 / scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moi_matches_eigenbasis_sum(seed in any::<u64>(), n in 2usize..6, k in 1usize..4) {
        let mut rng = CounterRng::new(seed);
        let basis = Basis::random(&mut rng, n);
        let middles: Vec<_> = (0..k).map(|_| hermitian(&mut rng, n)).collect();
        let phi = |x: &[f64]| -> Complex64 {
            x.iter().enumerate().map(|(i, &v)| Complex64::new((v * (i + 1) as f64).sin(), v * v)).product()
        };
        let sym = MoiSymbol::new(k + 1, Arc::new(move |x: &[f64]| Ok(phi(x))));
        let d = Arc::new(hermitian_eigendecompose(&basis.matrix(), None).unwrap());
        let got = moi_evaluate(&sym, &MoiOperands::uniform(d, middles.clone()).unwrap()).unwrap();
        let want = basis.moi(&phi, &middles);
        prop_assert!((&got - &want).frobenius_norm() <= 1e-10 * (1.0 + want.frobenius_norm()));
    }

    #[test]
    fn moi_is_multilinear(seed in any::<u64>(), n in 2usize..5, alpha in -2.0f64..2.0) {
        let mut rng = CounterRng::new(seed);
        let a = hermitian(&mut rng, n);
        let (b1, b1p, b2) = (hermitian(&mut rng, n), hermitian(&mut rng, n), hermitian(&mut rng, n));
        let f: ScalarFunction = WienerAtomic::cos(1.0).into();
        let sym = MoiSymbol::divided_difference(&f, 2);
        let d = Arc::new(hermitian_eigendecompose(&a, None).unwrap());
        let eval = |x: ComplexDenseMatrix| moi_evaluate(&sym, &MoiOperands::uniform(d.clone(), vec![x, b2.clone()]).unwrap()).unwrap();
        let mut combo = b1.clone();
        combo.axpy(Complex64::new(alpha, 0.0), &b1p);
        let mut want = eval(b1);
        want.axpy(Complex64::new(alpha, 0.0), &eval(b1p));
        let got = eval(combo);
        prop_assert!((&got - &want).frobenius_norm() <= 1e-10 * (1.0 + want.frobenius_norm()));
    }

    #[test]
    fn second_derivative_is_symmetric(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = CounterRng::new(seed);
        let a = hermitian(&mut rng, n);
        let (b1, b2) = (hermitian(&mut rng, n), hermitian(&mut rng, n));
        let f: ScalarFunction = WienerAtomic::sin(1.5).into();
        let d12 = matrix_function_derivative(&DerivativeRequest::new(f.clone(), a.clone(), vec![b1.clone(), b2.clone()])).unwrap();
        let d21 = matrix_function_derivative(&DerivativeRequest::new(f, a, vec![b2, b1])).unwrap();
        prop_assert!((&d12 - &d21).frobenius_norm() <= 1e-12 * (1.0 + d12.frobenius_norm()));
    }
}

#[test]
fn daletskii_krein_first_derivative() {
    // D f(A)[B] in the eigenbasis: f^[1](l_i, l_j) B_ij
    let mut rng = CounterRng::new(7);
    let basis = Basis::random(&mut rng, 4);
    let b = hermitian(&mut rng, 4);
    let f = |x: f64| (0.8 * x).exp();
    let f1 = |x: &[f64]| -> Complex64 {
        let v = if (x[0] - x[1]).abs() < 1e-12 {
            0.8 * f(x[0])
        } else {
            (f(x[0]) - f(x[1])) / (x[0] - x[1])
        };
        Complex64::new(v, 0.0)
    };
    let want = basis.moi(&f1, std::slice::from_ref(&b));
    let func: ScalarFunction = moikit_core::CallableFunction::exp(0.8, 4).into();
    let got =
        matrix_function_derivative(&DerivativeRequest::new(func, basis.matrix(), vec![b])).unwrap();
    assert!((&got - &want).frobenius_norm() < 1e-11);
}

#[test]
fn second_derivative_of_cube_by_hand() {
    // D^2 (X^3)(A)[B1, B2] = A(B1B2 + B2B1) + B1AB2 + B2AB1 + (B1B2 + B2B1)A
    let mut rng = CounterRng::new(11);
    let a = hermitian(&mut rng, 5);
    let (b1, b2) = (hermitian(&mut rng, 5), hermitian(&mut rng, 5));
    let anti = &b1.matmul(&b2) + &b2.matmul(&b1);
    let want = &(&a.matmul(&anti) + &anti.matmul(&a))
        + &(&b1.matmul(&a).matmul(&b2) + &b2.matmul(&a).matmul(&b1));
    let cube: ScalarFunction = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).into();
    for strategy in [
        DerivativeStrategy::Moi,
        DerivativeStrategy::PowerClosedForm,
        DerivativeStrategy::FiniteDifference,
    ] {
        let req = DerivativeRequest::new(cube.clone(), a.clone(), vec![b1.clone(), b2.clone()])
            .with_strategy(strategy);
        let got = matrix_function_derivative(&req).unwrap();
        let tol = if strategy == DerivativeStrategy::FiniteDifference {
            1e-6
        } else {
            1e-12
        };
        assert!((&got - &want).frobenius_norm() < tol, "{strategy:?}");
    }
}
