//! Divided differences against the Lagrange form
//! f^[k](x_0..x_k) = sum_i f(x_i) / prod_{j != i} (x_i - x_j).

use moikit_core::scalar::{divided_difference_recursive, poly_divided_difference};
use moikit_core::{
    CallableFunction, Complex64, NodeTuple, Polynomial, ScalarFunction, WienerAtomic,
};
use proptest::prelude::*;

fn lagrange(f: &ScalarFunction, x: &[f64]) -> Complex64 {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let denom: f64 = x
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xi - xj)
                .product();
            f.eval(xi).unwrap() / denom
        })
        .sum()
}

fn spread(raw: Vec<f64>) -> Vec<f64> {
    // well-separated nodes keep the Lagrange form itself accurate
    raw.iter()
        .enumerate()
        .map(|(i, v)| -2.0 + 0.45 * i as f64 + 0.1 * v)
        .collect()
}

proptest! {
    #[test]
    fn recursion_matches_lagrange_for_exp(raw in prop::collection::vec(0.0f64..1.0, 1..7)) {
        let x = spread(raw);
        let f: ScalarFunction = CallableFunction::exp(0.7, 8).into();
        let got = divided_difference_recursive(&f, &NodeTuple::new(x.clone()).unwrap(), None).unwrap();
        let want = lagrange(&f, &x);
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{got} vs {want}");
    }

    #[test]
    fn closed_form_matches_lagrange_for_polynomials(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..9),
        raw in prop::collection::vec(0.0f64..1.0, 1..7),
    ) {
        let x = spread(raw);
        let p = Polynomial::from_real(&coeffs);
        let got = poly_divided_difference(&p, &NodeTuple::new(x.clone()).unwrap());
        let want = lagrange(&p.clone().into(), &x);
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{got} vs {want}");
    }

    #[test]
    fn wiener_divided_difference_is_symmetric(raw in prop::collection::vec(-1.0f64..1.0, 2..6), shift in 1usize..5) {
        let f: ScalarFunction = WienerAtomic::new([(1.3, Complex64::new(0.4, 0.1)), (-0.5, Complex64::new(0.2, 0.0))]).into();
        let mut rotated = raw.clone();
        rotated.rotate_left(shift % raw.len());
        let a = divided_difference_recursive(&f, &NodeTuple::new(raw).unwrap(), None).unwrap();
        let b = divided_difference_recursive(&f, &NodeTuple::new(rotated).unwrap(), None).unwrap();
        prop_assert!((a - b).norm() <= 1e-9);
    }
}

#[test]
fn confluent_nodes_give_scaled_derivative() {
    // f^[k](l, .., l) = f^(k)(l) / k!
    let f: ScalarFunction = WienerAtomic::sin(1.0).into();
    let l = 0.3_f64;
    let cases = [
        (1, l.cos()),
        (2, -l.sin() / 2.0),
        (3, -l.cos() / 6.0),
        (4, l.sin() / 24.0),
    ];
    for (k, want) in cases {
        let got = divided_difference_recursive(&f, &NodeTuple::new(vec![l; k + 1]).unwrap(), None)
            .unwrap();
        assert!((got - want).norm() < 1e-12, "k = {k}: {got} vs {want}");
    }
}

#[test]
fn monomial_divided_difference_is_complete_symmetric_sum() {
    // (x^3)^[2](a, b, c) = a + b + c
    let p = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]);
    let got = poly_divided_difference(&p, &NodeTuple::new(vec![0.5, -1.0, 2.0]).unwrap());
    assert!((got - 1.5).norm() < 1e-14);
}
