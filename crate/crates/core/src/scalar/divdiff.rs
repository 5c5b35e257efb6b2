//! Divided differences `f^[k](x_1, ..., x_{k+1})` by four strategies.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::nodes::NodeTuple;
use super::polynomial::Polynomial;
use super::quadrature::SimplexQuadratureRule;
use super::wiener::{factorial, i_pow, WienerAtomic};
use super::ScalarFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Closed form `p^[k](x) = sum_n c_n h_{n-k}(x)` where `h_m` is the complete
/// homogeneous symmetric polynomial of degree `m`, built by the recurrence
/// `h_m(x_1..x_j) = h_m(x_1..x_{j-1}) + x_j h_{m-1}(x_1..x_j)`.
///
/// Valid for coincident nodes; zero when `k > deg p`.
pub fn poly_divided_difference(p: &Polynomial, nodes: &NodeTuple) -> Complex64 {
    let k = nodes.order();
    let d = p.degree();
    if k > d {
        return ZERO;
    }
    let top = d - k;
    let mut h = vec![0.0; top + 1];
    h[0] = 1.0;
    for &x in nodes.nodes() {
        for m in 1..=top {
            h[m] += x * h[m - 1];
        }
    }
    p.coeffs()[k..]
        .iter()
        .zip(&h)
        .fold(ZERO, |acc, (c, hm)| acc + c * *hm)
}

/// Difference-quotient recursion on sorted nodes, with the confluent
/// (Hermite) rule `f^(j)(x)/j!` wherever `j + 1` nodes coincide.
///
/// Nodes closer than `coincidence_tol` (default `1e-8 (1 + max|x|)`) are
/// merged to their mean before the table is built.
pub fn divided_difference_recursive(
    f: &ScalarFunction,
    nodes: &NodeTuple,
    coincidence_tol: Option<f64>,
) -> Result<Complex64> {
    let tol = coincidence_tol.unwrap_or_else(|| nodes.default_coincidence_tol());
    let z = grouped_sorted(nodes.nodes(), tol);
    let m = z.len();
    let mut col = z.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    for j in 1..m {
        for i in 0..m - j {
            col[i] = if z[i + j] == z[i] {
                f.derivative_at(j, z[i]).map_err(|e| match e {
                    Error::InsufficientDerivatives {
                        required,
                        available,
                    } => Error::CoincidentNodes {
                        min_gap: nodes.min_gap(),
                        required,
                        available,
                    },
                    other => other,
                })? / factorial(j)
            } else {
                (col[i + 1] - col[i]) / (z[i + j] - z[i])
            };
        }
    }
    Ok(col[0])
}

/// Sorts and replaces every chain of nodes with consecutive gaps below
/// `tol` by the chain's mean.
fn grouped_sorted(nodes: &[f64], tol: f64) -> Vec<f64> {
    let mut z = nodes.to_vec();
    z.sort_by(f64::total_cmp);
    let mut start = 0;
    while start < z.len() {
        let mut end = start + 1;
        while end < z.len() && z[end] - z[end - 1] < tol {
            end += 1;
        }
        if end - start > 1 {
            let mean = z[start..end].iter().sum::<f64>() / (end - start) as f64;
            z[start..end].fill(mean);
        }
        start = end;
    }
    z
}

/// `sum_q w_q f^(k)(t_q . x)`, approximating the simplex integral of `f^(k)`.
pub fn divided_difference_quadrature(
    f: &ScalarFunction,
    nodes: &NodeTuple,
    rule: &SimplexQuadratureRule,
) -> Result<Complex64> {
    let k = nodes.order();
    f.require_order(k)?;
    rule.require_dimension(k)?;
    let x = nodes.nodes();
    let mut acc = ZERO;
    for (t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let arg: f64 = t.iter().zip(x).map(|(t, x)| t * x).sum();
        acc += f.derivative_at(k, arg)? * w;
    }
    Ok(acc)
}

/// `sum_j c_j (i xi_j)^k sum_q w_q exp(i xi_j t_q . x)`
pub fn wiener_divided_difference(
    f: &WienerAtomic,
    nodes: &NodeTuple,
    rule: &SimplexQuadratureRule,
) -> Result<Complex64> {
    let k = nodes.order();
    rule.require_dimension(k)?;
    let x = nodes.nodes();
    let args: Vec<f64> = rule
        .nodes()
        .iter()
        .map(|t| t.iter().zip(x).map(|(t, x)| t * x).sum())
        .collect();
    let mut acc = ZERO;
    for &(xi, c) in f.atoms() {
        let inner: Complex64 = args
            .iter()
            .zip(rule.weights())
            .map(|(&a, &w)| Complex64::cis(xi * a) * w)
            .sum();
        acc += c * i_pow(k) * xi.powi(k as i32) * inner;
    }
    Ok(acc)
}

/// Default strategy: closed form for polynomials, recursion otherwise.
pub fn divided_difference(f: &ScalarFunction, nodes: &NodeTuple) -> Result<Complex64> {
    match f {
        ScalarFunction::Polynomial(p) => Ok(poly_divided_difference(p, nodes)),
        _ => divided_difference_recursive(f, nodes, None),
    }
}

/// Product rule `sum_{j=0}^k f^[j](x_1..x_{j+1}) g^[k-j](x_{j+1}..x_{k+1})`.
pub fn divided_difference_product(
    f: &ScalarFunction,
    g: &ScalarFunction,
    nodes: &NodeTuple,
) -> Result<Complex64> {
    let k = nodes.order();
    let mut acc = ZERO;
    for j in 0..=k {
        let left = divided_difference(f, &nodes.sub_tuple(0, j))?;
        let right = divided_difference(g, &nodes.sub_tuple(j, k))?;
        acc += left * right;
    }
    Ok(acc)
}
