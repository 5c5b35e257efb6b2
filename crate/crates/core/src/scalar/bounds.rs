//! Computable upper bounds for divided differences.
//!
//! None of these are norms: the projective tensor norms they dominate are
//! infima over all decompositions and are not computed here.

use num_complex::Complex64;

use crate::error::Result;

use super::polynomial::Polynomial;
use super::wiener::factorial;
use super::ScalarFunction;

pub const DEFAULT_SUP_GRID_POINTS: usize = 4001;

/// Exponent tuple `gamma in N_0^{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    /// `|gamma| = sum gamma_j`
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// All `gamma` with `parts` entries and `|gamma| = total`, lexicographic.
    pub fn compositions(total: u32, parts: usize) -> Vec<MultiIndex> {
        fn go(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if parts == 1 {
                prefix.push(total);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for g in 0..=total {
                prefix.push(g);
                go(total - g, parts - 1, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if parts > 0 {
            go(total, parts, &mut Vec::with_capacity(parts), &mut out);
        }
        out
    }
}

/// `P(x) = sum_alpha c_alpha x^alpha` in a fixed number of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariatePolynomial {
    nvars: usize,
    terms: Vec<(MultiIndex, Complex64)>,
}

impl MultivariatePolynomial {
    pub fn new(nvars: usize, terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        if let Some((alpha, _)) = terms.iter().find(|(a, _)| a.arity() != nvars) {
            return Err(crate::Error::InvalidInput(format!(
                "multi-index {:?} has arity {}, expected {nvars}",
                alpha.0,
                alpha.arity()
            )));
        }
        Ok(Self { nvars, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(alpha, c)| {
                let mono: f64 = alpha
                    .0
                    .iter()
                    .zip(x)
                    .map(|(&a, &v)| v.powi(a as i32))
                    .product();
                c * mono
            })
            .sum()
    }
}

/// `p^[k]` as an explicit polynomial in `k + 1` variables:
/// `sum_n c_n sum_{|gamma| = n - k} x^gamma`.
pub fn divided_difference_expansion(p: &Polynomial, k: usize) -> MultivariatePolynomial {
    let mut terms = Vec::new();
    for (n, &c) in p.coeffs().iter().enumerate().skip(k) {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for gamma in MultiIndex::compositions((n - k) as u32, k + 1) {
            terms.push((gamma, c));
        }
    }
    MultivariatePolynomial {
        nvars: k + 1,
        terms,
    }
}

/// `sum_alpha |c_alpha| r^{|alpha|}`: projective tensor bound of `P` on `[-r, r]^m`.
pub fn poly_iptp_bound(p: &MultivariatePolynomial, r: f64) -> f64 {
    p.terms
        .iter()
        .map(|(alpha, c)| c.norm() * r.powi(alpha.weight() as i32))
        .sum()
}

/// `(1/k!) max_{|x| <= r} |f^(k)(x)|` estimated on a uniform grid.
pub fn divided_difference_sup_bound(f: &ScalarFunction, k: usize, r: f64) -> Result<f64> {
    divided_difference_sup_bound_with_grid(f, k, r, DEFAULT_SUP_GRID_POINTS)
}

/// As [`divided_difference_sup_bound`], with every grid-local maximum of
/// `|f^(k)|` refined by golden-section search in its neighbouring cells.
pub fn divided_difference_sup_bound_with_grid(
    f: &ScalarFunction,
    k: usize,
    r: f64,
    grid_points: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(crate::Error::InvalidInput(format!(
            "radius must be positive, got {r}"
        )));
    }
    f.require_order(k)?;
    let points = grid_points.max(3);
    let h = 2.0 * r / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| (-r + i as f64 * h).clamp(-r, r))
        .collect();
    let vals = xs
        .iter()
        .map(|&x| f.derivative_at(k, x).map(|z| z.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for i in 1..points - 1 {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > 0.0 {
            let refined = golden_max(
                |x| f.derivative_at(k, x).map(|z| z.norm()),
                xs[i - 1],
                xs[i + 1],
            )?;
            best = best.max(refined);
        }
    }
    Ok(best / factorial(k))
}

fn golden_max(g: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    let mut best = gc.max(gd);
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
        }
        best = best.max(gc).max(gd);
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    Ok(best)
}
