use num_complex::Complex64;

use crate::matrix::ComplexDenseMatrix;

/// Univariate polynomial with complex coefficients in ascending degree.
///
/// Always canonical: the leading coefficient is nonzero unless the
/// polynomial is identically zero, in which case `coeffs == [0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `p_n(x) = x^n`
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `p^(order)(x)`; zero above the degree.
    pub fn derivative_at(&self, order: usize, x: f64) -> Complex64 {
        if order > self.degree() {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (order..=self.degree()).rev() {
            let falling: f64 = ((n - order + 1)..=n).map(|v| v as f64).product();
            acc = acc * x + self.coeffs[n] * falling;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
        let n = a.n();
        let mut acc = ComplexDenseMatrix::zeros(n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.matmul(a);
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_trims_zeros() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        let z = Polynomial::from_real(&[0.0, 0.0]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn derivatives_of_cubic() {
        let p = Polynomial::from_real(&[1.0, -2.0, 0.0, 3.0]); // 1 - 2x + 3x^3
        assert_eq!(p.eval(2.0).re, 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative_at(1, 2.0).re, -2.0 + 36.0);
        assert_eq!(p.derivative_at(2, 2.0).re, 36.0);
        assert_eq!(p.derivative_at(3, 2.0).re, 18.0);
        assert_eq!(p.derivative_at(4, 2.0).re, 0.0);
        assert_eq!(p.derivative_at(0, 2.0), p.eval(2.0));
    }

    #[test]
    fn product_of_monomials() {
        assert_eq!(
            Polynomial::monomial(2).mul(&Polynomial::monomial(3)),
            Polynomial::monomial(5)
        );
    }
}
