use num_complex::Complex64;

use super::polynomial::Polynomial;

/// `f(x) = sum_j c_j exp(i x xi_j)` for a finite atomic Fourier measure.
///
/// Frequencies are kept sorted and pairwise distinct; atoms with exactly
/// equal frequency are merged and atoms whose merged weight is zero dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerAtomic {
    atoms: Vec<(f64, Complex64)>,
}

impl WienerAtomic {
    pub fn new(atoms: impl IntoIterator<Item = (f64, Complex64)>) -> Self {
        let mut atoms: Vec<(f64, Complex64)> = atoms.into_iter().collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, Complex64)> = Vec::with_capacity(atoms.len());
        for (xi, c) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == xi => last.1 += c,
                _ => merged.push((xi, c)),
            }
        }
        merged.retain(|(_, c)| c.re != 0.0 || c.im != 0.0);
        Self { atoms: merged }
    }

    pub fn single(xi: f64, weight: Complex64) -> Self {
        Self::new([(xi, weight)])
    }

    /// `cos(w x) = (e^{iwx} + e^{-iwx}) / 2`
    pub fn cos(w: f64) -> Self {
        Self::new([
            (w, Complex64::new(0.5, 0.0)),
            (-w, Complex64::new(0.5, 0.0)),
        ])
    }

    /// `sin(w x) = (e^{iwx} - e^{-iwx}) / 2i`
    pub fn sin(w: f64) -> Self {
        Self::new([
            (w, Complex64::new(0.0, -0.5)),
            (-w, Complex64::new(0.0, 0.5)),
        ])
    }

    pub fn atoms(&self) -> &[(f64, Complex64)] {
        &self.atoms
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.derivative_at(0, x)
    }

    /// `f^(m)(x) = sum_j c_j (i xi_j)^m exp(i x xi_j)`
    pub fn derivative_at(&self, m: usize, x: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(xi, c)| c * i_pow(m) * xi.powi(m as i32) * Complex64::cis(x * xi))
            .sum()
    }

    /// Largest `|xi_j|`, zero for the empty measure.
    pub fn max_frequency(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(xi, _)| xi.abs())
            .fold(0.0, f64::max)
    }

    /// Rescaled function `x -> f(s x)`.
    pub fn dilate(&self, s: f64) -> Self {
        Self::new(self.atoms.iter().map(|&(xi, c)| (xi * s, c)))
    }
}

/// `i^m`
pub(crate) fn i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `mu_(k) = sum_j |c_j| |xi_j|^k`
pub fn wiener_moment(f: &WienerAtomic, k: usize) -> f64 {
    f.atoms
        .iter()
        .map(|(xi, c)| c.norm() * xi.abs().powi(k as i32))
        .sum()
}

/// `mu_(j) / j!`: an upper bound on the integral projective tensor norm of
/// `f^[j]`, hence also on `sup |f^[j]|`.
pub fn wiener_iptp_bound(f: &WienerAtomic, j: usize) -> f64 {
    wiener_moment(f, j) / factorial(j)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Degree-`n` Taylor polynomial of a Wiener function together with the data
/// for its certified uniform error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorTruncation {
    pub polynomial: Polynomial,
    pub degree: usize,
    /// `mu_(0)`
    pub mass: f64,
    /// `R = max |xi_j|`
    pub max_frequency: f64,
}

impl TaylorTruncation {
    /// `mu_(0) * sum_{m > n} (rR)^m / m!`, bounding `sup_{|x| <= r} |f - q_n|`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.mass * exp_tail(self.degree, r.abs() * self.max_frequency)
    }
}

/// `sum_{m > n} x^m / m!` for `x >= 0`, summed term by term.
pub fn exp_tail(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for m in 1..=n + 1 {
        term *= x / m as f64;
    }
    let mut sum = 0.0;
    let mut m = n + 1;
    loop {
        sum += term;
        m += 1;
        term *= x / m as f64;
        if m as f64 > x && term <= sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    sum
}

/// `q_n(x) = sum_{m=0}^n (ix)^m / m! * sum_j c_j xi_j^m`
pub fn wiener_taylor_truncate(f: &WienerAtomic, n: usize) -> TaylorTruncation {
    let coeffs = (0..=n)
        .map(|m| {
            let moment: Complex64 = f.atoms.iter().map(|&(xi, c)| c * xi.powi(m as i32)).sum();
            moment * i_pow(m) / factorial(m)
        })
        .collect();
    TaylorTruncation {
        polynomial: Polynomial::new(coeffs),
        degree: n,
        mass: wiener_moment(f, 0),
        max_frequency: f.max_frequency(),
    }
}
