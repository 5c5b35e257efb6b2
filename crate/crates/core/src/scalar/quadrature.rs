//! Gauss-Legendre rules on `[0, 1]` and collapsed tensor rules on the simplex.

use crate::error::{Error, Result};

use super::wiener::factorial;

/// Points per axis used when no rule is supplied.
pub const DEFAULT_POINTS_PER_AXIS: usize = 16;

/// Gauss-Legendre nodes and weights on `[0, 1]`, nodes ascending.
pub fn gauss_legendre_unit(points: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(points);
    let nodes = x.iter().map(|&t| 0.5 * (t + 1.0)).collect();
    let weights = w.iter().map(|&v| 0.5 * v).collect();
    (nodes, weights)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(
        points >= 1,
        "a Gauss-Legendre rule needs at least one point"
    );
    let n = points;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d.is_finite() { d } else { dp };
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Quadrature for the simplex measure on `{t in [0,1]^{k+1} : sum t = 1}`
/// whose total mass is `1/k!`.
///
/// Built from a tensor Gauss-Legendre rule on `[0,1]^k` through the
/// collapsed coordinates `t_1 = u_1`, `t_j = u_j (1 - t_1 - ... - t_{j-1})`,
/// `t_{k+1} = 1 - t_1 - ... - t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexQuadratureRule {
    dimension: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SimplexQuadratureRule {
    pub fn new(dimension: usize, points_per_axis: usize) -> Result<Self> {
        if points_per_axis == 0 {
            return Err(Error::InvalidInput(
                "points_per_axis must be positive".into(),
            ));
        }
        let (gx, gw) = gauss_legendre_unit(points_per_axis);
        let total = points_per_axis.pow(dimension as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dimension];
        for _ in 0..total {
            let mut t = Vec::with_capacity(dimension + 1);
            let mut remaining = 1.0;
            let mut weight = 1.0;
            for &i in &idx {
                weight *= gw[i] * remaining;
                let s = remaining * gx[i];
                t.push(s);
                remaining -= s;
            }
            t.push(remaining);
            nodes.push(t);
            weights.push(weight);
            // odometer, last axis fastest
            for d in (0..dimension).rev() {
                idx[d] += 1;
                if idx[d] < points_per_axis {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(Self {
            dimension,
            nodes,
            weights,
        })
    }

    pub fn with_default_points(dimension: usize) -> Self {
        Self::new(dimension, DEFAULT_POINTS_PER_AXIS).expect("default points per axis is positive")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `1/k!`
    pub fn exact_mass(&self) -> f64 {
        1.0 / factorial(self.dimension)
    }

    pub(crate) fn require_dimension(&self, k: usize) -> Result<()> {
        if self.dimension != k {
            return Err(Error::InvalidInput(format!(
                "simplex rule has dimension {}, divided difference has order {k}",
                self.dimension
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..=20 {
            let (x, w) = gauss_legendre_unit(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-14, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn simplex_mass_and_nodes() {
        for k in 0..=4 {
            let rule = SimplexQuadratureRule::new(k, 8).unwrap();
            let rel = (rule.total_weight() - rule.exact_mass()).abs() / rule.exact_mass();
            assert!(rel < 1e-12, "k={k} rel={rel}");
            for t in rule.nodes() {
                assert_eq!(t.len(), k + 1);
                assert!(t.iter().all(|&v| v >= 0.0));
                assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            assert!(rule.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn simplex_moments_match_dirichlet_formula() {
        // integral of t_1^a t_2^b over the 2-simplex = a! b! / (a + b + 2)!
        let rule = SimplexQuadratureRule::new(2, 6).unwrap();
        let got: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(t, w)| w * t[0].powi(2) * t[2].powi(3))
            .sum();
        let want = factorial(2) * factorial(3) / factorial(7);
        assert!((got - want).abs() < 1e-15);
    }
}
