//! Hermitian eigendecomposition with eigenvalue clustering, spectral
//! projections and the scalar functional calculus `f(A) = sum f(l) P_l`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexDenseMatrix;
use crate::report::{CheckRecord, VerificationReport};
use crate::scalar::ScalarFunction;

/// Sweep budget of the cyclic Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 30;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to `||A||_F`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;

/// One distinct eigenvalue with its orthogonal spectral projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCluster {
    pub eigenvalue: f64,
    pub projection: ComplexDenseMatrix,
    pub multiplicity: usize,
}

/// `A = sum_i l_i P_i` over clustered distinct eigenvalues, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    n: usize,
    source_norm: f64,
    clusters: Vec<SpectralCluster>,
    cluster_tol: f64,
    source: Option<ComplexDenseMatrix>,
}

impl SpectralDecomposition {
    /// Assembles a decomposition without checking any invariant; see
    /// [`validate_decomposition`].
    pub fn from_parts(
        n: usize,
        clusters: Vec<SpectralCluster>,
        cluster_tol: f64,
        source: Option<ComplexDenseMatrix>,
    ) -> Self {
        let source_norm = clusters
            .iter()
            .map(|c| c.eigenvalue.abs())
            .fold(0.0, f64::max);
        Self {
            n,
            source_norm,
            clusters,
            cluster_tol,
            source,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Operator norm of the source matrix, `max |l_i|`.
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    pub fn clusters(&self) -> &[SpectralCluster] {
        &self.clusters
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn source(&self) -> Option<&ComplexDenseMatrix> {
        self.source.as_ref()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.eigenvalue).collect()
    }

    /// `sum_i g(l_i) P_i` for an infallible weight function.
    pub fn apply(&self, mut g: impl FnMut(f64) -> Complex64) -> ComplexDenseMatrix {
        let mut out = ComplexDenseMatrix::zeros(self.n);
        for c in &self.clusters {
            out.axpy(g(c.eigenvalue), &c.projection);
        }
        out
    }

    /// `sum_i l_i P_i`
    pub fn reconstruct(&self) -> ComplexDenseMatrix {
        self.apply(|l| Complex64::new(l, 0.0))
    }
}

/// Default clustering threshold `1e-7 (1 + ||A||_F)`.
pub fn default_cluster_tol(a: &ComplexDenseMatrix) -> f64 {
    1e-7 * (1.0 + a.frobenius_norm())
}

/// Eigenvalues (unsorted) and eigenvectors (columns) of a Hermitian matrix
/// by cyclic complex Jacobi rotations.
pub fn jacobi_eigen(a: &ComplexDenseMatrix) -> Result<(Vec<f64>, ComplexDenseMatrix)> {
    let n = a.n();
    // symmetrize so rounding in the input cannot leak anti-Hermitian parts
    let mut m = (a + &a.adjoint()).scale_real(0.5);
    let mut v = ComplexDenseMatrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL_TOL * m.frobenius_norm();
    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps: sweep,
                off_norm: off,
            });
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    let eigenvalues = (0..n).map(|i| m[(i, i)].re).collect();
    Ok((eigenvalues, v))
}

fn off_diagonal_norm(m: &ComplexDenseMatrix) -> f64 {
    let n = m.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]` with `U = diag(1, e^{-i phi}) R(theta)` in the `(p, q)` plane,
/// `m <- U* m U`, `v <- v U`.
fn rotate(m: &mut ComplexDenseMatrix, v: &mut ComplexDenseMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = conj_phase * (-s);
    let u_qq = conj_phase * c;
    let n = m.n();
    // columns: m <- m U
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * u_pp + mq * u_qp;
        m[(i, q)] = mp * u_pq + mq * u_qq;
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * u_pp + vq * u_qp;
        v[(i, q)] = vp * u_pq + vq * u_qq;
    }
    // rows: m <- U* m
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = u_pp.conj() * mp + u_qp.conj() * mq;
        m[(q, j)] = u_pq.conj() * mp + u_qq.conj() * mq;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Decomposes a Hermitian matrix into clustered spectral projections.
///
/// Sorted eigenvalues whose consecutive gaps do not exceed `cluster_tol`
/// (default [`default_cluster_tol`]) form one cluster whose eigenvalue is the
/// members' mean and whose projection is the sum of their rank-one projectors.
pub fn hermitian_eigendecompose(
    a: &ComplexDenseMatrix,
    cluster_tol: Option<f64>,
) -> Result<SpectralDecomposition> {
    if a.n() == 0 {
        return Err(Error::InvalidInput(
            "matrix dimension must be at least 1".into(),
        ));
    }
    a.ensure_hermitian()?;
    let n = a.n();
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(a));
    let (values, vectors) = jacobi_eigen(a)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let mut clusters: Vec<SpectralCluster> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, clusters: &mut Vec<SpectralCluster>| {
        if members.is_empty() {
            return;
        }
        let mut projection = ComplexDenseMatrix::zeros(n);
        for &col in members.iter() {
            for i in 0..n {
                let vi = vectors[(i, col)];
                for j in 0..n {
                    projection[(i, j)] += vi * vectors[(j, col)].conj();
                }
            }
        }
        let eigenvalue = members.iter().map(|&c| values[c]).sum::<f64>() / members.len() as f64;
        clusters.push(SpectralCluster {
            eigenvalue,
            projection,
            multiplicity: members.len(),
        });
        members.clear();
    };
    for (pos, &idx) in order.iter().enumerate() {
        if pos > 0 && values[idx] - values[order[pos - 1]] > tol {
            flush(&mut members, &mut clusters);
        }
        members.push(idx);
    }
    flush(&mut members, &mut clusters);

    Ok(SpectralDecomposition::from_parts(
        n,
        clusters,
        tol,
        Some(a.clone()),
    ))
}

/// `sum_i f(l_i) P_i`
pub fn functional_calculus(
    f: &ScalarFunction,
    d: &SpectralDecomposition,
) -> Result<ComplexDenseMatrix> {
    let mut out = ComplexDenseMatrix::zeros(d.n());
    for c in d.clusters() {
        out.axpy(f.eval(c.eigenvalue)?, &c.projection);
    }
    Ok(out)
}

/// Singular values of `m` in descending order, as square roots of the
/// eigenvalues of `m* m`.
pub fn singular_values(m: &ComplexDenseMatrix) -> Result<Vec<f64>> {
    let gram = m.adjoint().matmul(m);
    let (values, _) = jacobi_eigen(&gram)?;
    let mut s: Vec<f64> = values.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexDenseMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

const ANCHOR_RESOLUTION: &str = "resolution of identity: sum_l P_l = I";
const ANCHOR_ORTHOGONALITY: &str = "P_l P_m = delta_lm P_m";
const ANCHOR_RECONSTRUCTION: &str = "A = sum_l l P_l";

/// Residual of every decomposition invariant against its tolerance.
pub fn validate_decomposition(d: &SpectralDecomposition) -> VerificationReport {
    let n = d.n();
    let nf = n as f64;
    let mut checks = Vec::new();

    let increasing = d
        .clusters()
        .windows(2)
        .all(|w| w[0].eigenvalue < w[1].eigenvalue);
    checks.push(CheckRecord::residual(
        "eigenvalues_strictly_increasing",
        "sorted distinct spectrum",
        if increasing { 0.0 } else { 1.0 },
        0.0,
    ));

    let mut sum = ComplexDenseMatrix::zeros(n);
    for c in d.clusters() {
        sum += &c.projection;
    }
    let resolution = (&sum - &ComplexDenseMatrix::identity(n)).max_abs();
    checks.push(CheckRecord::residual(
        "resolution_of_identity",
        ANCHOR_RESOLUTION,
        resolution,
        1e-10 * nf,
    ));

    let mut orth: f64 = 0.0;
    for (i, ci) in d.clusters().iter().enumerate() {
        for (j, cj) in d.clusters().iter().enumerate() {
            let prod = ci.projection.matmul(&cj.projection);
            let target = if i == j {
                ci.projection.clone()
            } else {
                ComplexDenseMatrix::zeros(n)
            };
            orth = orth.max((&prod - &target).max_abs());
        }
    }
    checks.push(CheckRecord::residual(
        "projection_orthogonality",
        ANCHOR_ORTHOGONALITY,
        orth,
        1e-10,
    ));

    let herm = d
        .clusters()
        .iter()
        .map(|c| c.projection.hermiticity_residual())
        .fold(0.0, f64::max);
    checks.push(CheckRecord::residual(
        "projection_hermitian",
        "P_l = P_l*",
        herm,
        1e-8,
    ));

    let trace = d
        .clusters()
        .iter()
        .map(|c| (c.projection.trace() - Complex64::new(c.multiplicity as f64, 0.0)).norm())
        .fold(0.0, f64::max);
    checks.push(CheckRecord::residual(
        "projection_trace_multiplicity",
        "tr P_l = m_l",
        trace,
        1e-8,
    ));

    if let Some(a) = d.source() {
        let r = (&d.reconstruct() - a).frobenius_norm();
        checks.push(CheckRecord::residual(
            "reconstruction",
            ANCHOR_RECONSTRUCTION,
            r,
            1e-10 * nf * (1.0 + d.source_norm()),
        ));
    }
    VerificationReport::new("spectral_decomposition", ANCHOR_RECONSTRUCTION, checks)
}
