//! Finite-dimensional multiple operator integrals
//!
//! `(I^A phi)[B_1..B_k] = sum_l phi(l_1..l_{k+1}) P_{l_1} B_1 P_{l_2} ... B_k P_{l_{k+1}}`
//! where `l_j` runs over the distinct eigenvalues of `A_j`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ComplexDenseMatrix;
use crate::report::{CheckRecord, VerificationReport};
use crate::rng::CounterRng;
use crate::scalar::{
    divided_difference, poly_iptp_bound, wiener_iptp_bound, MultivariatePolynomial, NodeTuple,
    RealToComplex, ScalarFunction, SimplexQuadratureRule, WienerAtomic,
};
use crate::spectral::{
    functional_calculus, hermitian_eigendecompose, operator_norm, SpectralDecomposition,
};

/// Evaluator of a symbol on an eigenvalue tuple.
pub type SymbolFn = Arc<dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync>;

/// One term `w phi_1(x_1) ... phi_{k+1}(x_{k+1})` of a separated symbol.
#[derive(Clone)]
pub struct SeparatedTerm {
    pub weight: Complex64,
    pub factors: Vec<RealToComplex>,
}

impl fmt::Debug for SeparatedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparatedTerm")
            .field("weight", &self.weight)
            .field("factors", &self.factors.len())
            .finish()
    }
}

/// Finite sum of products of one-variable functions: a discrete IPD.
#[derive(Debug, Clone)]
pub struct SeparatedForm {
    arity: usize,
    terms: Vec<SeparatedTerm>,
}

impl SeparatedForm {
    pub fn new(arity: usize, terms: Vec<SeparatedTerm>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::InvalidInput(format!(
                "separated symbol needs arity >= 2, got {arity}"
            )));
        }
        if let Some(t) = terms.iter().find(|t| t.factors.len() != arity) {
            return Err(Error::ArityMismatch {
                symbol: arity,
                operands: t.factors.len(),
            });
        }
        Ok(Self { arity, terms })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[SeparatedTerm] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .zip(x)
                    .fold(t.weight, |acc, (phi, &v)| acc * phi(v))
            })
            .sum()
    }

    /// `sum_terms |w| prod_j max_{l in spectra[j]} |phi_j(l)|`: the cost of the
    /// decomposition restricted to the grid.
    pub fn cost_on(&self, spectra: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .zip(spectra)
                    .map(|(phi, s)| s.iter().map(|&l| phi(l).norm()).fold(0.0, f64::max))
                    .product::<f64>()
                    * t.weight.norm()
            })
            .sum()
    }
}

/// Where a symbol came from; selects the computable norm bound.
#[derive(Debug, Clone)]
pub enum SymbolProvenance {
    /// `f^[k]` for a finite atomic Wiener function.
    Wiener {
        f: WienerAtomic,
        k: usize,
    },
    Polynomial(MultivariatePolynomial),
    Constant(Complex64),
}

/// A function on `(k+1)`-tuples of eigenvalues.
#[derive(Clone)]
pub struct MoiSymbol {
    arity: usize,
    evaluator: SymbolFn,
    separated: Option<SeparatedForm>,
    provenance: Option<SymbolProvenance>,
}

impl fmt::Debug for MoiSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoiSymbol")
            .field("arity", &self.arity)
            .field("separated", &self.separated)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl MoiSymbol {
    pub fn new(arity: usize, evaluator: SymbolFn) -> Self {
        Self {
            arity,
            evaluator,
            separated: None,
            provenance: None,
        }
    }

    pub fn constant(arity: usize, c: Complex64) -> Self {
        Self {
            provenance: Some(SymbolProvenance::Constant(c)),
            ..Self::new(arity, Arc::new(move |_| Ok(c)))
        }
    }

    /// `f^[k]`, evaluated by the default divided-difference strategy.
    pub fn divided_difference(f: &ScalarFunction, k: usize) -> Self {
        let g = f.clone();
        let evaluator: SymbolFn =
            Arc::new(move |x| divided_difference(&g, &NodeTuple::new(x.to_vec())?));
        let provenance = match f {
            ScalarFunction::Wiener(w) => Some(SymbolProvenance::Wiener { f: w.clone(), k }),
            ScalarFunction::Polynomial(p) => Some(SymbolProvenance::Polynomial(
                crate::scalar::divided_difference_expansion(p, k),
            )),
            ScalarFunction::Callable(_) => None,
        };
        Self {
            provenance,
            ..Self::new(k + 1, evaluator)
        }
    }

    pub fn from_multivariate_polynomial(p: MultivariatePolynomial) -> Self {
        let q = p.clone();
        Self {
            provenance: Some(SymbolProvenance::Polynomial(p.clone())),
            ..Self::new(p.nvars(), Arc::new(move |x| Ok(q.eval(x))))
        }
    }

    pub fn from_separated(form: SeparatedForm) -> Self {
        let g = form.clone();
        Self {
            separated: Some(form.clone()),
            ..Self::new(form.arity(), Arc::new(move |x| Ok(g.eval(x))))
        }
    }

    /// Attaches a separated form after checking it against the evaluator on
    /// seeded tuples in `[-2, 2]^{k+1}` to `1e-9 (1 + |phi|)`.
    pub fn with_separated(mut self, form: SeparatedForm) -> Result<Self> {
        if form.arity() != self.arity {
            return Err(Error::ArityMismatch {
                symbol: self.arity,
                operands: form.arity(),
            });
        }
        let mut rng = CounterRng::new(0x5e9a);
        for _ in 0..64 {
            let x: Vec<f64> = (0..self.arity).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
            let want = self.eval(&x)?;
            let got = form.eval(&x);
            if (got - want).norm() > 1e-9 * (1.0 + want.norm()) {
                return Err(Error::InvalidInput(format!(
                    "separated form disagrees with the symbol at {x:?}: {got} vs {want}"
                )));
            }
        }
        self.separated = Some(form);
        Ok(self)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn separated(&self) -> Option<&SeparatedForm> {
        self.separated.as_ref()
    }

    pub fn provenance(&self) -> Option<&SymbolProvenance> {
        self.provenance.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch {
                symbol: self.arity,
                operands: x.len(),
            });
        }
        (self.evaluator)(x)
    }

    /// Computable upper bound on the projective tensor norm of the symbol
    /// restricted to `spectra`, when one is known.
    pub fn norm_bound(&self, spectra: &[Vec<f64>]) -> Option<f64> {
        match &self.provenance {
            Some(SymbolProvenance::Wiener { f, k }) => Some(wiener_iptp_bound(f, *k)),
            Some(SymbolProvenance::Polynomial(p)) => {
                let r = spectra
                    .iter()
                    .flatten()
                    .map(|l| l.abs())
                    .fold(0.0, f64::max);
                Some(poly_iptp_bound(p, r))
            }
            Some(SymbolProvenance::Constant(c)) => Some(c.norm()),
            None => self.separated.as_ref().map(|s| s.cost_on(spectra)),
        }
    }
}

/// Spectral decompositions `A_1..A_{k+1}` and middles `B_1..B_k`.
#[derive(Debug, Clone)]
pub struct MoiOperands {
    decomps: Vec<Arc<SpectralDecomposition>>,
    middles: Vec<ComplexDenseMatrix>,
}

impl MoiOperands {
    pub fn new(
        decomps: Vec<Arc<SpectralDecomposition>>,
        middles: Vec<ComplexDenseMatrix>,
    ) -> Result<Self> {
        if middles.is_empty() {
            return Err(Error::InvalidInput(
                "an MOI needs at least one middle operand".into(),
            ));
        }
        if decomps.len() != middles.len() + 1 {
            return Err(Error::ArityMismatch {
                symbol: middles.len() + 1,
                operands: decomps.len(),
            });
        }
        let n = decomps[0].n();
        for d in &decomps {
            if d.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d.n(),
                });
            }
        }
        for b in &middles {
            if b.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.n(),
                });
            }
        }
        Ok(Self { decomps, middles })
    }

    /// Same decomposition in every slot.
    pub fn uniform(
        d: Arc<SpectralDecomposition>,
        middles: Vec<ComplexDenseMatrix>,
    ) -> Result<Self> {
        let decomps = vec![d; middles.len() + 1];
        Self::new(decomps, middles)
    }

    pub fn decomps(&self) -> &[Arc<SpectralDecomposition>] {
        &self.decomps
    }

    pub fn middles(&self) -> &[ComplexDenseMatrix] {
        &self.middles
    }

    pub fn order(&self) -> usize {
        self.middles.len()
    }

    pub fn n(&self) -> usize {
        self.decomps[0].n()
    }

    pub fn spectra(&self) -> Vec<Vec<f64>> {
        self.decomps.iter().map(|d| d.eigenvalues()).collect()
    }

    /// Replaces the middles, keeping the decompositions.
    pub fn with_middles(&self, middles: Vec<ComplexDenseMatrix>) -> Result<Self> {
        Self::new(self.decomps.clone(), middles)
    }
}

/// Values of `phi` on the spectral grid, last slot fastest.
fn symbol_grid(sym: &MoiSymbol, spectra: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let total: usize = spectra.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; spectra.len()];
    let mut x: Vec<f64> = spectra.iter().map(|s| s[0]).collect();
    for _ in 0..total {
        out.push(sym.eval(&x)?);
        for d in (0..spectra.len()).rev() {
            idx[d] += 1;
            if idx[d] < spectra[d].len() {
                x[d] = spectra[d][idx[d]];
                break;
            }
            idx[d] = 0;
            x[d] = spectra[d][0];
        }
    }
    Ok(out)
}

/// `sum_l phi(l) P_{l_1} B_1 ... B_k P_{l_{k+1}}`.
///
/// Nested accumulation: the innermost level is `sum_i phi(.., i) P_i`; each
/// outer level left-multiplies by `P_{l_j} B_j` and sums in ascending cluster
/// order. The outermost level may run in parallel; its reduction is always in
/// ascending order so the result is independent of the thread count.
pub fn moi_evaluate(sym: &MoiSymbol, ops: &MoiOperands) -> Result<ComplexDenseMatrix> {
    if sym.arity() != ops.decomps.len() {
        return Err(Error::ArityMismatch {
            symbol: sym.arity(),
            operands: ops.decomps.len(),
        });
    }
    let spectra = ops.spectra();
    let grid = symbol_grid(sym, &spectra)?;
    // P_{l} B_j for every slot but the last
    let left: Vec<Vec<ComplexDenseMatrix>> = ops
        .decomps
        .iter()
        .zip(&ops.middles)
        .map(|(d, b)| {
            d.clusters()
                .iter()
                .map(|c| c.projection.matmul(b))
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = spectra.iter().map(Vec::len).collect();
    let strides: Vec<usize> = (0..sizes.len())
        .map(|j| sizes[j + 1..].iter().product())
        .collect();
    let ctx = Nested {
        left: &left,
        last: &ops.decomps[ops.decomps.len() - 1],
        grid: &grid,
        sizes: &sizes,
        strides: &strides,
        n: ops.n(),
    };
    let partials: Vec<ComplexDenseMatrix> = (0..sizes[0])
        .into_par_iter()
        .map(|i| left[0][i].matmul(&ctx.inner(1, i * strides[0])))
        .collect();
    let mut total = ComplexDenseMatrix::zeros(ops.n());
    for p in &partials {
        total += p;
    }
    Ok(total)
}

struct Nested<'a> {
    left: &'a [Vec<ComplexDenseMatrix>],
    last: &'a SpectralDecomposition,
    grid: &'a [Complex64],
    sizes: &'a [usize],
    strides: &'a [usize],
    n: usize,
}

impl Nested<'_> {
    fn inner(&self, slot: usize, offset: usize) -> ComplexDenseMatrix {
        let mut acc = ComplexDenseMatrix::zeros(self.n);
        if slot + 1 == self.sizes.len() {
            for (i, c) in self.last.clusters().iter().enumerate() {
                acc.axpy(self.grid[offset + i], &c.projection);
            }
            return acc;
        }
        for i in 0..self.sizes[slot] {
            let rest = self.inner(slot + 1, offset + i * self.strides[slot]);
            acc += &self.left[slot][i].matmul(&rest);
        }
        acc
    }
}

/// `sum_terms w phi_1(A_1) B_1 ... B_k phi_{k+1}(A_{k+1})`.
pub fn moi_separated(form: &SeparatedForm, ops: &MoiOperands) -> Result<ComplexDenseMatrix> {
    if form.arity() != ops.decomps.len() {
        return Err(Error::ArityMismatch {
            symbol: form.arity(),
            operands: ops.decomps.len(),
        });
    }
    let mut total = ComplexDenseMatrix::zeros(ops.n());
    for term in form.terms() {
        let mut product: Option<ComplexDenseMatrix> = None;
        for (j, (phi, d)) in term.factors.iter().zip(&ops.decomps).enumerate() {
            let mut bad = None;
            let factor = d.apply(|l| {
                let v = phi(l);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    bad = Some(l);
                }
                v
            });
            if let Some(point) = bad {
                return Err(Error::EvaluationDomain { point });
            }
            product = Some(match product {
                None => factor,
                Some(p) => p.matmul(&ops.middles[j - 1]).matmul(&factor),
            });
        }
        if let Some(p) = product {
            total.axpy(term.weight, &p);
        }
    }
    Ok(total)
}

/// `sum_{|gamma| = m - k} a_1^{g_1} b_1 ... a_k^{g_k} b_k a_{k+1}^{g_{k+1}}` for
/// arbitrary square matrices; zero when `m < k`.
///
/// Suffix sums `Q_j(r) = sum_{|gamma_j..| = r} a_j^{g_j} b_j ... a_{k+1}^{g_{k+1}}`
/// are built right to left, so each level costs `O(m^2)` products.
pub fn moi_polynomial_matrices(
    m: usize,
    a: &[ComplexDenseMatrix],
    b: &[ComplexDenseMatrix],
) -> Result<ComplexDenseMatrix> {
    let k = b.len();
    if a.len() != k + 1 {
        return Err(Error::ArityMismatch {
            symbol: k + 1,
            operands: a.len(),
        });
    }
    let n = a[0].n();
    for x in a.iter().chain(b) {
        if x.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.n(),
            });
        }
    }
    if m < k {
        return Ok(ComplexDenseMatrix::zeros(n));
    }
    let top = m - k;
    let mut q = a[k].powers(top);
    for j in (0..k).rev() {
        let powers = a[j].powers(top);
        let bq: Vec<ComplexDenseMatrix> = q.iter().map(|x| b[j].matmul(x)).collect();
        q = (0..=top)
            .map(|r| {
                let mut acc = ComplexDenseMatrix::zeros(n);
                for g in 0..=r {
                    acc += &powers[g].matmul(&bq[r - g]);
                }
                acc
            })
            .collect();
    }
    Ok(q.swap_remove(top))
}

/// [`moi_polynomial_matrices`] with `a_j` the matrices behind `ops`.
pub fn moi_polynomial(m: usize, ops: &MoiOperands) -> Result<ComplexDenseMatrix> {
    let a: Vec<ComplexDenseMatrix> = ops
        .decomps
        .iter()
        .map(|d| d.source().cloned().unwrap_or_else(|| d.reconstruct()))
        .collect();
    moi_polynomial_matrices(m, &a, &ops.middles)
}

/// `sum_j sum_q c_j w_q (i xi_j)^k e^{i t_{q,1} xi_j A_1} B_1 ... e^{i t_{q,k+1} xi_j A_{k+1}}`.
pub fn moi_wiener(
    f: &WienerAtomic,
    ops: &MoiOperands,
    rule: &SimplexQuadratureRule,
) -> Result<ComplexDenseMatrix> {
    let k = ops.order();
    rule.require_dimension(k)?;
    let mut total = ComplexDenseMatrix::zeros(ops.n());
    for &(xi, c) in f.atoms() {
        if xi == 0.0 {
            continue;
        }
        let scale = c * crate::scalar::i_pow(k) * xi.powi(k as i32);
        for (t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let mut product = ops.decomps[0].apply(|l| Complex64::cis(t[0] * xi * l));
            for j in 1..=k {
                let e = ops.decomps[j].apply(|l| Complex64::cis(t[j] * xi * l));
                product = product.matmul(&ops.middles[j - 1]).matmul(&e);
            }
            total.axpy(scale * w, &product);
        }
    }
    Ok(total)
}

/// `f(A) - f(B) = (I^{A,B} f^[1])[A - B]` with the default tolerance `1e-8`.
pub fn moi_perturbation(
    f: &ScalarFunction,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
) -> Result<VerificationReport> {
    moi_perturbation_with_tol(f, a, b, 1e-8)
}

/// As [`moi_perturbation`]; passes when the Frobenius residual is at most
/// `rel_tol (1 + ||f(A)||_F)`.
pub fn moi_perturbation_with_tol(
    f: &ScalarFunction,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
    rel_tol: f64,
) -> Result<VerificationReport> {
    a.check_same_dim(b)?;
    let da = Arc::new(hermitian_eigendecompose(a, None)?);
    let db = Arc::new(hermitian_eigendecompose(b, None)?);
    let fa = functional_calculus(f, &da)?;
    let fb = functional_calculus(f, &db)?;
    let lhs = &fa - &fb;
    let ops = MoiOperands::new(vec![da, db], vec![a - b])?;
    let rhs = moi_evaluate(&MoiSymbol::divided_difference(f, 1), &ops)?;
    let residual = (&lhs - &rhs).frobenius_norm();
    let check = CheckRecord::compare(
        "perturbation_formula",
        "f(A) - f(B) = (I^{A,B} f^[1])[A - B]",
        lhs.frobenius_norm(),
        rhs.frobenius_norm(),
        residual,
        rel_tol * (1.0 + fa.frobenius_norm()),
    );
    Ok(VerificationReport::new(
        "moi_perturbation",
        "perturbation formula",
        vec![check],
    ))
}

/// Probes `||I^A phi||` with random directions of unit operator norm and
/// compares the largest response to `n^k max |phi|` over the spectral grid.
///
/// The middles of `ops` are ignored; only its decompositions are used.
pub fn moi_opnorm_bound_check(
    sym: &MoiSymbol,
    ops: &MoiOperands,
    probes: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if probes == 0 {
        return Err(Error::InvalidInput("at least one probe is required".into()));
    }
    let k = ops.order();
    let n = ops.n();
    let spectra = ops.spectra();
    let grid_max = symbol_grid(sym, &spectra)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let bound = (n as f64).powi(k as i32) * grid_max;
    let mut rng = CounterRng::new(seed);
    let mut estimate: f64 = 0.0;
    for _ in 0..probes {
        let mut middles = Vec::with_capacity(k);
        for _ in 0..k {
            let g = rng.gaussian_matrix(n);
            let norm = operator_norm(&g)?;
            middles.push(g.scale_real(1.0 / norm));
        }
        let value = moi_evaluate(sym, &ops.with_middles(middles)?)?;
        estimate = estimate.max(operator_norm(&value)?);
    }
    let check = CheckRecord::bound(
        "opnorm_bound",
        "||I^A phi|| <= n^k max |phi| over the spectral grid",
        estimate,
        bound,
        1e-10 * (1.0 + bound),
    );
    Ok(
        VerificationReport::new("moi_opnorm_bound", "operator-norm estimate", vec![check])
            .with_metric("grid_max", grid_max)
            .with_metric("probes", probes as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{divided_difference_expansion, Polynomial};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(rows: &[&[f64]]) -> ComplexDenseMatrix {
        ComplexDenseMatrix::from_real_rows(rows).unwrap()
    }

    fn decomp(a: &ComplexDenseMatrix) -> Arc<SpectralDecomposition> {
        Arc::new(hermitian_eigendecompose(a, None).unwrap())
    }

    fn close(a: &ComplexDenseMatrix, b: &ComplexDenseMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol * (1.0 + b.frobenius_norm())
    }

    #[test]
    fn unit_symbol_is_identity_on_b() {
        let mut rng = CounterRng::new(1);
        let a = rng.hermitian(4);
        let b = rng.gaussian_matrix(4);
        let ops = MoiOperands::uniform(decomp(&a), vec![b.clone()]).unwrap();
        let got = moi_evaluate(&MoiSymbol::constant(2, c(1.0)), &ops).unwrap();
        assert!(close(&got, &b, 1e-13));
    }

    #[test]
    fn first_slot_symbol_gives_left_product() {
        let mut rng = CounterRng::new(2);
        let a = rng.hermitian(3);
        let b = rng.gaussian_matrix(3);
        let ops = MoiOperands::uniform(decomp(&a), vec![b.clone()]).unwrap();
        let sym = MoiSymbol::new(2, Arc::new(|x| Ok(c(x[0]))));
        assert!(close(
            &moi_evaluate(&sym, &ops).unwrap(),
            &a.matmul(&b),
            1e-12
        ));
    }

    #[test]
    fn daletskii_krein_entrywise() {
        let a = ComplexDenseMatrix::diag(&[1.0, 2.0]);
        let b = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ops = MoiOperands::uniform(decomp(&a), vec![b]).unwrap();
        let sym = MoiSymbol::divided_difference(&Polynomial::monomial(2).into(), 1);
        let got = moi_evaluate(&sym, &ops).unwrap();
        assert!(close(&got, &real(&[&[0.0, 3.0], &[3.0, 0.0]]), 1e-14));
    }

    #[test]
    fn arity_and_dimension_errors() {
        let d = decomp(&ComplexDenseMatrix::identity(2));
        let ops = MoiOperands::uniform(d.clone(), vec![ComplexDenseMatrix::identity(2)]).unwrap();
        assert!(matches!(
            moi_evaluate(&MoiSymbol::constant(3, c(1.0)), &ops),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            MoiOperands::uniform(d, vec![ComplexDenseMatrix::identity(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn one() -> RealToComplex {
        Arc::new(|_| c(1.0))
    }

    fn ident() -> RealToComplex {
        Arc::new(c)
    }

    #[test]
    fn separated_examples() {
        let mut rng = CounterRng::new(3);
        let a1 = rng.hermitian(3);
        let a2 = rng.hermitian(3);
        let b = rng.gaussian_matrix(3);
        let ops = MoiOperands::new(vec![decomp(&a1), decomp(&a2)], vec![b.clone()]).unwrap();
        let ones = SeparatedForm::new(
            2,
            vec![SeparatedTerm {
                weight: c(1.0),
                factors: vec![one(), one()],
            }],
        )
        .unwrap();
        assert!(close(&moi_separated(&ones, &ops).unwrap(), &b, 1e-13));
        let sum = SeparatedForm::new(
            2,
            vec![
                SeparatedTerm {
                    weight: c(1.0),
                    factors: vec![ident(), one()],
                },
                SeparatedTerm {
                    weight: c(1.0),
                    factors: vec![one(), ident()],
                },
            ],
        )
        .unwrap();
        let want = &a1.matmul(&b) + &b.matmul(&a2);
        assert!(close(&moi_separated(&sum, &ops).unwrap(), &want, 1e-12));
        let sym = MoiSymbol::from_separated(sum);
        assert!(close(&moi_evaluate(&sym, &ops).unwrap(), &want, 1e-12));
        // k = 2 with unit factors is the plain product
        let ops2 = MoiOperands::uniform(decomp(&a1), vec![b.clone(), a2.clone()]).unwrap();
        let ones3 = SeparatedForm::new(
            3,
            vec![SeparatedTerm {
                weight: c(1.0),
                factors: vec![one(), one(), one()],
            }],
        )
        .unwrap();
        assert!(close(
            &moi_separated(&ones3, &ops2).unwrap(),
            &b.matmul(&a2),
            1e-12
        ));
    }

    #[test]
    fn with_separated_validates() {
        let p = divided_difference_expansion(&Polynomial::monomial(2), 1);
        let sym = MoiSymbol::from_multivariate_polynomial(p);
        let good = SeparatedForm::new(
            2,
            vec![
                SeparatedTerm {
                    weight: c(1.0),
                    factors: vec![ident(), one()],
                },
                SeparatedTerm {
                    weight: c(1.0),
                    factors: vec![one(), ident()],
                },
            ],
        )
        .unwrap();
        let sym = sym.with_separated(good).unwrap();
        assert!(sym.separated().is_some());
        let bad = SeparatedForm::new(
            2,
            vec![SeparatedTerm {
                weight: c(1.0),
                factors: vec![ident(), ident()],
            }],
        )
        .unwrap();
        assert!(sym.with_separated(bad).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let mut rng = CounterRng::new(4);
        let a = rng.hermitian(4);
        let b = rng.hermitian(4);
        let ops = MoiOperands::uniform(decomp(&a), vec![b.clone()]).unwrap();
        let want = &a.matmul(&b) + &b.matmul(&a);
        assert!(close(&moi_polynomial(2, &ops).unwrap(), &want, 1e-12));
        let b2 = rng.gaussian_matrix(4);
        let ops2 = MoiOperands::uniform(decomp(&a), vec![b.clone(), b2.clone()]).unwrap();
        assert!(close(
            &moi_polynomial(2, &ops2).unwrap(),
            &b.matmul(&b2),
            1e-13
        ));
        assert!(moi_polynomial(1, &ops2).unwrap().is_zero());
    }

    #[test]
    fn polynomial_agrees_with_spectral_sum() {
        let mut rng = CounterRng::new(6);
        for k in 1..=3 {
            for m in k..=6 {
                let a: Vec<_> = (0..=k).map(|_| rng.hermitian(4)).collect();
                let b: Vec<_> = (0..k).map(|_| rng.gaussian_matrix(4)).collect();
                let ops = MoiOperands::new(a.iter().map(decomp).collect(), b).unwrap();
                let sym = MoiSymbol::divided_difference(&Polynomial::monomial(m).into(), k);
                let direct = moi_evaluate(&sym, &ops).unwrap();
                let cached = moi_polynomial(m, &ops).unwrap();
                assert!(close(&cached, &direct, 1e-10), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn wiener_examples() {
        let a = ComplexDenseMatrix::diag(&[0.0, std::f64::consts::PI]);
        let b = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let ops = MoiOperands::uniform(decomp(&a), vec![b]).unwrap();
        let rule = SimplexQuadratureRule::with_default_points(1);
        let got = moi_wiener(&WienerAtomic::cos(1.0), &ops, &rule).unwrap();
        assert!((got[(0, 1)] - c(-2.0 / std::f64::consts::PI)).norm() < 1e-12);
        assert!(moi_wiener(&WienerAtomic::new([]), &ops, &rule)
            .unwrap()
            .is_zero());
        assert!(moi_wiener(&WienerAtomic::single(0.0, c(3.0)), &ops, &rule)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn wiener_agrees_with_spectral_sum() {
        let mut rng = CounterRng::new(7);
        let f = WienerAtomic::new([(1.0, c(0.5)), (-1.3, Complex64::new(0.2, 0.4))]);
        for k in 1..=2 {
            let a = rng.hermitian(3);
            let b: Vec<_> = (0..k).map(|_| rng.hermitian(3)).collect();
            let ops = MoiOperands::uniform(decomp(&a), b).unwrap();
            let direct =
                moi_evaluate(&MoiSymbol::divided_difference(&f.clone().into(), k), &ops).unwrap();
            let rule = SimplexQuadratureRule::with_default_points(k);
            let quad = moi_wiener(&f, &ops, &rule).unwrap();
            assert!(close(&quad, &direct, 1e-9), "k={k}");
        }
    }

    #[test]
    fn perturbation_examples() {
        let mut rng = CounterRng::new(8);
        let a = rng.hermitian(5);
        let b = rng.hermitian(5);
        let p2: ScalarFunction = Polynomial::monomial(2).into();
        assert!(moi_perturbation(&p2, &a, &b).unwrap().pass);
        let same = moi_perturbation(&p2, &a, &a).unwrap();
        assert!(same.pass && same.primary().residual == 0.0);
        let cos: ScalarFunction = WienerAtomic::cos(1.0).into();
        assert!(moi_perturbation(&cos, &a, &b).unwrap().pass);
        let nh = rng.gaussian_matrix(5);
        assert!(matches!(
            moi_perturbation(&cos, &nh, &b),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn opnorm_examples() {
        let a = ComplexDenseMatrix::diag(&[1.0, 2.0]);
        let ops = MoiOperands::uniform(decomp(&a), vec![ComplexDenseMatrix::identity(2)]).unwrap();
        let unit = moi_opnorm_bound_check(&MoiSymbol::constant(2, c(1.0)), &ops, 5, 1).unwrap();
        assert!(unit.pass && (unit.primary().lhs - 1.0).abs() < 1e-12);
        let sym = MoiSymbol::divided_difference(&Polynomial::monomial(2).into(), 1);
        let r = moi_opnorm_bound_check(&sym, &ops, 100, 2).unwrap();
        // max |x + y| over {1,2}^2 is 4, so the bound is 2 * 4
        assert!(r.pass && r.primary().rhs == 8.0);
        let zero = moi_opnorm_bound_check(&MoiSymbol::constant(2, c(0.0)), &ops, 3, 3).unwrap();
        assert!(zero.pass && zero.primary().lhs == 0.0);
    }

    #[test]
    fn result_is_thread_count_independent() {
        let mut rng = CounterRng::new(9);
        let a = rng.hermitian(5);
        let b: Vec<_> = (0..2).map(|_| rng.hermitian(5)).collect();
        let ops = MoiOperands::uniform(decomp(&a), b).unwrap();
        let sym = MoiSymbol::divided_difference(&WienerAtomic::sin(1.0).into(), 2);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let x = one.install(|| moi_evaluate(&sym, &ops).unwrap());
        let y = four.install(|| moi_evaluate(&sym, &ops).unwrap());
        assert_eq!(x, y);
    }
}
