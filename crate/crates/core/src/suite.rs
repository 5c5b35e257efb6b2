//! Seeded verification suites.
//!
//! Every family draws its inputs from its own substream of the seed, so the
//! report of a family does not depend on which other families run, nor on
//! the number of threads. Each check kind is summarised by its worst case
//! (largest residual-to-tolerance ratio) plus every failing case.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frechet::{
    fd_oracle_step, matrix_function_derivative, moi_schatten_check_with_slack,
    power_map_derivative, remainder_schatten_check_with_slack, richardson_derivative,
    schatten_norm, taylor_remainder_direct, taylor_remainder_integral, taylor_remainder_moi,
    DerivativeRequest, SchattenSpec, DEFAULT_FD_STEP,
};
use crate::matrix::ComplexDenseMatrix;
use crate::moi::{
    moi_evaluate, moi_opnorm_bound_check, moi_perturbation_with_tol, moi_polynomial, moi_wiener,
    MoiOperands, MoiSymbol,
};
use crate::report::{CheckRecord, VerificationReport};
use crate::rng::CounterRng;
use crate::scalar::{
    divided_difference_quadrature, divided_difference_recursive, divided_difference_sup_bound,
    factorial, poly_divided_difference, wiener_divided_difference, wiener_iptp_bound,
    wiener_taylor_truncate, CallableFunction, MultiIndex, MultivariatePolynomial, NodeTuple,
    Polynomial, ScalarFunction, SimplexQuadratureRule, WienerAtomic,
};
use crate::spectral::{
    hermitian_eigendecompose, operator_norm, validate_decomposition, SpectralDecomposition,
};
use crate::tolerances::Tolerances;

pub const DEFAULT_SEED: u64 = 42;

type FamilyFn = fn(&mut CounterRng, &Tolerances) -> Result<Vec<VerificationReport>>;

/// Name, substream id, description, runner.
const FAMILIES: &[(&str, u64, &str, FamilyFn)] = &[
    (
        "divdiff",
        1,
        "divided differences: recursion vs closed form, symmetry, diagonal, sup bound",
        divdiff,
    ),
    (
        "quadrature",
        2,
        "simplex rule mass and quadrature vs recursion",
        quadrature,
    ),
    (
        "wiener",
        3,
        "Wiener moment bounds and Taylor truncation",
        wiener,
    ),
    (
        "decomposition",
        4,
        "spectral decomposition invariants",
        decomposition,
    ),
    (
        "perturbation",
        5,
        "f(A) - f(B) = (I^{A,B} f^[1])[A - B]",
        perturbation,
    ),
    (
        "moi_strategy",
        6,
        "MOI linearity and agreement of evaluation strategies",
        moi_strategy,
    ),
    ("opnorm", 7, "operator-norm bound n^k max|phi|", opnorm),
    (
        "derivative",
        8,
        "Frechet derivatives vs finite differences and power maps",
        derivative,
    ),
    (
        "remainder",
        9,
        "Taylor remainder: direct, MOI and integral forms",
        remainder,
    ),
    (
        "schatten",
        10,
        "Schatten-norm estimates for MOIs and remainders",
        schatten,
    ),
];

/// Names of all suite families, in run order.
pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.0).collect()
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Runs only families whose name contains this string.
    pub filter: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            filter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub name: String,
    pub description: String,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

/// Deterministic part of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub pass: bool,
    pub families: Vec<FamilyReport>,
}

impl SuiteReport {
    pub fn checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.families
            .iter()
            .flat_map(|f| f.reports.iter().flat_map(|r| r.checks.iter()))
    }

    pub fn family(&self, name: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub report: SuiteReport,
    /// Wall-clock seconds per family, in run order.
    pub timings: Vec<(String, f64)>,
}

pub fn run_suite(config: &SuiteConfig) -> SuiteRun {
    let selected: Vec<_> = FAMILIES
        .iter()
        .filter(|(name, ..)| config.filter.as_deref().is_none_or(|f| name.contains(f)))
        .collect();
    let root = CounterRng::new(config.seed);
    let results: Vec<(FamilyReport, f64)> = selected
        .par_iter()
        .map(|&&(name, stream, description, run)| {
            let start = Instant::now();
            let mut rng = root.substream(stream);
            let reports = run(&mut rng, &config.tolerances).unwrap_or_else(|e| {
                log::warn!("family {name} aborted: {e}");
                vec![VerificationReport::new(
                    name,
                    description,
                    vec![CheckRecord::compare(
                        format!("{name}_error"),
                        e.to_string(),
                        0.0,
                        0.0,
                        f64::MAX,
                        0.0,
                    )],
                )]
            });
            let pass = reports.iter().all(|r| r.pass);
            log::info!("family {name}: {}", if pass { "pass" } else { "FAIL" });
            let family = FamilyReport {
                name: name.to_string(),
                description: description.to_string(),
                pass,
                reports,
            };
            (family, start.elapsed().as_secs_f64())
        })
        .collect();
    let timings = results.iter().map(|(f, t)| (f.name.clone(), *t)).collect();
    let families: Vec<FamilyReport> = results.into_iter().map(|(f, _)| f).collect();
    SuiteRun {
        report: SuiteReport {
            seed: config.seed,
            pass: families.iter().all(|f| f.pass),
            families,
        },
        timings,
    }
}

/// Runs a single family by name with the given seed and tolerances.
pub fn run_family(name: &str, seed: u64, tolerances: &Tolerances) -> Option<FamilyReport> {
    let config = SuiteConfig {
        seed,
        tolerances: tolerances.clone(),
        filter: Some(name.to_string()),
    };
    run_suite(&config)
        .report
        .families
        .into_iter()
        .find(|f| f.name == name)
}

const MAX_LISTED_FAILURES: usize = 10;

/// Worst case and failures of one check kind across many cases.
struct Tally {
    name: &'static str,
    anchor: &'static str,
    cases: usize,
    failures: usize,
    worst: Option<(f64, CheckRecord)>,
    listed: Vec<CheckRecord>,
}

impl Tally {
    fn new(name: &'static str, anchor: &'static str) -> Self {
        Self {
            name,
            anchor,
            cases: 0,
            failures: 0,
            worst: None,
            listed: Vec::new(),
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, residual: f64, tolerance: f64) {
        self.push(CheckRecord::compare(
            self.name,
            self.anchor,
            lhs,
            rhs,
            residual,
            tolerance,
        ));
    }

    /// `value <= limit + slack`
    fn bound(&mut self, value: f64, limit: f64, slack: f64) {
        self.push(CheckRecord::bound(
            self.name,
            self.anchor,
            value,
            limit,
            slack,
        ));
    }

    /// `|got - want| <= tol (1 + |want|)` for matrices in Frobenius norm.
    fn matrices(&mut self, got: &ComplexDenseMatrix, want: &ComplexDenseMatrix, tol: f64) {
        let scale = 1.0 + want.frobenius_norm();
        self.record(
            got.frobenius_norm(),
            want.frobenius_norm(),
            (got - want).frobenius_norm() / scale,
            tol,
        );
    }

    fn push(&mut self, rec: CheckRecord) {
        self.cases += 1;
        let ratio = if rec.residual.is_nan() {
            f64::INFINITY
        } else if rec.tolerance > 0.0 {
            rec.residual / rec.tolerance
        } else if rec.residual > 0.0 {
            f64::INFINITY
        } else {
            rec.residual
        };
        if !rec.pass {
            self.failures += 1;
            if self.listed.len() < MAX_LISTED_FAILURES {
                self.listed.push(rec.clone());
            }
        }
        if self.worst.as_ref().is_none_or(|(w, _)| ratio > *w) {
            self.worst = Some((ratio, rec));
        }
    }

    fn finish(self) -> VerificationReport {
        let mut checks = Vec::new();
        if let Some((_, worst)) = &self.worst {
            checks.push(worst.clone());
        }
        checks.extend(
            self.listed
                .into_iter()
                .filter(|r| Some(r) != self.worst.as_ref().map(|w| &w.1)),
        );
        VerificationReport::new(self.name, self.anchor, checks)
            .with_metric("cases", self.cases as f64)
            .with_metric("failures", self.failures as f64)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Hermitian `n x n` with operator norm uniform in `[0.2, 1] * max_norm`.
pub fn bounded_hermitian(rng: &mut CounterRng, n: usize, max_norm: f64) -> ComplexDenseMatrix {
    let m = rng.hermitian(n);
    let norm = operator_norm(&m).unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let target = rng.uniform_in(0.2, 1.0) * max_norm;
    m.scale_real(target / norm)
}

/// Nodes uniform in `[lo, hi]` with pairwise gaps at least `gap` (rejection sampling).
pub fn separated_nodes(rng: &mut CounterRng, count: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    let mut nodes: Vec<f64> = Vec::with_capacity(count);
    while nodes.len() < count {
        let x = rng.uniform_in(lo, hi);
        if nodes.iter().all(|y| (x - y).abs() >= gap) {
            nodes.push(x);
        }
    }
    nodes
}

pub fn random_polynomial(rng: &mut CounterRng, degree: usize) -> Polynomial {
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    Polynomial::from_real(&coeffs)
}

/// One to three atoms with frequencies in `[-2, 2]`.
pub fn random_wiener(rng: &mut CounterRng) -> WienerAtomic {
    let atoms = rng.int_in(1, 3);
    WienerAtomic::new((0..atoms).map(|_| (rng.uniform_in(-2.0, 2.0), rng.complex_normal() * 0.5)))
}

/// Cycles through polynomial, cos, sin and Wiener test functions.
fn test_function(rng: &mut CounterRng, i: usize, max_degree: usize) -> ScalarFunction {
    match i % 4 {
        0 => {
            let degree = rng.int_in(0, max_degree);
            random_polynomial(rng, degree).into()
        }
        1 => WienerAtomic::cos(1.0).into(),
        2 => WienerAtomic::sin(1.0).into(),
        _ => random_wiener(rng).into(),
    }
}

fn decompose(a: &ComplexDenseMatrix) -> Result<Arc<SpectralDecomposition>> {
    Ok(Arc::new(hermitian_eigendecompose(a, None)?))
}

fn divdiff(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut closed = Tally::new(
        "divdiff_closed_form",
        "recursive divided difference = sum_n c_n h_{n-k}(x)",
    );
    let mut symmetry = Tally::new("divdiff_symmetry", "f^[k] is symmetric in its arguments");
    let mut diagonal = Tally::new("divdiff_diagonal", "f^[k](x, .., x) = f^(k)(x) / k!");
    let mut sup = Tally::new("divdiff_sup_bound", "|f^[k]| <= sup |f^(k)| / k!");
    for _ in 0..500 {
        let degree = rng.int_in(0, 8);
        let p = random_polynomial(rng, degree);
        let f: ScalarFunction = p.clone().into();
        let k = rng.int_in(0, 8);
        let mut x = separated_nodes(rng, k + 1, -2.0, 2.0, 0.1);
        let nodes = NodeTuple::new(x.clone())?;
        let want = poly_divided_difference(&p, &nodes);
        let rec = divided_difference_recursive(&f, &nodes, None)?;
        closed.record(
            rec.norm(),
            want.norm(),
            (rec - want).norm() / (1.0 + want.norm()),
            tol.get("divdiff_closed_form"),
        );

        rng.shuffle(&mut x);
        let permuted = NodeTuple::new(x)?;
        let sym = poly_divided_difference(&p, &permuted);
        symmetry.record(
            sym.norm(),
            want.norm(),
            (sym - want).norm() / (1.0 + want.norm()),
            tol.get("divdiff_symmetry"),
        );

        let l = rng.uniform_in(-2.0, 2.0);
        let diag = poly_divided_difference(&p, &NodeTuple::new(vec![l; k + 1])?);
        let deriv = p.derivative_at(k, l) / factorial(k);
        diagonal.record(
            diag.norm(),
            deriv.norm(),
            (diag - deriv).norm() / (1.0 + deriv.norm()),
            tol.get("divdiff_diagonal"),
        );

        let bound = divided_difference_sup_bound(&f, k, 2.0)?;
        sup.bound(
            want.norm(),
            bound,
            tol.get("divdiff_sup_bound") * (1.0 + bound),
        );
    }
    Ok(vec![
        closed.finish(),
        symmetry.finish(),
        diagonal.finish(),
        sup.finish(),
    ])
}

fn quadrature(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut mass = Tally::new("simplex_mass", "rho_k(simplex) = 1/k!");
    for k in 0..=4 {
        let rule = SimplexQuadratureRule::with_default_points(k);
        let exact = rule.exact_mass();
        mass.record(
            rule.total_weight(),
            exact,
            (rule.total_weight() - exact).abs() / exact,
            tol.get("simplex_mass"),
        );
    }
    let mut agree = Tally::new(
        "divdiff_quadrature",
        "f^[k](x) = integral over the simplex of f^(k)(t . x)",
    );
    let rules: Vec<SimplexQuadratureRule> = (0..=4)
        .map(SimplexQuadratureRule::with_default_points)
        .collect();
    for i in 0..60 {
        let f: ScalarFunction = match i % 3 {
            0 => CallableFunction::exp(rng.uniform_in(-1.5, 1.5), 8),
            1 => CallableFunction::trig(rng.uniform_in(0.5, 2.0), false, 8),
            _ => CallableFunction::trig(rng.uniform_in(0.5, 2.0), true, 8),
        }
        .into();
        let k = 1 + i % 4;
        let nodes = NodeTuple::new(separated_nodes(rng, k + 1, -1.0, 1.0, 0.05))?;
        let q = divided_difference_quadrature(&f, &nodes, &rules[k])?;
        let r = divided_difference_recursive(&f, &nodes, None)?;
        agree.record(
            q.norm(),
            r.norm(),
            (q - r).norm(),
            tol.get("divdiff_quadrature"),
        );
    }
    Ok(vec![mass.finish(), agree.finish()])
}

fn wiener(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut bound = Tally::new("wiener_bound", "|f^[j](x)| <= mu_(j) / j!");
    let mut quad = Tally::new(
        "wiener_divided_difference",
        "Fourier-atom quadrature of f^[k] = recursion",
    );
    for i in 0..100 {
        let f = random_wiener(rng);
        let j = i % 4;
        let nodes = NodeTuple::new(separated_nodes(rng, j + 1, -2.0, 2.0, 0.05))?;
        let g: ScalarFunction = f.clone().into();
        let value = divided_difference_recursive(&g, &nodes, None)?;
        let limit = wiener_iptp_bound(&f, j);
        bound.bound(value.norm(), limit, tol.get("wiener_bound") * (1.0 + limit));
        let rule = SimplexQuadratureRule::with_default_points(j);
        let w = wiener_divided_difference(&f, &nodes, &rule)?;
        quad.record(
            w.norm(),
            value.norm(),
            (w - value).norm(),
            tol.get("divdiff_quadrature"),
        );
    }
    let mut trunc = Tally::new(
        "taylor_truncation",
        "sup_{|x| <= r} |f - q_n| <= mu_(0) sum_{m > n} (rR)^m / m!",
    );
    let mut at_ten = Tally::new("truncation_n10", "degree-10 truncation of cos on [-1, 1]");
    let cos = WienerAtomic::cos(1.0);
    let grid: Vec<f64> = (0..1001).map(|i| -1.0 + 2.0 * i as f64 / 1000.0).collect();
    for n in 2..=12 {
        let t = wiener_taylor_truncate(&cos, n);
        let err = grid
            .iter()
            .map(|&x| (cos.eval(x) - t.polynomial.eval(x)).norm())
            .fold(0.0, f64::max);
        let limit = t.tail_bound(1.0);
        trunc.bound(err, limit, 1e-15);
        if n == 10 {
            at_ten.bound(err, tol.get("truncation_n10"), 0.0);
        }
    }
    Ok(vec![
        bound.finish(),
        quad.finish(),
        trunc.finish(),
        at_ten.finish(),
    ])
}

fn decomposition(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut invariants = Tally::new("decomposition_invariants", "spectral projections resolve A");
    let mut recon = Tally::new("decomposition", "A = sum_l l P_l");
    for i in 0..60 {
        let n = 1 + i % 6;
        let a = if i % 3 == 0 {
            // repeated eigenvalues through a random unitary
            let (_, u) = crate::spectral::jacobi_eigen(&rng.hermitian(n))?;
            let values: Vec<f64> = (0..n).map(|_| rng.int_in(0, 2) as f64 - 1.0).collect();
            u.matmul(&ComplexDenseMatrix::diag(&values))
                .matmul(&u.adjoint())
        } else {
            rng.hermitian(n)
        };
        let a = {
            // exact Hermitian symmetry
            let h = &a + &a.adjoint();
            h.scale_real(0.5)
        };
        let d = hermitian_eigendecompose(&a, None)?;
        let report = validate_decomposition(&d);
        let worst = report
            .checks
            .iter()
            .map(|r| {
                if r.tolerance > 0.0 {
                    r.residual / r.tolerance
                } else {
                    r.residual
                }
            })
            .fold(0.0, f64::max);
        invariants.bound(worst, 1.0, 0.0);
        let r = (&d.reconstruct() - &a).frobenius_norm() / (1.0 + a.frobenius_norm());
        recon.record(
            d.reconstruct().frobenius_norm(),
            a.frobenius_norm(),
            r,
            tol.get("decomposition"),
        );
    }
    Ok(vec![invariants.finish(), recon.finish()])
}

fn perturbation(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut tally = Tally::new("perturbation", "f(A) - f(B) = (I^{A,B} f^[1])[A - B]");
    for i in 0..100 {
        let n = 1 + rng.int_in(1, 5);
        let f = test_function(rng, i, 6);
        let a = rng.hermitian(n);
        let b = rng.hermitian(n);
        let report = moi_perturbation_with_tol(&f, &a, &b, tol.get("perturbation"))?;
        tally.push(report.checks[0].clone());
    }
    Ok(vec![tally.finish()])
}

fn moi_strategy(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let t = tol.get("moi_strategy");
    let mut poly = Tally::new(
        "moi_polynomial",
        "sum_{|g| = n-k} a_1^{g_1} b_1 .. a_{k+1}^{g_{k+1}} = I^A p_n^[k]",
    );
    let mut four = Tally::new(
        "moi_wiener",
        "Fourier-atom MOI = spectral-sum MOI for f^[k]",
    );
    let mut multi = Tally::new("moi_multilinearity", "I^A phi is k-linear in B");
    let mut symlin = Tally::new(
        "moi_symbol_linearity",
        "I^A (alpha phi + psi) = alpha I^A phi + I^A psi",
    );
    let lin = tol.get("moi_linearity");
    for k in 1..=3 {
        for m in 0..=6 {
            let n = rng.int_in(2, 6);
            let a: Vec<_> = (0..=k).map(|_| bounded_hermitian(rng, n, 1.0)).collect();
            let b: Vec<_> = (0..k).map(|_| rng.gaussian_matrix(n)).collect();
            let ops = MoiOperands::new(a.iter().map(decompose).collect::<Result<_>>()?, b)?;
            let direct = moi_evaluate(
                &MoiSymbol::divided_difference(&Polynomial::monomial(m).into(), k),
                &ops,
            )?;
            poly.matrices(&moi_polynomial(m, &ops)?, &direct, t);
        }
        for i in 0..4 {
            let n = rng.int_in(2, 5);
            let f = match i {
                0 => WienerAtomic::cos(1.0),
                1 => WienerAtomic::sin(1.0),
                2 => WienerAtomic::single(rng.uniform_in(-2.0, 2.0), c(1.0)),
                _ => random_wiener(rng),
            };
            let a: Vec<_> = (0..=k).map(|_| bounded_hermitian(rng, n, 1.0)).collect();
            let b: Vec<_> = (0..k).map(|_| bounded_hermitian(rng, n, 1.0)).collect();
            let ops = MoiOperands::new(a.iter().map(decompose).collect::<Result<_>>()?, b)?;
            let direct = moi_evaluate(&MoiSymbol::divided_difference(&f.clone().into(), k), &ops)?;
            let rule = SimplexQuadratureRule::with_default_points(k);
            four.matrices(&moi_wiener(&f, &ops, &rule)?, &direct, t);
        }
        for _ in 0..4 {
            let n = rng.int_in(2, 6);
            let f = random_wiener(rng);
            let sym = MoiSymbol::divided_difference(&f.clone().into(), k);
            let a: Vec<_> = (0..=k).map(|_| rng.hermitian(n)).collect();
            let b: Vec<_> = (0..k).map(|_| rng.gaussian_matrix(n)).collect();
            let decomps: Vec<_> = a.iter().map(decompose).collect::<Result<_>>()?;
            let ops = MoiOperands::new(decomps.clone(), b.clone())?;
            let slot = rng.int_in(0, k - 1);
            let alpha = rng.complex_normal();
            let other = rng.gaussian_matrix(n);
            let mut mixed = b.clone();
            mixed[slot] = &b[slot].scale(alpha) + &other;
            let mut swapped = b.clone();
            swapped[slot] = other;
            let lhs = moi_evaluate(&sym, &ops.with_middles(mixed)?)?;
            let mut rhs = moi_evaluate(&sym, &ops)?.scale(alpha);
            rhs += &moi_evaluate(&sym, &ops.with_middles(swapped)?)?;
            multi.matrices(&lhs, &rhs, lin);

            let g = random_polynomial(rng, 5);
            let psi = MoiSymbol::divided_difference(&g.into(), k);
            let (s1, s2) = (sym.clone(), psi.clone());
            let combined = MoiSymbol::new(
                k + 1,
                Arc::new(move |x| Ok(s1.eval(x)? * alpha + s2.eval(x)?)),
            );
            let lhs = moi_evaluate(&combined, &ops)?;
            let mut rhs = moi_evaluate(&sym, &ops)?.scale(alpha);
            rhs += &moi_evaluate(&psi, &ops)?;
            symlin.matrices(&lhs, &rhs, lin);
        }
    }
    Ok(vec![
        poly.finish(),
        four.finish(),
        multi.finish(),
        symlin.finish(),
    ])
}

fn opnorm(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut tally = Tally::new(
        "opnorm_bound",
        "||I^A phi|| <= n^k max |phi| over the spectral grid",
    );
    for i in 0..100 {
        let k = 1 + i % 3;
        let n = rng.int_in(2, 6);
        let sym = match i % 4 {
            0 => MoiSymbol::constant(k + 1, rng.complex_normal()),
            1 => MoiSymbol::divided_difference(&random_polynomial(rng, 6).into(), k),
            2 => MoiSymbol::divided_difference(&random_wiener(rng).into(), k),
            _ => MoiSymbol::divided_difference(&WienerAtomic::cos(1.0).into(), k),
        };
        let a: Vec<_> = (0..=k).map(|_| rng.hermitian(n)).collect();
        let ops = MoiOperands::new(
            a.iter().map(decompose).collect::<Result<_>>()?,
            vec![ComplexDenseMatrix::identity(n); k],
        )?;
        let report = moi_opnorm_bound_check(&sym, &ops, 8, rng.next_u64())?;
        let rec = &report.checks[0];
        tally.bound(rec.lhs, rec.rhs, tol.get("opnorm_bound") * (1.0 + rec.rhs));
    }
    Ok(vec![tally.finish()])
}

fn relative(got: &ComplexDenseMatrix, want: &ComplexDenseMatrix) -> f64 {
    let diff = (got - want).frobenius_norm();
    let norm = want.frobenius_norm();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

fn derivative(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut fd = Tally::new(
        "derivative_fd",
        "D^k f(A)[B] = sum_pi (I^{A..A} f^[k])[B_pi] vs finite differences",
    );
    let mut power = Tally::new(
        "derivative_power",
        "MOI derivative of p_m = power-map derivative",
    );
    let mut symmetry = Tally::new(
        "derivative_symmetry",
        "D^k f(A) is symmetric in its directions",
    );
    let mut linear = Tally::new(
        "derivative_linearity",
        "D^k f(A) is linear in each direction",
    );
    for k in 1..=3 {
        for i in 0..16 {
            let f = match i % 4 {
                0 => {
                    let degree = rng.int_in(k, 6);
                    random_polynomial(rng, degree).into()
                }
                1 => WienerAtomic::cos(1.0).into(),
                2 => WienerAtomic::sin(1.0).into(),
                _ => WienerAtomic::single(rng.uniform_in(-2.0, 2.0), rng.complex_normal()).into(),
            };
            let n = rng.int_in(2, 6);
            let a = bounded_hermitian(rng, n, 1.0);
            let dirs: Vec<_> = (0..k).map(|_| bounded_hermitian(rng, n, 1.0)).collect();
            let req = DerivativeRequest::new(f, a, dirs);
            let moi = matrix_function_derivative(&req)?;
            let oracle = richardson_derivative(
                &req.f,
                &req.a,
                &req.directions,
                fd_oracle_step(DEFAULT_FD_STEP, k),
            )?;
            fd.record(
                oracle.frobenius_norm(),
                moi.frobenius_norm(),
                relative(&oracle, &moi),
                tol.get("derivative_fd"),
            );

            let mut shuffled = req.clone();
            rng.shuffle(&mut shuffled.directions);
            let permuted = matrix_function_derivative(&shuffled)?;
            symmetry.record(
                permuted.frobenius_norm(),
                moi.frobenius_norm(),
                relative(&permuted, &moi),
                tol.get("derivative_symmetry"),
            );

            let slot = rng.int_in(0, k - 1);
            let alpha = rng.uniform_in(-2.0, 2.0);
            let other = bounded_hermitian(rng, n, 1.0);
            let mut mixed = req.clone();
            mixed.directions[slot] = &req.directions[slot].scale_real(alpha) + &other;
            let mut swapped = req.clone();
            swapped.directions[slot] = other;
            let lhs = matrix_function_derivative(&mixed)?;
            let mut rhs = moi.scale_real(alpha);
            rhs += &matrix_function_derivative(&swapped)?;
            linear.record(
                lhs.frobenius_norm(),
                rhs.frobenius_norm(),
                relative(&lhs, &rhs),
                tol.get("derivative_linearity"),
            );
        }
        for m in 0..=8 {
            let n = rng.int_in(2, 6);
            let a = bounded_hermitian(rng, n, 1.0);
            let dirs: Vec<_> = (0..k).map(|_| bounded_hermitian(rng, n, 1.0)).collect();
            let req =
                DerivativeRequest::new(Polynomial::monomial(m).into(), a.clone(), dirs.clone());
            let moi = matrix_function_derivative(&req)?;
            let want = power_map_derivative(m, &a, &dirs)?;
            power.record(
                moi.frobenius_norm(),
                want.frobenius_norm(),
                relative(&moi, &want),
                tol.get("derivative_power"),
            );
        }
    }
    Ok(vec![
        fd.finish(),
        power.finish(),
        symmetry.finish(),
        linear.finish(),
    ])
}

fn remainder(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let mut moi = Tally::new(
        "remainder_moi",
        "R_k(b) = (I^{a+b, a, .., a} f^[k])[b, .., b]",
    );
    let mut integral = Tally::new(
        "remainder_integral",
        "R_k(b) = k int_0^1 (1-t)^{k-1} (I^{a+tb..} f^[k])[b..b] dt",
    );
    for k in 1..=3 {
        for i in 0..12 {
            let f = test_function(rng, i, 6);
            let n = rng.int_in(2, 6);
            let a = bounded_hermitian(rng, n, 1.0);
            let b = bounded_hermitian(rng, n, 1.0);
            let direct = taylor_remainder_direct(&f, k, &a, &b)?;
            moi.matrices(
                &taylor_remainder_moi(&f, k, &a, &b)?,
                &direct,
                tol.get("remainder_moi"),
            );
            integral.matrices(
                &taylor_remainder_integral(&f, k, &a, &b, 32)?,
                &direct,
                tol.get("remainder_integral"),
            );
        }
    }
    Ok(vec![moi.finish(), integral.finish()])
}

/// Slot exponents in `{1, 2, inf}` with `sum 1/p_j <= 1`, and the resulting `p`.
fn holder_exponents(rng: &mut CounterRng, k: usize) -> (f64, Vec<f64>) {
    const CHOICES: [f64; 3] = [1.0, 2.0, f64::INFINITY];
    loop {
        let slots: Vec<f64> = (0..k).map(|_| CHOICES[rng.int_in(0, 2)]).collect();
        let sum: f64 = slots.iter().map(|p| 1.0 / p).sum();
        if sum <= 1.0 {
            let p = if sum == 0.0 { f64::INFINITY } else { 1.0 / sum };
            return (p, slots);
        }
    }
}

fn schatten(rng: &mut CounterRng, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    let slack = tol.get("schatten_bound");
    let mut holder = Tally::new(
        "moi_schatten_bound",
        "||(I^A phi)[B]||_p <= ||phi|| prod ||B_j||_{p_j}",
    );
    let mut remainder_bound = Tally::new(
        "remainder_schatten_bound",
        "||R_k(b)||_p <= ||f^[k]|| ||b||_{kp}^k",
    );
    let mut identity = Tally::new("schatten_identity", "||I_n||_p = n^{1/p}");
    for i in 0..100 {
        let k = 1 + i % 3;
        let n = rng.int_in(2, 6);
        let sym = if i % 2 == 0 {
            MoiSymbol::divided_difference(&random_wiener(rng).into(), k)
        } else {
            let total = rng.int_in(0, 3) as u32;
            let terms = MultiIndex::compositions(total, k + 1)
                .into_iter()
                .map(|g| (g, rng.complex_normal()))
                .collect();
            MoiSymbol::from_multivariate_polynomial(MultivariatePolynomial::new(k + 1, terms)?)
        };
        let a: Vec<_> = (0..=k).map(|_| rng.hermitian(n)).collect();
        let b: Vec<_> = (0..k).map(|_| rng.gaussian_matrix(n)).collect();
        let ops = MoiOperands::new(a.iter().map(decompose).collect::<Result<_>>()?, b)?;
        let (p, slots) = holder_exponents(rng, k);
        holder.push(moi_schatten_check_with_slack(&sym, &ops, p, &slots, slack)?.checks[0].clone());
    }
    for i in 0..100 {
        let k = 1 + i % 3;
        let n = rng.int_in(2, 6);
        let f = match i % 3 {
            0 => WienerAtomic::cos(1.0),
            1 => WienerAtomic::sin(1.0),
            _ => random_wiener(rng),
        };
        let a = rng.hermitian(n);
        let b = bounded_hermitian(rng, n, 1.0);
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        remainder_bound
            .push(remainder_schatten_check_with_slack(&f, k, &a, &b, p, slack)?.checks[0].clone());
    }
    for n in 1..=6 {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let got = schatten_norm(&ComplexDenseMatrix::identity(n), SchattenSpec::new(p)?)?;
            let want = (n as f64).powf(1.0 / p);
            identity.record(got, want, (got - want).abs(), tol.get("schatten_identity"));
        }
    }
    Ok(vec![
        holder.finish(),
        remainder_bound.finish(),
        identity.finish(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_families() {
        let config = SuiteConfig {
            filter: Some("perturbation".into()),
            ..SuiteConfig::default()
        };
        let run = run_suite(&config);
        assert_eq!(run.report.families.len(), 1);
        assert_eq!(run.report.families[0].name, "perturbation");
        assert!(run.report.pass);
    }

    #[test]
    fn corrupted_tolerance_fails() {
        let mut tolerances = Tolerances::default();
        tolerances.set("perturbation", 1e-20).unwrap();
        let config = SuiteConfig {
            tolerances,
            filter: Some("perturbation".into()),
            ..SuiteConfig::default()
        };
        let report = run_suite(&config).report;
        assert!(!report.pass);
        assert!(report.checks().any(|c| !c.pass && c.residual > 1e-20));
    }

    #[test]
    fn holder_exponents_are_consistent() {
        let mut rng = CounterRng::new(1);
        for k in 1..=3 {
            for _ in 0..20 {
                let (p, slots) = holder_exponents(&mut rng, k);
                let sum: f64 = slots.iter().map(|q| 1.0 / q).sum();
                assert!(p >= 1.0 && (1.0 / p - sum).abs() < 1e-15);
            }
        }
    }
}
