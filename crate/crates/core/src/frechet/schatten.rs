//! Schatten norms and the Hölder-type estimates for MOIs and remainders.

use crate::error::{Error, Result};
use crate::matrix::ComplexDenseMatrix;
use crate::moi::{moi_evaluate, MoiOperands, MoiSymbol};
use crate::report::{CheckRecord, VerificationReport};
use crate::scalar::{gauss_legendre_unit, wiener_iptp_bound, ScalarFunction, WienerAtomic};
use crate::spectral::{operator_norm, singular_values};

use super::remainder::taylor_remainder_direct;

/// Relative slack admitted by the inequality checks.
pub const SCHATTEN_SLACK: f64 = 1e-10;

/// Schatten exponent `p in [1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenSpec {
    p: f64,
}

impl SchattenSpec {
    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self { p })
        } else {
            Err(Error::InvalidP(p))
        }
    }

    pub fn operator() -> Self {
        Self { p: f64::INFINITY }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

pub fn schatten_norm(m: &ComplexDenseMatrix, spec: SchattenSpec) -> Result<f64> {
    let s = singular_values(m)?;
    let p = spec.p();
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    // scaled to avoid overflow for large p
    Ok(top
        * s.iter()
            .map(|v| (v / top).powf(p))
            .sum::<f64>()
            .powf(1.0 / p))
}

/// `max ||a + t b||` over `t` in the 32-point Gauss-Legendre nodes and the endpoints.
pub fn remainder_radius(a: &ComplexDenseMatrix, b: &ComplexDenseMatrix) -> Result<f64> {
    let (ts, _) = gauss_legendre_unit(32);
    let mut r: f64 = 0.0;
    for t in std::iter::once(0.0).chain(ts).chain(std::iter::once(1.0)) {
        let mut point = a.clone();
        point.axpy(num_complex::Complex64::new(t, 0.0), b);
        r = r.max(operator_norm(&point)?);
    }
    Ok(r)
}

pub fn remainder_schatten_check(
    f: &WienerAtomic,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
    p: f64,
) -> Result<VerificationReport> {
    remainder_schatten_check_with_slack(f, k, a, b, p, SCHATTEN_SLACK)
}

/// `||R_k(b)||_p <= (mu_(k) / k!) ||b||_{kp}^k` with `p` finite.
///
/// The Wiener moment bound stands in for the projective tensor norm of
/// `f^[k]`, which dominates it; the radius of the segment is recorded but
/// does not enter the surrogate.
pub fn remainder_schatten_check_with_slack(
    f: &WienerAtomic,
    k: usize,
    a: &ComplexDenseMatrix,
    b: &ComplexDenseMatrix,
    p: f64,
    slack: f64,
) -> Result<VerificationReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    let g: ScalarFunction = f.clone().into();
    let r = taylor_remainder_direct(&g, k, a, b)?;
    let lhs = schatten_norm(&r, SchattenSpec::new(p)?)?;
    let symbol_bound = wiener_iptp_bound(f, k);
    let rhs = symbol_bound * schatten_norm(b, SchattenSpec::new(k as f64 * p)?)?.powi(k as i32);
    let check = CheckRecord::bound(
        "remainder_schatten_bound",
        "||R_k(b)||_p <= ||f^[k]|| ||b||_{kp}^k",
        lhs,
        rhs,
        slack * (1.0 + rhs),
    );
    Ok(VerificationReport::new(
        "remainder_schatten",
        "Taylor remainder estimate",
        vec![check],
    )
    .with_metric("radius", remainder_radius(a, b)?)
    .with_metric("symbol_bound", symbol_bound)
    .with_metric("slack", rhs - lhs))
}

pub fn moi_schatten_check(
    sym: &MoiSymbol,
    ops: &MoiOperands,
    p: f64,
    slots: &[f64],
) -> Result<VerificationReport> {
    moi_schatten_check_with_slack(sym, ops, p, slots, SCHATTEN_SLACK)
}

/// `||(I^A phi)[B]||_p <= bound(phi) prod ||B_j||_{p_j}` with `1/p = sum 1/p_j`.
pub fn moi_schatten_check_with_slack(
    sym: &MoiSymbol,
    ops: &MoiOperands,
    p: f64,
    slots: &[f64],
    slack: f64,
) -> Result<VerificationReport> {
    let spec = SchattenSpec::new(p)?;
    let specs = slots
        .iter()
        .map(|&q| SchattenSpec::new(q))
        .collect::<Result<Vec<_>>>()?;
    if slots.len() != ops.order() {
        return Err(Error::ArityMismatch {
            symbol: ops.order(),
            operands: slots.len(),
        });
    }
    let sum: f64 = slots.iter().map(|q| 1.0 / q).sum();
    if (1.0 / p - sum).abs() > 1e-12 {
        return Err(Error::HolderMismatch {
            target: 1.0 / p,
            sum,
        });
    }
    let bound = sym.norm_bound(&ops.spectra()).ok_or_else(|| {
        Error::InvalidInput(
            "symbol has no computable norm bound (no provenance or separated form)".into(),
        )
    })?;
    let lhs = schatten_norm(&moi_evaluate(sym, ops)?, spec)?;
    let mut rhs = bound;
    for (b, s) in ops.middles().iter().zip(specs) {
        rhs *= schatten_norm(b, s)?;
    }
    let check = CheckRecord::bound(
        "moi_schatten_bound",
        "||(I^A phi)[B]||_p <= ||phi|| prod ||B_j||_{p_j}",
        lhs,
        rhs,
        slack * (1.0 + rhs),
    );
    Ok(
        VerificationReport::new("moi_schatten", "Schatten estimate for MOIs", vec![check])
            .with_metric("symbol_bound", bound)
            .with_metric("slack", rhs - lhs),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use crate::spectral::hermitian_eigendecompose;
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn norm_examples() {
        let i = ComplexDenseMatrix::identity(4);
        for p in [1.0, 2.0, 3.5] {
            let got = schatten_norm(&i, SchattenSpec::new(p).unwrap()).unwrap();
            assert!((got - 4f64.powf(1.0 / p)).abs() < 1e-12);
        }
        assert_eq!(schatten_norm(&i, SchattenSpec::operator()).unwrap(), 1.0);
        let d = ComplexDenseMatrix::diag(&[3.0, 4.0]);
        assert!((schatten_norm(&d, SchattenSpec::new(2.0).unwrap()).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(
            schatten_norm(
                &ComplexDenseMatrix::zeros(3),
                SchattenSpec::new(1.0).unwrap()
            )
            .unwrap(),
            0.0
        );
        assert_eq!(SchattenSpec::new(0.5), Err(Error::InvalidP(0.5)));
    }

    #[test]
    fn norms_decrease_in_p() {
        let mut rng = CounterRng::new(1);
        for _ in 0..10 {
            let m = rng.gaussian_matrix(5);
            let norms: Vec<f64> = [1.0, 1.5, 2.0, 4.0, f64::INFINITY]
                .iter()
                .map(|&p| schatten_norm(&m, SchattenSpec::new(p).unwrap()).unwrap())
                .collect();
            assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
            let two = norms[2];
            assert!((two - m.frobenius_norm()).abs() < 1e-12 * two);
        }
    }

    #[test]
    fn remainder_examples() {
        let mut rng = CounterRng::new(2);
        let a = rng.hermitian(4);
        let b = rng.hermitian(4).scale_real(0.3);
        let cos = WienerAtomic::cos(1.0);
        let zero =
            remainder_schatten_check(&cos, 2, &a, &ComplexDenseMatrix::zeros(4), 1.0).unwrap();
        assert!(zero.pass && zero.primary().lhs == 0.0 && zero.primary().rhs == 0.0);
        let r = remainder_schatten_check(&cos, 1, &a, &b, 1.0).unwrap();
        let b1 = schatten_norm(&b, SchattenSpec::new(1.0).unwrap()).unwrap();
        assert!(r.pass && (r.primary().rhs - b1).abs() < 1e-14);
        let atom = WienerAtomic::single(2.0, Complex64::new(1.0, 0.0));
        let r = remainder_schatten_check(&atom, 2, &a, &b, 1.0).unwrap();
        let b2 = schatten_norm(&b, SchattenSpec::new(2.0).unwrap()).unwrap();
        assert!(r.pass && (r.primary().rhs - 2.0 * b2 * b2).abs() < 1e-13);
        assert!(matches!(
            remainder_schatten_check(&cos, 1, &a, &b, f64::INFINITY),
            Err(Error::InvalidP(_))
        ));
    }

    #[test]
    fn moi_examples() {
        let mut rng = CounterRng::new(3);
        let a = rng.hermitian(5);
        let d = Arc::new(hermitian_eigendecompose(&a, None).unwrap());
        let b = rng.hermitian(5);
        let ops = MoiOperands::uniform(d.clone(), vec![b.clone()]).unwrap();
        let unit = moi_schatten_check(
            &MoiSymbol::constant(2, Complex64::new(1.0, 0.0)),
            &ops,
            2.0,
            &[2.0],
        )
        .unwrap();
        assert!(unit.pass && (unit.primary().lhs - unit.primary().rhs).abs() < 1e-12);
        let cos = MoiSymbol::divided_difference(&WienerAtomic::cos(1.0).into(), 1);
        let r = moi_schatten_check(&cos, &ops, 1.0, &[1.0]).unwrap();
        assert!(r.pass && r.metrics["slack"] >= 0.0);
        let zeros = MoiOperands::uniform(d.clone(), vec![ComplexDenseMatrix::zeros(5); 2]).unwrap();
        let sym2 = MoiSymbol::divided_difference(&WienerAtomic::cos(1.0).into(), 2);
        assert!(
            moi_schatten_check(&sym2, &zeros, 1.0, &[2.0, 2.0])
                .unwrap()
                .pass
        );
        assert!(matches!(
            moi_schatten_check(&sym2, &zeros, 1.0, &[2.0, 3.0]),
            Err(Error::HolderMismatch { .. })
        ));
    }
}
