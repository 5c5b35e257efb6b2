//! Scalar functions on the real line and their divided differences.

mod bounds;
mod callable;
mod divdiff;
mod nodes;
mod polynomial;
mod quadrature;
mod wiener;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{
    divided_difference_expansion, divided_difference_sup_bound,
    divided_difference_sup_bound_with_grid, poly_iptp_bound, MultiIndex, MultivariatePolynomial,
    DEFAULT_SUP_GRID_POINTS,
};
pub use callable::{CallableFunction, RealToComplex};
pub use divdiff::{
    divided_difference, divided_difference_product, divided_difference_quadrature,
    divided_difference_recursive, poly_divided_difference, wiener_divided_difference,
};
pub use nodes::NodeTuple;
pub use polynomial::Polynomial;
pub use quadrature::{
    gauss_legendre, gauss_legendre_unit, SimplexQuadratureRule, DEFAULT_POINTS_PER_AXIS,
};
pub use wiener::{
    exp_tail, wiener_iptp_bound, wiener_moment, wiener_taylor_truncate, TaylorTruncation,
    WienerAtomic,
};

pub(crate) use wiener::{factorial, i_pow};

/// Derivative order exposed by builtins that are smooth to all orders.
pub const BUILTIN_MAX_ORDER: usize = 16;

/// A scalar function `R -> C` in one of three representations.
#[derive(Debug, Clone)]
pub enum ScalarFunction {
    Polynomial(Polynomial),
    Wiener(WienerAtomic),
    Callable(CallableFunction),
}

impl ScalarFunction {
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match self {
            ScalarFunction::Polynomial(p) => Ok(p.eval(x)),
            ScalarFunction::Wiener(w) => Ok(w.eval(x)),
            ScalarFunction::Callable(c) => c.eval(x),
        }
    }

    pub fn derivative_at(&self, order: usize, x: f64) -> Result<Complex64> {
        match self {
            ScalarFunction::Polynomial(p) => Ok(p.derivative_at(order, x)),
            ScalarFunction::Wiener(w) => Ok(w.derivative_at(order, x)),
            ScalarFunction::Callable(c) => c.derivative_at(order, x),
        }
    }

    /// Highest available derivative order, `None` when unlimited.
    pub fn max_order(&self) -> Option<usize> {
        match self {
            ScalarFunction::Callable(c) => Some(c.max_order()),
            _ => None,
        }
    }

    pub fn require_order(&self, k: usize) -> Result<()> {
        match self.max_order() {
            Some(available) if available < k => Err(Error::InsufficientDerivatives {
                required: k,
                available,
            }),
            _ => Ok(()),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            ScalarFunction::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_wiener(&self) -> Option<&WienerAtomic> {
        match self {
            ScalarFunction::Wiener(w) => Some(w),
            _ => None,
        }
    }

    /// True when `f^(k)` vanishes identically (polynomials of degree `< k`, empty Wiener measures).
    pub fn kth_derivative_vanishes(&self, k: usize) -> bool {
        match self {
            ScalarFunction::Polynomial(p) => p.is_zero() || (k > p.degree()),
            ScalarFunction::Wiener(w) => {
                w.atoms().is_empty() || (k >= 1 && w.atoms().iter().all(|(xi, _)| *xi == 0.0))
            }
            ScalarFunction::Callable(_) => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScalarFunction::Polynomial(p) => format!("polynomial(deg {})", p.degree()),
            ScalarFunction::Wiener(w) => format!("wiener({} atoms)", w.atoms().len()),
            ScalarFunction::Callable(c) => c.name().to_string(),
        }
    }

    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        spec.build()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: FunctionSpec = serde_json::from_str(s)?;
        spec.build()
    }
}

impl From<Polynomial> for ScalarFunction {
    fn from(p: Polynomial) -> Self {
        ScalarFunction::Polynomial(p)
    }
}

impl From<WienerAtomic> for ScalarFunction {
    fn from(w: WienerAtomic) -> Self {
        ScalarFunction::Wiener(w)
    }
}

impl From<CallableFunction> for ScalarFunction {
    fn from(c: CallableFunction) -> Self {
        ScalarFunction::Callable(c)
    }
}

/// JSON description of a scalar function.
///
/// ```json
/// {"kind": "polynomial", "coeffs": [[re, im], ...]}
/// {"kind": "wiener", "atoms": [[xi, re, im], ...]}
/// {"kind": "builtin", "name": "exp|sin|cos|abs_pow", "params": {...}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Polynomial {
        coeffs: Vec<[f64; 2]>,
    },
    Wiener {
        atoms: Vec<[f64; 3]>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl FunctionSpec {
    /// Builtin parameters: `exp` takes `a` (`exp(a x)`), `sin`/`cos` take `w`
    /// (`sin(w x)`), `abs_pow` takes `p` (`|x|^p`); all accept `max_order`.
    pub fn build(&self) -> Result<ScalarFunction> {
        match self {
            FunctionSpec::Polynomial { coeffs } => Ok(Polynomial::new(
                coeffs
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect(),
            )
            .into()),
            FunctionSpec::Wiener { atoms } => {
                if let Some(a) = atoms.iter().find(|a| a.iter().any(|v| !v.is_finite())) {
                    return Err(Error::Parse(format!("non-finite Wiener atom {a:?}")));
                }
                Ok(WienerAtomic::new(
                    atoms
                        .iter()
                        .map(|[xi, re, im]| (*xi, Complex64::new(*re, *im))),
                )
                .into())
            }
            FunctionSpec::Builtin { name, params } => {
                let param = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
                let max_order = param("max_order", BUILTIN_MAX_ORDER as f64);
                if max_order < 0.0 || max_order.fract() != 0.0 {
                    return Err(Error::Parse(format!(
                        "max_order must be a non-negative integer, got {max_order}"
                    )));
                }
                let max_order = max_order as usize;
                let allowed: &[&str] = match name.as_str() {
                    "exp" => &["a", "max_order"],
                    "sin" | "cos" => &["w", "max_order"],
                    "abs_pow" => &["p", "max_order"],
                    other => {
                        return Err(Error::Parse(format!("unknown builtin function `{other}`")))
                    }
                };
                if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(Error::Parse(format!(
                        "unknown parameter `{k}` for builtin `{name}`"
                    )));
                }
                let f = match name.as_str() {
                    "exp" => CallableFunction::exp(param("a", 1.0), max_order),
                    "sin" => CallableFunction::trig(param("w", 1.0), false, max_order),
                    "cos" => CallableFunction::trig(param("w", 1.0), true, max_order),
                    _ => CallableFunction::abs_pow(param("p", 2.0), max_order)
                        .map_err(|e| Error::Parse(e.to_string()))?,
                };
                Ok(f.into())
            }
        }
    }
}
