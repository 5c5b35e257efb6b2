use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealToComplex = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Black-box function together with derivative evaluators of orders `1..=max_order`.
#[derive(Clone)]
pub struct CallableFunction {
    name: String,
    evaluator: RealToComplex,
    derivatives: Vec<RealToComplex>,
}

impl CallableFunction {
    /// `derivatives[j]` evaluates the derivative of order `j + 1`.
    pub fn new(
        name: impl Into<String>,
        evaluator: RealToComplex,
        derivatives: Vec<RealToComplex>,
    ) -> Self {
        Self {
            name: name.into(),
            evaluator,
            derivatives,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_order(&self) -> usize {
        self.derivatives.len()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        finite_or_domain((self.evaluator)(x), x)
    }

    pub fn derivative_at(&self, order: usize, x: f64) -> Result<Complex64> {
        if order == 0 {
            return self.eval(x);
        }
        let d = self
            .derivatives
            .get(order - 1)
            .ok_or(Error::InsufficientDerivatives {
                required: order,
                available: self.max_order(),
            })?;
        finite_or_domain(d(x), x)
    }

    /// `exp(a x)` with derivatives up to `max_order`.
    pub fn exp(a: f64, max_order: usize) -> Self {
        let derivatives = (1..=max_order)
            .map(|m| {
                let scale = a.powi(m as i32);
                Arc::new(move |x: f64| Complex64::new(scale * (a * x).exp(), 0.0)) as RealToComplex
            })
            .collect();
        Self::new(
            format!("exp({a}x)"),
            Arc::new(move |x| Complex64::new((a * x).exp(), 0.0)),
            derivatives,
        )
    }

    /// `sin(w x)` (or `cos(w x)` when `cosine`), derivatives up to `max_order`.
    pub fn trig(w: f64, cosine: bool, max_order: usize) -> Self {
        let phase0 = if cosine { 1 } else { 0 };
        let eval_at = move |m: usize, x: f64| {
            // d^m/dx^m sin(wx) = w^m sin(wx + m pi/2)
            let v = match (m + phase0) % 4 {
                0 => (w * x).sin(),
                1 => (w * x).cos(),
                2 => -(w * x).sin(),
                _ => -(w * x).cos(),
            };
            Complex64::new(w.powi(m as i32) * v, 0.0)
        };
        let derivatives = (1..=max_order)
            .map(|m| Arc::new(move |x: f64| eval_at(m, x)) as RealToComplex)
            .collect();
        let name = if cosine {
            format!("cos({w}x)")
        } else {
            format!("sin({w}x)")
        };
        Self::new(name, Arc::new(move |x| eval_at(0, x)), derivatives)
    }

    /// `|x|^p` with derivatives of order `m` while `m < p`, capped at `cap`.
    ///
    /// Even integer `p` is a polynomial and gets all `cap` derivatives.
    pub fn abs_pow(p: f64, cap: usize) -> Result<Self> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "abs_pow exponent must be >= 0, got {p}"
            )));
        }
        let even_integer = p.fract() == 0.0 && (p as u64).is_multiple_of(2);
        let smooth_orders = if even_integer {
            cap
        } else {
            // C^m at the origin requires m < p
            (p.ceil() as usize).saturating_sub(1).min(cap)
        };
        let eval_at = move |m: usize, x: f64| {
            let mut coeff = 1.0;
            for j in 0..m {
                coeff *= p - j as f64;
            }
            if coeff == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let sign = if x < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
            let e = p - m as f64;
            let base = if x == 0.0 && e == 0.0 {
                1.0
            } else {
                x.abs().powf(e)
            };
            Complex64::new(sign * coeff * base, 0.0)
        };
        let derivatives = (1..=smooth_orders)
            .map(|m| Arc::new(move |x: f64| eval_at(m, x)) as RealToComplex)
            .collect();
        Ok(Self::new(
            format!("|x|^{p}"),
            Arc::new(move |x| eval_at(0, x)),
            derivatives,
        ))
    }
}

fn finite_or_domain(z: Complex64, x: f64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::EvaluationDomain { point: x })
    }
}

impl fmt::Debug for CallableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallableFunction")
            .field("name", &self.name)
            .field("max_order", &self.max_order())
            .finish()
    }
}
