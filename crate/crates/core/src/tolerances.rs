//! Default tolerances for every verification check, by name.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Name, default value, meaning.
pub const DEFAULT_TOLERANCES: &[(&str, f64, &str)] = &[
    (
        "divdiff_closed_form",
        1e-9,
        "recursion vs closed form, relative",
    ),
    (
        "divdiff_symmetry",
        1e-9,
        "permuted nodes, relative to 1 + |value|",
    ),
    (
        "divdiff_diagonal",
        1e-9,
        "f^[k](x..x) vs f^(k)(x)/k!, relative",
    ),
    (
        "divdiff_sup_bound",
        1e-9,
        "slack on |f^[k]| <= sup|f^(k)|/k!",
    ),
    ("simplex_mass", 1e-12, "rule weight vs 1/k!, relative"),
    (
        "divdiff_quadrature",
        1e-7,
        "quadrature vs recursion, absolute",
    ),
    ("wiener_bound", 1e-9, "slack on |f^[j]| <= mu_(j)/j!"),
    (
        "product_rule",
        1e-8,
        "product rule vs closed form, relative to scale",
    ),
    (
        "decomposition",
        1e-10,
        "reconstruction relative Frobenius error",
    ),
    (
        "perturbation",
        1e-8,
        "f(A)-f(B) vs MOI, relative to 1 + ||f(A)||_F",
    ),
    (
        "derivative_fd",
        1e-4,
        "MOI derivative vs finite differences, relative",
    ),
    (
        "derivative_power",
        1e-10,
        "MOI derivative vs power-map formula, relative",
    ),
    (
        "derivative_symmetry",
        1e-12,
        "derivative under permuted directions, relative",
    ),
    (
        "derivative_linearity",
        1e-10,
        "derivative additivity/homogeneity in one slot, relative",
    ),
    (
        "remainder_moi",
        1e-8,
        "direct vs MOI remainder, relative to scale",
    ),
    (
        "remainder_integral",
        1e-6,
        "direct vs integral remainder, relative to scale",
    ),
    (
        "schatten_bound",
        1e-10,
        "relative slack on Schatten inequalities",
    ),
    ("schatten_identity", 1e-12, "||I_n||_p vs n^(1/p)"),
    (
        "opnorm_bound",
        1e-10,
        "relative slack on the n^k max|phi| bound",
    ),
    (
        "moi_strategy",
        1e-8,
        "polynomial/Wiener MOI vs spectral sum, relative",
    ),
    (
        "moi_linearity",
        1e-9,
        "MOI linearity in operands and symbol, relative to scale",
    ),
    (
        "truncation_n10",
        3e-8,
        "grid error of the degree-10 Taylor truncation of cos",
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            values: DEFAULT_TOLERANCES
                .iter()
                .map(|(k, v, _)| (k.to_string(), *v))
                .collect(),
        }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self
            .values
            .get(name)
            .unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    /// Overrides a known tolerance; unknown names and negative values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance `{name}` must be >= 0, got {value}"
            )));
        }
        match self.values.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::InvalidInput(format!("unknown tolerance `{name}`"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
