use crate::error::{Error, Result};

/// Ordered nodes `(x_1, ..., x_{k+1})` of a divided difference of order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTuple {
    nodes: Vec<f64>,
    min_gap: f64,
}

impl NodeTuple {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput(
                "a node tuple needs at least one node".into(),
            ));
        }
        if let Some(x) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite node {x}")));
        }
        let min_gap = min_gap(&nodes);
        Ok(Self { nodes, min_gap })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `min_{i != j} |x_i - x_j|`; infinite for a single node.
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn max_abs(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Default coincidence threshold `1e-8 * (1 + max |x|)`.
    pub fn default_coincidence_tol(&self) -> f64 {
        1e-8 * (1.0 + self.max_abs())
    }

    /// Nodes `from..=to` (0-based, inclusive) as a new tuple.
    pub fn sub_tuple(&self, from: usize, to: usize) -> NodeTuple {
        NodeTuple::new(self.nodes[from..=to].to_vec()).expect("non-empty sub-tuple of valid nodes")
    }
}

fn min_gap(nodes: &[f64]) -> f64 {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}
