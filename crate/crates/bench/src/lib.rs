//! Seeded inputs shared by the criterion benchmarks.

use std::sync::Arc;

use moikit_core::suite::bounded_hermitian;
use moikit_core::{
    hermitian_eigendecompose, ComplexDenseMatrix, CounterRng, SpectralDecomposition,
};

/// `A` and `count` directions of size `n`, all with operator norm at most 1.
pub fn operands(n: usize, count: usize) -> (ComplexDenseMatrix, Vec<ComplexDenseMatrix>) {
    let mut rng = CounterRng::new(0x6d6f_696b_6974 ^ n as u64);
    let a = bounded_hermitian(&mut rng, n, 1.0);
    let b = (0..count)
        .map(|_| bounded_hermitian(&mut rng, n, 1.0))
        .collect();
    (a, b)
}

pub fn decomposition(a: &ComplexDenseMatrix) -> Arc<SpectralDecomposition> {
    Arc::new(hermitian_eigendecompose(a, None).expect("seeded input is Hermitian"))
}
