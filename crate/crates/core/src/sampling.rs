//! Seeded random inputs for the identity and round-trip suites.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::Result;
use crate::linalg::{c, CMatrix, CVector, RVector};
use crate::realization::PlantModel;

/// Entries uniform in `[-1, 1)`.
pub fn real_vector<R: Rng>(len: usize, rng: &mut R) -> RVector {
    Array1::from_shape_fn(len, |_| rng.random_range(-1.0..1.0))
}

/// Real and imaginary parts uniform in `[-1, 1)`.
pub fn complex_vector<R: Rng>(len: usize, rng: &mut R) -> CVector {
    Array1::from_shape_fn(len, |_| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn complex_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    Array2::from_shape_fn((rows, cols), |_| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn plant_model<R: Rng>(n: usize, n_w: usize, rng: &mut R) -> Result<PlantModel> {
    let s = n * n - 1;
    let alpha = real_vector(s, rng);
    let lambda = complex_matrix(n_w, s, rng);
    PlantModel::new(n, alpha, lambda)
}
