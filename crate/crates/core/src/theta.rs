//! The linear maps Θ⁻ and Θ⁺ and the column-stacking operator.
//!
//! `Θ⁻(β)` has entries `Σ_k f_abk β_k` (column `i` is `F_iᵀβ`) and is
//! antisymmetric; `Θ⁺(β)` has entries `Σ_k d_abk β_k` and is symmetric. A
//! 1-D array carries no row/column orientation, so the convention that a row
//! argument is transposed first is automatic here.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{StructureConstants, TensorEntry};
use crate::error::{Error, Result};

/// Relative antisymmetry tolerance for [`ThetaContext::recover_vector`].
pub const ANTISYMMETRY_TOL: f64 = 1e-9;

/// Scalars the Θ maps act on: real or complex doubles.
pub trait Scalar:
    Copy
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + std::fmt::Debug
{
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ThetaContext<'a> {
    sc: &'a StructureConstants,
}

fn contract<T: Scalar>(entries: &[TensorEntry], s: usize, beta: ArrayView1<T>) -> Array2<T> {
    let mut out = Array2::<T>::zeros((s, s));
    for e in entries {
        out[[e.i, e.j]] += beta[e.k] * e.value;
    }
    out
}

impl<'a> ThetaContext<'a> {
    pub fn new(sc: &'a StructureConstants) -> Self {
        ThetaContext { sc }
    }

    pub fn constants(&self) -> &'a StructureConstants {
        self.sc
    }

    pub fn s(&self) -> usize {
        self.sc.s()
    }

    pub fn n(&self) -> usize {
        self.sc.n()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.s() {
            return Err(Error::dims("Θ argument", self.s(), len));
        }
        Ok(())
    }

    pub fn theta_minus<T: Scalar>(&self, beta: ArrayView1<T>) -> Result<Array2<T>> {
        self.check_len(beta.len())?;
        Ok(contract(self.sc.f_entries(), self.s(), beta))
    }

    pub fn theta_plus<T: Scalar>(&self, beta: ArrayView1<T>) -> Result<Array2<T>> {
        self.check_len(beta.len())?;
        Ok(contract(self.sc.d_entries(), self.s(), beta))
    }

    /// Inverts Θ⁻ on its image: `(1/n) Fᵀ vec(Θ)`.
    ///
    /// Rejects inputs whose symmetric part exceeds
    /// [`ANTISYMMETRY_TOL`] relative to `‖Θ‖_max`. Antisymmetric matrices
    /// outside the image of Θ⁻ are projected, not rejected.
    pub fn recover_vector<T: Scalar>(&self, theta: ArrayView2<T>) -> Result<Array1<T>> {
        let s = self.s();
        if theta.dim() != (s, s) {
            return Err(Error::dims(
                "Θ matrix",
                format!("{s}x{s}"),
                format!("{}x{}", theta.nrows(), theta.ncols()),
            ));
        }
        let mut scale: f64 = 0.0;
        let mut asym: f64 = 0.0;
        for ((a, b), &x) in theta.indexed_iter() {
            scale = scale.max(x.magnitude());
            asym = asym.max((x + theta[[b, a]]).magnitude());
        }
        let tolerance = ANTISYMMETRY_TOL * scale;
        if asym > tolerance {
            return Err(Error::NotAntisymmetric {
                asymmetry: asym,
                tolerance,
            });
        }
        Ok(self
            .stacked_transpose(theta)?
            .mapv(|x| x * (1.0 / self.n() as f64)))
    }

    /// `Fᵀ vec(M)` for any square `M`, i.e. `Σ_ab f_abk M_ab`. Symmetric
    /// parts of `M` contribute nothing.
    pub fn stacked_transpose<T: Scalar>(&self, m: ArrayView2<T>) -> Result<Array1<T>> {
        let s = self.s();
        if m.dim() != (s, s) {
            return Err(Error::dims(
                "stacked contraction",
                format!("{s}x{s}"),
                format!("{}x{}", m.nrows(), m.ncols()),
            ));
        }
        let mut out = Array1::<T>::zeros(s);
        for e in self.sc.f_entries() {
            out[e.k] += m[[e.i, e.j]] * e.value;
        }
        Ok(out)
    }
}

/// Column-major stacking of a square matrix.
pub fn vec<T: Clone>(m: ArrayView2<T>) -> Result<Array1<T>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(m.t().iter().cloned().collect())
}
